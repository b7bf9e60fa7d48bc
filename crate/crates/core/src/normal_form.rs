//! Canonical representatives of Higgs bundles under bundle automorphisms,
//! used to decide isomorphism exactly.
//!
//! For the trivial bundle the automorphisms are constant matrices; the first
//! three distinct directions in the order `0, inf, 1, lambda, t` are sent to
//! `(1,0), (0,1), (1,1)`, or with only
//! two distinct directions the torus left over is fixed by the Higgs field.
//! For `O(-1) + O(1)` the automorphisms are `[[a, 0], [q(x), b]]` with
//! `deg q <= 2`; `q` clears the slopes of the first three directions off
//! `O(1)`, and the torus scales the next nonzero slope (or the field) to 1.

use num_traits::{One, Zero};

use crate::arith::linalg::solve_affine;
use crate::arith::{FMat2, Poly, RMat2, RatFunc, Rational};
use crate::bundles::{direction_groups, Direction, Marked, ParabolicBundle};
use crate::error::{Error, Result};
use crate::higgs::HiggsField;

/// Applies the automorphism `h` (x-chart) with value `h_inf` in the frame at
/// infinity: `l' = h l`, `theta' = h theta h^-1`.
pub fn transform(th: &HiggsField, h: &FMat2, h_inf: &RMat2) -> Result<HiggsField> {
    let b = &th.base;
    let mut dirs = b.dirs.clone();
    for m in Marked::ALL {
        let hm = match b.sphere.coord(m) {
            Some(p) => h.try_map(|f| f.eval(&p).ok_or(Error::DivisionByZero))?,
            None => h_inf.clone(),
        };
        dirs[m.index()] = Direction::from_vec(&hm.apply(b.dir(m).coords()))?;
    }
    let base = ParabolicBundle::new(b.sphere.clone(), b.d, dirs)?;
    let hi = h.inverse().ok_or_else(|| Error::Internal("singular automorphism".into()))?;
    HiggsField::from_matrix(&base, &h.mul(&th.matrix()).mul(&hi))
}

pub(crate) fn constant(m: &RMat2) -> FMat2 {
    let f = |i, j| RatFunc::constant(m.get(i, j).clone());
    FMat2::new(f(0, 0), f(0, 1), f(1, 0), f(1, 1))
}

fn first_nonzero(p: &Poly) -> Option<Rational> {
    p.coeffs().iter().find(|c| !c.is_zero()).cloned()
}

/// Scales the second basis vector so the first nonzero coefficient of
/// `gamma` (else `beta`) becomes 1.
fn fix_torus(th: &HiggsField) -> Result<HiggsField> {
    let s = match (first_nonzero(&th.gamma), first_nonzero(&th.beta)) {
        (Some(c), _) => Rational::one() / c,
        (None, Some(c)) => c,
        (None, None) => return Ok(th.clone()),
    };
    let h = RMat2::diag(Rational::one(), s);
    transform(th, &constant(&h), &h)
}

pub fn normalize_higgs(th: &HiggsField) -> Result<HiggsField> {
    match th.base.d {
        0 => normalize_trivial(th),
        1 => normalize_split(th),
        d => Err(Error::SplittingOutOfRange(d)),
    }
}

pub fn normalize_bundle(b: &ParabolicBundle) -> Result<ParabolicBundle> {
    Ok(normalize_higgs(&HiggsField::zero(b))?.base)
}

/// Exact isomorphism test via normal forms.
pub fn isomorphic(a: &HiggsField, b: &HiggsField) -> Result<bool> {
    Ok(a.base.sphere == b.base.sphere && normalize_higgs(a)? == normalize_higgs(b)?)
}

const CHART_ORDER: [Marked; 5] = [Marked::Zero, Marked::Inf, Marked::One, Marked::Lambda, Marked::T];

fn normalize_trivial(th: &HiggsField) -> Result<HiggsField> {
    let mut groups = direction_groups(&th.base);
    // Chart order 0, inf, 1, lambda, t: a bundle already in the normalized
    // chart l0 = (1,0), l_inf = (0,1), l1 = (1,1) is its own normal form.
    let rank = |s: &crate::bundles::PointSet| {
        CHART_ORDER.iter().position(|m| s.contains(*m)).expect("nonempty group")
    };
    groups.sort_by_key(|(_, s)| rank(s));
    if groups.len() < 2 {
        return Err(Error::Invalid("all directions coincide; no normal form".into()));
    }
    let p = RMat2::from_cols(groups[0].0.coords().clone(), groups[1].0.coords().clone());
    let pi = p.inverse().expect("distinct directions");
    if groups.len() == 2 {
        return fix_torus(&transform(th, &constant(&pi), &pi)?);
    }
    let c = pi.apply(groups[2].0.coords());
    let h = RMat2::diag(Rational::one() / &c[0], Rational::one() / &c[1]).mul(&pi);
    transform(th, &constant(&h), &h)
}

fn normalize_split(th: &HiggsField) -> Result<HiggsField> {
    let b = &th.base;
    let off: Vec<Marked> = Marked::ALL
        .into_iter()
        .filter(|m| !b.dir(*m).coords()[0].is_zero())
        .collect();
    if off.len() < 3 {
        return Err(Error::Invalid("fewer than three directions off O(1); no normal form".into()));
    }
    // q(p) = -slope(p) at the first three such points (top coefficient at
    // infinity).
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for m in &off[..3] {
        let row = match b.sphere.coord(*m) {
            Some(p) => vec![Rational::one(), p.clone(), &p * &p],
            None => vec![Rational::zero(), Rational::zero(), Rational::one()],
        };
        rows.push(row);
        rhs.push(-b.dir(*m).coords()[1].clone());
    }
    let (qv, _) = solve_affine(&rows, &rhs, 3).ok_or_else(|| Error::Internal("interpolation".into()))?;
    let q = Poly::new(qv);
    let h = FMat2::new(RatFunc::one(), RatFunc::zero(), RatFunc::from_poly(q.clone()), RatFunc::one());
    let h_inf = RMat2::new(Rational::one(), Rational::zero(), q.coeff(2), Rational::one());
    let th = transform(th, &h, &h_inf)?;
    let next = off[3..]
        .iter()
        .map(|m| th.base.dir(*m).coords()[1].clone())
        .find(|s| !s.is_zero());
    match next {
        Some(s) => {
            let t = RMat2::diag(Rational::one(), Rational::one() / s);
            transform(&th, &constant(&t), &t)
        }
        None => fix_torus(&th),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, q};
    use crate::bundles::MarkedSphere;
    use crate::elem::{elem_higgs, ElemMask};
    use crate::higgs::{combine, higgs_space};

    fn sphere() -> MarkedSphere {
        MarkedSphere::new(int(4), int(5)).unwrap()
    }

    #[test]
    fn constant_frame_change_is_invisible() {
        let b = ParabolicBundle::normalized(sphere(), q(2, 3), q(-5, 2));
        let sp = higgs_space(&b).unwrap();
        let th = combine(&b, &sp, &[int(2), q(-1, 3)]);
        let g = RMat2::new(int(2), int(1), int(-3), int(5));
        let moved = transform(&th, &constant(&g), &g).unwrap();
        assert_ne!(moved, th);
        assert!(isomorphic(&moved, &th).unwrap());
        let n = normalize_higgs(&th).unwrap();
        assert_eq!(normalize_higgs(&n).unwrap(), n);
        assert_eq!(n, th);
    }

    #[test]
    fn elem_twice_is_identity_up_to_isomorphism() {
        let b = ParabolicBundle::normalized(sphere(), q(2, 3), q(-5, 2));
        let sp = higgs_space(&b).unwrap();
        let th = combine(&b, &sp, &[int(2), q(-1, 3)]);
        for mask in ElemMask::all() {
            let once = elem_higgs(&th, mask).unwrap();
            let twice = elem_higgs(&once, mask).unwrap();
            assert!(isomorphic(&twice, &th).unwrap(), "mask {mask}");
            let n = normalize_higgs(&once).unwrap();
            assert_eq!(normalize_higgs(&n).unwrap(), n);
        }
    }

    #[test]
    fn split_normal_form_absorbs_polynomial_gauge() {
        let b = ParabolicBundle::new(
            sphere(),
            1,
            std::array::from_fn(|i| Direction::slope(int([3, -1, 2, 7, 5][i]))),
        )
        .unwrap();
        let sp = higgs_space(&b).unwrap();
        assert_eq!(sp.len(), 2);
        let th = combine(&b, &sp, &[int(1), int(1)]);
        let q = Poly::new(vec![int(1), int(-2), int(3)]);
        let h = FMat2::new(RatFunc::constant(int(2)), RatFunc::zero(), RatFunc::from_poly(q.clone()), RatFunc::one());
        let h_inf = RMat2::new(int(2), int(0), q.coeff(2), int(1));
        let moved = transform(&th, &h, &h_inf).unwrap();
        assert!(isomorphic(&moved, &th).unwrap());
    }
}
