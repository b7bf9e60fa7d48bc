//! Elementary transformations over even subsets of marked points, twisted
//! back to degree zero and re-split into standard form.

use std::fmt;

use num_traits::Zero;

use crate::arith::linalg::rank;
use crate::arith::{FMat2, Poly, RMat2, RatFunc, Rational};
use crate::bundles::{
    classify_table1, incidence_kernel, lines_through, Direction, Line16, Marked, MarkedSphere,
    ParabolicBundle, PointSet, Table1Label, WeightVector,
};
use crate::error::{Error, Result};
use crate::higgs::HiggsField;

/// An even subset of the marked points.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElemMask(PointSet);

impl ElemMask {
    pub fn new(s: PointSet) -> Result<Self> {
        if s.len() % 2 == 1 {
            return Err(Error::OddMask(s.len()));
        }
        Ok(ElemMask(s))
    }

    pub fn of(points: &[Marked]) -> Result<Self> {
        ElemMask::new(PointSet::of(points))
    }

    pub fn identity() -> Self {
        ElemMask(PointSet::EMPTY)
    }

    pub fn set(self) -> PointSet {
        self.0
    }

    /// The sixteen even masks in bit order.
    pub fn all() -> Vec<ElemMask> {
        PointSet::all().filter(|s| s.len() % 2 == 0).map(ElemMask).collect()
    }
}

impl fmt::Display for ElemMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `elem_I o elem_J = elem_K` with `K` the symmetric difference.
pub fn group_compose(i: ElemMask, j: ElemMask) -> ElemMask {
    ElemMask(i.0.sym_diff(j.0))
}

/// `mu_i -> 1 - mu_i` on the mask.
pub fn weight_transform(mu: &WeightVector, mask: ElemMask) -> WeightVector {
    WeightVector(std::array::from_fn(|i| {
        let m = Marked::from_index(i);
        if mask.0.contains(m) {
            Rational::from_integer(1.into()) - mu.get(m)
        } else {
            mu.get(m).clone()
        }
    }))
}

/// The change of frame produced by an elementary transformation: old
/// x-chart coordinates are `g` times new ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeromorphicGauge {
    pub matrix: FMat2,
    /// Finite zeros of `det g`, each simple.
    pub det_divisor: Vec<Rational>,
    pub mask: ElemMask,
}

/// Result of transforming a bundle.
#[derive(Clone, Debug)]
pub struct ElemResult {
    pub bundle: ParabolicBundle,
    pub gauge: MeromorphicGauge,
}

/// Sections of `elem_I(E)(h + j)` with `h = |I| / 2`, as polynomial pairs.
fn twisted_sections(b: &ParabolicBundle, mask: PointSet, h: i64, j: i64) -> Vec<(Poly, Poly)> {
    incidence_kernel(b, mask, -h - j)
}

fn kernel_of(m: &RMat2) -> [Rational; 2] {
    let r = if m.get(0, 0).is_zero() && m.get(0, 1).is_zero() { 1 } else { 0 };
    [m.get(r, 1).clone(), -m.get(r, 0).clone()]
}

fn eval_mat(m: &[[Poly; 2]; 2], p: &Rational) -> RMat2 {
    RMat2::new(m[0][0].eval(p), m[0][1].eval(p), m[1][0].eval(p), m[1][1].eval(p))
}

pub fn elem_bundle(b: &ParabolicBundle, mask: ElemMask) -> Result<ElemResult> {
    let s = mask.0;
    if s.is_empty() {
        return Ok(ElemResult {
            bundle: b.clone(),
            gauge: MeromorphicGauge { matrix: FMat2::identity(), det_divisor: Vec::new(), mask },
        });
    }
    let h = (s.len() / 2) as i64;
    let d = b.d;
    let jmin = (-h - d..=0)
        .find(|&j| !twisted_sections(b, s, h, j).is_empty())
        .ok_or_else(|| Error::Internal("no sections after twisting".into()))?;
    let dn = -jmin;
    if dn >= 2 {
        return Err(Error::SplittingOutOfRange(dn));
    }
    let low = twisted_sections(b, s, h, -dn);
    let (s1, s2) = if dn == 0 {
        if low.len() != 2 {
            return Err(Error::Internal(format!("expected 2 sections, found {}", low.len())));
        }
        (low[0].clone(), low[1].clone())
    } else {
        if low.len() != 1 {
            return Err(Error::Internal(format!("expected 1 section, found {}", low.len())));
        }
        let s2 = low[0].clone();
        let high = twisted_sections(b, s, h, dn);
        // Coefficient vectors of sections of F(d'), to test independence
        // from the multiples x^i s2.
        let na = (h + dn - d + 1).max(0) as usize;
        let nb = (h + dn + d + 1).max(0) as usize;
        let flat = |a: &Poly, bb: &Poly| -> Vec<Rational> {
            let mut v: Vec<Rational> = (0..na as i64).map(|i| a.coeff(i)).collect();
            v.extend((0..nb as i64).map(|i| bb.coeff(i)));
            v
        };
        let multiples: Vec<Vec<Rational>> = (0..=2 * dn as usize)
            .map(|i| flat(&s2.0.shift(i), &s2.1.shift(i)))
            .collect();
        let r0 = rank(&multiples, na + nb);
        let s1 = high
            .into_iter()
            .find(|(a, bb)| {
                let mut m = multiples.clone();
                m.push(flat(a, bb));
                rank(&m, na + nb) > r0
            })
            .ok_or_else(|| Error::Internal("no complementary section".into()))?;
        (s1, s2)
    };
    let g = [[s1.0.clone(), s2.0.clone()], [s1.1.clone(), s2.1.clone()]];
    let det = &(&g[0][0] * &g[1][1]) - &(&g[0][1] * &g[1][0]);
    let finite: Vec<Rational> = s.iter().filter_map(|m| b.sphere.coord(m)).collect();
    let expected = Poly::from_roots(&finite);
    let (quot, rem) = det.div_rem(&expected)?;
    if !rem.is_zero() || quot.deg() != 0 {
        return Err(Error::Internal(format!("gauge determinant {det} has wrong divisor")));
    }

    let mut dirs = b.dirs.clone();
    for m in Marked::ALL {
        let gm = match b.sphere.coord(m) {
            Some(p) => eval_mat(&g, &p),
            None => RMat2::new(
                g[0][0].coeff(h + dn - d),
                g[0][1].coeff(h - dn - d),
                g[1][0].coeff(h + dn + d),
                g[1][1].coeff(h - dn + d),
            ),
        };
        let v = if s.contains(m) {
            kernel_of(&gm)
        } else {
            let inv = gm
                .inverse()
                .ok_or_else(|| Error::Internal(format!("gauge singular at {m}")))?;
            inv.apply(b.dir(m).coords())
        };
        dirs[m.index()] = Direction::from_vec(&v)?;
    }
    let bundle = ParabolicBundle::new(b.sphere.clone(), dn, dirs)?;
    let matrix = FMat2::new(
        RatFunc::from_poly(g[0][0].clone()),
        RatFunc::from_poly(g[0][1].clone()),
        RatFunc::from_poly(g[1][0].clone()),
        RatFunc::from_poly(g[1][1].clone()),
    );
    Ok(ElemResult { bundle, gauge: MeromorphicGauge { matrix, det_divisor: finite, mask } })
}

/// Transforms a Higgs field: `theta' = g^-1 theta g`.
pub fn elem_higgs(th: &HiggsField, mask: ElemMask) -> Result<HiggsField> {
    let r = elem_bundle(&th.base, mask)?;
    let g = &r.gauge.matrix;
    let gi = g.inverse().ok_or_else(|| Error::Internal("singular gauge".into()))?;
    let m = gi.mul(&th.matrix()).mul(g);
    HiggsField::from_matrix(&r.bundle, &m)
}

/// A representative bundle for each Table-1 label. `q` is a quadratic
/// polynomial selecting the `O(-1)` for rows 2 and 3.
pub fn table1_representative(sph: &MarkedSphere, label: Table1Label, q: &Poly) -> ParabolicBundle {
    let on_minus_one = |m: Marked| match sph.coord(m) {
        Some(p) => Direction::slope(q.eval(&p)),
        None => Direction::slope(q.coeff(2)),
    };
    let (d, dirs): (i64, [Direction; 5]) = match label {
        Table1Label::Row1(pair) => (
            0,
            std::array::from_fn(|i| {
                if pair.contains(Marked::from_index(i)) { Direction::e2() } else { Direction::e1() }
            }),
        ),
        Table1Label::Row2(u) => (
            1,
            std::array::from_fn(|i| {
                let m = Marked::from_index(i);
                if m == u { Direction::e2() } else { on_minus_one(m) }
            }),
        ),
        Table1Label::Row3 => (1, std::array::from_fn(|i| on_minus_one(Marked::from_index(i)))),
    };
    ParabolicBundle { sphere: sph.clone(), d, dirs }
}

/// Action of every mask on the Table-1 labels, as `perm[mask][label - 1]`.
pub fn table1_permutations(sph: &MarkedSphere) -> Result<Vec<(ElemMask, Vec<Table1Label>)>> {
    let q = Poly::new(vec![Rational::from_integer(3.into()), Rational::new(2.into(), 7.into()), Rational::from_integer((-5).into())]);
    ElemMask::all()
        .into_iter()
        .map(|mask| {
            let image = Table1Label::all()
                .into_iter()
                .map(|label| {
                    let b = table1_representative(sph, label, &q);
                    let out = elem_bundle(&b, mask)?.bundle;
                    classify_table1(&out).ok_or_else(|| {
                        Error::Internal(format!("image of {label} under {mask} is not a Table1Label"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((mask, image))
        })
        .collect()
}

/// A stable bundle lying on exactly the given special line, built from the
/// supplied generic slopes.
pub fn line_representative(sph: &MarkedSphere, line: Line16, slopes: &[Rational; 5]) -> ParabolicBundle {
    let generic: [Direction; 5] = std::array::from_fn(|i| match i {
        0 => Direction::e1(),
        4 => Direction::e2(),
        _ => Direction::slope(slopes[i].clone()),
    });
    match line {
        Line16::Pair(s) => {
            let v: Vec<Marked> = s.iter().collect();
            let mut dirs = generic;
            dirs[v[1].index()] = dirs[v[0].index()].clone();
            ParabolicBundle { sphere: sph.clone(), d: 0, dirs }
        }
        Line16::Quad(s) => {
            // The O(-1) spanned by (x - s0, s1 x + s2) on the trivial bundle.
            let a = Poly::new(vec![-slopes[0].clone(), Rational::from_integer(1.into())]);
            let b = Poly::new(vec![slopes[2].clone(), slopes[1].clone()]);
            let dirs = std::array::from_fn(|i| {
                let m = Marked::from_index(i);
                if !s.contains(m) {
                    return Direction::slope(slopes[3].clone());
                }
                let v = match sph.coord(m) {
                    Some(p) => [a.eval(&p), b.eval(&p)],
                    None => [a.coeff(1), b.coeff(1)],
                };
                Direction::from_vec(&v).expect("coprime pair")
            });
            ParabolicBundle { sphere: sph.clone(), d: 0, dirs }
        }
        Line16::Quint => ParabolicBundle {
            sphere: sph.clone(),
            d: 1,
            dirs: std::array::from_fn(|i| Direction::slope(slopes[i].clone())),
        },
    }
}

/// Default generic slopes used for line representatives.
pub fn default_slopes() -> [Rational; 5] {
    let r = |n: i64, d: i64| Rational::new(n.into(), d.into());
    [r(-3, 7), r(5, 11), r(13, 3), r(-17, 5), r(29, 13)]
}

/// Action of every mask on the special lines.
pub fn line_permutations(sph: &MarkedSphere) -> Result<Vec<(ElemMask, Vec<Line16>)>> {
    let slopes = default_slopes();
    ElemMask::all()
        .into_iter()
        .map(|mask| {
            let image = Line16::all()
                .into_iter()
                .map(|line| {
                    let b = line_representative(sph, line, &slopes);
                    let out = elem_bundle(&b, mask)?.bundle;
                    match lines_through(&out)?.as_slice() {
                        [l] => Ok(*l),
                        other => Err(Error::Internal(format!(
                            "image of {line} under {mask} lies on {} lines",
                            other.len()
                        ))),
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((mask, image))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, q};
    use crate::bundles::{classify_stability, Stability};
    use crate::higgs::{higgs_det, higgs_space, combine};

    fn sphere() -> MarkedSphere {
        MarkedSphere::new(int(4), int(5)).unwrap()
    }

    #[test]
    fn masks_and_weights() {
        assert_eq!(ElemMask::all().len(), 16);
        assert!(matches!(ElemMask::of(&[Marked::Zero]), Err(Error::OddMask(1))));
        let a = ElemMask::of(&[Marked::Zero, Marked::One]).unwrap();
        let b = ElemMask::of(&[Marked::One, Marked::Lambda]).unwrap();
        assert_eq!(group_compose(a, b), ElemMask::of(&[Marked::Zero, Marked::Lambda]).unwrap());
        assert_eq!(group_compose(a, a), ElemMask::identity());
        let mu = WeightVector([q(3, 4), q(1, 4), q(1, 4), q(1, 4), q(1, 4)]);
        let out = weight_transform(&mu, a);
        assert_eq!(out.0, [q(1, 4), q(3, 4), q(1, 4), q(1, 4), q(1, 4)]);
        assert_eq!(weight_transform(&WeightVector::central(), a), WeightVector::central());
    }

    #[test]
    fn identity_mask_is_identity() {
        let b = ParabolicBundle::normalized(sphere(), q(2, 3), q(-5, 2));
        assert_eq!(elem_bundle(&b, ElemMask::identity()).unwrap().bundle, b);
    }

    #[test]
    fn elem_preserves_determinant_and_stability() {
        let b = ParabolicBundle::normalized(sphere(), q(2, 3), q(-5, 2));
        let sp = higgs_space(&b).unwrap();
        let th = combine(&b, &sp, &[int(2), q(-1, 3)]);
        let s = higgs_det(&th).unwrap();
        let mu = WeightVector::central();
        for mask in ElemMask::all() {
            let out = elem_higgs(&th, mask).unwrap();
            assert_eq!(higgs_det(&out).unwrap(), s, "mask {mask}");
            assert_eq!(classify_stability(&out.base, &mu).class, Stability::Stable);
        }
    }

    #[test]
    fn table1_orbit_is_everything() {
        let perms = table1_permutations(&sphere()).unwrap();
        let base = Table1Label::all()[0];
        let mut orbit: Vec<Table1Label> = perms.iter().map(|(_, img)| img[base.index() - 1]).collect();
        orbit.sort();
        orbit.dedup();
        assert_eq!(orbit.len(), 16);
    }

    #[test]
    fn line_orbit_is_everything() {
        let perms = line_permutations(&sphere()).unwrap();
        let mut orbit: Vec<Line16> = perms.iter().map(|(_, img)| img[0]).collect();
        orbit.sort();
        orbit.dedup();
        assert_eq!(orbit.len(), 16);
    }
}
