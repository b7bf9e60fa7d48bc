//! Parabolic Higgs fields `[[a, b], [c, -a]] dx / D` with
//! `D = x (x-1) (x-lambda) (x-t)`.

use num_traits::Zero;

use crate::arith::linalg::kernel;
use crate::arith::{FMat2, Mat2, Poly, RMat2, RatFunc, Rational};
use crate::bundles::{
    classify_stability, formal_stab, saturate, Marked, ParabolicBundle, Stability, Subbundle,
    WeightVector,
};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HiggsField {
    pub base: ParabolicBundle,
    pub alpha: Poly,
    pub beta: Poly,
    pub gamma: Poly,
}

/// Coordinates `(h1, h2)` of `det theta = (h1 + h2 x) dx^2 / D`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HitchinPoint {
    pub h1: Rational,
    pub h2: Rational,
}

impl HitchinPoint {
    pub fn new(h1: Rational, h2: Rational) -> Self {
        HitchinPoint { h1, h2 }
    }

    pub fn is_zero(&self) -> bool {
        self.h1.is_zero() && self.h2.is_zero()
    }
}

/// Degree bounds `(alpha, beta, gamma)` for splitting type `d`.
pub fn degree_bounds(d: i64) -> (i64, i64, i64) {
    (3, 3 - 2 * d, 3 + 2 * d)
}

pub fn make_higgs(base: &ParabolicBundle, alpha: Poly, beta: Poly, gamma: Poly) -> Result<HiggsField> {
    let (da, db, dc) = degree_bounds(base.d);
    for (name, p, bound) in [("alpha", &alpha, da), ("beta", &beta, db), ("gamma", &gamma, dc)] {
        if p.deg() > bound {
            return Err(Error::DegreeOverflow(format!("deg {name} = {} > {bound}", p.deg())));
        }
    }
    let th = HiggsField { base: base.clone(), alpha, beta, gamma };
    for m in Marked::ALL {
        let r = th.residue_matrix(m);
        let l = base.dir(m).coords();
        if r.apply(l).iter().any(|e| !e.is_zero()) {
            return Err(Error::NotNilpotent(m.to_string()));
        }
    }
    Ok(th)
}

impl HiggsField {
    pub fn zero(base: &ParabolicBundle) -> HiggsField {
        HiggsField { base: base.clone(), alpha: Poly::zero(), beta: Poly::zero(), gamma: Poly::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.alpha.is_zero() && self.beta.is_zero() && self.gamma.is_zero()
    }

    /// Numerator matrix `[[alpha, beta], [gamma, -alpha]]`.
    pub fn numerator(&self) -> Mat2<Poly> {
        Mat2 { m: [[self.alpha.clone(), self.beta.clone()], [self.gamma.clone(), -&self.alpha]] }
    }

    /// The matrix `M(x)` with `theta = M(x) dx` in the x-chart frame.
    pub fn matrix(&self) -> FMat2 {
        let den = self.base.sphere.denominator();
        let f = |p: &Poly| RatFunc::new(p.clone(), den.clone()).expect("nonzero denominator");
        FMat2::new(f(&self.alpha), f(&self.beta), f(&self.gamma), f(&-&self.alpha))
    }

    /// Residue at a marked point, in the chart frame there.
    pub fn residue_matrix(&self, m: Marked) -> RMat2 {
        let sph = &self.base.sphere;
        let (_, db, dc) = degree_bounds(self.base.d);
        match sph.coord(m) {
            Some(p) => {
                let dp = sph.denominator().derivative().eval(&p);
                let e = |poly: &Poly| poly.eval(&p) / &dp;
                RMat2::new(e(&self.alpha), e(&self.beta), e(&self.gamma), -e(&self.alpha))
            }
            None => {
                let a3 = self.alpha.coeff(3);
                RMat2::new(-a3.clone(), -self.beta.coeff(db), -self.gamma.coeff(dc), a3)
            }
        }
    }

    pub fn add(&self, o: &HiggsField) -> HiggsField {
        HiggsField {
            base: self.base.clone(),
            alpha: &self.alpha + &o.alpha,
            beta: &self.beta + &o.beta,
            gamma: &self.gamma + &o.gamma,
        }
    }

    pub fn scale(&self, c: &Rational) -> HiggsField {
        HiggsField {
            base: self.base.clone(),
            alpha: self.alpha.scale(c),
            beta: self.beta.scale(c),
            gamma: self.gamma.scale(c),
        }
    }

    /// Rebuilds a field from an x-chart matrix `M(x)` (so `theta = M dx`).
    pub fn from_matrix(base: &ParabolicBundle, m: &FMat2) -> Result<HiggsField> {
        if !m.trace().is_zero() {
            return Err(Error::NonzeroTrace);
        }
        let den = base.sphere.denominator();
        let num = |f: &RatFunc| -> Result<Poly> {
            let g = f.mul_poly(&den);
            g.as_poly()
                .cloned()
                .ok_or_else(|| Error::PoleOutsideDivisor(format!("{f}")))
        };
        make_higgs(base, num(m.get(0, 0))?, num(m.get(0, 1))?, num(m.get(1, 0))?)
    }

    /// Kernel of the matrix over the function field when it is nilpotent
    /// and nonzero.
    pub fn kernel_vector(&self) -> Option<[Poly; 2]> {
        if self.is_zero() || !higgs_det(self).ok()?.is_zero() {
            return None;
        }
        Some(if self.alpha.is_zero() && self.beta.is_zero() {
            [Poly::zero(), Poly::one()]
        } else {
            [self.beta.clone(), -&self.alpha]
        })
    }
}

/// `(h1, h2)` with `-alpha^2 - beta gamma = (h1 + h2 x) D`.
pub fn higgs_det(th: &HiggsField) -> Result<HitchinPoint> {
    let num = &(-&(&th.alpha * &th.alpha)) - &(&th.beta * &th.gamma);
    let (quot, rem) = num.div_rem(&th.base.sphere.denominator())?;
    if !rem.is_zero() || quot.deg() > 1 {
        return Err(Error::Internal(format!("determinant numerator {num} is not (h1 + h2 x) D")));
    }
    Ok(HitchinPoint::new(quot.coeff(0), quot.coeff(1)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InvariantLines {
    All,
    One(Subbundle),
    None,
}

/// Invariant line subbundles: everything for `theta = 0`, the saturated
/// kernel for nonzero nilpotent fields, and none otherwise (a nonzero
/// determinant numerator of degree at most 5 is never a square times D).
pub fn invariant_lines(th: &HiggsField) -> Result<InvariantLines> {
    if th.is_zero() {
        return Ok(InvariantLines::All);
    }
    match th.kernel_vector() {
        Some([a, b]) => Ok(InvariantLines::One(saturate(&th.base, &a, &b)?)),
        None => Ok(InvariantLines::None),
    }
}

/// `2 alpha a b + beta b^2 - gamma a^2`, zero iff `(a, b)` spans an
/// invariant line.
pub fn invariance_defect(th: &HiggsField, a: &Poly, b: &Poly) -> Poly {
    let two = Rational::from_integer(2.into());
    let t1 = (&(&th.alpha * a) * b).scale(&two);
    let t2 = &(&th.beta * b) * b;
    let t3 = &(&th.gamma * a) * a;
    &(&t1 + &t2) - &t3
}

/// Stability over invariant subbundles only.
pub fn higgs_stability(th: &HiggsField, mu: &WeightVector) -> Result<Stability> {
    Ok(match invariant_lines(th)? {
        InvariantLines::All => classify_stability(&th.base, mu).class,
        InvariantLines::None => Stability::Stable,
        InvariantLines::One(l) => Stability::from_value(&formal_stab(l.degree, l.incident, mu)),
    })
}

/// Linear conditions on the coefficient vector `(alpha, beta, gamma)`
/// expressing `Res(theta, i) l_i = 0` at every marked point.
pub fn nilpotency_system(base: &ParabolicBundle) -> (Vec<Vec<Rational>>, [usize; 3]) {
    let (da, db, dc) = degree_bounds(base.d);
    let sizes = [(da + 1) as usize, (db + 1).max(0) as usize, (dc + 1) as usize];
    let n = sizes.iter().sum::<usize>();
    let off = [0, sizes[0], sizes[0] + sizes[1]];
    let mut rows = Vec::new();
    for m in Marked::ALL {
        let l = base.dir(m).coords();
        // Row of N l where N = [[alpha, beta], [gamma, -alpha]] evaluated at
        // p (or the top coefficients at infinity).
        let mut r1 = vec![Rational::zero(); n];
        let mut r2 = vec![Rational::zero(); n];
        let basis = |part: usize, k: usize| -> Rational {
            match base.sphere.coord(m) {
                Some(p) => num_traits::pow(p, k),
                None => {
                    let top = [da, db, dc][part] as usize;
                    if k == top { Rational::from_integer(1.into()) } else { Rational::zero() }
                }
            }
        };
        for k in 0..sizes[0] {
            let e = basis(0, k);
            r1[off[0] + k] += &e * &l[0];
            r2[off[0] + k] -= &e * &l[1];
        }
        for k in 0..sizes[1] {
            r1[off[1] + k] += basis(1, k) * &l[1];
        }
        for k in 0..sizes[2] {
            r2[off[2] + k] += basis(2, k) * &l[0];
        }
        rows.push(r1);
        rows.push(r2);
    }
    (rows, sizes)
}

/// Echelonized basis of the space of compatible Higgs fields.
pub fn higgs_space(base: &ParabolicBundle) -> Result<Vec<HiggsField>> {
    let (rows, sizes) = nilpotency_system(base);
    let n: usize = sizes.iter().sum();
    kernel(&rows, n)
        .into_iter()
        .rev()
        .map(|v| {
            let a = Poly::new(v[..sizes[0]].to_vec());
            let b = Poly::new(v[sizes[0]..sizes[0] + sizes[1]].to_vec());
            let c = Poly::new(v[sizes[0] + sizes[1]..].to_vec());
            make_higgs(base, a, b, c)
        })
        .collect()
}

/// Linear combination `sum c_i theta_i` over a common base.
pub fn combine(base: &ParabolicBundle, fields: &[HiggsField], coeffs: &[Rational]) -> HiggsField {
    fields
        .iter()
        .zip(coeffs)
        .fold(HiggsField::zero(base), |acc, (f, c)| acc.add(&f.scale(c)))
}

/// Polynomial vector `w` with `det[w | v] = 1` on the affine chart, for
/// `v = (a, b)` a saturated subbundle. Its class generates `E / L` there.
pub fn complement_vector(l: &Subbundle) -> Result<[Poly; 2]> {
    let (g, s, t) = l.b.xgcd(&l.a);
    if g != Poly::one() {
        return Err(Error::Internal("subbundle is not saturated".into()));
    }
    // s b + t a = 1, so w = (s, -t).
    Ok([s, -&t])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, q};
    use crate::bundles::{Direction, MarkedSphere, PointSet};

    fn sphere() -> MarkedSphere {
        MarkedSphere::new(int(4), int(5)).unwrap()
    }

    /// `[[0,0],[1,0]] dx/(x - t)` on the bundle with l0 = l1 = l_lambda = e1
    /// and l_t = l_inf = e2.
    fn theta_one() -> HiggsField {
        let sph = sphere();
        let e1 = Direction::e1();
        let e2 = Direction::e2();
        let b = ParabolicBundle::new(sph.clone(), 0, [e1.clone(), e1.clone(), e1, e2.clone(), e2]).unwrap();
        let gamma = Poly::from_roots(&[int(0), int(1), sph.lambda.clone()]);
        make_higgs(&b, Poly::zero(), Poly::zero(), gamma).unwrap()
    }

    #[test]
    fn theta_one_residues() {
        let th = theta_one();
        assert_eq!(th.residue_matrix(Marked::T), RMat2::new(int(0), int(0), int(1), int(0)));
        assert!(th.residue_matrix(Marked::Zero).is_zero());
        for m in Marked::ALL {
            assert!(th.residue_matrix(m).trace().is_zero());
        }
        assert!(higgs_det(&th).unwrap().is_zero());
        match invariant_lines(&th).unwrap() {
            InvariantLines::One(l) => {
                assert_eq!(l.degree, 0);
                assert_eq!((l.a, l.b), (Poly::zero(), Poly::one()));
            }
            other => panic!("{other:?}"),
        }
        let mu = WeightVector::central();
        assert_eq!(higgs_stability(&th, &mu).unwrap(), Stability::Stable);
    }

    #[test]
    fn degree_and_nilpotency_checks() {
        let th = theta_one();
        let big = Poly::monomial(int(1), 4);
        assert!(matches!(
            make_higgs(&th.base, big, Poly::zero(), Poly::zero()),
            Err(Error::DegreeOverflow(_))
        ));
        assert!(matches!(
            make_higgs(&th.base, Poly::zero(), Poly::one(), Poly::zero()),
            Err(Error::NotNilpotent(_))
        ));
        assert!(make_higgs(&th.base, Poly::zero(), Poly::zero(), Poly::zero()).is_ok());
    }

    #[test]
    fn row1_space_is_three_dimensional() {
        let th = theta_one();
        let sp = higgs_space(&th.base).unwrap();
        assert_eq!(sp.len(), 3);
        for f in &sp {
            assert!(f.alpha.is_zero());
        }
        // gamma = 0, beta != 0 is unstable.
        let mu = WeightVector::central();
        let b_only = sp.iter().find(|f| f.gamma.is_zero()).unwrap();
        assert_eq!(higgs_stability(b_only, &mu).unwrap(), Stability::Unstable);
    }

    #[test]
    fn stable_bundle_space_is_two_dimensional() {
        let b = ParabolicBundle::normalized(sphere(), q(2, 3), q(-5, 2));
        let sp = higgs_space(&b).unwrap();
        assert_eq!(sp.len(), 2);
        let th = combine(&b, &sp, &[int(3), q(1, 7)]);
        let s = higgs_det(&th).unwrap();
        let s2 = higgs_det(&th.scale(&int(5))).unwrap();
        assert_eq!(s2, HitchinPoint::new(s.h1 * int(25), s.h2 * int(25)));
        assert_eq!(invariant_lines(&th).unwrap(), InvariantLines::None);
    }

    #[test]
    fn complement_vector_is_unimodular() {
        let b = ParabolicBundle::normalized(sphere(), q(2, 3), q(-5, 2));
        let l = crate::bundles::subline_max(&b, PointSet::of(&[Marked::Zero, Marked::One, Marked::Lambda]))
            .unwrap();
        let w = complement_vector(&l).unwrap();
        assert_eq!(&(&w[0] * &l.b) - &(&w[1] * &l.a), Poly::one());
    }
}
