//! Spectral data of the Hitchin map: the sixth branch point, nodal fibers
//! and their two components, the strata of the nilpotent cone and the
//! limit of `c * theta` as `c -> infinity`.

use num_traits::{One, Zero};

use crate::arith::linalg::{kernel, wedge};
use crate::arith::{residue, Poly, ProjPoint, RMat2, RatFunc, Rational};
use crate::bundles::{
    classify_stability, classify_table1, line_subbundle, lines_through, normalize_pair, Direction,
    Line16, Marked, MarkedSphere, ParabolicBundle, Stability, Subbundle, Table1Label, WeightVector,
};
use crate::elem::{elem_bundle, elem_higgs, table1_representative, ElemMask};
use crate::error::{Error, Result};
use crate::higgs::{
    complement_vector, degree_bounds, higgs_det, higgs_space, higgs_stability, invariant_lines,
    make_higgs, HiggsField, HitchinPoint, InvariantLines,
};
use crate::normal_form::{isomorphic, normalize_higgs};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CurveStatus {
    Smooth,
    Nodal(Marked),
    Cone,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectralCurve {
    pub sphere: MarkedSphere,
    pub s: HitchinPoint,
    pub rho: ProjPoint,
    pub branch_points: Vec<ProjPoint>,
    pub status: CurveStatus,
}

impl SpectralCurve {
    /// Branch points of the normalization: the marked points other than
    /// the node (all six points when smooth).
    pub fn normalization_branch(&self) -> Vec<ProjPoint> {
        match &self.status {
            CurveStatus::Nodal(m) => {
                let p = self.sphere.point(*m);
                Marked::ALL.iter().map(|q| self.sphere.point(*q)).filter(|q| *q != p).collect()
            }
            _ => self.branch_points.clone(),
        }
    }

    pub fn genus(&self) -> Option<u32> {
        match self.status {
            CurveStatus::Smooth => Some(2),
            CurveStatus::Nodal(_) => Some(1),
            CurveStatus::Cone => None,
        }
    }
}

/// `rho = -h1 / h2`, or infinity when `h2 = 0`.
pub fn sixth_point(s: &HitchinPoint) -> ProjPoint {
    if s.h2.is_zero() {
        ProjPoint::Infinity
    } else {
        ProjPoint::Finite(-(&s.h1 / &s.h2))
    }
}

pub fn spectral_curve(sph: &MarkedSphere, s: &HitchinPoint) -> SpectralCurve {
    let rho = sixth_point(s);
    let mut branch_points: Vec<ProjPoint> = Marked::ALL.iter().map(|m| sph.point(*m)).collect();
    branch_points.push(rho.clone());
    let status = if s.is_zero() {
        CurveStatus::Cone
    } else {
        match sph.marked_at(&rho) {
            Some(m) => CurveStatus::Nodal(m),
            None => CurveStatus::Smooth,
        }
    };
    SpectralCurve { sphere: sph.clone(), s: s.clone(), rho, branch_points, status }
}

/// The five discriminant lines, indexed by the point where the node sits:
/// `h1 = 0`, `h1 + h2 = 0`, `h1 + lambda h2 = 0`, `h1 + t h2 = 0`, `h2 = 0`.
pub fn discriminant_value(sph: &MarkedSphere, s: &HitchinPoint, m: Marked) -> Rational {
    match sph.coord(m) {
        Some(p) => &s.h1 + &p * &s.h2,
        None => s.h2.clone(),
    }
}

/// `det` of the constant part of a field holomorphic at the node: the
/// value of `(h1 + h2 x) / D` with the vanishing factor cancelled.
pub fn expected_constant_det(sph: &MarkedSphere, s: &HitchinPoint, node: Marked) -> Rational {
    match sph.coord(node) {
        Some(rho) => {
            let others = sph.finite_points();
            let prod: Rational = others.iter().filter(|q| **q != rho).map(|q| &rho - q).product();
            &s.h2 / prod
        }
        None => s.h1.clone(),
    }
}

/// Residue at `p` if nonzero, else the value of the holomorphic field
/// there, in the chart frame at `p`.
pub fn constant_part(th: &HiggsField, m: Marked) -> RMat2 {
    let r = th.residue_matrix(m);
    if !r.is_zero() {
        return r;
    }
    match th.base.sphere.coord(m) {
        Some(p) => th
            .matrix()
            .try_map(|f| f.eval(&p).ok_or(()))
            .expect("holomorphic where the residue vanishes"),
        None => {
            // theta = -x^2 M(x) dw in the frame at infinity.
            let (_, db, dc) = degree_bounds(th.base.d);
            let a2 = th.alpha.coeff(2);
            RMat2::new(-a2.clone(), -th.beta.coeff(db - 1), -th.gamma.coeff(dc - 1), a2)
        }
    }
}

/// `l_p` is an eigendirection of the constant part at `p`.
pub fn is_apparent(th: &HiggsField, m: Marked) -> bool {
    let c = constant_part(th, m);
    let l = th.base.dir(m).coords();
    wedge(&c.apply(l), l).is_zero()
}

/// Constant term of the Laurent expansion of `theta / dx` at a finite
/// marked point (or of the frame-corrected field at infinity).
pub fn laurent_constant(th: &HiggsField, m: Marked) -> RMat2 {
    let sph = &th.base.sphere;
    match sph.coord(m) {
        Some(p) => {
            let r = th.residue_matrix(m);
            let polar = r.try_map(|c| Ok::<_, ()>(RatFunc::simple_pole(c.clone(), &p))).expect("infallible");
            th.matrix()
                .sub(&polar)
                .try_map(|f| f.eval(&p).ok_or(()))
                .expect("regular after removing the polar part")
        }
        None => constant_part(th, m),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NilpotentStratum {
    ZeroSection,
    Ni { line: Line16, c: Rational },
    Hodge(Table1Label),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FiberClass {
    Smooth,
    NodalHol(Marked),
    NodalApp(Marked),
    NodalBoth(Marked),
    Nilpotent(NilpotentStratum),
}

pub fn classify_fiber_point(th: &HiggsField, mu: &WeightVector) -> Result<FiberClass> {
    if higgs_stability(th, mu)? == Stability::Unstable {
        return Err(Error::Unstable);
    }
    let s = higgs_det(th)?;
    let curve = spectral_curve(&th.base.sphere, &s);
    Ok(match curve.status {
        CurveStatus::Cone => FiberClass::Nilpotent(classify_nilpotent(th)?),
        CurveStatus::Smooth => FiberClass::Smooth,
        CurveStatus::Nodal(m) => {
            let hol = th.residue_matrix(m).is_zero();
            let app = is_apparent(th, m);
            match (hol, app) {
                (true, true) => FiberClass::NodalBoth(m),
                (true, false) => FiberClass::NodalHol(m),
                (false, true) => FiberClass::NodalApp(m),
                (false, false) => {
                    return Err(Error::Internal(format!("node at {m} neither holomorphic nor apparent")))
                }
            }
        }
    })
}

/// The Higgs field on the row-1 bundle `{t, inf}` given by
/// `[[0, 0], [1, 0]] dx / (x - t)`.
pub fn base_hodge(sph: &MarkedSphere) -> HiggsField {
    let label = Table1Label::all()[0];
    let b = table1_representative(sph, label, &Poly::zero());
    let gamma = Poly::from_roots(&[Rational::zero(), Rational::one(), sph.lambda.clone()]);
    make_higgs(&b, Poly::zero(), Poly::zero(), gamma).expect("base Hodge field is valid")
}

/// The mask carrying the base row-1 label to `label`.
pub fn mask_to_label(sph: &MarkedSphere, label: Table1Label) -> Result<ElemMask> {
    let base = base_hodge(sph).base;
    for mask in ElemMask::all() {
        if classify_table1(&elem_bundle(&base, mask)?.bundle) == Some(label) {
            return Ok(mask);
        }
    }
    Err(Error::Internal(format!("no mask reaches {label}")))
}

/// The Hodge bundle supported on the Table-1 bundle `label`.
pub fn canonical_hodge(sph: &MarkedSphere, label: Table1Label) -> Result<HiggsField> {
    elem_higgs(&base_hodge(sph), mask_to_label(sph, label)?)
}

/// `phi` with `theta w = phi v`, where `v` spans the kernel line and
/// `det[w | v] = 1`.
fn kernel_coefficient(th: &HiggsField, l: &Subbundle) -> Result<RatFunc> {
    let w = complement_vector(l)?;
    let m = th.matrix();
    let tw = m.apply(&[RatFunc::from_poly(w[0].clone()), RatFunc::from_poly(w[1].clone())]);
    let phi = if !l.a.is_zero() {
        tw[0].checked_div(&RatFunc::from_poly(l.a.clone()))?
    } else {
        tw[1].checked_div(&RatFunc::from_poly(l.b.clone()))?
    };
    // theta w must be a multiple of v.
    let check = [&phi * &RatFunc::from_poly(l.a.clone()), &phi * &RatFunc::from_poly(l.b.clone())];
    if check != tw {
        return Err(Error::Internal("field does not map into its kernel".into()));
    }
    Ok(phi)
}

/// Scale of `phi`: its residue at the first finite marked point where that
/// is nonzero, else the leading coefficient of its numerator.
fn phi_scale(sph: &MarkedSphere, phi: &RatFunc) -> Result<Rational> {
    for p in sph.finite_points() {
        let r = residue(phi, &ProjPoint::Finite(p))?;
        if !r.is_zero() {
            return Ok(r);
        }
    }
    Ok(phi.num().leading())
}

fn normalized_subbundle(l: Subbundle) -> Subbundle {
    let (a, b) = normalize_pair(l.a, l.b);
    Subbundle { a, b, ..l }
}

/// Scale of a nilpotent field with a kernel line, read off its normal form
/// so that it only depends on the isomorphism class.
fn ni_scale(th: &HiggsField) -> Result<Rational> {
    let n = normalize_higgs(th)?;
    let InvariantLines::One(kern) = invariant_lines(&n)? else {
        return Err(Error::Internal("no kernel line".into()));
    };
    phi_scale(&n.base.sphere, &kernel_coefficient(&n, &normalized_subbundle(kern))?)
}

/// The field on `bundle` with kernel the subbundle of `line` and scale 1.
pub fn line_generator(bundle: &ParabolicBundle, line: Line16) -> Result<HiggsField> {
    let k = normalized_subbundle(line_subbundle(bundle, line)?);
    let space = higgs_space(bundle)?;
    // Solve theta v = 0 within the space: a alpha + b beta = 0 and
    // a gamma - b alpha = 0, coefficientwise.
    let parts: Vec<[Poly; 2]> = space
        .iter()
        .map(|f| [&(&k.a * &f.alpha) + &(&k.b * &f.beta), &(&k.a * &f.gamma) - &(&k.b * &f.alpha)])
        .collect();
    let width = parts.iter().flat_map(|p| p.iter().map(|x| x.coeffs().len())).max().unwrap_or(0);
    let mut rows = Vec::new();
    for comp in 0..2 {
        for i in 0..width as i64 {
            rows.push(parts.iter().map(|p| p[comp].coeff(i)).collect::<Vec<_>>());
        }
    }
    let ker = kernel(&rows, space.len());
    if ker.len() != 1 {
        return Err(Error::Internal(format!("{} independent fields with kernel on {line}", ker.len())));
    }
    let th = crate::higgs::combine(bundle, &space, &ker[0]);
    Ok(th.scale(&(Rational::one() / ni_scale(&th)?)))
}

/// Rebuilds a nilpotent field from its stratum on the given bundle.
pub fn reconstruct(bundle: &ParabolicBundle, stratum: &NilpotentStratum) -> Result<HiggsField> {
    match stratum {
        NilpotentStratum::ZeroSection => Ok(HiggsField::zero(bundle)),
        NilpotentStratum::Ni { line, c } => Ok(line_generator(bundle, *line)?.scale(c)),
        NilpotentStratum::Hodge(label) => canonical_hodge(&bundle.sphere, *label),
    }
}

pub fn classify_nilpotent(th: &HiggsField) -> Result<NilpotentStratum> {
    if !higgs_det(th)?.is_zero() {
        return Err(Error::Invalid("determinant is not zero".into()));
    }
    let mu = WeightVector::central();
    if higgs_stability(th, &mu)? == Stability::Unstable {
        return Err(Error::Unstable);
    }
    if th.is_zero() {
        return match classify_stability(&th.base, &mu).class {
            Stability::Stable => Ok(NilpotentStratum::ZeroSection),
            _ => Err(Error::Unstable),
        };
    }
    if let Some(label) = classify_table1(&th.base) {
        let canon = canonical_hodge(&th.base.sphere, label)?;
        if !isomorphic(th, &canon)? {
            return Err(Error::Internal(format!("field on {label} is not the Hodge bundle")));
        }
        return Ok(NilpotentStratum::Hodge(label));
    }
    let InvariantLines::One(kern) = invariant_lines(th)? else {
        return Err(Error::Internal("nilpotent field without kernel line".into()));
    };
    let kern = normalized_subbundle(kern);
    for line in lines_through(&th.base)? {
        let k = normalized_subbundle(line_subbundle(&th.base, line)?);
        if k.degree == kern.degree && k.a == kern.a && k.b == kern.b {
            return Ok(NilpotentStratum::Ni { line, c: ni_scale(th)? });
        }
    }
    Err(Error::Internal("nilpotent field on no special line".into()))
}

/// The limit of `(E, l, c theta)` as `c -> infinity`: the associated graded
/// `K + E/K` of the kernel filtration with the induced nilpotent field.
pub fn cstar_limit_field(th: &HiggsField) -> Result<HiggsField> {
    match classify_nilpotent(th)? {
        NilpotentStratum::Ni { c, .. } if c.is_zero() => return Err(Error::Invalid("c = 0".into())),
        NilpotentStratum::Ni { .. } => {}
        _ => return Err(Error::Invalid("field is not on a special line".into())),
    }
    let InvariantLines::One(kern) = invariant_lines(th)? else {
        return Err(Error::Internal("no kernel line".into()));
    };
    let kern = normalized_subbundle(kern);
    let phi = kernel_coefficient(th, &kern)?;
    let sph = &th.base.sphere;
    let num = phi
        .mul_poly(&sph.denominator())
        .as_poly()
        .cloned()
        .ok_or_else(|| Error::Internal("limit field has poles off the divisor".into()))?;
    let k = kern.degree;
    let (d, on_k, off_k, field) = if k <= 0 {
        (-k, Direction::e1(), Direction::e2(), (Poly::zero(), num, Poly::zero()))
    } else {
        (k, Direction::e2(), Direction::e1(), (Poly::zero(), Poly::zero(), num))
    };
    let dirs = std::array::from_fn(|i| {
        if kern.incident.contains(Marked::from_index(i)) { on_k.clone() } else { off_k.clone() }
    });
    let base = ParabolicBundle::new(sph.clone(), d, dirs)?;
    make_higgs(&base, field.0, field.1, field.2)
}

/// Hodge label reached by the `c -> infinity` limit.
pub fn cstar_limit_infinity(th: &HiggsField) -> Result<Table1Label> {
    match classify_nilpotent(&cstar_limit_field(th)?)? {
        NilpotentStratum::Hodge(label) => Ok(label),
        other => Err(Error::Internal(format!("limit is not a Hodge bundle: {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, q};
    use crate::bundles::PointSet;
    use crate::higgs::combine;

    fn sphere() -> MarkedSphere {
        MarkedSphere::new(int(2), int(3)).unwrap()
    }

    #[test]
    fn spectral_curve_examples() {
        let sph = sphere();
        let c = spectral_curve(&sph, &HitchinPoint::new(int(1), int(0)));
        assert_eq!(c.status, CurveStatus::Nodal(Marked::Inf));
        assert_eq!(c.normalization_branch().len(), 4);
        let c = spectral_curve(&sph, &HitchinPoint::new(-sph.lambda.clone(), int(1)));
        assert_eq!(c.status, CurveStatus::Nodal(Marked::Lambda));
        let c = spectral_curve(&sph, &HitchinPoint::new(int(5), int(1)));
        assert_eq!(c.rho, ProjPoint::Finite(int(-5)));
        assert_eq!(c.genus(), Some(2));
        let c = spectral_curve(&sph, &HitchinPoint::new(int(0), int(0)));
        assert_eq!(c.status, CurveStatus::Cone);
    }

    #[test]
    fn apparent_local_form() {
        // [[a x, b], [c x, -a x]] dx / x near 0 with c(0) = 0 and l0 = (1, 0).
        let sph = sphere();
        let b = ParabolicBundle::normalized(sph.clone(), q(1, 5), q(7, 4));
        let th = combine(&b, &higgs_space(&b).unwrap(), &[int(1), int(2)]);
        let c = constant_part(&th, Marked::Zero);
        assert!(c.get(1, 0).is_zero());
        assert!(is_apparent(&th, Marked::Zero));
    }

    #[test]
    fn base_hodge_is_first_label() {
        let th = base_hodge(&sphere());
        assert_eq!(classify_nilpotent(&th).unwrap(), NilpotentStratum::Hodge(Table1Label::all()[0]));
        assert_eq!(constant_part(&th, Marked::T), RMat2::new(int(0), int(0), int(1), int(0)));
        assert!(is_apparent(&th, Marked::T));
    }

    #[test]
    fn pair_line_field_and_its_limit() {
        let sph = sphere();
        let b = ParabolicBundle::normalized(sph.clone(), q(3, 7), int(5)).with_dir(Marked::T, Direction::e2());
        let gamma = Poly::from_roots(&[int(0), int(1), sph.lambda.clone()]);
        let th = make_higgs(&b, Poly::zero(), Poly::zero(), gamma).unwrap().scale(&int(3));
        let pair = Line16::Pair(PointSet::of(&[Marked::T, Marked::Inf]));
        assert_eq!(classify_nilpotent(&th).unwrap(), NilpotentStratum::Ni { line: pair, c: int(3) });
        assert_eq!(cstar_limit_infinity(&th).unwrap(), Table1Label::all()[0]);
        let back = reconstruct(&b, &NilpotentStratum::Ni { line: pair, c: int(3) }).unwrap();
        assert_eq!(back, th);
    }

    #[test]
    fn every_hodge_bundle_is_classified() {
        let sph = sphere();
        for label in Table1Label::all() {
            let th = canonical_hodge(&sph, label).unwrap();
            assert_eq!(classify_table1(&th.base), Some(label));
            assert_eq!(classify_nilpotent(&th).unwrap(), NilpotentStratum::Hodge(label));
        }
    }
}
