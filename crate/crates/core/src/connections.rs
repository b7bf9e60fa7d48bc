//! Logarithmic `sl_2` connections `d + A(x) dx` with prescribed residue
//! eigenvalues, the two explicit flat families over unstable bundles, and
//! the `c -> 0` limit of `c * nabla` under diagonal gauge families.

use num_traits::{One, Zero};

use crate::arith::linalg::{solve_affine, wedge};
use crate::arith::logform::form_pole_order_at_infinity;
use crate::arith::{residue, FMat2, Poly, ProjPoint, RMat2, RatFunc, Rational};
use crate::bundles::{
    classify_stability, Direction, Marked, MarkedSphere, ParabolicBundle, Stability, WeightVector,
};
use crate::elem::{elem_bundle, elem_higgs, weight_transform, ElemMask};
use crate::error::{Error, Result};
use crate::higgs::{degree_bounds, higgs_space, higgs_stability, HiggsField};
use crate::normal_form::normalize_higgs;

/// Residue eigenvalues, one per marked point; `l_i` is the `nu_i`-eigenspace.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EigenvalueVector(pub [Rational; 5]);

impl EigenvalueVector {
    pub fn get(&self, m: Marked) -> &Rational {
        &self.0[m.index()]
    }
}

/// All `nu_i` nonzero and no signed sum `sum eps_i nu_i` is an integer.
pub fn is_generic(nu: &EigenvalueVector) -> bool {
    if nu.0.iter().any(|v| v.is_zero()) {
        return false;
    }
    (0u8..32).all(|signs| {
        let s: Rational = (0..5)
            .map(|i| if signs >> i & 1 == 1 { -nu.0[i].clone() } else { nu.0[i].clone() })
            .sum();
        !s.is_integer()
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Connection {
    pub base: ParabolicBundle,
    pub matrix: FMat2,
    pub nu: EigenvalueVector,
}

/// `A` in the frame at infinity, as a coefficient of `dx`:
/// `S A S^-1 - S' S^-1` with `S = diag(x^d, x^-d)`.
fn matrix_at_infinity(d: i64, a: &FMat2) -> FMat2 {
    let shift = RatFunc::simple_pole(Rational::from_integer(d.into()), &Rational::zero());
    FMat2::new(
        a.get(0, 0) - &shift,
        a.get(0, 1).mul_x_pow(2 * d),
        a.get(1, 0).mul_x_pow(-2 * d),
        a.get(1, 1) + &shift,
    )
}

fn residue_of(base: &ParabolicBundle, a: &FMat2, m: Marked) -> Result<RMat2> {
    match base.sphere.coord(m) {
        Some(p) => a.try_map(|f| residue(f, &ProjPoint::Finite(p.clone()))),
        None => matrix_at_infinity(base.d, a).try_map(|f| residue(f, &ProjPoint::Infinity)),
    }
}

/// Finite poles of `f` are simple and lie at marked points.
fn finite_poles_ok(f: &RatFunc, den: &Poly) -> Result<()> {
    let g = f.den().gcd(den);
    if &g == f.den() {
        return Ok(());
    }
    let rest = f.den().exact_div(&g)?;
    if rest.gcd(den).deg() > 0 {
        Err(Error::NonSimplePole(format!("{f}")))
    } else {
        Err(Error::PoleOutsideDivisor(format!("{f}")))
    }
}

/// Eigenvalue of `r` on `l`, if `l` is an eigenvector.
fn eigenvalue_on(r: &RMat2, l: &[Rational; 2]) -> Option<Rational> {
    let v = r.apply(l);
    if !wedge(&v, l).is_zero() {
        return None;
    }
    let i = if l[0].is_zero() { 1 } else { 0 };
    Some(&v[i] / &l[i])
}

pub fn make_connection(base: &ParabolicBundle, a: FMat2, nu: EigenvalueVector) -> Result<Connection> {
    if !a.trace().is_zero() {
        return Err(Error::NonzeroTrace);
    }
    let den = base.sphere.denominator();
    for f in a.m.iter().flatten() {
        finite_poles_ok(f, &den)?;
    }
    for f in matrix_at_infinity(base.d, &a).m.iter().flatten() {
        if !f.is_zero() && form_pole_order_at_infinity(f) > 1 {
            return Err(Error::NonSimplePole("inf".into()));
        }
    }
    for m in Marked::ALL {
        let r = residue_of(base, &a, m)?;
        match eigenvalue_on(&r, base.dir(m).coords()) {
            None => return Err(Error::WrongEigenspace(m.to_string())),
            Some(e) if &e != nu.get(m) => return Err(Error::WrongEigenvalues(m.to_string())),
            Some(_) => {}
        }
    }
    Ok(Connection { base: base.clone(), matrix: a, nu })
}

impl Connection {
    /// Residue in the chart frame at `m`.
    pub fn residue_matrix(&self, m: Marked) -> RMat2 {
        residue_of(&self.base, &self.matrix, m).expect("validated connection")
    }

    /// `nabla + theta`.
    pub fn add_higgs(&self, th: &HiggsField) -> Result<Connection> {
        make_connection(&self.base, self.matrix.add(&th.matrix()), self.nu.clone())
    }
}

/// Sum of the residues of `A dx` over all five points with the residue at
/// infinity taken in the x-chart frame; zero for every connection.
pub fn residue_sum(c: &Connection) -> Result<RMat2> {
    let mut total = RMat2::zero();
    for m in Marked::ALL {
        let p = c.base.sphere.point(m);
        total = total.add(&c.matrix.try_map(|f| residue(f, &p))?);
    }
    Ok(total)
}

/// All connections on `base` with eigenvalues `nu`: one particular solution
/// plus the space of nilpotent Higgs fields.
pub fn connection_space(base: &ParabolicBundle, nu: &EigenvalueVector) -> Result<(Connection, Vec<HiggsField>)> {
    let sph = &base.sphere;
    let d = base.d;
    let (da, db, dc) = degree_bounds(d);
    let sizes = [(da + 1) as usize, (db + 1) as usize, (dc + 1) as usize];
    let n: usize = sizes.iter().sum();
    let dp = sph.denominator().derivative();
    // Residue entries as linear forms in the coefficients of (alpha, beta, gamma).
    let entry = |block: usize, m: Marked| -> (Vec<Rational>, Rational) {
        let mut row = vec![Rational::zero(); n];
        let offset: usize = sizes[..block].iter().sum();
        let mut constant = Rational::zero();
        match sph.coord(m) {
            Some(p) => {
                let scale = Rational::one() / dp.eval(&p);
                let mut pow = Rational::one();
                for k in 0..sizes[block] {
                    row[offset + k] = &pow * &scale;
                    pow *= &p;
                }
            }
            None => {
                row[offset + sizes[block] - 1] = -Rational::one();
                if block == 0 {
                    constant = Rational::from_integer(d.into());
                }
            }
        }
        (row, constant)
    };
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for m in Marked::ALL {
        let (ra, ca) = entry(0, m);
        let (rb, _) = entry(1, m);
        let (rc, _) = entry(2, m);
        let l = base.dir(m).coords();
        let nv = nu.get(m);
        // (R - nu) l = 0 with R = [[a + ca, b], [c, -a - ca]].
        let lin = |x: &[Rational], y: &[Rational], cx: &Rational, cy: &Rational| -> Vec<Rational> {
            x.iter().zip(y).map(|(p, q)| cx * p + cy * q).collect()
        };
        rows.push(lin(&ra, &rb, &l[0], &l[1]));
        rhs.push(nv * &l[0] - &ca * &l[0]);
        let neg: Vec<Rational> = ra.iter().map(|v| -v).collect();
        rows.push(lin(&rc, &neg, &l[0], &l[1]));
        rhs.push(nv * &l[1] + &ca * &l[1]);
    }
    let (sol, _) = solve_affine(&rows, &rhs, n)
        .ok_or_else(|| Error::Invalid("no connection with these eigenvalues on this bundle".into()))?;
    let poly = |block: usize| {
        let offset: usize = sizes[..block].iter().sum();
        Poly::new(sol[offset..offset + sizes[block]].to_vec())
    };
    let den = sph.denominator();
    let f = |p: Poly| RatFunc::new(p, den.clone()).expect("nonzero denominator");
    let (a, b, c) = (poly(0), poly(1), poly(2));
    let matrix = FMat2::new(f(a.clone()), f(b), f(c), f(-&a));
    Ok((make_connection(base, matrix, nu.clone())?, higgs_space(base)?))
}

/// `g^-1 A g + g^-1 g'` for the gauge of an elementary transformation,
/// twisted back to trace zero.
pub fn elem_connection(c: &Connection, mask: ElemMask) -> Result<Connection> {
    let r = elem_bundle(&c.base, mask)?;
    let g = &r.gauge.matrix;
    let gi = g.inverse().ok_or_else(|| Error::Internal("singular gauge".into()))?;
    let dg = g.map(|f| f.derivative());
    let twist: RatFunc = r
        .gauge
        .det_divisor
        .iter()
        .map(|p| RatFunc::simple_pole(Rational::new(1.into(), 2.into()), p))
        .fold(RatFunc::zero(), |acc, f| &acc + &f);
    let a = gi.mul(&c.matrix).mul(g).add(&gi.mul(&dg)).sub(&FMat2::diag(twist.clone(), twist));
    let mut nu = c.nu.clone();
    for m in Marked::ALL {
        let res = residue_of(&r.bundle, &a, m)?;
        nu.0[m.index()] = eigenvalue_on(&res, r.bundle.dir(m).coords())
            .ok_or_else(|| Error::Internal(format!("new direction at {m} is not an eigenline")))?;
    }
    make_connection(&r.bundle, a, nu)
}

/// Constant change of frame: old coordinates are `p` times new ones.
pub fn constant_gauge(c: &Connection, p: &RMat2) -> Result<Connection> {
    if c.base.d != 0 {
        return Err(Error::Invalid("constant frame changes need the trivial bundle".into()));
    }
    let pi = p.inverse().ok_or(Error::DivisionByZero)?;
    let mut dirs = c.base.dirs.clone();
    for m in Marked::ALL {
        dirs[m.index()] = Direction::from_vec(&pi.apply(c.base.dir(m).coords()))?;
    }
    let base = ParabolicBundle::new(c.base.sphere.clone(), 0, dirs)?;
    let lift = |m: &RMat2| m.try_map(|v| Ok::<_, Error>(RatFunc::constant(v.clone())));
    make_connection(&base, lift(&pi)?.mul(&c.matrix).mul(&lift(p)?), c.nu.clone())
}

fn pole_term(m: RMat2, p: &Rational) -> FMat2 {
    m.try_map(|v| Ok::<_, ()>(RatFunc::simple_pole(v.clone(), p))).expect("infallible")
}

fn lower(c: Rational) -> RMat2 {
    RMat2::new(Rational::zero(), Rational::zero(), c, Rational::zero())
}

/// `rho = nu_inf - nu_0 - nu_1 - nu_lambda - nu_t`.
pub fn family_rho(nu: &EigenvalueVector) -> Rational {
    nu.get(Marked::Inf) - nu.get(Marked::Zero) - nu.get(Marked::One) - nu.get(Marked::Lambda) - nu.get(Marked::T)
}

/// Shared part of both families: the terms at 0, 1 and t of `nabla_0`.
fn family_common(sph: &MarkedSphere, nu: &EigenvalueVector) -> FMat2 {
    let rho = family_rho(nu);
    let n0 = nu.get(Marked::Zero).clone();
    let n1 = nu.get(Marked::One).clone();
    let nt = nu.get(Marked::T).clone();
    let two = Rational::from_integer(2.into());
    pole_term(RMat2::new(-n0.clone(), Rational::zero(), rho.clone(), n0), &Rational::zero())
        .add(&pole_term(
            RMat2::new(-&n1 - &rho, &two * &n1 + &rho, -rho.clone(), &n1 + &rho),
            &Rational::one(),
        ))
        .add(&pole_term(RMat2::diag(-nt.clone(), nt), &sph.t))
}

/// `nabla_0 + a1 theta_1 + a2 theta_2` on the bundle with
/// `l_0 = l_lambda = l_t = (0, 1)`, `l_1 = (1, 1)`, `l_inf = (1, 0)`.
pub fn triple_point_family(sph: &MarkedSphere, nu: &EigenvalueVector, a1: &Rational, a2: &Rational) -> Result<Connection> {
    if !is_generic(nu) {
        return Err(Error::NotGeneric);
    }
    let base = ParabolicBundle::new(
        sph.clone(),
        0,
        [Direction::e2(), Direction::slope(Rational::one()), Direction::e2(), Direction::e2(), Direction::e1()],
    )?;
    let nl = nu.get(Marked::Lambda).clone();
    let zero = Rational::zero();
    let a = family_common(sph, nu)
        .add(&pole_term(RMat2::diag(-nl.clone(), nl), &sph.lambda))
        .add(&pole_term(lower(a1 + a2), &zero))
        .add(&pole_term(lower(-a1.clone()), &sph.lambda))
        .add(&pole_term(lower(-a2.clone()), &sph.t));
    make_connection(&base, a, nu.clone())
}

/// The five-point family with `l_lambda = (u, 1)`, `l_0 = l_t = (0, 1)`,
/// `l_1 = (1, 1)`, `l_inf = (1, 0)`.
pub fn double_point_family(
    sph: &MarkedSphere,
    nu: &EigenvalueVector,
    u: &Rational,
    a1: &Rational,
    a2: &Rational,
) -> Result<Connection> {
    if !is_generic(nu) {
        return Err(Error::NotGeneric);
    }
    let lu = if u.is_zero() { Direction::e2() } else { Direction::new(u.clone(), Rational::one())? };
    let base = ParabolicBundle::new(
        sph.clone(),
        0,
        [Direction::e2(), Direction::slope(Rational::one()), lu, Direction::e2(), Direction::e1()],
    )?;
    let nl = nu.get(Marked::Lambda).clone();
    let zero = Rational::zero();
    let one = Rational::one();
    let u2 = u * u;
    let two = Rational::from_integer(2.into());
    let a = family_common(sph, nu)
        .add(&pole_term(RMat2::new(-nl.clone(), &two * &nl * u, zero.clone(), nl), &sph.lambda))
        // a1 * Theta_1
        .add(&pole_term(lower(a1 * (&one - u)), &zero))
        .add(&pole_term(RMat2::new(a1 * u, -(a1 * u), a1 * u, -(a1 * u)), &one))
        .add(&pole_term(RMat2::new(-(a1 * u), a1 * &u2, -a1.clone(), a1 * u), &sph.lambda))
        // a2 * Theta_2
        .add(&pole_term(lower(a2.clone()), &zero))
        .add(&pole_term(lower(-a2.clone()), &sph.t));
    make_connection(&base, a, nu.clone())
}

/// `lim_{c -> 0} g_c (c nabla) g_c^-1` with `g_c = diag(c^e1, c^e2)`,
/// together with the limiting directions. Entry `(i, j)` scales by
/// `c^(1 + e_i - e_j)`.
pub fn scaled_gauge_limit(c: &Connection, exponents: [i64; 2]) -> Result<HiggsField> {
    if exponents[0] == exponents[1] {
        return Err(Error::DivergentFamily("scalar gauge leaves only the d-part, which has no limit".into()));
    }
    let mut m = c.matrix.clone();
    for i in 0..2 {
        for j in 0..2 {
            let k = 1 + exponents[i] - exponents[j];
            let f = &c.matrix.m[i][j];
            if k < 0 && !f.is_zero() {
                return Err(Error::DivergentFamily(format!("entry ({i}, {j}) scales by c^{k}")));
            }
            if k > 0 {
                m.m[i][j] = RatFunc::zero();
            }
        }
    }
    let mut dirs = c.base.dirs.clone();
    for mk in Marked::ALL {
        let l = c.base.dir(mk).coords();
        let lead = (0..2).filter(|i| !l[*i].is_zero()).map(|i| exponents[i]).min().expect("nonzero direction");
        let v: [Rational; 2] =
            std::array::from_fn(|i| if exponents[i] == lead { l[i].clone() } else { Rational::zero() });
        dirs[mk.index()] = Direction::from_vec(&v)?;
    }
    let base = ParabolicBundle::new(c.base.sphere.clone(), c.base.d, dirs)?;
    HiggsField::from_matrix(&base, &m)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PiMuLimit {
    /// The underlying bundle is semistable: the limit is `(E, 0, l)`.
    ZeroField(HiggsField),
    /// Limit computed by a diagonal gauge family after the elementary
    /// transformation `mask`, then transported back and normalized.
    Family { field: HiggsField, mask: ElemMask },
    Uncovered,
}

/// `lim_{c -> 0} c (E, nabla, l)` in the moduli of `mu`-semistable Higgs
/// bundles, on the cases where a closed form is known.
pub fn pi_mu_limit(c: &Connection, mu: &WeightVector) -> Result<PiMuLimit> {
    if classify_stability(&c.base, mu).class != Stability::Unstable {
        return Ok(PiMuLimit::ZeroField(HiggsField::zero(&c.base)));
    }
    for mask in ElemMask::all() {
        let Ok(moved) = elem_connection(c, mask) else { continue };
        let mu2 = weight_transform(mu, mask);
        if moved.base.d != 0 {
            continue;
        }
        let report = classify_stability(&moved.base, &mu2);
        let w = &report.witness;
        if w.degree != 0 {
            continue;
        }
        // Frame with the destabilizing line as the second basis vector.
        let line = [w.a.coeff(0), w.b.coeff(0)];
        let other = if line[0].is_zero() { [Rational::one(), Rational::zero()] } else { [Rational::zero(), Rational::one()] };
        let p = RMat2::from_cols(other, line);
        let framed = constant_gauge(&moved, &p)?;
        let Ok(lim) = scaled_gauge_limit(&framed, [0, 1]) else { continue };
        if higgs_stability(&lim, &mu2)? == Stability::Unstable {
            continue;
        }
        let back = elem_higgs(&lim, mask)?;
        return Ok(PiMuLimit::Family { field: normalize_higgs(&back)?, mask });
    }
    Ok(PiMuLimit::Uncovered)
}

/// `(beta residue at 1, beta residue at lambda)` of a limit field whose
/// only nonzero entry is `beta`.
pub fn beta_residues(th: &HiggsField) -> [Rational; 2] {
    let r1 = th.residue_matrix(Marked::One).get(0, 1).clone();
    let rl = th.residue_matrix(Marked::Lambda).get(0, 1).clone();
    [r1, rl]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, q};
    use crate::bundles::classify_table1;
    use crate::hitchin::{classify_nilpotent, NilpotentStratum};

    fn sphere() -> MarkedSphere {
        MarkedSphere::new(int(2), int(3)).unwrap()
    }

    fn nu() -> EigenvalueVector {
        EigenvalueVector([q(1, 3), q(1, 5), q(1, 7), q(1, 11), q(1, 13)])
    }

    #[test]
    fn genericity_examples() {
        assert!(is_generic(&EigenvalueVector(std::array::from_fn(|_| q(1, 2)))));
        assert!(!is_generic(&EigenvalueVector(std::array::from_fn(|_| q(1, 3)))));
        let mut v = nu();
        v.0[2] = int(0);
        assert!(!is_generic(&v));
        assert!(is_generic(&nu()));
    }

    #[test]
    fn triple_point_family_residues() {
        let sph = sphere();
        let a1 = q(2, 3);
        let c = triple_point_family(&sph, &nu(), &a1, &q(-1, 4)).unwrap();
        let nl = nu().0[2].clone();
        assert_eq!(c.residue_matrix(Marked::Lambda), RMat2::new(-nl.clone(), int(0), -a1, nl));
        assert_eq!(residue_sum(&c).unwrap(), RMat2::zero());
        assert_eq!(classify_table1(&c.base), None);
        assert_eq!(classify_stability(&c.base, &WeightVector::central()).class, Stability::Unstable);
        let lim = scaled_gauge_limit(&c, [0, 1]).unwrap();
        assert!(classify_table1(&lim.base).is_some());
    }

    #[test]
    fn zero_matrix_is_rejected() {
        let b = ParabolicBundle::normalized(sphere(), q(1, 2), q(5, 3));
        let err = make_connection(&b, FMat2::zero(), nu()).unwrap_err();
        assert_eq!(err, Error::WrongEigenvalues("0".into()));
    }

    #[test]
    fn wrong_eigenspace_is_rejected() {
        let c = triple_point_family(&sphere(), &nu(), &int(0), &int(0)).unwrap();
        let moved = c.base.with_dir(Marked::Zero, Direction::slope(int(1)));
        assert!(matches!(make_connection(&moved, c.matrix.clone(), nu()), Err(Error::WrongEigenspace(_))));
    }

    #[test]
    fn triple_point_limit_is_a_hodge_bundle() {
        let sph = sphere();
        let nu = nu();
        let rho = family_rho(&nu);
        let c = triple_point_family(&sph, &nu, &q(3, 2), &int(7)).unwrap();
        let lim = scaled_gauge_limit(&c, [0, 1]).unwrap();
        let kappa = int(2) * &nu.0[1] + rho;
        assert_eq!(lim.residue_matrix(Marked::One), RMat2::new(int(0), kappa, int(0), int(0)));
        assert!(lim.alpha.is_zero() && lim.gamma.is_zero());
        let q_axis = [Marked::One, Marked::Inf];
        for m in Marked::ALL {
            let want = if q_axis.contains(&m) { Direction::e1() } else { Direction::e2() };
            assert_eq!(lim.base.dir(m), &want);
        }
        assert!(matches!(classify_nilpotent(&lim).unwrap(), NilpotentStratum::Hodge(_)));
        assert!(scaled_gauge_limit(&c, [0, 0]).is_err());
    }

    #[test]
    fn double_point_limit_depends_on_a1() {
        let sph = sphere();
        let nu = nu();
        let rho = family_rho(&nu);
        let u = q(2, 5);
        let mu = WeightVector::new([q(3, 4), q(1, 4), q(1, 4), q(1, 4), q(1, 4)]).unwrap();
        let mut seen = Vec::new();
        for a1 in [int(0), q(1, 2), int(3)] {
            let c = double_point_family(&sph, &nu, &u, &a1, &q(5, 9)).unwrap();
            let lim = scaled_gauge_limit(&c, [0, 1]).unwrap();
            let want = [
                int(2) * &nu.0[1] + &rho - &a1 * &u,
                int(2) * &nu.0[2] * &u + &a1 * &u * &u,
            ];
            assert_eq!(beta_residues(&lim), want);
            let PiMuLimit::Family { field, .. } = pi_mu_limit(&c, &mu).unwrap() else { panic!("uncovered") };
            assert!(!seen.contains(&field));
            seen.push(field);
        }
    }

    #[test]
    fn stable_bundles_limit_to_zero_field() {
        let b = ParabolicBundle::normalized(sphere(), q(1, 2), q(5, 3));
        let (c, space) = connection_space(&b, &nu()).unwrap();
        assert_eq!(space.len(), 2);
        assert_eq!(residue_sum(&c).unwrap(), RMat2::zero());
        let lim = pi_mu_limit(&c, &WeightVector::central()).unwrap();
        assert_eq!(lim, PiMuLimit::ZeroField(HiggsField::zero(&b)));
    }

    #[test]
    fn elem_connection_round_trip() {
        let b = ParabolicBundle::normalized(sphere(), q(1, 2), q(5, 3));
        let (c, _) = connection_space(&b, &nu()).unwrap();
        for mask in ElemMask::all() {
            let moved = elem_connection(&c, mask).unwrap();
            assert_eq!(residue_sum(&moved).unwrap(), RMat2::zero());
            let back = elem_connection(&moved, mask).unwrap();
            assert_eq!(back.base.d, 0);
        }
    }

    #[test]
    fn triple_point_limits_agree_across_parameters() {
        let sph = sphere();
        let mu = WeightVector::central();
        let mut first = None;
        for (a1, a2) in [(int(0), int(0)), (q(3, 2), int(7)), (int(-4), q(1, 9))] {
            let c = triple_point_family(&sph, &nu(), &a1, &a2).unwrap();
            let PiMuLimit::Family { field, .. } = pi_mu_limit(&c, &mu).unwrap() else { panic!("uncovered") };
            assert_eq!(higgs_stability(&field, &mu).unwrap(), Stability::Stable);
            match &first {
                None => first = Some(field),
                Some(f) => assert_eq!(f, &field),
            }
        }
    }
}
