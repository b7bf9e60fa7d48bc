//! Seeded generators of spheres, bundles, fields and connections used by
//! the verification suite and the tests.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::rational::sqrt_exact;
use crate::arith::{FMat2, Poly, RMat2, RatFunc, Rational};
use crate::bundles::{
    classify_stability, lines_through, Direction, Line16, Marked, MarkedSphere, ParabolicBundle, Stability,
    WeightVector,
};
use crate::connections::{is_generic, EigenvalueVector};
use crate::elem::line_representative;
use crate::error::Result;
use crate::hitchin::{discriminant_value, line_generator};
use crate::higgs::{combine, higgs_det, higgs_space, HiggsField, HitchinPoint};
use crate::normal_form::transform;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// `n / d` with `|n| <= 30`, `1 <= d <= 7`.
    pub fn rational(&mut self) -> Rational {
        let n: i64 = self.rng.gen_range(-30..=30);
        let d: i64 = self.rng.gen_range(1..=7);
        Rational::new(n.into(), d.into())
    }

    pub fn nonzero(&mut self) -> Rational {
        loop {
            let r = self.rational();
            if !r.is_zero() {
                return r;
            }
        }
    }

    /// A rational outside `avoid`.
    pub fn avoiding(&mut self, avoid: &[Rational]) -> Rational {
        loop {
            let r = self.rational();
            if !avoid.contains(&r) {
                return r;
            }
        }
    }

    /// Uniform index in `0..n`.
    pub fn rng_index(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    pub fn pick<T: Clone>(&mut self, items: &[T]) -> T {
        items[self.rng.gen_range(0..items.len())].clone()
    }

    pub fn sphere(&mut self) -> MarkedSphere {
        let lambda = self.avoiding(&[Rational::zero(), Rational::one()]);
        let t = self.avoiding(&[Rational::zero(), Rational::one(), lambda.clone()]);
        MarkedSphere::new(lambda, t).expect("distinct points")
    }

    /// A bundle in the normalized chart that is stable and on no special line.
    pub fn generic_bundle(&mut self, sph: &MarkedSphere) -> ParabolicBundle {
        loop {
            let b = ParabolicBundle::normalized(sph.clone(), self.rational(), self.rational());
            if lines_through(&b).is_ok_and(|l| l.is_empty()) {
                return b;
            }
        }
    }

    /// A stable bundle, possibly on special lines.
    pub fn stable_bundle(&mut self, sph: &MarkedSphere) -> ParabolicBundle {
        loop {
            let b = ParabolicBundle::normalized(sph.clone(), self.rational(), self.rational());
            if classify_stability(&b, &WeightVector::central()).class == Stability::Stable {
                return b;
            }
        }
    }

    /// A stable bundle on `line` and on no other special line.
    pub fn bundle_on_line(&mut self, sph: &MarkedSphere, line: Line16) -> ParabolicBundle {
        loop {
            let slopes = std::array::from_fn(|_| self.rational());
            let b = line_representative(sph, line, &slopes);
            if lines_through(&b).is_ok_and(|l| l == vec![line]) {
                return b;
            }
        }
    }

    pub fn invertible(&mut self) -> RMat2 {
        loop {
            let m = RMat2::new(self.rational(), self.rational(), self.rational(), self.rational());
            if !m.det().is_zero() {
                return m;
            }
        }
    }

    /// A random automorphism of the underlying bundle applied to `th`.
    pub fn disguise(&mut self, th: &HiggsField) -> Result<HiggsField> {
        let (h, h_inf) = match th.base.d {
            0 => {
                let m = self.invertible();
                (m.try_map(|v| Ok::<_, ()>(RatFunc::constant(v.clone()))).expect("infallible"), m)
            }
            _ => {
                let a = self.nonzero();
                let b = self.nonzero();
                let q = Poly::new(vec![self.rational(), self.rational(), self.rational()]);
                let h = FMat2::new(
                    RatFunc::constant(a.clone()),
                    RatFunc::zero(),
                    RatFunc::from_poly(q.clone()),
                    RatFunc::constant(b.clone()),
                );
                (h, RMat2::new(a, Rational::zero(), q.coeff(2), b))
            }
        };
        transform(th, &h, &h_inf)
    }

    pub fn generic_eigenvalues(&mut self) -> EigenvalueVector {
        loop {
            let nu = EigenvalueVector(std::array::from_fn(|_| {
                let n: i64 = self.rng.gen_range(-12..=12);
                let d: i64 = self.rng.gen_range(2..=13);
                Rational::new(n.into(), d.into())
            }));
            if is_generic(&nu) {
                return nu;
            }
        }
    }

    /// A field in the two-dimensional space with random coefficients.
    pub fn field_on(&mut self, b: &ParabolicBundle) -> Result<HiggsField> {
        let space = higgs_space(b)?;
        let coeffs: Vec<Rational> = space.iter().map(|_| self.rational()).collect();
        Ok(combine(b, &space, &coeffs))
    }

    /// A nilpotent field `c theta_line` on a random bundle of `line`.
    pub fn ni_field(&mut self, sph: &MarkedSphere, line: Line16) -> Result<(HiggsField, Rational)> {
        let b = self.bundle_on_line(sph, line);
        let c = self.nonzero();
        Ok((line_generator(&b, line)?.scale(&c), c))
    }
}

/// Sampled members of one nodal fiber, labelled by construction.
#[derive(Clone, Debug)]
pub struct NodalFiber {
    pub node: Marked,
    pub s: HitchinPoint,
    /// Fields holomorphic at the node with `l_node` off the eigenlines.
    pub hol: Vec<HiggsField>,
    /// Fields with nonzero residue at the node.
    pub app: Vec<HiggsField>,
    /// Holomorphic fields with `l_node` moved to an eigenline.
    pub both: Vec<HiggsField>,
}

/// Rational zeros `(c1, c2)` of a binary quadratic form.
fn form_zeros(a: &Rational, b: &Rational, c: &Rational) -> Option<Vec<[Rational; 2]>> {
    let one = Rational::one();
    let zero = Rational::zero();
    if a.is_zero() {
        return Some(vec![[one, zero], [-c.clone(), b.clone()]]);
    }
    let disc = b * b - Rational::from_integer(4.into()) * a * c;
    let r = sqrt_exact(&disc)?;
    let two_a = Rational::from_integer(2.into()) * a;
    Some(vec![[(-b + &r) / &two_a, one.clone()], [(-b - &r) / &two_a, one]])
}

/// Eigenvectors of a `2x2` rational matrix with rational eigenvalues.
fn eigenlines(m: &RMat2) -> Option<Vec<Direction>> {
    let tr = m.trace();
    let det = m.det();
    let disc = &tr * &tr - Rational::from_integer(4.into()) * &det;
    let r = sqrt_exact(&disc)?;
    let two = Rational::from_integer(2.into());
    let mut out = Vec::new();
    for e in [(&tr + &r) / &two, (&tr - &r) / &two] {
        let shifted = m.sub(&RMat2::diag(e.clone(), e));
        let v = if !shifted.get(0, 0).is_zero() || !shifted.get(0, 1).is_zero() {
            [shifted.get(0, 1).clone(), -shifted.get(0, 0).clone()]
        } else {
            [shifted.get(1, 1).clone(), -shifted.get(1, 0).clone()]
        };
        if let Ok(d) = Direction::from_vec(&v) {
            if !out.contains(&d) {
                out.push(d);
            }
        }
    }
    Some(out)
}

/// Two nodal fibers with node at `node`, built on one random generic
/// bundle from the two rational zeros of the node equation: one through a
/// field holomorphic at the node (with further members obtained by moving
/// `l_node`, onto an eigenline when the eigenvalues are rational) and one
/// through a field with nonzero residue there.
pub fn nodal_fibers(sampler: &mut Sampler, sph: &MarkedSphere, node: Marked, tries: usize) -> Result<Vec<NodalFiber>> {
    for _ in 0..tries {
        let b = sampler.generic_bundle(sph);
        let space = higgs_space(&b)?;
        let value = |c: [Rational; 2]| -> Result<Rational> {
            let th = combine(&b, &space, &c);
            Ok(discriminant_value(sph, &higgs_det(&th)?, node))
        };
        let a = value([Rational::one(), Rational::zero()])?;
        let c = value([Rational::zero(), Rational::one()])?;
        let b_coef = value([Rational::one(), Rational::one()])? - &a - &c;
        let Some(zeros) = form_zeros(&a, &b_coef, &c) else { continue };
        let scale = sampler.nonzero();
        let fields: Vec<HiggsField> = zeros.iter().map(|z| combine(&b, &space, z).scale(&scale)).collect();
        let (hol0, app0): (Vec<_>, Vec<_>) = fields.into_iter().partition(|f| f.residue_matrix(node).is_zero());
        let (Some(hol0), Some(app0)) = (hol0.first().cloned(), app0.first().cloned()) else { continue };
        let s_hol = higgs_det(&hol0)?;
        let s_app = higgs_det(&app0)?;
        if s_hol.is_zero() || s_app.is_zero() {
            continue;
        }
        let constant = crate::hitchin::constant_part(&hol0, node);
        let eig = eigenlines(&constant).unwrap_or_default();
        let mut hol = Vec::new();
        if !eig.contains(hol0.base.dir(node)) {
            hol.push(hol0.clone());
        }
        for _ in 0..3 {
            let l = Direction::slope(sampler.rational());
            if !eig.contains(&l) {
                hol.push(HiggsField { base: hol0.base.with_dir(node, l), ..hol0.clone() });
            }
        }
        let both = eig
            .into_iter()
            .map(|l| HiggsField { base: hol0.base.with_dir(node, l), ..hol0.clone() })
            .collect();
        return Ok(vec![
            NodalFiber { node, s: s_hol, hol, app: Vec::new(), both },
            NodalFiber { node, s: s_app, hol: Vec::new(), app: vec![app0], both: Vec::new() },
        ]);
    }
    Ok(Vec::new())
}

/// A nodal fiber containing members in both components: a field
/// holomorphic at `node` whose constant part there has rational
/// eigenlines, found by searching random bundles.
pub fn both_fiber(sampler: &mut Sampler, sph: &MarkedSphere, node: Marked, tries: usize) -> Result<Option<NodalFiber>> {
    for _ in 0..tries {
        let b = ParabolicBundle::normalized(sph.clone(), sampler.rational(), sampler.rational());
        let Ok(space) = higgs_space(&b) else { continue };
        if space.len() != 2 {
            continue;
        }
        // The combination killing the first nonzero residue entry.
        let r0 = space[0].residue_matrix(node);
        let r1 = space[1].residue_matrix(node);
        let Some((i, j)) = (0..4).map(|k| (k / 2, k % 2)).find(|(i, j)| !r0.get(*i, *j).is_zero() || !r1.get(*i, *j).is_zero())
        else {
            continue;
        };
        let th = combine(&b, &space, &[r1.get(i, j).clone(), -r0.get(i, j).clone()]);
        if th.is_zero() || !th.residue_matrix(node).is_zero() {
            continue;
        }
        let s = higgs_det(&th)?;
        if s.is_zero() {
            continue;
        }
        let Some(eig) = eigenlines(&crate::hitchin::constant_part(&th, node)) else { continue };
        let with = |l: Direction| HiggsField { base: th.base.with_dir(node, l), ..th.clone() };
        let mut hol = Vec::new();
        while hol.len() < 2 {
            let l = Direction::slope(sampler.rational());
            if !eig.contains(&l) {
                hol.push(with(l));
            }
        }
        let both = eig.into_iter().map(with).collect();
        return Ok(Some(NodalFiber { node, s, hol, app: Vec::new(), both }));
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_sampler_is_deterministic() {
        let mut a = Sampler::new(7);
        let mut b = Sampler::new(7);
        for _ in 0..20 {
            assert_eq!(a.rational(), b.rational());
        }
        assert_eq!(a.sphere(), b.sphere());
    }

    #[test]
    fn nodal_samples_exist_at_every_point() {
        let mut s = Sampler::new(3);
        let sph = MarkedSphere::new(Rational::from_integer(2.into()), Rational::from_integer(3.into())).unwrap();
        for m in Marked::ALL {
            let fibers = nodal_fibers(&mut s, &sph, m, 20).unwrap();
            assert_eq!(fibers.len(), 2, "node at {m}");
            for f in &fibers {
                assert_eq!(discriminant_value(&sph, &f.s, m), Rational::zero());
            }
            assert!(!fibers[0].hol.is_empty() && !fibers[1].app.is_empty());
            let f = both_fiber(&mut s, &sph, m, 2000).unwrap().expect("rational eigenlines");
            assert_eq!(f.both.len(), 2);
        }
    }
}
