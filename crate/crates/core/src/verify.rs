//! Re-derivation of the explicit claims about the moduli space: each check
//! samples inputs, compares the library against an independent
//! computation and records the first counterexample.

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::arith::linalg::kernel;
use crate::arith::{int, FMat2, RatFunc, Rational};
use crate::bundles::{
    classify_stability, classify_table1, Direction, Line16, Marked, MarkedSphere, ParabolicBundle, Stability, Table1Label,
    WeightVector,
};
use crate::connections::{
    beta_residues, connection_space, double_point_family, family_rho, pi_mu_limit, scaled_gauge_limit, triple_point_family,
    PiMuLimit,
};
use crate::elem::{elem_higgs, group_compose, line_permutations, table1_permutations, weight_transform, ElemMask};
use crate::error::Result;
use crate::higgs::{combine, invariance_defect, higgs_det, higgs_space, higgs_stability, HiggsField, HitchinPoint};
use crate::hitchin::{
    base_hodge, canonical_hodge, classify_fiber_point, classify_nilpotent, constant_part, cstar_limit_infinity,
    expected_constant_det, reconstruct, FiberClass, NilpotentStratum,
};
use crate::json;
use crate::normal_form::isomorphic;
use crate::sample::{both_fiber, nodal_fibers, NodalFiber, Sampler};

/// Chart parameters `(u, v)` and pencil coefficients `(c1, c2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PencilPoint {
    pub u: Rational,
    pub v: Rational,
    pub c1: Rational,
    pub c2: Rational,
}

/// A closed-form candidate for `det(c1 theta_1 + c2 theta_2)`.
pub type DetFormula = fn(&MarkedSphere, &PencilPoint) -> HitchinPoint;

fn simple(c: Rational, p: &Rational) -> RatFunc {
    RatFunc::simple_pole(c, p)
}

/// The basis field of the normalized chart attached to the pair
/// `(s, p)`: `(u, lambda)` for the first, `(v, t)` for the second.
fn pencil_field(b: &ParabolicBundle, s: &Rational, p: &Rational) -> Result<HiggsField> {
    let zero = Rational::zero();
    let one = Rational::one();
    let a = &simple(s.clone(), p) - &simple(s.clone(), &one);
    let m = FMat2::new(
        a.clone(),
        &(&simple(s.clone(), &one) - &simple(one.clone(), p)) + &simple(&one - s, &zero),
        &simple(s * s, p) - &simple(s.clone(), &one),
        -a,
    );
    HiggsField::from_matrix(b, &m)
}

/// `theta_1, theta_2` on the bundle with `l_0 = (1, 0)`, `l_1 = (1, 1)`,
/// `l_lambda = (1, u)`, `l_t = (1, v)`, `l_inf = (0, 1)`.
pub fn pencil_basis(sph: &MarkedSphere, u: &Rational, v: &Rational) -> Result<[HiggsField; 2]> {
    let b = ParabolicBundle::normalized(sph.clone(), u.clone(), v.clone());
    Ok([pencil_field(&b, u, &sph.lambda)?, pencil_field(&b, v, &sph.t)?])
}

pub fn pencil_field_at(sph: &MarkedSphere, p: &PencilPoint) -> Result<HiggsField> {
    let [t1, t2] = pencil_basis(sph, &p.u, &p.v)?;
    Ok(combine(&t1.base, &[t1.clone(), t2], &[p.c1.clone(), p.c2.clone()]))
}

/// The linear factors `(a1, a2, b1, b2)` with `h1 = a1 a2`, `h2 = b1 b2`.
pub fn pencil_factors(sph: &MarkedSphere, p: &PencilPoint) -> [Rational; 4] {
    let (l, t) = (&sph.lambda, &sph.t);
    let (u, v, c1, c2) = (&p.u, &p.v, &p.c1, &p.c2);
    let one = Rational::one();
    [
        c1 * (&one - u) + c2 * (&one - v),
        c1 * t * u * (l - u) + c2 * l * v * (t - v),
        c1 * u * (u - &one) + c2 * v * (v - &one),
        c1 * (l - u) + c2 * (t - v),
    ]
}

pub fn det_formula(sph: &MarkedSphere, p: &PencilPoint) -> HitchinPoint {
    let [a1, a2, b1, b2] = pencil_factors(sph, p);
    HitchinPoint::new(a1 * a2, b1 * b2)
}

/// The second factor exactly as printed in the source text, with
/// `lambda - 1` where `lambda - u` belongs.
pub fn det_formula_as_printed(sph: &MarkedSphere, p: &PencilPoint) -> HitchinPoint {
    let [a1, a2, b1, _] = pencil_factors(sph, p);
    let b2 = &p.c1 * (&sph.lambda - Rational::one()) + &p.c2 * (&sph.t - &p.v);
    HitchinPoint::new(a1 * a2, b1 * b2)
}

/// Determinants of the four systems `a_i = b_j = 0` in `(c1, c2)`, ordered
/// `(a1, b1), (a2, b2), (a1, b2), (a2, b1)`.
pub fn system_determinants(sph: &MarkedSphere, u: &Rational, v: &Rational) -> [Rational; 4] {
    let coeffs = |k: usize| -> [Rational; 2] {
        let at = |c1: i64, c2: i64| {
            let p = PencilPoint { u: u.clone(), v: v.clone(), c1: int(c1), c2: int(c2) };
            pencil_factors(sph, &p)[k].clone()
        };
        [at(1, 0), at(0, 1)]
    };
    let det = |i: usize, j: usize| {
        let (x, y) = (coeffs(i), coeffs(j));
        &x[0] * &y[1] - &x[1] * &y[0]
    };
    [det(0, 2), det(1, 3), det(0, 3), det(1, 2)]
}

/// The five locus equations: `(v-1)(u-1)(u-v)`, `(t-v)(lambda-u)(lambda v - t u)`,
/// `u(t-1) + v(1-lambda) + lambda - t`, `u t(lambda-1) + v lambda(1-t) + u v(t-lambda)`
/// and `u v`.
pub fn locus_values(sph: &MarkedSphere, u: &Rational, v: &Rational) -> [Rational; 5] {
    let (l, t) = (&sph.lambda, &sph.t);
    let one = Rational::one();
    [
        (v - &one) * (u - &one) * (u - v),
        (t - v) * (l - u) * (l * v - t * u),
        u * (t - &one) + v * (&one - l) + l - t,
        u * t * (l - &one) + v * l * (&one - t) + u * v * (t - l),
        u * v,
    ]
}

/// A random chart point on locus `k` of [`locus_values`].
pub fn sample_on_locus(s: &mut Sampler, sph: &MarkedSphere, k: usize) -> (Rational, Rational) {
    let (l, t) = (&sph.lambda, &sph.t);
    let one = Rational::one();
    loop {
        let u = s.rational();
        let v = s.rational();
        let pick = s.rng_index(3);
        let point = match (k, pick) {
            (0, 0) => (one.clone(), v),
            (0, 1) => (u, one.clone()),
            (0, _) => (u.clone(), u),
            (1, 0) => (l.clone(), v),
            (1, 1) => (u, t.clone()),
            (1, _) => (u.clone(), t * &u / l),
            (2, _) => (u.clone(), (&u * (t - &one) + l - t) / (l - &one)),
            (3, _) => {
                let den = l * (&one - t) + &u * (t - l);
                if den.is_zero() {
                    continue;
                }
                (u.clone(), -(&u * t * (l - &one)) / den)
            }
            (_, 0) => (Rational::zero(), v),
            (_, _) => (u, Rational::zero()),
        };
        return point;
    }
}

/// Coefficients `(p0, p1, p2)` of `q(c1, c2) = p0 c1^2 + p1 c1 c2 + p2 c2^2`
/// read from three evaluations.
fn binary_form(f: impl Fn(i64, i64) -> Result<Rational>) -> Result<[Rational; 3]> {
    let p0 = f(1, 0)?;
    let p2 = f(0, 1)?;
    let p1 = f(1, 1)? - &p0 - &p2;
    Ok([p0, p1, p2])
}

/// Whether `det(c1 theta_1 + c2 theta_2)` vanishes for some `(c1, c2) != 0`,
/// decided from the Sylvester matrix of the two coefficient forms.
pub fn pencil_has_null_field(sph: &MarkedSphere, u: &Rational, v: &Rational) -> Result<bool> {
    let [t1, t2] = pencil_basis(sph, u, v)?;
    let det_at = |c1: i64, c2: i64| {
        let th = combine(&t1.base, &[t1.clone(), t2.clone()], &[int(c1), int(c2)]);
        higgs_det(&th)
    };
    let f = binary_form(|a, b| Ok(det_at(a, b)?.h1))?;
    let g = binary_form(|a, b| Ok(det_at(a, b)?.h2))?;
    let z = Rational::zero();
    let rows = vec![
        vec![f[0].clone(), f[1].clone(), f[2].clone(), z.clone()],
        vec![z.clone(), f[0].clone(), f[1].clone(), f[2].clone()],
        vec![g[0].clone(), g[1].clone(), g[2].clone(), z.clone()],
        vec![z, g[0].clone(), g[1].clone(), g[2].clone()],
    ];
    Ok(!kernel(&rows, 4).is_empty())
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub checked: usize,
    pub counterexample: Option<Value>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "passed": self.passed(),
            "checked": self.checked,
            "counterexample": self.counterexample,
        })
    }
}

/// Accumulates cases for one check and stops at the first failure.
struct Tally {
    name: &'static str,
    checked: usize,
    counterexample: Option<Value>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally { name, checked: 0, counterexample: None }
    }

    fn open(&self) -> bool {
        self.counterexample.is_none()
    }

    fn case(&mut self, ok: bool, detail: impl FnOnce() -> Value) {
        self.checked += 1;
        if !ok && self.counterexample.is_none() {
            self.counterexample = Some(detail());
        }
    }

    /// Records a library error as a counterexample.
    fn guard<T>(&mut self, r: Result<T>, detail: impl FnOnce() -> Value) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.case(false, || json!({"error": e.to_string(), "input": detail()}));
                None
            }
        }
    }

    fn absorb(&mut self, other: Tally) {
        self.checked += other.checked;
        if self.counterexample.is_none() {
            self.counterexample = other.counterexample;
        }
    }

    fn done(self) -> CheckOutcome {
        CheckOutcome { name: self.name, checked: self.checked, counterexample: self.counterexample }
    }
}

fn pencil_json(p: &PencilPoint) -> Value {
    json!({"u": json::rational(&p.u), "v": json::rational(&p.v), "c1": json::rational(&p.c1), "c2": json::rational(&p.c2)})
}

/// The sixteen masks under composition form an elementary abelian group of
/// order 16.
pub fn check_group_table() -> CheckOutcome {
    let mut t = Tally::new("group_table");
    let all = ElemMask::all();
    let id = ElemMask::identity();
    t.case(all.len() == 16, || json!({"masks": all.len()}));
    for &i in &all {
        t.case(group_compose(i, i) == id && group_compose(i, id) == i, || json!({"mask": json::mask(i)}));
        for &j in &all {
            let ij = group_compose(i, j);
            t.case(all.contains(&ij) && ij == group_compose(j, i), || json!({"i": json::mask(i), "j": json::mask(j)}));
            for &k in &all {
                if group_compose(ij, k) != group_compose(i, group_compose(j, k)) {
                    t.case(false, || json!({"i": json::mask(i), "j": json::mask(j), "k": json::mask(k)}));
                }
            }
        }
    }
    t.done()
}

fn orbit_check<L: Copy + Eq + std::fmt::Display>(
    t: &mut Tally,
    what: &str,
    perms: &[(ElemMask, Vec<L>)],
    labels: &[L],
) {
    let pos = |l: L| labels.iter().position(|x| *x == l).expect("known label");
    let mut orbit: Vec<L> = Vec::new();
    for (_, image) in perms {
        if !orbit.contains(&image[0]) {
            orbit.push(image[0]);
        }
    }
    t.case(orbit.len() == 16, || json!({"action": what, "orbit_size": orbit.len()}));
    // Compatibility with composition.
    for (i, pi) in perms {
        for (j, pj) in perms {
            let (_, pij) = perms.iter().find(|(m, _)| *m == group_compose(*i, *j)).expect("closed");
            let ok = labels.iter().all(|&l| pij[pos(l)] == pi[pos(pj[pos(l)])]);
            t.case(ok, || json!({"action": what, "i": json::mask(*i), "j": json::mask(*j)}));
        }
    }
}

/// Transitivity of the mask group on Table-1 labels, line labels and
/// Hodge bundles.
pub fn check_orbits(sph: &MarkedSphere) -> CheckOutcome {
    let mut t = Tally::new("orbits");
    if let Some(perms) = t.guard(table1_permutations(sph), || json::sphere(sph)) {
        orbit_check(&mut t, "table1", &perms, &Table1Label::all());
    }
    if let Some(perms) = t.guard(line_permutations(sph), || json::sphere(sph)) {
        orbit_check(&mut t, "lines", &perms, &Line16::all());
    }
    let base = base_hodge(sph);
    let mut seen = Vec::new();
    for mask in ElemMask::all() {
        let Some(moved) = t.guard(elem_higgs(&base, mask), || json!({"mask": json::mask(mask)})) else { continue };
        match t.guard(classify_nilpotent(&moved), || json::higgs(&moved)) {
            Some(NilpotentStratum::Hodge(l)) if !seen.contains(&l) => seen.push(l),
            Some(other) => t.case(false, || json!({"mask": json::mask(mask), "stratum": json::stratum(&other)})),
            None => {}
        }
    }
    t.case(seen.len() == 16, || json!({"action": "hodge", "orbit_size": seen.len()}));
    t.done()
}

/// `elem_I` is an involution on isomorphism classes.
pub fn check_elem_involution(sph: &MarkedSphere, s: &mut Sampler, n: usize) -> CheckOutcome {
    let mut t = Tally::new("elem_involution");
    let masks = ElemMask::all();
    for _ in 0..n {
        if !t.open() {
            break;
        }
        let b = s.stable_bundle(sph);
        let Some(th) = t.guard(s.field_on(&b), || json::bundle(&b)) else { continue };
        let mask = s.pick(&masks);
        let twice = elem_higgs(&th, mask).and_then(|m| elem_higgs(&m, mask));
        let Some(twice) = t.guard(twice, || json::higgs(&th)) else { continue };
        let same = t.guard(isomorphic(&twice, &th), || json::higgs(&th)).unwrap_or(false);
        t.case(same, || json!({"field": json::higgs(&th), "mask": json::mask(mask)}));
    }
    t.done()
}

/// `det(c1 theta_1 + c2 theta_2)` against `formula` on random pencil points.
pub fn check_det_formula(sph: &MarkedSphere, s: &mut Sampler, n: usize, formula: DetFormula) -> CheckOutcome {
    let mut t = Tally::new("det_formula");
    for _ in 0..n {
        if !t.open() {
            break;
        }
        let p = PencilPoint { u: s.rational(), v: s.rational(), c1: s.rational(), c2: s.rational() };
        let Some(th) = t.guard(pencil_field_at(sph, &p), || pencil_json(&p)) else { continue };
        let Some(got) = t.guard(higgs_det(&th), || pencil_json(&p)) else { continue };
        let want = formula(sph, &p);
        t.case(got == want, || {
            json!({"point": pencil_json(&p), "computed": json::hitchin_point(&got), "formula": json::hitchin_point(&want)})
        });
    }
    t.done()
}

/// On each locus some system `a_i = b_j = 0` is singular and the pencil
/// contains a nonzero field of determinant zero; off the loci neither
/// happens.
pub fn check_discriminant(sph: &MarkedSphere, s: &mut Sampler, per_locus: usize) -> CheckOutcome {
    let mut t = Tally::new("discriminant");
    let run = |t: &mut Tally, u: Rational, v: Rational, locus: Option<usize>| {
        let dets = system_determinants(sph, &u, &v);
        let loci = locus_values(sph, &u, &v);
        let singular = dets.iter().any(Zero::is_zero);
        let on_locus = loci.iter().any(Zero::is_zero);
        let detail = || json!({"u": json::rational(&u), "v": json::rational(&v), "locus": locus});
        let Some(null) = t.guard(pencil_has_null_field(sph, &u, &v), detail) else { return };
        let expected = locus.is_some();
        t.case(singular == expected && on_locus == expected && null == expected, detail);
    };
    for k in 0..5 {
        for _ in 0..per_locus {
            let (u, v) = sample_on_locus(s, sph, k);
            run(&mut t, u, v, Some(k));
        }
    }
    let mut generic = 0;
    while generic < per_locus {
        let (u, v) = (s.rational(), s.rational());
        if locus_values(sph, &u, &v).iter().any(Zero::is_zero) {
            continue;
        }
        generic += 1;
        run(&mut t, u, v, None);
    }
    t.done()
}

/// The Table-1 label whose position matches `line`.
pub fn matched_label(line: Line16) -> Table1Label {
    Table1Label::all().into_iter().find(|l| l.matching_line() == line).expect("bijection")
}

/// A random nilpotent semistable field together with the stratum it was
/// built from.
pub fn sample_nilpotent(s: &mut Sampler, sph: &MarkedSphere) -> Result<(HiggsField, NilpotentStratum)> {
    let k = s.rng_index(33);
    let (th, stratum) = if k == 0 {
        let b = s.stable_bundle(sph);
        (HiggsField::zero(&b), NilpotentStratum::ZeroSection)
    } else if k <= 16 {
        let line = Line16::all()[k - 1];
        let (th, c) = s.ni_field(sph, line)?;
        (th, NilpotentStratum::Ni { line, c })
    } else {
        let label = Table1Label::all()[k - 17];
        (canonical_hodge(sph, label)?.scale(&s.nonzero()), NilpotentStratum::Hodge(label))
    };
    Ok((s.disguise(&th)?, stratum))
}

/// Classification of nilpotent fields into the seventeen strata, the
/// round trip through `reconstruct`, and the C*-limit of `N_i` fields.
pub fn check_nilpotent(sph: &MarkedSphere, s: &mut Sampler, n: usize) -> CheckOutcome {
    let mut t = Tally::new("nilpotent_strata");
    let mu = WeightVector::central();
    for _ in 0..n {
        if !t.open() {
            break;
        }
        let Some((th, want)) = t.guard(sample_nilpotent(s, sph), || json::sphere(sph)) else { continue };
        let detail = || json!({"field": json::higgs(&th), "expected": json::stratum(&want)});
        let Some(stab) = t.guard(higgs_stability(&th, &mu), detail) else { continue };
        t.case(stab != Stability::Unstable, detail);
        let Some(got) = t.guard(classify_nilpotent(&th), detail) else { continue };
        t.case(got == want, || json!({"field": json::higgs(&th), "expected": json::stratum(&want), "got": json::stratum(&got)}));
        let Some(back) = t.guard(reconstruct(&th.base, &got), detail) else { continue };
        let same = t.guard(isomorphic(&back, &th), detail).unwrap_or(false);
        t.case(same, || json!({"field": json::higgs(&th), "reconstructed": json::higgs(&back)}));
        if let NilpotentStratum::Ni { line, .. } = got {
            let Some(label) = t.guard(cstar_limit_infinity(&th), detail) else { continue };
            t.case(label == matched_label(line), || {
                json!({"field": json::higgs(&th), "limit": json::table1_label(label)})
            });
        }
    }
    t.done()
}

/// Enumerates every coincidence pattern of the five directions on `O + O`
/// and `O(-1) + O(1)` (distinct groups get `e1`, `(1, 1)` or random
/// slopes, never `e2`, and on `O(-1) + O(1)` at most one group lies on `O(1)`), and
/// checks that the unstable ones carrying a nonzero semistable field are
/// exactly the Table-1 bundles, where semistability of the field is
/// `gamma != 0` in a frame adapted to the destabilizing summand.
pub fn check_unstable_locus(sph: &MarkedSphere, s: &mut Sampler) -> CheckOutcome {
    let mut t = Tally::new("unstable_locus");
    let mu = WeightVector::central();
    let mut slope = || Direction::slope(s.avoiding(&[Rational::zero(), Rational::one()]));
    let pool = [Direction::e1(), Direction::slope(Rational::one()), slope(), slope(), slope()];
    let seed = s.rng_index(1 << 30) as u64;
    let mut configs: Vec<(i64, [Direction; 5])> = Vec::new();
    for groups in set_partitions() {
        let k = groups.iter().max().map_or(0, |g| g + 1);
        // On O + O only the partition matters; on O(-1) + O(1) also which
        // group (if any) lies on the O(1) summand.
        configs.push((0, std::array::from_fn(|i| pool[groups[i]].clone())));
        for on_top in 0..=k {
            configs.push((
                1,
                std::array::from_fn(|i| match groups[i] {
                    g if g == on_top => Direction::e2(),
                    g if g < on_top => pool[g].clone(),
                    g => pool[g - 1].clone(),
                }),
            ));
        }
    }
    let results: Vec<(Tally, Option<Table1Label>)> = configs
        .par_iter()
        .enumerate()
        .map(|(i, (d, dirs))| unstable_config(sph, *d, dirs.clone(), seed ^ i as u64))
        .collect();
    let mut labels = Vec::new();
    let mut with_nilpotent = Vec::new();
    for (part, label) in results {
        t.absorb(part);
        if let Some(l) = label {
            if !labels.contains(&l) {
                labels.push(l);
            }
        }
    }
    t.case(labels.len() == 16, || json!({"labels_found": labels.len()}));
    for label in Table1Label::all() {
        let Some(th) = t.guard(canonical_hodge(sph, label), || json::table1_label(label)) else { continue };
        let ok = higgs_det(&th).is_ok_and(|s| s.is_zero())
            && higgs_stability(&th, &mu).is_ok_and(|st| st != Stability::Unstable);
        if ok {
            with_nilpotent.push(label);
        }
        t.case(ok, || json!({"label": json::table1_label(label)}));
    }
    t.case(with_nilpotent.len() == 16, || json!({"with_nilpotent": with_nilpotent.len()}));
    t.done()
}

/// Set partitions of the five marked points as restricted growth strings.
fn set_partitions() -> Vec<[usize; 5]> {
    let mut out = vec![[0; 5]];
    for i in 1..5 {
        let mut next = Vec::new();
        for g in &out {
            let k = g[..i].iter().max().expect("nonempty") + 1;
            for j in 0..=k {
                let mut h = *g;
                h[i] = j;
                next.push(h);
            }
        }
        out = next;
    }
    out
}

/// One direction assignment of [`check_unstable_locus`]; the label is set
/// for Table-1 bundles.
fn unstable_config(
    sph: &MarkedSphere,
    d: i64,
    dirs: [Direction; 5],
    seed: u64,
) -> (Tally, Option<Table1Label>) {
    let mut t = Tally::new("unstable_locus");
    let mu = WeightVector::central();
    let Some(b) = t.guard(ParabolicBundle::new(sph.clone(), d, dirs), || json!({"d": d})) else {
        return (t, None);
    };
    let report = classify_stability(&b, &mu);
    if report.class != Stability::Unstable {
        return (t, None);
    }
    let label = classify_table1(&b);
    let Some(space) = t.guard(higgs_space(&b), || json::bundle(&b)) else { return (t, None) };
    // The basis and two random members; semistability is open, so a random
    // member is semistable whenever any member is.
    let mut s = Sampler::new(seed);
    let mut trial: Vec<HiggsField> = space.clone();
    for _ in 0..2 {
        let c: Vec<Rational> = space.iter().map(|_| s.rational()).collect();
        trial.push(combine(&b, &space, &c));
    }
    let mut any = false;
    for th in trial.iter().filter(|f| !f.is_zero()) {
        let Some(st) = t.guard(higgs_stability(th, &mu), || json::higgs(th)) else { continue };
        let semistable = st != Stability::Unstable;
        any |= semistable;
        if label.is_some() {
            // gamma: the component carrying the destabilizing summand to
            // the quotient.
            let w = &report.witness;
            let gamma = invariance_defect(th, &w.a, &w.b);
            t.case(semistable == !gamma.is_zero(), || json!({"field": json::higgs(th), "semistable": semistable}));
        }
    }
    t.case(any == label.is_some(), || json!({"bundle": json::bundle(&b), "semistable_field": any}));
    (t, label)
}

fn fiber_class_ok(t: &mut Tally, th: &HiggsField, want: FiberClass) {
    let mu = WeightVector::central();
    match t.guard(classify_fiber_point(th, &mu), || json::higgs(th)) {
        Some(got) => t.case(got == want, || {
            json!({"field": json::higgs(th), "expected": json::fiber_class(&want), "got": json::fiber_class(&got)})
        }),
        None => {}
    }
}

fn check_fiber(t: &mut Tally, sph: &MarkedSphere, f: &NodalFiber) {
    let m = f.node;
    let want_det = expected_constant_det(sph, &f.s, m);
    let groups = [(&f.hol, FiberClass::NodalHol(m)), (&f.app, FiberClass::NodalApp(m)), (&f.both, FiberClass::NodalBoth(m))];
    for (members, class) in groups {
        for th in members {
            t.case(higgs_det(th).as_ref() == Ok(&f.s), || json!({"field": json::higgs(th), "fiber": json::hitchin_point(&f.s)}));
            fiber_class_ok(t, th, class.clone());
            // The residue of an apparent member is nilpotent; the others
            // share the constant part's determinant.
            let det = constant_part(th, m).det();
            let want = if matches!(class, FiberClass::NodalApp(_)) { Rational::zero() } else { want_det.clone() };
            t.case(det == want, || json!({"field": json::higgs(th), "constant_det": json::rational(&det)}));
            if matches!(class, FiberClass::NodalBoth(_)) {
                continue;
            }
            let swapped = match class {
                FiberClass::NodalHol(_) => FiberClass::NodalApp(m),
                _ => FiberClass::NodalHol(m),
            };
            for mask in ElemMask::all().into_iter().filter(|k| k.set().contains(m)) {
                let Some(moved) = t.guard(elem_higgs(th, mask), || json::higgs(th)) else { continue };
                let mu = weight_transform(&WeightVector::central(), mask);
                match t.guard(classify_fiber_point(&moved, &mu), || json::higgs(&moved)) {
                    Some(got) => t.case(got == swapped, || {
                        json!({"field": json::higgs(th), "mask": json::mask(mask), "got": json::fiber_class(&got)})
                    }),
                    None => {}
                }
            }
        }
    }
}

/// Nodal fibers over each of the five lines: `per_node` Hitchin points per
/// node, plus one fiber meeting both components.
pub fn check_nodal(sph: &MarkedSphere, s: &mut Sampler, per_node: usize) -> CheckOutcome {
    let mut t = Tally::new("nodal_fibers");
    for m in Marked::ALL {
        let mut points = 0;
        while points < per_node && t.open() {
            let Some(fibers) = t.guard(nodal_fibers(s, sph, m, 50), || json!({"node": m.name()})) else { break };
            if fibers.is_empty() {
                t.case(false, || json!({"node": m.name(), "reason": "no nodal fiber found"}));
                break;
            }
            for f in fibers.iter().take(per_node - points) {
                check_fiber(&mut t, sph, f);
                points += 1;
            }
        }
        match t.guard(both_fiber(s, sph, m, 4000), || json!({"node": m.name()})) {
            Some(Some(f)) => check_fiber(&mut t, sph, &f),
            Some(None) => t.case(false, || json!({"node": m.name(), "reason": "no fiber with rational eigenlines"})),
            None => {}
        }
    }
    t.done()
}

/// Limits of the two explicit families of connections and of connections
/// on stable bundles.
pub fn check_limits(sph: &MarkedSphere, s: &mut Sampler, n: usize) -> CheckOutcome {
    let mut t = Tally::new("connection_limits");
    let central = WeightVector::central();
    for _ in 0..n {
        if !t.open() {
            break;
        }
        let nu = s.generic_eigenvalues();
        let nu_json = json::eigenvalues(&nu);
        // Hodge limit, independent of the parameters.
        let mut first: Option<HiggsField> = None;
        for _ in 0..3 {
            let (a1, a2) = (s.rational(), s.rational());
            let Some(c) = t.guard(triple_point_family(sph, &nu, &a1, &a2), || nu_json.clone()) else { continue };
            let Some(lim) = t.guard(pi_mu_limit(&c, &central), || json::connection(&c)) else { continue };
            let PiMuLimit::Family { field, .. } = lim else {
                t.case(false, || json!({"connection": json::connection(&c), "limit": json::pi_mu_limit(&lim)}));
                continue;
            };
            let stratum = classify_nilpotent(&field);
            t.case(matches!(stratum, Ok(NilpotentStratum::Hodge(_))), || json!({"limit": json::higgs(&field)}));
            match &first {
                None => first = Some(field),
                Some(f) => t.case(f == &field, || json!({"nu": nu_json, "a1": json::rational(&a1), "a2": json::rational(&a2)})),
            }
        }
        // Distinct a1 give distinct beta residues.
        let u = s.nonzero();
        let a2 = s.rational();
        let a1 = s.rational();
        let a1b = s.avoiding(&[a1.clone()]);
        let rho = family_rho(&nu);
        let mut pairs = Vec::new();
        for a in [&a1, &a1b] {
            let Some(c) = t.guard(double_point_family(sph, &nu, &u, a, &a2), || nu_json.clone()) else { continue };
            let Some(lim) = t.guard(scaled_gauge_limit(&c, [0, 1]), || json::connection(&c)) else { continue };
            let got = beta_residues(&lim);
            let two = Rational::from_integer(2.into());
            let want = [&two * &nu.0[1] + &rho - a * &u, &two * &nu.0[2] * &u + a * &u * &u];
            t.case(got == want, || json!({"connection": json::connection(&c), "beta_residues": [json::rational(&got[0]), json::rational(&got[1])]}));
            pairs.push(got);
        }
        t.case(pairs.len() == 2 && pairs[0] != pairs[1], || json!({"nu": nu_json, "u": json::rational(&u)}));
        // Stable bundles limit to the zero field.
        let b = s.stable_bundle(sph);
        let Some((c, _)) = t.guard(connection_space(&b, &nu), || json::bundle(&b)) else { continue };
        let lim = t.guard(pi_mu_limit(&c, &central), || json::connection(&c));
        t.case(lim == Some(PiMuLimit::ZeroField(HiggsField::zero(&b))), || json::connection(&c));
    }
    t.done()
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub sphere: MarkedSphere,
    pub seed: u64,
    pub samples: usize,
    pub checks: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckOutcome::passed)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "sphere": json::sphere(&self.sphere),
            "seed": self.seed,
            "samples": self.samples,
            "passed": self.passed(),
            "checks": self.checks.iter().map(CheckOutcome::to_json).collect::<Vec<_>>(),
        })
    }
}

pub fn verify_paper(sph: &MarkedSphere, seed: u64, samples: usize) -> VerifyReport {
    verify_paper_with(sph, seed, samples, det_formula)
}

/// Runs every check, with `formula` standing in for the determinant
/// formula of the pencil.
pub fn verify_paper_with(sph: &MarkedSphere, seed: u64, samples: usize, formula: DetFormula) -> VerifyReport {
    let mut s = Sampler::new(seed);
    let checks = vec![
        check_group_table(),
        check_orbits(sph),
        check_elem_involution(sph, &mut s, (samples / 5).max(1)),
        check_det_formula(sph, &mut s, samples, formula),
        check_discriminant(sph, &mut s, (samples / 2).max(1)),
        check_nilpotent(sph, &mut s, samples),
        check_unstable_locus(sph, &mut s),
        check_nodal(sph, &mut s, (samples / 25).max(1)),
        check_limits(sph, &mut s, (samples / 5).max(1)),
    ];
    VerifyReport { sphere: sph.clone(), seed, samples, checks }
}
