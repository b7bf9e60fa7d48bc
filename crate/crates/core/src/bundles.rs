//! Quasiparabolic rank-2 bundles on the five-pointed line: marked points,
//! directions, line subbundles, parabolic stability, the sixteen special
//! lines and the sixteen unstable configurations carrying Higgs fields.

use std::fmt;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::linalg::{kernel, wedge};
use crate::arith::{q, Poly, ProjPoint, Rational};
use crate::error::{Error, Result};

/// One of the five marked points `0, 1, lambda, t, inf`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Marked {
    Zero,
    One,
    Lambda,
    T,
    Inf,
}

impl Marked {
    pub const ALL: [Marked; 5] = [Marked::Zero, Marked::One, Marked::Lambda, Marked::T, Marked::Inf];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Marked {
        Marked::ALL[i]
    }

    pub fn name(self) -> &'static str {
        match self {
            Marked::Zero => "0",
            Marked::One => "1",
            Marked::Lambda => "lambda",
            Marked::T => "t",
            Marked::Inf => "inf",
        }
    }

    pub fn parse(s: &str) -> Result<Marked> {
        Marked::ALL
            .into_iter()
            .find(|m| m.name() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown marked point {s:?}")))
    }
}

impl fmt::Display for Marked {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A subset of the marked points, stored as a bit mask.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PointSet(u8);

impl PointSet {
    pub const EMPTY: PointSet = PointSet(0);
    pub const FULL: PointSet = PointSet(0b11111);

    pub fn from_bits(bits: u8) -> PointSet {
        PointSet(bits & 0b11111)
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn of(points: &[Marked]) -> PointSet {
        PointSet(points.iter().fold(0, |acc, m| acc | (1 << m.index())))
    }

    pub fn contains(self, m: Marked) -> bool {
        self.0 & (1 << m.index()) != 0
    }

    pub fn with(self, m: Marked) -> PointSet {
        PointSet(self.0 | (1 << m.index()))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn complement(self) -> PointSet {
        PointSet(!self.0 & 0b11111)
    }

    pub fn sym_diff(self, o: PointSet) -> PointSet {
        PointSet(self.0 ^ o.0)
    }

    pub fn iter(self) -> impl Iterator<Item = Marked> {
        Marked::ALL.into_iter().filter(move |m| self.contains(*m))
    }

    /// All 32 subsets in bit order.
    pub fn all() -> impl Iterator<Item = PointSet> {
        (0u8..32).map(PointSet)
    }

    pub fn names(self) -> Vec<&'static str> {
        self.iter().map(Marked::name).collect()
    }
}

impl fmt::Display for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.names().join(","))
    }
}

/// The line with marked points `0, 1, lambda, t, inf`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MarkedSphere {
    pub lambda: Rational,
    pub t: Rational,
}

impl MarkedSphere {
    pub fn new(lambda: Rational, t: Rational) -> Result<Self> {
        let bad = lambda.is_zero() || lambda.is_one() || t.is_zero() || t.is_one() || lambda == t;
        if bad {
            return Err(Error::Invalid("marked points must be pairwise distinct".into()));
        }
        Ok(MarkedSphere { lambda, t })
    }

    /// Finite coordinate of a marked point, `None` for infinity.
    pub fn coord(&self, m: Marked) -> Option<Rational> {
        match m {
            Marked::Zero => Some(Rational::zero()),
            Marked::One => Some(Rational::one()),
            Marked::Lambda => Some(self.lambda.clone()),
            Marked::T => Some(self.t.clone()),
            Marked::Inf => None,
        }
    }

    pub fn point(&self, m: Marked) -> ProjPoint {
        match self.coord(m) {
            Some(c) => ProjPoint::Finite(c),
            None => ProjPoint::Infinity,
        }
    }

    /// The marked point at `p`, if any.
    pub fn marked_at(&self, p: &ProjPoint) -> Option<Marked> {
        Marked::ALL.into_iter().find(|m| &self.point(*m) == p)
    }

    /// `x (x - 1) (x - lambda) (x - t)`.
    pub fn denominator(&self) -> Poly {
        Poly::from_roots(&[Rational::zero(), Rational::one(), self.lambda.clone(), self.t.clone()])
    }

    pub fn finite_points(&self) -> [Rational; 4] {
        [Rational::zero(), Rational::one(), self.lambda.clone(), self.t.clone()]
    }
}

/// A point of P^1 used as a line in a 2-dimensional fiber, normalized so the
/// first nonzero coordinate is 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Direction([Rational; 2]);

impl Direction {
    pub fn new(a: Rational, b: Rational) -> Result<Self> {
        if a.is_zero() && b.is_zero() {
            return Err(Error::Invalid("direction (0, 0)".into()));
        }
        Ok(if a.is_zero() {
            Direction([a, Rational::one()])
        } else {
            let b = b / &a;
            Direction([Rational::one(), b])
        })
    }

    pub fn from_vec(v: &[Rational; 2]) -> Result<Self> {
        Direction::new(v[0].clone(), v[1].clone())
    }

    /// `(1, s)`.
    pub fn slope(s: Rational) -> Self {
        Direction([Rational::one(), s])
    }

    pub fn e1() -> Self {
        Direction([Rational::one(), Rational::zero()])
    }

    pub fn e2() -> Self {
        Direction([Rational::zero(), Rational::one()])
    }

    pub fn coords(&self) -> &[Rational; 2] {
        &self.0
    }

    /// True if the vector `v` lies on this line.
    pub fn contains(&self, v: &[Rational; 2]) -> bool {
        wedge(v, &self.0).is_zero()
    }
}

/// `O(-d) + O(d)` with five parabolic directions. The direction at infinity
/// is expressed in the frame `v_w = diag(x^d, x^-d) v_x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ParabolicBundle {
    pub sphere: MarkedSphere,
    pub d: i64,
    pub dirs: [Direction; 5],
}

impl ParabolicBundle {
    pub fn new(sphere: MarkedSphere, d: i64, dirs: [Direction; 5]) -> Result<Self> {
        if !(0..=1).contains(&d) {
            return Err(Error::SplittingOutOfRange(d));
        }
        Ok(ParabolicBundle { sphere, d, dirs })
    }

    pub fn dir(&self, m: Marked) -> &Direction {
        &self.dirs[m.index()]
    }

    /// The bundle on the trivial chart with `l0 = (1,0)`, `l1 = (1,1)`,
    /// `l_lambda = (1,u)`, `l_t = (1,v)`, `l_inf = (0,1)`.
    pub fn normalized(sphere: MarkedSphere, u: Rational, v: Rational) -> Self {
        ParabolicBundle {
            sphere,
            d: 0,
            dirs: [
                Direction::e1(),
                Direction::slope(Rational::one()),
                Direction::slope(u),
                Direction::slope(v),
                Direction::e2(),
            ],
        }
    }

    /// `(u, v)` if the bundle is already in the normalized chart.
    pub fn chart_coords(&self) -> Option<(Rational, Rational)> {
        let std = self.d == 0
            && self.dirs[0] == Direction::e1()
            && self.dirs[1] == Direction::slope(Rational::one())
            && self.dirs[4] == Direction::e2()
            && !self.dirs[2].0[0].is_zero()
            && !self.dirs[3].0[0].is_zero();
        std.then(|| (self.dirs[2].0[1].clone(), self.dirs[3].0[1].clone()))
    }

    pub fn with_dir(&self, m: Marked, l: Direction) -> Self {
        let mut out = self.clone();
        out.dirs[m.index()] = l;
        out
    }
}

/// Parabolic weights, one per marked point.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightVector(pub [Rational; 5]);

impl WeightVector {
    pub fn new(mu: [Rational; 5]) -> Result<Self> {
        if mu.iter().any(|m| m < &Rational::zero() || m > &Rational::one()) {
            return Err(Error::Invalid("weights must lie in [0, 1]".into()));
        }
        Ok(WeightVector(mu))
    }

    /// All weights `1/2`.
    pub fn central() -> Self {
        WeightVector(std::array::from_fn(|_| q(1, 2)))
    }

    pub fn get(&self, m: Marked) -> &Rational {
        &self.0[m.index()]
    }
}

/// A line subbundle `O(k) -> O(-d) + O(d)` given by `(a, b)` with
/// `deg a <= -d - k`, `deg b <= d - k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subbundle {
    pub degree: i64,
    pub a: Poly,
    pub b: Poly,
    pub incident: PointSet,
}

impl Subbundle {
    /// Fiber of the subbundle at a marked point in the chart frame there.
    pub fn fiber(&self, b: &ParabolicBundle, m: Marked) -> [Rational; 2] {
        fiber_of(&self.a, &self.b, self.degree, b.d, &b.sphere, m)
    }
}

fn fiber_of(a: &Poly, b: &Poly, k: i64, d: i64, sph: &MarkedSphere, m: Marked) -> [Rational; 2] {
    match sph.coord(m) {
        Some(p) => [a.eval(&p), b.eval(&p)],
        None => [a.coeff(-d - k), b.coeff(d - k)],
    }
}

/// True if `(a, b)` defines a saturated subbundle of degree `k`: coprime
/// and not vanishing at infinity.
pub fn is_saturated(a: &Poly, b: &Poly, k: i64, d: i64) -> bool {
    if a.is_zero() && b.is_zero() {
        return false;
    }
    if a.coeff(-d - k).is_zero() && b.coeff(d - k).is_zero() {
        return false;
    }
    a.gcd(b).degree() == Some(0)
}

/// Incidence equations on the coefficient vector `(a_0.., b_0..)` of
/// candidate sections of degree `k`, one row per point in `s`.
fn incidence_rows(bundle: &ParabolicBundle, s: PointSet, k: i64) -> (Vec<Vec<Rational>>, usize, usize) {
    let d = bundle.d;
    let na = (-d - k + 1).max(0) as usize;
    let nb = (d - k + 1).max(0) as usize;
    let mut rows = Vec::new();
    for m in s.iter() {
        let l = bundle.dir(m).coords();
        let mut row = vec![Rational::zero(); na + nb];
        match bundle.sphere.coord(m) {
            Some(p) => {
                // l2 * a(p) - l1 * b(p) = 0
                let mut pw = Rational::one();
                for i in 0..na.max(nb) {
                    if i < na {
                        row[i] = &l[1] * &pw;
                    }
                    if i < nb {
                        row[na + i] = -(&l[0] * &pw);
                    }
                    pw *= &p;
                }
            }
            None => {
                if na > 0 {
                    row[na - 1] = l[1].clone();
                }
                if nb > 0 {
                    row[na + nb - 1] = -l[0].clone();
                }
            }
        }
        rows.push(row);
    }
    (rows, na, nb)
}

fn split(v: &[Rational], na: usize) -> (Poly, Poly) {
    (Poly::new(v[..na].to_vec()), Poly::new(v[na..].to_vec()))
}

/// Nonzero sections of degree `k` through `s` (a kernel basis).
pub fn incidence_kernel(bundle: &ParabolicBundle, s: PointSet, k: i64) -> Vec<(Poly, Poly)> {
    let (rows, na, nb) = incidence_rows(bundle, s, k);
    if na + nb == 0 {
        return Vec::new();
    }
    kernel(&rows, na + nb).iter().map(|v| split(v, na)).collect()
}

fn incident_set(bundle: &ParabolicBundle, a: &Poly, b: &Poly, k: i64) -> PointSet {
    Marked::ALL
        .into_iter()
        .filter(|m| bundle.dir(*m).contains(&fiber_of(a, b, k, bundle.d, &bundle.sphere, *m)))
        .fold(PointSet::EMPTY, PointSet::with)
}

/// Finds a saturated element in the span of `basis`, trying the basis
/// vectors and then pseudo-random combinations.
fn saturated_in_span(basis: &[(Poly, Poly)], k: i64, d: i64) -> Option<(Poly, Poly)> {
    for (a, b) in basis {
        if is_saturated(a, b, k, d) {
            return Some((a.clone(), b.clone()));
        }
    }
    if basis.len() < 2 {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ (k as u64));
    for _ in 0..16 {
        let mut a = Poly::zero();
        let mut b = Poly::zero();
        for (ba, bb) in basis {
            let c = Rational::from_integer(rng.gen_range(-97i64..=97).into());
            a = &a + &ba.scale(&c);
            b = &b + &bb.scale(&c);
        }
        if is_saturated(&a, &b, k, d) {
            return Some((a, b));
        }
    }
    None
}

/// Maximal-degree saturated subbundle whose fiber contains `l_i` for every
/// `i` in `s`, searched from degree `d` down to `-3`.
pub fn subline_max(bundle: &ParabolicBundle, s: PointSet) -> Option<Subbundle> {
    subline_max_to(bundle, s, -3)
}

pub(crate) fn subline_max_to(bundle: &ParabolicBundle, s: PointSet, min_degree: i64) -> Option<Subbundle> {
    let d = bundle.d;
    (min_degree..=d).rev().find_map(|k| {
        let basis = incidence_kernel(bundle, s, k);
        let (a, b) = saturated_in_span(&basis, k, d)?;
        let (a, b) = normalize_pair(a, b);
        let incident = incident_set(bundle, &a, &b, k);
        Some(Subbundle { degree: k, a, b, incident })
    })
}

/// Scales `(a, b)` so that the leading coefficient of `a` (or of `b` when
/// `a = 0`) is 1.
pub fn normalize_pair(a: Poly, b: Poly) -> (Poly, Poly) {
    let lc = if a.is_zero() { b.leading() } else { a.leading() };
    let inv = Rational::one() / lc;
    (a.scale(&inv), b.scale(&inv))
}

/// The saturated subbundle spanned by the polynomial vector `(a, b)`:
/// common factors are removed and the degree is read off the bounds.
pub fn saturate(bundle: &ParabolicBundle, a: &Poly, b: &Poly) -> Result<Subbundle> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::Invalid("zero section".into()));
    }
    let g = a.gcd(b);
    let (a, b) = normalize_pair(a.exact_div(&g)?, b.exact_div(&g)?);
    let d = bundle.d;
    let ka = if a.is_zero() { i64::MAX } else { -d - a.deg() };
    let kb = if b.is_zero() { i64::MAX } else { d - b.deg() };
    let k = ka.min(kb);
    let incident = incident_set(bundle, &a, &b, k);
    Ok(Subbundle { degree: k, a, b, incident })
}

/// `deg E - 2 deg L - sum_{l_i in L} mu_i + sum_{l_i not in L} mu_i`.
pub fn stab_value(bundle: &ParabolicBundle, mu: &WeightVector, l: &Subbundle) -> Result<Rational> {
    let actual = incident_set(bundle, &l.a, &l.b, l.degree);
    if actual != l.incident {
        return Err(Error::NotIncident(format!("claimed {}, actual {}", l.incident, actual)));
    }
    Ok(formal_stab(l.degree, l.incident, mu))
}

/// The stability expression for a degree and an incidence set.
pub fn formal_stab(degree: i64, incident: PointSet, mu: &WeightVector) -> Rational {
    let mut v = Rational::from_integer((-2 * degree).into());
    for m in Marked::ALL {
        if incident.contains(m) {
            v -= mu.get(m);
        } else {
            v += mu.get(m);
        }
    }
    v
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Stability {
    Stable,
    StrictlySemistable,
    Unstable,
}

impl Stability {
    pub fn from_value(v: &Rational) -> Stability {
        if v > &Rational::zero() {
            Stability::Stable
        } else if v.is_zero() {
            Stability::StrictlySemistable
        } else {
            Stability::Unstable
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::StrictlySemistable => "strictly-semistable",
            Stability::Unstable => "unstable",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilityReport {
    pub class: Stability,
    pub value: Rational,
    pub witness: Subbundle,
}

/// Minimum of the stability expression over saturated subbundles, with the
/// minimizing witness. Ties go to the first subset in bit order.
pub fn classify_stability(bundle: &ParabolicBundle, mu: &WeightVector) -> StabilityReport {
    let mut best: Option<(Rational, Subbundle)> = None;
    for s in PointSet::all() {
        let Some(l) = subline_max(bundle, s) else { continue };
        let v = formal_stab(l.degree, l.incident, mu);
        if best.as_ref().is_none_or(|(bv, _)| &v < bv) {
            best = Some((v, l));
        }
    }
    // The empty subset always yields a subbundle of degree >= -1.
    let (value, witness) = best.expect("some subbundle exists");
    StabilityReport { class: Stability::from_value(&value), value, witness }
}

/// The sixteen special lines in the moduli of stable bundles.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Line16 {
    Pair(PointSet),
    Quad(PointSet),
    Quint,
}

/// Pairs in label order; the first one is the base case `{t, inf}`.
pub const PAIR_ORDER: [[Marked; 2]; 10] = [
    [Marked::T, Marked::Inf],
    [Marked::Lambda, Marked::Inf],
    [Marked::One, Marked::Inf],
    [Marked::Zero, Marked::Inf],
    [Marked::Lambda, Marked::T],
    [Marked::One, Marked::T],
    [Marked::Zero, Marked::T],
    [Marked::One, Marked::Lambda],
    [Marked::Zero, Marked::Lambda],
    [Marked::Zero, Marked::One],
];

impl Line16 {
    pub fn all() -> Vec<Line16> {
        let mut v: Vec<Line16> = PAIR_ORDER.iter().map(|p| Line16::Pair(PointSet::of(p))).collect();
        v.extend(Marked::ALL.iter().map(|m| Line16::Quad(PointSet::of(&[*m]).complement())));
        v.push(Line16::Quint);
        v
    }

    /// 1-based position in `all()`.
    pub fn index(self) -> usize {
        Line16::all().iter().position(|l| *l == self).expect("valid label") + 1
    }

    pub fn subset(self) -> PointSet {
        match self {
            Line16::Pair(s) | Line16::Quad(s) => s,
            Line16::Quint => PointSet::FULL,
        }
    }

    pub fn kind(self) -> &'static str {
        match self {
            Line16::Pair(_) => "pair",
            Line16::Quad(_) => "quad",
            Line16::Quint => "quint",
        }
    }
}

impl fmt::Display for Line16 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind(), self.subset())
    }
}

/// Labels of the sixteen unstable bundles that carry semistable Higgs
/// fields.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Table1Label {
    /// Trivial bundle; the pair lies on one constant line, the other three
    /// on another.
    Row1(PointSet),
    /// `O(-1) + O(1)`; the named direction lies on `O(1)`, the rest on an
    /// `O(-1)`.
    Row2(Marked),
    /// `O(-1) + O(1)` with all five directions on one `O(-1)`.
    Row3,
}

impl Table1Label {
    pub fn all() -> Vec<Table1Label> {
        let mut v: Vec<Table1Label> =
            PAIR_ORDER.iter().map(|p| Table1Label::Row1(PointSet::of(p))).collect();
        v.extend(Marked::ALL.iter().map(|m| Table1Label::Row2(*m)));
        v.push(Table1Label::Row3);
        v
    }

    pub fn index(self) -> usize {
        Table1Label::all().iter().position(|l| *l == self).expect("valid label") + 1
    }

    pub fn from_index(i: usize) -> Option<Table1Label> {
        Table1Label::all().get(i.checked_sub(1)?).copied()
    }

    pub fn row(self) -> usize {
        match self {
            Table1Label::Row1(_) => 1,
            Table1Label::Row2(_) => 2,
            Table1Label::Row3 => 3,
        }
    }

    /// The line label with the same position.
    pub fn matching_line(self) -> Line16 {
        Line16::all()[self.index() - 1]
    }
}

impl fmt::Display for Table1Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Table1Label::Row1(s) => write!(f, "row1{s}"),
            Table1Label::Row2(m) => write!(f, "row2{{{m}}}"),
            Table1Label::Row3 => write!(f, "row3"),
        }
    }
}

/// Distinct directions with the marked points carrying each, in order of
/// first appearance.
pub fn direction_groups(bundle: &ParabolicBundle) -> Vec<(Direction, PointSet)> {
    let mut groups: Vec<(Direction, PointSet)> = Vec::new();
    for m in Marked::ALL {
        let l = bundle.dir(m);
        match groups.iter_mut().find(|(g, _)| g == l) {
            Some((_, s)) => *s = s.with(m),
            None => groups.push((l.clone(), PointSet::of(&[m]))),
        }
    }
    groups
}

pub fn classify_table1(bundle: &ParabolicBundle) -> Option<Table1Label> {
    match bundle.d {
        0 => {
            let groups = direction_groups(bundle);
            if groups.len() != 2 {
                return None;
            }
            let small = groups.iter().find(|(_, s)| s.len() == 2)?;
            Some(Table1Label::Row1(small.1))
        }
        1 => {
            let on_o1: Vec<Marked> =
                Marked::ALL.into_iter().filter(|m| bundle.dir(*m) == &Direction::e2()).collect();
            match on_o1.as_slice() {
                [] => on_degree_minus_one(bundle, PointSet::FULL).then_some(Table1Label::Row3),
                [u] => {
                    let rest = PointSet::of(&[*u]).complement();
                    on_degree_minus_one(bundle, rest).then_some(Table1Label::Row2(*u))
                }
                _ => None,
            }
        }
        _ => None,
    }
}

fn on_degree_minus_one(bundle: &ParabolicBundle, s: PointSet) -> bool {
    subline_max(bundle, s).is_some_and(|l| l.degree >= -1)
}

/// Labels of the special lines through a bundle that is stable for the
/// central weight.
pub fn lines_through(bundle: &ParabolicBundle) -> Result<Vec<Line16>> {
    match classify_stability(bundle, &WeightVector::central()).class {
        Stability::Unstable => return Err(Error::Unstable),
        Stability::StrictlySemistable => return Err(Error::StrictlySemistable),
        Stability::Stable => {}
    }
    let mut out = Vec::new();
    for label in Line16::all() {
        let on = match (label, bundle.d) {
            (Line16::Pair(s), 0) => {
                let v: Vec<Marked> = s.iter().collect();
                bundle.dir(v[0]) == bundle.dir(v[1])
            }
            (Line16::Pair(_), _) => false,
            (Line16::Quad(s), _) => subline_max(bundle, s).is_some_and(|l| l.degree == -1),
            (Line16::Quint, d) => d == 1,
        };
        if on {
            out.push(label);
        }
    }
    Ok(out)
}

/// The subbundle attached to a special line through `bundle`: the constant
/// line for a pair, the `O(-1)` through a quadruple, the `O(1)` summand for
/// the quintuple.
pub fn line_subbundle(bundle: &ParabolicBundle, line: Line16) -> Result<Subbundle> {
    let l = match line {
        Line16::Pair(s) => subline_max(bundle, s).filter(|l| l.degree == 0),
        Line16::Quad(s) => subline_max(bundle, s).filter(|l| l.degree == -1),
        Line16::Quint => (bundle.d == 1).then(|| {
            let (a, b) = (Poly::zero(), Poly::one());
            let incident = incident_set(bundle, &a, &b, 1);
            Subbundle { degree: 1, a, b, incident }
        }),
    };
    l.ok_or_else(|| Error::Invalid(format!("bundle is not on {line}")))
}
