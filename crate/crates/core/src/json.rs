//! JSON encodings of the domain values. Rationals are strings `"p/q"`,
//! polynomials are coefficient lists (lowest degree first), points are
//! `"0"`, `"1"`, `"lambda"`, `"t"`, `"inf"`.

use serde_json::{json, Map, Value};

use crate::arith::ratfunc::{format_ratfunc, parse_ratfunc};
use crate::arith::rational::{format_rational, parse_rational};
use crate::arith::{FMat2, Poly, ProjPoint, RMat2, Rational};
use crate::bundles::{
    Direction, Line16, Marked, MarkedSphere, ParabolicBundle, PointSet, StabilityReport, Subbundle, Table1Label,
    WeightVector,
};
use crate::connections::{Connection, EigenvalueVector, PiMuLimit};
use crate::elem::ElemMask;
use crate::error::{Error, Result};
use crate::higgs::{make_higgs, HiggsField, HitchinPoint};
use crate::hitchin::{CurveStatus, FiberClass, NilpotentStratum, SpectralCurve};

fn parse_err(what: &str) -> Error {
    Error::Parse(format!("expected {what}"))
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::Parse(format!("missing field {key:?}")))
}

pub fn rational(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

pub fn parse_rational_value(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) if n.is_i64() => Ok(Rational::from_integer(n.as_i64().expect("checked").into())),
        _ => Err(parse_err("a rational string")),
    }
}

pub fn poly(p: &Poly) -> Value {
    Value::Array(p.coeffs().iter().map(rational).collect())
}

pub fn parse_poly(v: &Value) -> Result<Poly> {
    let items = v.as_array().ok_or_else(|| parse_err("a coefficient list"))?;
    Ok(Poly::new(items.iter().map(parse_rational_value).collect::<Result<_>>()?))
}

pub fn point(p: &ProjPoint) -> Value {
    Value::String(p.to_string())
}

pub fn rmat(m: &RMat2) -> Value {
    json!([[rational(m.get(0, 0)), rational(m.get(0, 1))], [rational(m.get(1, 0)), rational(m.get(1, 1))]])
}

pub fn point_set(s: PointSet) -> Value {
    json!(s.names())
}

pub fn parse_point_set(v: &Value) -> Result<PointSet> {
    let items = v.as_array().ok_or_else(|| parse_err("a list of point names"))?;
    let mut s = PointSet::EMPTY;
    for item in items {
        let name = item.as_str().ok_or_else(|| parse_err("a point name"))?;
        let m = Marked::parse(name)?;
        if s.contains(m) {
            return Err(Error::Parse(format!("repeated point {name:?}")));
        }
        s = s.with(m);
    }
    Ok(s)
}

pub fn mask(m: ElemMask) -> Value {
    point_set(m.set())
}

pub fn parse_mask(v: &Value) -> Result<ElemMask> {
    ElemMask::new(parse_point_set(v)?)
}

fn per_point(values: impl Fn(Marked) -> Value) -> Value {
    let mut map = Map::new();
    for m in Marked::ALL {
        map.insert(m.name().to_string(), values(m));
    }
    Value::Object(map)
}

fn parse_per_point<T>(v: &Value, parse: impl Fn(&Value) -> Result<T>) -> Result<[T; 5]> {
    let obj = v.as_object().ok_or_else(|| parse_err("an object keyed by point names"))?;
    for key in obj.keys() {
        Marked::parse(key)?;
    }
    let items: Vec<T> = Marked::ALL.iter().map(|m| parse(field(v, m.name())?)).collect::<Result<_>>()?;
    Ok(items.try_into().unwrap_or_else(|_| unreachable!("five entries")))
}

pub fn sphere(s: &MarkedSphere) -> Value {
    json!({"lambda": rational(&s.lambda), "t": rational(&s.t)})
}

pub fn parse_sphere(v: &Value) -> Result<MarkedSphere> {
    MarkedSphere::new(parse_rational_value(field(v, "lambda")?)?, parse_rational_value(field(v, "t")?)?)
}

pub fn direction(d: &Direction) -> Value {
    json!([rational(&d.coords()[0]), rational(&d.coords()[1])])
}

pub fn parse_direction(v: &Value) -> Result<Direction> {
    match v.as_array().map(|a| a.as_slice()) {
        Some([a, b]) => Direction::new(parse_rational_value(a)?, parse_rational_value(b)?),
        _ => Err(parse_err("a direction [a, b]")),
    }
}

pub fn bundle(b: &ParabolicBundle) -> Value {
    json!({
        "lambda": rational(&b.sphere.lambda),
        "t": rational(&b.sphere.t),
        "d": b.d,
        "directions": per_point(|m| direction(b.dir(m))),
    })
}

pub fn parse_bundle(v: &Value) -> Result<ParabolicBundle> {
    let sph = parse_sphere(v)?;
    let d = field(v, "d")?.as_i64().ok_or_else(|| parse_err("an integer d"))?;
    let dirs = parse_per_point(field(v, "directions")?, parse_direction)?;
    ParabolicBundle::new(sph, d, dirs)
}

pub fn weights(mu: &WeightVector) -> Value {
    per_point(|m| rational(mu.get(m)))
}

pub fn parse_weights(v: &Value) -> Result<WeightVector> {
    WeightVector::new(parse_per_point(v, parse_rational_value)?)
}

pub fn eigenvalues(nu: &EigenvalueVector) -> Value {
    per_point(|m| rational(nu.get(m)))
}

pub fn parse_eigenvalues(v: &Value) -> Result<EigenvalueVector> {
    Ok(EigenvalueVector(parse_per_point(v, parse_rational_value)?))
}

pub fn higgs(th: &HiggsField) -> Value {
    json!({
        "bundle": bundle(&th.base),
        "alpha": poly(&th.alpha),
        "beta": poly(&th.beta),
        "gamma": poly(&th.gamma),
    })
}

pub fn parse_higgs(v: &Value) -> Result<HiggsField> {
    let b = parse_bundle(field(v, "bundle")?)?;
    make_higgs(
        &b,
        parse_poly(field(v, "alpha")?)?,
        parse_poly(field(v, "beta")?)?,
        parse_poly(field(v, "gamma")?)?,
    )
}

pub fn hitchin_point(s: &HitchinPoint) -> Value {
    json!({"h1": rational(&s.h1), "h2": rational(&s.h2)})
}

pub fn parse_hitchin_point(v: &Value) -> Result<HitchinPoint> {
    Ok(HitchinPoint::new(parse_rational_value(field(v, "h1")?)?, parse_rational_value(field(v, "h2")?)?))
}

pub fn fmat(m: &FMat2) -> Value {
    json!([
        [format_ratfunc(m.get(0, 0)), format_ratfunc(m.get(0, 1))],
        [format_ratfunc(m.get(1, 0)), format_ratfunc(m.get(1, 1))]
    ])
}

pub fn parse_fmat(v: &Value) -> Result<FMat2> {
    let row = |r: &Value| -> Result<[crate::arith::RatFunc; 2]> {
        match r.as_array().map(|a| a.as_slice()) {
            Some([a, b]) => {
                let p = |x: &Value| parse_ratfunc(x.as_str().ok_or_else(|| parse_err("a rational function string"))?);
                Ok([p(a)?, p(b)?])
            }
            _ => Err(parse_err("a 2x2 matrix")),
        }
    };
    match v.as_array().map(|a| a.as_slice()) {
        Some([r0, r1]) => {
            let [a, b] = row(r0)?;
            let [c, d] = row(r1)?;
            Ok(FMat2::new(a, b, c, d))
        }
        _ => Err(parse_err("a 2x2 matrix")),
    }
}

pub fn connection(c: &Connection) -> Value {
    json!({"bundle": bundle(&c.base), "A": fmat(&c.matrix), "nu": eigenvalues(&c.nu)})
}

pub fn parse_connection(v: &Value) -> Result<Connection> {
    crate::connections::make_connection(
        &parse_bundle(field(v, "bundle")?)?,
        parse_fmat(field(v, "A")?)?,
        parse_eigenvalues(field(v, "nu")?)?,
    )
}

pub fn subbundle(l: &Subbundle) -> Value {
    json!({"degree": l.degree, "a": poly(&l.a), "b": poly(&l.b), "incident": point_set(l.incident)})
}

pub fn stability(r: &StabilityReport) -> Value {
    json!({"class": r.class.name(), "value": rational(&r.value), "witness": subbundle(&r.witness)})
}

pub fn line(l: Line16) -> Value {
    json!({"kind": l.kind(), "subset": point_set(l.subset()), "index": l.index(), "label": l.to_string()})
}

pub fn table1_label(l: Table1Label) -> Value {
    let mut v = json!({"row": l.row(), "index": l.index(), "label": l.to_string()});
    match l {
        Table1Label::Row1(s) => v["pair"] = point_set(s),
        Table1Label::Row2(m) => v["point"] = json!(m.name()),
        Table1Label::Row3 => {}
    }
    v
}

pub fn stratum(s: &NilpotentStratum) -> Value {
    match s {
        NilpotentStratum::ZeroSection => json!({"tag": "ZeroSection"}),
        NilpotentStratum::Ni { line: l, c } => json!({"tag": "Ni", "line": line(*l), "c": rational(c)}),
        NilpotentStratum::Hodge(label) => json!({"tag": "Hodge", "label": table1_label(*label)}),
    }
}

pub fn fiber_class(c: &FiberClass) -> Value {
    match c {
        FiberClass::Smooth => json!({"tag": "Smooth"}),
        FiberClass::NodalHol(m) => json!({"tag": "NodalHol", "node": m.name()}),
        FiberClass::NodalApp(m) => json!({"tag": "NodalApp", "node": m.name()}),
        FiberClass::NodalBoth(m) => json!({"tag": "NodalBoth", "node": m.name()}),
        FiberClass::Nilpotent(s) => json!({"tag": "Nilpotent", "stratum": stratum(s)}),
    }
}

pub fn curve_status(s: &CurveStatus) -> Value {
    match s {
        CurveStatus::Smooth => json!({"tag": "Smooth", "genus": 2}),
        CurveStatus::Nodal(m) => json!({"tag": "Nodal", "node": m.name()}),
        CurveStatus::Cone => json!({"tag": "Cone"}),
    }
}

pub fn spectral_curve(c: &SpectralCurve) -> Value {
    json!({
        "s": hitchin_point(&c.s),
        "rho": point(&c.rho),
        "branch_points": c.branch_points.iter().map(point).collect::<Vec<_>>(),
        "normalization_branch": c.normalization_branch().iter().map(point).collect::<Vec<_>>(),
        "status": curve_status(&c.status),
    })
}

pub fn pi_mu_limit(l: &PiMuLimit) -> Value {
    match l {
        PiMuLimit::ZeroField(th) => json!({"tag": "ZeroField", "higgs": higgs(th)}),
        PiMuLimit::Family { field, mask: m } => json!({"tag": "Family", "higgs": higgs(field), "mask": mask(*m)}),
        PiMuLimit::Uncovered => json!({"tag": "Uncovered"}),
    }
}
