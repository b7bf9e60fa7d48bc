//! Payload handling for each subcommand. Every command maps a JSON payload
//! to a JSON result.

use rayon::prelude::*;
use serde_json::{json, Value};

use higgs5::arith::rational::parse_rational;
use higgs5::arith::{ProjPoint, Rational};
use higgs5::bundles::{classify_stability, classify_table1, lines_through, MarkedSphere, WeightVector};
use higgs5::connections::{double_point_family, pi_mu_limit, triple_point_family, PiMuLimit};
use higgs5::elem::{elem_bundle, elem_higgs, weight_transform};
use higgs5::higgs::{higgs_det, higgs_space, higgs_stability, HiggsField, HitchinPoint};
use higgs5::hitchin::{
    classify_fiber_point, classify_nilpotent, cstar_limit_field, cstar_limit_infinity, spectral_curve, CurveStatus,
    NilpotentStratum,
};
use higgs5::json;
use higgs5::verify::{pencil_field_at, verify_paper, PencilPoint};
use higgs5::Error;

#[derive(Debug)]
pub enum Failure {
    /// Malformed input: bad JSON, schema violation, unknown command.
    Malformed(String),
    /// Well-formed input rejected by the mathematics.
    Domain(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Domain(_) => 1,
            Failure::Malformed(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Domain(m) | Failure::Malformed(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) => Failure::Malformed(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

pub type Outcome<T> = std::result::Result<T, Failure>;

/// Result of a command: a JSON value and diagnostics, or a failure
/// carrying its own result (used by `verify-paper`).
pub struct Answer {
    pub ok: bool,
    pub result: Value,
    pub diagnostics: Vec<String>,
}

impl Answer {
    fn ok(result: Value) -> Self {
        Answer { ok: true, result, diagnostics: Vec::new() }
    }
}

#[derive(Clone, Debug)]
pub struct Settings {
    pub seed: u64,
    pub samples: usize,
    pub grid: Option<String>,
}

fn field<'a>(v: &'a Value, key: &str) -> Outcome<&'a Value> {
    v.get(key).ok_or_else(|| Failure::Malformed(format!("missing field {key:?}")))
}

fn weights_or_central(v: &Value) -> Outcome<WeightVector> {
    match v.get("weights") {
        Some(w) => Ok(json::parse_weights(w)?),
        None => Ok(WeightVector::central()),
    }
}

fn rational_field(v: &Value, key: &str) -> Outcome<Rational> {
    Ok(json::parse_rational_value(field(v, key)?)?)
}

/// The sphere of a payload: `lambda`, `t` at the top level, defaulting to
/// `(2, 3)` when both are absent.
fn sphere_of(v: &Value) -> Outcome<MarkedSphere> {
    if v.get("lambda").is_none() && v.get("t").is_none() {
        return Ok(MarkedSphere::new(Rational::from_integer(2.into()), Rational::from_integer(3.into()))?);
    }
    Ok(json::parse_sphere(v)?)
}

/// A Higgs field given either under `"higgs"`, as the payload itself, or as
/// a point `(u, v, c1, c2)` of the normalized-chart pencil under `"pencil"`.
fn higgs_of(v: &Value) -> Outcome<HiggsField> {
    if let Some(h) = v.get("higgs") {
        return Ok(json::parse_higgs(h)?);
    }
    if let Some(p) = v.get("pencil") {
        let sph = json::parse_sphere(p)?;
        let point = PencilPoint {
            u: rational_field(p, "u")?,
            v: rational_field(p, "v")?,
            c1: rational_field(p, "c1")?,
            c2: rational_field(p, "c2")?,
        };
        return Ok(pencil_field_at(&sph, &point)?);
    }
    if v.get("bundle").is_some() && v.get("alpha").is_some() {
        return Ok(json::parse_higgs(v)?);
    }
    Err(Failure::Malformed("expected a Higgs field under \"higgs\" or \"pencil\"".into()))
}

fn bundle_of(v: &Value) -> Outcome<higgs5::bundles::ParabolicBundle> {
    match v.get("bundle") {
        Some(b) => Ok(json::parse_bundle(b)?),
        None => Ok(json::parse_bundle(v)?),
    }
}

fn stability(v: &Value) -> Outcome<Value> {
    let b = bundle_of(v)?;
    let mu = weights_or_central(v)?;
    let report = classify_stability(&b, &mu);
    let label = classify_table1(&b).map(json::table1_label);
    Ok(json!({"stability": json::stability(&report), "table1": label}))
}

fn curve_json(sph: &MarkedSphere, s: &HitchinPoint) -> Value {
    json::spectral_curve(&spectral_curve(sph, s))
}

fn higgs_det_cmd(v: &Value) -> Outcome<Value> {
    let th = higgs_of(v)?;
    let s = higgs_det(&th)?;
    Ok(json!({"h1": json::rational(&s.h1), "h2": json::rational(&s.h2), "curve": curve_json(&th.base.sphere, &s)}))
}

fn higgs_space_cmd(v: &Value) -> Outcome<Value> {
    let b = bundle_of(v)?;
    let basis = higgs_space(&b)?;
    Ok(json!({"dimension": basis.len(), "basis": basis.iter().map(json::higgs).collect::<Vec<_>>()}))
}

fn elem_cmd(v: &Value) -> Outcome<Value> {
    let mask = json::parse_mask(field(v, "mask")?)?;
    if let Some(c) = v.get("connection") {
        let c = json::parse_connection(c)?;
        let moved = higgs5::connections::elem_connection(&c, mask)?;
        return Ok(json!({"connection": json::connection(&moved), "mask": json::mask(mask)}));
    }
    if v.get("higgs").is_some() || v.get("pencil").is_some() {
        let th = higgs_of(v)?;
        let moved = elem_higgs(&th, mask)?;
        let mu = weight_transform(&weights_or_central(v)?, mask);
        let det = higgs_det(&moved)?;
        let stratum = if det.is_zero() { Some(json::stratum(&classify_nilpotent(&moved)?)) } else { None };
        return Ok(json!({
            "higgs": json::higgs(&moved),
            "mask": json::mask(mask),
            "weights": json::weights(&mu),
            "stability": higgs_stability(&moved, &mu)?.name(),
            "table1": classify_table1(&moved.base).map(json::table1_label),
            "hitchin": json::hitchin_point(&det),
            "stratum": stratum,
        }));
    }
    let b = bundle_of(v)?;
    let moved = elem_bundle(&b, mask)?.bundle;
    let mu = weight_transform(&weights_or_central(v)?, mask);
    Ok(json!({
        "bundle": json::bundle(&moved),
        "mask": json::mask(mask),
        "weights": json::weights(&mu),
        "stability": json::stability(&classify_stability(&moved, &mu)),
        "table1": classify_table1(&moved).map(json::table1_label),
    }))
}

fn lines_cmd(v: &Value) -> Outcome<Value> {
    let b = bundle_of(v)?;
    let lines = lines_through(&b)?;
    Ok(json!({"lines": lines.into_iter().map(json::line).collect::<Vec<_>>()}))
}

fn fiber_cmd(v: &Value) -> Outcome<Value> {
    if v.get("h1").is_some() {
        let sph = sphere_of(v)?;
        let s = json::parse_hitchin_point(v)?;
        return Ok(json!({"curve": curve_json(&sph, &s)}));
    }
    let th = higgs_of(v)?;
    let mu = weights_or_central(v)?;
    let s = higgs_det(&th)?;
    let class = classify_fiber_point(&th, &mu)?;
    Ok(json!({"hitchin": json::hitchin_point(&s), "curve": curve_json(&th.base.sphere, &s), "class": json::fiber_class(&class)}))
}

fn nilpotent_cmd(v: &Value) -> Outcome<Value> {
    let th = higgs_of(v)?;
    let stratum = classify_nilpotent(&th)?;
    let mut out = json!({"stratum": json::stratum(&stratum)});
    if let NilpotentStratum::Ni { .. } = stratum {
        out["limit"] = json!({
            "label": json::table1_label(cstar_limit_infinity(&th)?),
            "higgs": json::higgs(&cstar_limit_field(&th)?),
        });
    }
    Ok(out)
}

fn limit_cmd(v: &Value) -> Outcome<Value> {
    let mu = weights_or_central(v)?;
    let c = if let Some(c) = v.get("connection") {
        json::parse_connection(c)?
    } else {
        let fam = field(v, "family")?;
        let sph = sphere_of(fam)?;
        let nu = json::parse_eigenvalues(field(fam, "nu")?)?;
        let a1 = rational_field(fam, "a1")?;
        let a2 = rational_field(fam, "a2")?;
        match field(fam, "name")?.as_str() {
            Some("triple") => triple_point_family(&sph, &nu, &a1, &a2)?,
            Some("double") => double_point_family(&sph, &nu, &rational_field(fam, "u")?, &a1, &a2)?,
            _ => return Err(Failure::Malformed("family name must be \"triple\" or \"double\"".into())),
        }
    };
    let lim = pi_mu_limit(&c, &mu)?;
    let mut out = json::pi_mu_limit(&lim);
    let field = match &lim {
        PiMuLimit::ZeroField(f) | PiMuLimit::Family { field: f, .. } => Some(f),
        PiMuLimit::Uncovered => None,
    };
    if let Some(f) = field {
        out["stability"] = json!(higgs_stability(f, &mu)?.name());
        if higgs_det(f)?.is_zero() && !f.is_zero() {
            out["stratum"] = json::stratum(&classify_nilpotent(f)?);
        }
    }
    out["connection"] = json::connection(&c);
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Axis {
    pub min: Rational,
    pub max: Rational,
    pub steps: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<Rational> {
        match self.steps {
            0 => Vec::new(),
            1 => vec![self.min.clone()],
            n => {
                let step = (&self.max - &self.min) / Rational::from_integer((n as i64 - 1).into());
                (0..n).map(|i| &self.min + &step * Rational::from_integer((i as i64).into())).collect()
            }
        }
    }
}

/// Parses `h1min:h1max:steps,h2min:h2max:steps`.
pub fn parse_grid(s: &str) -> Outcome<[Axis; 2]> {
    let bad = || Failure::Malformed(format!("grid {s:?} is not h1min:h1max:steps,h2min:h2max:steps"));
    let axes: Vec<Axis> = s
        .split(',')
        .map(|part| {
            let f: Vec<&str> = part.trim().split(':').collect();
            let [lo, hi, n] = f.as_slice() else { return Err(bad()) };
            Ok(Axis { min: parse_rational(lo)?, max: parse_rational(hi)?, steps: n.parse().map_err(|_| bad())? })
        })
        .collect::<Outcome<_>>()?;
    let [a, b]: [Axis; 2] = axes.try_into().map_err(|_| bad())?;
    Ok([a, b])
}

pub struct SweepRow {
    pub h1: Rational,
    pub h2: Rational,
    pub rho: ProjPoint,
    pub status: CurveStatus,
}

fn status_name(s: &CurveStatus) -> &'static str {
    match s {
        CurveStatus::Smooth => "Smooth",
        CurveStatus::Nodal(_) => "Nodal",
        CurveStatus::Cone => "Cone",
    }
}

/// One row per grid point, `h1` outer and `h2` inner, computed in parallel.
pub fn sweep(sph: &MarkedSphere, grid: &[Axis; 2]) -> Outcome<Vec<SweepRow>> {
    let h1s = grid[0].values();
    let h2s = grid[1].values();
    if h1s.is_empty() || h2s.is_empty() {
        return Err(Failure::Domain("empty grid".into()));
    }
    let points: Vec<(Rational, Rational)> =
        h1s.iter().flat_map(|a| h2s.iter().map(move |b| (a.clone(), b.clone()))).collect();
    Ok(points
        .into_par_iter()
        .map(|(h1, h2)| {
            let c = spectral_curve(sph, &HitchinPoint::new(h1.clone(), h2.clone()));
            SweepRow { h1, h2, rho: c.rho, status: c.status }
        })
        .collect())
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("h1,h2,rho,status\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{}\n", json::rational(&r.h1).as_str().unwrap_or(""), json::rational(&r.h2).as_str().unwrap_or(""), r.rho, status_name(&r.status)));
    }
    out
}

fn sweep_setup(v: &Value, settings: &Settings) -> Outcome<(MarkedSphere, [Axis; 2])> {
    let sph = sphere_of(v)?;
    let grid = match v.get("grid").and_then(Value::as_str) {
        Some(g) => g.to_string(),
        None => settings.grid.clone().ok_or_else(|| Failure::Malformed("sweep needs --grid".into()))?,
    };
    Ok((sph, parse_grid(&grid)?))
}

/// Sweep rendered as CSV, for the `sweep` subcommand.
pub fn sweep_command(v: &Value, settings: &Settings) -> Outcome<String> {
    let (sph, grid) = sweep_setup(v, settings)?;
    Ok(sweep_csv(&sweep(&sph, &grid)?))
}

fn sweep_json(v: &Value, settings: &Settings) -> Outcome<Value> {
    let (sph, grid) = sweep_setup(v, settings)?;
    let rows: Vec<Value> = sweep(&sph, &grid)?
        .iter()
        .map(|r| {
            json!({"h1": json::rational(&r.h1), "h2": json::rational(&r.h2), "rho": json::point(&r.rho), "status": status_name(&r.status)})
        })
        .collect();
    Ok(json!({"rows": rows}))
}

fn verify_cmd(v: &Value, settings: &Settings) -> Outcome<Answer> {
    let sph = sphere_of(v)?;
    let seed = match v.get("seed") {
        Some(s) => s.as_u64().ok_or_else(|| Failure::Malformed("seed must be a non-negative integer".into()))?,
        None => settings.seed,
    };
    let samples = match v.get("samples") {
        Some(s) => s.as_u64().ok_or_else(|| Failure::Malformed("samples must be a non-negative integer".into()))? as usize,
        None => settings.samples,
    };
    let report = verify_paper(&sph, seed, samples);
    let diagnostics = report.checks.iter().filter(|c| !c.passed()).map(|c| format!("check {} failed", c.name)).collect();
    Ok(Answer { ok: report.passed(), result: report.to_json(), diagnostics })
}

/// Runs `command` on `payload`.
pub fn dispatch(command: &str, payload: &Value, settings: &Settings) -> Outcome<Answer> {
    let result = match command {
        "stability" => stability(payload)?,
        "higgs-det" => higgs_det_cmd(payload)?,
        "higgs-space" => higgs_space_cmd(payload)?,
        "elem" => elem_cmd(payload)?,
        "lines" => lines_cmd(payload)?,
        "fiber" => fiber_cmd(payload)?,
        "nilpotent" => nilpotent_cmd(payload)?,
        "limit" => limit_cmd(payload)?,
        "sweep" => sweep_json(payload, settings)?,
        "verify-paper" => return verify_cmd(payload, settings),
        other => return Err(Failure::Malformed(format!("unknown command {other:?}"))),
    };
    Ok(Answer::ok(result))
}

/// Splits a request `{"command": ..., "payload": ...}`.
pub fn parse_request(v: &Value) -> Outcome<(String, Value)> {
    let command = field(v, "command")?
        .as_str()
        .ok_or_else(|| Failure::Malformed("command must be a string".into()))?
        .to_string();
    let payload = v.get("payload").cloned().unwrap_or(json!({}));
    Ok((command, payload))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let [a, b] = parse_grid("-1:1:3,0:1/2:2").unwrap();
        assert_eq!(a.values(), vec![Rational::from_integer((-1).into()), Rational::from_integer(0.into()), Rational::from_integer(1.into())]);
        assert_eq!(b.values().len(), 2);
        assert!(matches!(parse_grid("1:2"), Err(Failure::Malformed(_))));
        assert!(matches!(parse_grid("1:2:x,1:2:3"), Err(Failure::Malformed(_))));
    }

    #[test]
    fn sweep_statuses() {
        let sph = MarkedSphere::new(Rational::from_integer(2.into()), Rational::from_integer(3.into())).unwrap();
        let rows = sweep(&sph, &parse_grid("-2:0:2,0:1:2").unwrap()).unwrap();
        let find = |h1: i64, h2: i64| {
            rows.iter()
                .find(|r| r.h1 == Rational::from_integer(h1.into()) && r.h2 == Rational::from_integer(h2.into()))
                .unwrap()
        };
        assert_eq!(status_name(&find(0, 0).status), "Cone");
        let r = find(-2, 1);
        assert_eq!(r.rho, ProjPoint::Finite(Rational::from_integer(2.into())));
        assert_eq!(status_name(&r.status), "Nodal");
        assert!(matches!(sweep(&sph, &parse_grid("0:1:0,0:1:2").unwrap()), Err(Failure::Domain(_))));
    }
}
