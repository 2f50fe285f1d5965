//! Model, state, grid and sampling-set readers.

use std::fs;
use std::path::Path;

use kramer_core::jacobi::{CoefficientRule, JacobiCoefficients, JacobiModel};
use kramer_core::pw::{PwConfig, PwGauge, PwModel};
use kramer_core::{ExtensionParameter, SamplingSet, StateVector, C64};
use serde::Deserialize;
use serde_json::Value;

use crate::Failure;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct JacobiFile {
    b: Option<Vec<f64>>,
    q: Option<Vec<f64>>,
    rule: Option<String>,
    n: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PwFile {
    a: f64,
    cutoff: Option<usize>,
    gauge: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Mode {
    k: i64,
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PwStateFile {
    a: f64,
    modes: Vec<Mode>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct JacobiStateFile {
    coeffs: Vec<[f64; 2]>,
}

/// A parsed model file; the PW variant is recognized by its `"a"` key.
#[derive(Debug, Clone)]
pub enum ModelSpec {
    Jacobi(JacobiCoefficients),
    Pw {
        a: f64,
        cutoff: Option<usize>,
        gauge: PwGauge,
    },
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn from_value<T: serde::de::DeserializeOwned>(v: Value, path: &Path) -> Result<T, Failure> {
    serde_json::from_value(v).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

pub fn read_model(path: &Path, n_flag: Option<usize>) -> Result<ModelSpec, Failure> {
    let v = read_json(path)?;
    let obj = v
        .as_object()
        .ok_or_else(|| Failure::input(format!("{}: expected a JSON object", path.display())))?;
    if obj.contains_key("a") {
        if ["b", "q", "rule"].iter().any(|k| obj.contains_key(*k)) {
            return Err(Failure::input(format!(
                "{}: both Jacobi and Paley-Wiener fields present",
                path.display()
            )));
        }
        let f: PwFile = from_value(v, path)?;
        let gauge = match f.gauge.as_deref() {
            None | Some("left") => PwGauge::Left,
            Some("centered") => PwGauge::Centered,
            Some(other) => return Err(Failure::input(format!("unknown gauge {other:?}"))),
        };
        PwConfig::new(f.a, 0)?;
        return Ok(ModelSpec::Pw {
            a: f.a,
            cutoff: f.cutoff,
            gauge,
        });
    }
    let f: JacobiFile = from_value(v, path)?;
    let coeffs = match (f.rule, f.b, f.q) {
        (Some(rule), None, None) => {
            let rule: CoefficientRule = rule.parse()?;
            let len = f.n.or(n_flag).ok_or_else(|| {
                Failure::input("a coefficient rule needs a length: set \"n\" or --n".into())
            })?;
            JacobiCoefficients::from_rule(rule, len)?
        }
        (None, Some(b), Some(q)) => JacobiCoefficients::new(b, q)?,
        _ => {
            return Err(Failure::input(format!(
                "{}: give either \"b\" and \"q\" or a \"rule\"",
                path.display()
            )))
        }
    };
    Ok(ModelSpec::Jacobi(coeffs))
}

/// Truncation order: `--n` if given, else every coefficient.
pub fn jacobi_model(c: &JacobiCoefficients, n_flag: Option<usize>) -> Result<JacobiModel, Failure> {
    Ok(JacobiModel::new(c.clone(), n_flag.unwrap_or(c.len()))?)
}

/// A PW state before it is bound to a cutoff.
pub struct PwState {
    pub a: f64,
    pub modes: Vec<(i64, C64)>,
}

impl PwState {
    pub fn max_mode(&self) -> usize {
        self.modes.iter().map(|(k, _)| k.unsigned_abs() as usize).max().unwrap_or(0)
    }
}

pub fn read_pw_state(path: &Path) -> Result<PwState, Failure> {
    let f: PwStateFile = from_value(read_json(path)?, path)?;
    Ok(PwState {
        a: f.a,
        modes: f.modes.iter().map(|m| (m.k, C64::new(m.re, m.im))).collect(),
    })
}

pub fn read_jacobi_state(path: &Path, model: &JacobiModel) -> Result<StateVector, Failure> {
    let f: JacobiStateFile = from_value(read_json(path)?, path)?;
    let coeffs: Vec<C64> = f.coeffs.iter().map(|p| C64::new(p[0], p[1])).collect();
    if coeffs.len() != model.order() {
        return Err(Failure::input(format!(
            "state has {} coefficients but the model order is {}",
            coeffs.len(),
            model.order()
        )));
    }
    Ok(StateVector::new(coeffs, kramer_core::SamplingModel::basis(model))?)
}

pub fn pw_model(a: f64, cutoff: usize, gauge: PwGauge, window: usize) -> Result<PwModel, Failure> {
    Ok(PwModel::new(PwConfig::new(a, cutoff)?.with_gauge(gauge), window))
}

/// `lo:hi:n[,imag]`: `n` evenly spaced real parts from `lo` to `hi`.
pub fn parse_grid(spec: &str) -> Result<Vec<C64>, Failure> {
    let bad = || Failure::input(format!("bad grid {spec:?}; expected lo:hi:n[,imag]"));
    let (range, imag) = match spec.split_once(',') {
        Some((r, i)) => (r, i.trim().parse::<f64>().map_err(|_| bad())?),
        None => (spec, 0.0),
    };
    let parts: Vec<&str> = range.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if n == 0 || !lo.is_finite() || !hi.is_finite() || !imag.is_finite() {
        return Err(bad());
    }
    Ok((0..n)
        .map(|i| {
            let t = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
            C64::new(lo + (hi - lo) * t, imag)
        })
        .collect())
}

/// Reads a `points` CSV back into a sampling set.
pub fn read_points(path: &Path, ext: ExtensionParameter) -> Result<SamplingSet, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    let mut points = Vec::new();
    let mut norms = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        let field = |j: usize| -> Result<f64, Failure> {
            cols.get(j)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| Failure::input(format!("{}:{}: malformed row", path.display(), i + 1)))
        };
        points.push(field(1)?);
        norms.push(field(2)?);
    }
    Ok(SamplingSet::new(points, norms, ext)?)
}
