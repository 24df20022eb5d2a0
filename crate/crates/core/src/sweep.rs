//! Parameter grids, evaluated in parallel and written as CSV or JSON.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::critical::{critical_closed, critical_solve, concurrence_at, zero_t_concurrence, CriticalCase, CriticalQuery};
use crate::entanglement::{concurrence_general, concurrence_model, select_formula, FormulaId};
use crate::error::{Error, Result};
use crate::hamiltonian::{check_preset, ModelParams, ModelPreset, Param};

/// Closed-form rows must agree with the numeric path to this under --verify.
pub const VERIFY_TOL: f64 = 1e-8;

pub const TOOL_VERSION: &str = concat!("dmqubit ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Axis {
    pub param: Param,
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(param: Param, lo: f64, hi: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::Usage(format!("axis {param}: count must be at least 2")));
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Usage(format!("axis {param}: need finite lo < hi")));
        }
        if matches!(param, Param::K | Param::Hbar) {
            return Err(Error::Usage(format!("axis {param} cannot be swept")));
        }
        Ok(Axis { param, lo, hi, count })
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.count - 1;
        (0..self.count)
            .map(|i| if i == n { self.hi } else { self.lo + (self.hi - self.lo) * i as f64 / n as f64 })
            .collect()
    }
}

impl FromStr for Axis {
    type Err = Error;
    /// `param:lo:hi:count`
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 {
            return Err(Error::Usage(format!("sweep `{s}` must look like param:lo:hi:count")));
        }
        let num = |x: &str| x.trim().parse::<f64>().map_err(|_| Error::Usage(format!("bad number `{x}` in `{s}`")));
        let count = parts[3].trim().parse::<usize>().map_err(|_| Error::Usage(format!("bad count in `{s}`")))?;
        Axis::new(parts[0].trim().parse()?, num(parts[1])?, num(parts[2])?, count)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Quantity {
    ConcurrenceNumeric,
    ConcurrenceModel,
    ZeroTConcurrence,
    CriticalCurve,
}

impl Quantity {
    pub fn name(&self) -> &'static str {
        match self {
            Quantity::ConcurrenceNumeric => "concurrence",
            Quantity::ConcurrenceModel => "concurrence-model",
            Quantity::ZeroTConcurrence => "zero-t-concurrence",
            Quantity::CriticalCurve => "critical",
        }
    }
}

impl FromStr for Quantity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().replace('_', "-").to_lowercase().as_str() {
            "concurrence" | "concurrence-numeric" | "c" => Quantity::ConcurrenceNumeric,
            "concurrence-model" | "model" => Quantity::ConcurrenceModel,
            "zero-t-concurrence" | "zero-t" => Quantity::ZeroTConcurrence,
            "critical" | "critical-curve" => Quantity::CriticalCurve,
            _ => return Err(Error::Usage(format!("unknown quantity `{s}`"))),
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepSpec {
    pub preset: Option<ModelPreset>,
    pub params: ModelParams,
    /// Fixed thermal energy; required unless kT is swept or the quantity is T-independent.
    pub kt: Option<f64>,
    pub axes: Vec<Axis>,
    pub quantity: Quantity,
    pub formula: Option<FormulaId>,
    pub critical: Option<CriticalCase>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::Usage("a sweep needs one or two axes".into()));
        }
        if self.axes.len() == 2 && self.axes[0].param == self.axes[1].param {
            return Err(Error::Usage("the two axes must sweep different parameters".into()));
        }
        let sweeps_kt = self.axes.iter().any(|a| a.param == Param::KT);
        let needs_kt = match self.quantity {
            Quantity::ConcurrenceNumeric | Quantity::ConcurrenceModel => true,
            Quantity::ZeroTConcurrence => false,
            Quantity::CriticalCurve => self.critical.map(|c| c.needs_temperature()).unwrap_or(false),
        };
        if needs_kt && !sweeps_kt && self.kt.is_none() {
            return Err(Error::Usage("kT must be given or swept".into()));
        }
        if self.quantity == Quantity::CriticalCurve && self.critical.is_none() {
            return Err(Error::Usage("quantity `critical` needs --critical".into()));
        }
        Ok(())
    }

    fn point(&self, coords: &[f64]) -> (ModelParams, Option<f64>) {
        let mut p = self.params;
        let mut kt = self.kt;
        for (a, &x) in self.axes.iter().zip(coords) {
            if a.param == Param::KT {
                kt = Some(x);
            } else {
                p.set(a.param, x);
            }
        }
        (p, kt)
    }

    fn grid(&self) -> Vec<Vec<f64>> {
        let first = self.axes[0].values();
        match self.axes.get(1) {
            None => first.into_iter().map(|x| vec![x]).collect(),
            Some(second) => {
                let second = second.values();
                first.iter().flat_map(|&x| second.iter().map(move |&y| vec![x, y])).collect()
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub coords: Vec<f64>,
    pub value: f64,
    pub flag: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepResult {
    pub header: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
}

/// Short tag written into the `flag` column.
fn error_tag(e: &Error) -> String {
    match e {
        Error::PresetMismatch(_) => "preset-mismatch".into(),
        Error::BranchInvalid { .. } => "branch-invalid".into(),
        Error::ZeroTemperature => "zero-temperature".into(),
        Error::InvalidTemperature(_) => "invalid-temperature".into(),
        Error::NoRoot(_) => "no-root".into(),
        Error::NoClosedForm(_) => "no-closed-form".into(),
        Error::NonFiniteResult => "non-finite".into(),
        other => format!("error: {other}").replace(',', ";"),
    }
}

fn kt_or_err(kt: Option<f64>) -> Result<f64> {
    kt.ok_or_else(|| Error::Usage("kT missing".into()))
}

fn evaluate(spec: &SweepSpec, p: &ModelParams, kt: Option<f64>) -> Result<f64> {
    if let Some(tag) = spec.preset {
        if !check_preset(p, tag) {
            return Err(Error::PresetMismatch(tag.name().into()));
        }
    }
    let v = match spec.quantity {
        Quantity::ConcurrenceNumeric => concurrence_at(p, kt_or_err(kt)?)?,
        Quantity::ConcurrenceModel => {
            let kt = kt_or_err(kt)?;
            let id = match spec.formula {
                Some(id) => id,
                None => select_formula(p, kt).map(|e| e.id).ok_or_else(|| Error::BranchInvalid {
                    formula: "auto".into(),
                    reason: "no registered formula applies".into(),
                })?,
            };
            concurrence_model(id, p, kt)?.value
        }
        Quantity::ZeroTConcurrence => zero_t_concurrence(p)?,
        Quantity::CriticalCurve => {
            let case = spec.critical.ok_or_else(|| Error::Usage("missing critical case".into()))?;
            critical_closed(case, p, kt)?
        }
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteResult)
    }
}

/// Independent recomputation of a row, or None if the quantity has no
/// second path.
fn reference_value(spec: &SweepSpec, p: &ModelParams, kt: Option<f64>, value: f64) -> Result<Option<f64>> {
    match spec.quantity {
        Quantity::ConcurrenceNumeric => match kt {
            Some(t) if t > 0.0 => Ok(Some(concurrence_general(p, t)?.value)),
            _ => Ok(None),
        },
        Quantity::ConcurrenceModel => Ok(Some(concurrence_at(p, kt_or_err(kt)?)?)),
        Quantity::ZeroTConcurrence => Ok(None),
        Quantity::CriticalCurve => {
            let case = spec.critical.expect("validated");
            // only onset-type cases are roots of the concurrence itself
            let onset = matches!(
                case,
                CriticalCase::PureDMTemperature
                    | CriticalCase::XXDMTemperature
                    | CriticalCase::XXXTemperature
                    | CriticalCase::IsingDMAntiferroCoupling
                    | CriticalCase::IsingDMFerroCoupling
                    | CriticalCase::XXXDMCoupling
                    | CriticalCase::NuclearSpinCoupling
            );
            if !onset || value <= 0.0 {
                return Ok(None);
            }
            let q = CriticalQuery {
                preset: case.preset(),
                free: case.free(),
                params: *p,
                kt: kt.unwrap_or(0.0),
                bracket: (0.5 * value, 1.5 * value),
            };
            let x = critical_solve(&q)?;
            Ok(Some(if case.free() == Param::KT { x / p.k_boltz } else { x }))
        }
    }
}

pub fn run_sweep(spec: &SweepSpec, verify: bool) -> Result<SweepResult> {
    spec.validate()?;
    let grid = spec.grid();
    let results: Vec<(Row, Option<String>)> = grid
        .into_par_iter()
        .map(|coords| {
            let (p, kt) = spec.point(&coords);
            let (value, flag) = match evaluate(spec, &p, kt) {
                Ok(v) => (v, None),
                Err(e) => (f64::NAN, Some(error_tag(&e))),
            };
            let mismatch = if verify && flag.is_none() {
                match reference_value(spec, &p, kt, value) {
                    Ok(Some(r)) if (r - value).abs() > VERIFY_TOL => {
                        Some(format!("{coords:?}: value {value:.12e} vs reference {r:.12e}"))
                    }
                    Ok(_) => None,
                    Err(e) => Some(format!("{coords:?}: reference failed: {e}")),
                }
            } else {
                None
            };
            (Row { coords, value, flag }, mismatch)
        })
        .collect();

    if let Some(m) = results.iter().find_map(|(_, m)| m.clone()) {
        return Err(Error::Verification(m));
    }
    let rows = results.into_iter().map(|(r, _)| r).collect();

    let mut columns: Vec<String> = spec.axes.iter().map(|a| a.param.name().to_string()).collect();
    columns.push(spec.quantity.name().into());
    columns.push("flag".into());
    Ok(SweepResult { header: header(spec, verify), columns, rows })
}

fn header(spec: &SweepSpec, verify: bool) -> Vec<(String, String)> {
    let mut h = vec![
        ("tool".to_string(), TOOL_VERSION.to_string()),
        ("model".to_string(), spec.preset.map(|p| p.name().to_string()).unwrap_or_else(|| "general".into())),
        ("quantity".to_string(), spec.quantity.name().to_string()),
    ];
    if let Some(f) = spec.formula {
        h.push(("formula".into(), f.name().into()));
    }
    if let Some(c) = spec.critical {
        h.push(("critical".into(), c.name().into()));
    }
    let swept: Vec<Param> = spec.axes.iter().map(|a| a.param).collect();
    let p = &spec.params;
    let fixed = [
        (Param::Jx, p.jx),
        (Param::Jy, p.jy),
        (Param::Jz, p.jz),
        (Param::B, p.b_homog),
        (Param::SmallB, p.b_inhomog),
        (Param::D, p.d),
        (Param::K, p.k_boltz),
        (Param::Hbar, p.hbar),
    ];
    for (param, v) in fixed {
        let swept_here = swept.contains(&param) || (swept.contains(&Param::J) && matches!(param, Param::Jx | Param::Jy));
        if !swept_here {
            h.push((param.name().into(), fmt_float(v)));
        }
    }
    if let (Some(kt), false) = (spec.kt, swept.contains(&Param::KT)) {
        h.push(("kT".into(), fmt_float(kt)));
    }
    for a in &spec.axes {
        h.push((format!("sweep.{}", a.param), format!("{}:{}:{}", fmt_float(a.lo), fmt_float(a.hi), a.count)));
    }
    h.push(("verified".into(), verify.to_string()));
    h
}

/// 12 significant digits.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.11e}")
    }
}

fn unix_time() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

impl SweepResult {
    pub fn to_csv(&self, reproducible: bool) -> String {
        let mut s = String::new();
        for (k, v) in &self.header {
            let _ = writeln!(s, "# {k}={v}");
        }
        if !reproducible {
            let _ = writeln!(s, "# generated_unix={}", unix_time());
        }
        let _ = writeln!(s, "{}", self.columns.join(","));
        for r in &self.rows {
            for c in &r.coords {
                s.push_str(&fmt_float(*c));
                s.push(',');
            }
            s.push_str(&fmt_float(r.value));
            s.push(',');
            if let Some(f) = &r.flag {
                s.push_str(f);
            }
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self, reproducible: bool) -> String {
        let mut header: serde_json::Map<String, serde_json::Value> =
            self.header.iter().map(|(k, v)| (k.clone(), v.clone().into())).collect();
        if !reproducible {
            header.insert("generated_unix".into(), unix_time().into());
        }
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|r| {
                serde_json::json!({
                    "coords": r.coords,
                    "value": if r.value.is_finite() { serde_json::json!(r.value) } else { serde_json::Value::Null },
                    "flag": r.flag,
                })
            })
            .collect();
        let doc = serde_json::json!({ "header": header, "columns": self.columns, "rows": rows });
        serde_json::to_string_pretty(&doc).expect("plain values serialize") + "\n"
    }

    pub fn write(&self, path: &Path, format: OutputFormat, reproducible: bool) -> Result<()> {
        let text = match format {
            OutputFormat::Csv => self.to_csv(reproducible),
            OutputFormat::Json => self.to_json(reproducible),
        };
        let mut f = std::fs::File::create(path)?;
        f.write_all(text.as_bytes())?;
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.value).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Usage(format!("unknown format `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pure_dm_spec(count: usize) -> SweepSpec {
        SweepSpec {
            preset: Some(ModelPreset::PureDM),
            params: ModelParams::pure_dm(1.0),
            kt: None,
            axes: vec![Axis::new(Param::KT, 0.1, 3.0, count).unwrap()],
            quantity: Quantity::ConcurrenceNumeric,
            formula: None,
            critical: None,
        }
    }

    #[test]
    fn axis_parsing_and_values() {
        let a: Axis = "D:0:2:5".parse().unwrap();
        assert_eq!(a.param, Param::D);
        assert_eq!(a.values(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert!("D:2:0:5".parse::<Axis>().is_err());
        assert!("D:0:2:1".parse::<Axis>().is_err());
        assert!("D:0:2".parse::<Axis>().is_err());
    }

    #[test]
    fn two_points_give_two_rows() {
        let r = run_sweep(&pure_dm_spec(2), false).unwrap();
        assert_eq!(r.rows.len(), 2);
    }

    #[test]
    fn per_point_errors_are_flagged() {
        let mut spec = pure_dm_spec(3);
        spec.axes = vec![Axis::new(Param::Jz, -1.0, 1.0, 3).unwrap()];
        spec.kt = Some(1.0);
        let r = run_sweep(&spec, false).unwrap();
        assert_eq!(r.rows[0].flag.as_deref(), Some("preset-mismatch"));
        assert!(r.rows[0].value.is_nan());
        assert!(r.rows[1].flag.is_none());
    }

    #[test]
    fn csv_is_reproducible_and_well_formed() {
        let spec = pure_dm_spec(5);
        let a = run_sweep(&spec, true).unwrap().to_csv(true);
        let b = run_sweep(&spec, true).unwrap().to_csv(true);
        assert_eq!(a, b);
        assert!(!a.contains("generated_unix"));
        let data: Vec<&str> = a.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data[0], "kT,concurrence,flag");
        assert_eq!(data.len(), 6);
        assert!(run_sweep(&spec, false).unwrap().to_csv(false).contains("generated_unix"));
    }

    #[test]
    fn two_axis_long_format() {
        let mut spec = pure_dm_spec(2);
        spec.axes.push(Axis::new(Param::D, 0.5, 1.0, 3).unwrap());
        let r = run_sweep(&spec, false).unwrap();
        assert_eq!(r.rows.len(), 6);
        assert_eq!(r.rows[1].coords, vec![0.1, 0.75]);
        assert_eq!(r.columns, vec!["kT", "D", "concurrence", "flag"]);
    }
}
