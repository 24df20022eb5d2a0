//! Presets that regenerate the data behind the reference plots, one CSV per curve.

use std::path::{Path, PathBuf};

use crate::critical::CriticalCase;
use crate::error::{Error, Result};
use crate::hamiltonian::{ModelParams, ModelPreset, Param};
use crate::sweep::{run_sweep, Axis, OutputFormat, Quantity, SweepResult, SweepSpec};

/// Inputs some figures need that have no fixed default.
#[derive(Clone, Copy, Debug, Default)]
pub struct FigureOptions {
    /// Jz for figures 6 and 7.
    pub jz: Option<f64>,
    /// Couplings for figures 8 and 9; must satisfy Jz < Jy < Jx < 0.
    pub jx: Option<f64>,
    pub jy: Option<f64>,
    pub verify: bool,
    pub reproducible: bool,
}

pub struct Panel {
    pub name: String,
    pub spec: SweepSpec,
}

fn axis(p: Param, lo: f64, hi: f64, n: usize) -> Axis {
    Axis::new(p, lo, hi, n).expect("preset axes are valid")
}

fn numeric(preset: ModelPreset, params: ModelParams, kt: Option<f64>, axes: Vec<Axis>) -> SweepSpec {
    SweepSpec { preset: Some(preset), params, kt, axes, quantity: Quantity::ConcurrenceNumeric, formula: None, critical: None }
}

fn transverse_dc(params: ModelParams, axes: Vec<Axis>) -> SweepSpec {
    SweepSpec {
        preset: Some(ModelPreset::TransverseIsingDM),
        params,
        kt: None,
        axes,
        quantity: Quantity::CriticalCurve,
        formula: None,
        critical: Some(CriticalCase::TransverseIsingCoupling),
    }
}

fn required(v: Option<f64>, flag: &str, n: u32) -> Result<f64> {
    v.ok_or_else(|| Error::Usage(format!("figure {n} needs --{flag}; it has no default")))
}

/// The sweep specifications behind figure `n`.
pub fn figure_panels(n: u32, opts: &FigureOptions) -> Result<Vec<Panel>> {
    let temps = [0.1, 0.5, 1.0];
    let panel = |name: String, spec| Panel { name, spec };
    let panels = match n {
        1 => vec![panel(
            "fig1".into(),
            numeric(ModelPreset::PureDM, ModelParams::pure_dm(1.0), None, vec![axis(Param::KT, 0.01, 3.0, 300)]),
        )],
        2 => [0.05, 0.5, 0.7, 1.0]
            .iter()
            .map(|&b| {
                panel(
                    format!("fig2_B{b}"),
                    transverse_dc(ModelParams::transverse_ising(1.0, b, 0.0), vec![axis(Param::KT, 0.01, 2.0, 200)]),
                )
            })
            .collect(),
        3 => vec![panel(
            "fig3".into(),
            transverse_dc(
                ModelParams::transverse_ising(1.0, 0.0, 0.0),
                vec![axis(Param::B, 0.05, 2.0, 40), axis(Param::KT, 0.02, 2.0, 40)],
            ),
        )],
        4 => [0.01, 0.5, 1.0]
            .iter()
            .map(|&t| {
                panel(
                    format!("fig4_T{t}"),
                    numeric(
                        ModelPreset::TransverseIsingDM,
                        ModelParams::transverse_ising(1.0, 1.0, 0.0),
                        Some(t),
                        vec![axis(Param::D, 0.0, 2.0, 201)],
                    ),
                )
            })
            .collect(),
        5 => [("a", 0.1), ("b", 1.118), ("c", 1.19), ("d", 3.0)]
            .iter()
            .map(|&(tag, d)| {
                panel(
                    format!("fig5{tag}"),
                    numeric(
                        ModelPreset::XXZDMB,
                        ModelParams::xxz(1.0, 0.5, d, 2.0),
                        None,
                        vec![axis(Param::KT, 0.005, 3.0, 300)],
                    ),
                )
            })
            .collect(),
        6 | 7 => {
            let jz = required(opts.jz, "jz", n)?;
            let d = if n == 6 { 0.0 } else { 2.0 };
            temps
                .iter()
                .map(|&t| {
                    panel(
                        format!("fig{n}_T{t}"),
                        numeric(
                            ModelPreset::XXZDMB,
                            ModelParams::xxz(1.0, jz, d, 0.0),
                            Some(t),
                            vec![axis(Param::B, 0.0, 4.0, 201)],
                        ),
                    )
                })
                .collect()
        }
        8 | 9 => {
            let jx = required(opts.jx, "jx", n)?;
            let jy = required(opts.jy, "jy", n)?;
            let jz = required(opts.jz, "jz", n)?;
            if !(jz < jy && jy < jx && jx < 0.0) {
                return Err(Error::Usage(format!("figure {n} needs Jz < Jy < Jx < 0")));
            }
            let p = ModelParams::new(jx, jy, jz, 0.0, 0.0, 0.0);
            if n == 8 {
                temps
                    .iter()
                    .map(|&t| {
                        panel(
                            format!("fig8_T{t}"),
                            numeric(ModelPreset::XYZDM, p, Some(t), vec![axis(Param::D, 0.0, 3.0, 301)]),
                        )
                    })
                    .collect()
            } else {
                vec![panel(
                    "fig9".into(),
                    numeric(ModelPreset::XYZDM, p, None, vec![axis(Param::D, 0.0, 3.0, 61), axis(Param::KT, 0.02, 1.5, 60)]),
                )]
            }
        }
        other => return Err(Error::Usage(format!("figure must be 1..9, got {other}"))),
    };
    Ok(panels)
}

/// Runs every panel of figure `n` and writes `<name>.csv` under `out_dir`.
pub fn reproduce_figure(n: u32, out_dir: &Path, opts: &FigureOptions) -> Result<Vec<(PathBuf, SweepResult)>> {
    let panels = figure_panels(n, opts)?;
    std::fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    for Panel { name, spec } in panels {
        let result = run_sweep(&spec, opts.verify)?;
        let path = out_dir.join(format!("{name}.csv"));
        result.write(&path, OutputFormat::Csv, opts.reproducible)?;
        written.push((path, result));
    }
    Ok(written)
}

/// First zero of a sampled curve, by linear interpolation into the first
/// interval where the value drops to zero.
pub fn first_zero_crossing(xs: &[f64], ys: &[f64]) -> Option<f64> {
    xs.windows(2).zip(ys.windows(2)).find_map(|(x, y)| {
        if y[0] > 0.0 && y[1] <= 0.0 {
            Some(x[0] + (x[1] - x[0]) * y[0] / (y[0] - y[1]))
        } else {
            None
        }
    })
}
