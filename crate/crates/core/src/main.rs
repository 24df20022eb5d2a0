use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dmqubit::config::Config;
use dmqubit::critical::{critical_closed, critical_solve, CriticalCase, CriticalQuery};
use dmqubit::dynamics::{check_swap_equivalence, evolution_operator, BasisState};
use dmqubit::entanglement::{
    concurrence_general, concurrence_model, concurrence_numeric, register_models, select_formula, FormulaId,
};
use dmqubit::figures::{reproduce_figure, FigureOptions};
use dmqubit::hamiltonian::{check_preset, ModelParams, ModelPreset, Param};
use dmqubit::sweep::{fmt_float, run_sweep, Axis, OutputFormat, Quantity, SweepSpec};
use dmqubit::thermal::{density_matrix_analytic, density_matrix_numeric, Temperature};
use dmqubit::{Error, Result};

#[derive(Parser)]
#[command(name = "dmqubit", version, about = "Thermal entanglement of two-qubit XYZ models with DM coupling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Concurrence and λ's at one parameter point.
    Eval {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// One- or two-axis parameter sweep.
    Sweep {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// param:lo:hi:count, up to twice.
        #[arg(long = "sweep")]
        sweep: Vec<String>,
        /// concurrence | concurrence-model | zero-t-concurrence | critical
        #[arg(long)]
        quantity: Option<String>,
    },
    /// Closed-form critical value, optionally checked by bisection.
    Critical {
        #[command(flatten)]
        model: ModelArgs,
        /// Bisection bracket lo:hi for the case's free parameter.
        #[arg(long, allow_hyphen_values = true)]
        bracket: Option<String>,
    },
    /// Basis-state evolution and SWAP check at time t.
    Evolve {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        /// 00, 01, 10 or 11; all four when omitted.
        #[arg(long)]
        state: Option<String>,
    },
    /// Regenerate the data of a reference figure.
    Figure {
        /// Figure number, 1 to 9.
        n: u32,
        /// Directory that receives one CSV per panel.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Couplings for figures 8 and 9 (Jz < Jy < Jx < 0); --jz also sets figures 6 and 7.
        #[arg(long, allow_negative_numbers = true)]
        jx: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        jy: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        jz: Option<f64>,
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        reproducible: bool,
    },
    /// Randomised closed-form vs numeric checks.
    Selftest {
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

#[derive(Args, Clone, Default)]
struct ModelArgs {
    /// key = value file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Model preset whose constraints are enforced, e.g. pure-dm or xxz-dm-b.
    #[arg(long)]
    model: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    jx: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    jy: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    jz: Option<f64>,
    /// Sets Jx = Jy = J.
    #[arg(long = "J", allow_negative_numbers = true)]
    j: Option<f64>,
    /// Homogeneous field.
    #[arg(long = "B", allow_negative_numbers = true)]
    b_homog: Option<f64>,
    /// Inhomogeneous field.
    #[arg(long = "b", allow_negative_numbers = true)]
    b_inhomog: Option<f64>,
    /// DM coupling along z.
    #[arg(long = "D", allow_negative_numbers = true)]
    d: Option<f64>,
    /// Thermal energy; 0 selects the ground-state mixture where supported.
    #[arg(long = "kT")]
    kt: Option<f64>,
    /// Boltzmann constant (default 1).
    #[arg(long)]
    k: Option<f64>,
    /// Reduced Planck constant (default 1).
    #[arg(long)]
    hbar: Option<f64>,
    /// Registered closed form to use, e.g. xxz-dm-b.
    #[arg(long)]
    formula: Option<String>,
    /// Critical case, e.g. pure-dm-tc.
    #[arg(long)]
    critical: Option<String>,
}

#[derive(Args, Clone, Default)]
struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv | json
    #[arg(long)]
    format: Option<String>,
    /// Cross-check every value against an independent path; exit 2 on mismatch.
    #[arg(long)]
    verify: bool,
    /// Omit the timestamp so repeated runs are byte-identical.
    #[arg(long)]
    reproducible: bool,
}

/// Flags merged over an optional config file.
struct Resolved {
    cfg: Config,
    preset: Option<ModelPreset>,
    params: ModelParams,
    kt: Option<f64>,
    formula: Option<FormulaId>,
    critical: Option<CriticalCase>,
}

fn resolve(m: &ModelArgs) -> Result<Resolved> {
    let cfg = match &m.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let num = |flag: Option<f64>, key: &str| -> Result<Option<f64>> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => cfg.get_f64(key),
        }
    };
    let text = |flag: &Option<String>, key: &str| flag.clone().or_else(|| cfg.get(key).map(str::to_string));

    let mut p = ModelParams::default();
    if let Some(j) = num(m.j, "J")? {
        p.jx = j;
        p.jy = j;
    }
    let fields: [(Option<f64>, &str, Param); 8] = [
        (m.jx, "jx", Param::Jx),
        (m.jy, "jy", Param::Jy),
        (m.jz, "jz", Param::Jz),
        (m.b_homog, "B", Param::B),
        (m.b_inhomog, "b", Param::SmallB),
        (m.d, "D", Param::D),
        (m.k, "k", Param::K),
        (m.hbar, "hbar", Param::Hbar),
    ];
    for (flag, key, param) in fields {
        if let Some(v) = num(flag, key)? {
            p.set(param, v);
        }
    }
    if !p.is_finite() {
        return Err(Error::Usage("parameters must be finite".into()));
    }
    let kt = num(m.kt, "kT")?;
    if let Some(t) = kt {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::Usage(format!("kT must be finite and non-negative, got {t}")));
        }
    }
    Ok(Resolved {
        preset: text(&m.model, "model").map(|s| s.parse()).transpose()?,
        formula: text(&m.formula, "formula").map(|s| s.parse()).transpose()?,
        critical: text(&m.critical, "critical").map(|s| s.parse()).transpose()?,
        params: p,
        kt,
        cfg,
    })
}

fn output_settings(o: &OutputArgs, cfg: &Config) -> Result<(Option<PathBuf>, OutputFormat, bool, bool)> {
    let out = o.out.clone().or_else(|| cfg.get("out").map(PathBuf::from));
    let format = match o.format.clone().or_else(|| cfg.get("format").map(str::to_string)) {
        Some(f) => f.parse()?,
        None => OutputFormat::Csv,
    };
    let verify = o.verify || cfg.get_bool("verify")?.unwrap_or(false);
    let reproducible = o.reproducible || cfg.get_bool("reproducible")?.unwrap_or(false);
    Ok((out, format, verify, reproducible))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn cmd_eval(model: &ModelArgs, output: &OutputArgs) -> Result<()> {
    let r = resolve(model)?;
    let (out, format, verify, _) = output_settings(output, &r.cfg)?;
    let kt = r.kt.ok_or_else(|| Error::Usage("eval needs --kT".into()))?;
    if let Some(tag) = r.preset {
        if !check_preset(&r.params, tag) {
            return Err(Error::PresetMismatch(tag.name().into()));
        }
    }
    let numeric = if kt == 0.0 {
        concurrence_numeric(&dmqubit::thermal::ground_state_mixture(&r.params))?
    } else {
        let t = Temperature::from_thermal_energy(kt, r.params.k_boltz)?;
        concurrence_numeric(&density_matrix_numeric(&r.params, t)?)?
    };
    let general = if kt > 0.0 { Some(concurrence_general(&r.params, kt)?) } else { None };
    let model_report = match (r.formula, kt > 0.0) {
        (Some(id), true) => Some(concurrence_model(id, &r.params, kt)?),
        (None, true) => select_formula(&r.params, kt).map(|e| concurrence_model(e.id, &r.params, kt)).transpose()?,
        (_, false) => None,
    };
    if verify {
        for other in general.iter().chain(model_report.iter()) {
            if (other.value - numeric.value).abs() > dmqubit::sweep::VERIFY_TOL {
                return Err(Error::Verification(format!(
                    "{:?} gives {:.12e}, numeric {:.12e}",
                    other.source, other.value, numeric.value
                )));
            }
        }
    }
    let text = match format {
        OutputFormat::Json => {
            let doc = serde_json::json!({
                "params": r.params,
                "kT": kt,
                "numeric": numeric,
                "general": general,
                "model": model_report,
            });
            serde_json::to_string_pretty(&doc).expect("plain values serialize") + "\n"
        }
        OutputFormat::Csv => {
            let mut s = String::from("source,concurrence,lambda1,lambda2,lambda3,lambda4\n");
            let mut line = |name: String, rep: &dmqubit::entanglement::ConcurrenceReport| {
                let l: Vec<String> = rep.lambdas.iter().map(|x| fmt_float(*x)).collect();
                s.push_str(&format!("{name},{},{}\n", fmt_float(rep.value), l.join(",")));
            };
            line("numeric".into(), &numeric);
            if let Some(g) = &general {
                line("general".into(), g);
            }
            if let Some(m) = &model_report {
                let name = match m.source {
                    dmqubit::entanglement::ConcurrenceSource::ModelFormula(id) => id.to_string(),
                    _ => "model".into(),
                };
                line(name, m);
            }
            s
        }
    };
    emit(&text, out.as_deref())
}

fn cmd_sweep(model: &ModelArgs, output: &OutputArgs, sweep: &[String], quantity: &Option<String>) -> Result<()> {
    let r = resolve(model)?;
    let (out, format, verify, reproducible) = output_settings(output, &r.cfg)?;
    let axis_text: Vec<String> =
        if sweep.is_empty() { r.cfg.get_all("sweep").into_iter().map(str::to_string).collect() } else { sweep.to_vec() };
    if axis_text.is_empty() || axis_text.len() > 2 {
        return Err(Error::Usage("give --sweep once or twice".into()));
    }
    let axes = axis_text.iter().map(|s| s.parse::<Axis>()).collect::<Result<Vec<_>>>()?;
    let quantity: Quantity = match quantity.clone().or_else(|| r.cfg.get("quantity").map(str::to_string)) {
        Some(q) => q.parse()?,
        None => Quantity::ConcurrenceNumeric,
    };
    let spec = SweepSpec {
        preset: r.preset,
        params: r.params,
        kt: r.kt,
        axes,
        quantity,
        formula: r.formula,
        critical: r.critical,
    };
    let result = run_sweep(&spec, verify)?;
    let text = match format {
        OutputFormat::Csv => result.to_csv(reproducible),
        OutputFormat::Json => result.to_json(reproducible),
    };
    emit(&text, out.as_deref())
}

/// Allowed gap between a closed-form critical value and its bisection.
const CRITICAL_AGREEMENT_TOL: f64 = 1e-5;

fn cmd_critical(model: &ModelArgs, bracket: &Option<String>) -> Result<()> {
    let r = resolve(model)?;
    let case = r.critical.ok_or_else(|| Error::Usage("critical needs --critical <case>".into()))?;
    let closed = critical_closed(case, &r.params, r.kt)?;
    println!("case={case}");
    println!("closed={}", fmt_float(closed));
    let bracket = bracket.clone().or_else(|| r.cfg.get("bracket").map(str::to_string));
    if let Some(b) = bracket {
        let (lo, hi) = b
            .split_once(':')
            .and_then(|(a, b)| Some((a.trim().parse::<f64>().ok()?, b.trim().parse::<f64>().ok()?)))
            .ok_or_else(|| Error::Usage(format!("bracket `{b}` must be lo:hi")))?;
        let q = CriticalQuery { preset: case.preset(), free: case.free(), params: r.params, kt: r.kt.unwrap_or(0.0), bracket: (lo, hi) };
        let mut solved = critical_solve(&q)?;
        if case.free() == Param::KT {
            solved /= r.params.k_boltz;
        }
        let diff = (solved - closed).abs();
        println!("bisection={}", fmt_float(solved));
        println!("difference={}", fmt_float(diff));
        if diff > CRITICAL_AGREEMENT_TOL {
            return Err(Error::Verification(format!("closed form and bisection differ by {diff:.3e}")));
        }
    }
    Ok(())
}

fn cmd_evolve(model: &ModelArgs, t: f64, state: &Option<String>) -> Result<()> {
    let r = resolve(model)?;
    let u = evolution_operator(&r.params, t)?;
    let states: Vec<BasisState> = match state {
        Some(s) => vec![s.parse()?],
        None => BasisState::ALL.to_vec(),
    };
    for s in states {
        let v = u.apply(&s.vector());
        let parts: Vec<String> = v
            .iter()
            .map(|z| {
                let sign = if z.im.is_sign_negative() { "" } else { "+" };
                format!("{}{sign}{}i", fmt_float(z.re), fmt_float(z.im))
            })
            .collect();
        println!("U|{:02b}> = [{}]", s.index(), parts.join(", "));
    }
    let g = check_swap_equivalence(&r.params, t)?;
    println!("swap_equivalent={}", g.verdict);
    println!("max_deviation={}", fmt_float(g.max_deviation));
    let ph: Vec<String> = g.phase_profile.iter().map(|x| fmt_float(*x)).collect();
    println!("phases={}", ph.join(","));
    Ok(())
}

fn selftest(samples: usize, seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_rho: f64 = 0.0;
    let mut worst_c: f64 = 0.0;
    let mut worst_model: f64 = 0.0;
    for _ in 0..samples {
        let mut u = || rng.gen_range(-5.0..5.0);
        let p = ModelParams::new(u(), u(), u(), u(), u(), u());
        let kt = rng.gen_range(0.05..10.0);
        let t = Temperature::new(kt)?;
        let a = density_matrix_analytic(&p, t)?;
        let n = density_matrix_numeric(&p, t)?;
        worst_rho = worst_rho.max((*a.matrix() - *n.matrix()).norm_inf());
        let cn = concurrence_numeric(&n)?.value;
        worst_c = worst_c.max((concurrence_general(&p, kt)?.value - cn).abs());
    }
    // each registry entry on a few points of its own preset
    let mut per_entry = Vec::new();
    for e in register_models() {
        let mut hits = 0;
        let mut worst: f64 = 0.0;
        for _ in 0..20_000 {
            if hits == 20 {
                break;
            }
            let mut u = || rng.gen_range(-3.0..3.0);
            let p = e.preset.project(&ModelParams::new(u(), u(), u(), u(), u(), u()));
            let kt = rng.gen_range(0.05..5.0);
            if !(check_preset(&p, e.preset) && e.is_valid(&p, kt)) {
                continue;
            }
            hits += 1;
            let t = Temperature::new(kt)?;
            let cn = concurrence_numeric(&density_matrix_numeric(&p, t)?)?.value;
            worst = worst.max((e.evaluate(&p, kt) - cn).abs());
        }
        worst_model = worst_model.max(worst);
        per_entry.push((e.id, hits, worst));
    }
    println!("samples={samples} seed={seed}");
    println!("max |rho_analytic - rho_numeric| = {worst_rho:.3e}");
    println!("max |C_general - C_numeric|      = {worst_c:.3e}");
    println!("max |C_model - C_numeric|        = {worst_model:.3e}");
    for (id, hits, worst) in per_entry {
        println!("  {:<28} points={hits:<3} max error {worst:.3e}", id.name());
    }
    if worst_rho > 1e-10 || worst_c > 1e-9 || worst_model > 1e-9 {
        return Err(Error::Verification("oracle battery exceeded tolerance".into()));
    }
    println!("selftest passed");
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Eval { model, output } => cmd_eval(&model, &output),
        Command::Sweep { model, output, sweep, quantity } => cmd_sweep(&model, &output, &sweep, &quantity),
        Command::Critical { model, bracket } => cmd_critical(&model, &bracket),
        Command::Evolve { model, t, state } => cmd_evolve(&model, t, &state),
        Command::Figure { n, out, jx, jy, jz, verify, reproducible } => {
            let opts = FigureOptions { jx, jy, jz, verify, reproducible };
            for (path, result) in reproduce_figure(n, &out, &opts)? {
                println!("{} ({} rows)", path.display(), result.rows.len());
            }
            Ok(())
        }
        Command::Selftest { samples, seed } => selftest(samples, seed),
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Verification(_) => 2,
        Error::Io(_) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_error_kind() {
        assert_eq!(exit_code(&Error::Verification("x".into())), 2);
        assert_eq!(exit_code(&Error::Io(std::io::Error::other("x"))), 3);
        assert_eq!(exit_code(&Error::Usage("x".into())), 1);
        assert_eq!(exit_code(&Error::ZeroTemperature), 1);
    }
}
