//! `eep`: evaluate, sample, simulate and fit the exponentiated exponential
//! Poisson distribution.
//!
//! Exit codes: 0 success, 1 numerical non-convergence, 2 usage or domain
//! error.

use clap::{Parser, Subcommand, ValueEnum};
use eep_core::distributions::{
    ee_cdf, ee_pdf, eep_cdf, eep_hazard, eep_pdf, eep_quantile, eep_sample, eep_survival,
};
use eep_core::fit::fit_eep;
use eep_core::moments::{eep_chf, eep_mgf, eep_moment, eep_moment_double_series, eep_moment_quadrature};
use eep_core::simulator::{ks_distance, sample_system_lifetimes, KsReport, SystemSpec};
use eep_core::{EeParams, EepParams, EvalResult};
use serde_json::{json, Value};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "eep", version, about = "Exponentiated exponential Poisson toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Dist {
    Eep,
    Ee,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Func {
    Pdf,
    Cdf,
    Survival,
    Hazard,
    Quantile,
    Chf,
    Mgf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Series,
    DoubleSeries,
    Quadrature,
    All,
}

#[derive(clap::Args)]
struct Params {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    beta: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    lambda: f64,
}

#[derive(clap::Args)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate pdf, cdf, survival, hazard or quantile on an x grid, or the
    /// CHF or MGF on a t grid.
    Eval {
        #[arg(long, value_enum, default_value_t = Dist::Eep)]
        dist: Dist,
        #[arg(long = "fn", value_enum)]
        func: Func,
        #[command(flatten)]
        params: Params,
        /// Comma-separated points; probabilities for the quantile.
        #[arg(long, alias = "u", value_delimiter = ',', allow_hyphen_values = true)]
        x: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        t: Vec<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Real-order moment E ξ^ν.
    Moment {
        #[command(flatten)]
        params: Params,
        #[arg(long, allow_hyphen_values = true)]
        nu: f64,
        #[arg(long, value_enum, default_value_t = Method::Series)]
        method: Method,
        #[arg(long, default_value_t = 2000)]
        m_max: usize,
        #[arg(long, default_value_t = 1_000_000)]
        k_max: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Draw EEP variates by inversion; CSV column `lifetime`.
    Sample {
        #[command(flatten)]
        params: Params,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        stream: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Simulate the series system of parallel blocks and KS-test it against
    /// the EEP CDF. `--alpha` is the integer number of units per block.
    Simulate {
        #[command(flatten)]
        params: Params,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the simulated lifetimes as CSV here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Maximum-likelihood fit to a single-column file of positive values.
    Fit {
        data: PathBuf,
        /// Starting point; all three must be given together.
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<f64>,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
}

impl From<eep_core::Error> for Failure {
    fn from(e: eep_core::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CmdResult = Result<bool, Failure>;

fn eep_params(p: &Params) -> Result<EepParams, Failure> {
    Ok(EepParams::new(p.alpha, p.beta, p.lambda)?)
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn emit(out: &Output, columns: &[&str], rows: &[Vec<Value>]) -> Result<(), Failure> {
    let text = match out.format {
        Format::Json => {
            let recs: Vec<Value> = rows
                .iter()
                .map(|r| Value::Object(columns.iter().map(|c| c.to_string()).zip(r.iter().cloned()).collect()))
                .collect();
            serde_json::to_string_pretty(&recs).expect("serializable") + "\n"
        }
        Format::Csv => {
            let mut s = columns.join(",") + "\n";
            for r in rows {
                let cells: Vec<String> = r
                    .iter()
                    .map(|v| match v {
                        Value::Number(n) => num(n.as_f64().unwrap_or(f64::NAN)),
                        Value::Null => String::new(),
                        Value::String(t) => t.clone(),
                        other => other.to_string(),
                    })
                    .collect();
                s += &(cells.join(",") + "\n");
            }
            s
        }
    };
    write_text(out.out.as_deref(), &text)
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes())
                .map_err(|e| Failure::Usage(format!("cannot write to standard output: {e}")))
        }
    }
}

/// JSON number, or null when not finite.
fn jnum(v: f64) -> Value {
    serde_json::Number::from_f64(v).map(Value::Number).unwrap_or(Value::Null)
}

fn cmd_eval(dist: Dist, func: Func, params: &Params, x: &[f64], t: &[f64], out: &Output) -> CmdResult {
    let uses_t = matches!(func, Func::Chf | Func::Mgf);
    let grid = if uses_t { t } else { x };
    if grid.is_empty() {
        return Err(Failure::Usage(format!("--{} is required for this function", if uses_t { "t" } else { "x" })));
    }
    if dist == Dist::Ee {
        let p = EeParams::new(params.alpha, params.beta)?;
        let f: fn(&EeParams, f64) -> f64 = match func {
            Func::Pdf => ee_pdf,
            Func::Cdf => ee_cdf,
            _ => return Err(Failure::Usage("--dist ee supports only pdf and cdf".into())),
        };
        let rows: Vec<Vec<Value>> = grid.iter().map(|&v| vec![jnum(v), jnum(f(&p, v))]).collect();
        emit(out, &["x", "value"], &rows)?;
        return Ok(true);
    }
    let p = eep_params(params)?;
    let mut all_converged = true;
    let mut rows = Vec::new();
    let columns: &[&str] = match func {
        Func::Pdf | Func::Cdf | Func::Survival => {
            let f = match func {
                Func::Pdf => eep_pdf,
                Func::Cdf => eep_cdf,
                _ => eep_survival,
            };
            for &v in grid {
                rows.push(vec![jnum(v), jnum(f(&p, v))]);
            }
            &["x", "value"]
        }
        Func::Hazard => {
            for &v in grid {
                let h = eep_hazard(&p, v)?;
                rows.push(vec![jnum(v), jnum(h.value), Value::Bool(h.tail_asymptote)]);
            }
            &["x", "value", "tail_asymptote"]
        }
        Func::Quantile => {
            for &u in grid {
                rows.push(vec![jnum(u), jnum(eep_quantile(&p, u)?)]);
            }
            &["u", "value"]
        }
        Func::Chf => {
            for &v in grid {
                let r = eep_chf(&p, v)?;
                all_converged &= r.converged;
                rows.push(vec![jnum(v), jnum(r.value.re), jnum(r.value.im), jnum(r.abs_error_estimate), Value::Bool(r.converged)]);
            }
            &["t", "re", "im", "abs_error_estimate", "converged"]
        }
        Func::Mgf => {
            for &v in grid {
                let r = eep_mgf(&p, v)?;
                all_converged &= r.converged;
                rows.push(vec![jnum(v), jnum(r.value), jnum(r.abs_error_estimate), Value::Bool(r.converged)]);
            }
            &["t", "value", "abs_error_estimate", "converged"]
        }
    };
    emit(out, columns, &rows)?;
    Ok(all_converged)
}

fn moment_row(name: &str, r: &EvalResult<f64>) -> Vec<Value> {
    vec![Value::String(name.into()), jnum(r.value), jnum(r.abs_error_estimate), Value::Bool(r.converged)]
}

fn cmd_moment(params: &Params, nu: f64, method: Method, m_max: usize, k_max: usize, out: &Output) -> CmdResult {
    let p = eep_params(params)?;
    let integer_order = || -> Result<u32, Failure> {
        if nu >= 1.0 && nu.fract() == 0.0 && nu <= u32::MAX as f64 {
            Ok(nu as u32)
        } else {
            Err(Failure::Usage(format!("double-series requires a positive integer nu, got {nu}")))
        }
    };
    let mut results: Vec<(&str, EvalResult<f64>)> = Vec::new();
    match method {
        Method::Series => results.push(("series", eep_moment(&p, nu)?)),
        Method::Quadrature => results.push(("quadrature", eep_moment_quadrature(&p, nu)?)),
        Method::DoubleSeries => {
            results.push(("double-series", eep_moment_double_series(&p, integer_order()?, m_max, k_max)?))
        }
        Method::All => {
            results.push(("series", eep_moment(&p, nu)?));
            if let Ok(n) = integer_order() {
                results.push(("double-series", eep_moment_double_series(&p, n, m_max, k_max)?));
            }
            results.push(("quadrature", eep_moment_quadrature(&p, nu)?));
        }
    }
    let base = results[0].1.value;
    let rows: Vec<Vec<Value>> = results
        .iter()
        .map(|(name, r)| {
            let mut row = moment_row(name, r);
            if method == Method::All {
                // relative difference from the single-series value
                row.push(jnum(((r.value - base) / base).abs()));
            }
            row
        })
        .collect();
    let mut columns = vec!["method", "value", "abs_error_estimate", "converged"];
    if method == Method::All {
        columns.push("agreement");
    }
    emit(out, &columns, &rows)?;
    Ok(results.iter().all(|(_, r)| r.converged))
}

fn lifetimes_csv(xs: &[f64]) -> String {
    let mut s = String::with_capacity(24 * xs.len() + 9);
    s.push_str("lifetime\n");
    for &x in xs {
        s.push_str(&num(x));
        s.push('\n');
    }
    s
}

fn cmd_sample(params: &Params, n: usize, seed: u64, stream: u64, out: &Output) -> CmdResult {
    if n == 0 {
        return Err(Failure::Usage("n must be at least 1".into()));
    }
    let p = eep_params(params)?;
    let batch = eep_sample(&p, n, seed, stream);
    let text = match out.format {
        Format::Csv => lifetimes_csv(&batch.values),
        Format::Json => serde_json::to_string(&batch).expect("serializable") + "\n",
    };
    write_text(out.out.as_deref(), &text)?;
    Ok(true)
}

fn cmd_simulate(params: &Params, n: usize, seed: u64, out: Option<&Path>) -> CmdResult {
    if n < 1000 {
        return Err(Failure::Usage(format!("n must be at least 1000 for the KS test, got {n}")));
    }
    let a = params.alpha;
    if !(a >= 1.0 && a.fract() == 0.0 && a <= u32::MAX as f64) {
        return Err(Failure::Usage(format!("alpha must be a positive integer (units per block) to simulate, got {a}")));
    }
    let spec = SystemSpec::new(a as u32, params.beta, params.lambda)?;
    let xs = sample_system_lifetimes(&spec, n, seed)?;
    if let Some(path) = out {
        write_text(Some(path), &lifetimes_csv(&xs))?;
    }
    let analytic = spec.eep_params();
    let mut sorted = xs;
    let d = ks_distance(&mut sorted, |x| eep_cdf(&analytic, x));
    let crit = 1.63 / (n as f64).sqrt();
    let report = KsReport { n, ks_distance: d, critical_value_1pct: crit, pass: d <= crit };
    let text = serde_json::to_string_pretty(&json!({ "spec": spec, "report": report })).expect("serializable") + "\n";
    write_text(None, &text)?;
    Ok(true)
}

fn read_data(path: &Path) -> Result<Vec<f64>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let field = line.split(',').next().unwrap_or("").trim();
        if field.is_empty() {
            continue;
        }
        match field.parse::<f64>() {
            Ok(v) => out.push(v),
            // a header line
            Err(_) if i == 0 => {}
            Err(_) => return Err(Failure::Usage(format!("{}:{}: not a number: {field}", path.display(), i + 1))),
        }
    }
    if out.is_empty() {
        return Err(Failure::Usage(format!("{}: no data", path.display())));
    }
    Ok(out)
}

fn cmd_fit(data: &Path, alpha: Option<f64>, beta: Option<f64>, lambda: Option<f64>) -> CmdResult {
    let xs = read_data(data)?;
    let initial = match (alpha, beta, lambda) {
        (None, None, None) => None,
        (Some(a), Some(b), Some(l)) => Some(EepParams::new(a, b, l)?),
        _ => return Err(Failure::Usage("initial guess needs all of --alpha, --beta, --lambda".into())),
    };
    let r = fit_eep(&xs, initial)?;
    write_text(None, &(serde_json::to_string_pretty(&r).expect("serializable") + "\n"))?;
    Ok(r.converged)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Eval { dist, func, params, x, t, output } => cmd_eval(*dist, *func, params, x, t, output),
        Command::Moment { params, nu, method, m_max, k_max, output } => {
            cmd_moment(params, *nu, *method, *m_max, *k_max, output)
        }
        Command::Sample { params, n, seed, stream, output } => cmd_sample(params, *n, *seed, *stream, output),
        Command::Simulate { params, n, seed, out } => cmd_simulate(params, *n, *seed, out.as_deref()),
        Command::Fit { data, alpha, beta, lambda } => cmd_fit(data, *alpha, *beta, *lambda),
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("eep: numerical method did not converge");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("eep: {msg}");
            ExitCode::from(2)
        }
    }
}
