#![allow(clippy::neg_cmp_op_on_partial_ord)]
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use pplab::bounds::{self, BoundInput, SliceExponent};
use pplab::capacity::{extremal_function_planar, toric_extremal, CondenserSpec};
use pplab::green::{slice_sweep, write_slice_csv};
use pplab::grid::{sublevel_volume, GridField, VolumeOptions};
use pplab::harness::{configure_threads, run_suite, ExperimentConfig};
use pplab::report::{emit_report, render, ReportFormat, SCHEMA_VERSION};
use pplab::{Domain, DomainKind, Error, ModelSpec, PshModel, Result};

#[derive(Parser)]
#[command(name = "pplab", version, about = "Numerical checks for plurisubharmonic sublevel, capacity and integrability bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact constants c_n and a_n.
    Constants {
        #[arg(long, default_value_t = 6)]
        n: usize,
    },
    /// Evaluate a named bound: volume, volume-diameter, integrability, integrability-diameter,
    /// critical, vol-cap, slice-cap, slice-cap-proof, i-n, singularity, gamma.
    Bound {
        name: String,
        #[arg(long, num_args = 1.., value_name = "KEY=VALUE")]
        params: Vec<String>,
    },
    /// Condenser capacity from a JSON config.
    Capacity {
        #[arg(long)]
        config: PathBuf,
    },
    /// Sublevel volumes from a JSON config.
    Volume {
        #[arg(long)]
        config: PathBuf,
    },
    /// Slice energies (direct and Green routes) from a JSON config.
    SliceEnergy {
        #[arg(long)]
        config: PathBuf,
    },
    /// Dump a sampled field as CSV or flat binary.
    Field {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long)]
        suite: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: String,
    },
}

fn schema_default() -> u32 {
    SCHEMA_VERSION
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CapacityConfig {
    #[serde(default = "schema_default")]
    schema_version: u32,
    condenser: CondenserSpec,
    #[serde(default = "default_resolution")]
    resolution: usize,
    #[serde(default = "default_solver_tol")]
    tol: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct VolumeConfig {
    #[serde(default = "schema_default")]
    schema_version: u32,
    model: ModelSpec,
    #[serde(default)]
    domain: Option<Domain>,
    levels: Vec<f64>,
    #[serde(default)]
    samples: Option<usize>,
    #[serde(default)]
    seed: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SliceConfig {
    #[serde(default = "schema_default")]
    schema_version: u32,
    model: ModelSpec,
    zetas: Vec<[f64; 2]>,
    #[serde(default)]
    csv: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldConfig {
    #[serde(default = "schema_default")]
    schema_version: u32,
    model: ModelSpec,
    #[serde(default)]
    domain: Option<Domain>,
    #[serde(default = "default_resolution")]
    resolution: usize,
    #[serde(default = "default_truncation")]
    truncation: f64,
}

fn default_resolution() -> usize {
    256
}

fn default_solver_tol() -> f64 {
    1e-8
}

fn default_truncation() -> f64 {
    30.0
}

fn check_schema(v: u32) -> Result<()> {
    if v != SCHEMA_VERSION {
        return Err(Error::Config(format!("unsupported schema_version {v}")));
    }
    Ok(())
}

fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn print_json<T: Serialize>(v: &T) -> Result<()> {
    let s = serde_json::to_string_pretty(v).map_err(|e| Error::Config(e.to_string()))?;
    println!("{s}");
    Ok(())
}

fn parse_params(raw: &[String]) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for kv in raw {
        let (k, v) = kv.split_once('=').ok_or_else(|| Error::Config(format!("expected KEY=VALUE, got '{kv}'")))?;
        let x: f64 = v.parse().map_err(|_| Error::Config(format!("'{v}' is not a number")))?;
        out.insert(k.to_string(), x);
    }
    Ok(out)
}

fn param(p: &BTreeMap<String, f64>, key: &str) -> Result<f64> {
    p.get(key).copied().ok_or_else(|| Error::Config(format!("missing parameter '{key}'")))
}

fn param_or(p: &BTreeMap<String, f64>, key: &str, default: f64) -> f64 {
    p.get(key).copied().unwrap_or(default)
}

fn dim(p: &BTreeMap<String, f64>) -> Result<usize> {
    let n = param(p, "n")?;
    if n < 1.0 || n.fract() != 0.0 {
        return Err(Error::Config(format!("n must be a positive integer, got {n}")));
    }
    Ok(n as usize)
}

fn cmd_constants(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Config("n must be positive".into()));
    }
    println!("n,c_n,c_n_decimal,a_n,a_n_decimal");
    for k in 1..=n {
        let (c, a) = (bounds::constant_c(k)?, bounds::constant_a(k)?);
        println!("{k},{c},{:.17e},{a},{:.17e}", c.value(), a.value());
    }
    Ok(())
}

fn cmd_bound(name: &str, raw: &[String]) -> Result<()> {
    let p = parse_params(raw)?;
    let value = match name {
        "volume" | "volume-diameter" | "integrability" | "integrability-diameter" => {
            let n = dim(&p)?;
            let diameter = param_or(&p, "diameter", Domain::unit_polydisc(n).diameter());
            let input = BoundInput::new(n, param(&p, "mu")?, param_or(&p, "s", 1.0), diameter)?;
            let b = match name {
                "volume" => bounds::volume_bound(&input, false)?,
                "volume-diameter" => bounds::volume_bound(&input, true)?,
                "integrability" => bounds::integrability_bound(&input, false, param_or(&p, "m", 0.0))?,
                _ => bounds::integrability_bound(&input, true, param_or(&p, "m", 0.0))?,
            };
            serde_json::to_value(b)
        }
        "critical" => {
            let n = dim(&p)?;
            let ball = Domain::unit_ball(n);
            let v = bounds::critical_bound(
                n,
                param(&p, "lambda")?,
                param_or(&p, "volume", ball.volume()),
                param_or(&p, "diameter", ball.diameter()),
            )?;
            serde_json::to_value(v)
        }
        "vol-cap" => {
            let n = dim(&p)?;
            let d = param_or(&p, "diameter", Domain::unit_polydisc(n).diameter());
            serde_json::to_value(bounds::vol_cap_bound(n, param(&p, "cap")?, d)?)
        }
        "slice-cap" | "slice-cap-proof" => {
            let m = param(&p, "m")?;
            if m < 1.0 || m.fract() != 0.0 {
                return Err(Error::Config("m must be a positive integer".into()));
            }
            let e = if name == "slice-cap" { SliceExponent::Stated } else { SliceExponent::ProofLine };
            let v = bounds::slice_cap_bound(m as usize, param(&p, "p")?, param(&p, "cap")?, param_or(&p, "diameter", 2.0), e)?;
            serde_json::to_value(v)
        }
        "i-n" => serde_json::to_value(bounds::i_n_check(dim(&p)?, param(&p, "mu")?)?),
        "singularity" => {
            let (lo, hi) = bounds::singularity_exponent_bounds(param(&p, "nu")?, param(&p, "mu_a")?, dim(&p)?)?;
            serde_json::to_value(BTreeMap::from([("lower", lo), ("upper", hi)]))
        }
        "gamma" => serde_json::to_value(bounds::gamma(param(&p, "p")?)?),
        other => return Err(Error::Config(format!("unknown bound '{other}'"))),
    }
    .map_err(|e| Error::Config(e.to_string()))?;
    print_json(&value)
}

fn cmd_capacity(path: &Path) -> Result<()> {
    let cfg: CapacityConfig = load(path)?;
    check_schema(cfg.schema_version)?;
    cfg.condenser.domain.validate()?;
    let d = &cfg.condenser.domain;
    let planar = d.center.len() == 1 && d.kind != DomainKind::Polydisc;
    let sol = if planar {
        extremal_function_planar(&cfg.condenser, cfg.resolution, cfg.tol)?
    } else {
        match toric_extremal(&cfg.condenser, cfg.resolution) {
            Err(Error::Unsupported(_)) if d.center.len() == 1 => {
                let mut spec = cfg.condenser.clone();
                spec.domain = Domain { kind: DomainKind::PlanarDisc, ..d.clone() };
                extremal_function_planar(&spec, cfg.resolution, cfg.tol)?
            }
            other => other?,
        }
    };
    print_json(&sol)
}

fn cmd_volume(path: &Path) -> Result<()> {
    let cfg: VolumeConfig = load(path)?;
    check_schema(cfg.schema_version)?;
    let model = PshModel::from_spec(&cfg.model)?;
    let domain = cfg.domain.unwrap_or_else(|| model.reference_domain());
    let opts = VolumeOptions { seed: cfg.seed, samples: cfg.samples, ..VolumeOptions::default() };
    let mut rows = Vec::new();
    for s in cfg.levels {
        let est = sublevel_volume(&model, &domain, s, &opts)?;
        let exact = if domain == model.reference_domain() { model.closed_form_sublevel_volume(s) } else { None };
        rows.push(serde_json::json!({ "s": s, "estimate": est, "closed_form": exact }));
    }
    print_json(&serde_json::json!({ "schema_version": SCHEMA_VERSION, "rows": rows }))
}

fn cmd_slice_energy(path: &Path) -> Result<()> {
    let cfg: SliceConfig = load(path)?;
    check_schema(cfg.schema_version)?;
    let model = PshModel::from_spec(&cfg.model)?;
    let zetas: Vec<Complex64> = cfg.zetas.iter().map(|z| Complex64::new(z[0], z[1])).collect();
    let rows = slice_sweep(&model, &zetas)?;
    if let Some(csv) = &cfg.csv {
        write_slice_csv(&rows, csv)?;
    }
    print_json(&serde_json::json!({ "schema_version": SCHEMA_VERSION, "rows": rows }))
}

fn cmd_field(path: &Path, out: &Path, format: &str) -> Result<()> {
    let cfg: FieldConfig = load(path)?;
    check_schema(cfg.schema_version)?;
    let model = PshModel::from_spec(&cfg.model)?;
    let domain = cfg.domain.unwrap_or_else(|| model.reference_domain());
    let field = GridField::build(&model, &domain, cfg.resolution, cfg.truncation)?;
    let file = fs::File::create(out).map_err(|e| Error::Config(format!("{}: {e}", out.display())))?;
    let w = std::io::BufWriter::new(file);
    match format {
        "csv" => field.write_csv(w),
        "bin" => field.write_binary(w),
        other => Err(Error::Config(format!("unknown field format '{other}'"))),
    }
}

fn cmd_verify(suite: Option<String>, config: Option<PathBuf>, out: Option<PathBuf>, format: &str) -> Result<bool> {
    let format: ReportFormat = format.parse()?;
    let mut cfg = match &config {
        Some(p) => load::<ExperimentConfig>(p)?,
        None => ExperimentConfig::for_suite(suite.as_deref().unwrap_or("all")),
    };
    if let Some(s) = suite {
        cfg.suite = s;
    }
    if let Some(o) = out {
        cfg.output = Some(o);
    }
    let reports = run_suite(&cfg)?;
    match &cfg.output {
        Some(path) => emit_report(&reports, format, cfg.seed, path)?,
        None => print!("{}", render(&reports, format, cfg.seed)?),
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    eprintln!("{} cases, {} failed", reports.len(), failed);
    Ok(failed == 0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let outcome = match cli.command {
        Command::Constants { n } => cmd_constants(n).map(|_| true),
        Command::Bound { name, params } => cmd_bound(&name, &params).map(|_| true),
        Command::Capacity { config } => cmd_capacity(&config).map(|_| true),
        Command::Volume { config } => cmd_volume(&config).map(|_| true),
        Command::SliceEnergy { config } => cmd_slice_energy(&config).map(|_| true),
        Command::Field { config, out, format } => cmd_field(&config, &out, &format).map(|_| true),
        Command::Verify { suite, config, out, format } => cmd_verify(suite, config, out, &format),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
