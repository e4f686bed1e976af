//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on usage or configuration errors, 2 on runtime
//! failures.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::estimator::{distortion, estimate_coeffs};
use crate::field::{dimension, random_field, FourierCoefficients};
use crate::harness::{
    fixed_field, run_ambiguity_demo, run_clt_check, run_mse_sweep, write_ambiguity_demo, write_clt_reports,
    AmbiguityParams, ExperimentConfig, FieldSource, DEFAULT_SEED,
};
use crate::io::{ensure_dir, fmt_sig17, read_json, read_sample_set, write_json, write_sample_set};
use crate::mc::workers_from_env;
use crate::sampling::{deploy_seeded, observe};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "orderstat",
    version,
    about = "Bandlimited field estimation from ordered samples at unknown uniform locations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw a random bounded field and write field.json.
    GenField(GenFieldArgs),
    /// Sample a field at random locations and write the ordered values.
    Sample(SampleArgs),
    /// Estimate coefficients from ordered samples.
    Estimate(EstimateArgs),
    /// Monte Carlo distortion sweep over (b, n).
    MseSweep(SweepArgs),
    /// Compare empirical and analytic coefficient covariances.
    CltCheck(SweepArgs),
    /// Show that a field and its cyclic shift share a value distribution.
    AmbiguityDemo(AmbiguityArgs),
}

#[derive(Debug, Args)]
struct OutArgs {
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct GenFieldArgs {
    #[arg(long, default_value_t = 1)]
    b: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Draw a complex-valued field instead of a real one.
    #[arg(long)]
    complex: bool,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[arg(long)]
    field: PathBuf,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("input").required(true).args(["field", "samples"])))]
struct EstimateArgs {
    /// Field to sample (the true field is then also used for the distortion).
    #[arg(long)]
    field: Option<PathBuf>,
    /// Ordered samples CSV written by `sample`.
    #[arg(long, conflicts_with = "field")]
    samples: Option<PathBuf>,
    /// Sample count when sampling from --field.
    #[arg(long, requires = "field")]
    n: Option<usize>,
    /// Bandwidth index for the estimate; defaults to the field's.
    #[arg(long)]
    b: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Experiment config JSON; other flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Bandwidth indices, comma separated.
    #[arg(long, value_delimiter = ',')]
    b: Vec<usize>,
    /// Sample counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Fixed field JSON (default: random fields).
    #[arg(long)]
    field: Option<PathBuf>,
    /// Output directory [default: config's output_dir, else "out"].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AmbiguityArgs {
    /// Field JSON; a random real field of bandwidth --b otherwise.
    #[arg(long)]
    field: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    b: usize,
    #[arg(long, default_value_t = 0.25)]
    theta: f64,
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    /// Time-grid resolution for level-set measures.
    #[arg(long, default_value_t = 8192)]
    grid: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(flatten)]
    out: OutArgs,
}

impl SweepArgs {
    fn into_config(self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig {
                b_list: Vec::new(),
                n_list: Vec::new(),
                trials: 100,
                base_seed: DEFAULT_SEED,
                field_source: FieldSource::Random,
                output_dir: PathBuf::from("out"),
            },
        };
        if !self.b.is_empty() {
            cfg.b_list = self.b;
        }
        if !self.n.is_empty() {
            cfg.n_list = self.n;
        }
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        if let Some(s) = self.seed {
            cfg.base_seed = s;
        }
        if let Some(f) = self.field {
            cfg.field_source = FieldSource::File(f);
        }
        if let Some(o) = self.out {
            cfg.output_dir = o;
        }
        Ok(cfg)
    }
}

fn load_field(path: &Path) -> Result<FourierCoefficients> {
    read_json(path).map_err(|e| match e {
        Error::Json(e) => Error::InvalidArgument(format!("{}: {e}", path.display())),
        other => other,
    })
}

fn gen_field(args: GenFieldArgs) -> Result<()> {
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(args.seed);
    let field = random_field(args.b, &mut rng, !args.complex);
    ensure_dir(&args.out.out)?;
    let path = args.out.out.join("field.json");
    write_json(&path, &field)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn sample(args: SampleArgs) -> Result<()> {
    let field = load_field(&args.field)?;
    let set = observe(&field, &deploy_seeded(args.n, args.seed)?);
    ensure_dir(&args.out.out)?;
    let csv = args.out.out.join("samples.csv");
    write_sample_set(&csv, &args.out.out.join("samples.json"), &set)?;
    println!("wrote {}", csv.display());
    Ok(())
}

fn estimate(args: EstimateArgs) -> Result<()> {
    let (set, truth) = match (&args.field, &args.samples) {
        (Some(path), _) => {
            let field = load_field(path)?;
            let n = args
                .n
                .ok_or_else(|| Error::InvalidArgument("--n is required with --field".into()))?;
            (observe(&field, &deploy_seeded(n, args.seed)?), Some(field))
        }
        (None, Some(path)) => (read_sample_set(path)?, None),
        (None, None) => unreachable!("clap enforces the input group"),
    };
    let b = match (args.b, &truth, set.source_bandwidth()) {
        (Some(b), _, _) => b,
        (None, Some(f), _) => f.bandwidth(),
        (None, None, Some(b)) => b,
        (None, None, None) => return Err(Error::InvalidArgument("--b is required".into())),
    };
    if set.len() < dimension(b) {
        return Err(Error::InvalidArgument(format!(
            "{} samples cannot support bandwidth {b} (need {})",
            set.len(),
            dimension(b)
        )));
    }
    let truth = truth
        .map(|f| {
            f.with_bandwidth(b)
                .ok_or_else(|| Error::InvalidArgument(format!("--b {b} is below the field's bandwidth")))
        })
        .transpose()?;
    let est = estimate_coeffs(&set, b)?;
    ensure_dir(&args.out.out)?;
    let path = args.out.out.join("estimate.json");
    write_json(&path, &est)?;
    println!("wrote {}", path.display());
    if let Some(field) = truth {
        println!("distortion {}", fmt_sig17(distortion(&est, &field)?));
    }
    Ok(())
}

fn mse_sweep(args: SweepArgs) -> Result<()> {
    let cfg = args.into_config()?;
    let report = run_mse_sweep(&cfg, workers_from_env())?;
    report.write(&cfg.output_dir)?;
    print!("{}", report.to_csv());
    Ok(())
}

fn clt_check(args: SweepArgs) -> Result<()> {
    let cfg = args.into_config()?;
    let reports = run_clt_check(&cfg, workers_from_env())?;
    write_clt_reports(&cfg.output_dir, &reports)?;
    for r in &reports {
        println!(
            "b={} n={} trials={} frobenius_rel_err={} k_u_frobenius_rel_err={}",
            r.b,
            r.n,
            r.trials,
            r.frobenius_rel_err.map_or("n/a".into(), fmt_sig17),
            r.k_u_frobenius_rel_err.map_or("n/a".into(), fmt_sig17),
        );
    }
    Ok(())
}

fn ambiguity(args: AmbiguityArgs) -> Result<()> {
    let field = match &args.field {
        Some(path) => load_field(path)?,
        None => fixed_field(None, args.b, args.seed)?,
    };
    let params = AmbiguityParams {
        field,
        theta: args.theta,
        n: args.n,
        resolution: args.grid,
        seed: args.seed,
    };
    let demo = run_ambiguity_demo(&params)?;
    write_ambiguity_demo(&args.out.out, &demo)?;
    let r = &demo.report;
    println!(
        "sup_cdf_diff_theory={} sup_cdf_diff_empirical={} distortion_between_fields={}",
        fmt_sig17(r.sup_cdf_diff_theory),
        fmt_sig17(r.sup_cdf_diff_empirical),
        fmt_sig17(r.distortion_between_fields)
    );
    Ok(())
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidConfig(_) | Error::InvalidArgument(_) => EXIT_USAGE,
        _ => EXIT_RUNTIME,
    }
}

/// Parses `argv` (including the program name) and runs the subcommand.
pub fn cli_dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::GenField(a) => gen_field(a),
        Command::Sample(a) => sample(a),
        Command::Estimate(a) => estimate(a),
        Command::MseSweep(a) => mse_sweep(a),
        Command::CltCheck(a) => clt_check(a),
        Command::AmbiguityDemo(a) => ambiguity(a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
