mod amp;
mod compare;
mod config;
mod gen;
mod output;
mod se;
mod traffic;
mod trials;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use log::error;
use serde_json::{json, Value};

use tamp_core::ensembles::EnsembleSpec;
use tamp_core::TampError;

use config::ExperimentConfig;

#[derive(Parser, Debug)]
#[command(name = "tamp", version, about = "Diagrammatic AMP experiment runner")]
struct Cli {
    /// Master seed (for `gen`, the matrix seed).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for trial-level parallelism.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory (for `gen`, the matrix file).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Experiment config JSON; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate one matrix as a TAMP0001 file plus a JSON sidecar.
    Gen(EnsembleArgs),
    /// Monte Carlo traffic and diagonal distribution estimates.
    Traffic(DiagramArgs),
    /// Cactus-property decay and delocalization audit.
    CactusAudit(DiagramArgs),
    /// Independent AMP runs with aggregated empirical moments.
    Amp(AmpArgs),
    /// State-evolution kernel for the configured iteration.
    Se(SeArgs),
    /// Compare empirical moments to a kernel.
    Compare(CompareArgs),
}

#[derive(Args, Clone, Debug, Default)]
pub struct EnsembleArgs {
    /// Ensemble kind; `punctured_<kind>` punctures another kind.
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// Block count for block_goe and community.
    #[arg(long)]
    q: Option<usize>,
    /// Row-major block variance profile, comma separated.
    #[arg(long, value_delimiter = ',')]
    sigma: Option<Vec<f64>>,
    /// Community inner block: goe or rom.
    #[arg(long)]
    inner: Option<String>,
    /// Wigner entry law: normal or rademacher.
    #[arg(long)]
    entry_law: Option<String>,
    /// Eigenvalue law for orth_invariant: rademacher or semicircle.
    #[arg(long)]
    eigenvalues: Option<String>,
}

#[derive(Args, Debug)]
pub struct DiagramArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,
    /// Diagram names or text forms, separated by `/`.
    #[arg(long, value_delimiter = '/')]
    diagrams: Option<Vec<String>>,
    #[arg(long)]
    trials: Option<usize>,
    /// Dimensions, comma separated.
    #[arg(long, value_delimiter = ',')]
    sweep: Option<Vec<usize>>,
}

#[derive(Args, Debug)]
pub struct AmpArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,
    #[arg(long)]
    trials: Option<usize>,
    /// Drop every Onsager correction.
    #[arg(long)]
    ablate: bool,
    /// Skip writing per-trial iterate files.
    #[arg(long)]
    no_traces: bool,
}

#[derive(Args, Debug)]
pub struct SeArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,
    /// Block GOE normalization: entry (Σ/q) or literal (Σ).
    #[arg(long)]
    normalization: Option<String>,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    /// Kernel JSON from `tamp se`.
    #[arg(long)]
    kernel: PathBuf,
    /// Moment CSV from `tamp amp`; omit with --synthetic.
    #[arg(long, required_unless_present = "synthetic")]
    moments: Option<PathBuf>,
    #[arg(long)]
    threshold: Option<f64>,
    /// Draw this many coordinates per trial from the kernel's Gaussian law
    /// instead of reading moments.
    #[arg(long, conflicts_with = "moments")]
    synthetic: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
}

/// Outcome of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    CompareFail,
    DivergenceOnly,
}

impl Status {
    fn code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::CompareFail => 1,
            Status::DivergenceOnly => 4,
        }
    }
}

fn error_code(e: &anyhow::Error) -> u8 {
    match e.chain().find_map(|c| c.downcast_ref::<TampError>()) {
        Some(TampError::Budget { .. } | TampError::Size { .. }) => 3,
        Some(TampError::Divergence { .. }) => 4,
        _ => 2,
    }
}

impl EnsembleArgs {
    fn is_empty(&self) -> bool {
        self.kind.is_none() && self.n.is_none()
    }

    fn kind_json(&self, kind: &str) -> Result<Value> {
        if let Some(inner) = kind.strip_prefix("punctured_") {
            return Ok(json!({"kind": "punctured", "inner": self.kind_json(inner)?}));
        }
        let mut v = json!({"kind": kind});
        let obj = v.as_object_mut().expect("object");
        match kind {
            "block_goe" => {
                let q = self.q.context("block_goe needs --q")?;
                let sigma = self.sigma.clone().unwrap_or_else(|| {
                    (0..q * q).map(|i| if i / q == i % q { 1.0 } else { 0.0 }).collect()
                });
                obj.insert("q".into(), json!(q));
                obj.insert("sigma".into(), json!(sigma));
            }
            "community" => {
                obj.insert("q".into(), json!(self.q.context("community needs --q")?));
                if let Some(inner) = &self.inner {
                    obj.insert("inner".into(), json!(inner));
                }
            }
            "wigner" => {
                if let Some(law) = &self.entry_law {
                    obj.insert("entry_law".into(), json!(law));
                }
            }
            "orth_invariant" => {
                let law = self.eigenvalues.as_deref().unwrap_or("rademacher");
                obj.insert("eigenvalues".into(), json!({"law": law}));
            }
            _ => {}
        }
        Ok(v)
    }

    /// Apply the flags on top of the config's ensemble.
    fn overlay(&self, base: Option<EnsembleSpec>) -> Result<Option<EnsembleSpec>> {
        if self.is_empty() {
            return Ok(base);
        }
        let (mut value, n) = match (&self.kind, &base) {
            (Some(kind), _) => (self.kind_json(kind)?, self.n.or(base.as_ref().map(|b| b.n))),
            (None, Some(b)) => (serde_json::to_value(b)?, self.n),
            (None, None) => anyhow::bail!("--n given without --kind or a configured ensemble"),
        };
        let obj = value.as_object_mut().expect("object");
        obj.insert("n".into(), json!(n.context("no dimension given (use --n)")?));
        obj.insert("seed".into(), json!(base.as_ref().map_or(0, |b| b.seed)));
        let spec: EnsembleSpec = serde_json::from_value(value).context("building the ensemble from flags")?;
        Ok(Some(spec))
    }
}

/// Config after the global flags and the command's ensemble flags.
fn effective_config(cli: &Cli, ensemble: Option<&EnsembleArgs>) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        cfg.master_seed = seed;
    }
    if let Some(e) = ensemble {
        cfg.ensemble = e.overlay(cfg.ensemble.take())?;
    }
    Ok(cfg)
}

fn out_dir(cli: &Cli, cfg: &ExperimentConfig) -> PathBuf {
    cli.out.clone().or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("tamp_out"))
}

fn run(cli: &Cli) -> Result<Status> {
    if let Some(k) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(k).build_global().context("configuring the thread pool")?;
    }
    match &cli.command {
        Command::Gen(args) => {
            let mut cfg = effective_config(cli, Some(args))?;
            if let (Some(seed), Some(spec)) = (cli.seed, cfg.ensemble.as_mut()) {
                spec.seed = seed;
            }
            cfg.validate()?;
            gen::run(&cfg, cli.out.as_deref())
        }
        Command::Traffic(args) | Command::CactusAudit(args) => {
            let mut ensemble = args.ensemble.clone();
            if ensemble.kind.is_some() && ensemble.n.is_none() {
                ensemble.n = args.sweep.as_ref().and_then(|s| s.first().copied());
            }
            let mut cfg = effective_config(cli, Some(&ensemble))?;
            if let Some(t) = args.trials {
                cfg.trials = t;
            }
            if let Some(s) = &args.sweep {
                cfg.dimension_sweep = s.clone();
            }
            if let Some(d) = &args.diagrams {
                cfg.diagrams = d.iter().cloned().map(config::DiagramRef::Text).collect();
            }
            cfg.validate()?;
            let out = output::OutDir::create(out_dir(cli, &cfg), cfg.hash())?;
            if matches!(cli.command, Command::Traffic(_)) {
                traffic::run_traffic(&cfg, &out)
            } else {
                traffic::run_audit(&cfg, &out)
            }
        }
        Command::Amp(args) => {
            let mut cfg = effective_config(cli, Some(&args.ensemble))?;
            if let Some(t) = args.trials {
                cfg.trials = t;
            }
            if args.ablate {
                if let Some(a) = cfg.amp.as_mut() {
                    a.onsager = tamp_core::amp::OnsagerMode::None;
                }
            }
            cfg.validate()?;
            let out = output::OutDir::create(out_dir(cli, &cfg), cfg.hash())?;
            amp::run(&cfg, &out, !args.no_traces)
        }
        Command::Se(args) => {
            let mut cfg = effective_config(cli, Some(&args.ensemble))?;
            if let Some(norm) = &args.normalization {
                cfg.block_normalization = serde_json::from_value(json!(norm)).context("--normalization")?;
            }
            cfg.validate()?;
            let out = output::OutDir::create(out_dir(cli, &cfg), cfg.hash())?;
            se::run(&cfg, &out)
        }
        Command::Compare(args) => {
            let mut cfg = effective_config(cli, None)?;
            if let Some(z) = args.threshold {
                cfg.threshold = z;
            }
            if let Some(t) = args.trials {
                cfg.trials = t;
            }
            cfg.validate()?;
            let out = output::OutDir::create(out_dir(cli, &cfg), cfg.hash())?;
            compare::run(&cfg, &out, args)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).format_timestamp(None).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(status) => ExitCode::from(status.code()),
        Err(e) => {
            error!("{e:#}");
            ExitCode::from(error_code(&e))
        }
    }
}
