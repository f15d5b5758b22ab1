//! Command-line driver: synthetic data, reconstructions and self-checks.

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use elastiscat::forward::simulate;
use elastiscat::inverse::{
    inject_noise, inject_noise_phaseless, run_algorithm_i, run_algorithm_ii, IterationTrace,
    Linearization, TraceStatus,
};
use elastiscat::io::{
    format_curve, format_polylines, format_trace, parse_curve, read_far_field, write_far_field,
    DataHeader, DataKind, FarFieldData, RunConfig,
};
use elastiscat::validate::{run_validation, ValidationOptions};
use elastiscat::{Boundary, Error, Scene};

const EXIT_VALIDATION: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NONCONVERGENCE: u8 = 3;

#[derive(Parser)]
#[command(name = "elastiscat", version, about = "Elastic obstacle scattering and shape reconstruction in 2D")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Far field of the configured scene (obstacle, plus the reference ball if any).
    Forward {
        #[command(flatten)]
        run: RunArgs,
        /// Phased output file.
        #[arg(long, short)]
        out: PathBuf,
        /// Also write squared moduli to this file.
        #[arg(long)]
        phaseless: Option<PathBuf>,
    },
    /// Noisy data for one of the reconstructions.
    MakeData {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Reconstruction from phased data of the obstacle alone.
    InvertPhased(InvertArgs),
    /// Reconstruction from phaseless data of the obstacle and the reference ball.
    InvertPhaseless(InvertArgs),
    /// Checks the solver against references and prints measured deviations.
    Validate {
        /// Perturbs one quadrature weight; the identity checks must then fail.
        #[arg(long, hide = true)]
        corrupt_quadrature: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Phased,
    Phaseless,
}

#[derive(Args)]
struct RunArgs {
    /// Run configuration (TOML).
    #[arg(long, short)]
    config: PathBuf,
    /// Overrides `noise.delta`.
    #[arg(long)]
    noise: Option<f64>,
    /// Overrides `noise.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `solver.n`.
    #[arg(long)]
    n: Option<usize>,
    /// Overrides `solver.n_bar`.
    #[arg(long)]
    n_bar: Option<usize>,
    /// Overrides `solver.n_data`.
    #[arg(long)]
    n_data: Option<usize>,
}

#[derive(Args)]
struct InvertArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Far-field data file.
    #[arg(long, short)]
    data: PathBuf,
    /// Overrides `output_dir`.
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Initial curve file (as written to `final_curve.toml`).
    #[arg(long)]
    initial: Option<PathBuf>,
    /// Overrides `inversion.max_iters`.
    #[arg(long)]
    max_iters: Option<usize>,
    /// Overrides `inversion.epsilon`.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Overrides `inversion.linearization`.
    #[arg(long, value_parser = parse_linearization)]
    linearization: Option<Linearization>,
}

fn parse_linearization(s: &str) -> Result<Linearization, String> {
    match s {
        "frozen" => Ok(Linearization::Frozen),
        "full" => Ok(Linearization::Full),
        _ => Err(format!("expected `frozen` or `full`, got `{s}`")),
    }
}

/// Failure with its exit status.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        let code = match error.downcast_ref::<Error>() {
            Some(Error::Config(_) | Error::DataFormat(_)) => EXIT_CONFIG,
            _ => EXIT_VALIDATION,
        };
        Self { code, error }
    }
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        anyhow::Error::from(error).into()
    }
}

fn config_failure(error: anyhow::Error) -> Failure {
    Failure { code: EXIT_CONFIG, error }
}

fn load(run: &RunArgs) -> Result<RunConfig, Failure> {
    let mut cfg = RunConfig::load(&run.config)
        .with_context(|| format!("reading {}", run.config.display()))
        .map_err(config_failure)?;
    if let Some(d) = run.noise {
        cfg.noise.delta = d;
    }
    if let Some(s) = run.seed {
        cfg.noise.seed = s;
    }
    if let Some(n) = run.n {
        cfg.solver.n = n;
    }
    if let Some(n) = run.n_bar {
        cfg.solver.n_bar = n;
    }
    if run.n_data.is_some() {
        cfg.solver.n_data = run.n_data;
    }
    cfg.validate().map_err(|e| config_failure(e.into()))?;
    Ok(cfg)
}

fn forward(run: &RunArgs, out: &Path, phaseless: Option<&Path>) -> Result<(), Failure> {
    let cfg = load(run)?;
    let (medium, wave) = (cfg.medium()?, cfg.wave());
    let obstacle = cfg.obstacle()?;
    let ball = cfg.reference_ball()?;
    let scene = match &ball {
        Some(b) => Scene::with_ball(obstacle.boundary(), b),
        None => Scene::single(obstacle.boundary()),
    };
    let clean = simulate(scene, &medium, &wave, cfg.solver.n_data(), cfg.solver.n_bar)?;
    let header = |kind| DataHeader::new(kind, &medium, &wave, cfg.solver.n_bar, cfg.noise.delta, cfg.noise.seed, ball);
    let phased = inject_noise(&clean, cfg.noise.delta, cfg.noise.seed)?;
    write_far_field(out, &header(DataKind::Phased), &FarFieldData::Phased(phased))?;
    if let Some(path) = phaseless {
        let data = inject_noise_phaseless(&clean.phaseless(), cfg.noise.delta, cfg.noise.seed)?;
        write_far_field(path, &header(DataKind::Phaseless), &FarFieldData::Phaseless(data))?;
    }
    Ok(())
}

fn translation_refusal() -> Failure {
    config_failure(anyhow!(
        "phaseless data need a [reference_ball]: the squared far-field moduli do not change when \
         the obstacle is translated, so its location cannot be recovered without a fixed reference"
    ))
}

fn make_data(run: &RunArgs, kind: Kind, out: &Path) -> Result<(), Failure> {
    let cfg = load(run)?;
    let (medium, wave) = (cfg.medium()?, cfg.wave());
    let obstacle = cfg.obstacle()?;
    let (n, n_bar) = (cfg.solver.n_data(), cfg.solver.n_bar);
    let (delta, seed) = (cfg.noise.delta, cfg.noise.seed);
    match kind {
        Kind::Phased => {
            let clean = simulate(Scene::single(obstacle.boundary()), &medium, &wave, n, n_bar)?;
            let header = DataHeader::new(DataKind::Phased, &medium, &wave, n_bar, delta, seed, None);
            write_far_field(out, &header, &FarFieldData::Phased(inject_noise(&clean, delta, seed)?))?;
        }
        Kind::Phaseless => {
            let ball = cfg.reference_ball()?.ok_or_else(translation_refusal)?;
            let clean = simulate(Scene::with_ball(obstacle.boundary(), &ball), &medium, &wave, n, n_bar)?;
            let data = inject_noise_phaseless(&clean.phaseless(), delta, seed)?;
            let header = DataHeader::new(DataKind::Phaseless, &medium, &wave, n_bar, delta, seed, Some(ball));
            write_far_field(out, &header, &FarFieldData::Phaseless(data))?;
        }
    }
    Ok(())
}

fn write_outputs(dir: &Path, trace: &IterationTrace, curves: &[(&str, &dyn Boundary)]) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    fs::write(dir.join("trace.csv"), format_trace(trace))?;
    fs::write(dir.join("curves.csv"), format_polylines(curves))?;
    fs::write(dir.join("final_curve.toml"), format_curve(trace.final_curve())?)?;
    Ok(())
}

fn invert(args: &InvertArgs, kind: DataKind) -> Result<(), Failure> {
    let mut cfg = load(&args.run)?;
    if let Some(inv) = cfg.inversion.as_mut() {
        if let Some(m) = args.max_iters {
            inv.max_iters = m;
        }
        if let Some(e) = args.epsilon {
            inv.epsilon = e;
        }
        if let Some(l) = args.linearization {
            inv.linearization = l;
        }
    }
    if let Some(dir) = &args.output_dir {
        cfg.output_dir = Some(dir.clone());
    }
    cfg.validate().map_err(|e| config_failure(e.into()))?;
    if kind == DataKind::Phaseless && cfg.reference_ball.is_none() {
        return Err(translation_refusal());
    }
    let out_dir = cfg
        .output_dir
        .clone()
        .ok_or_else(|| config_failure(anyhow!("missing output_dir (set it in the config or pass --output-dir)")))?;
    let (medium, wave) = (cfg.medium()?, cfg.wave());
    let recon = cfg.reconstruction()?;
    let initial = match &args.initial {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            parse_curve(&text, recon.order).map_err(|e| config_failure(e.into()))?
        }
        None => cfg.initial_guess()?,
    };
    let exact = cfg.obstacle.as_ref().map(|o| o.resolve()).transpose()?;
    let exact_boundary = exact.as_ref().map(|o| o.boundary());
    let (header, data) = read_far_field(&args.data).with_context(|| format!("reading {}", args.data.display()))?;
    header.check_against(kind, &medium, &wave, cfg.solver.n_bar)?;
    let trace = match data {
        FarFieldData::Phased(d) => run_algorithm_i(&recon, &medium, &wave, &d, &initial, exact_boundary)?,
        FarFieldData::Phaseless(d) => run_algorithm_ii(&recon, &medium, &wave, &d, &initial, exact_boundary)?,
    };

    let mut curves: Vec<(&str, &dyn Boundary)> = Vec::new();
    if let Some(b) = exact_boundary {
        curves.push(("exact", b));
    }
    curves.push(("initial", &initial));
    curves.push(("reconstructed", trace.final_curve()));
    if let Some(ball) = &recon.reference_ball {
        curves.push(("ball", ball));
    }
    write_outputs(&out_dir, &trace, &curves)?;

    let last = trace.last();
    let err = last.err_k.map(|e| format!(", Err = {e:.4e}")).unwrap_or_default();
    println!("k = {}, E = {:.4e}{err}", last.k, last.e_k);
    match &trace.status {
        TraceStatus::Converged => Ok(()),
        TraceStatus::MaxIterations => Err(Failure {
            code: EXIT_NONCONVERGENCE,
            error: anyhow!("no convergence within {} iterations (E = {:.4e}, epsilon = {})", recon.max_iters, last.e_k, recon.epsilon),
        }),
        TraceStatus::Aborted(why) => Err(Failure {
            code: EXIT_NONCONVERGENCE,
            error: anyhow!("iteration aborted after step {}: {why}", last.k),
        }),
    }
}

fn validate(corrupt_quadrature: bool) -> Result<(), Failure> {
    let report = run_validation(ValidationOptions { corrupt_quadrature })?;
    println!("{report}");
    if report.passed() {
        Ok(())
    } else {
        Err(Failure { code: EXIT_VALIDATION, error: anyhow!("validation failed") })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Forward { run, out, phaseless } => forward(run, out, phaseless.as_deref()),
        Command::MakeData { run, kind, out } => make_data(run, *kind, out),
        Command::InvertPhased(args) => invert(args, DataKind::Phased),
        Command::InvertPhaseless(args) => invert(args, DataKind::Phaseless),
        Command::Validate { corrupt_quadrature } => validate(*corrupt_quadrature),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
