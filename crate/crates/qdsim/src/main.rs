use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qdsim::config::{parse_config, RunConfig};
use qdsim::error::{Error, Result};
use qdsim::observe::{run_sweep, SweepResult, SweepSpec, SweptParam};
use qdsim::output;
use qdsim::solve::{integrate, residual_norm, steady_state_direct};
use qdsim::state::DensityMatrix;

#[derive(Parser)]
#[command(
    name = "qdsim",
    version,
    about = "Three-level quantum-dot spectra and populations"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    opts: Options,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum Cmd {
    /// Solve the steady state once and print the 9 state coordinates.
    Steady,
    /// Integrate from the ground state and write the sampled trajectory.
    Evolve,
    /// Sweep laser detuning; default grid [-10, 10] x 401.
    Spectrum,
    /// Sweep tunneling amplitude; default grid [0, 2] x 401.
    SweepTe,
    /// Sweep drive strength; default grid [0, 2] x 401.
    SweepOmega,
    /// Detuning sweep per tunneling value; axes from sweep_* and te_*.
    Grid,
}

impl Cmd {
    fn name(self) -> &'static str {
        match self {
            Cmd::Steady => "steady",
            Cmd::Evolve => "evolve",
            Cmd::Spectrum => "spectrum",
            Cmd::SweepTe => "sweep-te",
            Cmd::SweepOmega => "sweep-omega",
            Cmd::Grid => "grid",
        }
    }

    fn default_out(self) -> &'static str {
        match self {
            Cmd::Steady => "steady.csv",
            Cmd::Evolve => "evolve.csv",
            Cmd::Spectrum => "spectrum.csv",
            Cmd::SweepTe => "sweep-te.csv",
            Cmd::SweepOmega => "sweep-omega.csv",
            Cmd::Grid => "grid.csv",
        }
    }
}

/// Every config key doubles as a long flag; flags override file values.
#[derive(Args)]
struct Options {
    /// Flat key = value configuration file.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Output file (CSV); defaults to <subcommand>.csv.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Worker threads for sweeps; defaults to the rayon heuristic.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[arg(long, global = true, value_name = "X", allow_negative_numbers = true)]
    omega_rabi: Option<f64>,
    #[arg(long, global = true, value_name = "X", allow_negative_numbers = true)]
    delta1: Option<f64>,
    #[arg(long, global = true, value_name = "X", allow_negative_numbers = true)]
    omega12: Option<f64>,
    #[arg(long, global = true, value_name = "X", allow_negative_numbers = true)]
    t_e: Option<f64>,
    #[arg(long, global = true, value_name = "X", allow_negative_numbers = true)]
    gamma1: Option<f64>,
    #[arg(long, global = true, value_name = "X", allow_negative_numbers = true)]
    gamma2: Option<f64>,
    #[arg(long, global = true, value_name = "X", allow_negative_numbers = true)]
    gamma3: Option<f64>,
    #[arg(long, global = true, value_name = "X", allow_negative_numbers = true)]
    big_gamma10: Option<f64>,
    #[arg(long, global = true, value_name = "X", allow_negative_numbers = true)]
    big_gamma12: Option<f64>,
    #[arg(long, global = true, value_name = "X", allow_negative_numbers = true)]
    big_gamma20: Option<f64>,
    /// Equation coupling variant: corrected | verbatim.
    #[arg(long, global = true, value_name = "MODE")]
    mode: Option<String>,
    #[arg(long, global = true, value_name = "X", allow_negative_numbers = true)]
    dt: Option<f64>,
    #[arg(long, global = true, value_name = "X", allow_negative_numbers = true)]
    t_max: Option<f64>,
    #[arg(long, global = true, value_name = "X", allow_negative_numbers = true)]
    relax_tol: Option<f64>,
    #[arg(long, global = true, value_name = "N")]
    sample_stride: Option<usize>,
    #[arg(long, global = true, value_name = "X", allow_negative_numbers = true)]
    sweep_start: Option<f64>,
    #[arg(long, global = true, value_name = "X", allow_negative_numbers = true)]
    sweep_stop: Option<f64>,
    #[arg(long, global = true, value_name = "N")]
    sweep_count: Option<usize>,
    #[arg(long, global = true, value_name = "X", allow_negative_numbers = true)]
    te_start: Option<f64>,
    #[arg(long, global = true, value_name = "X", allow_negative_numbers = true)]
    te_stop: Option<f64>,
    #[arg(long, global = true, value_name = "N")]
    te_count: Option<usize>,
    #[arg(long, global = true, value_name = "N")]
    precision: Option<usize>,
    /// Accepted and ignored; the detunings already fix the level spacing.
    #[arg(long, global = true, value_name = "X", allow_negative_numbers = true)]
    omega10: Option<f64>,
}

impl Options {
    fn overrides(&self) -> Vec<(String, String)> {
        let mut v: Vec<(String, String)> = Vec::new();
        fn push<T: std::fmt::Display>(v: &mut Vec<(String, String)>, key: &str, x: &Option<T>) {
            if let Some(x) = x {
                v.push((key.to_string(), x.to_string()));
            }
        }
        push(&mut v, "omega_rabi", &self.omega_rabi);
        push(&mut v, "delta1", &self.delta1);
        push(&mut v, "omega12", &self.omega12);
        push(&mut v, "t_e", &self.t_e);
        push(&mut v, "gamma1", &self.gamma1);
        push(&mut v, "gamma2", &self.gamma2);
        push(&mut v, "gamma3", &self.gamma3);
        push(&mut v, "big_gamma10", &self.big_gamma10);
        push(&mut v, "big_gamma12", &self.big_gamma12);
        push(&mut v, "big_gamma20", &self.big_gamma20);
        push(&mut v, "mode", &self.mode);
        push(&mut v, "dt", &self.dt);
        push(&mut v, "t_max", &self.t_max);
        push(&mut v, "relax_tol", &self.relax_tol);
        push(&mut v, "sample_stride", &self.sample_stride);
        push(&mut v, "sweep_start", &self.sweep_start);
        push(&mut v, "sweep_stop", &self.sweep_stop);
        push(&mut v, "sweep_count", &self.sweep_count);
        push(&mut v, "te_start", &self.te_start);
        push(&mut v, "te_stop", &self.te_stop);
        push(&mut v, "te_count", &self.te_count);
        push(&mut v, "precision", &self.precision);
        push(&mut v, "omega10", &self.omega10);
        v
    }
}

fn main() -> ExitCode {
    // clap's native usage-error exit code is 2, which is reserved here for
    // partial sweep failure; any argument problem is a configuration error.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let info = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            e.print().expect("diagnostic stream");
            return if info {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("qdsim: error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let text = match &cli.opts.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?,
        None => String::new(),
    };
    let (mut cfg, notices) = parse_config(&text, &cli.opts.overrides())?;
    for n in &notices {
        eprintln!("qdsim: notice: {n}");
    }
    fill_sweep_defaults(&mut cfg, cli.cmd);

    if let Some(n) = cli.opts.threads {
        if n == 0 {
            return Err(Error::Config("threads must be >= 1".into()));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        pool.install(|| dispatch(cli, &cfg))
    } else {
        dispatch(cli, &cfg)
    }
}

/// Sweeping subcommands each carry their own default axis; explicit
/// sweep_* settings win for all of them.
fn fill_sweep_defaults(cfg: &mut RunConfig, cmd: Cmd) {
    let (start, stop, count) = match cmd {
        Cmd::Spectrum | Cmd::Grid => (-10.0, 10.0, 401),
        Cmd::SweepTe | Cmd::SweepOmega => (0.0, 2.0, 401),
        Cmd::Steady | Cmd::Evolve => return,
    };
    cfg.sweep_start.get_or_insert(start);
    cfg.sweep_stop.get_or_insert(stop);
    cfg.sweep_count.get_or_insert(count);
}

fn out_path(cli: &Cli) -> PathBuf {
    cli.opts
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(cli.cmd.default_out()))
}

fn dispatch(cli: &Cli, cfg: &RunConfig) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Steady => {
            let rho = steady_state_direct(&cfg.params)?;
            let residual = residual_norm(&rho, &cfg.params);
            print!("{}", output::steady_report(&rho, residual, cfg.precision));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Evolve => {
            let traj = integrate(&DensityMatrix::ground(), &cfg.params, &cfg.solver)?;
            output::write_file(&out_path(cli), &output::trajectory_csv(&traj, cfg))?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Spectrum => write_sweep(cli, cfg, SweptParam::Delta1),
        Cmd::SweepTe => write_sweep(cli, cfg, SweptParam::TE),
        Cmd::SweepOmega => write_sweep(cli, cfg, SweptParam::OmegaRabi),
        Cmd::Grid => {
            let mut blocks = Vec::with_capacity(cfg.te_count);
            let mut failed = 0usize;
            for i in 0..cfg.te_count {
                let te = cfg.te_start
                    + (cfg.te_stop - cfg.te_start) * (i as f64 / (cfg.te_count - 1) as f64);
                let mut base = cfg.params;
                base.t_e = te;
                let result = run_sweep(&sweep_spec(cfg, SweptParam::Delta1, base)?)?;
                failed += report_failures(cli.cmd, &result);
                blocks.push((te, result));
            }
            output::write_file(&out_path(cli), &output::grid_csv(&blocks, cfg))?;
            Ok(exit_for(failed))
        }
    }
}

fn sweep_spec(
    cfg: &RunConfig,
    param: SweptParam,
    base: qdsim::model::ModelParams,
) -> Result<SweepSpec> {
    // fill_sweep_defaults ran for every sweeping subcommand.
    let spec = SweepSpec {
        param,
        start: cfg.sweep_start.unwrap(),
        stop: cfg.sweep_stop.unwrap(),
        count: cfg.sweep_count.unwrap(),
        base,
    };
    spec.validate()?;
    Ok(spec)
}

fn write_sweep(cli: &Cli, cfg: &RunConfig, param: SweptParam) -> Result<ExitCode> {
    let result = run_sweep(&sweep_spec(cfg, param, cfg.params)?)?;
    let failed = report_failures(cli.cmd, &result);
    output::write_file(&out_path(cli), &output::sweep_csv(&result, cfg))?;
    Ok(exit_for(failed))
}

fn report_failures(cmd: Cmd, result: &SweepResult) -> usize {
    for f in &result.failures {
        eprintln!(
            "qdsim: {}: point {}={} skipped: {}",
            cmd.name(),
            result.param.key(),
            f.swept,
            f.error
        );
    }
    result.failures.len()
}

fn exit_for(failed: usize) -> ExitCode {
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}
