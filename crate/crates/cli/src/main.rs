//! `corrtherm`: QFI queries, scenario sweeps and environment checks.
//!
//! All variances are in shot-noise units where the vacuum quadrature
//! variance is 1/2 (`[q, p] = i`).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use corrtherm_core::scenarios::table::{format_sig, write_csv};
use corrtherm_core::{
    check_physical, coherent_state, make_source, ordering_report, preset, qfi_coherent_analytic,
    qfi_numeric, source_for_signal, sweep, tau_grid, BenchmarkParams, ChannelParams,
    EnvironmentSpec, Error, ScenarioName, ScenarioPreset, TwoModeCov,
};

const EXIT_VALIDATION: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_IO: u8 = 4;

const UNITS: &str =
    "Units: quadrature variances are in shot-noise units (vacuum variance 1/2, [q,p] = i); \
photon numbers are mean occupations; transmissivities are power transmissions in [0,1].";

#[derive(Parser)]
#[command(
    name = "corrtherm",
    version,
    about = "Loss estimation with correlated-thermal Gaussian probes"
)]
#[command(after_help = UNITS)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// QFI H(τ) of one probe at one transmissivity τ
    #[command(after_help = UNITS)]
    Qfi(QfiArgs),
    /// Evaluate every curve of a scenario on a τ grid and write CSV
    #[command(after_help = UNITS)]
    Sweep(SweepArgs),
    /// Physicality and separability of the environment state (E1, E2); exits 0 iff physical
    #[command(after_help = UNITS)]
    Check(EnvArgs),
    /// List the built-in scenarios
    #[command(after_help = UNITS)]
    Presets,
}

#[derive(Clone, Copy, ValueEnum)]
enum Probe {
    /// Coherent state with n-signal photons
    Coherent,
    /// Correlated-thermal source (needs --eta)
    Source,
    /// Thermal state on A, faint thermal idler on B (the eta = 1 source)
    SingleThermal,
}

/// Environment of the decoherence channel.
#[derive(Args, Clone, Default)]
struct EnvArgs {
    /// Bath variance ω on both modes, ω = n_env + 1/2 (>= 1/2)
    #[arg(long, conflicts_with = "n_env")]
    omega: Option<f64>,
    /// Mean bath photons n_env on both modes; sets ω = n_env + 1/2
    #[arg(long)]
    n_env: Option<f64>,
    /// Bath variance ω1 of ancilla E1 (couples to signal A); overrides --omega
    #[arg(long)]
    omega1: Option<f64>,
    /// Bath variance ω2 of ancilla E2 (couples to idler B); overrides --omega
    #[arg(long)]
    omega2: Option<f64>,
    /// q-q correlation g = <q_E1 q_E2> of the bath
    #[arg(long, allow_negative_numbers = true)]
    g: Option<f64>,
    /// p-p correlation g' = <p_E1 p_E2> of the bath
    #[arg(long, allow_negative_numbers = true)]
    gprime: Option<f64>,
}

impl EnvArgs {
    fn omegas(&self) -> (Option<f64>, Option<f64>) {
        let both = self.omega.or(self.n_env.map(|n| n + 0.5));
        (self.omega1.or(both), self.omega2.or(both))
    }

    fn block(&self) -> TwoModeCov {
        let (w1, w2) = self.omegas();
        let (w1, w2) = (w1.unwrap_or(0.5), w2.unwrap_or(0.5));
        TwoModeCov::new(w1, w2, self.g.unwrap_or(0.0), self.gprime.unwrap_or(0.0))
    }

    fn is_empty(&self) -> bool {
        let (w1, w2) = self.omegas();
        w1.is_none() && w2.is_none() && self.g.is_none() && self.gprime.is_none()
    }

    /// `base` fields replaced by whatever was given on the command line.
    fn apply(&self, t0: f64, base: &EnvironmentSpec) -> Result<EnvironmentSpec, Error> {
        let (w1, w2) = self.omegas();
        EnvironmentSpec::new(
            t0,
            w1.unwrap_or(base.omega1()),
            w2.unwrap_or(base.omega2()),
            self.g.unwrap_or(base.g()),
            self.gprime.unwrap_or(base.gprime()),
        )
    }
}

#[derive(Args)]
struct QfiArgs {
    #[arg(long, value_enum, default_value = "source")]
    probe: Probe,
    /// Source beam-splitter transmissivity η in (0,1]
    #[arg(long)]
    eta: Option<f64>,
    /// Mean photons n̄ on the signal mode A
    #[arg(long, default_value_t = 10.0)]
    n_signal: f64,
    /// Mean photons n̄_L of the faint thermal input
    #[arg(long, default_value_t = 0.0)]
    n_low: f64,
    /// Transmissivity τ of the loss being estimated, in (0,1)
    #[arg(long, allow_negative_numbers = true)]
    tau: f64,
    /// Transmissivity T0 of the known decoherence, in (0,1]
    #[arg(long, default_value_t = 1.0)]
    t0: f64,
    #[command(flatten)]
    env: EnvArgs,
    /// Initial finite-difference step dτ (halved until converged)
    #[arg(long, allow_negative_numbers = true)]
    dtau: Option<f64>,
    /// Phase of the coherent amplitude, radians
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    phase: f64,
}

#[derive(Args)]
struct SweepArgs {
    /// Built-in scenario (see `presets`); without it every parameter must be given
    #[arg(long)]
    scenario: Option<String>,
    /// Mean photons n̄ on the signal mode A
    #[arg(long)]
    n_signal: Option<f64>,
    /// Mean photons n̄_L of the faint thermal input
    #[arg(long)]
    n_low: Option<f64>,
    /// Source transmissivities η, comma separated
    #[arg(long, value_delimiter = ',')]
    eta: Option<Vec<f64>>,
    /// Transmissivity T0 of the known decoherence, in (0,1]
    #[arg(long)]
    t0: Option<f64>,
    #[command(flatten)]
    env: EnvArgs,
    /// Smallest τ of the grid
    #[arg(long, default_value_t = 0.01, allow_negative_numbers = true)]
    min: f64,
    /// Largest τ of the grid
    #[arg(long, default_value_t = 0.99, allow_negative_numbers = true)]
    max: f64,
    /// Number of evenly spaced τ points
    #[arg(long, default_value_t = 99)]
    steps: usize,
    /// CSV output path
    #[arg(long)]
    out: PathBuf,
    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
}

enum Failure {
    Core(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Domain(_) => EXIT_VALIDATION,
        Error::Numerical(_) => EXIT_NUMERICAL,
        Error::Io(_) => EXIT_IO,
        Error::AtPoint { source, .. } => exit_code(source),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Qfi(args) => cmd_qfi(&args),
        Command::Sweep(args) => cmd_sweep(&args),
        Command::Check(args) => cmd_check(&args),
        Command::Presets => {
            cmd_presets();
            Ok(ExitCode::SUCCESS)
        }
    };
    match result {
        Ok(code) => code,
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_VALIDATION)
        }
    }
}

fn cmd_qfi(args: &QfiArgs) -> Result<ExitCode, Failure> {
    let env = args
        .env
        .apply(args.t0, &EnvironmentSpec::thermal(args.t0, 0.5)?)?;
    // surfaces the [0,1] message before the open-interval QFI check
    ChannelParams::new(args.tau, env)?;
    let probe = match args.probe {
        Probe::Coherent => coherent_state(args.n_signal, args.phase)?,
        Probe::Source => {
            let eta = args
                .eta
                .ok_or_else(|| Failure::Usage("--probe source needs --eta".into()))?;
            make_source(&source_for_signal(args.n_signal, eta, args.n_low)?)
        }
        Probe::SingleThermal => make_source(&source_for_signal(args.n_signal, 1.0, args.n_low)?),
    };
    let r = qfi_numeric(&probe, &env, args.tau, args.dtau)?;
    let bench = qfi_coherent_analytic(&BenchmarkParams {
        n_bar: args.n_signal,
        tau: args.tau,
        t0: args.t0,
        omega: env.omega1(),
    })?;
    println!(
        "tau={} H={} dtau={} converged={}",
        format_sig(r.tau),
        format_sig(r.h),
        format_sig(r.dtau),
        r.converged
    );
    println!("benchmark H_coh={}", format_sig(bench));
    Ok(ExitCode::SUCCESS)
}

fn sweep_preset(args: &SweepArgs) -> Result<ScenarioPreset, Failure> {
    let base = match &args.scenario {
        Some(name) => Some(preset(name.parse::<ScenarioName>()?)),
        None => None,
    };
    let (name, base_n, base_nl, base_env, base_etas) = match &base {
        Some(p) => (
            p.name.clone(),
            Some(p.n_signal),
            Some(p.n_low),
            Some(p.env),
            Some(p.eta_list.clone()),
        ),
        None => ("custom".to_string(), None, None, None, None),
    };
    let missing = |flag: &str| Failure::Usage(format!("without --scenario, {flag} is required"));
    let n_signal = args
        .n_signal
        .or(base_n)
        .ok_or_else(|| missing("--n-signal"))?;
    let n_low = args.n_low.or(base_nl).unwrap_or(0.0);
    let etas = args
        .eta
        .clone()
        .or(base_etas)
        .ok_or_else(|| missing("--eta"))?;
    let env = match base_env {
        Some(e) => args.env.apply(args.t0.unwrap_or(e.t0()), &e)?,
        None => {
            let t0 = args.t0.ok_or_else(|| missing("--t0"))?;
            if args.env.is_empty() {
                return Err(missing("--omega (or --n-env / --omega1 --omega2)"));
            }
            args.env.apply(t0, &EnvironmentSpec::thermal(t0, 0.5)?)?
        }
    };
    Ok(ScenarioPreset::new(name, n_signal, n_low, env, etas)?)
}

fn cmd_sweep(args: &SweepArgs) -> Result<ExitCode, Failure> {
    let p = sweep_preset(args)?;
    let grid = tau_grid(args.min, args.max, args.steps)?;
    let rows = match args.threads {
        Some(0) => return Err(Failure::Usage("--threads must be >= 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Failure::Usage(e.to_string()))?
            .install(|| sweep(&p, &grid))?,
        None => sweep(&p, &grid)?,
    };
    let mut buf = Vec::new();
    write_csv(&mut buf, &rows)?;
    write_atomically(&args.out, &buf)?;
    print!("{}", ordering_report(&rows)?);
    println!("rows: {}", rows.len());
    println!("wrote {}", args.out.display());
    Ok(ExitCode::SUCCESS)
}

/// Writes to a sibling temporary file and renames it into place.
fn write_atomically(path: &Path, bytes: &[u8]) -> Result<(), Error> {
    let io = |e: std::io::Error| Error::Io(format!("{}: {e}", path.display()));
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::Io(format!("{}: not a file path", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(file_name);
    tmp_name.push(format!(".{}.tmp", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let result = fs::File::create(&tmp)
        .and_then(|mut f| f.write_all(bytes).and_then(|_| f.sync_all()))
        .and_then(|_| fs::rename(&tmp, path));
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(io)
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn cmd_check(args: &EnvArgs) -> Result<ExitCode, Failure> {
    let block = args.block();
    let r = check_physical(&block);
    println!(
        "omega1={} omega2={} g={} gprime={}",
        format_sig(block.a),
        format_sig(block.b),
        format_sig(block.c1),
        format_sig(block.c2)
    );
    println!("nu^2 = {}", format_sig(r.nu_sq));
    println!("nu_tilde^2 = {}", format_sig(r.nu_tilde_sq));
    println!("|g| < sqrt(omega1 omega2): {}", pass(r.qq_bound));
    println!("|g'| < sqrt(omega1 omega2): {}", pass(r.pp_bound));
    println!("nu^2 >= 1/4: {}", pass(r.nu_bound));
    println!("physical: {}", pass(r.physical()));
    if r.physical() {
        println!("separable: {}", pass(r.separable()));
        Ok(ExitCode::SUCCESS)
    } else {
        println!("separable: n/a");
        Ok(ExitCode::FAILURE)
    }
}

fn cmd_presets() {
    for name in ScenarioName::ALL {
        let p = preset(name);
        let env = p.env;
        let omega = if env.omega1() == env.omega2() {
            format!("omega={}", format_sig(env.omega1()))
        } else {
            format!(
                "omega1={} omega2={}",
                format_sig(env.omega1()),
                format_sig(env.omega2())
            )
        };
        let etas: Vec<String> = p.eta_list.iter().map(|&e| format_sig(e)).collect();
        println!(
            "{} n_signal={} n_low={} t0={} {omega} g={} gprime={} eta={}",
            p.name,
            format_sig(p.n_signal),
            format_sig(p.n_low),
            format_sig(env.t0()),
            format_sig(env.g()),
            format_sig(env.gprime()),
            etas.join(",")
        );
    }
}
