//! Command-line driver: ingest chain/spec JSON, run named analyses, emit
//! CSV/JSON artifacts. Exit codes: 0 success, 1 input error, 2 a certified
//! bound was violated or a validation criterion failed.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use wpi::bounds::{DriftCondition, LocalPI};
use wpi::chain::{weak_conductance, ConductanceMode, FiniteKernel, IndicatorMode};
use wpi::io::{self, ChainSpecJson, RunMetadata};
use wpi::mcmc;
use wpi::rate::{
    alpha_to_beta, gamma_from_beta, ConvergenceProfile, MonotoneRate, Parametrization,
    ProfileOrigin, Sieve, WpiCertificate,
};
use wpi::validate;

#[derive(Parser)]
#[command(
    name = "wpi",
    about = "Weak Poincaré inequalities for Markov chains: certified rates and exact validation"
)]
struct Cli {
    /// RNG seed recorded in every artifact.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Worker count for enumeration and Monte Carlo loops.
    #[arg(long, global = true, default_value_t = 1)]
    parallelism: usize,
    /// Output path (CSV artifacts; a sibling .meta.json records the run).
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Tolerance override where a command supports one.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert a rate between the α/β parametrizations and emit γ(n).
    RatesConvert {
        /// Rate spec: `powerlaw:c,p`, `exppower:c,lambda,theta`,
        /// `constant:c`, or `@rate.json`.
        #[arg(long, conflicts_with = "alpha")]
        beta: Option<String>,
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        a_bound: f64,
        #[arg(long, default_value_t = 100)]
        n_max: usize,
    },
    /// Stationarity, reversibility, spectrum and the certified-vs-exact
    /// decay table for a finite chain.
    FiniteAnalyze {
        #[arg(long)]
        input: PathBuf,
        /// Observable values file (JSON array); default: indicator of
        /// state 0.
        #[arg(long)]
        observable: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        n_max: usize,
    },
    /// Weak conductance profile by subset enumeration.
    Conductance {
        #[arg(long)]
        input: PathBuf,
        /// `exhaustive` or `sampled:<count>`.
        #[arg(long, default_value = "exhaustive")]
        mode: String,
    },
    /// Independence-sampler spectrum table with closed-form residuals.
    Imh {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long, default_value_t = 200)]
        trunc: usize,
        #[arg(long, default_value_t = 20)]
        m_max: usize,
    },
    /// Pseudo-marginal ABC chain: indicator β*-floor table and envelope.
    Abc {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 1)]
        particles: usize,
        #[arg(long, default_value_t = 14)]
        x_max: usize,
    },
    /// Closed-form RWM conductance/gap bounds, with optional Monte Carlo.
    RwmBounds {
        /// `gaussian` or `general-convex`.
        #[arg(long)]
        regime: String,
        #[arg(long)]
        varsigma: f64,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        #[arg(long, default_value_t = 1.0)]
        l: f64,
        /// Monte Carlo sample count (0 skips simulation).
        #[arg(long, default_value_t = 0)]
        samples: usize,
    },
    /// Verify a drift condition and emit the certified γ profile.
    DriftWpi {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 200)]
        n_max: usize,
    },
    /// CLT verdict from a rate spec or an exact finite chain.
    Clt {
        #[arg(long, conflicts_with = "input")]
        gamma: Option<String>,
        /// Chain JSON; pairs with --observable.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        observable: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        n_max: usize,
    },
    /// Run the full acceptance suite (one pass/fail line per criterion).
    ValidateAll,
}

#[derive(Debug)]
enum CliError {
    Input(String),
    BoundViolated(String),
}

impl From<wpi::Error> for CliError {
    fn from(e: wpi::Error) -> Self {
        match e {
            wpi::Error::AssumptionViolated(m) => CliError::BoundViolated(m),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Input(format!("bad JSON: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::BoundViolated(msg)) => {
            eprintln!("bound violated: {msg}");
            ExitCode::from(2)
        }
    }
}

fn meta(cli: &Cli) -> RunMetadata {
    RunMetadata { seed: cli.seed, parallelism: cli.parallelism }
}

/// Print a JSON artifact to stdout with run metadata attached.
fn emit_json<T: Serialize>(cli: &Cli, label: &str, value: &T) -> Result<(), CliError> {
    #[derive(Serialize)]
    struct Artifact<'a, T> {
        label: &'a str,
        meta: RunMetadata,
        #[serde(flatten)]
        value: &'a T,
    }
    let art = Artifact { label, meta: meta(cli), value };
    println!("{}", serde_json::to_string_pretty(&art)?);
    Ok(())
}

/// Write CSV rows to --output (plus a .meta.json sibling) or stdout.
fn emit_csv(cli: &Cli, header: &[&str], rows: &[Vec<f64>]) -> Result<(), CliError> {
    match &cli.output {
        Some(path) => {
            io::write_csv(path, header, rows)?;
            let meta_path = path.with_extension(format!(
                "{}meta.json",
                path.extension()
                    .map(|e| format!("{}.", e.to_string_lossy()))
                    .unwrap_or_default()
            ));
            std::fs::write(&meta_path, serde_json::to_string_pretty(&meta(cli))?)?;
            eprintln!("wrote {} rows to {}", rows.len(), path.display());
        }
        None => {
            println!("{}", header.join(","));
            for row in rows {
                let line: Vec<String> = row.iter().map(|v| io::fmt_f64(*v)).collect();
                println!("{}", line.join(","));
            }
        }
    }
    Ok(())
}

fn parse_rate(spec: &str) -> Result<MonotoneRate, CliError> {
    if let Some(path) = spec.strip_prefix('@') {
        let text = std::fs::read_to_string(path)?;
        return Ok(serde_json::from_str(&text)?);
    }
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| CliError::Input(format!("rate spec `{spec}` needs kind:params")))?;
    let params: Vec<f64> = rest
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Input(format!("bad rate parameter in `{spec}`: {e}")))?;
    match (kind, params.as_slice()) {
        ("powerlaw", [c, p]) => Ok(MonotoneRate::PowerLaw { c: *c, p: *p }),
        ("exppower", [c, lambda, theta]) => Ok(MonotoneRate::ExpPower {
            c: *c,
            lambda: *lambda,
            theta: *theta,
        }),
        ("constant", [c]) => Ok(MonotoneRate::Constant { c: *c }),
        _ => Err(CliError::Input(format!("unrecognized rate spec `{spec}`"))),
    }
}

fn load_kernel(path: &Path) -> Result<FiniteKernel, CliError> {
    let text = std::fs::read_to_string(path)?;
    let spec: ChainSpecJson = serde_json::from_str(&text)?;
    Ok(spec.to_kernel()?)
}

fn load_observable(
    kernel: &FiniteKernel,
    path: Option<&PathBuf>,
) -> Result<wpi::chain::Observable, CliError> {
    match path {
        Some(p) => {
            let values: Vec<f64> = serde_json::from_str(&std::fs::read_to_string(p)?)?;
            if values.len() != kernel.n() {
                return Err(CliError::Input(format!(
                    "observable has {} values for a {}-state chain",
                    values.len(),
                    kernel.n()
                )));
            }
            Ok(kernel.observable(values))
        }
        None => Ok(kernel.indicator(&[0])),
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::RatesConvert { beta, alpha, a_bound, n_max } => {
            let cert = match (beta, alpha) {
                (Some(b), None) => {
                    WpiCertificate::beta(Sieve::OscSq, parse_rate(b)?, *a_bound)?
                }
                (None, Some(a)) => beta_of(
                    WpiCertificate::alpha(Sieve::OscSq, parse_rate(a)?, *a_bound)?,
                )?,
                _ => return Err(CliError::Input("give exactly one of --beta/--alpha".into())),
            };
            let gamma = gamma_from_beta(&cert, *n_max)?;
            emit_json(cli, "certificate", &cert)?;
            emit_csv(cli, &["n", "gamma"], &io::profile_rows(&gamma))
        }
        Command::FiniteAnalyze { input, observable, n_max } => {
            let kernel = load_kernel(input)?;
            let f = load_observable(&kernel, observable.as_ref())?;
            let t = kernel.multiplicative_reversibilization()?;
            let profile = weak_conductance(&t, ConductanceMode::Exhaustive, cli.parallelism)?;
            let cert = alpha_to_beta(&profile.to_alpha_certificate()?)?;
            let gamma = gamma_from_beta(&cert, *n_max)?;
            let decay = t.pn_decay(&f, *n_max);
            let phi = f.osc * f.osc;
            #[derive(Serialize)]
            struct Report {
                states: usize,
                reversible: bool,
                right_spectral_gap: Option<f64>,
                irreducible: bool,
                kappa_zero: f64,
            }
            let report = Report {
                states: kernel.n(),
                reversible: kernel.is_reversible(),
                right_spectral_gap: kernel.right_spectral_gap().ok(),
                irreducible: wpi::chain::rupi_check(&kernel).irreducible,
                kappa_zero: profile.kappa_zero(),
            };
            emit_json(cli, "finite-analyze", &report)?;
            let mut rows = Vec::with_capacity(*n_max + 1);
            for (n, d) in decay.iter().enumerate() {
                let bound = gamma.value(n) * phi;
                if *d > bound + 1e-9 {
                    return Err(CliError::BoundViolated(format!(
                        "exact decay {d:.6e} exceeds certified bound {bound:.6e} at n = {n} \
                         (observable as supplied)"
                    )));
                }
                rows.push(vec![n as f64, *d, bound]);
            }
            emit_csv(cli, &["n", "exact", "bound"], &rows)
        }
        Command::Conductance { input, mode } => {
            let kernel = load_kernel(input)?;
            let mode = if mode == "exhaustive" {
                ConductanceMode::Exhaustive
            } else if let Some(count) = mode.strip_prefix("sampled:") {
                ConductanceMode::SampledSets {
                    count: count
                        .parse()
                        .map_err(|e| CliError::Input(format!("bad sample count: {e}")))?,
                    seed: cli.seed,
                }
            } else {
                return Err(CliError::Input(format!("unknown mode `{mode}`")));
            };
            let profile = weak_conductance(&kernel, mode, cli.parallelism)?;
            emit_json(cli, "conductance", &profile)?;
            let rows: Vec<Vec<f64>> = profile
                .breakpoints()
                .iter()
                .map(|bp| vec![bp.u_level, bp.ratio, bp.witness as f64])
                .collect();
            emit_csv(cli, &["u", "kappa", "witness_mask"], &rows)
        }
        Command::Imh { a, b, trunc, m_max } => {
            let chain = mcmc::ImhGeometric::new(*a, *b, *trunc)?;
            let tol = cli.tol.unwrap_or(1e-8);
            let validation = mcmc::imh_spectrum_validate(&chain, *m_max, tol)?;
            let lam = mcmc::imh_spectrum(*a, *b, *m_max)?;
            emit_json(cli, "imh-validation", &validation)?;
            let rows: Vec<Vec<f64>> = (1..=*m_max)
                .map(|m| vec![m as f64, lam[m], validation.residuals[m - 1]])
                .collect();
            emit_csv(cli, &["m", "lambda_m", "matrix_residual"], &rows)
        }
        Command::Abc { a, q, particles, x_max } => {
            let chain = mcmc::AbcChain::new(*a, *q, *particles, *x_max)?;
            let (kernel, _) = mcmc::abc_build(&chain)?;
            let floor = mcmc::abc_beta_floor(&chain);
            let s_grid = wpi::num::log_grid(2.0, 16384.0, 60);
            let (beta_hat, _) = wpi::chain::beta_star_lower(
                &kernel,
                &[],
                &s_grid,
                IndicatorMode::Exhaustive { max_states: 28 },
                None,
                cli.parallelism,
            )?;
            #[derive(Serialize)]
            struct FloorInfo {
                beta_star_exponent: f64,
                joint_states: usize,
            }
            emit_json(cli, "abc-floor", &FloorInfo {
                beta_star_exponent: floor.beta_star_exponent,
                joint_states: kernel.n(),
            })?;
            let rows: Vec<Vec<f64>> =
                s_grid.iter().map(|s| vec![*s, beta_hat.eval(*s)]).collect();
            emit_csv(cli, &["s", "beta_star_lower"], &rows)
        }
        Command::RwmBounds { regime, varsigma, d, m, l, samples } => {
            let regime = match regime.as_str() {
                "gaussian" => mcmc::RwmRegime::Gaussian,
                "general-convex" => mcmc::RwmRegime::GeneralConvex,
                other => return Err(CliError::Input(format!("unknown regime `{other}`"))),
            };
            let mut spec = mcmc::RwmSpec::gaussian(*d, 1.0, *varsigma);
            spec.m = *m;
            spec.l = *l;
            let bounds = mcmc::rwm_gap_bounds(&spec, regime)?;
            #[derive(Serialize)]
            struct RwmReport {
                bounds: mcmc::GapBounds,
                kappa_limit_times_sqrt_d: f64,
                mc: Option<mcmc::McConductance>,
            }
            let mc = if *samples > 0 {
                let est = mcmc::rwm_conductance_mc(
                    &spec,
                    mcmc::SetDescriptor::HalfSpace,
                    *samples,
                    cli.seed,
                    cli.parallelism,
                );
                if matches!(regime, mcmc::RwmRegime::Gaussian)
                    && bounds.conductance_lower > est.ratio + 3.0 * est.ratio_stderr
                {
                    return Err(CliError::BoundViolated(format!(
                        "conductance lower bound {:.6e} exceeds half-space estimate {:.6e}",
                        bounds.conductance_lower, est.ratio
                    )));
                }
                Some(est)
            } else {
                None
            };
            emit_json(cli, "rwm-bounds", &RwmReport {
                bounds,
                kappa_limit_times_sqrt_d: mcmc::gaussian_kappa_limit(*varsigma),
                mc,
            })
        }
        Command::DriftWpi { input, n_max } => {
            #[derive(serde::Deserialize)]
            struct DriftJob {
                chain: ChainSpecJson,
                drift: DriftCondition,
                /// Optional local PI constant; defaults to the restricted
                /// spectral gap of the drift's small set.
                local_pi_constant: Option<f64>,
            }
            let job: DriftJob = serde_json::from_str(&std::fs::read_to_string(input)?)?;
            let kernel = job.chain.to_kernel()?;
            let report = wpi::bounds::verify_drift(&kernel, &job.drift)?;
            let lpi = match job.local_pi_constant {
                Some(k) => LocalPI {
                    c_set: job.drift.c_set.clone(),
                    constant: k,
                    flavor: wpi::bounds::LocalPiFlavor::Local,
                },
                None => LocalPI::from_restricted_gap(&kernel, job.drift.c_set.clone())?,
            };
            let mu_c: f64 = job.drift.c_set.iter().map(|&x| kernel.mu()[x]).sum();
            let cert = wpi::bounds::wpi_from_drift(Some(&kernel), &job.drift, &lpi, mu_c)?;
            let gamma = gamma_from_beta(&cert, *n_max)?;
            #[derive(Serialize)]
            struct DriftOut {
                min_slack: f64,
                local_pi_constant: f64,
                certificate: WpiCertificate,
            }
            emit_json(cli, "drift-wpi", &DriftOut {
                min_slack: report.min_slack,
                local_pi_constant: lpi.constant,
                certificate: cert,
            })?;
            emit_csv(cli, &["n", "gamma"], &io::profile_rows(&gamma))
        }
        Command::Clt { gamma, input, observable, n_max } => {
            let report = match (gamma, input) {
                (Some(spec), None) => {
                    let rate = parse_rate(spec)?;
                    let values: Vec<f64> = (0..=*n_max)
                        .map(|n| if n == 0 { rate.eval(1e-12).min(1.0) } else { rate.eval(n as f64) })
                        .collect();
                    let profile = ConvergenceProfile::new(values, ProfileOrigin::Empirical);
                    mcmc::clt_check_profile(&profile, 1.0)?
                }
                (None, Some(path)) => {
                    let kernel = load_kernel(path)?;
                    let f = load_observable(&kernel, observable.as_ref())?;
                    mcmc::clt_check_exact(&kernel, &f, *n_max)?
                }
                _ => return Err(CliError::Input("give exactly one of --gamma/--input".into())),
            };
            emit_json(cli, "clt", &report)?;
            let rows: Vec<Vec<f64>> = report
                .partial_sums
                .iter()
                .enumerate()
                .map(|(i, s)| vec![(i + 1) as f64, *s])
                .collect();
            emit_csv(cli, &["n", "partial_sum"], &rows)
        }
        Command::ValidateAll => {
            let outcomes = validate::run_all(cli.parallelism.max(1));
            let mut all_ok = true;
            for o in &outcomes {
                println!("{}", o.line());
                all_ok &= o.passed;
            }
            if all_ok {
                Ok(())
            } else {
                Err(CliError::BoundViolated("one or more criteria failed".into()))
            }
        }
    }
}

fn beta_of(cert: WpiCertificate) -> Result<WpiCertificate, CliError> {
    match cert.parametrization {
        Parametrization::Beta => Ok(cert),
        Parametrization::Alpha => Ok(alpha_to_beta(&cert)?),
    }
}
