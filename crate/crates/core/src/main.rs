use clap::{Args, Parser, Subcommand, ValueEnum};
use fracwave::battle_lemarie::BLSystem;
use fracwave::besov::{besov_norm_proxy, coefficients};
use fracwave::frac_wavelets::{molecule_check, FracWavelet, MoleculeGrid, Side};
use fracwave::fracint::{rl_integral_spec, FracIntSpec, IntSign};
use fracwave::functions::FunctionSpec;
use fracwave::hardy::{
    constant_c, constant_m_profile, constant_nd_profile, discrete_hardy_best_constant_lb, profile_to_csv,
};
use fracwave::harness::{
    parse_config, run_identity_suite, verify, CoeffConfig, Direction, ExperimentConfig, GridChoice, HardyConfig,
    MoleculeConfig, NormConfig,
};
use fracwave::splines::{bspline_natural, FractionalSpline, SplineVariant};
use fracwave::{Error, Result};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

const THREADS_ENV: &str = "FRACWAVE_THREADS";

#[derive(Parser)]
#[command(name = "fracwave", version, about = "Fractional spline wavelets, RL integrals, Besov norms and Hardy constants")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a norm inequality end to end
    Verify {
        #[arg(value_enum)]
        direction: Dir,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the identity suite and print a pass/fail table
    Identities {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fractional and natural B-splines
    Spline {
        #[command(subcommand)]
        cmd: SplineCmd,
    },
    /// Spline wavelets on a grid
    Wavelet {
        #[command(subcommand)]
        cmd: WaveletCmd,
    },
    /// Battle-Lemarié data
    Bl {
        #[command(subcommand)]
        cmd: BlCmd,
    },
    /// Riemann-Liouville integral of a function spec at points, as CSV (x,value)
    Fracint {
        #[arg(long)]
        alpha: f64,
        #[arg(long, value_enum, default_value = "plus")]
        sign: SignArg,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        a: f64,
        /// inline JSON or a path to a JSON file
        #[arg(long)]
        f: String,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Vec<f64>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Coefficient grid as CSV (nu,tau,lambda) or JSON
    Coeffs {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Weighted Besov sequence norm of a function
    Norm {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hardy-type constants N0, N(d) or M from a setup file
    Hardy {
        #[arg(value_enum)]
        which: HardyWhich,
        #[arg(long)]
        config: PathBuf,
        /// per-τ table (tau,first,second)
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Molecule condition checks
    Molecule {
        #[command(subcommand)]
        cmd: MoleculeCmd,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Dir {
    Forward,
    Inverse,
}

#[derive(Clone, Copy, ValueEnum)]
enum SignArg {
    Plus,
    Minus,
}

impl From<SignArg> for IntSign {
    fn from(s: SignArg) -> Self {
        match s {
            SignArg::Plus => IntSign::Plus,
            SignArg::Minus => IntSign::Minus,
        }
    }
}

impl From<SignArg> for Side {
    fn from(s: SignArg) -> Self {
        match s {
            SignArg::Plus => Side::Plus,
            SignArg::Minus => Side::Minus,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum HardyWhich {
    N0,
    Nd,
    M,
}

#[derive(Clone, Copy, ValueEnum)]
enum SplineKind {
    Natural,
    Causal,
    Anticausal,
    Symmetric,
}

#[derive(Args)]
struct Points {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x: Vec<f64>,
}

#[derive(Subcommand)]
enum SplineCmd {
    /// B_n or β^α at points, as CSV (x,value)
    Eval {
        #[arg(long, value_enum)]
        kind: SplineKind,
        #[arg(long)]
        order: f64,
        #[command(flatten)]
        pts: Points,
    },
}

#[derive(Subcommand)]
enum WaveletCmd {
    /// Natural: CSV (x,phi,psi) of Φ_{n,k}, Ψ_{n,k,s}. Fractional: CSV (x,psi,big_psi).
    Eval {
        #[arg(long)]
        order: f64,
        #[arg(long, value_enum, default_value = "plus")]
        side: SignArg,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        k: i64,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        s: i64,
        #[arg(long, default_value_t = 256)]
        half_width: usize,
        #[command(flatten)]
        pts: Points,
    },
}

#[derive(Subcommand)]
enum BlCmd {
    /// Euler-Frobenius roots, β_n and λ_j as JSON
    Roots {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Subcommand)]
enum MoleculeCmd {
    /// Per-condition molecule report as JSON
    Check {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Config(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn csv(header: &str, rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut s = format!("{header}\n");
    for r in rows {
        let cells: Vec<String> = r.iter().map(|v| format!("{v:.17e}")).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

fn function_arg(f: &str) -> Result<FunctionSpec> {
    let text = if f.trim_start().starts_with('{') { f.to_string() } else { read(&PathBuf::from(f))? };
    let spec: FunctionSpec = serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
    spec.validate()?;
    Ok(spec)
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Verify { direction, config, out } => {
            let cfg = ExperimentConfig::from_json(&read(&config)?)?;
            let want = match direction {
                Dir::Forward => Direction::Forward,
                Dir::Inverse => Direction::Inverse,
            };
            if cfg.direction != want {
                return Err(Error::Config("config direction does not match the subcommand".into()));
            }
            emit(&json(&verify(&cfg)?), &out)
        }
        Cmd::Identities { out } => {
            let r = run_identity_suite()?;
            if out.is_none() {
                for row in &r.rows {
                    let tag = if row.pass { "PASS" } else if row.erratum { "FAIL (printed form)" } else { "FAIL" };
                    eprintln!("{tag:>20}  {:<52} |diff| = {:.3e}", row.name, row.abs_diff);
                }
            }
            emit(&json(&r), &out)
        }
        Cmd::Spline { cmd: SplineCmd::Eval { kind, order, pts } } => {
            let rows = match kind {
                SplineKind::Natural => {
                    if order != order.round() || order < 0.0 {
                        return Err(Error::OrderOutOfRange(format!("natural order must be a nonnegative integer, got {order}")));
                    }
                    pts.x.iter().map(|&x| vec![x, bspline_natural(order as usize, x)]).collect::<Vec<_>>()
                }
                k => {
                    let variant = match k {
                        SplineKind::Causal => SplineVariant::Causal,
                        SplineKind::Anticausal => SplineVariant::Anticausal,
                        _ => SplineVariant::Symmetric,
                    };
                    let sp = FractionalSpline::new(order, variant)?;
                    pts.x.iter().map(|&x| Ok(vec![x, sp.eval(x)?])).collect::<Result<Vec<_>>>()?
                }
            };
            emit(&csv("x,value", rows), &None)
        }
        Cmd::Wavelet { cmd: WaveletCmd::Eval { order, side, k, s, half_width, pts } } => {
            if order == order.round() {
                let bl = BLSystem::new(order as usize, k, s)?;
                let rows = pts.x.iter().map(|&x| vec![x, bl.scaling(x), bl.wavelet(x)]);
                emit(&csv("x,phi,psi", rows), &None)
            } else {
                let fw = FracWavelet::new(order, side.into(), order.ceil() as usize, half_width)?;
                let rows = pts
                    .x
                    .iter()
                    .map(|&x| Ok(vec![x, fw.psi(x)?, fw.big_psi(x - s as f64)?]))
                    .collect::<Result<Vec<_>>>()?;
                emit(&csv("x,psi,big_psi", rows), &None)
            }
        }
        Cmd::Bl { cmd: BlCmd::Roots { n } } => {
            let bl = BLSystem::new(n, 0, 0)?;
            #[derive(Serialize)]
            struct Out {
                n: usize,
                roots: Vec<f64>,
                beta_n: f64,
                lambda: Vec<f64>,
                lambda_prime: f64,
                lambda_dprime: f64,
            }
            emit(
                &json(&Out {
                    n,
                    roots: bl.roots.clone(),
                    beta_n: bl.beta_n,
                    lambda: bl.lambda.clone(),
                    lambda_prime: bl.lambda_prime,
                    lambda_dprime: bl.lambda_dprime,
                }),
                &None,
            )
        }
        Cmd::Fracint { alpha, sign, a, f, x, tol } => {
            let spec = FracIntSpec::new(alpha, a, sign.into()).with_tol(tol);
            spec.validate()?;
            let f = function_arg(&f)?;
            let rows = x.iter().map(|&x| Ok(vec![x, rl_integral_spec(&spec, &f, x)?])).collect::<Result<Vec<_>>>()?;
            emit(&csv("x,value", rows), &None)
        }
        Cmd::Coeffs { config, json: as_json, out } => {
            let cfg: CoeffConfig = parse_config(&read(&config)?)?;
            cfg.f.validate()?;
            let grid = coefficients(&cfg.f, &cfg.system.build()?, &cfg.request)?;
            if as_json {
                emit(&json(&grid), &out)
            } else {
                emit(&grid.to_csv(), &out)
            }
        }
        Cmd::Norm { config, out } => {
            let cfg: NormConfig = parse_config(&read(&config)?)?;
            cfg.f.validate()?;
            cfg.params.validate()?;
            let (report, _) = besov_norm_proxy(&cfg.f, &cfg.params, &cfg.w, &cfg.system.build()?, &cfg.request)?;
            emit(&json(&report), &out)
        }
        Cmd::Hardy { which, config, csv: csv_out, out } => {
            let cfg: HardyConfig = parse_config(&read(&config)?)?;
            let mut setup = cfg.setup.clone();
            let (report, profile) = match which {
                HardyWhich::N0 => {
                    setup.a = 0.0;
                    constant_nd_profile(&setup, 0)?
                }
                HardyWhich::Nd => match cfg.d {
                    Some(d) => constant_nd_profile(&setup, d)?,
                    None => {
                        let sup = constant_c(&setup, cfg.d_max)?;
                        constant_nd_profile(&setup, sup.argmax_d)?
                    }
                },
                HardyWhich::M => constant_m_profile(setup.p, setup.u_tilde.as_ref().unwrap_or(&setup.u), &setup.w, setup.r_trunc)?,
            };
            let report = if cfg.trials > 0 && !matches!(which, HardyWhich::M) {
                let lb = discrete_hardy_best_constant_lb(&setup, cfg.trials, cfg.seed)?;
                report.with_lower_bound(lb.value)
            } else {
                report
            };
            if let Some(p) = csv_out {
                emit(&profile_to_csv(&profile), &Some(p))?;
            }
            emit(&json(&report), &out)
        }
        Cmd::Molecule { cmd: MoleculeCmd::Check { config, out } } => {
            let cfg: MoleculeConfig = parse_config(&read(&config)?)?;
            let sys = cfg.system.build()?;
            let p = cfg.params;
            let params = fracwave::frac_wavelets::molecule_params_for(p.p, p.q.0, p.s, cfg.r_w, sys.order)?;
            let grid = match cfg.grid {
                GridChoice::Default => MoleculeGrid::default(),
                GridChoice::Coarse => MoleculeGrid::coarse(),
            };
            let mut reports = Vec::new();
            for &nu in &cfg.levels {
                let r = if nu == 0 {
                    let phi = fracwave::frac_wavelets::SplineSum { lo: 0, ..sys.phi.clone() };
                    molecule_check(&phi, 0, cfg.tau, &params, &grid)?
                } else {
                    molecule_check(&sys.psi, nu, cfg.tau, &params, &grid)?
                };
                reports.push(r);
            }
            #[derive(Serialize)]
            struct Out {
                c0: Option<f64>,
                c: Option<f64>,
                pass: bool,
                reports: Vec<fracwave::frac_wavelets::MoleculeReport>,
            }
            let pass = reports.iter().all(|r| r.pass);
            emit(&json(&Out { c0: sys.c0, c: sys.c, pass, reports }), &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: {THREADS_ENV} must be a positive integer, got {v:?}");
                return ExitCode::from(2);
            }
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
