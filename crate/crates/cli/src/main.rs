#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use corrbound::bound::{classical_ising_mf_solve, AverageMode, Couplings, MeanFieldModel};
use corrbound::ed::{self, Boundary, ChainModel, ChainSpec, EdModel};
use corrbound::heisenberg::Heisenberg2;
use corrbound::qcmap::{self, QubitHamiltonian};
use corrbound::tfim;
use corrbound_cli::{parse_config, run_sweep, ModelKind};

#[derive(Parser)]
#[command(
    name = "corrbound",
    version,
    about = "Mean-field bounds on correlations in thermal spin systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum MfModel {
    Heisenberg2,
    Tfim,
    ClassicalIsing,
}

#[derive(Clone, Copy, ValueEnum)]
enum EdChain {
    Tfim,
    Heisenberg,
}

#[derive(Clone, Copy, ValueEnum)]
enum EdBoundary {
    Open,
    Periodic,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum Mode {
    Paper,
    Exact,
    SelfConsistent,
}

impl From<Mode> for AverageMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Paper => AverageMode::PaperFaithful,
            Mode::Exact => AverageMode::Exact,
            Mode::SelfConsistent => AverageMode::SelfConsistent,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a (K, C) grid from a config file and write CSV (and SVG).
    BoundSweep { config: PathBuf },
    /// Solve the mean-field self-consistency equation at one point.
    MfSolve {
        #[arg(long, value_enum)]
        model: MfModel,
        #[arg(long = "K")]
        k: f64,
        #[arg(long = "C")]
        c: f64,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
    },
    /// Exact diagonalization: relative-entropy identity residual, mutual information and bound.
    EdCheck {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "tfim")]
        model: EdChain,
        #[arg(long = "K")]
        k: f64,
        #[arg(long = "C")]
        c: f64,
        /// Defaults to periodic for n >= 3, open otherwise.
        #[arg(long, value_enum)]
        boundary: Option<EdBoundary>,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
    },
    /// Compare the classical transfer-matrix partition function with the quantum one.
    QcmapCheck {
        #[arg(long = "E", allow_negative_numbers = true)]
        e: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long, value_delimiter = ',', default_value = "50,100,200")]
        n_list: Vec<usize>,
    },
    /// Zero-field critical coupling of the transverse-field mean field.
    CriticalK {
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
    },
}

enum Failure {
    Usage(String),
    Compute(String),
}

impl From<corrbound::Error> for Failure {
    fn from(e: corrbound::Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

fn couplings(k: f64, c: f64) -> Result<Couplings, Failure> {
    Couplings::new(k, c).map_err(|e| Failure::Usage(e.to_string()))
}

fn fmt_list(xs: &[f64]) -> String {
    xs.iter()
        .map(|x| format!("{x:.12}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn bound_sweep(path: PathBuf) -> Result<(), Failure> {
    let text = fs::read_to_string(&path)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let cfg =
        parse_config(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let (records, outputs) = run_sweep(&cfg).map_err(|e| Failure::Compute(e.to_string()))?;
    let failed = records
        .iter()
        .filter(|r| r.bound.is_nan() && r.model != ModelKind::ClassicalIsing)
        .count();
    println!("rows = {}", records.len());
    println!("failed_rows = {failed}");
    println!("csv = {}", outputs.csv.display());
    for p in &outputs.plots {
        println!("svg = {}", p.display());
    }
    if let Some(p) = &outputs.sandwich {
        println!("sandwich = {}", p.display());
    }
    Ok(())
}

fn mf_solve(model: MfModel, p: Couplings, mode: Option<Mode>) -> Result<(), Failure> {
    match model {
        MfModel::ClassicalIsing | MfModel::Tfim => {
            let sol = match model {
                MfModel::Tfim => tfim::solve_s(p),
                _ => classical_ising_mf_solve(p),
            };
            println!("branches = [{}]", fmt_list(&sol.branches));
            println!(
                "residuals = [{}]",
                sol.residuals
                    .iter()
                    .map(|r| format!("{r:.3e}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            );
            println!("principal = {:.12}", sol.principal);
            println!("converged = {}", sol.converged);
            println!("out_of_range_detected = {}", sol.out_of_range_detected);
            println!("mf_valid = {}", sol.converged && sol.in_range());
        }
        MfModel::Heisenberg2 => {
            let mode = mode.map_or(AverageMode::Exact, AverageMode::from);
            let fit = Heisenberg2.mean_field(p, mode)?;
            println!("mode = {}", mode.as_str());
            println!(
                "s = ({:.12}, {:.12}, {:.12})",
                fit.ansatz.sx, fit.ansatz.sy, fit.ansatz.sz
            );
            println!("mf_valid = {}", fit.valid);
        }
    }
    Ok(())
}

fn ed_check(
    n: usize,
    chain: EdChain,
    p: Couplings,
    boundary: Option<EdBoundary>,
    mode: Option<Mode>,
) -> Result<(), Failure> {
    let model = match chain {
        EdChain::Tfim => ChainModel::Tfim,
        EdChain::Heisenberg => ChainModel::Heisenberg,
    };
    let boundary = match boundary {
        Some(EdBoundary::Open) => Boundary::Open,
        Some(EdBoundary::Periodic) => Boundary::Periodic,
        None if n >= 3 => Boundary::Periodic,
        None => Boundary::Open,
    };
    let mode = mode.map(AverageMode::from).unwrap_or(match model {
        ChainModel::Tfim => AverageMode::PaperFaithful,
        ChainModel::Heisenberg => AverageMode::Exact,
    });
    let m = EdModel::new(n, model, boundary).map_err(|e| Failure::Usage(e.to_string()))?;
    let (s, terms) = ed::solved_exact_terms(&m, p, mode)?;
    let spec = ChainSpec::new(n, model, boundary, p)?;
    let thermal = ed::thermal_density(&ed::build_hamiltonian(&spec))?;
    let mi = ed::multiparty_mutual_info(&thermal.rho, n)?;
    println!("s = ({:.12}, {:.12}, {:.12})", s.sx, s.sy, s.sz);
    println!("ln_z = {:.12}", terms.ln_z);
    println!("ln_z_mf = {:.12}", terms.ln_z_mf);
    println!("beta_gap = {:.12}", terms.beta_gap);
    println!("bound = {:.12}", terms.bound());
    println!("relative_entropy = {:.12}", terms.relative_entropy_direct);
    println!("identity_residual = {:.3e}", terms.identity_residual());
    println!("mutual_info = {:.12}", mi);
    Ok(())
}

fn qcmap_check(e: f64, delta: f64, beta: f64, n_list: &[usize]) -> Result<(), Failure> {
    let ham = QubitHamiltonian::new(e, delta).map_err(|e| Failure::Usage(e.to_string()))?;
    let zq = qcmap::quantum_partition(ham, beta);
    println!("quantum_partition = {zq:.12}");
    println!(
        "{:>8} {:>16} {:>14} {:>12}",
        "N", "classical", "error", "error*N"
    );
    let mut errors = Vec::new();
    for &n in n_list {
        let c = qcmap::coefficients(ham, beta, n)?;
        let zc = qcmap::classical_partition(&c);
        let err = (zc - zq).abs();
        errors.push(err);
        println!("{n:>8} {zc:>16.12} {err:>14.6e} {:>12.6}", err * n as f64);
    }
    for (w, n) in errors.windows(2).zip(n_list.windows(2)) {
        println!("ratio error({})/error({}) = {:.6}", n[0], n[1], w[0] / w[1]);
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::BoundSweep { config } => bound_sweep(config),
        Command::MfSolve { model, k, c, mode } => mf_solve(model, couplings(k, c)?, mode),
        Command::EdCheck {
            n,
            model,
            k,
            c,
            boundary,
            mode,
        } => ed_check(n, model, couplings(k, c)?, boundary, mode),
        Command::QcmapCheck {
            e,
            delta,
            beta,
            n_list,
        } => qcmap_check(e, delta, beta, &n_list),
        Command::CriticalK { tol } => {
            if !(tol > 0.0) {
                return Err(Failure::Usage("--tol must be positive".into()));
            }
            let k = tfim::critical_k_at_zero_field(tol)?;
            println!("K_c = {k:.6}");
            println!("tolerance = {tol:e}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
