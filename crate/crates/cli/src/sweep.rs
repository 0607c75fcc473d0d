//! Grid evaluation and CSV emission.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use corrbound::bound::{
    bogoliubov_sandwich, classical_ising_mf_solve, solved_bound, AverageMode, Couplings,
    MeanFieldModel,
};
use corrbound::heisenberg::{self, Heisenberg2};
use corrbound::par;
use corrbound::tfim;
use thiserror::Error;

use crate::config::{ModelKind, Output, SweepConfig};
use crate::plot::{self, PlotError, Quantity};

pub const CSV_HEADER: [&str; 12] = [
    "model",
    "mode",
    "K",
    "C",
    "s",
    "ln_z",
    "ln_z_mf",
    "bound",
    "per_spin",
    "mutual_info",
    "mf_valid",
    "trivial",
];

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed csv row {row}: {msg}")]
    Malformed { row: usize, msg: String },
    #[error(transparent)]
    Plot(#[from] PlotError),
}

/// One evaluated grid point. Unavailable values are NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub model: ModelKind,
    pub mode: AverageMode,
    pub k: f64,
    pub c: f64,
    /// Principal mean-field magnetization (`s_z` for heisenberg2, `s` otherwise).
    pub s: f64,
    pub ln_z: f64,
    pub ln_z_mf: f64,
    pub bound: f64,
    /// Whether `ln_z`, `ln_z_mf` and `bound` are per spin.
    pub per_spin: bool,
    pub mutual_info: f64,
    pub mf_valid: bool,
    pub trivial: bool,
}

impl SweepRecord {
    fn failed(model: ModelKind, mode: AverageMode, p: Couplings) -> Self {
        Self {
            model,
            mode,
            k: p.k(),
            c: p.c(),
            s: f64::NAN,
            ln_z: f64::NAN,
            ln_z_mf: f64::NAN,
            bound: f64::NAN,
            per_spin: model == ModelKind::Tfim,
            mutual_info: f64::NAN,
            mf_valid: false,
            trivial: false,
        }
    }

    /// Value of a plotted quantity; validity maps to 0/1.
    pub fn quantity(&self, q: Quantity) -> f64 {
        match q {
            Quantity::Bound => self.bound,
            Quantity::MutualInfo => self.mutual_info,
            Quantity::S => self.s,
            Quantity::Validity => f64::from(u8::from(self.mf_valid)),
        }
    }
}

/// Evaluates a single grid point. Computation errors become a NaN row with
/// `mf_valid = false`.
pub fn evaluate_point(
    model: ModelKind,
    mode: AverageMode,
    p: Couplings,
    mutual_info: bool,
) -> SweepRecord {
    let failed = SweepRecord::failed(model, mode, p);
    match model {
        ModelKind::Heisenberg2 => match solved_bound(&Heisenberg2, p, mode) {
            Ok(r) => SweepRecord {
                s: r.s.sz,
                ln_z: r.ln_z,
                ln_z_mf: r.ln_z_mf,
                bound: r.bound,
                per_spin: false,
                mutual_info: if mutual_info {
                    heisenberg::mutual_information(p).unwrap_or(f64::NAN)
                } else {
                    f64::NAN
                },
                mf_valid: r.mf_valid,
                trivial: r.trivial,
                ..failed
            },
            Err(_) => failed,
        },
        ModelKind::Tfim => match solved_bound(&tfim::Tfim, p, mode) {
            Ok(r) => SweepRecord {
                s: r.s,
                ln_z: r.ln_z,
                ln_z_mf: r.ln_z_mf,
                bound: r.bound,
                per_spin: true,
                mf_valid: r.mf_valid,
                trivial: r.trivial,
                ..failed
            },
            Err(_) => failed,
        },
        ModelKind::ClassicalIsing => {
            let sol = classical_ising_mf_solve(p);
            SweepRecord {
                s: sol.principal,
                per_spin: true,
                mf_valid: sol.converged && sol.in_range(),
                ..failed
            }
        }
    }
}

fn wants_mutual_info(cfg: &SweepConfig) -> bool {
    cfg.outputs.contains(&Output::MutualInfo)
}

/// Evaluates the grid in K-major order, in parallel when the `parallel`
/// feature is enabled.
pub fn evaluate(cfg: &SweepConfig) -> Vec<SweepRecord> {
    let mi = wants_mutual_info(cfg);
    par::map_ordered(&cfg.grid(), |&p| evaluate_point(cfg.model, cfg.mode, p, mi))
}

/// Single-threaded evaluation; produces the same rows as [`evaluate`].
pub fn evaluate_sequential(cfg: &SweepConfig) -> Vec<SweepRecord> {
    let mi = wants_mutual_info(cfg);
    par::map_sequential(&cfg.grid(), |&p| evaluate_point(cfg.model, cfg.mode, p, mi))
}

pub fn format_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x}")
    }
}

fn parse_f64(s: &str) -> Option<f64> {
    if s == "nan" {
        Some(f64::NAN)
    } else {
        s.parse().ok()
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> SweepError + '_ {
    move |source| SweepError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn write_csv<W: Write>(out: W, records: &[SweepRecord]) -> Result<(), SweepError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.model.as_str().to_string(),
            r.mode.as_str().to_string(),
            format_f64(r.k),
            format_f64(r.c),
            format_f64(r.s),
            format_f64(r.ln_z),
            format_f64(r.ln_z_mf),
            format_f64(r.bound),
            r.per_spin.to_string(),
            format_f64(r.mutual_info),
            r.mf_valid.to_string(),
            r.trivial.to_string(),
        ])?;
    }
    w.flush().map_err(|e| SweepError::Csv(e.into()))?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<SweepRecord>, SweepError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_csv(&text)
}

pub fn parse_csv(text: &str) -> Result<Vec<SweepRecord>, SweepError> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let header = rd.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(SweepError::Malformed {
            row: 0,
            msg: "unexpected header".into(),
        });
    }
    let mut out = Vec::new();
    for (i, row) in rd.records().enumerate() {
        let row = row?;
        let bad = |msg: &str| SweepError::Malformed {
            row: i + 1,
            msg: msg.to_string(),
        };
        let num = |j: usize| {
            parse_f64(&row[j])
                .ok_or_else(|| bad(&format!("column {} is not a number", CSV_HEADER[j])))
        };
        let flag = |j: usize| {
            row[j]
                .parse::<bool>()
                .map_err(|_| bad(&format!("column {} is not a boolean", CSV_HEADER[j])))
        };
        out.push(SweepRecord {
            model: row[0].parse().map_err(|m: String| bad(&m))?,
            mode: row[1]
                .parse()
                .map_err(|e: corrbound::Error| bad(&e.to_string()))?,
            k: num(2)?,
            c: num(3)?,
            s: num(4)?,
            ln_z: num(5)?,
            ln_z_mf: num(6)?,
            bound: num(7)?,
            per_spin: flag(8)?,
            mutual_info: num(9)?,
            mf_valid: flag(10)?,
            trivial: flag(11)?,
        });
    }
    Ok(out)
}

fn sibling(path: &Path, suffix: &str, ext: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("sweep");
    path.with_file_name(format!("{stem}_{suffix}.{ext}"))
}

/// Files written by [`run_sweep`].
#[derive(Debug, Clone, Default)]
pub struct SweepOutputs {
    pub csv: PathBuf,
    pub plots: Vec<PathBuf>,
    pub sandwich: Option<PathBuf>,
}

fn write_sandwich(cfg: &SweepConfig, path: &Path) -> Result<(), SweepError> {
    let grid = cfg.grid();
    let rows = par::map_ordered(&grid, |&p| {
        Heisenberg2
            .mean_field(p, cfg.mode)
            .and_then(|fit| bogoliubov_sandwich(&Heisenberg2, p, &fit.ansatz))
            .map(|w| [w.lower, w.middle, w.upper, w.slack()])
            .unwrap_or([f64::NAN; 4])
    });
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)?;
    w.write_record(["K", "C", "lower", "middle", "upper", "slack"])?;
    for (p, r) in grid.iter().zip(rows) {
        let mut line = vec![format_f64(p.k()), format_f64(p.c())];
        line.extend(r.map(format_f64));
        w.write_record(&line)?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

/// Evaluates the grid and writes the CSV plus any requested heat-maps and
/// sandwich table next to it.
pub fn run_sweep(cfg: &SweepConfig) -> Result<(Vec<SweepRecord>, SweepOutputs), SweepError> {
    let records = evaluate(cfg);
    let path = &cfg.output_path;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let file = fs::File::create(path).map_err(io_err(path))?;
    write_csv(io::BufWriter::new(file), &records)?;
    let mut outputs = SweepOutputs {
        csv: path.clone(),
        ..Default::default()
    };
    if cfg.plot {
        for out in &cfg.outputs {
            let q = match out {
                Output::Bound => Quantity::Bound,
                Output::MutualInfo => Quantity::MutualInfo,
                Output::S => Quantity::S,
                Output::Validity => Quantity::Validity,
                Output::Sandwich => continue,
            };
            let svg_path = sibling(path, q.as_str(), "svg");
            plot::emit_plot(&records, q, &svg_path)?;
            outputs.plots.push(svg_path);
        }
    }
    if cfg.outputs.contains(&Output::Sandwich) {
        let p = sibling(path, "sandwich", "csv");
        write_sandwich(cfg, &p)?;
        outputs.sandwich = Some(p);
    }
    Ok((records, outputs))
}
