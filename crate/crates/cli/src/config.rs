//! INI-style sweep configuration.
//!
//! ```text
//! [model]
//! name = tfim            # heisenberg2 | tfim | classical_ising
//! mode = paper           # paper | exact | self_consistent
//! K = 1.0                # optional single point; or J, B, T
//! C = 2.0
//!
//! [sweep]
//! k_min = 0
//! k_max = 3
//! k_steps = 31
//! c_min = 0
//! c_max = 3
//! c_steps = 31
//!
//! [output]
//! path = out.csv
//! outputs = bound, s
//! plot = true
//! ```

use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use corrbound::bound::{AverageMode, Couplings};
use thiserror::Error;

/// Relative tolerance when both `(K, C)` and `(J, B, T)` are given.
pub const CONVERSION_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("inconsistent couplings: K, C = ({k}, {c}) but J, B, T give ({k_phys}, {c_phys})")]
    Conversion {
        k: f64,
        c: f64,
        k_phys: f64,
        c_phys: f64,
    },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    Heisenberg2,
    Tfim,
    ClassicalIsing,
}

impl ModelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::Heisenberg2 => "heisenberg2",
            ModelKind::Tfim => "tfim",
            ModelKind::ClassicalIsing => "classical_ising",
        }
    }

    /// Mode used when the config does not name one.
    pub fn default_mode(&self) -> AverageMode {
        match self {
            ModelKind::Heisenberg2 => AverageMode::Exact,
            _ => AverageMode::PaperFaithful,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "heisenberg2" => Ok(ModelKind::Heisenberg2),
            "tfim" => Ok(ModelKind::Tfim),
            "classical_ising" => Ok(ModelKind::ClassicalIsing),
            _ => Err(format!(
                "unknown model '{s}' (expected heisenberg2, tfim or classical_ising)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Output {
    Bound,
    MutualInfo,
    S,
    Validity,
    Sandwich,
}

impl Output {
    pub fn as_str(&self) -> &'static str {
        match self {
            Output::Bound => "bound",
            Output::MutualInfo => "mutual_info",
            Output::S => "s",
            Output::Validity => "validity",
            Output::Sandwich => "sandwich",
        }
    }
}

impl FromStr for Output {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "bound" => Ok(Output::Bound),
            "mutual_info" => Ok(Output::MutualInfo),
            "s" => Ok(Output::S),
            "validity" => Ok(Output::Validity),
            "sandwich" => Ok(Output::Sandwich),
            _ => Err(format!("unknown output '{s}'")),
        }
    }
}

/// Inclusive, evenly spaced grid axis with `steps` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Range {
    pub fn point(x: f64) -> Self {
        Self {
            min: x,
            max: x,
            steps: 1,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.min];
        }
        let span = self.max - self.min;
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.max
                } else {
                    self.min + span * i as f64 / last
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub model: ModelKind,
    pub mode: AverageMode,
    pub k_range: Range,
    pub c_range: Range,
    pub outputs: BTreeSet<Output>,
    pub output_path: PathBuf,
    pub plot: bool,
}

impl SweepConfig {
    /// Grid points in K-major order.
    pub fn grid(&self) -> Vec<Couplings> {
        let cs = self.c_range.values();
        self.k_range
            .values()
            .into_iter()
            .flat_map(|k| {
                cs.iter()
                    .map(move |&c| Couplings::new(k, c).expect("validated range"))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Model,
    Sweep,
    Output,
}

#[derive(Default)]
struct Raw {
    name: Option<String>,
    mode: Option<(usize, String)>,
    point: [Option<f64>; 2],
    physical: [Option<f64>; 3],
    sweep: [Option<f64>; 6],
    outputs: Option<(usize, String)>,
    path: Option<String>,
    plot: Option<bool>,
    first_sweep_line: Option<usize>,
    last_line: usize,
}

fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64, ConfigError> {
    let x: f64 = v.parse().map_err(|_| ConfigError::Parse {
        line,
        msg: format!("'{key}' expects a number, got '{v}'"),
    })?;
    if !x.is_finite() {
        return Err(ConfigError::Parse {
            line,
            msg: format!("'{key}' must be finite"),
        });
    }
    Ok(x)
}

const SWEEP_KEYS: [&str; 6] = ["k_min", "k_max", "k_steps", "c_min", "c_max", "c_steps"];

pub fn parse_config(text: &str) -> Result<SweepConfig, ConfigError> {
    let mut raw = Raw::default();
    let mut section = None;
    for (idx, full) in text.lines().enumerate() {
        let line = idx + 1;
        raw.last_line = line;
        let body = full.split(['#', ';']).next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(name) = body.strip_prefix('[').and_then(|b| b.strip_suffix(']')) {
            section = Some(match name.trim() {
                "model" => Section::Model,
                "sweep" => Section::Sweep,
                "output" => Section::Output,
                other => {
                    return Err(ConfigError::Parse {
                        line,
                        msg: format!("unknown section [{other}]"),
                    })
                }
            });
            continue;
        }
        let Some((key, value)) = body.split_once('=') else {
            return Err(ConfigError::Parse {
                line,
                msg: format!("expected 'key = value', got '{body}'"),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        let Some(sec) = section else {
            return Err(ConfigError::Parse {
                line,
                msg: format!("'{key}' appears before any section header"),
            });
        };
        let dup = |set: bool| {
            if set {
                Err(ConfigError::Parse {
                    line,
                    msg: format!("duplicate key '{key}'"),
                })
            } else {
                Ok(())
            }
        };
        match (sec, key) {
            (Section::Model, "name") => {
                dup(raw.name.is_some())?;
                raw.name = Some(value.to_string());
                value
                    .parse::<ModelKind>()
                    .map_err(|msg| ConfigError::Parse { line, msg })?;
            }
            (Section::Model, "mode") => {
                dup(raw.mode.is_some())?;
                raw.mode = Some((line, value.to_string()));
            }
            (Section::Model, "K" | "C") => {
                let i = usize::from(key == "C");
                dup(raw.point[i].is_some())?;
                raw.point[i] = Some(parse_f64(line, key, value)?);
            }
            (Section::Model, "J" | "B" | "T") => {
                let i = ["J", "B", "T"].iter().position(|k| *k == key).unwrap();
                dup(raw.physical[i].is_some())?;
                raw.physical[i] = Some(parse_f64(line, key, value)?);
            }
            (Section::Sweep, k) if SWEEP_KEYS.contains(&k) => {
                let i = SWEEP_KEYS.iter().position(|s| *s == k).unwrap();
                dup(raw.sweep[i].is_some())?;
                raw.sweep[i] = Some(parse_f64(line, key, value)?);
                raw.first_sweep_line.get_or_insert(line);
            }
            (Section::Output, "path") => {
                dup(raw.path.is_some())?;
                raw.path = Some(value.to_string());
            }
            (Section::Output, "outputs") => {
                dup(raw.outputs.is_some())?;
                raw.outputs = Some((line, value.to_string()));
            }
            (Section::Output, "plot") => {
                dup(raw.plot.is_some())?;
                raw.plot = Some(match value {
                    "true" | "yes" | "1" => true,
                    "false" | "no" | "0" => false,
                    _ => {
                        return Err(ConfigError::Parse {
                            line,
                            msg: format!("'plot' expects true or false, got '{value}'"),
                        })
                    }
                });
            }
            _ => {
                return Err(ConfigError::Parse {
                    line,
                    msg: format!("unknown key '{key}' in this section"),
                })
            }
        }
    }
    raw.finish()
}

impl Raw {
    fn finish(self) -> Result<SweepConfig, ConfigError> {
        let end = self.last_line.max(1);
        let model: ModelKind = self
            .name
            .clone()
            .ok_or(ConfigError::Parse {
                line: end,
                msg: "missing [model] name".into(),
            })?
            .parse()
            .map_err(ConfigError::Invalid)?;
        let mode = match self.mode.clone() {
            None => model.default_mode(),
            Some((line, m)) => m
                .parse()
                .map_err(|e: corrbound::Error| ConfigError::Parse {
                    line,
                    msg: e.to_string(),
                })?,
        };

        let point = self.point_couplings()?;
        let (k_range, c_range) = match (point, self.first_sweep_line) {
            (Some(_), Some(line)) => {
                return Err(ConfigError::Parse {
                    line,
                    msg: "[sweep] ranges conflict with a single point given in [model]".into(),
                })
            }
            (Some((k, c)), None) => (Range::point(k), Range::point(c)),
            (None, Some(line)) => {
                let get = |i: usize| {
                    self.sweep[i].ok_or(ConfigError::Parse {
                        line,
                        msg: format!("[sweep] is missing '{}'", SWEEP_KEYS[i]),
                    })
                };
                let axis = |o: usize, name: &str| -> Result<Range, ConfigError> {
                    let (min, max, steps) = (get(o)?, get(o + 1)?, get(o + 2)?);
                    if steps < 1.0 || steps.fract() != 0.0 {
                        return Err(ConfigError::Invalid(format!(
                            "{name}_steps must be a positive integer"
                        )));
                    }
                    if min > max {
                        return Err(ConfigError::Invalid(format!(
                            "{name}_min exceeds {name}_max"
                        )));
                    }
                    if min < 0.0 {
                        return Err(ConfigError::Invalid(format!(
                            "{name}_min must be non-negative"
                        )));
                    }
                    Ok(Range {
                        min,
                        max,
                        steps: steps as usize,
                    })
                };
                (axis(0, "k")?, axis(3, "c")?)
            }
            (None, None) => {
                return Err(ConfigError::Parse {
                    line: end,
                    msg: "no couplings: give K, C (or J, B, T) in [model] or a [sweep] section"
                        .into(),
                })
            }
        };

        let mut outputs = BTreeSet::new();
        match &self.outputs {
            None => {
                outputs.insert(Output::Bound);
            }
            Some((line, list)) => {
                for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    outputs.insert(
                        item.parse()
                            .map_err(|msg| ConfigError::Parse { line: *line, msg })?,
                    );
                }
                if outputs.is_empty() {
                    return Err(ConfigError::Parse {
                        line: *line,
                        msg: "empty outputs list".into(),
                    });
                }
            }
        }
        if outputs.contains(&Output::MutualInfo) && model != ModelKind::Heisenberg2 {
            return Err(ConfigError::Invalid(format!(
                "mutual_info is only available for heisenberg2, not {model}"
            )));
        }
        if outputs.contains(&Output::Sandwich) && model != ModelKind::Heisenberg2 {
            return Err(ConfigError::Invalid(format!(
                "sandwich needs averages under the exact thermal state, unavailable for {model}"
            )));
        }

        Ok(SweepConfig {
            model,
            mode,
            k_range,
            c_range,
            outputs,
            output_path: PathBuf::from(self.path.unwrap_or_else(|| format!("{}_sweep.csv", model))),
            plot: self.plot.unwrap_or(false),
        })
    }

    fn point_couplings(&self) -> Result<Option<(f64, f64)>, ConfigError> {
        let direct = match self.point {
            [Some(k), Some(c)] => Some((k, c)),
            [None, None] => None,
            _ => {
                return Err(ConfigError::Invalid(
                    "K and C must be given together".into(),
                ))
            }
        };
        let physical = match self.physical {
            [Some(j), Some(b), Some(t)] => {
                let p = Couplings::from_physical(j, b, t)
                    .map_err(|e| ConfigError::Invalid(e.to_string()))?;
                Some((p.k(), p.c()))
            }
            [None, None, None] => None,
            _ => {
                return Err(ConfigError::Invalid(
                    "J, B and T must be given together".into(),
                ))
            }
        };
        let chosen = match (direct, physical) {
            (Some((k, c)), Some((kp, cp))) => {
                let close = |a: f64, b: f64| {
                    (a - b).abs() <= CONVERSION_TOL * a.abs().max(b.abs()).max(1e-300)
                };
                if !(close(k, kp) && close(c, cp)) {
                    return Err(ConfigError::Conversion {
                        k,
                        c,
                        k_phys: kp,
                        c_phys: cp,
                    });
                }
                Some((k, c))
            }
            (d, p) => d.or(p),
        };
        if let Some((k, c)) = chosen {
            Couplings::new(k, c).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        }
        Ok(chosen)
    }
}
