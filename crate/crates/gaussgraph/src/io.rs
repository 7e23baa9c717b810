//! JSON file formats: states, circuits and GLU sets.
//!
//! Matrices are stored row-major at full precision. Mode indices in circuit
//! files are 1-based.

use std::fs;
use std::path::{Path, PathBuf};

use gaussgraph_core::prelude::*;
use serde::{Deserialize, Serialize};
use std::result::Result;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Invalid { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Core {
        path: PathBuf,
        #[source]
        source: gaussgraph_core::Error,
    },
}

impl FileError {
    fn invalid(path: &Path, message: impl Into<String>) -> Self {
        FileError::Invalid {
            path: path.to_path_buf(),
            message: message.into(),
        }
    }

    fn core(path: &Path, source: gaussgraph_core::Error) -> Self {
        FileError::Core {
            path: path.to_path_buf(),
            source,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderingName {
    Mode,
    Quadrature,
}

impl From<OrderingName> for Ordering {
    fn from(o: OrderingName) -> Self {
        match o {
            OrderingName::Mode => Ordering::Mode,
            OrderingName::Quadrature => Ordering::Quadrature,
        }
    }
}

/// `{n, sigma, ordering}` with `sigma` a row-major `2n × 2n` array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub n: usize,
    pub sigma: Vec<f64>,
    pub ordering: OrderingName,
}

impl StateFile {
    pub fn from_state(state: &GaussianState) -> Self {
        StateFile {
            n: state.modes(),
            sigma: row_major(state.sigma()),
            ordering: OrderingName::Mode,
        }
    }

    pub fn covariance(&self) -> Option<MatrixN> {
        let d = 2 * self.n;
        (self.n > 0 && self.sigma.len() == d * d)
            .then(|| MatrixN::from_row_slice(d, d, &self.sigma))
    }
}

pub fn row_major(m: &MatrixN) -> Vec<f64> {
    let mut out = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        out.extend(m.row(i).iter());
    }
    out
}

/// One gate record. Modes are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OpRecord {
    Squeeze { mode: usize, r: f64 },
    Rotate { mode: usize, theta: f64 },
    Shear { mode: usize, q: f64 },
    Beamsplitter { modes: [usize; 2] },
    Cz { modes: [usize; 2], g: f64 },
    Local { mode: usize, matrix: [[f64; 2]; 2] },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitFile {
    pub modes: usize,
    pub ops: Vec<OpRecord>,
}

/// Converts squeezing given in dB of quadrature variance to `r`.
pub fn db_to_r(db: f64) -> f64 {
    db * std::f64::consts::LN_10 / 20.0
}

impl CircuitFile {
    /// Checks indices and parameters and converts to 0-based gates. With
    /// `db`, squeeze parameters are read as dB.
    pub fn to_ops(&self, db: bool) -> Result<Vec<CircuitOp>, String> {
        let n = self.modes;
        if n == 0 {
            return Err("circuit needs at least one mode".into());
        }
        let mode = |m: usize, i: usize| {
            if m == 0 || m > n {
                Err(format!("op {}: mode {m} out of range 1..={n}", i + 1))
            } else {
                Ok(m - 1)
            }
        };
        let finite = |x: f64, i: usize| {
            if x.is_finite() {
                Ok(x)
            } else {
                Err(format!("op {}: parameter is not finite", i + 1))
            }
        };
        let pair = |[a, b]: [usize; 2], i: usize| -> Result<(usize, usize), String> {
            let (j, k) = (mode(a, i)?, mode(b, i)?);
            if j == k {
                return Err(format!("op {}: two-mode gate needs distinct modes", i + 1));
            }
            Ok((j, k))
        };
        self.ops
            .iter()
            .enumerate()
            .map(|(i, op)| {
                Ok(match *op {
                    OpRecord::Squeeze { mode: m, r } => {
                        let r = finite(r, i)?;
                        CircuitOp::Squeeze {
                            mode: mode(m, i)?,
                            r: if db { db_to_r(r) } else { r },
                        }
                    }
                    OpRecord::Rotate { mode: m, theta } => CircuitOp::Rotate {
                        mode: mode(m, i)?,
                        theta: finite(theta, i)?,
                    },
                    OpRecord::Shear { mode: m, q } => CircuitOp::Shear {
                        mode: mode(m, i)?,
                        q: finite(q, i)?,
                    },
                    OpRecord::Beamsplitter { modes } => {
                        let (j, k) = pair(modes, i)?;
                        CircuitOp::BalancedBeamsplitter { j, k }
                    }
                    OpRecord::Cz { modes, g } => {
                        let (j, k) = pair(modes, i)?;
                        CircuitOp::Cz {
                            j,
                            k,
                            g: finite(g, i)?,
                        }
                    }
                    OpRecord::Local { mode: m, matrix } => {
                        for x in matrix.iter().flatten() {
                            finite(*x, i)?;
                        }
                        let [[a, b], [c, d]] = matrix;
                        CircuitOp::LocalSymplectic {
                            mode: mode(m, i)?,
                            matrix: Mat2::new(a, b, c, d),
                        }
                    }
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamsRecord {
    pub q: f64,
    pub r: f64,
    pub phi: f64,
}

impl From<IwasawaParams> for ParamsRecord {
    fn from(p: IwasawaParams) -> Self {
        ParamsRecord {
            q: p.q,
            r: p.r,
            phi: p.phi,
        }
    }
}

/// `{n, blocks}` with one `[[a, b], [c, d]]` block per mode; `params` is
/// informational and ignored on reading.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GluFile {
    pub n: usize,
    pub blocks: Vec<[[f64; 2]; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<Vec<ParamsRecord>>,
}

impl GluFile {
    pub fn from_glus(glus: &GluSet) -> Self {
        let blocks = glus
            .blocks()
            .iter()
            .map(|b| [[b[(0, 0)], b[(0, 1)]], [b[(1, 0)], b[(1, 1)]]])
            .collect();
        let params = glus
            .params()
            .ok()
            .map(|ps| ps.into_iter().map(ParamsRecord::from).collect());
        GluFile {
            n: glus.modes(),
            blocks,
            params,
        }
    }

    pub fn to_glus(&self) -> gaussgraph_core::Result<GluSet> {
        GluSet::new(
            self.blocks
                .iter()
                .map(|[[a, b], [c, d]]| Mat2::new(*a, *b, *c, *d))
                .collect(),
        )
    }
}

fn read_text(path: &Path) -> Result<String, FileError> {
    fs::read_to_string(path).map_err(|source| FileError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> Result<T, FileError> {
    serde_json::from_str(text).map_err(|e| FileError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), FileError> {
    let mut text = serde_json::to_string_pretty(value).expect("serialisable value");
    text.push('\n');
    fs::write(path, text).map_err(|source| FileError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a state file and checks that it describes a pure state within `tol`.
pub fn read_state(path: &Path, tol: f64) -> Result<GaussianState, FileError> {
    state_from_text(path, &read_text(path)?, tol)
}

pub fn state_from_text(path: &Path, text: &str, tol: f64) -> Result<GaussianState, FileError> {
    let file: StateFile = parse(path, text)?;
    let sigma = file.covariance().ok_or_else(|| {
        FileError::invalid(
            path,
            format!("sigma must have (2n)² = {} entries", 4 * file.n * file.n),
        )
    })?;
    let sigma = reorder(&sigma, file.ordering.into(), Ordering::Mode)
        .map_err(|e| FileError::core(path, e))?;
    GaussianState::with_tolerance(sigma, tol).map_err(|e| FileError::core(path, e))
}

pub fn write_state(path: &Path, state: &GaussianState) -> Result<(), FileError> {
    write_json(path, &StateFile::from_state(state))
}

pub fn read_circuit(path: &Path) -> Result<CircuitFile, FileError> {
    parse(path, &read_text(path)?)
}

/// Reads and evolves a circuit from the vacuum.
pub fn build_from_circuit(path: &Path, db: bool) -> Result<GaussianState, FileError> {
    let circuit = read_circuit(path)?;
    let ops = circuit
        .to_ops(db)
        .map_err(|m| FileError::invalid(path, m))?;
    let vac = vacuum(circuit.modes).map_err(|e| FileError::core(path, e))?;
    apply_circuit(&vac, &ops).map_err(|e| FileError::core(path, e))
}

pub fn read_glus(path: &Path) -> Result<GluSet, FileError> {
    let file: GluFile = parse(path, &read_text(path)?)?;
    if file.blocks.len() != file.n {
        return Err(FileError::invalid(
            path,
            format!("expected {} blocks, found {}", file.n, file.blocks.len()),
        ));
    }
    file.to_glus().map_err(|e| FileError::core(path, e))
}

pub fn write_glus(path: &Path, glus: &GluSet) -> Result<(), FileError> {
    write_json(path, &GluFile::from_glus(glus))
}
