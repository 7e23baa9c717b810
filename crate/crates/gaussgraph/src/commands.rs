//! Subcommand implementations. Each returns the text for stdout and an exit code.

use std::fs;
use std::path::{Path, PathBuf};

use gaussgraph_core::diagnostics::determinant_scale;
use gaussgraph_core::prelude::*;
use rayon::prelude::*;
use sha2::{Digest, Sha256};
use std::result::Result;
use thiserror::Error;

use crate::export::{export_graph, Format};
use crate::io::{self, row_major, FileError, GluFile};
use crate::report::*;

#[derive(Debug, Error)]
pub enum CmdError {
    #[error(transparent)]
    File(#[from] FileError),
    #[error("{0}")]
    Core(gaussgraph_core::Error),
    #[error("{0}")]
    Usage(String),
}

impl CmdError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CmdError::File(FileError::Io { .. }) => EXIT_IO,
            CmdError::File(FileError::Parse { .. } | FileError::Invalid { .. })
            | CmdError::Usage(_) => EXIT_PARSE,
            CmdError::File(FileError::Core { source, .. }) | CmdError::Core(source) => {
                core_exit_code(source)
            }
        }
    }
}

fn core_exit_code(e: &gaussgraph_core::Error) -> i32 {
    use gaussgraph_core::Error as E;
    match e {
        E::NotSymplectic { .. } => EXIT_NOT_SYMPLECTIC,
        E::ImpureState { .. } | E::InvalidCovariance(_) => EXIT_IMPURE,
        E::IllConditioned { .. }
        | E::DegenerateColumn
        | E::DegeneratePhase
        | E::WrongBranch { .. } => EXIT_NUMERICAL,
        _ => EXIT_PARSE,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub code: i32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    /// Purity tolerance for input states and success tolerance of the reducer.
    pub tol: f64,
    pub max_branches: usize,
    /// Worker threads for multi-file commands; `None` uses all cores.
    pub jobs: Option<usize>,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            tol: 1e-8,
            max_branches: ReduceConfig::default().max_branches,
            jobs: None,
        }
    }
}

impl Settings {
    fn reduce_config(&self) -> ReduceConfig {
        ReduceConfig {
            tol: self.tol,
            max_branches: self.max_branches,
            ..ReduceConfig::default()
        }
    }
}

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable report");
    s.push('\n');
    s
}

fn emit(text: String, out: Option<&Path>) -> Result<String, CmdError> {
    match out {
        Some(path) => {
            fs::write(path, &text).map_err(|source| FileError::Io {
                path: path.to_path_buf(),
                source,
            })?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

struct Loaded {
    path: PathBuf,
    digest: String,
    state: GaussianState,
}

fn load(path: &Path, tol: f64) -> Result<Loaded, CmdError> {
    let bytes = fs::read(path).map_err(|source| FileError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let digest = hex::encode(Sha256::digest(&bytes));
    let text = String::from_utf8(bytes).map_err(|_| FileError::Parse {
        path: path.to_path_buf(),
        line: 1,
        column: 1,
        message: "file is not UTF-8".into(),
    })?;
    let state = io::state_from_text(path, &text, tol)?;
    Ok(Loaded {
        path: path.to_path_buf(),
        digest,
        state,
    })
}

pub fn build(circuit: &Path, out: Option<&Path>, db: bool) -> Result<Output, CmdError> {
    let state = io::build_from_circuit(circuit, db)?;
    let text = json(&io::StateFile::from_state(&state));
    Ok(Output {
        stdout: emit(text, out)?,
        code: EXIT_OK,
    })
}

pub fn graph(
    state: &Path,
    format: Format,
    threshold: f64,
    out: Option<&Path>,
    tol: f64,
) -> Result<Output, CmdError> {
    let loaded = load(state, tol)?;
    let g = graph_from_state(&loaded.state).map_err(CmdError::Core)?;
    Ok(Output {
        stdout: emit(export_graph(&g, format, threshold), out)?,
        code: EXIT_OK,
    })
}

/// Everything except the reduction.
fn diagnosis(loaded: &Loaded, cfg: &ReduceConfig, with_ppt: bool) -> Report {
    let state = &loaded.state;
    let n = state.modes();
    let (graph, graph_err, failure) = match graph_from_state(state) {
        Ok(g) => {
            let e = graph_error(&g);
            (
                Some(GraphRecord::from(&g)),
                Some(GraphErrorRecord {
                    trace_u: e.trace_u,
                    off_diagonal_norm_u: e.off_diagonal_norm_u,
                }),
                None,
            )
        }
        Err(e) => (None, None, Some(e.to_string())),
    };
    let verdict = sufficient_criterion(state, cfg.criterion_threshold);
    let ppt = (with_ppt && n >= 2).then(|| {
        (0..n)
            .map(|j| {
                let eigenvalues = ppt_symplectic_eigenvalues(state, &[j])
                    .expect("single mode is a proper subset");
                let entangled = eigenvalues[0] < 0.5 - 1e-9;
                PptRecord {
                    party: vec![j + 1],
                    eigenvalues,
                    entangled,
                }
            })
            .collect()
    });
    Report {
        input: loaded.path.display().to_string(),
        digest: loaded.digest.clone(),
        n,
        graph,
        graph_error: graph_err,
        graph_failure: failure,
        det_matrix: row_major(correlation_determinants(state).matrix()),
        criterion: CriterionRecord::from(&verdict),
        reduction: None,
        ppt,
    }
}

fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool, CmdError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        b = b.num_threads(j.max(1));
    }
    b.build().map_err(|e| CmdError::Usage(e.to_string()))
}

/// Runs `f` on every file (in parallel) and merges in input order. The first
/// error, in input order, decides the exit code; otherwise the largest report code.
fn over_files<F>(paths: &[PathBuf], jobs: Option<usize>, f: F) -> Result<Output, CmdError>
where
    F: Fn(&Path) -> Result<Report, CmdError> + Sync,
{
    if paths.is_empty() {
        return Err(CmdError::Usage("no input files".into()));
    }
    let results: Vec<Result<Report, CmdError>> =
        pool(jobs)?.install(|| paths.par_iter().map(|p| f(p)).collect());
    let mut reports = Vec::with_capacity(results.len());
    for r in results {
        reports.push(r?);
    }
    let code = reports
        .iter()
        .map(Report::exit_code)
        .max()
        .unwrap_or(EXIT_OK);
    let stdout = if reports.len() == 1 {
        json(&reports[0])
    } else {
        json(&reports)
    };
    Ok(Output { stdout, code })
}

pub fn diagnose(states: &[PathBuf], settings: &Settings) -> Result<Output, CmdError> {
    let cfg = settings.reduce_config();
    let code_free = |p: &Path| Ok(diagnosis(&load(p, settings.tol)?, &cfg, true));
    // diagnosis is not an error: report codes are ignored here
    over_files(states, settings.jobs, code_free).map(|o| Output { code: EXIT_OK, ..o })
}

fn output_paths(input: &Path, out_dir: Option<&Path>) -> (PathBuf, PathBuf) {
    let dir = out_dir
        .map(Path::to_path_buf)
        .unwrap_or_else(|| input.parent().unwrap_or(Path::new(".")).to_path_buf());
    let stem = input
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("state");
    (
        dir.join(format!("{stem}.reduced.json")),
        dir.join(format!("{stem}.glus.json")),
    )
}

pub fn reduce_files(
    states: &[PathBuf],
    out_dir: Option<&Path>,
    settings: &Settings,
) -> Result<Output, CmdError> {
    let cfg = settings.reduce_config();
    over_files(states, settings.jobs, |p| {
        let loaded = load(p, settings.tol)?;
        let mut report = diagnosis(&loaded, &cfg, false);
        let result = reduce(&loaded.state, &cfg).map_err(CmdError::Core)?;
        let mut record = ReductionRecord::from(&result);
        if let ReductionResult::Success(s) = &result {
            let (state_path, glu_path) = output_paths(p, out_dir);
            if let Some(dir) = state_path.parent() {
                fs::create_dir_all(dir).map_err(|source| FileError::Io {
                    path: dir.to_path_buf(),
                    source,
                })?;
            }
            io::write_state(&state_path, &s.state)?;
            io::write_glus(&glu_path, &s.glus)?;
            record.outputs = vec![
                state_path.display().to_string(),
                glu_path.display().to_string(),
            ];
        }
        report.reduction = Some(record);
        Ok(report)
    })
}

/// Independent soundness check: symplectic blocks, diagonal `U′` and
/// unchanged block determinants.
pub fn verify(state: &Path, glus: &Path, settings: &Settings) -> Result<Output, CmdError> {
    let loaded = load(state, settings.tol)?;
    let text = fs::read_to_string(glus).map_err(|source| FileError::Io {
        path: glus.to_path_buf(),
        source,
    })?;
    let file: GluFile = serde_json::from_str(&text).map_err(|e| FileError::Parse {
        path: glus.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let report = check_glus(&loaded.state, &file, settings.tol);
    Ok(Output {
        stdout: json(&report),
        code: report.exit_code(),
    })
}

pub fn check_glus(state: &GaussianState, file: &GluFile, tol: f64) -> VerifyReport {
    let mut report = VerifyReport {
        ok: false,
        violation: None,
        max_symplectic_deviation: 0.0,
        off_diagonal_u: None,
        max_det_change: None,
    };
    let fail = |mut r: VerifyReport, name: &str| {
        r.violation = Some(name.to_string());
        r
    };
    if file.blocks.len() != state.modes() || file.n != state.modes() {
        return fail(report, "mode-count");
    }
    let blocks: Vec<Mat2> = file
        .blocks
        .iter()
        .map(|[[a, b], [c, d]]| Mat2::new(*a, *b, *c, *d))
        .collect();
    for b in &blocks {
        report.max_symplectic_deviation = report
            .max_symplectic_deviation
            .max((b.determinant() - 1.0).abs());
    }
    if !blocks
        .iter()
        .all(|b| (b.determinant() - 1.0).abs() <= 1e-9 * (1.0 + b.norm_squared()))
    {
        return fail(report, "symplectic");
    }
    let Ok(glus) = GluSet::new(blocks) else {
        return fail(report, "symplectic");
    };
    let Ok(after) = apply_glus(state, &glus) else {
        return fail(report, "symplectic");
    };
    let Ok(g) = graph_from_state(&after) else {
        return fail(report, "graph-extraction");
    };
    let n = state.modes();
    let (mut off, mut diag) = (0.0_f64, 0.0_f64);
    for j in 0..n {
        diag = diag.max(g.u[(j, j)].abs());
        for k in 0..n {
            if j != k {
                off = off.max(g.u[(j, k)].abs());
            }
        }
    }
    report.off_diagonal_u = Some(off);
    let d0 = correlation_determinants(state);
    let d1 = correlation_determinants(&after);
    let change = (d0.matrix() - d1.matrix()).abs().max();
    report.max_det_change = Some(change);
    if !(off < tol * (1.0 + diag)) {
        return fail(report, "diagonal-u");
    }
    if !(change < 1e-8 * (1.0 + determinant_scale(state))) {
        return fail(report, "determinant-invariance");
    }
    report.ok = true;
    report
}
