//! Basin-of-attraction sampling, convergence statistics and rendering.
//!
//! Initial values are sampled on an equally spaced grid (both endpoints
//! included), each cell is solved with the requested scheme and labeled with
//! the reached root or a failure code. Statistics support two criteria:
//! plain convergence (any root counts) and correct-attractor convergence
//! (the discrete iteration must reach the same root as the exact continuous
//! flow, supplied as per-cell oracle labels).
//!
//! Cells are independent, so sampling fans out over the current rayon pool;
//! results are written by index, which makes grids and rendered images
//! byte-identical regardless of the worker count.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::adaptive::{solve_adaptive, SolveOutcome, SolveStatus, SolverConfig};
use crate::classical::{attractor_oracle, solve_fixed_step, OracleConfig};
use crate::error::{Error, Result};
use crate::field::{DomainBox, Preconditioner, ProblemDef};

/// Scheme used to classify a grid cell. Both run the Newton field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolverKind {
    /// Adaptive step-size control.
    Adaptive,
    /// Constant step; `1` is the classical Newton method.
    FixedStep(f64),
}

impl SolverKind {
    pub fn label(self) -> String {
        match self {
            Self::Adaptive => "adaptive".into(),
            Self::FixedStep(t) => format!("fixed:{t}"),
        }
    }
}

/// Non-convergent cell classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FailureCode {
    StepUnderflow,
    SingularJacobian,
    MaxIterations,
    NonFinite,
    /// Converged by the field-norm test but near no known root.
    UnmatchedRoot,
}

impl FailureCode {
    pub const ALL: [FailureCode; 5] = [
        FailureCode::StepUnderflow,
        FailureCode::SingularJacobian,
        FailureCode::MaxIterations,
        FailureCode::NonFinite,
        FailureCode::UnmatchedRoot,
    ];

    pub fn index(self) -> usize {
        match self {
            Self::StepUnderflow => 0,
            Self::SingularJacobian => 1,
            Self::MaxIterations => 2,
            Self::NonFinite => 3,
            Self::UnmatchedRoot => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::StepUnderflow => "StepUnderflow",
            Self::SingularJacobian => "SingularJacobian",
            Self::MaxIterations => "MaxIterations",
            Self::NonFinite => "NonFinite",
            Self::UnmatchedRoot => "UnmatchedRoot",
        }
    }
}

/// Cell classification: reached root or failure code.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CellLabel {
    Root(usize),
    Failure(FailureCode),
}

/// Per-cell solve summary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellRecord {
    pub label: CellLabel,
    /// Accepted outer iterations.
    pub iterations: u32,
    /// Total field evaluations, including rejected trials.
    pub field_evals: u64,
}

/// Rectangular grid of classified initial values.
#[derive(Debug, Clone, PartialEq)]
pub struct BasinGrid {
    pub domain: DomainBox,
    pub nx: usize,
    pub ny: usize,
    /// Known roots of the sampled problem, for rendering markers.
    pub root_points: Vec<[f64; 2]>,
    /// Row-major by y index: cell (i, j) lives at `j * nx + i`.
    pub cells: Vec<CellRecord>,
}

impl BasinGrid {
    pub fn cell(&self, i: usize, j: usize) -> &CellRecord {
        &self.cells[j * self.nx + i]
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

/// Coordinates of grid node (i, j); both endpoints are included.
pub fn grid_point(domain: &DomainBox, nx: usize, ny: usize, i: usize, j: usize) -> [f64; 2] {
    let lo = domain.lo();
    let hi = domain.hi();
    [
        lo[0] + i as f64 * (hi[0] - lo[0]) / (nx - 1) as f64,
        lo[1] + j as f64 * (hi[1] - lo[1]) / (ny - 1) as f64,
    ]
}

fn check_grid_spec(problem: &ProblemDef, domain: &DomainBox, nx: usize, ny: usize) -> Result<()> {
    if problem.dim() != 2 {
        return Err(Error::InvalidParameter(
            "grid sampling needs a two-dimensional problem".into(),
        ));
    }
    if nx < 2 || ny < 2 {
        return Err(Error::InvalidParameter(format!(
            "grid resolution must be at least 2 per axis, got {nx}x{ny}"
        )));
    }
    if domain.dim() != 2 {
        return Err(Error::InvalidParameter("grid domain must be two-dimensional".into()));
    }
    if !problem.domain().contains_box(domain) {
        return Err(Error::InvalidParameter(
            "sampling domain must lie within the problem domain".into(),
        ));
    }
    Ok(())
}

fn classify(outcome: &SolveOutcome) -> CellLabel {
    match outcome.status {
        SolveStatus::Converged => match outcome.matched_root {
            Some(k) => CellLabel::Root(k),
            None => CellLabel::Failure(FailureCode::UnmatchedRoot),
        },
        SolveStatus::StepUnderflow => CellLabel::Failure(FailureCode::StepUnderflow),
        SolveStatus::SingularJacobian => CellLabel::Failure(FailureCode::SingularJacobian),
        SolveStatus::MaxIterations => CellLabel::Failure(FailureCode::MaxIterations),
        SolveStatus::NonFinite => CellLabel::Failure(FailureCode::NonFinite),
    }
}

/// Classifies every grid cell with the requested solver.
pub fn sample_grid(
    problem: &ProblemDef,
    kind: SolverKind,
    domain: &DomainBox,
    nx: usize,
    ny: usize,
    config: &SolverConfig,
) -> Result<BasinGrid> {
    check_grid_spec(problem, domain, nx, ny)?;
    config.validate()?;
    if let SolverKind::FixedStep(t) = kind {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "fixed step must lie in (0, 1], got {t}"
            )));
        }
    }

    let precond = Preconditioner::NewtonInverse;
    let mut cells = Vec::with_capacity(nx * ny);
    (0..nx * ny)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx % nx, idx / nx);
            let x0 = grid_point(domain, nx, ny, i, j);
            let outcome = match kind {
                SolverKind::Adaptive => solve_adaptive(problem, &precond, &x0, config),
                SolverKind::FixedStep(t) => solve_fixed_step(problem, &precond, &x0, t, config),
            };
            CellRecord {
                label: classify(&outcome),
                iterations: outcome.trace.len() as u32,
                field_evals: outcome.field_evals,
            }
        })
        .collect_into_vec(&mut cells);

    let root_points = problem
        .known_roots()
        .iter()
        .map(|r| [r[0], r[1]])
        .collect();

    Ok(BasinGrid {
        domain: domain.clone(),
        nx,
        ny,
        root_points,
        cells,
    })
}

/// Continuous-flow oracle label for every grid cell, in cell index order.
pub fn oracle_labels(
    problem: &ProblemDef,
    domain: &DomainBox,
    nx: usize,
    ny: usize,
    config: &OracleConfig,
) -> Result<Vec<Option<usize>>> {
    check_grid_spec(problem, domain, nx, ny)?;
    let mut labels = Vec::with_capacity(nx * ny);
    (0..nx * ny)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx % nx, idx / nx);
            let x0 = grid_point(domain, nx, ny, i, j);
            attractor_oracle(problem, &x0, config)
        })
        .collect_into_vec(&mut labels);
    Ok(labels)
}

/// Convergence counting rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    /// A cell counts if it reached any root.
    PlainConvergence,
    /// A cell counts only if it reached the root of its exact attractor.
    CorrectAttractor,
}

impl Criterion {
    pub fn name(self) -> &'static str {
        match self {
            Self::PlainConvergence => "plain",
            Self::CorrectAttractor => "correct",
        }
    }
}

/// Aggregated convergence statistics for one grid and counting rule.
#[derive(Debug, Clone, PartialEq)]
pub struct StatsReport {
    pub solver: String,
    pub criterion: Criterion,
    pub percent_convergent: f64,
    /// Cells counted as convergent, per root index.
    pub per_root_counts: Vec<u64>,
    /// Non-counted cells, indexed by [`FailureCode::index`]; cells labeled
    /// with a root that failed the correct-attractor check land in none of
    /// the failure buckets and are reported in `wrong_attractor`.
    pub failure_counts: [u64; 5],
    /// Root-labeled cells rejected by the correct-attractor criterion.
    pub wrong_attractor: u64,
    pub total_cells: u64,
}

impl StatsReport {
    pub fn convergent_cells(&self) -> u64 {
        self.per_root_counts.iter().sum()
    }

    /// All cells not counted as convergent.
    pub fn failed_cells(&self) -> u64 {
        self.total_cells - self.convergent_cells()
    }
}

/// Counts convergent cells under the requested criterion.
///
/// `oracle` must hold one label per cell (in cell index order) when the
/// criterion is [`Criterion::CorrectAttractor`]; cells whose oracle label is
/// `None` cannot be counted convergent but stay in the denominator.
pub fn convergence_stats(
    grid: &BasinGrid,
    solver: &str,
    criterion: Criterion,
    oracle: Option<&[Option<usize>]>,
) -> Result<StatsReport> {
    let n_roots = grid.root_points.len();
    let mut per_root_counts = vec![0u64; n_roots];
    let mut failure_counts = [0u64; 5];
    let mut wrong_attractor = 0u64;

    let oracle = match criterion {
        Criterion::PlainConvergence => None,
        Criterion::CorrectAttractor => {
            let labels = oracle.ok_or(Error::MissingOracle)?;
            if labels.len() != grid.len() {
                return Err(Error::DimensionMismatch {
                    expected: grid.len(),
                    actual: labels.len(),
                });
            }
            Some(labels)
        }
    };

    for (idx, cell) in grid.cells.iter().enumerate() {
        match cell.label {
            CellLabel::Root(k) => {
                let counts = match oracle {
                    None => true,
                    Some(labels) => labels[idx] == Some(k),
                };
                if counts {
                    per_root_counts[k] += 1;
                } else {
                    wrong_attractor += 1;
                }
            }
            CellLabel::Failure(code) => failure_counts[code.index()] += 1,
        }
    }

    let total_cells = grid.len() as u64;
    let convergent: u64 = per_root_counts.iter().sum();
    Ok(StatsReport {
        solver: solver.to_string(),
        criterion,
        percent_convergent: 100.0 * convergent as f64 / total_cells as f64,
        per_root_counts,
        failure_counts,
        wrong_attractor,
        total_cells,
    })
}

/// Colors for roots and failure codes.
#[derive(Debug, Clone, PartialEq)]
pub struct Palette {
    /// One color per root index.
    pub root_colors: Vec<[u8; 3]>,
    /// Indexed by [`FailureCode::index`].
    pub failure_colors: [[u8; 3]; 5],
}

impl Palette {
    /// Distinct hues for up to `n_roots` roots over dark failure shades.
    pub fn default_for(n_roots: usize) -> Self {
        const HUES: [[u8; 3]; 8] = [
            [221, 64, 56],
            [72, 160, 73],
            [64, 98, 214],
            [235, 156, 42],
            [150, 73, 184],
            [52, 180, 180],
            [214, 203, 66],
            [190, 100, 140],
        ];
        Self {
            root_colors: (0..n_roots).map(|k| HUES[k % HUES.len()]).collect(),
            failure_colors: [
                [18, 24, 78],   // StepUnderflow
                [12, 16, 52],   // SingularJacobian
                [28, 36, 110],  // MaxIterations
                [0, 0, 0],      // NonFinite
                [70, 70, 70],   // UnmatchedRoot
            ],
        }
    }

    fn color_of(&self, label: CellLabel) -> Result<[u8; 3]> {
        match label {
            CellLabel::Root(k) => self.root_colors.get(k).copied().ok_or_else(|| {
                Error::InvalidParameter(format!("palette has no color for root {k}"))
            }),
            CellLabel::Failure(code) => Ok(self.failure_colors[code.index()]),
        }
    }
}

/// Renders the grid as a plain-text portable pixmap (P3, maxval 255).
///
/// The top pixel row corresponds to the maximal y coordinate. Each known
/// root inside the domain is marked with a small circle of inverted color.
pub fn render_ppm(grid: &BasinGrid, palette: &Palette) -> Result<Vec<u8>> {
    let (nx, ny) = (grid.nx, grid.ny);
    let mut colors = Vec::with_capacity(nx * ny);
    for cell in &grid.cells {
        colors.push(palette.color_of(cell.label)?);
    }

    let radius = (nx.min(ny) as f64 / 50.0).max(2.0);
    let lo = grid.domain.lo();
    let hi = grid.domain.hi();
    for root in &grid.root_points {
        if !grid.domain.contains(root) {
            continue;
        }
        let px = (root[0] - lo[0]) / (hi[0] - lo[0]) * (nx - 1) as f64;
        let py = (root[1] - lo[1]) / (hi[1] - lo[1]) * (ny - 1) as f64;
        let reach = radius.ceil() as isize + 1;
        for dj in -reach..=reach {
            for di in -reach..=reach {
                let i = px.round() as isize + di;
                let j = py.round() as isize + dj;
                if i < 0 || j < 0 || i >= nx as isize || j >= ny as isize {
                    continue;
                }
                let dist = (i as f64 - px).hypot(j as f64 - py);
                if (dist - radius).abs() <= 0.6 {
                    let c = &mut colors[j as usize * nx + i as usize];
                    *c = [255 - c[0], 255 - c[1], 255 - c[2]];
                }
            }
        }
    }

    let mut out = Vec::with_capacity(nx * ny * 12 + 32);
    write!(out, "P3\n{nx} {ny}\n255\n")?;
    for j in (0..ny).rev() {
        for i in 0..nx {
            let c = colors[j * nx + i];
            writeln!(out, "{} {} {}", c[0], c[1], c[2])?;
        }
    }
    Ok(out)
}

/// Serializes `x` with 17 significant digits, round-trip exact for f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub const STATS_CSV_HEADER: &str = "solver,criterion,percent,cells,failures";

/// One CSV row for a stats report, matching [`STATS_CSV_HEADER`].
pub fn stats_csv_row(report: &StatsReport) -> String {
    format!(
        "{},{},{},{},{}",
        report.solver,
        report.criterion.name(),
        fmt_f64(report.percent_convergent),
        report.total_cells,
        report.failed_cells()
    )
}

const ORACLE_CACHE_HEADER: &str = "i,j,root_index";

/// Writes oracle labels as a `(i, j, root_index)` CSV sidecar;
/// `root_index` is -1 for cells with no attractor.
pub fn write_oracle_cache(
    path: &Path,
    nx: usize,
    ny: usize,
    labels: &[Option<usize>],
) -> Result<()> {
    if labels.len() != nx * ny {
        return Err(Error::DimensionMismatch {
            expected: nx * ny,
            actual: labels.len(),
        });
    }
    let mut out = String::with_capacity(labels.len() * 8 + 16);
    out.push_str(ORACLE_CACHE_HEADER);
    out.push('\n');
    for (idx, label) in labels.iter().enumerate() {
        let (i, j) = (idx % nx, idx / nx);
        let root = label.map_or(-1i64, |k| k as i64);
        out.push_str(&format!("{i},{j},{root}\n"));
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Reads an oracle cache written by [`write_oracle_cache`], validating the
/// expected grid size.
pub fn read_oracle_cache(path: &Path, nx: usize, ny: usize) -> Result<Vec<Option<usize>>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header.trim() == ORACLE_CACHE_HEADER => {}
        other => {
            return Err(Error::MalformedCache(format!(
                "expected header '{ORACLE_CACHE_HEADER}', got {other:?}"
            )))
        }
    }
    let mut labels = vec![None; nx * ny];
    let mut seen = vec![false; nx * ny];
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let parse = |s: Option<&str>| -> std::result::Result<i64, Error> {
            s.map(str::trim)
                .ok_or_else(|| Error::MalformedCache(format!("line {}: missing field", lineno + 2)))?
                .parse::<i64>()
                .map_err(|e| Error::MalformedCache(format!("line {}: {e}", lineno + 2)))
        };
        let i = parse(parts.next())?;
        let j = parse(parts.next())?;
        let root = parse(parts.next())?;
        if i < 0 || i >= nx as i64 || j < 0 || j >= ny as i64 {
            return Err(Error::MalformedCache(format!(
                "line {}: cell ({i}, {j}) outside {nx}x{ny} grid",
                lineno + 2
            )));
        }
        let idx = j as usize * nx + i as usize;
        labels[idx] = if root < 0 { None } else { Some(root as usize) };
        seen[idx] = true;
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::MalformedCache(format!(
            "cell ({}, {}) missing",
            missing % nx,
            missing / nx
        )));
    }
    Ok(labels)
}
