//! Runs the independent routes on one problem and compares them.

use std::fmt;
use std::str::FromStr;

use crate::conjugate::{scan, ConjugateReport, DomainFamily, ScanOptions, DEFAULT_T_GRID, DEFAULT_T_MIN_FRACTION};
use crate::constraint_matrix::{default_lambda_sequence, index_limit, IndexLimitReport};
use crate::discrete::{constrained_morse_index, DEFAULT_INTERIOR_NODES};
use crate::error::{Error, Result};
use crate::maslov::{sweep, LambdaSweepReport, SweepOptions, DEFAULT_LAMBDA_GRID};
use crate::model::{BoundaryCondition, SchroedingerProblem, DEFAULT_INTERSECTION_TOL};
use crate::scalar::Real;
use crate::shooting::{steps_for, DEFAULT_STEPS_PER_UNIT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Route {
    Direct,
    Matrix,
    Maslov,
    Conjugate,
}

impl Route {
    pub const ALL: [Route; 4] = [Route::Direct, Route::Matrix, Route::Maslov, Route::Conjugate];

    pub fn as_str(&self) -> &'static str {
        match self {
            Route::Direct => "direct",
            Route::Matrix => "matrix",
            Route::Maslov => "maslov",
            Route::Conjugate => "conjugate",
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Route {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Route::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown route {s:?}")))
    }
}

/// Discretisation parameters shared by the routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Numerics {
    pub steps_per_unit: usize,
    pub lambda_grid: usize,
    pub t_grid: usize,
    pub n_interior: usize,
    pub intersection_tol: f64,
    pub t_min_fraction: f64,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            steps_per_unit: DEFAULT_STEPS_PER_UNIT,
            lambda_grid: DEFAULT_LAMBDA_GRID,
            t_grid: DEFAULT_T_GRID,
            n_interior: DEFAULT_INTERIOR_NODES,
            intersection_tol: DEFAULT_INTERSECTION_TOL,
            t_min_fraction: DEFAULT_T_MIN_FRACTION,
        }
    }
}

impl Numerics {
    pub fn sweep_options<T: Real>(&self) -> SweepOptions<T> {
        SweepOptions {
            grid_points: self.lambda_grid,
            steps_per_unit: self.steps_per_unit,
            intersection_tol: T::lit(self.intersection_tol),
        }
    }

    pub fn scan_options(&self) -> ScanOptions {
        ScanOptions { grid_points: self.t_grid, steps_per_unit: self.steps_per_unit }
    }
}

/// `n(𝓛_c) = n(𝓛) − lim n(M(λ))`, with `n(𝓛)` from an unconstrained sweep.
#[derive(Debug, Clone)]
pub struct MatrixRoute<T> {
    pub unconstrained_index: usize,
    pub limit: IndexLimitReport<T>,
    pub constrained_index: usize,
}

pub fn matrix_route<T: Real>(problem: &SchroedingerProblem<T>, numerics: &Numerics) -> Result<MatrixRoute<T>> {
    let unconstrained_index = sweep(&problem.unconstrained(), &numerics.sweep_options())?.morse_index;
    let steps = steps_for(&problem.interval(), numerics.steps_per_unit);
    let limit = index_limit(problem, &default_lambda_sequence(problem)?, steps)?;
    let constrained_index = unconstrained_index.checked_sub(limit.limit).ok_or_else(|| {
        Error::InternalInconsistency(format!("n(M) = {} exceeds n(L) = {unconstrained_index}", limit.limit))
    })?;
    Ok(MatrixRoute { unconstrained_index, limit, constrained_index })
}

/// Conjugate points over the family shrinking about the midpoint.
pub fn conjugate_route<T: Real>(problem: &SchroedingerProblem<T>, numerics: &Numerics) -> Result<ConjugateReport<T>> {
    let family = DomainFamily::centred(&problem.interval(), T::lit(numerics.t_min_fraction))?;
    scan(problem, &family, &numerics.scan_options())
}

#[derive(Debug, Clone, Default)]
pub struct MorseReport<T> {
    pub direct: Option<usize>,
    pub matrix: Option<MatrixRoute<T>>,
    pub maslov: Option<LambdaSweepReport<T>>,
    pub conjugate: Option<ConjugateReport<T>>,
    /// Requested routes that do not apply, with the reason.
    pub skipped: Vec<(Route, String)>,
}

impl<T: Real> MorseReport<T> {
    /// The computed constrained indices, in route order.
    pub fn indices(&self) -> Vec<(Route, usize)> {
        let mut out = Vec::new();
        if let Some(n) = self.direct {
            out.push((Route::Direct, n));
        }
        if let Some(m) = &self.matrix {
            out.push((Route::Matrix, m.constrained_index));
        }
        if let Some(s) = &self.maslov {
            out.push((Route::Maslov, s.morse_index));
        }
        if let Some(c) = &self.conjugate {
            out.push((Route::Conjugate, c.morse_index_claim));
        }
        out
    }

    /// All computed integers are equal.
    pub fn agreement(&self) -> bool {
        let idx = self.indices();
        idx.windows(2).all(|w| w[0].1 == w[1].1)
    }
}

/// Runs `routes` on `problem`.
pub fn morse_report<T: Real>(
    problem: &SchroedingerProblem<T>,
    routes: &[Route],
    numerics: &Numerics,
) -> Result<MorseReport<T>> {
    let mut report = MorseReport { direct: None, matrix: None, maslov: None, conjugate: None, skipped: Vec::new() };
    let want = |r: Route| routes.contains(&r);
    if want(Route::Direct) {
        report.direct = Some(constrained_morse_index(problem, numerics.n_interior)?);
    }
    if want(Route::Matrix) {
        report.matrix = Some(matrix_route(problem, numerics)?);
    }
    if want(Route::Maslov) {
        report.maslov = Some(sweep(problem, &numerics.sweep_options())?);
    }
    if want(Route::Conjugate) {
        if problem.bc() == BoundaryCondition::Dirichlet {
            report.conjugate = Some(conjugate_route(problem, numerics)?);
        } else {
            report.skipped.push((Route::Conjugate, "conjugate points are defined for Dirichlet problems only".into()));
        }
    }
    Ok(report)
}
