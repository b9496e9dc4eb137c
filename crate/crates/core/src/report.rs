use serde::Serialize;

use crate::linalg::norm2;

/// How a driver decides it is done.
#[derive(Debug, Clone)]
pub enum Stopping {
    /// True relative error against a known `f(A) b`.
    Oracle { reference: Vec<f64>, rel_tol: f64 },
    /// Computable error estimate relative to the current iterate.
    Estimate { rel_tol: f64 },
}

impl Stopping {
    pub fn rel_tol(&self) -> f64 {
        match self {
            Stopping::Oracle { rel_tol, .. } | Stopping::Estimate { rel_tol } => *rel_tol,
        }
    }

    pub fn reference(&self) -> Option<&[f64]> {
        match self {
            Stopping::Oracle { reference, .. } => Some(reference),
            Stopping::Estimate { .. } => None,
        }
    }

    /// Absolute tolerance; the estimate variant needs a scale for the solution.
    pub fn abs_tol(&self, solution_scale: f64) -> f64 {
        match self {
            Stopping::Oracle { reference, rel_tol } => rel_tol * norm2(reference),
            Stopping::Estimate { rel_tol } => rel_tol * solution_scale,
        }
    }
}

/// Record of one method run.
#[derive(Debug, Clone, Default, Serialize)]
pub struct MethodReport {
    pub method: String,
    /// Outer iterations (Lanczos steps, CG steps, or rational iterations).
    pub iterations: usize,
    /// Restart cycles, when applicable.
    pub cycles: usize,
    pub matvecs: usize,
    /// Inner CG iterations per outer iteration (rational methods).
    pub inner_iterations: Vec<usize>,
    /// Vector operations other than matvecs, in units of one length-N update.
    pub vector_ops: f64,
    /// Peak number of stored length-N vectors.
    pub peak_vectors: usize,
    /// Error estimate at exit, relative.
    pub estimated_error: f64,
    /// True relative error at exit, when a reference was available.
    pub relative_error: Option<f64>,
    /// Per-iteration error (oracle) or estimate (otherwise).
    pub history: Vec<f64>,
    pub converged: bool,
    /// Pole count (multi-shift CG).
    #[serde(skip_serializing_if = "is_zero")]
    pub poles: usize,
    /// Active non-seed shifted systems per iteration (multi-shift CG).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub active_shifted_systems: Vec<usize>,
    /// Tracked bound on the inexactness `‖E_m‖` per outer iteration.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub perturbation_bounds: Vec<f64>,
}

fn is_zero(v: &usize) -> bool {
    *v == 0
}

impl MethodReport {
    pub fn new(method: &str) -> Self {
        MethodReport {
            method: method.to_string(),
            ..Default::default()
        }
    }

    /// Work in units of V with one matvec costing `matvec_cost`.
    pub fn work_units(&self, matvec_cost: f64) -> f64 {
        self.matvecs as f64 * matvec_cost + self.vector_ops
    }
}
