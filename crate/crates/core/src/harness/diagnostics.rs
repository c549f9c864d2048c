use serde::Serialize;

use crate::error::Result;
use crate::fem::{dirichlet_energy, NodalField};
use crate::grid::PeriodicGrid;

/// Per-time-level scalars of an evolution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsRecord {
    pub m: usize,
    pub t: f64,
    /// `int_I |x_rho|^2`.
    pub energy: f64,
    /// Length of the polygon `x(I)`.
    pub length: f64,
    /// Longest over shortest polygon edge.
    pub ratio: f64,
    /// Residual of the corrector's energy balance relative to `1/2 |x^{m-1}|_1^2`
    /// (unforced predictor-corrector runs, from `m = 1`).
    pub identity_residual: Option<f64>,
}

fn edge_lengths(x: &NodalField) -> impl Iterator<Item = f64> + '_ {
    let n = x.num_nodes();
    (0..n).map(move |j| {
        let prev = x.node((j + n - 1) % n);
        x.node(j)
            .iter()
            .zip(prev)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    })
}

pub fn curve_length(x: &NodalField) -> f64 {
    edge_lengths(x).sum()
}

/// `max_j |x_j - x_{j-1}| / min_j |x_j - x_{j-1}|`.
pub fn element_ratio(x: &NodalField) -> f64 {
    let (lo, hi) = edge_lengths(x).fold((f64::INFINITY, 0.0f64), |(lo, hi), l| {
        (lo.min(l), hi.max(l))
    });
    hi / lo
}

impl DiagnosticsRecord {
    pub fn measure(
        grid: &PeriodicGrid,
        m: usize,
        t: f64,
        x: &NodalField,
        identity_residual: Option<f64>,
    ) -> Result<Self> {
        Ok(Self {
            m,
            t,
            energy: dirichlet_energy(grid, x)?,
            length: curve_length(x),
            ratio: element_ratio(x),
            identity_residual,
        })
    }
}
