//! Curve shortening flow steppers.
//!
//! All schemes discretize `|x_rho|^2 x_t = x_rhorho` with mass lumping on the
//! time derivative. Each step solves one cyclic tridiagonal system per
//! coordinate, with a single shared matrix.

use crate::error::{Error, Result};
use crate::fem::{checked_tangents, lumped_load, ElementField, NodalField};
use crate::grid::PeriodicGrid;
use crate::linalg::CyclicTridiagonal;
use crate::manufactured::Forcing;

#[derive(Debug, Clone, PartialEq)]
pub struct CsfState {
    pub x: NodalField,
    pub t: f64,
    pub dt: f64,
    pub step: usize,
}

impl CsfState {
    pub fn new(x: NodalField, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Config(format!(
                "time step must be positive, got {dt}"
            )));
        }
        Ok(Self {
            x,
            t: 0.0,
            dt,
            step: 0,
        })
    }

    fn t_half(&self) -> f64 {
        self.t + 0.5 * self.dt
    }

    fn advanced(&self, x: NodalField) -> Self {
        Self {
            x,
            t: (self.step + 1) as f64 * self.dt,
            dt: self.dt,
            step: self.step + 1,
        }
    }
}

/// Matrix `M_w / tau + theta K` with `M_w` the lumped mass weighted by the
/// element values `w`, and `K` the stiffness matrix.
pub fn system_matrix(
    grid: &PeriodicGrid,
    weight: &ElementField,
    tau: f64,
    theta: f64,
) -> CyclicTridiagonal {
    let n = grid.len();
    let mut m = CyclicTridiagonal::zeros(n);
    let w = weight.values();
    for i in 0..n {
        let next = (i + 1) % n;
        let (h0, h1) = (grid.h(i), grid.h(next));
        let mass = 0.5 * (h0 * w[i] + h1 * w[next]);
        m.sub[i] = -theta / h0;
        m.sup[i] = -theta / h1;
        m.diag[i] = mass / tau + theta * (1.0 / h0 + 1.0 / h1);
    }
    m
}

/// Solves `(M_w / tau + theta K) X = M_w / tau x_old - (1 - theta) K x_old + load`.
fn solve_step(
    grid: &PeriodicGrid,
    x_old: &NodalField,
    weight: &ElementField,
    tau: f64,
    theta: f64,
    load: Option<&NodalField>,
) -> Result<NodalField> {
    let n = grid.len();
    let d = x_old.dim();
    let matrix = system_matrix(grid, weight, tau, theta);
    let factor = matrix.factor()?;
    let w = weight.values();
    let mut out = NodalField::zeros(n, d);
    for k in 0..d {
        let xk = x_old.component(k);
        let mut rhs = vec![0.0; n];
        for i in 0..n {
            let next = (i + 1) % n;
            let prev = (i + n - 1) % n;
            let (h0, h1) = (grid.h(i), grid.h(next));
            let mass = 0.5 * (h0 * w[i] + h1 * w[next]);
            let kx = (xk[i] - xk[prev]) / h0 - (xk[next] - xk[i]) / h1;
            rhs[i] = mass / tau * xk[i] - (1.0 - theta) * kx;
            if let Some(l) = load {
                rhs[i] += l.node(i)[k];
            }
        }
        out.set_component(k, &factor.solve(&rhs));
    }
    Ok(out)
}

fn forcing_load(
    grid: &PeriodicGrid,
    forcing: Option<&dyn Forcing>,
    t: f64,
    dim: usize,
) -> Result<Option<NodalField>> {
    match forcing {
        None => Ok(None),
        Some(f) => {
            if f.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: f.dim(),
                });
            }
            lumped_load(grid, f, t).map(Some)
        }
    }
}

fn weight_of(grid: &PeriodicGrid, x: &NodalField, step: usize) -> Result<ElementField> {
    x.check_on(grid)?;
    checked_tangents(grid, x)
        .map(|q| q.norm_squared())
        .map_err(|e| e.at_step(step))
}

/// First-order semi-implicit step
/// `((x' - x)/dt, eta |x_rho|^2)^h + (x'_rho, eta_rho) = (f(t_m), eta)^h`.
///
/// The forcing is taken at the old time level; this is what reproduces the
/// published first-order error tables.
pub fn first_order_step(
    grid: &PeriodicGrid,
    state: &CsfState,
    forcing: Option<&dyn Forcing>,
) -> Result<CsfState> {
    let w = weight_of(grid, &state.x, state.step)?;
    let load = forcing_load(grid, forcing, state.t, state.x.dim())?;
    let x = solve_step(grid, &state.x, &w, state.dt, 1.0, load.as_ref())
        .map_err(|e| e.at_step(state.step))?;
    Ok(state.advanced(x))
}

/// Predictor: the first-order step over `dt / 2`, with forcing at `t + dt/2`.
pub fn predictor_step(
    grid: &PeriodicGrid,
    state: &CsfState,
    forcing: Option<&dyn Forcing>,
) -> Result<NodalField> {
    let w = weight_of(grid, &state.x, state.step)?;
    let load = forcing_load(grid, forcing, state.t_half(), state.x.dim())?;
    solve_step(grid, &state.x, &w, 0.5 * state.dt, 1.0, load.as_ref())
        .map_err(|e| e.at_step(state.step))
}

/// Crank-Nicolson-type corrector with the metric frozen at the predicted curve:
/// `((x' - x)/dt, eta |x^{1/2}_rho|^2)^h + 1/2 (x'_rho + x_rho, eta_rho) = (f, eta)^h`.
pub fn corrector_step(
    grid: &PeriodicGrid,
    state: &CsfState,
    x_half: &NodalField,
    forcing: Option<&dyn Forcing>,
) -> Result<CsfState> {
    x_half.check_compatible(&state.x)?;
    let w = weight_of(grid, x_half, state.step)?;
    let load = forcing_load(grid, forcing, state.t_half(), state.x.dim())?;
    let x = solve_step(grid, &state.x, &w, state.dt, 0.5, load.as_ref())
        .map_err(|e| e.at_step(state.step))?;
    Ok(state.advanced(x))
}

/// Predictor followed by corrector. Also returns the predicted curve, which
/// the energy identity needs.
pub fn pc_step_with_half(
    grid: &PeriodicGrid,
    state: &CsfState,
    forcing: Option<&dyn Forcing>,
) -> Result<(CsfState, NodalField)> {
    let x_half = predictor_step(grid, state, forcing)?;
    let next = corrector_step(grid, state, &x_half, forcing)?;
    Ok((next, x_half))
}

pub fn pc_step(
    grid: &PeriodicGrid,
    state: &CsfState,
    forcing: Option<&dyn Forcing>,
) -> Result<CsfState> {
    pc_step_with_half(grid, state, forcing).map(|(s, _)| s)
}

/// Left side minus right side of the corrector's energy balance
/// `1/2 |x'|_1^2 + 1/dt (|x' - x|^2, |x^{1/2}_rho|^2)^h = 1/2 |x|_1^2`.
pub fn energy_identity_residual(
    grid: &PeriodicGrid,
    x_old: &NodalField,
    x_half: &NodalField,
    x_new: &NodalField,
    dt: f64,
) -> Result<f64> {
    use crate::fem::{dirichlet_energy, lumped_inner};
    let w = crate::fem::derivative(grid, x_half)?.norm_squared();
    let diff = x_new.axpby(1.0, x_old, -1.0);
    let dissipation = lumped_inner(grid, &diff, &diff, Some(&w))? / dt;
    Ok(0.5 * dirichlet_energy(grid, x_new)? + dissipation - 0.5 * dirichlet_energy(grid, x_old)?)
}
