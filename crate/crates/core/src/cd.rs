//! Curve diffusion steppers.
//!
//! The fourth-order flow is split into position `x` and curvature-type
//! variable `y = x_rhorho / |x_rho|^2`. Every scheme solves one coupled sparse
//! system of size `2 d J` per stage, with unknowns ordered node-major:
//! `[x_j (d entries), y_j (d entries)]` for each node `j`.
//!
//! All non-lumped products are integrated with the 3-point Gauss rule, which
//! is exact for the degree-4 element integrands that occur.

use crate::error::{Error, Result};
use crate::fem::{
    checked_tangents, derivative, dirichlet_energy, dot, lumped_load, GaussRule, NodalField,
};
use crate::grid::PeriodicGrid;
use crate::linalg::{CyclicTridiagonal, TripletBuilder};
use crate::manufactured::Forcing;

/// Scalar `2 a.c + |a|^2 |b|^2`; `F_1(a, b, c)` is this multiple of the identity.
pub fn f1_coefficient(a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    2.0 * dot(a, c) + dot(a, a) * dot(b, b)
}

/// `F_1(a, b, c)` as a row-major `d x d` matrix.
pub fn eval_f1(a: &[f64], b: &[f64], c: &[f64]) -> Vec<f64> {
    let d = a.len();
    let s = f1_coefficient(a, b, c);
    let mut m = vec![0.0; d * d];
    for k in 0..d {
        m[k * d + k] = s;
    }
    m
}

/// Writes `F_2(a, b, c) = 2 (c (x) a - a (x) c) + 2 (a.b) (a (x) b - b (x) a)`
/// row-major into `out`, where `(u (x) v)_kl = u_k v_l`.
pub fn f2_into(a: &[f64], b: &[f64], c: &[f64], out: &mut [f64]) {
    let d = a.len();
    let ab = 2.0 * dot(a, b);
    for k in 0..d {
        for l in 0..d {
            out[k * d + l] = 2.0 * (c[k] * a[l] - a[k] * c[l]) + ab * (a[k] * b[l] - b[k] * a[l]);
        }
    }
}

pub fn eval_f2(a: &[f64], b: &[f64], c: &[f64]) -> Vec<f64> {
    let mut m = vec![0.0; a.len() * a.len()];
    f2_into(a, b, c, &mut m);
    m
}

/// `F_cd = F_1 + F_2`.
pub fn eval_fcd(a: &[f64], b: &[f64], c: &[f64]) -> Vec<f64> {
    let mut m = eval_f2(a, b, c);
    let s = f1_coefficient(a, b, c);
    let d = a.len();
    for k in 0..d {
        m[k * d + k] += s;
    }
    m
}

#[derive(Debug, Clone, PartialEq)]
pub struct CdState {
    pub x: NodalField,
    /// `y^{m-1/2}`, the explicit curvature data of the next predictor.
    pub y_half_prev: NodalField,
    /// `y^m`, kept for error reporting.
    pub y_full: NodalField,
    pub t: f64,
    pub dt: f64,
    pub step: usize,
}

impl CdState {
    /// Initial state with `y^0` from [`init_curvature`] and `y^{-1/2} = y^0`.
    pub fn new(grid: &PeriodicGrid, x: NodalField, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Config(format!(
                "time step must be positive, got {dt}"
            )));
        }
        let y = init_curvature(grid, &x)?;
        Ok(Self {
            x,
            y_half_prev: y.clone(),
            y_full: y,
            t: 0.0,
            dt,
            step: 0,
        })
    }

    fn t_half(&self) -> f64 {
        self.t + 0.5 * self.dt
    }

    fn next_time(&self) -> f64 {
        (self.step + 1) as f64 * self.dt
    }
}

/// Solves `(y, eta |x_rho|^2) + (x_rho, eta_rho) = 0` with the consistent
/// weighted mass matrix.
pub fn init_curvature(grid: &PeriodicGrid, x: &NodalField) -> Result<NodalField> {
    x.check_on(grid)?;
    let w = checked_tangents(grid, x)?.norm_squared();
    let n = grid.len();
    let d = x.dim();
    let mut m = CyclicTridiagonal::zeros(n);
    for e in 0..n {
        let (a, b) = grid.element_nodes(e);
        let wh = w.values()[e] * grid.h(e);
        m.diag[a] += wh / 3.0;
        m.diag[b] += wh / 3.0;
        // element e couples a (left) and b (right)
        m.sup[a] += wh / 6.0;
        m.sub[b] += wh / 6.0;
    }
    let factor = m.factor()?;
    let mut y = NodalField::zeros(n, d);
    for k in 0..d {
        let xk = x.component(k);
        let mut rhs = vec![0.0; n];
        for e in 0..n {
            let (a, b) = grid.element_nodes(e);
            let g = (xk[b] - xk[a]) / grid.h(e);
            rhs[a] += g;
            rhs[b] -= g;
        }
        y.set_component(k, &factor.solve(&rhs));
    }
    Ok(y)
}

/// Pointwise `2 y_half - y_prev`.
pub fn reconstruct_y_full(y_half: &NodalField, y_full_prev: &NodalField) -> Result<NodalField> {
    y_half.check_compatible(y_full_prev)?;
    Ok(y_half.axpby(2.0, y_full_prev, -1.0))
}

/// One coupled linear stage
///
/// ```text
/// (X - x_old)/tau . chi w - (Y_rho, chi_rho) - 2((Y_rho.q) c, chi)
///     - ((c.Y) c, chi w) - (F_2(q, c, c_rho) Y, chi) = (f, chi)^h
/// (Y, eta w) + theta (X_rho, eta_rho) [+ 2(((X_rho - q).q) c, eta)]
///     = -(1 - theta)(x_old_rho, eta_rho)
/// ```
///
/// where `q = g_rho` and `w = |q|^2` come from the geometry curve `g` and `c`
/// is the explicit curvature data. The bracketed term is the linearised
/// metric of the predictor.
struct Stage<'a> {
    grid: &'a PeriodicGrid,
    x_old: &'a NodalField,
    geometry: &'a NodalField,
    curvature: &'a NodalField,
    tau: f64,
    theta: f64,
    linearized: bool,
    load: Option<NodalField>,
}

impl Stage<'_> {
    fn solve(&self) -> Result<(NodalField, NodalField)> {
        let grid = self.grid;
        let n = grid.len();
        let d = self.x_old.dim();
        let bs = 2 * d;
        let size = n * bs;
        let q_field = checked_tangents(grid, self.geometry)?;
        let rule = GaussRule::three_point();

        let mut triplets = TripletBuilder::with_capacity(size, n * 4 * bs * bs);
        let mut rhs = vec![0.0; size];
        // local matrix over (node slot, unknown slot) = (2 * bs) x (2 * bs)
        let ls = 2 * bs;
        let mut local = vec![0.0; ls * ls];
        let mut f2 = vec![0.0; d * d];
        let mut c = vec![0.0; d];

        for e in 0..n {
            local.iter_mut().for_each(|v| *v = 0.0);
            let (na, nb) = grid.element_nodes(e);
            let nodes = [na, nb];
            let h = grid.h(e);
            let q = q_field.element(e);
            let w = dot(q, q);
            let (ca, cb) = (self.curvature.node(na), self.curvature.node(nb));
            let c_rho: Vec<f64> = (0..d).map(|k| (cb[k] - ca[k]) / h).collect();
            let dphi = [-1.0 / h, 1.0 / h];
            let mut mass = [[0.0; 2]; 2];
            let mut lin_rhs = [[0.0; 3]; 2];

            for (s, wq) in rule.iter() {
                let weight = wq * h;
                let phi = [1.0 - s, s];
                for k in 0..d {
                    c[k] = (1.0 - s) * ca[k] + s * cb[k];
                }
                f2_into(q, &c, &c_rho, &mut f2);
                for a in 0..2 {
                    for b in 0..2 {
                        let pp = weight * phi[a] * phi[b];
                        mass[a][b] += pp * w;
                        let pd = 2.0 * weight * phi[a] * dphi[b];
                        for k in 0..d {
                            let row_x = a * bs + k;
                            let row_y = a * bs + d + k;
                            for l in 0..d {
                                let col_x = b * bs + l;
                                let col_y = b * bs + d + l;
                                let coupling = pd * c[k] * q[l];
                                local[row_x * ls + col_y] -=
                                    coupling + pp * w * c[k] * c[l] + pp * f2[k * d + l];
                                if self.linearized {
                                    local[row_y * ls + col_x] += coupling;
                                }
                            }
                        }
                    }
                    if self.linearized {
                        for k in 0..d {
                            lin_rhs[a][k] += 2.0 * weight * phi[a] * w * c[k];
                        }
                    }
                }
            }

            for a in 0..2 {
                for b in 0..2 {
                    let stiff = dphi[a] * dphi[b] * h;
                    for k in 0..d {
                        let row_x = a * bs + k;
                        let row_y = a * bs + d + k;
                        let col_x = b * bs + k;
                        let col_y = b * bs + d + k;
                        local[row_x * ls + col_x] += mass[a][b] / self.tau;
                        local[row_x * ls + col_y] -= stiff;
                        local[row_y * ls + col_y] += mass[a][b];
                        local[row_y * ls + col_x] += self.theta * stiff;
                        let xb = self.x_old.node(nodes[b])[k];
                        rhs[nodes[a] * bs + k] += mass[a][b] / self.tau * xb;
                        rhs[nodes[a] * bs + d + k] -= (1.0 - self.theta) * stiff * xb;
                    }
                }
                if self.linearized {
                    for k in 0..d {
                        rhs[nodes[a] * bs + d + k] += lin_rhs[a][k];
                    }
                }
            }

            for a in 0..2 {
                for i in 0..bs {
                    let row = nodes[a] * bs + i;
                    for b in 0..2 {
                        for j in 0..bs {
                            let v = local[(a * bs + i) * ls + b * bs + j];
                            if v != 0.0 {
                                triplets.add(row, nodes[b] * bs + j, v);
                            }
                        }
                    }
                }
            }
        }

        if let Some(load) = &self.load {
            for j in 0..n {
                for k in 0..d {
                    rhs[j * bs + k] += load.node(j)[k];
                }
            }
        }

        let matrix = triplets.build();
        let sol = matrix
            .factor()
            .and_then(|lu| lu.solve(&rhs))
            .map_err(|err| match err {
                Error::SingularSystem(msg) => {
                    let min_len = (0..n)
                        .map(|e| dot(q_field.element(e), q_field.element(e)).sqrt())
                        .fold(f64::INFINITY, f64::min);
                    Error::SingularSystem(format!("{msg}; min |x_rho| = {min_len:e}"))
                }
                other => other,
            })?;
        let mut x = NodalField::zeros(n, d);
        let mut y = NodalField::zeros(n, d);
        for j in 0..n {
            x.node_mut(j).copy_from_slice(&sol[j * bs..j * bs + d]);
            y.node_mut(j)
                .copy_from_slice(&sol[j * bs + d..(j + 1) * bs]);
        }
        Ok((x, y))
    }
}

fn forcing_load(
    grid: &PeriodicGrid,
    forcing: Option<&dyn Forcing>,
    t: f64,
    dim: usize,
) -> Result<Option<NodalField>> {
    match forcing {
        None => Ok(None),
        Some(f) if f.dim() != dim => Err(Error::DimensionMismatch {
            expected: dim,
            found: f.dim(),
        }),
        Some(f) => lumped_load(grid, f, t).map(Some),
    }
}

fn check_state(grid: &PeriodicGrid, state: &CdState) -> Result<()> {
    state.x.check_on(grid)?;
    state.x.check_compatible(&state.y_full)?;
    state.x.check_compatible(&state.y_half_prev)
}

/// First-order step: metric and curvature data frozen at `(x^m, y^m)`,
/// forcing evaluated at `t_m`.
pub fn first_order_step(
    grid: &PeriodicGrid,
    state: &CdState,
    forcing: Option<&dyn Forcing>,
) -> Result<CdState> {
    check_state(grid, state)?;
    let d = state.x.dim();
    let stage = Stage {
        grid,
        x_old: &state.x,
        geometry: &state.x,
        curvature: &state.y_full,
        tau: state.dt,
        theta: 1.0,
        linearized: false,
        load: forcing_load(grid, forcing, state.t, d)?,
    };
    let (x, y) = stage.solve().map_err(|e| e.at_step(state.step))?;
    Ok(CdState {
        x,
        y_half_prev: y.clone(),
        y_full: y,
        t: state.next_time(),
        dt: state.dt,
        step: state.step + 1,
    })
}

/// Linear predictor over `dt / 2` using `y^{m-1/2}` as curvature data and a
/// linearised metric in the second equation. Returns `(x^{m+1/2}, z^{m+1/2})`.
pub fn predictor_step(
    grid: &PeriodicGrid,
    state: &CdState,
    forcing: Option<&dyn Forcing>,
) -> Result<(NodalField, NodalField)> {
    check_state(grid, state)?;
    let stage = Stage {
        grid,
        x_old: &state.x,
        geometry: &state.x,
        curvature: &state.y_half_prev,
        tau: 0.5 * state.dt,
        theta: 1.0,
        linearized: true,
        load: forcing_load(grid, forcing, state.t_half(), state.x.dim())?,
    };
    stage.solve().map_err(|e| e.at_step(state.step))
}

/// Corrector with metric `|x^{m+1/2}_rho|^2` and curvature data `z^{m+1/2}`.
/// Returns the advanced state and `y^{m+1/2}`.
pub fn corrector_step(
    grid: &PeriodicGrid,
    state: &CdState,
    x_half: &NodalField,
    z_half: &NodalField,
    forcing: Option<&dyn Forcing>,
) -> Result<(CdState, NodalField)> {
    check_state(grid, state)?;
    state.x.check_compatible(x_half)?;
    state.x.check_compatible(z_half)?;
    let stage = Stage {
        grid,
        x_old: &state.x,
        geometry: x_half,
        curvature: z_half,
        tau: state.dt,
        theta: 0.5,
        linearized: false,
        load: forcing_load(grid, forcing, state.t_half(), state.x.dim())?,
    };
    let (x, y_half) = stage.solve().map_err(|e| e.at_step(state.step))?;
    let y_full = reconstruct_y_full(&y_half, &state.y_full)?;
    Ok((
        CdState {
            x,
            y_half_prev: y_half.clone(),
            y_full,
            t: state.next_time(),
            dt: state.dt,
            step: state.step + 1,
        },
        y_half,
    ))
}

/// Intermediate fields of one predictor-corrector step.
#[derive(Debug, Clone)]
pub struct PcStages {
    pub x_half: NodalField,
    pub z_half: NodalField,
    pub y_half: NodalField,
}

pub fn pc_step_with_stages(
    grid: &PeriodicGrid,
    state: &CdState,
    forcing: Option<&dyn Forcing>,
) -> Result<(CdState, PcStages)> {
    let (x_half, z_half) = predictor_step(grid, state, forcing)?;
    let (next, y_half) = corrector_step(grid, state, &x_half, &z_half, forcing)?;
    Ok((
        next,
        PcStages {
            x_half,
            z_half,
            y_half,
        },
    ))
}

pub fn pc_step(
    grid: &PeriodicGrid,
    state: &CdState,
    forcing: Option<&dyn Forcing>,
) -> Result<CdState> {
    pc_step_with_stages(grid, state, forcing).map(|(s, _)| s)
}

/// Left side minus right side of the corrector's energy balance
/// `1/2 |x'|_1^2 + dt (|y_rho + (z.y) x^{1/2}_rho|^2, 1) = 1/2 |x|_1^2`.
pub fn energy_identity_residual(
    grid: &PeriodicGrid,
    x_old: &NodalField,
    stages: &PcStages,
    x_new: &NodalField,
    dt: f64,
) -> Result<f64> {
    let d = x_old.dim();
    let q = derivative(grid, &stages.x_half)?;
    let y_rho = derivative(grid, &stages.y_half)?;
    let rule = GaussRule::three_point();
    let mut dissipation = 0.0;
    for e in 0..grid.len() {
        let (a, b) = grid.element_nodes(e);
        let (za, zb) = (stages.z_half.node(a), stages.z_half.node(b));
        let (ya, yb) = (stages.y_half.node(a), stages.y_half.node(b));
        let (qe, ye) = (q.element(e), y_rho.element(e));
        let mut local = 0.0;
        for (s, wq) in rule.iter() {
            let zy: f64 = (0..d)
                .map(|k| ((1.0 - s) * za[k] + s * zb[k]) * ((1.0 - s) * ya[k] + s * yb[k]))
                .sum();
            local += wq * (0..d).map(|k| (ye[k] + zy * qe[k]).powi(2)).sum::<f64>();
        }
        dissipation += grid.h(e) * local;
    }
    Ok(0.5 * dirichlet_energy(grid, x_new)? + dt * dissipation
        - 0.5 * dirichlet_energy(grid, x_old)?)
}
