//! Property checks shared by the property tests and the acceptance runner.
//! Each check returns a short summary on success and a diagnosis on failure.

#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use curveflow::cd::{self, CdState};
use curveflow::csf::{self, CsfState};
use curveflow::fem::interpolate;
use curveflow::linalg::{
    solve_cyclic_tridiagonal, solve_sparse, CyclicTridiagonal, TripletBuilder,
};
use curveflow::manufactured::{InitialCurve, Jet4, ShrinkingCircle, TranslatingCircle};
use curveflow::{NodalField, PeriodicGrid};

pub type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

pub fn dense_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let m = DMatrix::from_fn(n, n, |i, j| a[i][j]);
    m.lu()
        .solve(&DVector::from_column_slice(b))
        .expect("oracle matrix is nonsingular")
        .as_slice()
        .to_vec()
}

fn max_rel_diff(u: &[f64], v: &[f64]) -> f64 {
    let scale = v.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    u.iter()
        .zip(v)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        / scale
}

/// `F_2(a, b, c) + F_2(a, b, c)^T` vanishes for random inputs in several dimensions.
pub fn f2_antisymmetry() -> Check {
    let mut rng = StdRng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let d = 2 + i % 3;
        let mut v = || {
            (0..d)
                .map(|_| rng.gen_range(-3.0..3.0))
                .collect::<Vec<f64>>()
        };
        let (a, b, c) = (v(), v(), v());
        let f = cd::eval_f2(&a, &b, &c);
        for k in 0..d {
            for l in 0..d {
                worst = worst.max((f[k * d + l] + f[l * d + k]).abs());
            }
        }
    }
    ensure(worst <= 1e-15, || format!("max |F2 + F2^T| = {worst:e}"))?;
    Ok(format!("max |F2 + F2^T| = {worst:e} over 1000 inputs"))
}

/// Cyclic tridiagonal solves agree with dense LU for sizes 3 to 16.
pub fn cyclic_vs_dense() -> Check {
    let mut rng = StdRng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for trial in 0..200 {
        let n = 3 + trial % 14;
        let mut r = || rng.gen_range(-1.0..1.0);
        let sub: Vec<f64> = (0..n).map(|_| r()).collect();
        let sup: Vec<f64> = (0..n).map(|_| r()).collect();
        // alternate between dominant and merely well conditioned diagonals
        let boost = if trial % 2 == 0 { 2.5 } else { 1.2 };
        let diag: Vec<f64> = (0..n)
            .map(|i| {
                let s = if (i + trial) % 3 == 0 { -1.0 } else { 1.0 };
                s * (boost + sub[i].abs().max(sup[i].abs()) + r().abs())
            })
            .collect();
        let m = CyclicTridiagonal::new(sub, diag, sup).map_err(|e| e.to_string())?;
        let rhs: Vec<Vec<f64>> = (0..2).map(|_| (0..n).map(|_| r()).collect()).collect();
        let sol = solve_cyclic_tridiagonal(&m, &rhs).map_err(|e| e.to_string())?;
        let dense = m.to_dense();
        for (b, x) in rhs.iter().zip(&sol) {
            worst = worst.max(max_rel_diff(x, &dense_solve(&dense, b)));
        }
    }
    ensure(worst <= 1e-12, || format!("cyclic vs dense: {worst:e}"))?;
    Ok(format!("cyclic vs dense max diff {worst:e}"))
}

/// Sparse LU agrees with dense LU on random sparse matrices of size 16 and
/// on a periodic 4x4 block pattern like the curve diffusion systems.
pub fn sparse_vs_dense() -> Check {
    let mut rng = StdRng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for trial in 0..100 {
        let n = 4 + trial % 13;
        let mut b = TripletBuilder::new(n);
        let mut dense = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                if i == j || rng.gen_bool(0.25) {
                    let v = rng.gen_range(-1.0..1.0) + if i == j { 4.0 } else { 0.0 };
                    b.add(i, j, v);
                    dense[i][j] += v;
                }
            }
        }
        let rhs: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x = solve_sparse(&b.build(), &rhs).map_err(|e| e.to_string())?;
        worst = worst.max(max_rel_diff(&x, &dense_solve(&dense, &rhs)));
    }
    // block cyclic: 4 nodes with 4 unknowns each, coupling to both neighbours
    for _ in 0..20 {
        let (nodes, bs) = (4, 4);
        let n = nodes * bs;
        let mut b = TripletBuilder::new(n);
        let mut dense = vec![vec![0.0; n]; n];
        for j in 0..nodes {
            for nb in [nodes - 1, 0, 1] {
                let k = (j + nb) % nodes;
                for p in 0..bs {
                    for q in 0..bs {
                        let (i, c) = (j * bs + p, k * bs + q);
                        let mut v = rng.gen_range(-1.0..1.0);
                        if i == c {
                            v += if p < 2 { 6.0 } else { -6.0 };
                        }
                        b.add(i, c, v);
                        dense[i][c] += v;
                    }
                }
            }
        }
        let rhs: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x = solve_sparse(&b.build(), &rhs).map_err(|e| e.to_string())?;
        worst = worst.max(max_rel_diff(&x, &dense_solve(&dense, &rhs)));
    }
    ensure(worst <= 1e-12, || format!("sparse vs dense: {worst:e}"))?;
    Ok(format!("sparse vs dense max diff {worst:e}"))
}

/// Fourth-order central difference of `f` at `x`.
fn fd1(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

/// Fourth-order central second difference of `f` at `x`.
fn fd2(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-f(x - 2.0 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) - f(x + 2.0 * h))
        / (12.0 * h * h)
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn vec_rel_err(a: &[f64; 2], b: &[f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1]) / b[0].hypot(b[1]).max(1.0)
}

/// Jet derivatives against finite differences: each derivative of order
/// `k` is the difference quotient of order `k - 1`, and first derivatives
/// and curvatures against closed forms.
pub fn jets_vs_finite_differences() -> Check {
    let mut rng = StdRng::seed_from_u64(4);
    let h = 1e-3;
    let mut worst = 0.0f64;
    let delta = 0.1;
    let csf = ShrinkingCircle::new(delta);
    let cdm = TranslatingCircle::new(delta);
    for _ in 0..100 {
        let rho: f64 = rng.gen_range(0.0..1.0);
        let t: f64 = rng.gen_range(0.0..0.4);
        // position jets of both families
        // deviations are measured against the size of the whole derivative
        // vector, since single components pass through zero
        for k in 1..=4 {
            let a = csf.eval(rho, t).unwrap().d_rho(k);
            let fd = [0, 1].map(|c| fd1(|r| csf.eval(r, t).unwrap().d_rho(k - 1)[c], rho, h));
            worst = worst.max(vec_rel_err(&fd, &a));
            let a = cdm.eval(rho, t).unwrap().d_rho(k);
            let fd = [0, 1].map(|c| fd1(|r| cdm.eval(r, t).unwrap().d_rho(k - 1)[c], rho, h));
            worst = worst.max(vec_rel_err(&fd, &a));
        }
        // velocities
        for c in 0..2 {
            let v = csf.eval(rho, t).unwrap().velocity[c];
            worst = worst.max(rel_err(
                fd1(|s| csf.eval(rho, s).unwrap().position()[c], t, h),
                v,
            ));
            let v = cdm.eval(rho, t).unwrap().velocity[c];
            worst = worst.max(rel_err(
                fd1(|s| cdm.eval(rho, s).unwrap().position()[c], t, h),
                v,
            ));
        }
        // curvature jets against the closed form x_rhorho / |x_rho|^2
        let closed = |r: f64, c: usize| {
            let g = 2.0 * PI * r + delta * (2.0 * PI * r).sin();
            let g1 = 2.0 * PI * (1.0 + delta * (2.0 * PI * r).cos());
            let g2 = -4.0 * PI * PI * delta * (2.0 * PI * r).sin();
            let rad = 1.0 + t * t * t;
            let (s, co) = g.sin_cos();
            let v = [g2 * -s - g1 * g1 * co, g2 * co - g1 * g1 * s];
            v[c] / (rad * g1 * g1)
        };
        let y = cdm.curvature(rho, t).unwrap();
        for c in 0..2 {
            worst = worst.max(rel_err(y.value()[c], closed(rho, c)));
            worst = worst.max(rel_err(fd1(|r| closed(r, c), rho, h), y.d_rho(1)[c]));
            worst = worst.max(rel_err(fd2(|r| closed(r, c), rho, h), y.d_rho(2)[c]));
        }
        // generic arithmetic: f(x) = sin(x) x^1.5 / (1 + x^2)
        let x0: f64 = rng.gen_range(0.2..2.0);
        let jet_at = |x: f64| {
            let v = Jet4::variable(x);
            let num = v.sin() * v.powf(1.5).unwrap();
            num.try_div(&(v * v + 1.0)).unwrap()
        };
        let plain = |x: f64| x.sin() * x.powf(1.5) / (1.0 + x * x);
        worst = worst.max(rel_err(jet_at(x0).value(), plain(x0)));
        worst = worst.max(rel_err(fd1(plain, x0, h), jet_at(x0).derivative(1)));
        for k in 2..=4 {
            let fd = fd1(|x| jet_at(x).derivative(k - 1), x0, h);
            worst = worst.max(rel_err(fd, jet_at(x0).derivative(k)));
        }
    }
    ensure(worst <= 1e-7, || {
        format!("jet vs finite difference: {worst:e}")
    })?;
    Ok(format!(
        "max relative deviation {worst:e} over 100 points per family"
    ))
}

/// Largest deviation of the nodal radii from `sqrt(1 - 2T)` after an
/// unforced predictor-corrector run with `dt = h`.
fn circle_radius_error(j: usize, t_end: f64) -> f64 {
    let g = PeriodicGrid::uniform(j).unwrap();
    let x = interpolate(&g, 2, |r, o| {
        InitialCurve::Circle { radius: 1.0 }.eval(r, o)
    });
    let dt = 1.0 / j as f64;
    let mut s = CsfState::new(x, dt).unwrap();
    let steps = (t_end / dt).round() as usize;
    for _ in 0..steps {
        s = csf::pc_step(&g, &s, None).unwrap();
    }
    let exact = (1.0 - 2.0 * t_end).sqrt();
    (0..j)
        .map(|i| {
            let p = s.x.node(i);
            (p[0].hypot(p[1]) - exact).abs()
        })
        .fold(0.0, f64::max)
}

pub fn circle_radius_eoc() -> Check {
    let js = [32, 64, 128, 256];
    let errs: Vec<f64> = js.iter().map(|&j| circle_radius_error(j, 0.25)).collect();
    let eocs: Vec<f64> = errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    ensure(eocs.iter().all(|e| *e >= 1.9), || {
        format!("radius errors {errs:?}, EOCs {eocs:.3?}")
    })?;
    Ok(format!("radius EOCs {eocs:.3?}"))
}

fn rotation_2d(angle: f64) -> [[f64; 3]; 3] {
    let (s, c) = angle.sin_cos();
    [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
}

/// Rotation about the axis `(1, 2, 2) / 3`.
fn rotation_3d(angle: f64) -> [[f64; 3]; 3] {
    let n = [1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0];
    let (s, c) = angle.sin_cos();
    let mut q = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let cross = match (i, j) {
                (0, 1) => -n[2],
                (0, 2) => n[1],
                (1, 0) => n[2],
                (1, 2) => -n[0],
                (2, 0) => -n[1],
                (2, 1) => n[0],
                _ => 0.0,
            };
            let id = if i == j { 1.0 } else { 0.0 };
            q[i][j] = c * id + s * cross + (1.0 - c) * n[i] * n[j];
        }
    }
    q
}

fn rigid(x: &NodalField, q: &[[f64; 3]; 3], b: &[f64]) -> NodalField {
    let d = x.dim();
    let mut out = x.clone();
    for j in 0..x.num_nodes() {
        let p = x.node(j).to_vec();
        let o = out.node_mut(j);
        for k in 0..d {
            o[k] = b[k] + (0..d).map(|l| q[k][l] * p[l]).sum::<f64>();
        }
    }
    out
}

fn relative_mismatch(a: &NodalField, b: &NodalField) -> f64 {
    let scale = b.values().iter().fold(1.0f64, |m, v| m.max(v.abs()));
    a.max_abs_diff(b) / scale
}

/// Evolving a rotated and translated curve equals rotating and translating
/// the evolved curve, for all four schemes over 10 steps.
pub fn rigid_motion_equivariance() -> Check {
    let mut worst = 0.0f64;
    let g = PeriodicGrid::uniform(64).unwrap();
    let q2 = rotation_2d(0.7);
    let b2 = [0.3, -1.1];
    let x = interpolate(&g, 2, |r, o| InitialCurve::Nonconvex.eval(r, o));
    for pc in [false, true] {
        let step = |s: &CsfState| {
            if pc {
                csf::pc_step(&g, s, None)
            } else {
                csf::first_order_step(&g, s, None)
            }
            .unwrap()
        };
        let mut a = CsfState::new(x.clone(), 1e-3).unwrap();
        let mut b = CsfState::new(rigid(&x, &q2, &b2), 1e-3).unwrap();
        for _ in 0..10 {
            a = step(&a);
            b = step(&b);
            worst = worst.max(relative_mismatch(&b.x, &rigid(&a.x, &q2, &b2)));
        }
    }
    let q3 = rotation_3d(1.1);
    let b3 = [0.5, -0.2, 2.0];
    let x = interpolate(&g, 3, |r, o| InitialCurve::InterlockedRings.eval(r, o));
    for pc in [false, true] {
        let step = |s: &CdState| {
            if pc {
                cd::pc_step(&g, s, None)
            } else {
                cd::first_order_step(&g, s, None)
            }
            .unwrap()
        };
        let mut a = CdState::new(&g, x.clone(), 1e-3).unwrap();
        let mut b = CdState::new(&g, rigid(&x, &q3, &b3), 1e-3).unwrap();
        for _ in 0..10 {
            a = step(&a);
            b = step(&b);
            worst = worst.max(relative_mismatch(&b.x, &rigid(&a.x, &q3, &b3)));
            // the evolved curvature rotates but does not translate; the
            // reconstructed full-step curvature is output only and is not compared
            worst = worst.max(relative_mismatch(
                &b.y_half_prev,
                &rigid(&a.y_half_prev, &q3, &[0.0; 3]),
            ));
        }
    }
    ensure(worst <= 1e-12, || {
        format!("equivariance mismatch {worst:e}")
    })?;
    Ok(format!("max relative mismatch {worst:e} over 10 steps"))
}

/// At `delta = 0` the circles solve the unforced flows exactly: the CSF
/// forcing vanishes for all `t`, the CD forcing at `t = 0`.
pub fn zero_forcing_at_zero_delta() -> Check {
    let csf = ShrinkingCircle::new(0.0);
    let cdm = TranslatingCircle::new(0.0);
    let mut worst = 0.0f64;
    for i in 0..200 {
        let rho = i as f64 / 200.0;
        for t in [0.0, 0.1, 0.25, 0.4] {
            let f = csf.forcing(rho, t).unwrap();
            worst = worst.max(f[0].abs()).max(f[1].abs());
        }
        let f = cdm.forcing(rho, 0.0).unwrap();
        worst = worst.max(f[0].abs()).max(f[1].abs());
    }
    ensure(worst <= 1e-12, || format!("max |f| = {worst:e}"))?;
    Ok(format!("max |f| = {worst:e}"))
}
