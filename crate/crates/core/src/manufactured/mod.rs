//! Prescribed exact solutions with their forcing terms, and the initial
//! curves of the qualitative experiments.

mod jet;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

pub use jet::{Jet4, JET_LEN};

use crate::cd::{eval_f2, f1_coefficient};
use crate::error::{Error, Result};

/// Amplitude of the tangential reparameterisation used by default.
pub const DEFAULT_DELTA: f64 = 0.1;

/// A right-hand side `f(rho, t)` added through the lumped product `(f, eta)^h`.
pub trait Forcing: Sync {
    fn dim(&self) -> usize;
    fn eval(&self, rho: f64, t: f64, out: &mut [f64]) -> Result<()>;
}

/// Adapter turning a closure into a [`Forcing`].
pub struct FnForcing<F> {
    dim: usize,
    f: F,
}

impl<F> FnForcing<F>
where
    F: Fn(f64, f64, &mut [f64]) + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F> Forcing for FnForcing<F>
where
    F: Fn(f64, f64, &mut [f64]) + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, rho: f64, t: f64, out: &mut [f64]) -> Result<()> {
        (self.f)(rho, t, out);
        Ok(())
    }
}

/// Jet of `g(rho) = 2 pi rho + delta sin(2 pi rho)`.
fn reparameterisation(rho: f64, delta: f64) -> Jet4 {
    let u = Jet4::variable(rho) * (2.0 * PI);
    u + u.sin() * delta
}

/// Component jets of `(cos g, sin g)`.
fn unit_circle_jets(rho: f64, delta: f64) -> [Jet4; 2] {
    let (s, c) = reparameterisation(rho, delta).sin_cos();
    [c, s]
}

fn dot2(a: &[f64; 2], b: &[f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn jet_dot(a: &[Jet4; 2], b: &[Jet4; 2]) -> Jet4 {
    a[0] * b[0] + a[1] * b[1]
}

/// Point data of an exact solution at `(rho, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactPoint {
    /// `rho`-jets of the two position components.
    pub jets: [Jet4; 2],
    /// `x_t` at `(rho, t)`.
    pub velocity: [f64; 2],
}

impl ExactPoint {
    pub fn position(&self) -> [f64; 2] {
        [self.jets[0].value(), self.jets[1].value()]
    }

    /// `k`-th `rho`-derivative of the position.
    pub fn d_rho(&self, k: usize) -> [f64; 2] {
        [self.jets[0].derivative(k), self.jets[1].derivative(k)]
    }
}

/// Shrinking circles `x = (1 - 2t)^(1/2) (cos g, sin g)`, an exact solution
/// of the curve shortening system for `delta = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShrinkingCircle {
    pub delta: f64,
}

impl ShrinkingCircle {
    pub fn new(delta: f64) -> Self {
        Self { delta }
    }

    pub fn radius(t: f64) -> Result<f64> {
        if !(t < 0.5) {
            return Err(Error::Domain(format!(
                "shrinking circle is extinct at t = {t} >= 1/2"
            )));
        }
        Ok((1.0 - 2.0 * t).sqrt())
    }

    pub fn eval(&self, rho: f64, t: f64) -> Result<ExactPoint> {
        let r = Self::radius(t)?;
        let [c, s] = unit_circle_jets(rho, self.delta);
        let dr = -1.0 / r;
        Ok(ExactPoint {
            jets: [c * r, s * r],
            velocity: [dr * c.value(), dr * s.value()],
        })
    }

    /// `f = |x_rho|^2 x_t - x_rhorho`.
    pub fn forcing(&self, rho: f64, t: f64) -> Result<[f64; 2]> {
        let p = self.eval(rho, t)?;
        let xr = p.d_rho(1);
        let xrr = p.d_rho(2);
        let w = dot2(&xr, &xr);
        Ok([w * p.velocity[0] - xrr[0], w * p.velocity[1] - xrr[1]])
    }
}

impl Forcing for ShrinkingCircle {
    fn dim(&self) -> usize {
        2
    }

    fn eval(&self, rho: f64, t: f64, out: &mut [f64]) -> Result<()> {
        out.copy_from_slice(&self.forcing(rho, t)?);
        Ok(())
    }
}

/// Translated and dilated circles `x = (t^2, t^2) + (1 + t^3)(cos g, sin g)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TranslatingCircle {
    pub delta: f64,
}

/// `rho`-jets of `y = x_rhorho / |x_rho|^2`; valid to second order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureJets(pub [Jet4; 2]);

impl CurvatureJets {
    pub fn value(&self) -> [f64; 2] {
        [self.0[0].value(), self.0[1].value()]
    }

    pub fn d_rho(&self, k: usize) -> [f64; 2] {
        debug_assert!(k <= 2);
        [self.0[0].derivative(k), self.0[1].derivative(k)]
    }
}

impl TranslatingCircle {
    pub fn new(delta: f64) -> Self {
        Self { delta }
    }

    pub fn eval(&self, rho: f64, t: f64) -> Result<ExactPoint> {
        let [c, s] = unit_circle_jets(rho, self.delta);
        let r = 1.0 + t * t * t;
        let shift = t * t;
        let dr = 3.0 * t * t;
        let dshift = 2.0 * t;
        Ok(ExactPoint {
            jets: [c * r + shift, s * r + shift],
            velocity: [dshift + dr * c.value(), dshift + dr * s.value()],
        })
    }

    pub fn curvature(&self, rho: f64, t: f64) -> Result<CurvatureJets> {
        let p = self.eval(rho, t)?;
        let xr = [p.jets[0].differentiate(), p.jets[1].differentiate()];
        let xrr = [xr[0].differentiate(), xr[1].differentiate()];
        let w = jet_dot(&xr, &xr);
        Ok(CurvatureJets([xrr[0].try_div(&w)?, xrr[1].try_div(&w)?]))
    }

    /// `f = |x_rho|^2 x_t + y_rhorho - F_cd(x_rho, y, y_rho) y`.
    pub fn forcing(&self, rho: f64, t: f64) -> Result<[f64; 2]> {
        let p = self.eval(rho, t)?;
        let y = self.curvature(rho, t)?;
        let xr = p.d_rho(1);
        let yv = y.value();
        let yr = y.d_rho(1);
        let yrr = y.d_rho(2);
        let w = dot2(&xr, &xr);
        let f1 = f1_coefficient(&xr, &yv, &yr);
        let f2 = eval_f2(&xr, &yv, &yr);
        let mut out = [0.0; 2];
        for k in 0..2 {
            let fy: f64 = (0..2).map(|l| f2[k * 2 + l] * yv[l]).sum();
            out[k] = w * p.velocity[k] + yrr[k] - f1 * yv[k] - fy;
        }
        Ok(out)
    }
}

impl Forcing for TranslatingCircle {
    fn dim(&self) -> usize {
        2
    }

    fn eval(&self, rho: f64, t: f64, out: &mut [f64]) -> Result<()> {
        out.copy_from_slice(&self.forcing(rho, t)?);
        Ok(())
    }
}

/// Closed-form initial curves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialCurve {
    Circle {
        radius: f64,
    },
    /// Planar curve that is initially nonconvex.
    Nonconvex,
    /// Two interlocked rings in `R^3`.
    InterlockedRings,
}

impl InitialCurve {
    pub fn dim(&self) -> usize {
        match self {
            InitialCurve::InterlockedRings => 3,
            _ => 2,
        }
    }

    pub fn eval(&self, rho: f64, out: &mut [f64]) {
        let u = 2.0 * PI * rho;
        match *self {
            InitialCurve::Circle { radius } => {
                out[0] = radius * u.cos();
                out[1] = radius * u.sin();
            }
            InitialCurve::Nonconvex => {
                let s3 = (3.0 * u).sin();
                out[0] = u.cos();
                out[1] = 0.5 * u.sin() + u.cos().sin() + u.sin() * (0.2 + u.sin() * s3 * s3);
            }
            InitialCurve::InterlockedRings => {
                let c = |k: f64| (k * PI * rho).cos();
                let s = |k: f64| (k * PI * rho).sin();
                out[0] = (10.0 * (c(2.0) + c(6.0)) + c(4.0) + c(8.0)) / 8.0;
                out[1] = (6.0 * s(2.0) + 10.0 * s(6.0)) / 8.0;
                out[2] = (4.0 * s(6.0) * s(5.0) + 4.0 * s(8.0) - 2.0 * s(12.0)) / 8.0;
            }
        }
    }
}

impl FromStr for InitialCurve {
    type Err = Error;

    /// Accepts `circle`, `circle(R)`, `nonconvex` and `interlocked_rings`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "circle" => return Ok(InitialCurve::Circle { radius: 1.0 }),
            "nonconvex" => return Ok(InitialCurve::Nonconvex),
            "interlocked_rings" => return Ok(InitialCurve::InterlockedRings),
            _ => {}
        }
        if let Some(arg) = s.strip_prefix("circle(").and_then(|r| r.strip_suffix(')')) {
            let radius: f64 = arg
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad circle radius '{arg}'")))?;
            if radius > 0.0 && radius.is_finite() {
                return Ok(InitialCurve::Circle { radius });
            }
        }
        Err(Error::Config(format!("unknown curve '{s}'")))
    }
}

impl fmt::Display for InitialCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialCurve::Circle { radius } if *radius == 1.0 => write!(f, "circle"),
            InitialCurve::Circle { radius } => write!(f, "circle({radius})"),
            InitialCurve::Nonconvex => write!(f, "nonconvex"),
            InitialCurve::InterlockedRings => write!(f, "interlocked_rings"),
        }
    }
}
