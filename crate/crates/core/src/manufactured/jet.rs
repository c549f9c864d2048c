//! Truncated Taylor arithmetic in one variable up to fourth order.
//!
//! A [`Jet4`] stores normalised Taylor coefficients `c_k = f^(k)(x0) / k!`,
//! `k = 0..=4`. All operations propagate the coefficients exactly (up to
//! rounding), so derivatives of compositions come out without finite
//! differences.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

pub const JET_LEN: usize = 5;

const FACTORIAL: [f64; JET_LEN] = [1.0, 1.0, 2.0, 6.0, 24.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet4 {
    pub coeffs: [f64; JET_LEN],
}

impl Jet4 {
    pub fn constant(v: f64) -> Self {
        let mut coeffs = [0.0; JET_LEN];
        coeffs[0] = v;
        Self { coeffs }
    }

    /// The independent variable at `x0`.
    pub fn variable(x0: f64) -> Self {
        let mut coeffs = [0.0; JET_LEN];
        coeffs[0] = x0;
        coeffs[1] = 1.0;
        Self { coeffs }
    }

    /// Build from derivative values `f, f', f'', ...`.
    pub fn from_derivatives(d: [f64; JET_LEN]) -> Self {
        let mut coeffs = d;
        for (c, f) in coeffs.iter_mut().zip(FACTORIAL) {
            *c /= f;
        }
        Self { coeffs }
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// `k`-th derivative at the expansion point.
    #[inline]
    pub fn derivative(&self, k: usize) -> f64 {
        self.coeffs[k] * FACTORIAL[k]
    }

    /// Jet of `f'`. The top coefficient is lost, so the result is only valid
    /// to one order less than `self`.
    pub fn differentiate(&self) -> Self {
        let mut coeffs = [0.0; JET_LEN];
        for k in 0..JET_LEN - 1 {
            coeffs[k] = (k + 1) as f64 * self.coeffs[k + 1];
        }
        Self { coeffs }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            coeffs: self.coeffs.map(|c| c * s),
        }
    }

    /// `self / other`; fails when `other` has zero value.
    pub fn try_div(&self, other: &Jet4) -> Result<Jet4> {
        let b0 = other.coeffs[0];
        if b0 == 0.0 {
            return Err(Error::ZeroDivision);
        }
        let mut q = [0.0; JET_LEN];
        for k in 0..JET_LEN {
            let mut s = self.coeffs[k];
            for j in 1..=k {
                s -= other.coeffs[j] * q[k - j];
            }
            q[k] = s / b0;
        }
        Ok(Jet4 { coeffs: q })
    }

    /// `(sin f, cos f)` computed together.
    pub fn sin_cos(&self) -> (Jet4, Jet4) {
        let mut s = [0.0; JET_LEN];
        let mut c = [0.0; JET_LEN];
        s[0] = self.coeffs[0].sin();
        c[0] = self.coeffs[0].cos();
        for k in 1..JET_LEN {
            let mut sk = 0.0;
            let mut ck = 0.0;
            for j in 1..=k {
                let a = j as f64 * self.coeffs[j];
                sk += a * c[k - j];
                ck -= a * s[k - j];
            }
            s[k] = sk / k as f64;
            c[k] = ck / k as f64;
        }
        (Jet4 { coeffs: s }, Jet4 { coeffs: c })
    }

    pub fn sin(&self) -> Jet4 {
        self.sin_cos().0
    }

    pub fn cos(&self) -> Jet4 {
        self.sin_cos().1
    }

    /// `f^p` for a jet with positive value.
    pub fn powf(&self, p: f64) -> Result<Jet4> {
        let a0 = self.coeffs[0];
        if a0 <= 0.0 {
            return Err(Error::Domain(format!(
                "real power of non-positive value {a0}"
            )));
        }
        // (f^p)' f = p f' f^p, coefficient form
        let mut r = [0.0; JET_LEN];
        r[0] = a0.powf(p);
        for k in 1..JET_LEN {
            let mut s = 0.0;
            for j in 1..=k {
                s += (p * j as f64 - (k - j) as f64) * self.coeffs[j] * r[k - j];
            }
            r[k] = s / (k as f64 * a0);
        }
        Ok(Jet4 { coeffs: r })
    }
}

impl Add for Jet4 {
    type Output = Jet4;
    fn add(self, rhs: Jet4) -> Jet4 {
        let mut coeffs = self.coeffs;
        for (c, r) in coeffs.iter_mut().zip(rhs.coeffs) {
            *c += r;
        }
        Jet4 { coeffs }
    }
}

impl Sub for Jet4 {
    type Output = Jet4;
    fn sub(self, rhs: Jet4) -> Jet4 {
        let mut coeffs = self.coeffs;
        for (c, r) in coeffs.iter_mut().zip(rhs.coeffs) {
            *c -= r;
        }
        Jet4 { coeffs }
    }
}

impl Neg for Jet4 {
    type Output = Jet4;
    fn neg(self) -> Jet4 {
        self.scale(-1.0)
    }
}

impl Mul for Jet4 {
    type Output = Jet4;
    fn mul(self, rhs: Jet4) -> Jet4 {
        let mut coeffs = [0.0; JET_LEN];
        for k in 0..JET_LEN {
            for j in 0..=k {
                coeffs[k] += self.coeffs[j] * rhs.coeffs[k - j];
            }
        }
        Jet4 { coeffs }
    }
}

impl Add<f64> for Jet4 {
    type Output = Jet4;
    fn add(mut self, rhs: f64) -> Jet4 {
        self.coeffs[0] += rhs;
        self
    }
}

impl Mul<f64> for Jet4 {
    type Output = Jet4;
    fn mul(self, rhs: f64) -> Jet4 {
        self.scale(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn sine_at_zero() {
        let s = Jet4::variable(0.0).sin();
        assert_eq!(s.derivative(1), 1.0);
        assert_eq!(s.value(), 0.0);
        assert!((s.derivative(3) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn reparameterisation_jet() {
        // g(rho) = 2 pi rho + 0.1 sin(2 pi rho) at rho = 0
        let two_pi = 2.0 * PI;
        let u = Jet4::variable(0.0) * two_pi;
        let g = u + u.sin() * 0.1;
        let expect = [0.0, two_pi * 1.1, 0.0, -0.1 * two_pi.powi(3), 0.0];
        for k in 0..JET_LEN {
            assert!(
                (g.derivative(k) - expect[k]).abs() < 1e-12,
                "order {k}: {} vs {}",
                g.derivative(k),
                expect[k]
            );
        }
    }

    #[test]
    fn division_by_zero_value() {
        let a = Jet4::variable(1.0);
        let z = Jet4::variable(0.0);
        assert_eq!(a.try_div(&z), Err(Error::ZeroDivision));
    }

    #[test]
    fn quotient_inverts_product() {
        let a = Jet4 {
            coeffs: [1.5, -0.3, 0.7, 0.2, -1.1],
        };
        let b = Jet4 {
            coeffs: [2.0, 0.4, -0.5, 0.9, 0.3],
        };
        let q = (a * b).try_div(&b).unwrap();
        for k in 0..JET_LEN {
            assert!((q.coeffs[k] - a.coeffs[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn power_matches_closed_form() {
        // (1 + x)^(1/2) around x = 0: 1, 1/2, -1/8, 1/16, -5/128
        let r = (Jet4::variable(0.0) + 1.0).powf(0.5).unwrap();
        let expect = [1.0, 0.5, -0.125, 0.0625, -5.0 / 128.0];
        for k in 0..JET_LEN {
            assert!((r.coeffs[k] - expect[k]).abs() < 1e-15);
        }
        assert!(Jet4::constant(-1.0).powf(0.5).is_err());
    }

    fn poly_mul(a: &[f64; 5], b: &[f64; 5]) -> [f64; 9] {
        let mut out = [0.0; 9];
        for i in 0..5 {
            for j in 0..5 {
                out[i + j] += a[i] * b[j];
            }
        }
        out
    }

    proptest! {
        #[test]
        fn product_is_truncated_polynomial_product(
            a in proptest::array::uniform5(-3.0f64..3.0),
            b in proptest::array::uniform5(-3.0f64..3.0),
        ) {
            let p = Jet4 { coeffs: a } * Jet4 { coeffs: b };
            let full = poly_mul(&a, &b);
            for k in 0..JET_LEN {
                prop_assert!((p.coeffs[k] - full[k]).abs() < 1e-12);
            }
        }

        #[test]
        fn sin_cos_identity(a in proptest::array::uniform5(-2.0f64..2.0)) {
            let (s, c) = Jet4 { coeffs: a }.sin_cos();
            let one = s * s + c * c;
            prop_assert!((one.coeffs[0] - 1.0).abs() < 1e-12);
            for k in 1..JET_LEN {
                prop_assert!(one.coeffs[k].abs() < 1e-10);
            }
        }
    }
}
