//! Cyclic tridiagonal systems: a tridiagonal matrix plus the two corner
//! entries `(0, n-1)` and `(n-1, 0)` from periodic wrap-around.
//!
//! Solved with a Thomas factorization and a Sherman-Morrison rank-one
//! correction. Systems with `n <= 8` use dense elimination with partial
//! pivoting instead.

use super::PIVOT_FLOOR;
use crate::error::{Error, Result};

/// Row `i` reads `sub[i] x[i-1] + diag[i] x[i] + sup[i] x[i+1]`, indices mod `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicTridiagonal {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
}

impl CyclicTridiagonal {
    pub fn new(sub: Vec<f64>, diag: Vec<f64>, sup: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        if sub.len() != n || sup.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: if sub.len() != n { sub.len() } else { sup.len() },
            });
        }
        if n < 3 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                found: n,
            });
        }
        Ok(Self { sub, diag, sup })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            sub: vec![0.0; n],
            diag: vec![0.0; n],
            sup: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                self.sub[i] * x[(i + n - 1) % n]
                    + self.diag[i] * x[i]
                    + self.sup[i] * x[(i + 1) % n]
            })
            .collect()
    }

    /// Infinity norm (max absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.len())
            .map(|i| self.sub[i].abs() + self.diag[i].abs() + self.sup[i].abs())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            a[i][(i + n - 1) % n] += self.sub[i];
            a[i][i] += self.diag[i];
            a[i][(i + 1) % n] += self.sup[i];
        }
        a
    }

    pub fn factor(&self) -> Result<CyclicFactorization> {
        if self.len() <= 8 {
            return DenseLu::factor(self.to_dense()).map(CyclicFactorization::Dense);
        }
        ShermanMorrison::factor(self).map(CyclicFactorization::Cyclic)
    }
}

/// A reusable factorization; solves may run concurrently.
#[derive(Debug, Clone)]
pub enum CyclicFactorization {
    Dense(DenseLu),
    Cyclic(ShermanMorrison),
}

impl CyclicFactorization {
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        match self {
            CyclicFactorization::Dense(lu) => lu.solve(rhs),
            CyclicFactorization::Cyclic(sm) => sm.solve(rhs),
        }
    }
}

/// Solve `m x = b` for each right-hand side, sharing one factorization.
pub fn solve_cyclic_tridiagonal(m: &CyclicTridiagonal, rhs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = m.len();
    if let Some(bad) = rhs.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: bad.len(),
        });
    }
    let f = m.factor()?;
    Ok(rhs.iter().map(|r| f.solve(r)).collect())
}

/// LU factors of a (non-cyclic) tridiagonal matrix from the Thomas algorithm.
#[derive(Debug, Clone)]
struct Thomas {
    sub: Vec<f64>,
    // reciprocal pivots
    inv_beta: Vec<f64>,
    gamma: Vec<f64>,
}

impl Thomas {
    fn factor(sub: &[f64], diag: &[f64], sup: &[f64]) -> Result<Self> {
        let n = diag.len();
        let mut inv_beta = vec![0.0; n];
        let mut gamma = vec![0.0; n];
        let mut beta = diag[0];
        for i in 0..n {
            if i > 0 {
                gamma[i] = sup[i - 1] * inv_beta[i - 1];
                beta = diag[i] - sub[i] * gamma[i];
            }
            if beta.abs() <= PIVOT_FLOOR || !beta.is_finite() {
                return Err(Error::SingularSystem(format!(
                    "zero pivot in tridiagonal factorization at row {i}"
                )));
            }
            inv_beta[i] = 1.0 / beta;
        }
        Ok(Self {
            sub: sub.to_vec(),
            inv_beta,
            gamma,
        })
    }

    fn solve_in_place(&self, x: &mut [f64]) {
        let n = x.len();
        x[0] *= self.inv_beta[0];
        for i in 1..n {
            x[i] = (x[i] - self.sub[i] * x[i - 1]) * self.inv_beta[i];
        }
        for i in (0..n - 1).rev() {
            x[i] -= self.gamma[i + 1] * x[i + 1];
        }
    }
}

#[derive(Debug, Clone)]
pub struct ShermanMorrison {
    thomas: Thomas,
    // T^{-1} u and the scalars of the rank-one update
    z: Vec<f64>,
    v_last: f64,
    denom: f64,
}

impl ShermanMorrison {
    fn factor(m: &CyclicTridiagonal) -> Result<Self> {
        let n = m.len();
        // A = T + u v^T with u = (gamma, 0, ..., 0, c), v = (1, 0, ..., 0, a / gamma)
        let corner_top = m.sub[0];
        let corner_bottom = m.sup[n - 1];
        let gamma = -m.diag[0];
        if gamma.abs() <= PIVOT_FLOOR {
            return Err(Error::SingularSystem("zero leading diagonal entry".into()));
        }
        let mut diag = m.diag.clone();
        diag[0] -= gamma;
        diag[n - 1] -= corner_top * corner_bottom / gamma;
        let mut sub = m.sub.clone();
        sub[0] = 0.0;
        let thomas = Thomas::factor(&sub, &diag, &m.sup)?;
        let mut z = vec![0.0; n];
        z[0] = gamma;
        z[n - 1] = corner_bottom;
        thomas.solve_in_place(&mut z);
        let v_last = corner_top / gamma;
        let denom = 1.0 + z[0] + v_last * z[n - 1];
        if denom.abs() <= PIVOT_FLOOR || !denom.is_finite() {
            return Err(Error::SingularSystem(
                "rank-one correction breaks down".into(),
            ));
        }
        Ok(Self {
            thomas,
            z,
            v_last,
            denom,
        })
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = rhs.len();
        let mut y = rhs.to_vec();
        self.thomas.solve_in_place(&mut y);
        let factor = (y[0] + self.v_last * y[n - 1]) / self.denom;
        for (yi, zi) in y.iter_mut().zip(&self.z) {
            *yi -= factor * zi;
        }
        y
    }
}

/// Dense LU with partial pivoting, for small systems.
#[derive(Debug, Clone)]
pub struct DenseLu {
    lu: Vec<Vec<f64>>,
    perm: Vec<usize>,
}

impl DenseLu {
    pub(crate) fn factor(mut a: Vec<Vec<f64>>) -> Result<Self> {
        let n = a.len();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
                .unwrap();
            if a[p][k].abs() <= PIVOT_FLOOR {
                return Err(Error::SingularSystem(format!(
                    "zero pivot in dense elimination at column {k}"
                )));
            }
            a.swap(k, p);
            perm.swap(k, p);
            for i in k + 1..n {
                let l = a[i][k] / a[k][k];
                a[i][k] = l;
                for j in k + 1..n {
                    a[i][j] -= l * a[k][j];
                }
            }
        }
        Ok(Self { lu: a, perm })
    }

    pub(crate) fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = rhs.len();
        let mut x: Vec<f64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..n {
            for j in 0..i {
                x[i] -= self.lu[i][j] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                x[i] -= self.lu[i][j] * x[j];
            }
            x[i] /= self.lu[i][i];
        }
        x
    }
}
