//! Compressed-row sparse matrices and a direct solver.
//!
//! The solver permutes the matrix symmetrically with reverse Cuthill-McKee
//! and then runs a banded LU factorization with partial pivoting. For the
//! node-major cyclic block-tridiagonal matrices of the curve diffusion
//! schemes this gives a band of a few blocks and linear cost in `J`.

use std::collections::VecDeque;

use super::PIVOT_FLOOR;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    row_offsets: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseMatrix {
    /// Build from raw CSR arrays; column indices must be strictly increasing per row.
    pub fn from_csr(
        n: usize,
        row_offsets: Vec<usize>,
        cols: Vec<usize>,
        vals: Vec<f64>,
    ) -> Result<Self> {
        if row_offsets.len() != n + 1 || cols.len() != vals.len() {
            return Err(Error::DimensionMismatch {
                expected: n + 1,
                found: row_offsets.len(),
            });
        }
        if row_offsets[n] != cols.len() {
            return Err(Error::DimensionMismatch {
                expected: cols.len(),
                found: row_offsets[n],
            });
        }
        for i in 0..n {
            let row = &cols[row_offsets[i]..row_offsets[i + 1]];
            if row.windows(2).any(|w| w[0] >= w[1]) || row.iter().any(|&c| c >= n) {
                return Err(Error::Config(format!(
                    "row {i} has unsorted or out-of-range column indices"
                )));
            }
        }
        Ok(Self {
            n,
            row_offsets,
            cols,
            vals,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            row_offsets: (0..=n).collect(),
            cols: (0..n).collect(),
            vals: vec![1.0; n],
        }
    }

    pub fn from_dense(a: &[Vec<f64>]) -> Self {
        let n = a.len();
        let mut b = TripletBuilder::new(n);
        for (i, row) in a.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if *v != 0.0 {
                    b.add(i, j, *v);
                }
            }
        }
        b.build()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// `(column, value)` pairs of a row.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_offsets[i]..self.row_offsets[i + 1];
        self.cols[r.clone()]
            .iter()
            .copied()
            .zip(self.vals[r].iter().copied())
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).map(|(j, v)| v * x[j]).sum())
            .collect()
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut a = vec![vec![0.0; self.n]; self.n];
        for (i, row) in a.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] = v;
            }
        }
        a
    }

    pub fn factor(&self) -> Result<SparseLu> {
        SparseLu::factor(self)
    }
}

/// Accumulates `(row, col, value)` triplets; duplicates are summed.
#[derive(Debug, Clone)]
pub struct TripletBuilder {
    n: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletBuilder {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            entries: Vec::new(),
        }
    }

    pub fn with_capacity(n: usize, cap: usize) -> Self {
        Self {
            n,
            entries: Vec::with_capacity(cap),
        }
    }

    #[inline]
    pub fn add(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.n && col < self.n);
        self.entries.push((row, col, value));
    }

    pub fn build(mut self) -> SparseMatrix {
        self.entries
            .sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_offsets = vec![0; self.n + 1];
        let mut cols = Vec::with_capacity(self.entries.len());
        let mut vals: Vec<f64> = Vec::with_capacity(self.entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in self.entries {
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_offsets[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..self.n {
            row_offsets[i + 1] += row_offsets[i];
        }
        SparseMatrix {
            n: self.n,
            row_offsets,
            cols,
            vals,
        }
    }
}

/// Reverse Cuthill-McKee ordering of the symmetrized sparsity pattern.
/// Returns `order` with `order[new] = old`.
fn reverse_cuthill_mckee(m: &SparseMatrix) -> Vec<usize> {
    let n = m.n;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for (j, _) in m.row(i) {
            if i != j {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    for a in adj.iter_mut() {
        a.sort_unstable();
        a.dedup();
    }
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::new();
    while order.len() < n {
        // start each component at an unvisited node of minimum degree
        let start = (0..n)
            .filter(|&i| !visited[i])
            .min_by_key(|&i| (degree[i], i))
            .unwrap();
        visited[start] = true;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = adj[v].iter().copied().filter(|&w| !visited[w]).collect();
            next.sort_unstable_by_key(|&w| (degree[w], w));
            for w in next {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

/// Banded LU factors of a symmetrically permuted sparse matrix.
#[derive(Debug, Clone)]
pub struct SparseLu {
    n: usize,
    // order[new] = old
    order: Vec<usize>,
    lower: usize,
    width: usize,
    // row i stores columns i - lower ..= i + lower + upper
    band: Vec<f64>,
    pivots: Vec<usize>,
}

impl SparseLu {
    pub fn factor(m: &SparseMatrix) -> Result<Self> {
        let n = m.n;
        if n == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        let order = reverse_cuthill_mckee(m);
        let mut position = vec![0; n];
        for (new, &old) in order.iter().enumerate() {
            position[old] = new;
        }
        let (mut lower, mut upper) = (0usize, 0usize);
        for i in 0..n {
            let pi = position[i];
            for (j, _) in m.row(i) {
                let pj = position[j];
                if pi > pj {
                    lower = lower.max(pi - pj);
                } else {
                    upper = upper.max(pj - pi);
                }
            }
        }
        let width = 2 * lower + upper + 1;
        let mut band = vec![0.0; n * width];
        let scale = (0..n)
            .flat_map(|i| m.row(i).map(|(_, v)| v.abs()))
            .fold(0.0, f64::max);
        for i in 0..n {
            let pi = position[i];
            for (j, v) in m.row(i) {
                let pj = position[j];
                band[pi * width + pj + lower - pi] += v;
            }
        }

        let threshold = (scale * 1e-14).max(PIVOT_FLOOR);
        let idx = |i: usize, j: usize| i * width + j + lower - i;
        let mut pivots = vec![0; n];
        for k in 0..n {
            let last_row = (k + lower).min(n - 1);
            let last_col = (k + lower + upper).min(n - 1);
            let mut p = k;
            let mut best = band[idx(k, k)].abs();
            for i in k + 1..=last_row {
                let v = band[idx(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if !(best > threshold) {
                return Err(Error::SingularSystem(format!(
                    "pivot {best:e} below threshold {threshold:e} at column {k} of {n}"
                )));
            }
            pivots[k] = p;
            if p != k {
                for j in k..=last_col {
                    band.swap(idx(k, j), idx(p, j));
                }
            }
            let inv = 1.0 / band[idx(k, k)];
            for i in k + 1..=last_row {
                let l = band[idx(i, k)] * inv;
                band[idx(i, k)] = l;
                if l != 0.0 {
                    for j in k + 1..=last_col {
                        band[idx(i, j)] -= l * band[idx(k, j)];
                    }
                }
            }
        }
        Ok(Self {
            n,
            order,
            lower,
            width,
            band,
            pivots,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Half-bandwidths `(lower, upper)` after reordering; `upper` includes pivoting fill.
    pub fn bandwidth(&self) -> (usize, usize) {
        (self.lower, self.width - 1 - self.lower)
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        if rhs.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: rhs.len(),
            });
        }
        let lower = self.lower;
        let width = self.width;
        let idx = |i: usize, j: usize| i * width + j + lower - i;
        let mut x: Vec<f64> = self.order.iter().map(|&old| rhs[old]).collect();
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                x.swap(k, p);
            }
            let xk = x[k];
            for i in k + 1..=(k + lower).min(n - 1) {
                x[i] -= self.band[idx(i, k)] * xk;
            }
        }
        let reach = width - 1 - lower;
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..=(i + reach).min(n - 1) {
                s -= self.band[idx(i, j)] * x[j];
            }
            x[i] = s / self.band[idx(i, i)];
        }
        let mut out = vec![0.0; n];
        for (new, &old) in self.order.iter().enumerate() {
            out[old] = x[new];
        }
        Ok(out)
    }
}

/// Direct solve of `m x = rhs`.
pub fn solve_sparse(m: &SparseMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    if rhs.len() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: rhs.len(),
        });
    }
    m.factor()?.solve(rhs)
}
