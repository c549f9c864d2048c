//! Periodic partitions of the parameter interval `I = R/Z`.
//!
//! Nodes are stored as `rho_1 < ... < rho_J = 1`, with `rho_0` identified with
//! `rho_J`. Element `j` (0-based) spans `[rho_{j-1}, rho_j]`, so its left node
//! is `j - 1 (mod J)` and its right node is `j`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicGrid {
    nodes: Vec<f64>,
    lengths: Vec<f64>,
    h_max: f64,
}

impl PeriodicGrid {
    /// Uniform partition with `h_j = 1/J`.
    pub fn uniform(num_elements: usize) -> Result<Self> {
        if num_elements < 3 {
            return Err(Error::InvalidGrid(format!(
                "need at least 3 elements, got {num_elements}"
            )));
        }
        let h = 1.0 / num_elements as f64;
        let nodes = (1..=num_elements)
            .map(|j| j as f64 / num_elements as f64)
            .collect();
        Ok(Self {
            nodes,
            lengths: vec![h; num_elements],
            h_max: h,
        })
    }

    /// Build a grid from element lengths `h_1, ..., h_J` which must be
    /// positive and sum to one.
    pub fn from_element_lengths(lengths: Vec<f64>) -> Result<Self> {
        if lengths.len() < 3 {
            return Err(Error::InvalidGrid(format!(
                "need at least 3 elements, got {}",
                lengths.len()
            )));
        }
        if let Some(bad) = lengths.iter().find(|h| !(h.is_finite() && **h > 0.0)) {
            return Err(Error::InvalidGrid(format!(
                "element lengths must be positive, found {bad}"
            )));
        }
        let total: f64 = lengths.iter().sum();
        if (total - 1.0).abs() > 1e-14 {
            return Err(Error::InvalidGrid(format!(
                "element lengths sum to {total}, not 1"
            )));
        }
        let mut nodes = Vec::with_capacity(lengths.len());
        let mut acc = 0.0;
        for h in &lengths {
            acc += h;
            nodes.push(acc);
        }
        *nodes.last_mut().unwrap() = 1.0;
        let h_max = lengths.iter().cloned().fold(0.0, f64::max);
        Ok(Self {
            nodes,
            lengths,
            h_max,
        })
    }

    /// Number of elements (equal to the number of nodes), `J`.
    #[inline]
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Node positions `rho_1, ..., rho_J`.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Element lengths `h_1, ..., h_J`.
    pub fn element_lengths(&self) -> &[f64] {
        &self.lengths
    }

    #[inline]
    pub fn h(&self, element: usize) -> f64 {
        self.lengths[element]
    }

    pub fn h_max(&self) -> f64 {
        self.h_max
    }

    /// Left and right node of an element.
    #[inline]
    pub fn element_nodes(&self, element: usize) -> (usize, usize) {
        let j = self.len();
        ((element + j - 1) % j, element)
    }

    /// Parameter interval `[rho_{j-1}, rho_j]` of an element, with `rho_0 = 0`.
    #[inline]
    pub fn element_interval(&self, element: usize) -> (f64, f64) {
        let left = if element == 0 {
            0.0
        } else {
            self.nodes[element - 1]
        };
        (left, self.nodes[element])
    }

    /// Half the length of the node patch, `(h_j + h_{j+1}) / 2`: the lumped
    /// mass of node `j`.
    #[inline]
    pub fn lumped_mass(&self, node: usize) -> f64 {
        let next = (node + 1) % self.len();
        0.5 * (self.lengths[node] + self.lengths[next])
    }

    /// Tests `|h_j - h_{j-1}| <= c h^2` and `h <= c h_j` for all `j`, cyclically.
    pub fn check_mesh_assumption(&self, c: f64) -> bool {
        let h = self.h_max;
        let j = self.len();
        (0..j).all(|e| {
            let prev = self.lengths[(e + j - 1) % j];
            let cur = self.lengths[e];
            (cur - prev).abs() <= c * h * h && h <= c * cur
        })
    }
}
