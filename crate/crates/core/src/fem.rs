//! Continuous piecewise-linear periodic finite elements.

use crate::error::{Error, Result};
use crate::grid::PeriodicGrid;
use crate::manufactured::Forcing;

/// One `R^d` value per grid node, stored node-major.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalField {
    dim: usize,
    values: Vec<f64>,
}

impl NodalField {
    pub fn zeros(num_nodes: usize, dim: usize) -> Self {
        Self {
            dim,
            values: vec![0.0; num_nodes * dim],
        }
    }

    /// Wrap node-major values `[u_1, ..., u_J]`, each of length `dim`.
    pub fn from_values(dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim == 0 || values.len() % dim != 0 {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("nodal values must be finite".into()));
        }
        Ok(Self { dim, values })
    }

    pub fn from_nodes(points: &[Vec<f64>]) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        let mut values = Vec::with_capacity(points.len() * dim);
        for p in points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            values.extend_from_slice(p);
        }
        Self::from_values(dim, values)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn num_nodes(&self) -> usize {
        self.values.len() / self.dim
    }

    #[inline]
    pub fn node(&self, j: usize) -> &[f64] {
        &self.values[j * self.dim..(j + 1) * self.dim]
    }

    #[inline]
    pub fn node_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.values[j * self.dim..(j + 1) * self.dim]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Component `k` of every node, as a length-`J` vector.
    pub fn component(&self, k: usize) -> Vec<f64> {
        self.values
            .iter()
            .skip(k)
            .step_by(self.dim)
            .copied()
            .collect()
    }

    pub fn set_component(&mut self, k: usize, comp: &[f64]) {
        for (j, v) in comp.iter().enumerate() {
            self.values[j * self.dim + k] = *v;
        }
    }

    /// `a * self + b * other`, pointwise.
    pub fn axpby(&self, a: f64, other: &NodalField, b: f64) -> NodalField {
        debug_assert_eq!(self.values.len(), other.values.len());
        NodalField {
            dim: self.dim,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(u, v)| a * u + b * v)
                .collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &NodalField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(u, v)| (u - v).abs())
            .fold(0.0, f64::max)
    }

    pub(crate) fn check_on(&self, grid: &PeriodicGrid) -> Result<()> {
        if self.num_nodes() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: self.num_nodes(),
            });
        }
        Ok(())
    }

    pub(crate) fn check_compatible(&self, other: &NodalField) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        if self.values.len() != other.values.len() {
            return Err(Error::DimensionMismatch {
                expected: self.num_nodes(),
                found: other.num_nodes(),
            });
        }
        Ok(())
    }
}

/// One value (scalar or `R^d`) per element.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementField {
    dim: usize,
    values: Vec<f64>,
}

impl ElementField {
    pub fn from_values(dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim == 0 || values.len() % dim != 0 {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: values.len(),
            });
        }
        Ok(Self { dim, values })
    }

    pub fn constant(num_elements: usize, value: f64) -> Self {
        Self {
            dim: 1,
            values: vec![value; num_elements],
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn num_elements(&self) -> usize {
        self.values.len() / self.dim
    }

    #[inline]
    pub fn element(&self, j: usize) -> &[f64] {
        &self.values[j * self.dim..(j + 1) * self.dim]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Squared Euclidean norm on each element, as a scalar field.
    pub fn norm_squared(&self) -> ElementField {
        ElementField {
            dim: 1,
            values: self
                .values
                .chunks(self.dim)
                .map(|v| v.iter().map(|c| c * c).sum())
                .collect(),
        }
    }
}

/// Element-wise derivative `(u_j - u_{j-1}) / h_j`.
pub fn derivative(grid: &PeriodicGrid, u: &NodalField) -> Result<ElementField> {
    u.check_on(grid)?;
    let d = u.dim();
    let mut values = Vec::with_capacity(u.values.len());
    for e in 0..grid.len() {
        let (a, b) = grid.element_nodes(e);
        let inv_h = 1.0 / grid.h(e);
        for k in 0..d {
            values.push((u.node(b)[k] - u.node(a)[k]) * inv_h);
        }
    }
    Ok(ElementField { dim: d, values })
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Mass-lumped inner product `(u, v w)^h` of nodal fields with an optional
/// piecewise-constant scalar weight `w`. On element `j` the weight is applied
/// at both endpoints.
pub fn lumped_inner(
    grid: &PeriodicGrid,
    u: &NodalField,
    v: &NodalField,
    weight: Option<&ElementField>,
) -> Result<f64> {
    u.check_on(grid)?;
    u.check_compatible(v)?;
    if let Some(w) = weight {
        if w.dim() != 1 || w.num_elements() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: w.num_elements(),
            });
        }
    }
    let mut sum = 0.0;
    for e in 0..grid.len() {
        let (a, b) = grid.element_nodes(e);
        let w = weight.map_or(1.0, |w| w.values[e]);
        sum += 0.5 * grid.h(e) * w * (dot(u.node(b), v.node(b)) + dot(u.node(a), v.node(a)));
    }
    Ok(sum)
}

/// `(u_rho, v_rho)`, exact for piecewise linears.
pub fn stiffness_inner(grid: &PeriodicGrid, u: &NodalField, v: &NodalField) -> Result<f64> {
    u.check_on(grid)?;
    u.check_compatible(v)?;
    let d = u.dim();
    let mut sum = 0.0;
    for e in 0..grid.len() {
        let (a, b) = grid.element_nodes(e);
        let (ua, ub, va, vb) = (u.node(a), u.node(b), v.node(a), v.node(b));
        let mut s = 0.0;
        for k in 0..d {
            s += (ub[k] - ua[k]) * (vb[k] - va[k]);
        }
        sum += s / grid.h(e);
    }
    Ok(sum)
}

/// Dirichlet energy `|u|_1^2 = (u_rho, u_rho)`.
pub fn dirichlet_energy(grid: &PeriodicGrid, u: &NodalField) -> Result<f64> {
    stiffness_inner(grid, u, u)
}

/// Element-wise `x_rho` of a curve, failing if any element has
/// `|x_rho| < 1e-12 h`.
pub fn checked_tangents(grid: &PeriodicGrid, x: &NodalField) -> Result<ElementField> {
    let q = derivative(grid, x)?;
    let threshold = 1e-12 * grid.h_max();
    for e in 0..grid.len() {
        let len = dot(q.element(e), q.element(e)).sqrt();
        if !(len >= threshold) {
            return Err(Error::DegenerateCurve {
                element: e,
                length: len,
                step: None,
            });
        }
    }
    Ok(q)
}

/// Nodal load vector of `(f(., t), eta)^h`: node `j` receives
/// `(h_j + h_{j+1}) / 2 * f(rho_j, t)`.
pub fn lumped_load(grid: &PeriodicGrid, forcing: &dyn Forcing, t: f64) -> Result<NodalField> {
    let d = forcing.dim();
    let mut load = NodalField::zeros(grid.len(), d);
    for (j, rho) in grid.nodes().iter().enumerate() {
        let out = load.node_mut(j);
        forcing.eval(*rho, t, out)?;
        let m = grid.lumped_mass(j);
        for v in out.iter_mut() {
            *v *= m;
        }
    }
    Ok(load)
}

/// Gauss-Legendre rule on the reference interval `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussRule {
    /// `n`-point rule, exact for polynomials of degree `2n - 1`; `n` in `1..=5`.
    pub fn new(n: usize) -> Result<Self> {
        // nodes and weights on [-1, 1]
        let (x, w): (Vec<f64>, Vec<f64>) = match n {
            1 => (vec![0.0], vec![2.0]),
            2 => {
                let a = 1.0 / 3f64.sqrt();
                (vec![-a, a], vec![1.0, 1.0])
            }
            3 => {
                let a = (3.0f64 / 5.0).sqrt();
                (vec![-a, 0.0, a], vec![5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0])
            }
            4 => {
                let r = 2.0 / 7.0 * (6.0f64 / 5.0).sqrt();
                let a = (3.0 / 7.0 - r).sqrt();
                let b = (3.0 / 7.0 + r).sqrt();
                let s30 = 30f64.sqrt();
                let wa = (18.0 + s30) / 36.0;
                let wb = (18.0 - s30) / 36.0;
                (vec![-b, -a, a, b], vec![wb, wa, wa, wb])
            }
            5 => {
                let r = 2.0 * (10.0f64 / 7.0).sqrt();
                let a = (5.0 - r).sqrt() / 3.0;
                let b = (5.0 + r).sqrt() / 3.0;
                let s70 = 70f64.sqrt();
                let wa = (322.0 + 13.0 * s70) / 900.0;
                let wb = (322.0 - 13.0 * s70) / 900.0;
                (vec![-b, -a, 0.0, a, b], vec![wb, wa, 128.0 / 225.0, wa, wb])
            }
            _ => {
                return Err(Error::Config(format!(
                    "Gauss rule needs 1..=5 points, got {n}"
                )))
            }
        };
        Ok(Self {
            points: x.iter().map(|x| 0.5 * (x + 1.0)).collect(),
            weights: w.iter().map(|w| 0.5 * w).collect(),
        })
    }

    /// Three-point rule, used for all non-lumped assembly.
    pub fn three_point() -> Self {
        Self::new(3).expect("3-point rule")
    }

    pub fn five_point() -> Self {
        Self::new(5).expect("5-point rule")
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `(s, weight)` pairs on `[0, 1]`; weights sum to one.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points
            .iter()
            .copied()
            .zip(self.weights.iter().copied())
    }
}

/// Integrates an element-wise integrand over `I`. The integrand receives the
/// element index, the local coordinate `s` in `[0, 1]` and the parameter `rho`.
pub fn gauss_integrate<F>(grid: &PeriodicGrid, rule: &GaussRule, mut f: F) -> f64
where
    F: FnMut(usize, f64, f64) -> f64,
{
    let mut sum = 0.0;
    for e in 0..grid.len() {
        let (left, _) = grid.element_interval(e);
        let h = grid.h(e);
        let mut local = 0.0;
        for (s, w) in rule.iter() {
            local += w * f(e, s, left + s * h);
        }
        sum += h * local;
    }
    sum
}

/// Nodal interpolant `I_h f`. The callback writes `f(rho)` into its output slice.
pub fn interpolate<F>(grid: &PeriodicGrid, dim: usize, mut f: F) -> NodalField
where
    F: FnMut(f64, &mut [f64]),
{
    let mut field = NodalField::zeros(grid.len(), dim);
    for (j, rho) in grid.nodes().iter().enumerate() {
        f(*rho, field.node_mut(j));
    }
    field
}

/// Value of a piecewise-linear field at local coordinate `s` of an element.
#[inline]
pub(crate) fn eval_on_element(
    grid: &PeriodicGrid,
    u: &NodalField,
    element: usize,
    s: f64,
    out: &mut [f64],
) {
    let (a, b) = grid.element_nodes(element);
    let (ua, ub) = (u.node(a), u.node(b));
    for k in 0..u.dim() {
        out[k] = (1.0 - s) * ua[k] + s * ub[k];
    }
}

/// Error norms `(||e||_0, ||e||_1)` of `e = exact - field`, where `||.||_1` is
/// the full `H^1` norm. `exact` writes the value and the `rho`-derivative of
/// the exact function at a parameter `rho`. Integrals use 5-point Gauss.
pub fn error_norms<F>(grid: &PeriodicGrid, field: &NodalField, exact: F) -> Result<(f64, f64)>
where
    F: FnMut(f64, &mut [f64], &mut [f64]),
{
    error_norms_with_rule(grid, &GaussRule::five_point(), field, exact)
}

/// [`error_norms`] with an explicit quadrature rule per element.
pub fn error_norms_with_rule<F>(
    grid: &PeriodicGrid,
    rule: &GaussRule,
    field: &NodalField,
    mut exact: F,
) -> Result<(f64, f64)>
where
    F: FnMut(f64, &mut [f64], &mut [f64]),
{
    field.check_on(grid)?;
    let d = field.dim();
    let mut val = vec![0.0; d];
    let mut der = vec![0.0; d];
    let mut uh = vec![0.0; d];
    let mut l2 = 0.0;
    let mut semi = 0.0;
    for e in 0..grid.len() {
        let (left, _) = grid.element_interval(e);
        let h = grid.h(e);
        let (a, b) = grid.element_nodes(e);
        let mut l2_loc = 0.0;
        let mut semi_loc = 0.0;
        for (s, w) in rule.iter() {
            exact(left + s * h, &mut val, &mut der);
            eval_on_element(grid, field, e, s, &mut uh);
            for k in 0..d {
                let du = (field.node(b)[k] - field.node(a)[k]) / h;
                l2_loc += w * (val[k] - uh[k]).powi(2);
                semi_loc += w * (der[k] - du).powi(2);
            }
        }
        l2 += h * l2_loc;
        semi += h * semi_loc;
    }
    Ok((l2.sqrt(), (l2 + semi).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn scalar(values: &[f64]) -> NodalField {
        NodalField::from_values(1, values.to_vec()).unwrap()
    }

    #[test]
    fn derivative_of_constant_vanishes() {
        let g = PeriodicGrid::uniform(7).unwrap();
        let u = interpolate(&g, 3, |_, out| out.copy_from_slice(&[1.0, -2.0, 0.5]));
        let du = derivative(&g, &u).unwrap();
        assert!(du.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn derivative_of_single_hat() {
        let g = PeriodicGrid::uniform(4).unwrap();
        let du = derivative(&g, &scalar(&[1.0, 0.0, 0.0, 0.0])).unwrap();
        // element 0 spans [0, rho_1]; its left node is rho_4 = rho_0 with value 0
        assert_eq!(du.values(), &[4.0, -4.0, 0.0, 0.0]);
    }

    #[test]
    fn derivative_of_sine_is_second_order_at_midpoints() {
        let g = PeriodicGrid::uniform(128).unwrap();
        let u = interpolate(&g, 1, |r, o| o[0] = (2.0 * PI * r).sin());
        let du = derivative(&g, &u).unwrap();
        let h = g.h_max();
        let err = (0..g.len())
            .map(|e| {
                let (l, r) = g.element_interval(e);
                let mid = 0.5 * (l + r);
                (du.values()[e] - 2.0 * PI * (2.0 * PI * mid).cos()).abs()
            })
            .fold(0.0, f64::max);
        // Taylor: error = (2 pi)^3 h^2 / 24 |cos| + O(h^4)
        let bound = (2.0 * PI).powi(3) * h * h / 24.0;
        assert!(err <= bound * 1.001, "err {err} bound {bound}");
        assert!(err >= bound * 0.99);
    }

    #[test]
    fn lumped_inner_examples() {
        let g = PeriodicGrid::from_element_lengths(vec![0.2, 0.3, 0.1, 0.4]).unwrap();
        let one = scalar(&[1.0; 4]);
        assert!((lumped_inner(&g, &one, &one, None).unwrap() - 1.0).abs() < 1e-15);

        let g4 = PeriodicGrid::uniform(4).unwrap();
        let hat = scalar(&[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(lumped_inner(&g4, &hat, &hat, None).unwrap(), 0.25);

        let two = ElementField::constant(4, 2.0);
        assert!((lumped_inner(&g4, &one, &one, Some(&two)).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn lumped_inner_rejects_mismatch() {
        let g = PeriodicGrid::uniform(4).unwrap();
        let a = scalar(&[1.0; 4]);
        let b = scalar(&[1.0; 5]);
        assert!(matches!(
            lumped_inner(&g, &a, &b, None),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn stiffness_examples() {
        let g = PeriodicGrid::uniform(4).unwrap();
        let hat = scalar(&[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(stiffness_inner(&g, &hat, &hat).unwrap(), 8.0);
        let c = scalar(&[3.0; 4]);
        assert_eq!(stiffness_inner(&g, &c, &hat).unwrap(), 0.0);
    }

    #[test]
    fn stiffness_of_sine_tends_to_two_pi_squared() {
        let target = 2.0 * PI * PI;
        let mut prev = f64::INFINITY;
        for j in [32, 64, 128, 256] {
            let g = PeriodicGrid::uniform(j).unwrap();
            let u = interpolate(&g, 1, |r, o| o[0] = (2.0 * PI * r).sin());
            let err = (stiffness_inner(&g, &u, &u).unwrap() - target).abs();
            assert!(err < prev / 3.5);
            prev = err;
        }
        assert!(prev < 1e-3);
    }

    #[test]
    fn gauss_rules() {
        let g = PeriodicGrid::uniform(5).unwrap();
        for n in 1..=5 {
            let r = GaussRule::new(n).unwrap();
            assert!((gauss_integrate(&g, &r, |_, _, _| 1.0) - 1.0).abs() < 1e-14);
        }
        assert!(GaussRule::new(6).is_err());

        // one element, rho^4 with three points
        let g1 = PeriodicGrid::from_element_lengths(vec![0.25, 0.25, 0.5]).unwrap();
        let r3 = GaussRule::three_point();
        let v = gauss_integrate(&g1, &r3, |_, _, rho| rho.powi(4));
        assert!((v - 0.2).abs() < 1e-15);

        // product of the two local hats on an element of length h is h/6
        let h = g1.h(2);
        let v = gauss_integrate(&g1, &GaussRule::new(2).unwrap(), |e, s, _| {
            if e == 2 {
                (1.0 - s) * s
            } else {
                0.0
            }
        });
        assert!((v - h / 6.0).abs() < 1e-16);
    }

    #[test]
    fn weighted_mass_entries_from_quadrature() {
        let g = PeriodicGrid::from_element_lengths(vec![0.3, 0.2, 0.5]).unwrap();
        let r3 = GaussRule::three_point();
        let w = [2.0, 0.5, 3.0];
        for e in 0..3 {
            let h = g.h(e);
            let diag = gauss_integrate(&g, &r3, |k, s, _| if k == e { w[k] * s * s } else { 0.0 });
            let off = gauss_integrate(
                &g,
                &r3,
                |k, s, _| {
                    if k == e {
                        w[k] * s * (1.0 - s)
                    } else {
                        0.0
                    }
                },
            );
            assert!((diag - w[e] * h / 3.0).abs() <= 1e-15 * diag);
            assert!((off - w[e] * h / 6.0).abs() <= 1e-15 * off);
        }
    }

    #[test]
    fn lumped_matches_gauss_for_linear_integrands() {
        // u*v*w linear per element when u is linear and v constant
        let g = PeriodicGrid::from_element_lengths(vec![0.1, 0.3, 0.2, 0.4]).unwrap();
        let u = scalar(&[0.3, -1.0, 2.0, 0.7]);
        let v = scalar(&[1.0; 4]);
        let w = ElementField::from_values(1, vec![1.5, 0.2, 3.0, 1.0]).unwrap();
        let lumped = lumped_inner(&g, &u, &v, Some(&w)).unwrap();
        let exact = gauss_integrate(&g, &GaussRule::new(2).unwrap(), |e, s, _| {
            let mut val = [0.0];
            eval_on_element(&g, &u, e, s, &mut val);
            val[0] * w.values()[e]
        });
        assert!((lumped - exact).abs() < 1e-15);
    }

    #[test]
    fn interpolate_quarter_circle() {
        let g = PeriodicGrid::uniform(4).unwrap();
        let x = interpolate(&g, 2, |r, o| {
            o[0] = (2.0 * PI * r).cos();
            o[1] = (2.0 * PI * r).sin();
        });
        let expect = [[0.0, 1.0], [-1.0, 0.0], [0.0, -1.0], [1.0, 0.0]];
        for (j, e) in expect.iter().enumerate() {
            assert!((x.node(j)[0] - e[0]).abs() < 1e-15);
            assert!((x.node(j)[1] - e[1]).abs() < 1e-15);
        }
    }

    fn sine_errors(j: usize) -> (f64, f64) {
        let g = PeriodicGrid::uniform(j).unwrap();
        let f = |r: f64, v: &mut [f64], d: &mut [f64]| {
            v[0] = (2.0 * PI * r).sin();
            d[0] = 2.0 * PI * (2.0 * PI * r).cos();
        };
        let u = interpolate(&g, 1, |r, o| o[0] = (2.0 * PI * r).sin());
        error_norms(&g, &u, f).unwrap()
    }

    #[test]
    fn error_norms_of_interpolant_decay() {
        let (l2a, h1a) = sine_errors(32);
        let (l2b, h1b) = sine_errors(64);
        let (l2c, h1c) = sine_errors(128);
        for (c, f) in [(l2a, l2b), (l2b, l2c)] {
            let ratio = c / f;
            assert!((ratio - 4.0).abs() < 0.2, "L2 ratio {ratio}");
        }
        for (c, f) in [(h1a, h1b), (h1b, h1c)] {
            let eoc = (c / f).log2();
            assert!((eoc - 1.0).abs() < 0.05, "H1 eoc {eoc}");
        }
    }

    #[test]
    fn error_norms_vanish_for_piecewise_linear_exact() {
        let g = PeriodicGrid::uniform(5).unwrap();
        let u = scalar(&[0.5, 1.0, -1.0, 2.0, 0.0]);
        let norms = error_norms(&g, &u, |rho, v, d| {
            // locate the element and reproduce the linear interpolant
            let e = g.nodes().iter().position(|n| rho <= *n).unwrap();
            let (l, _) = g.element_interval(e);
            let s = (rho - l) / g.h(e);
            eval_on_element(&g, &u, e, s, v);
            let (a, b) = g.element_nodes(e);
            d[0] = (u.node(b)[0] - u.node(a)[0]) / g.h(e);
        })
        .unwrap();
        assert!(norms.0 < 1e-15 && norms.1 < 1e-15);
    }
}
