//! Meshes, grid functions and the primitive trace.
//!
//! A [`Mesh`] is a strictly increasing list of interface coordinates
//! `x_{1/2} < x_{3/2} < ... < x_{n+1/2}` partitioning `[a, b]` into `n` cells.
//! A [`GridFunction`] attaches one value per cell (cell averages) or one value
//! per cell center (point values) and carries the boundary policy used to
//! resolve ghost lookups outside the physical index range.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{EnoError, Result};

/// Partition of `[a, b]` into cells `I_i = [x_{i-1/2}, x_{i+1/2}]`.
#[derive(Debug, Clone)]
pub struct Mesh {
    interfaces: Vec<f64>,
    widths: Vec<f64>,
    centers: Vec<f64>,
}

impl Mesh {
    /// Builds a mesh from explicit interface coordinates.
    pub fn from_interfaces(interfaces: Vec<f64>) -> Result<Self> {
        if interfaces.len() < 2 {
            return Err(EnoError::InvalidRange {
                a: interfaces.first().copied().unwrap_or(f64::NAN),
                b: interfaces.last().copied().unwrap_or(f64::NAN),
                n: 0,
            });
        }
        for i in 1..interfaces.len() {
            if !(interfaces[i] > interfaces[i - 1]) {
                return Err(EnoError::NonMonotoneInterfaces { index: i });
            }
        }
        let widths: Vec<f64> = interfaces.windows(2).map(|w| w[1] - w[0]).collect();
        let centers: Vec<f64> = interfaces.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        Ok(Mesh { interfaces, widths, centers })
    }

    /// Uniform mesh with interfaces exactly `a + i * (b - a) / n`.
    pub fn uniform(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a < b) || n == 0 || !a.is_finite() || !b.is_finite() {
            return Err(EnoError::InvalidRange { a, b, n });
        }
        let h = (b - a) / n as f64;
        let interfaces = (0..=n).map(|i| a + i as f64 * h).collect();
        Self::from_interfaces(interfaces)
    }

    /// Number of cells.
    pub fn len(&self) -> usize {
        self.widths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.widths.is_empty()
    }

    /// Interface coordinates, length `len() + 1`.
    pub fn interfaces(&self) -> &[f64] {
        &self.interfaces
    }

    /// Cell widths.
    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    /// Cell centers.
    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.interfaces[0], *self.interfaces.last().unwrap())
    }

    /// Domain length `b - a`.
    pub fn extent(&self) -> f64 {
        let (a, b) = self.domain();
        b - a
    }

    pub fn min_width(&self) -> f64 {
        self.widths.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_width(&self) -> f64 {
        self.widths.iter().cloned().fold(0.0, f64::max)
    }

    /// True when all widths agree to a relative tolerance of `1e-12`.
    pub fn is_uniform(&self) -> bool {
        let h = self.widths[0];
        self.widths.iter().all(|&w| (w - h).abs() <= 1e-12 * h.abs())
    }

    /// Index of the cell containing `x`, clamped to the domain.
    pub fn locate(&self, x: f64) -> usize {
        let j = self
            .interfaces
            .partition_point(|&p| p <= x);
        j.saturating_sub(1).min(self.len() - 1)
    }
}

/// How ghost cells outside `[0, n)` are populated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryPolicy {
    /// Values and cell widths wrap with the domain period.
    Periodic,
    /// Values clamp to the nearest edge value; ghost widths replicate the
    /// edge cell width.
    ConstantExtension,
}

/// What the stored values mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Semantics {
    /// `values[i]` is the average of `v` over cell `I_i`.
    CellAverage,
    /// `values[i]` is `v(x_i)` at the cell-center node `x_i`.
    PointValue,
}

/// Values attached to a mesh, with ghost-lookup semantics.
#[derive(Debug, Clone)]
pub struct GridFunction {
    mesh: Arc<Mesh>,
    values: Vec<f64>,
    semantics: Semantics,
    boundary: BoundaryPolicy,
}

impl GridFunction {
    /// Wraps explicit cell averages.
    pub fn cell_averages(
        mesh: Arc<Mesh>,
        values: Vec<f64>,
        boundary: BoundaryPolicy,
    ) -> Result<Self> {
        if values.len() != mesh.len() {
            return Err(EnoError::LengthMismatch { got: values.len(), expected: mesh.len() });
        }
        Ok(GridFunction { mesh, values, semantics: Semantics::CellAverage, boundary })
    }

    /// Wraps explicit point values on the cell-center nodes.
    pub fn point_values(
        mesh: Arc<Mesh>,
        values: Vec<f64>,
        boundary: BoundaryPolicy,
    ) -> Result<Self> {
        if values.len() != mesh.len() {
            return Err(EnoError::LengthMismatch { got: values.len(), expected: mesh.len() });
        }
        Ok(GridFunction { mesh, values, semantics: Semantics::PointValue, boundary })
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn semantics(&self) -> Semantics {
        self.semantics
    }

    pub fn boundary(&self) -> BoundaryPolicy {
        self.boundary
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Ghost-resolved value lookup for any index, including `i < 0` and
    /// `i >= n`.
    pub fn value(&self, i: isize) -> f64 {
        let n = self.values.len() as isize;
        match self.boundary {
            BoundaryPolicy::Periodic => {
                let j = i.rem_euclid(n);
                self.values[j as usize]
            }
            BoundaryPolicy::ConstantExtension => {
                let j = i.clamp(0, n - 1);
                self.values[j as usize]
            }
        }
    }

    /// Replaces the stored values, keeping mesh and semantics.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.values.len() {
            return Err(EnoError::LengthMismatch { got: values.len(), expected: self.values.len() });
        }
        Ok(GridFunction { mesh: self.mesh.clone(), values, semantics: self.semantics, boundary: self.boundary })
    }

    /// Max norm over the stored values.
    pub fn linf(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Total variation of the value sequence. Periodic functions include the
    /// wrap-around difference; constant extension contributes nothing there.
    pub fn total_variation(&self) -> f64 {
        let mut tv: f64 = self.values.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
        if self.boundary == BoundaryPolicy::Periodic && self.values.len() > 1 {
            tv += (self.values[0] - self.values[self.values.len() - 1]).abs();
        }
        tv
    }

    /// Discrete `L^2` quantity `sum_i dx_i * v_i^2`.
    pub fn l2_squared(&self) -> f64 {
        self.values
            .iter()
            .zip(self.mesh.widths())
            .map(|(v, w)| w * v * v)
            .sum()
    }

    /// Mass `sum_i dx_i * v_i`.
    pub fn mass(&self) -> f64 {
        self.values
            .iter()
            .zip(self.mesh.widths())
            .map(|(v, w)| w * v)
            .sum()
    }

    /// Writes `x_center,value` rows with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x_center,value\n");
        for (x, v) in self.mesh.centers().iter().zip(&self.values) {
            let _ = writeln!(out, "{},{}", fmt_g17(*x), fmt_g17(*v));
        }
        out
    }
}

/// Formats a float with 17 significant digits, `.` as decimal separator.
pub fn fmt_g17(x: f64) -> String {
    format!("{:.16e}", x)
}

/// Cell averages of `f` obtained by per-cell Gauss-Legendre quadrature exact
/// for polynomials up to `quad_degree`.
pub fn sample_averages(
    f: impl Fn(f64) -> f64,
    mesh: &Arc<Mesh>,
    quad_degree: usize,
    boundary: BoundaryPolicy,
) -> GridFunction {
    let rule = GaussLegendre::with_degree(quad_degree);
    let values = mesh
        .interfaces()
        .windows(2)
        .map(|w| rule.average(&f, w[0], w[1]))
        .collect();
    GridFunction {
        mesh: mesh.clone(),
        values,
        semantics: Semantics::CellAverage,
        boundary,
    }
}

/// Point values of `f` at the cell-center nodes.
pub fn sample_point_values(
    f: impl Fn(f64) -> f64,
    mesh: &Arc<Mesh>,
    boundary: BoundaryPolicy,
) -> GridFunction {
    let values = mesh.centers().iter().map(|&x| f(x)).collect();
    GridFunction {
        mesh: mesh.clone(),
        values,
        semantics: Semantics::PointValue,
        boundary,
    }
}

/// The primitive `V(x) = integral of v from x_{1/2} to x`, traced at the
/// interfaces: `V_{1/2} = 0` and `V_{j+1/2} - V_{j-1/2} = dx_j * avg_j`.
#[derive(Debug, Clone)]
pub struct PrimitiveTrace {
    mesh: Arc<Mesh>,
    values: Vec<f64>,
}

impl PrimitiveTrace {
    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    /// Primitive values at the interfaces, length `n + 1`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Cumulative interface trace of the primitive of a cell-average function.
pub fn primitive_trace(u: &GridFunction) -> Result<PrimitiveTrace> {
    if u.semantics() != Semantics::CellAverage {
        return Err(EnoError::SemanticsMismatch);
    }
    let mut values = Vec::with_capacity(u.len() + 1);
    let mut acc = 0.0;
    values.push(acc);
    for (v, w) in u.values().iter().zip(u.mesh().widths()) {
        acc += v * w;
        values.push(acc);
    }
    Ok(PrimitiveTrace { mesh: u.mesh().clone(), values })
}

/// Gauss-Legendre quadrature nodes and weights on `[-1, 1]`.
///
/// Nodes are the roots of the Legendre polynomial, found by Newton iteration
/// from Chebyshev initial guesses; an `m`-point rule is exact for polynomials
/// of degree `2m - 1`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Rule with exactly `m >= 1` points.
    pub fn new(m: usize) -> Self {
        let m = m.max(1);
        let mut nodes = vec![0.0; m];
        let mut weights = vec![0.0; m];
        for i in 0..m {
            // Chebyshev-based initial guess for the i-th root.
            let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_with_derivative(m, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(m, x);
            nodes[m - 1 - i] = x;
            weights[m - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        GaussLegendre { nodes, weights }
    }

    /// Smallest rule exact for polynomials of degree `deg`.
    pub fn with_degree(deg: usize) -> Self {
        Self::new(deg / 2 + 1)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integral of `f` over `[a, b]`.
    pub fn integrate(&self, f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }

    /// Average of `f` over `[a, b]`.
    pub fn average(&self, f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        self.integrate(f, a, b) / (b - a)
    }
}

/// Legendre polynomial `P_m(x)` and its derivative by the three-term
/// recurrence.
fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if m == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=m {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}
