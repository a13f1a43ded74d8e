//! Divided-difference tables.
//!
//! For cell averages the table follows the average recursion
//!
//! ```text
//! [avg_i] = avg_i,
//! [avg_i, ..., avg_j] = ([avg_{i+1}, ..., avg_j] - [avg_i, ..., avg_{j-1}])
//!                       / (x_{j+1/2} - x_{i-1/2}),
//! ```
//!
//! so the level-`l` entry starting at cell `i` equals the standard Newton
//! divided difference of the primitive `V` over the `l + 2` interface points
//! `x_{i-1/2}, ..., x_{i+l+1/2}`. That identity is what
//! [`table_equals_primitive_oracle`] checks: it recomputes every entry from
//! scratch through the primitive trace and the plain point recursion, a code
//! path that shares nothing with [`DividedDifferenceTable::build`].
//!
//! For point values the table is the textbook divided difference over the
//! cell-center nodes.

use std::fmt::Write as _;

use crate::error::{EnoError, Result, MAX_ORDER};
use crate::mesh::{primitive_trace, BoundaryPolicy, GridFunction, Semantics};

/// Divided differences of a grid function on a ghost-extended index window.
///
/// Entries exist for levels `0..=max_level` and start indices
/// `-ghost <= i < n + ghost - level` where `ghost == max_level`; that window
/// is exactly what reconstruction at order `max_level` touches, boundary
/// cells included.
#[derive(Debug, Clone)]
pub struct DividedDifferenceTable {
    semantics: Semantics,
    n: usize,
    ghost: usize,
    /// Extended interface coordinates (cell averages) or node coordinates
    /// (point values).
    coords: Vec<f64>,
    levels: Vec<Vec<f64>>,
}

impl DividedDifferenceTable {
    /// Builds levels `0..=max_level` with ghost values supplied by the
    /// function's boundary policy.
    pub fn build(u: &GridFunction, max_level: usize) -> Result<Self> {
        if max_level > MAX_ORDER {
            return Err(EnoError::OrderUnsupported { k: max_level });
        }
        let n = u.len();
        if n == 0 {
            return Err(EnoError::MeshTooSmall { needed: 1, got: 0 });
        }
        let g = max_level;
        let n_ext = n + 2 * g;
        let coords = extended_coords(u, g);
        let mut levels = Vec::with_capacity(max_level + 1);
        let mut level0 = Vec::with_capacity(n_ext);
        for e in 0..n_ext {
            level0.push(u.value(e as isize - g as isize));
        }
        levels.push(level0);
        // Denominator span: level l over cells/nodes i..i+l covers interfaces
        // x_{i-1/2}..x_{i+l+1/2} (averages) or nodes x_i..x_{i+l} (points).
        let span_offset = match u.semantics() {
            Semantics::CellAverage => 1,
            Semantics::PointValue => 0,
        };
        for l in 1..=max_level {
            let prev = &levels[l - 1];
            let mut row = Vec::with_capacity(n_ext - l);
            for e in 0..n_ext - l {
                let span = coords[e + l + span_offset] - coords[e];
                row.push((prev[e + 1] - prev[e]) / span);
            }
            levels.push(row);
        }
        Ok(DividedDifferenceTable { semantics: u.semantics(), n, ghost: g, coords, levels })
    }

    pub fn semantics(&self) -> Semantics {
        self.semantics
    }

    /// Number of physical cells (or nodes).
    pub fn cells(&self) -> usize {
        self.n
    }

    pub fn ghost(&self) -> usize {
        self.ghost
    }

    pub fn max_level(&self) -> usize {
        self.levels.len() - 1
    }

    /// Entry `D[level][i]`, `i` counted in physical indices (ghosts negative).
    ///
    /// Panics outside the stored window; reconstruction at the order the
    /// table was built for stays inside it by construction.
    pub fn entry(&self, level: usize, i: isize) -> f64 {
        let e = i + self.ghost as isize;
        assert!(
            level < self.levels.len() && e >= 0 && (e as usize) < self.levels[level].len(),
            "divided difference D[{level}][{i}] outside the stored window"
        );
        self.levels[level][e as usize]
    }

    /// Extended coordinate lookup.
    ///
    /// Cell averages: `coord(j)` is the interface `x_{j-1/2}` for
    /// `-ghost <= j <= n + ghost`. Point values: `coord(j)` is the node
    /// coordinate `x_j` for `-ghost <= j < n + ghost`.
    pub fn coord(&self, j: isize) -> f64 {
        let a = j + self.ghost as isize;
        assert!(a >= 0 && (a as usize) < self.coords.len(), "coordinate index {j} outside the ghost window");
        self.coords[a as usize]
    }

    /// `level,i,value` rows over the physical index range, 17 significant
    /// digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,i,value\n");
        for level in 0..=self.max_level() {
            for i in 0..self.n {
                let _ = writeln!(
                    out,
                    "{},{},{}",
                    level,
                    i,
                    crate::mesh::fmt_g17(self.entry(level, i as isize))
                );
            }
        }
        out
    }
}

fn extended_coords(u: &GridFunction, g: usize) -> Vec<f64> {
    let mesh = u.mesh();
    let n = mesh.len();
    let period = mesh.extent();
    match u.semantics() {
        Semantics::CellAverage => {
            let xs = mesh.interfaces();
            let w0 = mesh.widths()[0];
            let wn = mesh.widths()[n - 1];
            let mut coords = Vec::with_capacity(n + 2 * g + 1);
            for j in -(g as isize)..=(n + g) as isize {
                let x = if j < 0 {
                    match u.boundary() {
                        BoundaryPolicy::Periodic => xs[(j + n as isize) as usize] - period,
                        BoundaryPolicy::ConstantExtension => xs[0] + j as f64 * w0,
                    }
                } else if j > n as isize {
                    match u.boundary() {
                        BoundaryPolicy::Periodic => xs[(j - n as isize) as usize] + period,
                        BoundaryPolicy::ConstantExtension => xs[n] + (j - n as isize) as f64 * wn,
                    }
                } else {
                    xs[j as usize]
                };
                coords.push(x);
            }
            coords
        }
        Semantics::PointValue => {
            let cs = mesh.centers();
            let w0 = mesh.widths()[0];
            let wn = mesh.widths()[n - 1];
            let mut coords = Vec::with_capacity(n + 2 * g);
            for j in -(g as isize)..(n + g) as isize {
                let x = if j < 0 {
                    match u.boundary() {
                        BoundaryPolicy::Periodic => cs[(j + n as isize) as usize] - period,
                        BoundaryPolicy::ConstantExtension => cs[0] + j as f64 * w0,
                    }
                } else if j >= n as isize {
                    match u.boundary() {
                        BoundaryPolicy::Periodic => cs[(j - n as isize) as usize] + period,
                        BoundaryPolicy::ConstantExtension => cs[n - 1] + (j - (n - 1) as isize) as f64 * wn,
                    }
                } else {
                    cs[j as usize]
                };
                coords.push(x);
            }
            coords
        }
    }
}

/// Largest relative deviation between the cell-average table and the
/// independent primitive-function oracle, over all levels up to `max_level`
/// and all fully physical start indices.
///
/// The oracle path: accumulate the primitive trace, then run the standard
/// point divided-difference recursion on `(x_{i-1/2}, V_{i-1/2})`. The
/// level-`l` average entry must match the order-`l+1` point entry.
pub fn primitive_oracle_max_rel_error(u: &GridFunction, max_level: usize) -> Result<f64> {
    if u.semantics() != Semantics::CellAverage {
        return Err(EnoError::SemanticsMismatch);
    }
    let n = u.len();
    if n < max_level + 1 {
        return Err(EnoError::MeshTooSmall { needed: max_level + 1, got: n });
    }
    let table = DividedDifferenceTable::build(u, max_level)?;
    let prim = primitive_trace(u)?;
    let xs = u.mesh().interfaces();

    // rows[ord][i] = V[x_{i-1/2}, ..., x_{i+ord-1/2}] over ord + 1 points.
    let mut rows: Vec<Vec<f64>> = vec![prim.values().to_vec()];
    for ord in 1..=max_level + 1 {
        let prev = &rows[ord - 1];
        let row: Vec<f64> = (0..prev.len() - 1)
            .map(|i| (prev[i + 1] - prev[i]) / (xs[i + ord] - xs[i]))
            .collect();
        rows.push(row);
    }

    let mut worst = 0.0f64;
    for level in 0..=max_level {
        let oracle_row = &rows[level + 1];
        // Errors are measured relative to the level's magnitude: individual
        // entries can cancel to well below the scale both recursions resolve,
        // which would turn rounding noise into spurious per-entry blowups.
        let scale = oracle_row
            .iter()
            .fold(0.0f64, |a, &b| a.max(b.abs()))
            .max(1e-300);
        for (i, oracle) in oracle_row.iter().enumerate() {
            let got = table.entry(level, i as isize);
            worst = worst.max((got - oracle).abs() / scale);
        }
    }
    Ok(worst)
}

/// True when every table entry matches the primitive-function oracle to the
/// given relative tolerance.
pub fn table_equals_primitive_oracle(u: &GridFunction, max_level: usize, rtol: f64) -> Result<bool> {
    Ok(primitive_oracle_max_rel_error(u, max_level)? <= rtol)
}
