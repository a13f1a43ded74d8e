//! Adaptive stencil selection and Newton-form reconstruction.
//!
//! For cell averages the order-`k` reconstruction interpolates the primitive
//! function on an adaptively chosen stencil of `k` cells and differentiates
//! the interpolant. Stencils grow one cell at a time, extending toward the
//! side with the smaller divided difference in magnitude; ties keep the
//! current stencil. The resulting piecewise polynomial is discontinuous at
//! the interfaces, and those jumps are what the stability checkers study.
//!
//! Two evaluation paths are kept per cell: the differentiated Newton form and
//! monomial coefficients expanded about the cell center. Their agreement is a
//! cheap consistency check on the whole construction.

use std::fmt::Write as _;

use crate::divided_differences::DividedDifferenceTable;
use crate::error::{EnoError, Result, MAX_ORDER};
use crate::mesh::{fmt_g17, GridFunction, Semantics};

/// Chosen stencils for every cell in the ghost-extended range `-1..=n`.
///
/// The extra boundary entries carry the polynomials needed by the outermost
/// interface traces.
#[derive(Debug, Clone)]
pub struct StencilSelection {
    k: usize,
    n: usize,
    history: Vec<Vec<isize>>,
}

impl StencilSelection {
    pub fn order(&self) -> usize {
        self.k
    }

    /// Number of physical cells.
    pub fn cells(&self) -> usize {
        self.n
    }

    fn slot(&self, i: isize) -> usize {
        assert!(
            i >= -1 && i <= self.n as isize,
            "cell {i} outside the selection range -1..={}",
            self.n
        );
        (i + 1) as usize
    }

    /// Stencil starts `s^1, ..., s^k` recorded while the stencil grew.
    pub fn history(&self, i: isize) -> &[isize] {
        &self.history[self.slot(i)]
    }

    /// Final stencil start `s_i`; the stencil is `{s_i, ..., s_i + k - 1}`.
    pub fn start(&self, i: isize) -> isize {
        *self.history[self.slot(i)].last().unwrap()
    }

    /// Offset `r_i = i - s_i`, always in `0..k`.
    pub fn offset(&self, i: isize) -> usize {
        (i - self.start(i)) as usize
    }
}

/// One reconstruction polynomial, degree `< k`.
#[derive(Debug, Clone)]
pub struct CellPolynomial {
    cell: isize,
    k: usize,
    semantics: Semantics,
    center: f64,
    newton_coeffs: Vec<f64>,
    newton_nodes: Vec<Vec<f64>>,
    mono: Vec<f64>,
}

impl CellPolynomial {
    fn build(
        cell: isize,
        k: usize,
        semantics: Semantics,
        center: f64,
        history: &[isize],
        table: &DividedDifferenceTable,
    ) -> Self {
        let mut mono = vec![0.0; k];
        let mut newton_coeffs = Vec::with_capacity(k);
        let mut newton_nodes = Vec::with_capacity(k);
        for l in 1..=k {
            let coeff = table.entry(l - 1, history[l - 1]);
            let prev_start = if l == 1 { cell } else { history[l - 2] };
            let node_count = match semantics {
                Semantics::CellAverage => l,
                Semantics::PointValue => l - 1,
            };
            let nodes: Vec<f64> = (0..node_count)
                .map(|m| table.coord(prev_start + m as isize))
                .collect();
            let mut prod = vec![1.0];
            for y in &nodes {
                poly_mul_linear(&mut prod, y - center);
            }
            match semantics {
                Semantics::CellAverage => {
                    // The Newton term interpolates the primitive; its
                    // derivative contributes to the reconstruction.
                    for j in 1..prod.len() {
                        mono[j - 1] += coeff * j as f64 * prod[j];
                    }
                }
                Semantics::PointValue => {
                    for (j, p) in prod.iter().enumerate() {
                        mono[j] += coeff * p;
                    }
                }
            }
            newton_coeffs.push(coeff);
            newton_nodes.push(nodes);
        }
        CellPolynomial { cell, k, semantics, center, newton_coeffs, newton_nodes, mono }
    }

    pub fn cell(&self) -> isize {
        self.cell
    }

    pub fn order(&self) -> usize {
        self.k
    }

    /// Expansion point of the monomial form.
    pub fn center(&self) -> f64 {
        self.center
    }

    /// Monomial coefficients about [`center`](Self::center): `p(x) = sum_j
    /// mono[j] (x - center)^j`.
    pub fn monomial_coefficients(&self) -> &[f64] {
        &self.mono
    }

    /// Horner evaluation of the monomial form; the primary evaluation path.
    pub fn eval(&self, x: f64) -> f64 {
        let t = x - self.center;
        let mut acc = 0.0;
        for c in self.mono.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    /// Direct evaluation of the (differentiated) Newton form.
    pub fn eval_newton(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (coeff, nodes) in self.newton_coeffs.iter().zip(&self.newton_nodes) {
            match self.semantics {
                Semantics::CellAverage => {
                    let mut basis = 0.0;
                    for skip in 0..nodes.len() {
                        let mut p = 1.0;
                        for (m, y) in nodes.iter().enumerate() {
                            if m != skip {
                                p *= x - y;
                            }
                        }
                        basis += p;
                    }
                    acc += coeff * basis;
                }
                Semantics::PointValue => {
                    let mut p = 1.0;
                    for y in nodes {
                        p *= x - y;
                    }
                    acc += coeff * p;
                }
            }
        }
        acc
    }

    /// Derivative `p'(x)`.
    pub fn derivative(&self, x: f64) -> f64 {
        let t = x - self.center;
        let mut acc = 0.0;
        for j in (1..self.mono.len()).rev() {
            acc = acc * t + j as f64 * self.mono[j];
        }
        acc
    }

    /// Exact average of `p` over `[xl, xr]`.
    pub fn average_over(&self, xl: f64, xr: f64) -> f64 {
        let tl = xl - self.center;
        let tr = xr - self.center;
        let mut acc = 0.0;
        let mut pl = tl;
        let mut pr = tr;
        for (j, c) in self.mono.iter().enumerate() {
            acc += c * (pr - pl) / (j as f64 + 1.0);
            pl *= tl;
            pr *= tr;
        }
        acc / (xr - xl)
    }
}

/// Multiplies the coefficient vector (in `t`) by `(t - root)`.
fn poly_mul_linear(coeffs: &mut Vec<f64>, root: f64) {
    coeffs.push(0.0);
    for j in (1..coeffs.len()).rev() {
        coeffs[j] = coeffs[j - 1] - root * coeffs[j];
    }
    coeffs[0] *= -root;
}

/// One-sided limits of the reconstruction at an interface.
#[derive(Debug, Clone, Copy)]
pub struct InterfaceTrace {
    /// Interface index `j`, located at `x_{j-1/2}`; sits between cells
    /// (or nodes) `j - 1` and `j`.
    pub index: usize,
    pub x: f64,
    /// Limit from the left cell's polynomial.
    pub v_minus: f64,
    /// Limit from the right cell's polynomial.
    pub v_plus: f64,
    /// `v_plus - v_minus`.
    pub recon_jump: f64,
    /// Jump of the underlying data, ghost-resolved.
    pub avg_jump: f64,
    /// Mean of the two data values.
    pub avg_mean: f64,
}

/// Full order-`k` reconstruction of a grid function.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    u: GridFunction,
    k: usize,
    table: DividedDifferenceTable,
    selection: StencilSelection,
    polys: Vec<CellPolynomial>,
    traces: Vec<InterfaceTrace>,
}

impl Reconstruction {
    pub fn order(&self) -> usize {
        self.k
    }

    pub fn input(&self) -> &GridFunction {
        &self.u
    }

    pub fn table(&self) -> &DividedDifferenceTable {
        &self.table
    }

    pub fn selection(&self) -> &StencilSelection {
        &self.selection
    }

    /// Polynomial of cell `i`, `-1 <= i <= n`.
    pub fn polynomial(&self, i: isize) -> &CellPolynomial {
        &self.polys[(i + 1) as usize]
    }

    /// Interface traces, one per interface `j = 0..=n`.
    pub fn traces(&self) -> &[InterfaceTrace] {
        &self.traces
    }

    /// Evaluates the piecewise reconstruction at `x` (within the domain).
    pub fn eval(&self, x: f64) -> f64 {
        let i = self.u.mesh().locate(x);
        self.polynomial(i as isize).eval(x)
    }

    /// Jump at interface `j` from the closed-form divided-difference
    /// expression rather than from polynomial evaluation.
    pub fn jump_from_formula(&self, j: usize) -> f64 {
        let x = self.u.mesh().interfaces()[j];
        jump_terms_at(&self.table, &self.selection, j, x)
            .into_iter()
            .map(|t| t.coefficient * t.weight)
            .sum()
    }

    /// Per-cell CSV dump: stencil start, offset, one-sided edge values and
    /// the monomial coefficients about the cell center.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,s_i,r_i,v_plus_left,v_minus_right");
        for j in 0..self.k {
            let _ = write!(out, ",c{j}");
        }
        out.push('\n');
        let xs = self.u.mesh().interfaces();
        for i in 0..self.u.len() {
            let p = self.polynomial(i as isize);
            let _ = write!(
                out,
                "{},{},{},{},{}",
                i,
                self.selection.start(i as isize),
                self.selection.offset(i as isize),
                fmt_g17(p.eval(xs[i])),
                fmt_g17(p.eval(xs[i + 1])),
            );
            for c in p.monomial_coefficients() {
                let _ = write!(out, ",{}", fmt_g17(*c));
            }
            out.push('\n');
        }
        out
    }
}

/// Runs stencil selection at order `k` on a prebuilt table.
pub fn select_stencils(table: &DividedDifferenceTable, k: usize) -> Result<StencilSelection> {
    if k == 0 || k > MAX_ORDER {
        return Err(EnoError::OrderUnsupported { k });
    }
    assert!(table.max_level() >= k.saturating_sub(1), "table too shallow for order {k}");
    let n = table.cells();
    let mut history = Vec::with_capacity(n + 2);
    for cell in -1..=(n as isize) {
        let mut s = cell;
        let mut hist = Vec::with_capacity(k);
        hist.push(s);
        for l in 1..k {
            // Extend toward the smaller divided difference; ties keep the
            // current stencil.
            let left = table.entry(l, s - 1).abs();
            let right = table.entry(l, s).abs();
            if left < right {
                s -= 1;
            }
            hist.push(s);
        }
        history.push(hist);
    }
    Ok(StencilSelection { k, n, history })
}

/// Order-`k` ENO reconstruction of `u` (cell averages or point values).
pub fn reconstruct(u: &GridFunction, k: usize) -> Result<Reconstruction> {
    if k == 0 || k > MAX_ORDER {
        return Err(EnoError::OrderUnsupported { k });
    }
    let table = DividedDifferenceTable::build(u, k)?;
    let selection = select_stencils(&table, k)?;
    let n = u.len();
    let mut polys = Vec::with_capacity(n + 2);
    for cell in -1..=(n as isize) {
        let center = match u.semantics() {
            Semantics::CellAverage => 0.5 * (table.coord(cell) + table.coord(cell + 1)),
            Semantics::PointValue => table.coord(cell),
        };
        polys.push(CellPolynomial::build(
            cell,
            k,
            u.semantics(),
            center,
            selection.history(cell),
            &table,
        ));
    }
    let xs = u.mesh().interfaces();
    let mut traces = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let x = xs[j];
        let left = &polys[j]; // cell j - 1 at slot (j - 1) + 1
        let right = &polys[j + 1];
        let v_minus = left.eval(x);
        let v_plus = right.eval(x);
        let a = u.value(j as isize - 1);
        let b = u.value(j as isize);
        traces.push(InterfaceTrace {
            index: j,
            x,
            v_minus,
            v_plus,
            recon_jump: v_plus - v_minus,
            avg_jump: b - a,
            avg_mean: 0.5 * (a + b),
        });
    }
    Ok(Reconstruction { u: u.clone(), k, table, selection, polys, traces })
}

/// One term of the closed-form jump expression at an interface.
#[derive(Debug, Clone, Copy)]
pub struct JumpTerm {
    /// Stencil start `s` the term belongs to.
    pub s: isize,
    /// Divided difference `D[k][s]`.
    pub coefficient: f64,
    /// Geometric weight; the term's value is `coefficient * weight`.
    pub weight: f64,
}

fn jump_terms_at(
    table: &DividedDifferenceTable,
    selection: &StencilSelection,
    j: usize,
    x: f64,
) -> Vec<JumpTerm> {
    let k = selection.order();
    let i = j as isize - 1; // left cell
    let lo = selection.start(i);
    let hi = selection.start(j as isize);
    let mut terms = Vec::new();
    for s in lo..hi {
        let coefficient = table.entry(k, s);
        let weight = match table.semantics() {
            Semantics::CellAverage => {
                let span = table.coord(s + k as isize + 1) - table.coord(s);
                let skip = (i - s) as usize;
                let mut prod = 1.0;
                for m in 0..k {
                    if m != skip {
                        prod *= x - table.coord(s + m as isize + 1);
                    }
                }
                span * prod
            }
            Semantics::PointValue => {
                let span = table.coord(s + k as isize) - table.coord(s);
                let mut prod = 1.0;
                for m in 1..k {
                    prod *= x - table.coord(s + m as isize);
                }
                span * prod
            }
        };
        terms.push(JumpTerm { s, coefficient, weight });
    }
    terms
}

/// Terms of the closed-form jump expression at interface `j` for a
/// cell-average table: the jump equals the sum of `coefficient * weight`
/// over stencil starts `s_{j-1} <= s < s_j`.
pub fn jump_formula_terms(
    table: &DividedDifferenceTable,
    selection: &StencilSelection,
    j: usize,
) -> Result<Vec<JumpTerm>> {
    if table.semantics() != Semantics::CellAverage {
        return Err(EnoError::SemanticsMismatch);
    }
    assert!(table.max_level() >= selection.order(), "jump terms need table level k");
    let x = table.coord(j as isize);
    Ok(jump_terms_at(table, selection, j, x))
}

/// Closed-form reconstruction jump at interface `j` (cell averages).
pub fn jump_formula(
    table: &DividedDifferenceTable,
    selection: &StencilSelection,
    j: usize,
) -> Result<f64> {
    Ok(jump_formula_terms(table, selection, j)?
        .into_iter()
        .map(|t| t.coefficient * t.weight)
        .sum())
}

/// Slope limiter underlying the second-order reconstruction:
/// `phi(theta) = theta` for `|theta| < 1`, else `1`.
pub fn eno_phi(theta: f64) -> f64 {
    if theta.abs() < 1.0 {
        theta
    } else {
        1.0
    }
}

/// Limiter form of the second-order reconstruction on a uniform mesh.
///
/// Returns the undivided slopes `sigma_i = phi(theta_i) * jump_{i+1/2}` with
/// `theta_i = jump_{i-1/2} / jump_{i+1/2}`; the cell polynomial is
/// `p_i(x) = avg_i + sigma_i (x - x_i) / dx`. A vanishing right difference
/// forces `sigma_i = 0`, matching the stencil-selection trace.
pub fn limiter_form(u: &GridFunction) -> Result<Vec<f64>> {
    if u.semantics() != Semantics::CellAverage {
        return Err(EnoError::SemanticsMismatch);
    }
    if !u.mesh().is_uniform() {
        return Err(EnoError::NonuniformUnsupported);
    }
    let n = u.len() as isize;
    let mut slopes = Vec::with_capacity(u.len());
    for i in 0..n {
        let left = u.value(i) - u.value(i - 1);
        let right = u.value(i + 1) - u.value(i);
        let sigma = if right == 0.0 {
            0.0
        } else {
            eno_phi(left / right) * right
        };
        slopes.push(sigma);
    }
    Ok(slopes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{sample_averages, BoundaryPolicy, Mesh};
    use std::sync::Arc;

    fn averages(values: &[f64], boundary: BoundaryPolicy) -> GridFunction {
        let mesh = Arc::new(Mesh::uniform(0.0, values.len() as f64, values.len()).unwrap());
        GridFunction::cell_averages(mesh, values.to_vec(), boundary).unwrap()
    }

    #[test]
    fn shifts_left_when_left_difference_is_smaller() {
        let u = averages(&[0.0, 0.0, 1.0], BoundaryPolicy::ConstantExtension);
        let r = reconstruct(&u, 2).unwrap();
        assert_eq!(r.selection().start(1), 0);
        assert_eq!(r.selection().offset(1), 1);
    }

    #[test]
    fn ties_keep_the_current_stencil() {
        let u = averages(&[0.0, 0.0, 1.0, 0.0, 0.0], BoundaryPolicy::ConstantExtension);
        let r = reconstruct(&u, 2).unwrap();
        // |D1[1]| == |D1[2]| == 0.5: cell 2 keeps s = 2.
        assert_eq!(r.selection().start(2), 2);
        assert_eq!(r.selection().offset(2), 0);
    }

    #[test]
    fn stencils_always_contain_their_cell() {
        let u = averages(&[0.1, -0.7, 0.3, 0.9, -0.2, 0.5, 0.0, -0.4], BoundaryPolicy::Periodic);
        for k in 1..=6usize {
            let r = reconstruct(&u, k).unwrap();
            for i in 0..8isize {
                let s = r.selection().start(i);
                assert!(s <= i && i <= s + k as isize - 1);
                let hist = r.selection().history(i);
                assert_eq!(hist.len(), k);
                assert_eq!(hist[0], i);
                for w in hist.windows(2) {
                    assert!(w[1] == w[0] || w[1] == w[0] - 1);
                }
            }
        }
    }

    #[test]
    fn order_one_reproduces_the_averages() {
        let u = averages(&[0.5, -1.0, 2.0], BoundaryPolicy::Periodic);
        let r = reconstruct(&u, 1).unwrap();
        for i in 0..3isize {
            let p = r.polynomial(i);
            assert_eq!(p.monomial_coefficients(), &[u.values()[i as usize]]);
        }
        // Jumps equal the data jumps exactly.
        for t in r.traces() {
            assert_eq!(t.recon_jump, t.avg_jump);
        }
    }

    #[test]
    fn reconstruction_is_exact_on_polynomial_data() {
        // Averages of x^2 on [0,1]; interior cells must reproduce it for
        // every order >= 3.
        let mesh = Arc::new(Mesh::uniform(0.0, 1.0, 12).unwrap());
        let u = sample_averages(|x| x * x, &mesh, 9, BoundaryPolicy::ConstantExtension);
        for k in 3..=5usize {
            let r = reconstruct(&u, k).unwrap();
            for i in (k as isize)..(12 - k as isize) {
                let p = r.polynomial(i);
                for t in 0..5 {
                    let x = mesh.interfaces()[i as usize] + mesh.widths()[i as usize] * t as f64 / 4.0;
                    assert!(
                        (p.eval(x) - x * x).abs() < 1e-12,
                        "k={k} cell {i}: p({x}) = {}",
                        p.eval(x)
                    );
                }
            }
        }
    }

    #[test]
    fn polynomial_average_matches_the_cell_average() {
        let u = averages(&[0.3, -1.2, 0.8, 2.0, -0.4, 0.9, 0.1], BoundaryPolicy::Periodic);
        for k in 1..=6usize {
            let r = reconstruct(&u, k).unwrap();
            for i in 0..7usize {
                let p = r.polynomial(i as isize);
                let xs = u.mesh().interfaces();
                let avg = p.average_over(xs[i], xs[i + 1]);
                assert!(
                    (avg - u.values()[i]).abs() < 1e-12,
                    "k={k} cell {i}: {avg} vs {}",
                    u.values()[i]
                );
            }
        }
    }

    #[test]
    fn newton_and_monomial_forms_agree() {
        let u = averages(
            &[0.3, -1.2, 0.8, 2.0, -0.4, 0.9, 0.1, -0.6, 1.4, 0.2, -1.0, 0.7],
            BoundaryPolicy::Periodic,
        );
        for k in 1..=8usize {
            let r = reconstruct(&u, k).unwrap();
            for i in 0..12isize {
                let p = r.polynomial(i);
                for t in 0..7 {
                    let x = i as f64 + t as f64 / 6.0;
                    let a = p.eval(x);
                    let b = p.eval_newton(x);
                    let scale = a.abs().max(b.abs()).max(1.0);
                    assert!((a - b).abs() <= 1e-10 * scale, "k={k} cell {i} x={x}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn spike_jump_and_formula_match_hand_values() {
        let u = averages(&[0.0, 0.0, 1.0, 0.0, 0.0], BoundaryPolicy::ConstantExtension);
        let r = reconstruct(&u, 2).unwrap();
        let t = &r.traces()[2];
        assert!((t.v_minus - 0.0).abs() < 1e-14);
        assert!((t.v_plus - 1.5).abs() < 1e-14);
        assert!((t.recon_jump - 1.5).abs() < 1e-14);

        let terms = jump_formula_terms(r.table(), r.selection(), 2).unwrap();
        assert_eq!(terms.len(), 2);
        assert!((terms[0].coefficient - 1.0 / 6.0).abs() < 1e-15);
        assert!((terms[0].weight - 3.0).abs() < 1e-13);
        assert!((terms[1].coefficient + 1.0 / 3.0).abs() < 1e-15);
        assert!((terms[1].weight + 3.0).abs() < 1e-13);
        assert!((r.jump_from_formula(2) - 1.5).abs() < 1e-13);
        assert!((jump_formula(r.table(), r.selection(), 2).unwrap() - 1.5).abs() < 1e-13);
    }

    #[test]
    fn jump_formula_matches_traces_on_random_data() {
        let u = averages(
            &[0.3, -1.2, 0.8, 2.0, -0.4, 0.9, 0.1, -0.6, 1.4, 0.2],
            BoundaryPolicy::Periodic,
        );
        for k in 1..=6usize {
            let r = reconstruct(&u, k).unwrap();
            for j in 0..=10usize {
                let direct = r.traces()[j].recon_jump;
                let formula = r.jump_from_formula(j);
                let scale = direct.abs().max(1.0);
                assert!(
                    (direct - formula).abs() <= 1e-11 * scale,
                    "k={k} j={j}: {direct} vs {formula}"
                );
            }
        }
    }

    #[test]
    fn jump_weight_signs_alternate_with_the_stencil_start() {
        let u = averages(
            &[0.3, -1.2, 0.8, 2.0, -0.4, 0.9, 0.1, -0.6, 1.4, 0.2],
            BoundaryPolicy::Periodic,
        );
        for k in 2..=6usize {
            let r = reconstruct(&u, k).unwrap();
            for j in 0..=10usize {
                let i = j as isize - 1;
                for term in jump_formula_terms(r.table(), r.selection(), j).unwrap() {
                    let parity = (k as isize - 1 - (i - term.s)) as u32 % 2;
                    let expected = if parity == 0 { 1.0 } else { -1.0 };
                    assert!(
                        term.weight.signum() == expected,
                        "k={k} j={j} s={}: weight {}",
                        term.s,
                        term.weight
                    );
                }
            }
        }
    }

    #[test]
    fn point_value_reconstruction_interpolates_its_nodes() {
        let mesh = Arc::new(Mesh::uniform(0.0, 10.0, 10).unwrap());
        let vals: Vec<f64> = mesh.centers().iter().map(|&x| (1.3 * x).sin()).collect();
        let u = GridFunction::point_values(mesh.clone(), vals.clone(), BoundaryPolicy::ConstantExtension).unwrap();
        for k in 1..=4usize {
            let r = reconstruct(&u, k).unwrap();
            for i in 0..10isize {
                let p = r.polynomial(i);
                let s = r.selection().start(i);
                for m in 0..k as isize {
                    let node = s + m;
                    if node < 0 || node >= 10 {
                        continue;
                    }
                    let x = mesh.centers()[node as usize];
                    assert!(
                        (p.eval(x) - vals[node as usize]).abs() < 1e-11,
                        "k={k} cell {i} node {node}"
                    );
                }
            }
        }
    }

    #[test]
    fn limiter_form_matches_second_order_reconstruction() {
        let u = averages(
            &[0.3, -1.2, 0.8, 2.0, -0.4, 0.9, 0.1, -0.6, 1.4, 0.2],
            BoundaryPolicy::Periodic,
        );
        let slopes = limiter_form(&u).unwrap();
        let r = reconstruct(&u, 2).unwrap();
        let dx = u.mesh().widths()[0];
        for i in 0..10usize {
            let p = r.polynomial(i as isize);
            let eno_slope = p.monomial_coefficients()[1] * dx;
            assert!(
                (slopes[i] - eno_slope).abs() < 1e-12,
                "cell {i}: limiter {} vs stencil {}",
                slopes[i],
                eno_slope
            );
        }
    }

    #[test]
    fn limiter_zero_right_difference_gives_zero_slope() {
        let u = averages(&[0.0, 1.0, 1.0, 0.5], BoundaryPolicy::ConstantExtension);
        let slopes = limiter_form(&u).unwrap();
        assert_eq!(slopes[1], 0.0);
    }

    #[test]
    fn phi_examples() {
        assert_eq!(eno_phi(0.5), 0.5);
        assert_eq!(eno_phi(2.0), 1.0);
        assert_eq!(eno_phi(-3.0), 1.0);
        assert_eq!(eno_phi(-0.25), -0.25);
    }

    #[test]
    fn affine_data_maps_commute_with_reconstruction() {
        let vals = [0.3, -1.2, 0.8, 2.0, -0.4, 0.9, 0.1, -0.6, 1.4, 0.2];
        let mapped: Vec<f64> = vals.iter().map(|v| -1.5 * v + 0.7).collect();
        let u = averages(&vals, BoundaryPolicy::Periodic);
        let w = averages(&mapped, BoundaryPolicy::Periodic);
        for k in 1..=5usize {
            let ru = reconstruct(&u, k).unwrap();
            let rw = reconstruct(&w, k).unwrap();
            for i in 0..10isize {
                assert_eq!(ru.selection().start(i), rw.selection().start(i), "k={k} cell {i}");
                for t in 0..5 {
                    let x = i as f64 + t as f64 / 4.0;
                    let expect = -1.5 * ru.polynomial(i).eval(x) + 0.7;
                    let got = rw.polynomial(i).eval(x);
                    assert!((expect - got).abs() < 1e-12 * expect.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn mesh_maps_commute_with_reconstruction() {
        let vals = [0.3, -1.2, 0.8, 2.0, -0.4, 0.9, 0.1, -0.6];
        let mesh1 = Arc::new(Mesh::uniform(0.0, 8.0, 8).unwrap());
        let mesh2 = Arc::new(Mesh::uniform(2.0, 2.0 + 8.0 * 0.25, 8).unwrap()); // x -> 2 + x/4
        let u1 = GridFunction::cell_averages(mesh1, vals.to_vec(), BoundaryPolicy::Periodic).unwrap();
        let u2 = GridFunction::cell_averages(mesh2, vals.to_vec(), BoundaryPolicy::Periodic).unwrap();
        for k in 1..=5usize {
            let r1 = reconstruct(&u1, k).unwrap();
            let r2 = reconstruct(&u2, k).unwrap();
            for i in 0..8isize {
                assert_eq!(r1.selection().start(i), r2.selection().start(i));
                for t in 0..5 {
                    let x = i as f64 + t as f64 / 4.0;
                    let y = 2.0 + x * 0.25;
                    let a = r1.polynomial(i).eval(x);
                    let b = r2.polynomial(i).eval(y);
                    assert!((a - b).abs() < 1e-11 * a.abs().max(1.0), "k={k} cell {i}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn csv_dump_has_one_row_per_cell() {
        let u = averages(&[0.0, 1.0, 0.0, 2.0], BoundaryPolicy::Periodic);
        let r = reconstruct(&u, 3).unwrap();
        let csv = r.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], "i,s_i,r_i,v_plus_left,v_minus_right,c0,c1,c2");
    }

    #[test]
    fn rejects_unsupported_orders() {
        let u = averages(&[0.0, 1.0], BoundaryPolicy::Periodic);
        assert!(matches!(reconstruct(&u, 0), Err(EnoError::OrderUnsupported { k: 0 })));
        assert!(matches!(reconstruct(&u, 9), Err(EnoError::OrderUnsupported { k: 9 })));
    }
}
