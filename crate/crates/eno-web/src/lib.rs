//! WebAssembly bindings for the browser demo: JSON-producing wrappers around
//! reconstruction, the worst-case families, and the quartic-sine instability
//! run. Compiled to wasm the functions are exported to JavaScript; compiled
//! natively they back the host-side tests.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;
use wasm_bindgen::prelude::*;

use eno_core::divided_differences::DividedDifferenceTable;
use eno_core::fvm::{solve, FluxKind, FluxLaw, MonotoneFluxKind, SchemeConfig, TimeIntegrator};
use eno_core::mesh::{sample_averages, BoundaryPolicy, GridFunction, Mesh};
use eno_core::reconstruction::reconstruct;
use eno_core::stability::{jump_ratios, uniform_jump_bound, worst_case, PiecewiseFunction};

const SAMPLES_PER_CELL: usize = 16;

#[derive(Serialize)]
struct ReconstructionView {
    k: usize,
    n: usize,
    interfaces: Vec<f64>,
    centers: Vec<f64>,
    values: Vec<f64>,
    /// Leftmost stencil cell per physical cell.
    stencil_start: Vec<i64>,
    /// Position of each cell inside its stencil.
    offsets: Vec<usize>,
    /// Dense polynomial samples, `samples_per_cell` per physical cell.
    sample_x: Vec<f64>,
    sample_y: Vec<f64>,
    samples_per_cell: usize,
    /// One-sided interface values `(x, v_minus, v_plus)`.
    trace_x: Vec<f64>,
    trace_minus: Vec<f64>,
    trace_plus: Vec<f64>,
}

fn build_view(u: &GridFunction, k: usize) -> Result<ReconstructionView, String> {
    let r = reconstruct(u, k).map_err(|e| e.to_string())?;
    let mesh = u.mesh();
    let n = u.len();
    let xs = mesh.interfaces();
    let mut sample_x = Vec::with_capacity(n * SAMPLES_PER_CELL);
    let mut sample_y = Vec::with_capacity(n * SAMPLES_PER_CELL);
    for i in 0..n {
        let p = r.polynomial(i as isize);
        for m in 0..SAMPLES_PER_CELL {
            let t = (m as f64 + 0.5) / SAMPLES_PER_CELL as f64;
            let x = xs[i] + (xs[i + 1] - xs[i]) * t;
            sample_x.push(x);
            sample_y.push(p.eval(x));
        }
    }
    Ok(ReconstructionView {
        k,
        n,
        interfaces: xs.to_vec(),
        centers: mesh.centers().to_vec(),
        values: u.values().to_vec(),
        stencil_start: (0..n).map(|i| r.selection().start(i as isize) as i64).collect(),
        offsets: (0..n).map(|i| r.selection().offset(i as isize)).collect(),
        sample_x,
        sample_y,
        samples_per_cell: SAMPLES_PER_CELL,
        trace_x: r.traces().iter().map(|t| t.x).collect(),
        trace_minus: r.traces().iter().map(|t| t.v_minus).collect(),
        trace_plus: r.traces().iter().map(|t| t.v_plus).collect(),
    })
}

fn preset_data(name: &str, n: usize) -> Result<GridFunction, String> {
    let mesh = Arc::new(Mesh::uniform(0.0, 2.0 * PI, n).map_err(|e| e.to_string())?);
    match name {
        "pulse-sine" => {
            let v =
                PiecewiseFunction::pulse_plus_sine(2.0 * PI * 5.0 / 32.0, 2.0 * PI * 21.0 / 32.0);
            v.sample(&mesh, 10).map_err(|e| e.to_string())
        }
        "sine" => Ok(sample_averages(f64::sin, &mesh, 10, BoundaryPolicy::Periodic)),
        "sin4" => Ok(sample_averages(
            |x| x.sin().powi(4),
            &mesh,
            10,
            BoundaryPolicy::Periodic,
        )),
        "step" => {
            let v = PiecewiseFunction::square_pulse(2.0 * PI * 5.0 / 32.0, 2.0 * PI * 21.0 / 32.0);
            v.sample(&mesh, 10).map_err(|e| e.to_string())
        }
        other => Err(format!("unknown preset {other:?}")),
    }
}

fn reconstruct_preset_impl(preset: &str, k: usize, n: usize) -> Result<String, String> {
    let u = preset_data(preset, n)?;
    let view = build_view(&u, k)?;
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

fn reconstruct_values_impl(values: Vec<f64>, k: usize) -> Result<String, String> {
    let mesh =
        Arc::new(Mesh::uniform(0.0, 2.0 * PI, values.len()).map_err(|e| e.to_string())?);
    let u = GridFunction::cell_averages(mesh, values, BoundaryPolicy::Periodic)
        .map_err(|e| e.to_string())?;
    let view = build_view(&u, k)?;
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

/// Reconstructs one of the named presets (`pulse-sine`, `sine`, `sin4`,
/// `step`) at order `k` on `n` cells and returns the drawing data as JSON.
#[wasm_bindgen]
pub fn reconstruct_preset_json(preset: &str, k: usize, n: usize) -> Result<String, JsError> {
    reconstruct_preset_impl(preset, k, n).map_err(|e| JsError::new(&e))
}

/// Reconstructs caller-supplied periodic cell averages at order `k`.
#[wasm_bindgen]
pub fn reconstruct_values_json(values: Vec<f64>, k: usize) -> Result<String, JsError> {
    reconstruct_values_impl(values, k).map_err(|e| JsError::new(&e))
}

#[derive(Serialize)]
struct WorstCaseView {
    k: usize,
    eps: f64,
    constant: f64,
    ratio: f64,
    rel_gap: f64,
    centers: Vec<f64>,
    values: Vec<f64>,
    /// Interface index and jump ratio per interior interface of the
    /// attaining orientation.
    ratio_index: Vec<usize>,
    ratio_value: Vec<f64>,
}

fn worst_case_impl(k: usize, eps: f64) -> Result<String, String> {
    let constant =
        uniform_jump_bound(k).ok_or_else(|| "no tabulated constant for this k".to_string())?;
    let (family, ratio) = worst_case(k, eps).map_err(|e| e.to_string())?;
    let plain = family.grid_function();
    let mirrored = family.mirrored_grid_function();
    let plain_max = jump_ratios(&plain, k)
        .map_err(|e| e.to_string())?
        .into_iter()
        .map(|(_, r)| r)
        .fold(0.0f64, f64::max);
    let attaining = if plain_max >= ratio - 1e-12 { plain } else { mirrored };
    let ratios = jump_ratios(&attaining, k).map_err(|e| e.to_string())?;
    let view = WorstCaseView {
        k,
        eps,
        constant,
        ratio,
        rel_gap: (ratio - constant).abs() / constant,
        centers: attaining.mesh().centers().to_vec(),
        values: attaining.values().to_vec(),
        ratio_index: ratios.iter().map(|&(j, _)| j).collect(),
        ratio_value: ratios.iter().map(|&(_, r)| r).collect(),
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

/// Evaluates the order-`k` worst-case family at the given `eps` and returns
/// the attaining orientation with its per-interface jump ratios as JSON.
#[wasm_bindgen]
pub fn worst_case_json(k: usize, eps: f64) -> Result<String, JsError> {
    worst_case_impl(k, eps).map_err(|e| JsError::new(&e))
}

#[derive(Serialize)]
struct InstabilityView {
    n: usize,
    k: usize,
    times: Vec<f64>,
    centers: Vec<f64>,
    /// One solution vector per snapshot.
    states: Vec<Vec<f64>>,
    /// Magnitude of the level-4 divided differences per snapshot.
    level4: Vec<Vec<f64>>,
    /// Stencil offsets per snapshot.
    offsets: Vec<Vec<usize>>,
    growth_near_zero: f64,
}

fn advection_sin4_impl(n: usize, t_end: f64) -> Result<String, String> {
    
    if !(0.0..=1.0).contains(&t_end) {
        return Err("t_end must lie in [0, 1]".to_string());
    }
    let mesh = Arc::new(Mesh::uniform(-PI, PI, n).map_err(|e| e.to_string())?);
    let u0 = sample_averages(|x| x.sin().powi(4), &mesh, 12, BoundaryPolicy::Periodic);
    let cfg = SchemeConfig {
        law: FluxLaw::Advection { speed: 1.0 },
        order: 4,
        flux: FluxKind::Monotone(MonotoneFluxKind::Godunov),
        integrator: TimeIntegrator::Rk4,
        cfl: 0.4,
        c_min: 0.0,
        c_max: 0.0,
        t_end,
        snapshot_times: vec![0.0, 0.5 * t_end, t_end],
    };
    let run = solve(&u0, &cfg).map_err(|e| e.to_string())?;
    let centers = mesh.centers().to_vec();
    let mut view = InstabilityView {
        n,
        k: 4,
        times: Vec::new(),
        centers: centers.clone(),
        states: Vec::new(),
        level4: Vec::new(),
        offsets: Vec::new(),
        growth_near_zero: 0.0,
    };
    let mut near_zero = Vec::new();
    for (t, u) in &run.snapshots {
        let table = DividedDifferenceTable::build(u, 4).map_err(|e| e.to_string())?;
        let d4: Vec<f64> = (0..n).map(|i| table.entry(4, i as isize).abs()).collect();
        near_zero.push(
            (0..n)
                .filter(|&i| centers[i].abs() <= 0.4)
                .map(|i| d4[i])
                .fold(0.0f64, f64::max),
        );
        let r = reconstruct(u, 4).map_err(|e| e.to_string())?;
        view.times.push(*t);
        view.states.push(u.values().to_vec());
        view.level4.push(d4);
        view.offsets
            .push((0..n).map(|i| r.selection().offset(i as isize)).collect());
    }
    if let (Some(&first), Some(&last)) = (near_zero.first(), near_zero.last()) {
        if first > 0.0 {
            view.growth_near_zero = last / first;
        }
    }
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

/// Advects `sin^4(x)` with the order-4 scheme to `t_end` and returns the
/// snapshots, level-4 divided-difference magnitudes, and stencil offsets as
/// JSON.
#[wasm_bindgen]
pub fn advection_sin4_json(n: usize, t_end: f64) -> Result<String, JsError> {
    advection_sin4_impl(n, t_end).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reconstruction_view_has_consistent_shapes() {
        let json = reconstruct_preset_impl("pulse-sine", 3, 48).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["n"], 48);
        assert_eq!(v["k"], 3);
        assert_eq!(v["interfaces"].as_array().unwrap().len(), 49);
        assert_eq!(v["sample_x"].as_array().unwrap().len(), 48 * 16);
        assert_eq!(v["trace_x"].as_array().unwrap().len(), 49);
        for off in v["offsets"].as_array().unwrap() {
            assert!(off.as_u64().unwrap() < 3);
        }
    }

    #[test]
    fn custom_values_round_trip() {
        let json = reconstruct_values_impl(vec![0.0, 1.0, 0.5, -0.5, 0.2, 0.9], 2).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["values"].as_array().unwrap().len(), 6);
    }

    #[test]
    fn worst_case_view_reports_the_known_constant() {
        let json = worst_case_impl(2, 1e-8).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["constant"], 2.0);
        let ratio = v["ratio"].as_f64().unwrap();
        assert!((ratio - 2.0).abs() < 1e-6, "ratio {ratio}");
        let max_listed = v["ratio_value"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_f64().unwrap())
            .fold(0.0f64, f64::max);
        assert!((max_listed - ratio).abs() < 1e-12);
    }

    #[test]
    fn instability_view_shows_the_growth() {
        let json = advection_sin4_impl(128, 0.04).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["times"].as_array().unwrap().len(), 3);
        assert_eq!(v["states"].as_array().unwrap().len(), 3);
        let growth = v["growth_near_zero"].as_f64().unwrap();
        assert!(growth >= 2.0, "growth {growth}");
    }

    #[test]
    fn bad_inputs_are_rejected() {
        assert!(reconstruct_preset_impl("nope", 2, 32).is_err());
        assert!(worst_case_impl(7, 1e-8).is_err());
        assert!(advection_sin4_impl(64, 5.0).is_err());
    }
}
