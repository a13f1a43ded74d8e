//! Randomized structural invariants of the reconstruction pipeline.

use std::sync::Arc;

use eno_core::divided_differences::primitive_oracle_max_rel_error;
use eno_core::mesh::{BoundaryPolicy, GridFunction, Mesh};
use eno_core::reconstruction::{jump_formula, reconstruct};
use eno_core::stability::{check_sign_property, default_zero_tol};
use proptest::prelude::*;

fn order_and_values() -> impl Strategy<Value = (usize, Vec<f64>)> {
    (1usize..=6).prop_flat_map(|k| {
        (
            Just(k),
            prop::collection::vec(-1.0f64..1.0, (4 * k + 4)..48),
        )
    })
}

fn grid(values: &[f64]) -> GridFunction {
    let mesh = Arc::new(Mesh::uniform(0.0, 1.0, values.len()).unwrap());
    GridFunction::cell_averages(mesh, values.to_vec(), BoundaryPolicy::Periodic).unwrap()
}

proptest! {
    #[test]
    fn stencils_stay_admissible((k, values) in order_and_values()) {
        let u = grid(&values);
        let r = reconstruct(&u, k).unwrap();
        let n = values.len() as isize;
        for i in -1..=n {
            let hist = r.selection().history(i);
            prop_assert_eq!(hist.len(), k);
            for (l, &s) in hist.iter().enumerate() {
                prop_assert!(s <= i && i <= s + l as isize, "stencil must contain its cell");
            }
            for w in hist.windows(2) {
                prop_assert!(w[1] == w[0] || w[1] == w[0] - 1, "stencil grows one cell at a time");
            }
        }
    }

    #[test]
    fn averages_are_preserved((k, values) in order_and_values()) {
        let u = grid(&values);
        let r = reconstruct(&u, k).unwrap();
        let xs = u.mesh().interfaces();
        for i in 0..values.len() {
            let avg = r.polynomial(i as isize).average_over(xs[i], xs[i + 1]);
            prop_assert!(
                (avg - values[i]).abs() <= 1e-12,
                "cell {}: polynomial average {} vs stored {}", i, avg, values[i]
            );
        }
    }

    #[test]
    fn newton_and_monomial_evaluations_agree((k, values) in order_and_values()) {
        let u = grid(&values);
        let r = reconstruct(&u, k).unwrap();
        let xs = u.mesh().interfaces();
        for i in 0..values.len() {
            let p = r.polynomial(i as isize);
            for m in 0..=4 {
                let x = xs[i] + (xs[i + 1] - xs[i]) * m as f64 / 4.0;
                let a = p.eval(x);
                let b = p.eval_newton(x);
                prop_assert!((a - b).abs() <= 1e-10 * (a.abs() + 1.0));
            }
        }
    }

    #[test]
    fn interface_jumps_never_flip_sign((k, values) in order_and_values()) {
        let u = grid(&values);
        let report = check_sign_property(&u, k, default_zero_tol(&u)).unwrap();
        prop_assert_eq!(report.violation_count, 0, "violations: {:?}", report.violations);
    }

    #[test]
    fn closed_form_jump_matches_the_traces((k, values) in order_and_values()) {
        let u = grid(&values);
        let r = reconstruct(&u, k).unwrap();
        for t in r.traces() {
            let formula = jump_formula(r.table(), r.selection(), t.index).unwrap();
            prop_assert!(
                (formula - t.recon_jump).abs() <= 1e-9 * (t.recon_jump.abs() + 1e-3),
                "interface {}: formula {} vs traced {}", t.index, formula, t.recon_jump
            );
        }
    }

    #[test]
    fn reconstruction_commutes_with_affine_data_maps((k, values) in order_and_values(), a in -2.0f64..2.0, b in -1.0f64..1.0) {
        let u = grid(&values);
        let mapped: Vec<f64> = values.iter().map(|&v| a * v + b).collect();
        let w = grid(&mapped);
        let ru = reconstruct(&u, k).unwrap();
        let rw = reconstruct(&w, k).unwrap();
        let scale = values.iter().fold(1.0f64, |m, &v| m.max(v.abs()));
        for (tu, tw) in ru.traces().iter().zip(rw.traces()) {
            prop_assert!(
                (a * tu.v_minus + b - tw.v_minus).abs() <= 1e-10 * (a.abs() * scale + b.abs() + 1.0),
                "interface {}: affine image mismatch", tu.index
            );
        }
    }

    #[test]
    fn average_tables_match_the_primitive((k, values) in order_and_values()) {
        let u = grid(&values);
        let err = primitive_oracle_max_rel_error(&u, k).unwrap();
        prop_assert!(err <= 1e-12, "oracle disagreement {}", err);
    }

    #[test]
    fn first_order_traces_are_the_averages(values in prop::collection::vec(-1.0f64..1.0, 8..48)) {
        let u = grid(&values);
        let r = reconstruct(&u, 1).unwrap();
        let n = values.len();
        for t in r.traces() {
            let left = values[(t.index + n - 1) % n];
            let right = values[t.index % n];
            prop_assert_eq!(t.v_minus, left);
            prop_assert_eq!(t.v_plus, right);
        }
    }
}
