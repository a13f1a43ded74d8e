//! Essentially non-oscillatory (ENO) reconstruction on one-dimensional meshes,
//! together with the machinery needed to exercise its stability properties:
//! divided-difference tables, adaptive stencil selection, interface jump
//! analysis, randomized property checkers, and finite-volume solvers built on
//! monotone and entropy-stable numerical fluxes.
//!
//! The crate is organized bottom-up:
//!
//! - [`mesh`]: meshes, grid functions, quadrature-based sampling, primitives.
//! - [`divided_differences`]: divided-difference tables of cell averages
//!   (via the primitive function identity) and of point values.
//! - [`reconstruction`]: stencil selection, Newton-form cell polynomials,
//!   interface traces, the closed-form jump expression, and the second-order
//!   limiter form.
//! - [`stability`]: property checkers (sign property, jump-size bounds,
//!   worst-case families, shock monotonicity, total variation of the
//!   reconstruction) and randomized suites.
//! - [`fvm`]: flux laws, monotone and entropy-stable fluxes, SSP time
//!   integrators, and diagnostics.

pub mod divided_differences;
pub mod error;
pub mod fvm;
pub mod mesh;
pub mod reconstruction;
pub mod stability;

pub use error::{EnoError, Result, MAX_ORDER};
pub use fvm::{
    solve, FluxKind, FluxLaw, MonotoneFluxKind, SchemeConfig, SolveRun, TimeIntegrator,
};
pub use mesh::{BoundaryPolicy, GridFunction, Mesh, PrimitiveTrace, Semantics};
pub use reconstruction::{reconstruct, CellPolynomial, InterfaceTrace, Reconstruction, StencilSelection};
