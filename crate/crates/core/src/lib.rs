//! Linear moment models for half-space Knudsen-layer problems.
//!
//! The crate assembles the Hermite moment system `A w' = -Q w` on a reduced
//! index set, solves it in closed form with Maxwell-type wall conditions and
//! extracts slip and jump coefficients.
//!
//! ```
//! use knudsen_core::{run, CollisionModel, ProblemConfig, ProblemKind};
//!
//! let cfg = ProblemConfig::new(ProblemKind::TemperatureJump, 3, CollisionModel::Bgk);
//! let res = run(&cfg).unwrap();
//! assert!((res.coefficient - 1.12868).abs() < 1e-5);
//! ```
//!
//! Modules, bottom up:
//!
//! * [`index`]: multi-indices, canonical ordering, closed index sets;
//! * [`assembly`]: the matrices `A`, `Q` (BGK/Shakhov or user supplied), `S`;
//! * [`halfspace`]: the orthogonal reduction and the explicit solution;
//! * [`boundary`]: wall conditions and the joint solve for slip and amplitudes;
//! * [`problems`]: Kramers, thermal slip and temperature jump drivers;
//! * [`oracle`]: independent quadrature and residual checks.

pub mod assembly;
pub mod boundary;
pub mod error;
pub mod halfspace;
pub mod index;
pub mod linalg;
pub mod oracle;
pub mod problems;

pub use assembly::{
    assemble_collision_shakhov, assemble_halfflux, assemble_system, assemble_transport,
    CollisionModel, CollisionSource, MomentSystem,
};
pub use boundary::{
    b_chi, build_bc, build_custom_bc, build_grad_bc, build_new_bc, solve_boundary,
    wall_maxwellian_moments, BcKind, BoundarySolution, BoundarySpec, BoundarySystem,
};
pub use error::{Error, Result};
pub use halfspace::{
    decompose, evaluate_solution, generalized_modes, signature_counts, solve_halfspace, Counts,
    Decomposition, LayerSolution,
};
pub use index::{build_index_set, compare_indices, validate_c1, IndexSet, MultiIndex};
pub use linalg::{Matrix, Vector};
pub use oracle::{quadrature_s_entry, residual_norm, QuadratureRule};
pub use problems::{
    fit_log2_slope, run, run_kramers, run_temperature_jump, run_thermal_slip, sweep_orders,
    PreparedProblem, ProblemConfig, ProblemKind, ProblemResult, SweepRow,
};
