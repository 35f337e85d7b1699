//! Open Toda lattice, its explicit action-angle map, and the dual many-body
//! system.
//!
//! The crate is organized around the two gauge slices of the reduced phase
//! space of `T*GL(n, ℝ)`:
//!
//! - [`toda`]: the Toda phase space `(q, p)`, Lax matrix, commuting
//!   Hamiltonians and a Störmer–Verlet integrator.
//! - [`gauge`]: Moser variables `(p̂, w)`, the matrix `Γ`, Iwasawa
//!   factorization, the gauge transform between slices, the Hankel moment
//!   matrix and its Cauchy–Binet minors, moment map and invariant Hamiltonians.
//! - [`duality`]: action-angle variables `(p̂, q̂)`, the map `R` and its
//!   inverse, the dual Hamiltonian `Ĥ = σ₁`, and exact flows of both systems.
//! - [`verify`]: seeded randomized checks of every identity relating the above.
//! - [`io`]: JSON state documents and trajectory CSV used by the command line tool.
//! - [`cli`]: the `toda-duality` command line interface.
//!
//! ```
//! use toda_duality::{aa_to_toda, ActionAngleState, ToleranceConfig};
//!
//! let tol = ToleranceConfig::default();
//! let a = ActionAngleState::new(vec![1.0, 0.0], vec![0.0, 0.0], &tol).unwrap();
//! let s = aa_to_toda(&a, &tol).unwrap();
//! assert!((s.q()[1] - 2f64.ln()).abs() < 1e-12);
//! assert!((s.p()[0] + 0.5).abs() < 1e-12);
//! ```

pub mod cli;
pub mod config;
pub mod duality;
pub mod error;
pub mod gauge;
pub mod io;
pub mod matlin;
mod subsets;
pub mod toda;
pub mod verify;

pub use config::ToleranceConfig;
pub use duality::{
    aa_to_toda, aa_to_toda_direct, aa_to_toda_gauge, angles_from_w, dual_flow_exact, dual_flow_numeric,
    dual_hamiltonian, dual_vector_field, sigma, sigma_dot, toda_flow_exact, toda_to_aa, w_from_angles,
    ActionAngleState,
};
pub use error::{Error, Result};
pub use gauge::{
    gamma, hankel, invariant_hamiltonians, iwasawa_of_gamma_inverse, minors_cauchy_binet, moment_map, moser_to_toda,
    resolvent, toda_to_moser, BigPhasePoint, IwasawaFactors, MoserState,
};
pub use matlin::SquareMatrix;
pub use toda::{
    commuting_hamiltonians, hamiltonian, lax_matrix, toda_vector_field, verlet_flow, TodaState, Trajectory,
};
