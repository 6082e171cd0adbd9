//! Lie-algebra cochains on `gl_N(𝕎)`: the cocycles `Θ`, the projection onto
//! `𝔥`, its curvature, the Chern–Weil map and the local Riemann–Roch check.

pub mod chern_weil;
pub mod local_rr;
pub mod matrix;
pub mod theta;

pub use chern_weil::{chern_weil_chi, curvature_c, generating_s, projection_pr, CartanElement, GeneratingFunction, HComponents};
pub use local_rr::{verify_local_rr, LocalRr, LocalRrReport, RrChoice, MAX_FIXED_PAIRS};
pub use matrix::MatrixWeyl;
pub use theta::{matrix_trace_chain, phi_n, ThetaCocycle};
