//! Hochschild cocycles on the Weyl algebra: the slot operators, the cocycle
//! `τ_{2k}`, the twisted trace `tr_γ` and their external product `τ^γ_{2k}`.

pub mod simplex;
pub mod slots;
pub mod tau;
pub mod trace;
pub mod twisted;
