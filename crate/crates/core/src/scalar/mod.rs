//! Exact scalars: cyclotomic rationals, Laurent series in ħ and truncated
//! series in an auxiliary parameter.

pub mod cyclo;
pub mod hbar;
pub mod trunc;

pub use cyclo::{rat, rat_int, CycloScalar, Rational};
pub use hbar::HbarSeries;
pub use trunc::TruncSeries;
