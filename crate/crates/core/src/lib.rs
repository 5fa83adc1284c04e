//! Weighted pair-partition moments and their random-matrix realisation.
//!
//! * [`pairings`] enumerates pairings of `{1, ..., 2k}` and sums their
//!   weights `prod V(m - l)` by brute force.
//! * [`polynomial`] holds exact moment polynomials in the weight `p`.
//! * [`qcatalan`] builds the non-crossing table `B_k(p)` and the
//!   q-Catalan-type family `phi_k(x)` by recurrence.
//! * [`scalar_moments`] computes the same sums for the geometric kernel by an
//!   open-arc dynamic program, exactly or in log space, and studies their
//!   growth rate.
//! * [`rmt_sim`] samples correlated GOE families and estimates normalised
//!   trace moments by Monte Carlo.

pub mod cli;
pub mod combinatorics;
pub mod error;
pub mod kernel;
pub mod pairings;
pub mod polynomial;
pub mod qcatalan;
pub mod rmt_sim;
pub mod scalar_moments;
pub mod selfcheck;

pub use error::{Error, Result};
pub use kernel::KernelSpec;
pub use pairings::{enumerate, EnumerationCaps, Pairing, PairingClass};
pub use polynomial::WeightPoly;
pub use qcatalan::{bk_recurrence, phi_recurrence, BkTable, PhiTable};
pub use rmt_sim::{MomentEstimate, RmtConfig};
pub use scalar_moments::Backend;
