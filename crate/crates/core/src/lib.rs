//! Non-crossing permutations in a disc and in a two-circle annulus, together
//! with the exact trace-moment combinatorics of complex Wishart and GUE
//! random matrices that those permutations enumerate.
//!
//! The crate is organized bottom-up:
//!
//! * [`permcore`] — ground sets, permutations, cycle notation, orbits,
//!   induced permutations and Cayley-graph distances;
//! * [`partitions`] — set partitions, the refinement poset and its Möbius
//!   function, disc crossing tests;
//! * [`disc_nc`] — disc non-crossing permutations (standardness, crossing
//!   patterns, the geodesic characterization, enumeration);
//! * [`annular_nc`] — annular non-crossing permutations: standardness, the
//!   three annular crossing patterns, membership, Kreweras complementation,
//!   closed-form counts, partition fibers and the parity-doubling bijection;
//! * [`moments`] — exact finite-size Wishart/GUE trace moments, classical
//!   cumulants by Möbius inversion, connected-sum cumulants, and the
//!   polynomial-in-`c` limits;
//! * [`matrixsim`] — Monte Carlo ground truth: complex Gaussian sampling,
//!   Wishart/GUE ensembles, trace-statistic estimators with standard errors;
//! * [`verify`] — the one-shot verification suite run by the CLI and by the
//!   acceptance tests.
//!
//! Everything enumerative is exact: finite-size moments are arbitrary
//! precision rationals, counts are big integers, and floating point appears
//! only in the Monte Carlo estimators and in decay-rate diagnostics.

pub mod annular_nc;
pub mod disc_nc;
pub mod matrixsim;
pub mod moments;
pub mod partitions;
pub mod permcore;
pub mod verify;

pub use num_bigint::BigInt;
pub use num_rational::BigRational;
