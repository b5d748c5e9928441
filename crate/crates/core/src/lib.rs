//! Rotor/spin-wave (RSW) dynamics of U(1)-symmetric XXZ spin lattices.
//!
//! A quench from the coherent state polarized along `x` is split into two
//! decoupled sectors:
//!
//! * the zero-momentum rotor, a one-axis-twisting model for an angular
//!   momentum of length `N S` ([`rotor`]);
//! * linear spin waves at finite momentum, evolved in closed form from the
//!   bosonic vacuum ([`spinwave`]).
//!
//! [`observables`] and [`entropy`] recombine the two sectors into collective
//! moments, squeezing, correlation maps and Rényi-2 entropies, and [`ed`]
//! provides the exact small-`N` reference used to calibrate the rotor inertia
//! and to check the decomposition.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod ed;
pub mod entropy;
mod error;
pub mod lattice;
pub mod math;
pub mod observables;
pub mod rotor;
pub mod spinwave;

pub use error::{Error, Result};

pub use num_complex::Complex64;

pub mod prelude {
    pub use crate::ed::{EdState, ExactPropagator, Propagation, XxzHamiltonian};
    pub use crate::entropy::Region;
    pub use crate::lattice::{DistanceConvention, Geometry, LatticeModel, LatticeSpec, SpinLength};
    pub use crate::observables::{DynamicsContext, ObservableRecord, RecordOptions, Split};
    pub use crate::rotor::{Inertia, InertiaSet, RotorState, TosReference};
    pub use crate::spinwave::{SwCoefficients, SwModeSet};
    pub use crate::{Complex64, Error, Result};
}
