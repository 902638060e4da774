//! Exact diagonalization of small dipolar-coupled spin-1/2 clusters:
//! thermodynamics and nearest-pair concurrence over positive and negative
//! inverse temperatures.
//!
//! The pipeline is
//! [`build`](hamiltonian::build) → [`hermitian_eigendecomposition`] →
//! [`thermal_state`] → [`partial_trace`] → [`concurrence`], with
//! [`Scanner`] reusing one eigendecomposition across whole sweeps.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod entanglement;
pub mod error;
pub mod hamiltonian;
pub mod scan;
pub mod spin_ops;
pub mod thermo;

pub use entanglement::{
    concurrence, partial_trace, spin_flip, thermal_concurrence, Concurrence, ConcurrencePoint, PairReduction,
    TwoSpinState,
};
pub use error::{Error, Result};
pub use hamiltonian::{
    build, build_full_dipolar, build_secular, build_transverse, coupling_constant, DipolarForm, Geometry, Preset,
    SpinSystem, ZeemanRatio,
};
pub use scan::threshold::{Side, ThresholdResult, ThresholdSearch, ThresholdSide};
pub use scan::units::{
    dimensionless_from_physical, estimate_entanglement_temperature, Dimensionless, Length, PhysicalParams,
};
pub use scan::{EntropyEnergyPoint, Execution, Scanner, SweepGrid};
pub use spin_ops::{embed, hermitian_eigendecomposition, single_spin_operator, Axis, ManyBodyOperator, Spectrum};
pub use thermo::{thermal_state, ThermalState, ThermoPoint};
