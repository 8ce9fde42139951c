//! Simulation and analysis of a driven non-Hermitian two-band system: a
//! spin-orbit-coupled atom whose spin states suffer unequal loss.
//!
//! The control plane is `(q, g)`: normalized quasimomentum and normalized
//! loss contrast. Paths through this plane drive the state; the crate
//! evolves it, projects onto the biorthogonal eigenbasis, and predicts
//! where loss-driven nonadiabatic transitions happen.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below fix the scalar to `f64`.

// `!(x > 0)` deliberately rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod model;
pub mod path;
pub mod scalar;

pub use analysis::{
    adiabatic_b_approx, adiabatic_b_exact, first_sign_flip, nat_phase, point_source_diagram,
    predict_nat_radius, predicted_min_height, protocol_phase_diagram, speed_sweep, AdiabaticFrameInput,
    BoundaryPoint, NatPrediction, PhaseDiagram, PhaseDiagramSettings, PointSourceField, PointSourceSettings,
};
pub use dynamics::{
    band_observables, evolve, project, BandCoefficients, BandDiagnostics, InitialState, StepControl, Trajectory,
    TrajectorySample,
};
pub use error::{Error, Result};
pub use model::{
    physical_to_normalized, spin_polarization, ControlPoint, Eigensystem, Hamiltonian2, Model, NormalizedParams,
    PhysicalParams, TwoState,
};
pub use path::{Direction, Path, Protocol, Velocity};
pub use scalar::{Cplx, Real};

pub type C64 = num_complex::Complex64;
pub type Model64 = Model<f64>;
pub type ControlPoint64 = ControlPoint<f64>;
pub type Eigensystem64 = Eigensystem<f64>;
pub type TwoState64 = TwoState<f64>;
pub type Path64 = Path<f64>;
pub type Protocol64 = Protocol<f64>;
pub type Trajectory64 = Trajectory<f64>;
pub type TrajectorySample64 = TrajectorySample<f64>;
pub type BandCoefficients64 = BandCoefficients<f64>;
pub type InitialState64 = InitialState<f64>;
pub type StepControl64 = StepControl<f64>;
pub type NatPrediction64 = NatPrediction<f64>;
pub type PointSourceField64 = PointSourceField<f64>;
pub type PhaseDiagram64 = PhaseDiagram<f64>;
