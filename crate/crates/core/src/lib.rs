//! Two-qubit entanglement purification, evaluated statistically.
//!
//! This crate bundles everything needed to score purification protocols on
//! (almost) uniformly drawn two-qubit density matrices:
//!
//! * dense complex linear algebra at 4x4 and 16x16 scale, with small
//!   special-purpose eigensolvers ([`linalg`], [`eig`]),
//! * Bell-basis state types, tensor products, partial traces and projective
//!   measurements ([`states`]),
//! * a hit-and-run Markov chain sampling the 15-dimensional convex body of
//!   two-qubit states ([`sampler`], [`dump`]),
//! * the Bennett, Deutsch, MFI-based and CNOT-based recurrence protocols,
//!   both as closed-form maps on Bell coefficients and as 16x16 circuit
//!   references ([`protocols`]),
//! * concurrence, conditional fidelities and sample statistics ([`metrics`]),
//! * an SU(4)xSU(4) Euler-angle variational protocol with an analytic
//!   gradient and a box-bounded L-BFGS optimizer ([`variational`],
//!   [`euler`], [`lbfgsb`], [`adaptive`]).
//!
//! All state types are immutable after construction and all operations are
//! pure functions, so everything can be mapped over samples in parallel.

pub mod adaptive;
pub mod dump;
pub mod eig;
pub mod error;
pub mod euler;
pub mod gellmann;
pub mod lbfgsb;
pub mod linalg;
pub mod metrics;
pub mod protocols;
pub mod sampler;
pub mod states;
pub mod variational;

pub use error::Error;
pub use linalg::{ComplexMatrix, C64};
pub use metrics::{concurrence, Histogram, IterationStats};
pub use protocols::{Attractor, ProtocolKind, StepResult};
pub use sampler::{BlochVector, ChainConfig, ChainState};
pub use states::{DensityMatrix, MeasurementProjector, PairState};
pub use variational::{EulerAngles, MeasurementPolicy, RoundOperation, RoundPlan};
