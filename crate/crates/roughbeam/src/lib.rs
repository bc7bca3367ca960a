//! Pulsed beam reflection and transmission at a weakly rough interface
//! between two half-spaces, in the paraxial white-noise regime.
//!
//! The crate provides
//! - closed-form specular wavefronts for flat and homogenized interfaces,
//! - a Monte Carlo phase-screen solver for rough-interface realizations,
//! - speckle covariance kernels and Gaussianity statistics,
//! - generalized reflection/transmission angle laws,
//! - ensemble orchestration with deterministic seeding and CSV/binary output.

pub mod error;
pub mod fftops;
pub mod grid;
pub mod interface;
pub mod lin;
pub mod medium;
pub mod snell;
pub mod solver;
pub mod source;
pub mod specular;

pub use error::{Error, Result};
pub use grid::{LateralGrid, OmegaGrid};
pub use interface::{
    CorrelationShape, FieldSynthesizer, InterfaceModel, InterfaceRealization,
    ScatteringDistribution,
};
pub use medium::{MediumConfig, MediumIndex, ObservationGeometry, ParaxialMatrix, ScaleRegime};
pub use snell::{ExpansionPoint, ScatterSide, SnellQuery};
pub use solver::{
    jump_condition_check, simulate_reflected, simulate_transmitted, window_specular, Direction,
    Frame, JumpResiduals, LateralRep, ScreenSource, SolverGrid, WaveField, Wavefront, WindowSpec,
};
pub use source::{BeamParams, ModeCheck, SourceProfile};
pub use specular::{
    flat_specular_wavefront, homogenized_specular_by_convolution, homogenized_specular_prediction,
    path_spreading_matrix, random_specular_prediction, rel_l2, specular_prefactor,
    travel_time_scale, RandomSpecularPrediction, SurfaceField,
};
