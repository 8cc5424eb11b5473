//! Simulation and optical homodyne tomography of conditionally generated
//! Schrödinger-cat states of a single light mode.

pub mod circuit;
pub mod error;
pub mod experiment;
pub mod fock;
pub mod grid;
pub mod quadrature;
pub mod spline;
pub mod tomography;
pub mod wigner;

pub use num_complex::Complex64 as C64;

pub use circuit::{make_cat, make_ghz, BellState, CatNormalization, CatSign, CatSpec};
pub use error::{Error, Result};
pub use experiment::{find_minimum, monte_carlo_study, MinimumReport, NoiseSpec, SearchMode, SearchRegion, TomographySetup};
pub use fock::FockVector;
pub use grid::AxisSpec;
pub use quadrature::QuadratureTable;
pub use tomography::{ReconstructionConfig, Reconstructor};
pub use wigner::{Convention, Superposition, WignerFunction, WignerGrid};
