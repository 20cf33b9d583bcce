//! Complex dimensions of lattice self-similar fractal strings, possibly
//! degenerate ideal crystals, and their autocorrelation and diffraction
//! measures evaluated on Gaussian test functions.

pub mod correlation;
pub mod diffraction;
pub mod dirichlet;
pub mod error;
pub mod gaussian;
pub mod lattice;
pub(crate) mod linalg;
pub mod par;
pub mod scalar;
pub mod strings;

pub use correlation::{AutocorrelationValue, DisplacementTable};
pub use diffraction::{ContinuousComb, DiffractionValue, PsfReport};
pub use dirichlet::{DirichletPolynomial, RootSet, SolverConfig, StripBounds};
pub use error::{Error, Result};
pub use gaussian::{GaussianAtom, TestFunction};
pub use lattice::{IdealCrystal, LatticeBasis, Region};
pub use scalar::Scalar;
pub use strings::StringSpec;
