//! Fourier fingerprints of parameterized quantum circuit models.
//!
//! The crate simulates data re-uploading circuits exactly, extracts the
//! Fourier coefficients of their outputs, and measures how strongly those
//! coefficients are correlated under random parameters (the fingerprint and
//! its average, the FCC). Expressibility, regression training on random
//! Fourier series and a small jet-momentum regression pipeline are provided
//! to compare the metric against model performance.

pub mod circuit;
pub mod error;
pub mod expressibility;
pub mod fingerprint;
pub mod fourier_data;
pub mod hep;
pub mod preset;
pub mod seed;
pub mod spectral;
pub mod statevec;
pub mod trainer;

pub use circuit::{AnsatzKind, CompiledModel, ModelSpec, Observable};
pub use error::{Error, Result};
pub use expressibility::{ExpressibilityResult, FidelityHistogram};
pub use fingerprint::{CoefficientSamples, CorrelationMode, Fingerprint, Weighting};
pub use fourier_data::{FourierSeriesTarget, RegressionDataset};
pub use hep::{EventRecord, HepConfig, HepReport};
pub use preset::Preset;
pub use spectral::{CoefficientTensor, InputGrid};
pub use trainer::{GradientMethod, GridConfig, GridTable, TrainConfig, TrainResult};
pub use statevec::{fidelity, Axis, Gate, StateVector};
