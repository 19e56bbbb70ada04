//! The three proposed experimental signatures: sequential-measurement bounds
//! and their many-copy violation, harmonic spectroscopy of rotation
//! readouts, and the three-state interference functional.

mod born;
mod sequential;
mod sorkin;
mod spectral;

pub use born::{
    born_probability, jittered_signal, multi_copy_projection_probability, HarmonicModel,
};
pub use sequential::{
    hadamard, sequential_bound, sequential_many_copy, sequential_single_copy, ManyCopyOutcome,
    UnsharpMeasurement,
};
pub use sorkin::{
    observables, sorkin_functional, two_copy_closed_form, SorkinCopies, ThreeStateConfig,
};
pub use spectral::{spectrum, spectrum_padded, Peak, Spectrum, Window};
