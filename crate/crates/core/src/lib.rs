//! CLuP-based dual-deconvolution for a non-blind ISAC receiver.
//!
//! Given overlaid radar echoes and OFDM communications in the frequency
//! domain, jointly recover the radar channel (delays, Dopplers,
//! reflectivities) and the transmitted message. The solver stack is generic
//! over the real scalar type; `f64` aliases are exported at the crate root.

pub mod baseline;
pub mod clup;
pub mod error;
pub mod extract;
pub mod linop;
pub mod prox;
pub mod scalar;
pub mod scene;
pub mod snapshot;

pub use error::{Error, Result};
pub use scalar::{Cx, Scalar};

/// Default-precision aliases for the main types.
pub type C64 = num_complex::Complex<f64>;
pub type Scene64 = scene::Scene<f64>;
pub type SceneConfig64 = scene::SceneConfig<f64>;
pub type MeasurementSet64 = scene::MeasurementSet<f64>;
pub type ForwardOperator64 = linop::ForwardOperator<f64>;
pub type ProjectionToolkit64 = prox::ProjectionToolkit<f64>;
pub type ClupParams64 = clup::ClupParams<f64>;
pub type ClupState64 = clup::ClupState<f64>;
// pub type AdmmParams64 = baseline::AdmmParams<f64>;  // enabled as modules land
// pub type RecoveryReport64 = extract::RecoveryReport<f64>;  // enabled as modules land
// pub type PseudoSpectrum64 = extract::PseudoSpectrum<f64>;  // enabled as modules land

/// Single-precision aliases for the core model types.
pub type C32 = num_complex::Complex<f32>;
pub type Scene32 = scene::Scene<f32>;
pub type SceneConfig32 = scene::SceneConfig<f32>;
pub type ForwardOperator32 = linop::ForwardOperator<f32>;
