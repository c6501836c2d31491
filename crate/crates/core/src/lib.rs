pub mod error;
pub mod fourier;
pub mod functions;
pub mod gamma;
pub mod io;
pub mod riesz;
pub mod soliton;
pub mod spectral;

pub use error::{Error, Result};
