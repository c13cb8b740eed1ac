pub mod arith;
pub mod error;
pub mod linalg;
pub mod localfield;
pub mod qform;
pub mod weil;
pub mod etale;
pub mod classes;
pub mod gsnorm;
pub mod endoscopy;
pub mod params;
pub mod formats;
pub mod manifest;
pub mod cli;

pub use error::{Error, Result};
