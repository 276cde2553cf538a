pub mod cli;
pub mod error;
pub mod fixtures;
pub mod information;
pub mod model;
pub mod observables;
pub mod quadrature;
pub mod specfun;
pub mod spectrum;

pub use error::{Error, Result};
