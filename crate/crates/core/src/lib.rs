//! Generalized coherent states of the Gol'dman-Krivchenkov Hamiltonian built
//! from Meixner-Pollaczek coefficients, with every closed form paired with an
//! independent numerical route.

pub mod cli;
pub mod coherent;
pub mod error;
pub mod gk_model;
pub mod quadrature;
pub mod resolution;
pub mod series;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
pub use series::SeriesEval;
