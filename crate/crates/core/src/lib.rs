//! Laplace deconvolution on a finite interval through Laguerre-function
//! expansions, with penalized selection of the expansion size.

pub mod baselines;
pub mod cli;
pub mod coeffs;
pub mod deconvolve;
pub mod error;
pub mod laguerre;
pub mod quadrature;
pub mod simbench;
pub mod toeplitz;

pub use coeffs::CoeffVector;
pub use error::{Error, Result};
pub use laguerre::{LaguerreContext, SampleGrid};
pub use toeplitz::ToeplitzLT;
