//! Entropy-rate estimation for finite-state, time-homogeneous Markov processes.
//!
//! The crate is organised around the estimation pipeline:
//!
//! - [`markov`]: alphabets, sequences, transition counting, maximum-likelihood
//!   transition matrices and the m-tuple embedding of higher-order chains.
//! - [`direct`]: stationary-distribution estimators (empirical frequencies,
//!   unit eigenvector, Cesàro limit) and the plug-in entropy rate
//!   `-Σ π_i P_ij log₂ P_ij`.
//! - [`swlz`]: sliding-window Lempel-Ziv match lengths, the sequential parsing
//!   and the expanding-window entropy-rate estimator.
//! - [`bootstrap`]: stationary bootstrap resampling and standard errors.
//! - [`sim`]: chain simulation, benchmark matrices, the two-state second-order
//!   family and the Monte Carlo experiment runner.

pub mod bootstrap;
pub mod direct;
pub mod error;
pub mod estimator;
pub mod markov;
pub mod rng;
pub mod sim;
pub mod swlz;

pub use error::{Error, Result};
pub use estimator::{EntropyEstimate, Estimator, Method};
pub use markov::{
    Alphabet, CompositeAlphabet, ProbabilityVector, Sequence, TransitionCounts, TransitionMatrix,
};
