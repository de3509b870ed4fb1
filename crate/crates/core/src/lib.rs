//! Pseudo-random operators of the circular ensembles.
//!
//! This crate constructs pseudo-random unitary operators from the three
//! circular ensembles — CUE (arbitrary unitaries), COE (symmetric unitaries),
//! and CSE (self-dual unitaries) — out of quantum-circuit primitives: layers
//! of random SU(2) rotations interleaved with a fixed nearest-neighbor
//! coupler, on either a fully addressable circuit or one-/two-species
//! quantum-cellular-automata layouts. It then verifies the constructions
//! against random-matrix statistics: unfolded nearest-neighbor eigenangle
//! spacings and eigenvector component amplitudes, compared to the closed-form
//! spacing surmises and χ²ᵥ amplitude laws, with a Haar-measure sampler as an
//! independent oracle.
//!
//! The `circens` binary exposes the pipeline as subcommands: `generate`
//! (single operators to disk), `sample` (multi-realization statistics),
//! `gof` (goodness-of-fit reports), and `reference` (curve tables).

pub mod cli;
pub mod ensembles;
pub mod linalg;
pub mod reference;
pub mod rng;
pub mod spectra;

pub use ensembles::{Architecture, CircuitSpec, EnsembleLabel, ZMode};
pub use linalg::{ComplexMatrix, SpectralDecomposition};
pub use spectra::{KramersPairing, StatSample};
