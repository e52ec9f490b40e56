//! Numerics for additive walks `S_n = f(X_1) + ... + f(X_n)` driven by a
//! finite primitive Markov chain, conditioned to stay positive.
//!
//! The crate computes every object needed to check the conditioned local
//! limit behaviour of such walks at finite `n`:
//!
//! * [`chain`] — the chain triple `(states, P, f)`, stationary law,
//!   primitivity and centering diagnostics;
//! * [`spectral`] — the Fourier-perturbed operator `P_t`, its spectral
//!   radius curve `r_t`, the leading eigenvalue branch `lambda_t`, the
//!   asymptotic variance `sigma^2` via the Poisson equation, and the
//!   degeneracy / lattice decision procedures;
//! * [`dual`] — the time reversal `P*` with respect to the stationary law
//!   and an exact-enumeration oracle for the duality identity;
//! * [`harmonic`] — the harmonic function `V` (and `V*` on the dual chain)
//!   as an iterated table with a linear tail;
//! * [`dist`] — exact and binned finite-`n` laws of `(X_n, y + S_n)` with
//!   kill-at-zero semantics, survival sequences, exit-time pmfs and
//!   boundary functionals;
//! * [`mc`] — reproducible Monte Carlo sampling, including a Doob
//!   `V`-transform sampler that never dies;
//! * [`verify`] — limit constants assembled from `nu`, `sigma`, `V`, `V*`
//!   and convergence reports comparing them against finite-`n` estimates.
//!
//! The crate is `no_std` (with `alloc`); all IO, file formats and the CLI
//! live in the companion `condwalk-cli` crate.

#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod chain;
pub mod dist;
pub mod dual;
pub mod fixtures;
pub mod harmonic;
pub(crate) mod linalg;
pub(crate) mod math;
pub mod mc;
pub mod spectral;
pub mod verify;

pub use chain::{ChainError, ChainSpec, HypothesisReport, StationaryDist};
pub use dist::{BinnedLaw, BoundaryFunctional, Budget, DistError, Mode};
pub use harmonic::{GridSpec, HarmonicError, HarmonicTable};
pub use mc::{CounterRng, McError, McEstimate, SampleSummary};
pub use spectral::{
    DegeneracyCertificate, LatticeCertificate, LatticeOutcome, NonLatticeEvidence, SpectralError,
    SpectralProfile,
};
pub use verify::{TheoremId, TheoremReport, Verdict, VerifyError};
