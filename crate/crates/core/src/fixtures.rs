//! Canonical chains used across tests and the verification suite.
//!
//! * A — 2 states, iid fair signs; lattice with span 2, shift -1.
//! * B — 3 states, iid uniform, `f = (1, sqrt2, -1-sqrt2)`; non-lattice,
//!   `Pf = 0` so `sigma^2 = nu(f^2) = (6 + 2 sqrt2)/3`.
//! * C — 2 states, `P = [[0.7, 0.3], [0.4, 0.6]]`, `f = (3, -4)`; lattice
//!   with span 7, shift -4; `sigma^2 = 156/7`.
//! * D — 4 states, sparse; degenerate (`sigma^2 = 0`, cocycle
//!   `h = (0,1,1,1)`, mean 0).
//! * E — 3 states, doubly stochastic non-reversible, same `f` as B;
//!   non-lattice.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::chain::ChainSpec;

fn labels(n: usize) -> Vec<alloc::string::String> {
    (1..=n).map(|i| i.to_string()).collect()
}

pub fn chain_a() -> ChainSpec {
    ChainSpec::new(
        labels(2),
        vec![vec![0.5, 0.5], vec![0.5, 0.5]],
        vec![1.0, -1.0],
    )
    .expect("fixture A is well-formed")
}

pub fn chain_b() -> ChainSpec {
    let r2 = libm::sqrt(2.0);
    let third = 1.0 / 3.0;
    ChainSpec::new(
        labels(3),
        vec![vec![third; 3], vec![third; 3], vec![third; 3]],
        vec![1.0, r2, -1.0 - r2],
    )
    .expect("fixture B is well-formed")
}

pub fn chain_c() -> ChainSpec {
    ChainSpec::new(
        labels(2),
        vec![vec![0.7, 0.3], vec![0.4, 0.6]],
        vec![3.0, -4.0],
    )
    .expect("fixture C is well-formed")
}

pub fn chain_d() -> ChainSpec {
    ChainSpec::new(
        labels(4),
        vec![
            vec![0.0, 1.0, 0.0, 0.0],
            vec![0.2, 0.0, 0.4, 0.4],
            vec![1.0, 0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0, 0.0],
        ],
        vec![1.0, -1.0, 0.0, 0.0],
    )
    .expect("fixture D is well-formed")
}

pub fn chain_e() -> ChainSpec {
    let r2 = libm::sqrt(2.0);
    ChainSpec::new(
        labels(3),
        vec![
            vec![0.2, 0.5, 0.3],
            vec![0.3, 0.2, 0.5],
            vec![0.5, 0.3, 0.2],
        ],
        vec![1.0, r2, -1.0 - r2],
    )
    .expect("fixture E is well-formed")
}

pub fn all() -> Vec<ChainSpec> {
    vec![chain_a(), chain_b(), chain_c(), chain_d(), chain_e()]
}

/// `sigma^2` of fixture B, `(6 + 2 sqrt2)/3`.
pub fn sigma2_b() -> f64 {
    (6.0 + 2.0 * libm::sqrt(2.0)) / 3.0
}

/// `sigma^2` of fixture C, `156/7`.
pub const SIGMA2_C: f64 = 156.0 / 7.0;
