//! The chain triple `(states, P, f)`: validation, stationary law,
//! primitivity and centering.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::{DMatrix, DVector};

use crate::math;

/// Row sums may deviate from 1 by at most this much in raw input.
pub const ROW_SUM_INPUT_TOL: f64 = 1e-9;
/// After construction every row sums to 1 within this tolerance.
pub const ROW_SUM_TOL: f64 = 1e-12;
/// `nu(f)` must vanish within this tolerance for a centered observable.
pub const CENTERING_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum ChainError {
    /// A transition row does not sum to 1 (beyond the input tolerance).
    RowSum { row: usize, sum: f64 },
    /// A transition entry is negative or exceeds 1.
    BadEntry { row: usize, col: usize, value: f64 },
    /// Observable length differs from the number of states.
    DimensionMismatch { expected: usize, got: usize },
    /// Transition matrix is not square of size d.
    ShapeMismatch { row: usize, expected: usize, got: usize },
    DuplicateLabel(String),
    TooFewStates(usize),
    NonFinite,
    /// No primitivity index up to the Wielandt bound.
    NotPrimitive,
    /// A cross-check that cannot fail for valid primitive chains failed.
    Internal(&'static str),
}

impl fmt::Display for ChainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChainError::RowSum { row, sum } => {
                write!(f, "row {row} sums to {sum:.17} (expected 1)")
            }
            ChainError::BadEntry { row, col, value } => {
                write!(f, "transition entry ({row},{col}) = {value} outside [0,1]")
            }
            ChainError::DimensionMismatch { expected, got } => {
                write!(f, "observable has length {got}, expected {expected}")
            }
            ChainError::ShapeMismatch { row, expected, got } => {
                write!(f, "transition row {row} has length {got}, expected {expected}")
            }
            ChainError::DuplicateLabel(l) => write!(f, "duplicate state label {l:?}"),
            ChainError::TooFewStates(d) => write!(f, "need at least 2 states, got {d}"),
            ChainError::NonFinite => write!(f, "non-finite number in chain definition"),
            ChainError::NotPrimitive => write!(f, "transition matrix is not primitive"),
            ChainError::Internal(msg) => write!(f, "internal error: {msg}"),
        }
    }
}

/// A validated chain `(states, P, f)`.
///
/// Immutable after construction; rows of `P` are renormalized to sum to 1
/// exactly within [`ROW_SUM_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec {
    labels: Vec<String>,
    p: DMatrix<f64>,
    f: DVector<f64>,
}

impl ChainSpec {
    /// Validate a raw chain document and build the spec.
    pub fn new(
        labels: Vec<String>,
        transition: Vec<Vec<f64>>,
        observable: Vec<f64>,
    ) -> Result<Self, ChainError> {
        let d = labels.len();
        if d < 2 {
            return Err(ChainError::TooFewStates(d));
        }
        for (i, a) in labels.iter().enumerate() {
            if labels[..i].contains(a) {
                return Err(ChainError::DuplicateLabel(a.clone()));
            }
        }
        if transition.len() != d {
            return Err(ChainError::ShapeMismatch {
                row: 0,
                expected: d,
                got: transition.len(),
            });
        }
        if observable.len() != d {
            return Err(ChainError::DimensionMismatch {
                expected: d,
                got: observable.len(),
            });
        }
        if observable.iter().any(|v| !v.is_finite()) {
            return Err(ChainError::NonFinite);
        }
        let mut p = DMatrix::<f64>::zeros(d, d);
        for (i, row) in transition.iter().enumerate() {
            if row.len() != d {
                return Err(ChainError::ShapeMismatch {
                    row: i,
                    expected: d,
                    got: row.len(),
                });
            }
            let mut sum = 0.0;
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(ChainError::NonFinite);
                }
                if !(0.0..=1.0 + ROW_SUM_INPUT_TOL).contains(&v) {
                    return Err(ChainError::BadEntry {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
                sum += v;
            }
            if math::abs(sum - 1.0) > ROW_SUM_INPUT_TOL {
                return Err(ChainError::RowSum { row: i, sum });
            }
            for (j, &v) in row.iter().enumerate() {
                p[(i, j)] = v / sum;
            }
        }
        Ok(ChainSpec {
            labels,
            p,
            f: DVector::from_vec(observable),
        })
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn state_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn transition(&self) -> &DMatrix<f64> {
        &self.p
    }

    #[inline]
    pub fn prob(&self, from: usize, to: usize) -> f64 {
        self.p[(from, to)]
    }

    pub fn observable(&self) -> &DVector<f64> {
        &self.f
    }

    #[inline]
    pub fn f(&self, x: usize) -> f64 {
        self.f[x]
    }

    /// `max_x |f(x)|`.
    pub fn f_sup(&self) -> f64 {
        self.f.iter().fold(0.0, |m, &v| m.max(math::abs(v)))
    }

    /// `max_x f(x)`.
    pub fn f_max(&self) -> f64 {
        self.f.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }

    /// `min_x f(x)`.
    pub fn f_min(&self) -> f64 {
        self.f.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }

    /// Replace the observable (used by centering, duals and rescaling).
    pub fn with_observable(&self, f: Vec<f64>) -> Result<Self, ChainError> {
        if f.len() != self.dim() {
            return Err(ChainError::DimensionMismatch {
                expected: self.dim(),
                got: f.len(),
            });
        }
        if f.iter().any(|v| !v.is_finite()) {
            return Err(ChainError::NonFinite);
        }
        Ok(ChainSpec {
            labels: self.labels.clone(),
            p: self.p.clone(),
            f: DVector::from_vec(f),
        })
    }

    /// Build from already-validated parts (dual construction).
    pub(crate) fn from_parts(labels: Vec<String>, p: DMatrix<f64>, f: DVector<f64>) -> Self {
        ChainSpec { labels, p, f }
    }

    /// Support edges `(x, x')` with `P(x,x') > 0`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let d = self.dim();
        let mut e = Vec::new();
        for x in 0..d {
            for xp in 0..d {
                if self.p[(x, xp)] > 0.0 {
                    e.push((x, xp));
                }
            }
        }
        e
    }

    /// FNV-1a fingerprint of labels, transition bits and observable bits.
    ///
    /// Harmonic tables record it so that verification can refuse tables
    /// built for a different chain.
    pub fn fingerprint(&self) -> u64 {
        let mut h = 0xcbf29ce484222325u64;
        let mut eat = |bytes: &[u8]| {
            for &b in bytes {
                h ^= b as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        };
        for l in &self.labels {
            eat(l.as_bytes());
            eat(&[0xff]);
        }
        for v in self.p.iter() {
            eat(&v.to_bits().to_le_bytes());
        }
        for v in self.f.iter() {
            eat(&v.to_bits().to_le_bytes());
        }
        h
    }
}

/// The unique positive invariant probability of a primitive chain.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryDist {
    nu: DVector<f64>,
}

impl StationaryDist {
    pub fn as_slice(&self) -> &[f64] {
        self.nu.as_slice()
    }

    #[inline]
    pub fn prob(&self, x: usize) -> f64 {
        self.nu[x]
    }

    pub fn vector(&self) -> &DVector<f64> {
        &self.nu
    }

    /// `nu(g) = sum_x g(x) nu(x)`.
    pub fn mean(&self, g: &[f64]) -> f64 {
        self.nu
            .iter()
            .zip(g.iter())
            .map(|(&n, &v)| n * v)
            .sum()
    }
}

/// Smallest `k0` with all entries of the boolean `k0`-th power of the
/// support pattern positive, up to the Wielandt bound `(d-1)^2 + 1`.
pub fn primitivity_index(chain: &ChainSpec) -> Option<usize> {
    let d = chain.dim();
    let words = d.div_ceil(64);
    let row_full = |row: &[u64]| -> bool {
        for w in 0..words {
            let want = if w + 1 < words {
                u64::MAX
            } else {
                let rem = d - 64 * (words - 1);
                if rem == 64 {
                    u64::MAX
                } else {
                    (1u64 << rem) - 1
                }
            };
            if row[w] & want != want {
                return false;
            }
        }
        true
    };
    // support pattern as bit rows
    let mut base = vec![vec![0u64; words]; d];
    for x in 0..d {
        for xp in 0..d {
            if chain.prob(x, xp) > 0.0 {
                base[x][xp / 64] |= 1u64 << (xp % 64);
            }
        }
    }
    let bound = (d - 1) * (d - 1) + 1;
    let mut cur = base.clone();
    for k in 1..=bound {
        if cur.iter().all(|r| row_full(r)) {
            return Some(k);
        }
        // next = base o cur (boolean product)
        let mut next = vec![vec![0u64; words]; d];
        for x in 0..d {
            for j in 0..d {
                if base[x][j / 64] & (1u64 << (j % 64)) != 0 {
                    for w in 0..words {
                        next[x][w] |= cur[j][w];
                    }
                }
            }
        }
        cur = next;
    }
    if cur.iter().all(|r| row_full(r)) {
        return Some(bound);
    }
    None
}

/// Direct linear solve of the stationary equations, cross-checked by power
/// iteration; both paths must agree within 1e-10 componentwise.
pub fn stationary_distribution(chain: &ChainSpec) -> Result<StationaryDist, ChainError> {
    if primitivity_index(chain).is_none() {
        return Err(ChainError::NotPrimitive);
    }
    let d = chain.dim();
    // (P^T - I) nu = 0 with the last equation replaced by sum(nu) = 1.
    let mut a = chain.transition().transpose();
    for i in 0..d {
        a[(i, i)] -= 1.0;
    }
    for j in 0..d {
        a[(d - 1, j)] = 1.0;
    }
    let mut b = DVector::zeros(d);
    b[d - 1] = 1.0;
    let nu = a
        .lu()
        .solve(&b)
        .ok_or(ChainError::Internal("singular stationary system"))?;
    if nu.iter().any(|&v| v <= 0.0) {
        return Err(ChainError::Internal("stationary solve gave nonpositive mass"));
    }
    // power iteration cross-check
    let mut pi = DVector::from_element(d, 1.0 / d as f64);
    for _ in 0..200_000 {
        let next = chain.transition().transpose() * &pi;
        let change = (&next - &pi).amax();
        pi = next;
        let s: f64 = pi.iter().sum();
        pi /= s;
        if change <= 1e-15 {
            break;
        }
    }
    if (&pi - &nu).amax() > 1e-10 {
        return Err(ChainError::Internal(
            "stationary solve and power iteration disagree",
        ));
    }
    Ok(StationaryDist { nu })
}

/// Replace `f` by `f - nu(f) * 1`; the result satisfies `nu(f) = 0` within
/// [`CENTERING_TOL`].
pub fn center_function(chain: &ChainSpec) -> Result<ChainSpec, ChainError> {
    let nu = stationary_distribution(chain)?;
    let m = nu.mean(chain.observable().as_slice());
    let f = chain.observable().iter().map(|&v| v - m).collect();
    chain.with_observable(f)
}

/// `nu(f)` for a primitive chain.
pub fn observable_mean(chain: &ChainSpec) -> Result<f64, ChainError> {
    let nu = stationary_distribution(chain)?;
    Ok(nu.mean(chain.observable().as_slice()))
}

/// Outcome of checking the three standing hypotheses on a chain:
/// primitivity, centering, non-degeneracy/non-lattice.
#[derive(Debug, Clone)]
pub struct HypothesisReport {
    pub primitive: bool,
    /// Primitivity index when primitive.
    pub k0: Option<usize>,
    pub centered: bool,
    /// `nu(f)` (0.0 when the stationary law does not exist).
    pub nu_f: f64,
    /// No degeneracy certificate and no lattice certificate found.
    pub nondegenerate: bool,
    pub degeneracy: Option<crate::spectral::DegeneracyCertificate>,
    pub lattice: Option<crate::spectral::LatticeCertificate>,
    pub notes: Vec<String>,
}

impl HypothesisReport {
    /// All three hypotheses hold.
    pub fn all_hold(&self) -> bool {
        self.primitive && self.centered && self.nondegenerate
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use alloc::string::ToString;

    fn labels(n: usize) -> Vec<String> {
        (1..=n).map(|i| i.to_string()).collect()
    }

    #[test]
    fn chain_a_is_valid() {
        let c = fixtures::chain_a();
        assert_eq!(c.dim(), 2);
        assert_eq!(c.f(0), 1.0);
        assert_eq!(c.f(1), -1.0);
    }

    #[test]
    fn row_sum_error() {
        let err = ChainSpec::new(
            labels(2),
            vec![vec![0.7, 0.4], vec![0.5, 0.5]],
            vec![1.0, -1.0],
        )
        .unwrap_err();
        assert!(matches!(err, ChainError::RowSum { row: 0, .. }));
    }

    #[test]
    fn dimension_mismatch() {
        let err = ChainSpec::new(
            labels(3),
            vec![
                vec![0.5, 0.25, 0.25],
                vec![0.25, 0.5, 0.25],
                vec![0.25, 0.25, 0.5],
            ],
            vec![1.0, -1.0],
        )
        .unwrap_err();
        assert!(matches!(
            err,
            ChainError::DimensionMismatch {
                expected: 3,
                got: 2
            }
        ));
    }

    #[test]
    fn negative_entry_and_duplicate_label() {
        let err = ChainSpec::new(
            labels(2),
            vec![vec![1.2, -0.2], vec![0.5, 0.5]],
            vec![1.0, -1.0],
        )
        .unwrap_err();
        assert!(matches!(err, ChainError::BadEntry { .. }));
        let err = ChainSpec::new(
            vec!["a".to_string(), "a".to_string()],
            vec![vec![0.5, 0.5], vec![0.5, 0.5]],
            vec![1.0, -1.0],
        )
        .unwrap_err();
        assert!(matches!(err, ChainError::DuplicateLabel(_)));
    }

    #[test]
    fn stationary_chain_a_symmetric() {
        let nu = stationary_distribution(&fixtures::chain_a()).unwrap();
        assert!((nu.prob(0) - 0.5).abs() < 1e-14);
        assert!((nu.prob(1) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn stationary_chain_c_four_sevenths() {
        let nu = stationary_distribution(&fixtures::chain_c()).unwrap();
        assert!((nu.prob(0) - 4.0 / 7.0).abs() < 1e-13);
        assert!((nu.prob(1) - 3.0 / 7.0).abs() < 1e-13);
    }

    #[test]
    fn stationary_chain_e_uniform() {
        // doubly stochastic => uniform stationary law
        let nu = stationary_distribution(&fixtures::chain_e()).unwrap();
        for x in 0..3 {
            assert!((nu.prob(x) - 1.0 / 3.0).abs() < 1e-13);
        }
    }

    #[test]
    fn primitivity_chain_a() {
        assert_eq!(primitivity_index(&fixtures::chain_a()), Some(1));
    }

    #[test]
    fn primitivity_period_two_absent() {
        let c = ChainSpec::new(
            labels(2),
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            vec![1.0, -1.0],
        )
        .unwrap();
        assert_eq!(primitivity_index(&c), None);
        assert!(matches!(
            stationary_distribution(&c),
            Err(ChainError::NotPrimitive)
        ));
    }

    #[test]
    fn primitivity_chain_d_by_boolean_power_oracle() {
        // independent oracle: dense boolean matrix powers over bool
        let c = fixtures::chain_d();
        let d = c.dim();
        let mut reach = vec![vec![false; d]; d];
        for x in 0..d {
            for xp in 0..d {
                reach[x][xp] = c.prob(x, xp) > 0.0;
            }
        }
        let base = reach.clone();
        let mut k_oracle = None;
        for k in 1..=((d - 1) * (d - 1) + 1) {
            if reach.iter().all(|r| r.iter().all(|&b| b)) {
                k_oracle = Some(k);
                break;
            }
            let mut next = vec![vec![false; d]; d];
            for x in 0..d {
                for j in 0..d {
                    if base[x][j] {
                        for l in 0..d {
                            next[x][l] |= reach[j][l];
                        }
                    }
                }
            }
            reach = next;
        }
        assert!(k_oracle.is_some());
        assert_eq!(primitivity_index(&c), k_oracle);
        // Wielandt bound
        assert!(k_oracle.unwrap() <= (d - 1) * (d - 1) + 1);
    }

    #[test]
    fn centering_chain_c_already_centered() {
        let c = fixtures::chain_c();
        let centered = center_function(&c).unwrap();
        assert!((centered.f(0) - 3.0).abs() < 1e-13);
        assert!((centered.f(1) + 4.0).abs() < 1e-13);
    }

    #[test]
    fn centering_constant_maps_to_zero() {
        let c = fixtures::chain_c().with_observable(vec![1.0, 1.0]).unwrap();
        let centered = center_function(&c).unwrap();
        assert!(centered.f(0).abs() < 1e-14);
        assert!(centered.f(1).abs() < 1e-14);
    }

    #[test]
    fn centering_chain_e_subtract_uniform_mean() {
        let c = fixtures::chain_e()
            .with_observable(vec![1.0, 0.0, 0.0])
            .unwrap();
        let centered = center_function(&c).unwrap();
        assert!((centered.f(0) - 2.0 / 3.0).abs() < 1e-14);
        assert!((centered.f(1) + 1.0 / 3.0).abs() < 1e-14);
        assert!((centered.f(2) + 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn matrix_powers_stay_row_stochastic() {
        for c in fixtures::all() {
            let mut m = c.transition().clone();
            for _ in 0..20 {
                for i in 0..c.dim() {
                    let s: f64 = m.row(i).iter().sum();
                    assert!((s - 1.0).abs() < 1e-10);
                }
                m = &m * c.transition();
            }
        }
    }

    #[test]
    fn geometric_ergodicity_observable() {
        // ||P^n g - nu(g)||_inf decays monotonically past k0 and is tiny at n=50
        for c in fixtures::all() {
            let nu = stationary_distribution(&c).unwrap();
            let k0 = primitivity_index(&c).unwrap();
            let d = c.dim();
            let g: Vec<f64> = (0..d).map(|i| if i == 0 { 1.0 } else { -0.3 }).collect();
            let target = nu.mean(&g);
            let mut v = DVector::from_vec(g);
            let mut prev = f64::INFINITY;
            for n in 1..=50 {
                v = c.transition() * v;
                let dev = v.iter().fold(0.0f64, |m, &x| m.max((x - target).abs()));
                if n > k0 {
                    assert!(
                        dev <= prev * (1.0 + 1e-9),
                        "ergodicity not monotone at n={n} for {:?}",
                        c.labels()
                    );
                }
                prev = dev;
                if n == 50 {
                    assert!(dev < 1e-6, "n=50 deviation {dev}");
                }
            }
        }
    }

    #[test]
    fn fingerprint_distinguishes_fixtures() {
        let prints: Vec<u64> = fixtures::all().iter().map(|c| c.fingerprint()).collect();
        for i in 0..prints.len() {
            for j in 0..i {
                assert_ne!(prints[i], prints[j]);
            }
        }
    }
}
