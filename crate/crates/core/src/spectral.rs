//! The Fourier-perturbed operator `P_t g = P(e^{itf} g)`, its spectral
//! radius curve, the leading eigenvalue branch near `t = 0`, the asymptotic
//! variance through the Poisson equation, and the degeneracy / lattice
//! decision procedures.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::chain::{self, ChainSpec, StationaryDist, CENTERING_TOL};
use crate::linalg;
use crate::math;

/// Edge residual tolerance for the unimodular phase certificate.
pub const PHASE_RESIDUAL_TOL: f64 = 1e-8;
/// Edge residual tolerance for the cocycle (degeneracy) certificate.
pub const COCYCLE_RESIDUAL_TOL: f64 = 1e-9;
/// `r_t` must exceed `1 - R_ONE_TOL` for a certificate attempt.
pub const R_ONE_TOL: f64 = 1e-6;
/// Poisson-route and series-route variances must agree this closely.
pub const SIGMA2_CROSS_TOL: f64 = 1e-10;
/// Non-lattice evidence is reported on `[EVIDENCE_T_FLOOR, t_max]`; below
/// the floor `r_t -> 1` trivially as `t -> 0`.
pub const EVIDENCE_T_FLOOR: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub enum SpectralError {
    NotCentered { nu_f: f64 },
    NotPrimitive,
    /// The walk is degenerate (`sigma^2 = 0`); `r_t` is identically 1 and
    /// the lattice scan is meaningless.
    DegenerateWalk,
    /// `r_t` exceeded `1 - R_ONE_TOL` at a refined maximum but no phase
    /// certificate verified.
    AmbiguousScan { t: f64, r: f64 },
    /// Eigenvalue branch tracking hit two candidates within 1e-10.
    BranchLoss { t: f64 },
    NonConvergence(&'static str),
    Internal(&'static str),
}

impl fmt::Display for SpectralError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectralError::NotCentered { nu_f } => write!(f, "observable not centered: nu(f) = {nu_f:e}"),
            SpectralError::NotPrimitive => write!(f, "chain is not primitive"),
            SpectralError::DegenerateWalk => write!(f, "walk is degenerate (sigma^2 = 0)"),
            SpectralError::AmbiguousScan { t, r } => {
                write!(f, "r_t = {r} at t = {t} is near 1 but no phase certificate verified")
            }
            SpectralError::BranchLoss { t } => write!(f, "eigenvalue branch ambiguous at t = {t}"),
            SpectralError::NonConvergence(m) => write!(f, "iteration did not converge: {m}"),
            SpectralError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

/// Variance, Poisson solution and sampled spectral curves.
#[derive(Debug, Clone)]
pub struct SpectralProfile {
    /// Asymptotic variance (Poisson route).
    pub sigma2: f64,
    /// Poisson-equation solution with `nu(theta) = 0`.
    pub theta: Vec<f64>,
    /// Truncated-series value of `sigma^2` (cross-check route).
    pub sigma2_series: f64,
    /// Number of series terms taken before the measured-decay tail bound
    /// dropped below 1e-12.
    pub series_terms: usize,
    /// `(t, r_t)` samples (filled by the lattice scan).
    pub r_curve: Vec<(f64, f64)>,
    /// `(t, lambda_t)` samples near 0 (filled by the expansion check).
    pub lambda_curve: Vec<(f64, Complex64)>,
}

/// Certificate that `f` is a coboundary on the support digraph, i.e. the
/// walk is degenerate: `f(x') = h(x) - h(x') + m` on every edge.
#[derive(Debug, Clone, PartialEq)]
pub struct DegeneracyCertificate {
    pub h: Vec<f64>,
    pub m: f64,
    pub residual: f64,
}

/// Certificate that the walk is lattice: a `t* > 0`, a shift `theta` and
/// unit-modulus phases with `h(x') e^{i t* f(x')} = h(x) e^{i t* theta}`
/// on every support edge. The span is `a = 2 pi / t*`.
#[derive(Debug, Clone)]
pub struct LatticeCertificate {
    pub t_star: f64,
    pub theta_lat: f64,
    pub a_lat: f64,
    pub phases: Vec<Complex64>,
    pub edge_residual: f64,
    pub r_at_t_star: f64,
}

/// Numeric evidence that no lattice exists: the largest `r_t` seen on
/// `[t_floor, t_max]` stayed away from 1.
#[derive(Debug, Clone, PartialEq)]
pub struct NonLatticeEvidence {
    pub sup_r: f64,
    pub at_t: f64,
    pub t_floor: f64,
    pub t_max: f64,
}

#[derive(Debug, Clone)]
pub enum LatticeOutcome {
    Lattice(LatticeCertificate),
    NonLattice(NonLatticeEvidence),
}

/// Scan result: the outcome plus the sampled `r_t` curve.
#[derive(Debug, Clone)]
pub struct LatticeScanResult {
    pub outcome: LatticeOutcome,
    pub r_curve: Vec<(f64, f64)>,
}

/// `P_t(x,x') = P(x,x') e^{i t f(x')}`.
pub fn perturbed_matrix(chain: &ChainSpec, t: f64) -> DMatrix<Complex64> {
    let d = chain.dim();
    DMatrix::from_fn(d, d, |x, xp| {
        Complex64::from_polar(chain.prob(x, xp), t * chain.f(xp))
    })
}

/// Max modulus of eigenvalues; full solve for `d <= 64`, power iteration on
/// the modulus above that. Never silently exceeds the row-sum bound.
pub fn spectral_radius(m: &DMatrix<Complex64>) -> Result<f64, SpectralError> {
    let d = m.nrows();
    let row_bound = (0..d)
        .map(|i| (0..d).map(|j| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0f64, f64::max);
    let r = if d <= 64 {
        linalg::complex_eigenvalues(m)
            .iter()
            .map(|z| z.norm())
            .fold(0.0f64, f64::max)
    } else {
        linalg::power_iteration_modulus(m, 1e-13, 200_000)
            .map_err(SpectralError::NonConvergence)?
    };
    if r > row_bound + 1e-9 {
        return Err(SpectralError::Internal("spectral radius above row-sum bound"));
    }
    Ok(r)
}

/// `r_t` for the chain's perturbed operator.
pub fn r_t(chain: &ChainSpec, t: f64) -> Result<f64, SpectralError> {
    spectral_radius(&perturbed_matrix(chain, t))
}

/// Solve `(I - P) theta = f` on the `nu`-centered subspace and set
/// `sigma^2 = nu(f^2) + 2 nu(f P theta)`; cross-check against the
/// truncated series with a measured-decay tail bound below 1e-12.
pub fn asymptotic_variance(chain: &ChainSpec) -> Result<SpectralProfile, SpectralError> {
    let nu = chain::stationary_distribution(chain).map_err(|e| match e {
        chain::ChainError::NotPrimitive => SpectralError::NotPrimitive,
        _ => SpectralError::Internal("stationary distribution failed"),
    })?;
    let f = chain.observable();
    let nu_f = nu.mean(f.as_slice());
    if math::abs(nu_f) > CENTERING_TOL {
        return Err(SpectralError::NotCentered { nu_f });
    }
    let d = chain.dim();
    // (I - P + 1 nu^T) theta = f is nonsingular and its solution solves the
    // Poisson equation with nu(theta) = nu(f) = 0.
    let mut a = DMatrix::<f64>::identity(d, d) - chain.transition();
    for i in 0..d {
        for j in 0..d {
            a[(i, j)] += nu.prob(j);
        }
    }
    let theta = a
        .lu()
        .solve(f)
        .ok_or(SpectralError::Internal("singular Poisson system"))?;
    let p_theta = chain.transition() * &theta;
    let nu_f2 = (0..d).map(|x| nu.prob(x) * f[x] * f[x]).sum::<f64>();
    let cross = (0..d).map(|x| nu.prob(x) * f[x] * p_theta[x]).sum::<f64>();
    let mut sigma2 = nu_f2 + 2.0 * cross;

    // series route with measured geometric decay
    let mut g: DVector<f64> = f.clone_owned();
    let mut acc = nu_f2;
    let nu_abs_f = (0..d).map(|x| nu.prob(x) * math::abs(f[x])).sum::<f64>();
    let mut terms = 0usize;
    let mut prev_norm = g.amax();
    let mut ratio_max: f64 = 0.0;
    loop {
        g = chain.transition() * g;
        terms += 1;
        acc += 2.0 * (0..d).map(|x| nu.prob(x) * f[x] * g[x]).sum::<f64>();
        let norm = g.amax();
        if terms > 8 && prev_norm > 0.0 {
            ratio_max = ratio_max.max(norm / prev_norm);
            let rho = ratio_max.min(0.9999);
            let tail = 2.0 * nu_abs_f * norm * rho / (1.0 - rho);
            if tail < 1e-12 {
                break;
            }
        }
        prev_norm = norm;
        if terms > 500_000 {
            return Err(SpectralError::NonConvergence("variance series tail bound"));
        }
    }
    if math::abs(sigma2 - acc) > SIGMA2_CROSS_TOL {
        return Err(SpectralError::Internal(
            "Poisson and series variances disagree beyond 1e-10",
        ));
    }
    if sigma2 < 0.0 {
        if sigma2 < -SIGMA2_CROSS_TOL {
            return Err(SpectralError::Internal("negative variance"));
        }
        sigma2 = 0.0;
    }
    Ok(SpectralProfile {
        sigma2,
        theta: theta.as_slice().to_vec(),
        sigma2_series: acc,
        series_terms: terms,
        r_curve: Vec::new(),
        lambda_curve: Vec::new(),
    })
}

/// Breadth-first assignment of a potential `h` over the support digraph
/// with `h(x') = h(x) - f(x') + m`, `m = nu(f)`; a certificate is returned
/// iff every edge closes within [`COCYCLE_RESIDUAL_TOL`].
pub fn detect_degeneracy(
    chain: &ChainSpec,
) -> Result<Option<DegeneracyCertificate>, SpectralError> {
    let nu = chain::stationary_distribution(chain).map_err(|e| match e {
        chain::ChainError::NotPrimitive => SpectralError::NotPrimitive,
        _ => SpectralError::Internal("stationary distribution failed"),
    })?;
    let m = nu.mean(chain.observable().as_slice());
    let d = chain.dim();
    let mut h = vec![f64::NAN; d];
    h[0] = 0.0;
    let mut queue = vec![0usize];
    let mut head = 0;
    while head < queue.len() {
        let x = queue[head];
        head += 1;
        for xp in 0..d {
            if chain.prob(x, xp) > 0.0 && h[xp].is_nan() {
                h[xp] = h[x] - chain.f(xp) + m;
                queue.push(xp);
            }
        }
    }
    if h.iter().any(|v| v.is_nan()) {
        return Err(SpectralError::Internal("support digraph not strongly connected"));
    }
    let mut residual = 0.0f64;
    for (x, xp) in chain.edges() {
        residual = residual.max(math::abs(chain.f(xp) - (h[x] - h[xp] + m)));
    }
    if residual <= COCYCLE_RESIDUAL_TOL {
        Ok(Some(DegeneracyCertificate { h, m, residual }))
    } else {
        Ok(None)
    }
}

/// Spanning-tree phase data at a fixed `t`: accumulated phase without the
/// unknown `u = t*theta`, and the tree depth (the coefficient of `u`).
struct PhaseTree {
    p: Vec<f64>,
    depth: Vec<i64>,
}

fn phase_tree(chain: &ChainSpec, t: f64) -> PhaseTree {
    let d = chain.dim();
    let mut p = vec![f64::NAN; d];
    let mut depth = vec![0i64; d];
    p[0] = 0.0;
    let mut queue = vec![0usize];
    let mut head = 0;
    while head < queue.len() {
        let x = queue[head];
        head += 1;
        for xp in 0..d {
            if chain.prob(x, xp) > 0.0 && p[xp].is_nan() {
                p[xp] = p[x] - t * chain.f(xp);
                depth[xp] = depth[x] + 1;
                queue.push(xp);
            }
        }
    }
    PhaseTree { p, depth }
}

/// Try the exact phase certificate at `t`: solve `u = t*theta` from the
/// first non-tree edge whose depth coefficient is nonzero, then check all
/// edges in the complex domain. Returns the best candidate.
fn try_phase_certificate(chain: &ChainSpec, t: f64) -> Option<(f64, Vec<Complex64>, f64)> {
    if !(t.is_finite() && t > 0.0) {
        return None;
    }
    let tree = phase_tree(chain, t);
    if tree.p.iter().any(|v| v.is_nan()) {
        return None;
    }
    // first non-tree constraint with nonzero coefficient pins u up to
    // |c| choices mod 2 pi
    let mut pin: Option<(i64, f64)> = None;
    for (x, xp) in chain.edges() {
        let c = tree.depth[xp] - tree.depth[x] - 1;
        if c != 0 {
            let w = tree.p[x] - tree.p[xp] - t * chain.f(xp);
            pin = Some((c, w));
            break;
        }
    }
    let (c, w) = pin?;
    let cc = c.unsigned_abs() as usize;
    let mut best: Option<(f64, Vec<Complex64>, f64)> = None;
    for k in 0..cc {
        let u = (w + math::TWO_PI * k as f64) / c as f64;
        let phases: Vec<Complex64> = (0..chain.dim())
            .map(|x| Complex64::from_polar(1.0, tree.p[x] + tree.depth[x] as f64 * u))
            .collect();
        let eiu = Complex64::from_polar(1.0, u);
        let mut res = 0.0f64;
        for (x, xp) in chain.edges() {
            let lhs = phases[xp] * Complex64::from_polar(1.0, t * chain.f(xp));
            let rhs = phases[x] * eiu;
            res = res.max((lhs - rhs).norm());
        }
        if best.as_ref().is_none_or(|b| res < b.2) {
            best = Some((u, phases, res));
        }
    }
    best
}

/// Golden-section maximization of a unimodal function on `[a, b]`.
fn golden_max(mut a: f64, mut b: f64, mut f: impl FnMut(f64) -> f64, iters: usize) -> f64 {
    const INVPHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INVPHI * (b - a);
    let mut d = a + INVPHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INVPHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INVPHI * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// One parabolic-vertex polish step of a maximum at spacing `delta`.
fn parabola_polish(t: f64, delta: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let (fm, f0, fp) = (f(t - delta), f(t), f(t + delta));
    let denom = fm - 2.0 * f0 + fp;
    if denom >= 0.0 || !denom.is_finite() {
        return t;
    }
    let shift = 0.5 * delta * (fm - fp) / denom;
    if math::abs(shift) > delta {
        return t;
    }
    t + shift
}

/// Scan `r_t` on a log+linear grid over `(0, t_max]`, refine every local
/// maximum, and attempt the exact phase certificate wherever the refined
/// maximum exceeds `1 - R_ONE_TOL`. The first certified `t*` (smallest,
/// hence largest span `a = 2 pi / t*`) wins; otherwise numeric non-lattice
/// evidence over `[EVIDENCE_T_FLOOR, t_max]` is returned.
pub fn detect_lattice(
    chain: &ChainSpec,
    t_max: f64,
    grid: usize,
) -> Result<LatticeScanResult, SpectralError> {
    if !(t_max > 0.2) || grid < 16 {
        return Err(SpectralError::Internal("lattice scan needs t_max > 0.2 and grid >= 16"));
    }
    if detect_degeneracy(chain)?.is_some() {
        return Err(SpectralError::DegenerateWalk);
    }
    // grid: one quarter log-spaced on [1e-3, 0.1), the rest linear on [0.1, t_max]
    let n_log = grid / 4;
    let n_lin = grid - n_log;
    let mut ts = Vec::with_capacity(grid);
    let (lo, hi) = (1e-3f64, 0.1f64);
    for i in 0..n_log {
        let s = i as f64 / n_log as f64;
        ts.push(lo * libm::pow(hi / lo, s));
    }
    for i in 0..n_lin {
        let s = i as f64 / (n_lin - 1) as f64;
        ts.push(0.1 + s * (t_max - 0.1));
    }
    let mut rs = Vec::with_capacity(ts.len());
    for &t in &ts {
        rs.push(r_t(chain, t)?);
    }
    let r_curve: Vec<(f64, f64)> = ts.iter().copied().zip(rs.iter().copied()).collect();

    // interior local maxima of the sampled curve
    let mut brackets: Vec<(f64, f64, f64)> = Vec::new(); // (a, t, b)
    for i in 1..ts.len() - 1 {
        if rs[i] >= rs[i - 1] && rs[i] >= rs[i + 1] && (rs[i] > rs[i - 1] || rs[i] > rs[i + 1]) {
            brackets.push((ts[i - 1], ts[i], ts[i + 1]));
        }
    }

    let mut ambiguous: Option<(f64, f64)> = None;
    let mut refined: Vec<(f64, f64)> = Vec::new();
    for &(a, _, b) in &brackets {
        let mut t_hat = golden_max(a, b, |t| r_t(chain, t).unwrap_or(0.0), 48);
        for delta in [1e-5, 1e-7] {
            t_hat = parabola_polish(t_hat, delta, |t| r_t(chain, t).unwrap_or(0.0));
        }
        let r_hat = r_t(chain, t_hat)?;
        refined.push((t_hat, r_hat));
        if r_hat > 1.0 - R_ONE_TOL {
            // polish t* on the certificate residual itself (noise-free)
            let res_at = |t: f64| try_phase_certificate(chain, t).map_or(f64::INFINITY, |c| c.2);
            let span = 1e-5;
            let t_star = golden_max(t_hat - span, t_hat + span, |t| -res_at(t), 80);
            if let Some((u, phases, residual)) = try_phase_certificate(chain, t_star) {
                if residual <= PHASE_RESIDUAL_TOL {
                    let r_at = r_t(chain, t_star)?;
                    if math::abs(r_at - 1.0) <= 1e-8 {
                        let a_lat = math::TWO_PI / t_star;
                        let theta_raw = u / t_star;
                        // canonical representative in (-a, 0]
                        let theta_lat = theta_raw - a_lat * math::ceil(theta_raw / a_lat);
                        return Ok(LatticeScanResult {
                            outcome: LatticeOutcome::Lattice(LatticeCertificate {
                                t_star,
                                theta_lat,
                                a_lat,
                                phases,
                                edge_residual: residual,
                                r_at_t_star: r_at,
                            }),
                            r_curve,
                        });
                    }
                }
            }
            if ambiguous.is_none() {
                ambiguous = Some((t_hat, r_hat));
            }
        }
    }
    if let Some((t, r)) = ambiguous {
        return Err(SpectralError::AmbiguousScan { t, r });
    }
    // evidence over [t_floor, t_max]
    let t_floor = EVIDENCE_T_FLOOR;
    let mut sup_r = f64::NEG_INFINITY;
    let mut at_t = t_floor;
    for (&t, &r) in ts.iter().zip(rs.iter()) {
        if t >= t_floor && r > sup_r {
            sup_r = r;
            at_t = t;
        }
    }
    for &(t, r) in &refined {
        if t >= t_floor && r > sup_r {
            sup_r = r;
            at_t = t;
        }
    }
    // the restricted range always contains grid points for t_max > 0.2
    if !sup_r.is_finite() {
        return Err(SpectralError::Internal("empty evidence range"));
    }
    Ok(LatticeScanResult {
        outcome: LatticeOutcome::NonLattice(NonLatticeEvidence {
            sup_r,
            at_t,
            t_floor,
            t_max,
        }),
        r_curve,
    })
}

/// One tracked sample of the leading eigenvalue branch.
#[derive(Debug, Clone, Copy)]
pub struct LambdaSample {
    pub t: f64,
    pub lambda: Complex64,
    /// `|lambda_t - 1 + t^2 sigma^2 / 2|`.
    pub residual: f64,
}

/// Track `lambda_t` from `lambda_0 = 1` by nearest-eigenvalue continuation
/// with step halving, and report the cubic-expansion residual at each
/// requested `t`.
pub fn lambda_expansion_check(
    chain: &ChainSpec,
    t_list: &[f64],
) -> Result<Vec<LambdaSample>, SpectralError> {
    if t_list.iter().any(|&t| !(0.0..=0.5).contains(&t)) {
        return Err(SpectralError::Internal("t_list must lie in [0, 0.5]"));
    }
    let sigma2 = asymptotic_variance(chain)?.sigma2;
    let mut targets: Vec<f64> = t_list.to_vec();
    targets.sort_by(|a, b| a.partial_cmp(b).expect("finite t"));
    targets.dedup();

    let eigs_at = |t: f64| linalg::complex_eigenvalues(&perturbed_matrix(chain, t));
    let mut tracked: Vec<(f64, Complex64)> = Vec::new();
    let mut t_cur = 0.0f64;
    let mut lam_cur = Complex64::new(1.0, 0.0);
    for &t_target in &targets {
        if t_target == 0.0 {
            tracked.push((0.0, Complex64::new(1.0, 0.0)));
            continue;
        }
        // adaptive continuation from (t_cur, lam_cur) to t_target
        let mut step = t_target - t_cur;
        while t_cur < t_target {
            let t_next = (t_cur + step).min(t_target);
            let eigs = eigs_at(t_next);
            let mut order: Vec<usize> = (0..eigs.len()).collect();
            order.sort_by(|&i, &j| {
                (eigs[i] - lam_cur)
                    .norm()
                    .partial_cmp(&(eigs[j] - lam_cur).norm())
                    .expect("finite eigenvalues")
            });
            let nearest = eigs[order[0]];
            let second_gap = if order.len() > 1 {
                (eigs[order[1]] - nearest).norm()
            } else {
                f64::INFINITY
            };
            if second_gap < 1e-10 {
                return Err(SpectralError::BranchLoss { t: t_next });
            }
            let move_dist = (nearest - lam_cur).norm();
            if move_dist > 0.45 * second_gap && step > 1e-9 {
                step *= 0.5;
                continue;
            }
            t_cur = t_next;
            lam_cur = nearest;
            step = (t_target - t_cur).max(step);
        }
        tracked.push((t_target, lam_cur));
    }
    // answer in the caller's order
    let mut out = Vec::with_capacity(t_list.len());
    for &t in t_list {
        let &(tt, lam) = tracked
            .iter()
            .find(|(tt, _)| *tt == t)
            .ok_or(SpectralError::Internal("tracked sample missing"))?;
        let residual = (lam - Complex64::new(1.0 - tt * tt * sigma2 / 2.0, 0.0)).norm();
        out.push(LambdaSample {
            t: tt,
            lambda: lam,
            residual,
        });
    }
    Ok(out)
}

/// Full hypothesis analysis: primitivity, centering, degeneracy, variance
/// and the lattice scan, assembled into a [`chain::HypothesisReport`] plus
/// the spectral profile and scan outcome where they exist.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub report: chain::HypothesisReport,
    pub profile: Option<SpectralProfile>,
    pub lattice: Option<LatticeOutcome>,
}

pub fn analyze(chain_spec: &ChainSpec, t_max: f64, grid: usize) -> Result<Analysis, SpectralError> {
    use alloc::string::ToString;
    let k0 = chain::primitivity_index(chain_spec);
    let mut notes = Vec::new();
    if k0.is_none() {
        notes.push("no primitivity index up to the Wielandt bound".to_string());
        return Ok(Analysis {
            report: chain::HypothesisReport {
                primitive: false,
                k0: None,
                centered: false,
                nu_f: f64::NAN,
                nondegenerate: false,
                degeneracy: None,
                lattice: None,
                notes,
            },
            profile: None,
            lattice: None,
        });
    }
    let nu = chain::stationary_distribution(chain_spec)
        .map_err(|_| SpectralError::Internal("stationary distribution failed"))?;
    let nu_f = nu.mean(chain_spec.observable().as_slice());
    let centered = math::abs(nu_f) <= CENTERING_TOL;
    if !centered {
        notes.push("observable is not centered; rerun with centering".to_string());
        return Ok(Analysis {
            report: chain::HypothesisReport {
                primitive: true,
                k0,
                centered: false,
                nu_f,
                nondegenerate: false,
                degeneracy: None,
                lattice: None,
                notes,
            },
            profile: None,
            lattice: None,
        });
    }
    let mut profile = asymptotic_variance(chain_spec)?;
    let degeneracy = detect_degeneracy(chain_spec)?;
    if let Some(cert) = &degeneracy {
        notes.push("degenerate walk: cocycle certificate found, sigma^2 = 0".to_string());
        let _ = cert;
        return Ok(Analysis {
            report: chain::HypothesisReport {
                primitive: true,
                k0,
                centered: true,
                nu_f,
                nondegenerate: false,
                degeneracy,
                lattice: None,
                notes,
            },
            profile: Some(profile),
            lattice: None,
        });
    }
    let scan = detect_lattice(chain_spec, t_max, grid)?;
    profile.r_curve = scan.r_curve.clone();
    let (nondegenerate, lattice_cert) = match &scan.outcome {
        LatticeOutcome::Lattice(cert) => {
            notes.push("lattice certificate found; non-lattice hypothesis fails".to_string());
            (false, Some(cert.clone()))
        }
        LatticeOutcome::NonLattice(_) => (true, None),
    };
    Ok(Analysis {
        report: chain::HypothesisReport {
            primitive: true,
            k0,
            centered: true,
            nu_f,
            nondegenerate,
            degeneracy: None,
            lattice: lattice_cert,
            notes,
        },
        profile: Some(profile),
        lattice: Some(scan.outcome),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn perturbed_at_zero_is_p() {
        for c in fixtures::all() {
            let m = perturbed_matrix(&c, 0.0);
            for x in 0..c.dim() {
                for xp in 0..c.dim() {
                    assert_eq!(m[(x, xp)], Complex64::new(c.prob(x, xp), 0.0));
                }
            }
        }
    }

    #[test]
    fn perturbed_chain_a_at_pi_negates() {
        let c = fixtures::chain_a();
        let m = perturbed_matrix(&c, core::f64::consts::PI);
        for x in 0..2 {
            for xp in 0..2 {
                assert!((m[(x, xp)].re + 0.5).abs() < 1e-15);
                assert!(m[(x, xp)].im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn spectral_radius_of_stochastic_is_one() {
        for c in fixtures::all() {
            let m = perturbed_matrix(&c, 0.0);
            let r = spectral_radius(&m).unwrap();
            assert!((r - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn integer_observable_periodic_at_two_pi() {
        let c = fixtures::chain_a();
        let r = r_t(&c, math::TWO_PI).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chain_b_radius_strictly_below_one_at_one() {
        // golden value from the closed form |(e^it + e^{it sqrt2} + e^{-it(1+sqrt2)})/3|
        let r = r_t(&fixtures::chain_b(), 1.0).unwrap();
        assert!(r < 1.0);
        assert!((r - 0.3884749352).abs() < 1e-9, "r = {r}");
    }

    #[test]
    fn variance_chain_b_closed_form() {
        let p = asymptotic_variance(&fixtures::chain_b()).unwrap();
        assert!((p.sigma2 - fixtures::sigma2_b()).abs() < 1e-12);
        assert!((p.sigma2 - p.sigma2_series).abs() < 1e-10);
    }

    #[test]
    fn variance_chain_c_hand_poisson() {
        // theta = (30/7, -40/7), nu(f P theta) = 36/7, nu(f^2) = 12
        let p = asymptotic_variance(&fixtures::chain_c()).unwrap();
        assert!((p.sigma2 - fixtures::SIGMA2_C).abs() < 1e-12, "{}", p.sigma2);
        assert!((p.theta[0] - 30.0 / 7.0).abs() < 1e-12);
        assert!((p.theta[1] + 40.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn variance_chain_d_degenerate() {
        let p = asymptotic_variance(&fixtures::chain_d()).unwrap();
        assert!(p.sigma2 <= 1e-10);
    }

    #[test]
    fn poisson_equation_residual() {
        for c in [fixtures::chain_b(), fixtures::chain_c(), fixtures::chain_e()] {
            let p = asymptotic_variance(&c).unwrap();
            let theta = nalgebra::DVector::from_vec(p.theta.clone());
            let resid = &theta - c.transition() * &theta - c.observable();
            assert!(resid.amax() < 1e-10);
        }
    }

    #[test]
    fn degeneracy_chain_d_certificate() {
        let cert = detect_degeneracy(&fixtures::chain_d()).unwrap().unwrap();
        assert!(cert.residual <= COCYCLE_RESIDUAL_TOL);
        assert!(cert.m.abs() < 1e-12);
        // h = (0,1,1,1) up to the root offset
        let base = cert.h[0];
        assert!((cert.h[1] - base - 1.0).abs() < 1e-12);
        assert!((cert.h[2] - base - 1.0).abs() < 1e-12);
        assert!((cert.h[3] - base - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degeneracy_zero_observable() {
        let c = fixtures::chain_e().with_observable(vec![0.0; 3]).unwrap();
        let cert = detect_degeneracy(&c).unwrap().unwrap();
        assert!(cert.h.iter().all(|&v| v.abs() < 1e-14));
        assert!(cert.m.abs() < 1e-14);
    }

    #[test]
    fn degeneracy_absent_on_chain_b() {
        assert!(detect_degeneracy(&fixtures::chain_b()).unwrap().is_none());
    }

    #[test]
    fn degeneracy_iff_zero_variance_over_fixtures() {
        for c in fixtures::all() {
            let centered = crate::chain::center_function(&c).unwrap();
            let cert = detect_degeneracy(&centered).unwrap();
            let sigma2 = asymptotic_variance(&centered).unwrap().sigma2;
            assert_eq!(cert.is_some(), sigma2 <= 1e-10, "fixture {:?}", c.labels());
        }
    }

    #[test]
    fn lattice_chain_a_certificate() {
        let scan = detect_lattice(&fixtures::chain_a(), 10.0, 2048).unwrap();
        match scan.outcome {
            LatticeOutcome::Lattice(cert) => {
                assert!((cert.t_star - core::f64::consts::PI).abs() < 1e-7, "t* = {}", cert.t_star);
                assert!((cert.a_lat - 2.0).abs() < 1e-7);
                assert!((cert.theta_lat + 1.0).abs() < 1e-7);
                assert!(cert.edge_residual <= PHASE_RESIDUAL_TOL);
            }
            LatticeOutcome::NonLattice(e) => panic!("missed lattice: {e:?}"),
        }
    }

    #[test]
    fn lattice_chain_c_certificate() {
        let scan = detect_lattice(&fixtures::chain_c(), 10.0, 2048).unwrap();
        match scan.outcome {
            LatticeOutcome::Lattice(cert) => {
                assert!((cert.a_lat - 7.0).abs() < 1e-6, "a = {}", cert.a_lat);
                assert!((cert.theta_lat + 4.0).abs() < 1e-6, "theta = {}", cert.theta_lat);
                assert!(cert.edge_residual <= PHASE_RESIDUAL_TOL);
            }
            LatticeOutcome::NonLattice(e) => panic!("missed lattice: {e:?}"),
        }
    }

    #[test]
    fn nonlattice_chain_b_evidence() {
        let scan = detect_lattice(&fixtures::chain_b(), 10.0, 2048).unwrap();
        match scan.outcome {
            LatticeOutcome::NonLattice(e) => {
                // golden: sup over [0.05, 10] is about 0.99632 at the floor
                assert!(e.sup_r <= 1.0 - 1e-4, "sup_r = {}", e.sup_r);
                assert!(e.sup_r > 0.99);
            }
            LatticeOutcome::Lattice(c) => panic!("false lattice: {c:?}"),
        }
    }

    #[test]
    fn r_symmetry_in_t() {
        for c in [fixtures::chain_b(), fixtures::chain_c(), fixtures::chain_e()] {
            for &t in &[0.3, 1.1, 2.7] {
                let a = r_t(&c, t).unwrap();
                let b = r_t(&c, -t).unwrap();
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn r_bounded_by_one() {
        for c in fixtures::all() {
            for i in 0..60 {
                let t = 0.17 * i as f64;
                assert!(r_t(&c, t).unwrap() <= 1.0 + 1e-9);
            }
        }
    }

    #[test]
    fn lambda_expansion_chain_b_small_t() {
        let samples = lambda_expansion_check(&fixtures::chain_b(), &[0.01]).unwrap();
        let s = samples[0];
        // closed form (e^{it} + e^{it sqrt2} + e^{-it(1+sqrt2)})/3 at t = 0.01
        assert!((s.lambda.re - 0.9998528649604032).abs() < 1e-12);
        assert!(s.residual < 1e-6);
    }

    #[test]
    fn lambda_cubic_ratio_bounded() {
        for c in [fixtures::chain_b(), fixtures::chain_c()] {
            let ts: Vec<f64> = (0..6).map(|j| 0.2 * libm::pow(2.0, -(j as f64))).collect();
            let samples = lambda_expansion_check(&c, &ts).unwrap();
            let mut ratios: Vec<f64> = samples
                .iter()
                .map(|s| s.residual / (s.t * s.t * s.t))
                .collect();
            let mut sorted = ratios.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite ratio"));
            let median = sorted[sorted.len() / 2];
            for r in ratios.drain(..) {
                assert!(r <= 2.0 * median && r >= median / 2.0, "ratio {r} vs median {median}");
            }
        }
    }

    #[test]
    fn analyze_chain_d_reports_degenerate() {
        let a = analyze(&fixtures::chain_d(), 10.0, 512).unwrap();
        assert!(a.report.primitive && a.report.centered);
        assert!(!a.report.nondegenerate);
        assert!(a.report.degeneracy.is_some());
        assert!(a.profile.unwrap().sigma2 <= 1e-10);
    }
}
