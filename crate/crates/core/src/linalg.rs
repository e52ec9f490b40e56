//! Thin wrappers over nalgebra for the handful of solves the crate needs.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::math;

/// All eigenvalues of a complex matrix via Schur triangularization.
pub fn complex_eigenvalues(m: &DMatrix<Complex64>) -> Vec<Complex64> {
    let t = m.clone().schur().unpack().1;
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

/// Dominant-modulus estimate by power iteration; `Err` on stall.
///
/// Used instead of a full eigensolve for large matrices. Convergence is
/// declared when the modulus estimate stabilizes to `tol` over a window.
pub fn power_iteration_modulus(
    m: &DMatrix<Complex64>,
    tol: f64,
    max_iter: usize,
) -> Result<f64, &'static str> {
    let d = m.nrows();
    // deterministic pseudo-random start to avoid orthogonal initialization
    let mut v: Vec<Complex64> = (0..d)
        .map(|i| {
            let a = 0.5 + 0.5 * libm::sin(1.0 + i as f64 * 2.39996);
            let b = 0.5 * libm::cos(0.7 + i as f64 * 1.23);
            Complex64::new(a, b)
        })
        .collect();
    let mut v = nalgebra::DVector::from_vec(v.drain(..).collect::<Vec<_>>());
    let mut prev = f64::NAN;
    let mut stable = 0usize;
    for _ in 0..max_iter {
        let w = m * &v;
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>();
        let norm = math::sqrt(norm);
        if norm == 0.0 {
            return Ok(0.0);
        }
        let vnorm = math::sqrt(v.iter().map(|z| z.norm_sqr()).sum::<f64>());
        let est = norm / vnorm;
        v = w / Complex64::new(norm, 0.0);
        if (est - prev).abs() <= tol * est.max(1.0) {
            stable += 1;
            if stable >= 8 {
                return Ok(est);
            }
        } else {
            stable = 0;
        }
        prev = est;
    }
    Err("power iteration did not converge")
}
