//! Time reversal with respect to the stationary law, and an exact
//! enumeration oracle for the duality identity
//! `E_m(F(X_1..X_n)) = E*_nu(F(X_n*..X_1*) m(X*_{n+1}) / nu(X*_{n+1}))`.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::{DMatrix, DVector};

use crate::chain::{self, ChainSpec};
use crate::math;

#[derive(Debug, Clone, PartialEq)]
pub enum DualError {
    NotPrimitive,
    /// Path enumeration would exceed the term budget.
    BudgetExceeded { needed: u128, budget: u128 },
    BadInitialDistribution,
}

impl fmt::Display for DualError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DualError::NotPrimitive => write!(f, "chain is not primitive"),
            DualError::BudgetExceeded { needed, budget } => {
                write!(f, "enumeration needs {needed} path terms, budget is {budget}")
            }
            DualError::BadInitialDistribution => write!(f, "initial distribution invalid"),
        }
    }
}

/// `P*(x, x*) = nu(x*) P(x*, x) / nu(x)`, observable `-f`.
pub fn dual_chain(chain_spec: &ChainSpec) -> Result<ChainSpec, DualError> {
    let nu = chain::stationary_distribution(chain_spec).map_err(|_| DualError::NotPrimitive)?;
    let d = chain_spec.dim();
    let p_star = DMatrix::from_fn(d, d, |x, xs| {
        nu.prob(xs) * chain_spec.prob(xs, x) / nu.prob(x)
    });
    let f_star = DVector::from_fn(d, |x, _| -chain_spec.f(x));
    Ok(ChainSpec::from_parts(
        chain_spec.labels().to_vec(),
        p_star,
        f_star,
    ))
}

/// Default path-term budget for exact duality sums.
pub const DEFAULT_DUALITY_BUDGET: u128 = 10_000_000;

/// Both sides of the duality identity by exact summation over all paths,
/// in lexicographic order. `F` sees state indices `(X_1, ..., X_n)`.
pub fn verify_duality(
    chain_spec: &ChainSpec,
    n: usize,
    functional: &dyn Fn(&[usize]) -> f64,
    initial: &[f64],
    budget: u128,
) -> Result<(f64, f64), DualError> {
    let d = chain_spec.dim();
    if initial.len() != d
        || initial.iter().any(|&p| !(0.0..=1.0 + 1e-12).contains(&p))
        || math::abs(initial.iter().sum::<f64>() - 1.0) > 1e-9
    {
        return Err(DualError::BadInitialDistribution);
    }
    let needed = (d as u128).pow(n as u32 + 2);
    if needed > budget {
        return Err(DualError::BudgetExceeded { needed, budget });
    }
    let nu = chain::stationary_distribution(chain_spec).map_err(|_| DualError::NotPrimitive)?;
    let dual = dual_chain(chain_spec)?;

    // lhs: sum over x_0 ~ m and paths (x_1..x_n)
    let mut lhs = 0.0;
    let mut path = alloc::vec![0usize; n];
    let mut rev = alloc::vec![0usize; n];
    for x0 in 0..d {
        if initial[x0] == 0.0 {
            continue;
        }
        sum_paths(chain_spec, x0, initial[x0], &mut path, 0, &mut |p, w| {
            lhs += w * functional(p);
        });
    }

    // rhs: dual chain from nu, n+1 steps, F on the reversed first n states,
    // weight m(X*_{n+1}) / nu(X*_{n+1})
    let mut rhs = 0.0;
    let mut dual_path = alloc::vec![0usize; n + 1];
    for x0 in 0..d {
        sum_paths(&dual, x0, nu.prob(x0), &mut dual_path, 0, &mut |p, w| {
            let last = p[n];
            if nu.prob(last) > 0.0 {
                for k in 0..n {
                    rev[k] = p[n - 1 - k];
                }
                rhs += w * functional(&rev) * initial[last] / nu.prob(last);
            }
        });
    }
    Ok((lhs, rhs))
}

fn sum_paths(
    chain_spec: &ChainSpec,
    from: usize,
    weight: f64,
    path: &mut Vec<usize>,
    depth: usize,
    visit: &mut impl FnMut(&[usize], f64),
) {
    if depth == path.len() {
        visit(path, weight);
        return;
    }
    for xp in 0..chain_spec.dim() {
        let p = chain_spec.prob(from, xp);
        if p > 0.0 {
            path[depth] = xp;
            sum_paths(chain_spec, xp, weight * p, path, depth + 1, visit);
        }
    }
}

/// A canned battery of path functionals for the duality oracle. Entries
/// are deterministic and cover indicators, additive functionals, products
/// and survival-type events.
pub fn functional_battery(
    chain_spec: &ChainSpec,
    count: usize,
) -> Vec<(String, Box<dyn Fn(&[usize]) -> f64>)> {
    use alloc::format;
    let d = chain_spec.dim();
    let f: Vec<f64> = chain_spec.observable().as_slice().to_vec();
    let mut out: Vec<(String, Box<dyn Fn(&[usize]) -> f64>)> = Vec::new();
    out.push(("constant 1".into(), Box::new(|_: &[usize]| 1.0)));
    for s in 0..d {
        out.push((
            format!("indicator X_1 = state {s}"),
            Box::new(move |p: &[usize]| if p[0] == s { 1.0 } else { 0.0 }),
        ));
    }
    for s in 0..d {
        out.push((
            format!("indicator X_n = state {s}"),
            Box::new(move |p: &[usize]| if p[p.len() - 1] == s { 1.0 } else { 0.0 }),
        ));
    }
    {
        let f = f.clone();
        out.push((
            "walk sum".into(),
            Box::new(move |p: &[usize]| p.iter().map(|&x| f[x]).sum()),
        ));
    }
    {
        let f = f.clone();
        out.push((
            "walk sum squared".into(),
            Box::new(move |p: &[usize]| {
                let s: f64 = p.iter().map(|&x| f[x]).sum();
                s * s
            }),
        ));
    }
    {
        let f = f.clone();
        out.push((
            "gaussian of walk sum".into(),
            Box::new(move |p: &[usize]| {
                let s: f64 = p.iter().map(|&x| f[x]).sum();
                math::exp(-0.5 * s * s)
            }),
        ));
    }
    {
        let f = f.clone();
        out.push((
            "survival from 0.5".into(),
            Box::new(move |p: &[usize]| {
                let mut y = 0.5;
                for &x in p {
                    y += f[x];
                    if y <= 0.0 {
                        return 0.0;
                    }
                }
                1.0
            }),
        ));
    }
    {
        let f = f.clone();
        out.push((
            "max partial sum below 1".into(),
            Box::new(move |p: &[usize]| {
                let mut y = 0.0f64;
                let mut m = f64::NEG_INFINITY;
                for &x in p {
                    y += f[x];
                    m = m.max(y);
                }
                if m < 1.0 {
                    1.0
                } else {
                    0.0
                }
            }),
        ));
    }
    out.push((
        "indicator first equals last".into(),
        Box::new(|p: &[usize]| if p[0] == p[p.len() - 1] { 1.0 } else { 0.0 }),
    ));
    out.push((
        "number of visits to state 0".into(),
        Box::new(|p: &[usize]| p.iter().filter(|&&x| x == 0).count() as f64),
    ));
    {
        let f = f.clone();
        out.push((
            "product cos(f)".into(),
            Box::new(move |p: &[usize]| p.iter().map(|&x| libm::cos(f[x])).product()),
        ));
    }
    // specific-path indicators in lexicographic order to fill the battery
    let mut j = 0usize;
    while out.len() < count {
        let target: Vec<usize> = (0..8).map(|k| (j + k) % d).collect();
        out.push((
            format!("indicator of cyclic pattern offset {j}"),
            Box::new(move |p: &[usize]| {
                if p.iter().enumerate().all(|(k, &x)| x == target[k % 8]) {
                    1.0
                } else {
                    0.0
                }
            }),
        ));
        j += 1;
    }
    out.truncate(count);
    out
}
