//! Direct minimization of `q -> H_gamma(p, q)` over the simplex, independent
//! of the normalization-root construction used by [`crate::solve_minimizer`].

use crate::error::{FocalError, Result};
use crate::focal::{d1_unchecked, d2_unchecked, focal_loss_unchecked, FocusParam};
use crate::pmf::Pmf;
use crate::real::Real;

/// Largest support the grid search accepts.
pub const GRID_MAX_SUPPORT: usize = 6;

const STATIONARITY_TOL: f64 = 1e-8;
const MAX_BACKTRACKS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMode {
    /// Exhaustive search over `{k/resolution}` compositions with positive
    /// parts, then one finer pass with `refine` sub-steps per lattice step
    /// around the best point.
    Grid { resolution: usize, refine: usize },
    /// Newton-scaled multiplicative descent from `p`, stopped once the
    /// gradient is constant across the support to relative `1e-8`.
    Descent { max_iter: usize },
}

/// Minimizer of `H_gamma(p, .)` found by search rather than by solving
/// for the normalization constant.
pub fn brute_force_minimizer<T: Real>(gamma: FocusParam<T>, p: &Pmf<T>, mode: OracleMode) -> Result<Pmf<T>> {
    let support: Vec<usize> = p.support().collect();
    let weights: Vec<T> = support.iter().map(|&i| p.prob(i)).collect();
    if support.len() == 1 {
        return Ok(p.clone());
    }
    let q = match mode {
        OracleMode::Grid { resolution, refine } => grid(gamma, &weights, resolution, refine)?,
        OracleMode::Descent { max_iter } => descent(gamma, &weights, max_iter)?,
    };
    let mut probs = vec![T::zero(); p.len()];
    for (&i, v) in support.iter().zip(q) {
        probs[i] = v;
    }
    Ok(p.with_probs(probs))
}

fn objective<T: Real>(gamma: FocusParam<T>, w: &[T], q: &[T]) -> T {
    w.iter().zip(q).map(|(&a, &b)| a * focal_loss_unchecked(gamma, b)).sum()
}

fn grid<T: Real>(gamma: FocusParam<T>, w: &[T], resolution: usize, refine: usize) -> Result<Vec<T>> {
    let k = w.len();
    if k > GRID_MAX_SUPPORT {
        return Err(FocalError::domain(
            "brute_force_minimizer",
            format!("grid mode supports |S| <= {}, got {}", GRID_MAX_SUPPORT, k),
        ));
    }
    if resolution < k {
        return Err(FocalError::domain("brute_force_minimizer", "resolution must be at least |S|"));
    }
    let r = T::from_usize_lossy(resolution);
    let mut best = (T::infinity(), vec![T::zero(); k]);
    let mut parts = vec![0usize; k];
    compositions(resolution, k, 0, &mut parts, &mut |c| {
        let q: Vec<T> = c.iter().map(|&n| T::from_usize_lossy(n) / r).collect();
        let h = objective(gamma, w, &q);
        if h < best.0 {
            best = (h, q);
        }
    });

    if refine > 0 {
        let step = T::one() / (r * T::from_usize_lossy(refine));
        let center = best.1.clone();
        let span = 2 * refine + 1;
        let mut offsets = vec![0usize; k - 1];
        loop {
            let mut q = Vec::with_capacity(k);
            for (j, &o) in offsets.iter().enumerate() {
                let shift = T::from_usize_lossy(o) - T::from_usize_lossy(refine);
                q.push(center[j] + shift * step);
            }
            let head: T = q.iter().copied().sum();
            q.push(T::one() - head);
            if q.iter().all(|&v| v > T::zero()) {
                let h = objective(gamma, w, &q);
                if h < best.0 {
                    best = (h, q);
                }
            }
            let mut j = 0;
            while j < offsets.len() {
                offsets[j] += 1;
                if offsets[j] < span {
                    break;
                }
                offsets[j] = 0;
                j += 1;
            }
            if j == offsets.len() {
                break;
            }
        }
    }
    Ok(best.1)
}

/// Calls `f` with every composition of `total` into `k - slot` positive parts
/// appended to `parts[..slot]`.
fn compositions(total: usize, k: usize, slot: usize, parts: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if slot + 1 == k {
        parts[slot] = total;
        f(parts);
        return;
    }
    let remaining = k - slot - 1;
    for n in 1..=total - remaining {
        parts[slot] = n;
        compositions(total - n, k, slot + 1, parts, f);
    }
}

fn descent<T: Real>(gamma: FocusParam<T>, w: &[T], max_iter: usize) -> Result<Vec<T>> {
    let k = w.len();
    let mut q = w.to_vec();
    let mut h = objective(gamma, w, &q);
    let slack = T::epsilon() * T::c(16.0);
    for _ in 0..max_iter {
        let g: Vec<T> = (0..k).map(|i| w[i] * d1_unchecked(gamma, q[i])).collect();
        let curv: Vec<T> = (0..k).map(|i| w[i] * d2_unchecked(gamma, q[i])).collect();
        let mean = g.iter().copied().sum::<T>() / T::from_usize_lossy(k);
        let spread = g.iter().map(|&v| (v - mean).abs()).fold(T::zero(), T::max);
        if spread <= T::c(STATIONARITY_TOL) * mean.abs() {
            return Ok(q);
        }
        let inv_sum: T = curv.iter().map(|&c| T::one() / c).sum();
        let lambda = g.iter().zip(&curv).map(|(&a, &c)| a / c).sum::<T>() / inv_sum;
        let d: Vec<T> = g.iter().zip(&curv).map(|(&a, &c)| -(a - lambda) / c).collect();

        let mut eta = T::one();
        let mut accepted = false;
        for _ in 0..MAX_BACKTRACKS {
            let mut trial: Vec<T> = q.iter().zip(&d).map(|(&x, &dx)| x * (eta * dx / x).exp()).collect();
            let total: T = trial.iter().copied().sum();
            trial.iter_mut().for_each(|x| *x = *x / total);
            if trial.iter().all(|&x| x > T::zero() && x < T::one()) {
                let h_trial = objective(gamma, w, &trial);
                if h_trial <= h + slack * h.abs() {
                    q = trial;
                    h = h_trial;
                    accepted = true;
                    break;
                }
            }
            eta = eta / T::c(2.0);
        }
        if !accepted {
            break;
        }
    }
    Err(FocalError::Budget {
        op: "brute_force_minimizer",
        budget: max_iter,
    })
}
