//! Sampling estimators for the moduli of convexity and smoothness.
//!
//! Both moduli are extremal values over pairs of vectors on a nonconvex
//! constraint set. We draw random pairs that satisfy the constraints exactly
//! and polish promising ones with a derivative-free coordinate descent over
//! the raw sampling parameters. The estimate for a budget of `n` pairs is the
//! best value over a prefix of a fixed sample stream, so enlarging the budget
//! can only improve it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{lp_norm, SpaceConfig};
use crate::error::{domain, Result};

/// Number of random pairs and refinement sweeps per estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingBudget {
    pub pairs: usize,
    pub refine_steps: usize,
}

impl Default for SamplingBudget {
    fn default() -> Self {
        Self {
            pairs: 2000,
            refine_steps: 50,
        }
    }
}

/// Samples that are always refined, regardless of their raw value.
const WARM_REFINES: usize = 8;

/// Modulus of convexity of any Hilbert space, `1 - sqrt(1 - eps^2/4)`.
pub fn hilbert_modulus(eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps <= 2.0) {
        return Err(domain(format!("eps must lie in (0, 2], got {eps}")));
    }
    // 1 - sqrt(1 - a) written as a / (1 + sqrt(1 - a)) to keep small-eps accuracy.
    let a = eps * eps / 4.0;
    Ok(a / (1.0 + (1.0 - a).sqrt()))
}

/// Upper estimate of `delta_X(eps) = inf { 1 - ||x+y||/2 : ||x|| = ||y|| = 1, ||x-y|| = eps }`.
pub fn estimate_modulus_of_convexity(space: &SpaceConfig, eps: f64, budget: &SamplingBudget, seed: u64) -> Result<f64> {
    if !(eps > 0.0 && eps <= 2.0) {
        return Err(domain(format!("eps must lie in (0, 2], got {eps}")));
    }
    let n = space.dim();
    let p = space.p();
    if eps == 2.0 {
        // Antipodal unit vectors always realize the value 1.
        return Ok(1.0);
    }
    if n == 1 {
        return Err(domain("in dimension 1 only antipodal unit pairs exist (eps = 2)"));
    }
    let objective = |z: &[f64]| -> f64 {
        let (xr, d) = z.split_at(n);
        match unit_pair_at_distance(xr, d, eps, p) {
            Some((x, y)) => {
                let s: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
                (1.0 - 0.5 * lp_norm(&s, p)).max(0.0)
            }
            None => f64::INFINITY,
        }
    };
    Ok(search(2 * n, budget, seed, objective))
}

/// Lower estimate of `rho_X(tau) = sup { (||x+y|| + ||x-y||)/2 - 1 : ||x|| = 1, ||y|| = tau }`.
pub fn estimate_modulus_of_smoothness(
    space: &SpaceConfig,
    tau: f64,
    budget: &SamplingBudget,
    seed: u64,
) -> Result<f64> {
    if tau.is_nan() || tau < 0.0 || !tau.is_finite() {
        return Err(domain(format!("tau must be finite and >= 0, got {tau}")));
    }
    if tau == 0.0 {
        return Ok(0.0);
    }
    let n = space.dim();
    let p = space.p();
    let objective = |z: &[f64]| -> f64 {
        let (xr, yr) = z.split_at(n);
        let (Some(x), Some(y)) = (normalized(xr, p), normalized(yr, p)) else {
            return f64::INFINITY;
        };
        let plus: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + tau * b).collect();
        let minus: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - tau * b).collect();
        let rho = (0.5 * (lp_norm(&plus, p) + lp_norm(&minus, p)) - 1.0).max(0.0);
        -rho
    };
    Ok(-search(2 * n, budget, seed, objective))
}

/// Minimizes `objective` over a prefix-consistent random stream with refinement.
fn search<F: Fn(&[f64]) -> f64>(len: usize, budget: &SamplingBudget, seed: u64, objective: F) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::INFINITY;
    let mut best_raw = f64::INFINITY;
    for i in 0..budget.pairs {
        let z: Vec<f64> = (0..len).map(|_| StandardNormal.sample(&mut rng)).collect();
        let raw = objective(&z);
        if !raw.is_finite() {
            continue;
        }
        let value = if i < WARM_REFINES || raw < best_raw {
            coordinate_descent(z, raw, budget.refine_steps, &objective)
        } else {
            raw
        };
        best_raw = best_raw.min(raw);
        best = best.min(value);
    }
    best
}

fn coordinate_descent<F: Fn(&[f64]) -> f64>(mut z: Vec<f64>, mut value: f64, sweeps: usize, objective: &F) -> f64 {
    let mut step = 0.25;
    for _ in 0..sweeps {
        let mut improved = false;
        for j in 0..z.len() {
            for dir in [1.0, -1.0] {
                let old = z[j];
                z[j] = old + dir * step;
                let v = objective(&z);
                if v < value {
                    value = v;
                    improved = true;
                    break;
                }
                z[j] = old;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    value
}

fn normalized(v: &[f64], p: f64) -> Option<Vec<f64>> {
    let n = lp_norm(v, p);
    if n == 0.0 || !n.is_finite() {
        return None;
    }
    Some(v.iter().map(|a| a / n).collect())
}

/// Unit vectors `x = xr/||xr||` and `y` with `||x - y|| = eps`.
///
/// `y` runs along `normalize(cos(t) x + sin(t) d)` from `x` (t = 0) to `-x`
/// (t = pi); the distance is continuous in `t`, so bisection finds a root.
fn unit_pair_at_distance(xr: &[f64], d: &[f64], eps: f64, p: f64) -> Option<(Vec<f64>, Vec<f64>)> {
    let x = normalized(xr, p)?;
    let point = |t: f64| -> Option<Vec<f64>> {
        let (s, c) = t.sin_cos();
        let v: Vec<f64> = x.iter().zip(d).map(|(a, b)| c * a + s * b).collect();
        normalized(&v, p)
    };
    let gap = |y: &[f64]| -> f64 {
        let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        lp_norm(&diff, p) - eps
    };
    let (mut lo, mut hi) = (0.0_f64, std::f64::consts::PI);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let y = point(mid)?;
        if gap(&y) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let y = point(hi)?;
    Some((x, y))
}
