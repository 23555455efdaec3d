//! Empirical checks. Each returns a [`CheckReport`] whose `passed` flag is
//! decided from the reported metrics and tolerance only.

use rayon::prelude::*;

use super::fit::PowerFit;
use super::sampling::{anchored_near_pairs, gaussian, log_uniform, rng, structured_pairs};
use crate::catalogue::{representatives, ConvexFunctionSpec, ExtReal};
use crate::envelope::{envelope, envelope_gradient, prox, EnvelopeConfig};
use crate::error::Result;
use crate::legendre::{conjugate_of_values, conjugate_on_grid, GridSpec};
use crate::lp_space::{
    dual_exponent, duality_map, estimate_modulus_of_convexity, estimate_modulus_of_smoothness, hilbert_modulus,
    lp_norm, phi_p, SamplingBudget, SpaceConfig,
};
use crate::numeric::{dot, lin_space, log_space, max_abs, sub};
use crate::report::CheckReport;
use rand::Rng;

fn diff_pair(x: &[f64], y: &[f64]) -> Vec<f64> {
    sub(x, y)
}

// ---------------------------------------------------------------------------
// Duality map

/// Defining identities `<J_p x, x> = ||x||^p`, `||J_p x||_{p*} = ||x||^{p-1}`
/// and the round trip `J_{p*}(J_p x) = x` on random vectors of mixed scale.
pub fn check_duality_map_law(
    dims: &[usize],
    exponents: &[f64],
    samples: usize,
    seed: u64,
    tol: Option<f64>,
) -> Result<CheckReport> {
    let law_tol = tol.unwrap_or(1e-9);
    let trip_tol = tol.unwrap_or(1e-10);
    let mut r = rng(seed);
    let (mut worst_pairing, mut worst_norm, mut worst_trip) = (0.0_f64, 0.0_f64, 0.0_f64);
    for &n in dims {
        for &p in exponents {
            let q = dual_exponent(p)?;
            for _ in 0..samples {
                let scale = log_uniform(&mut r, 1e-3, 1e3);
                let x: Vec<f64> = gaussian(&mut r, n).iter().map(|v| v * scale).collect();
                let j = duality_map(&x, p);
                let norm = lp_norm(&x, p);
                let pairing = dot(&j, &x);
                worst_pairing = worst_pairing.max((pairing - norm.powf(p)).abs() / norm.powf(p));
                worst_norm = worst_norm.max((lp_norm(&j, q) - norm.powf(p - 1.0)).abs() / norm.powf(p - 1.0));
                let back = duality_map(&j, q);
                let trip = sub(&back, &x);
                worst_trip = worst_trip.max(max_abs(&trip) / max_abs(&x));
            }
        }
    }
    let mut report = CheckReport::new("duality_map_law", law_tol, seed);
    report.metric("max_rel_pairing_error", worst_pairing);
    report.metric("max_rel_norm_error", worst_norm);
    report.metric("max_rel_round_trip_error", worst_trip);
    report.metric("round_trip_tolerance", trip_tol);
    report.metric("vectors", (samples * dims.len() * exponents.len()) as f64);
    Ok(report.conclude(worst_pairing <= law_tol && worst_norm <= law_tol && worst_trip <= trip_tol))
}

/// Outcome of the strong p-monotonicity estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityEstimate {
    pub report: CheckReport,
    /// `min <J_p x - J_p y, x - y> / ||x - y||^p` over the samples.
    pub c_hat: Option<f64>,
}

/// Empirical constant of strong p-monotonicity of `J_p` on `l^p`, `p >= 2`.
pub fn check_strong_p_monotonicity_of_jp(space: &SpaceConfig, samples: usize, seed: u64) -> MonotonicityEstimate {
    let p = space.p();
    let name = format!("strong_p_monotonicity_jp/p={p}/dim={}", space.dim());
    if p < 2.0 {
        return MonotonicityEstimate {
            report: CheckReport::inapplicable(name, "requires p >= 2; use the Hoelder check", seed),
            c_hat: None,
        };
    }
    let mut r = rng(seed);
    let pairs = structured_pairs(&mut r, space.dim(), samples);
    let (mut c_hat, mut negatives, mut used) = (f64::INFINITY, 0usize, 0usize);
    for (x, y) in &pairs {
        let d = diff_pair(x, y);
        let dn = lp_norm(&d, p);
        if dn == 0.0 {
            continue;
        }
        used += 1;
        let lhs = dot(&diff_pair(&duality_map(x, p), &duality_map(y, p)), &d);
        if lhs < 0.0 {
            negatives += 1;
        }
        c_hat = c_hat.min(lhs / dn.powf(p));
    }
    let mut report = CheckReport::new(name, 1e-12, seed);
    report.metric("c_hat", c_hat);
    report.metric("reference_constant", 2f64.powf(2.0 - p));
    report.metric("negative_ratios", negatives as f64);
    report.metric("pairs", used as f64);
    let passed = used > 0 && c_hat > 1e-12 && negatives == 0;
    MonotonicityEstimate {
        report: report.conclude(passed),
        c_hat: (used > 0).then_some(c_hat),
    }
}

fn dual_constant(space: &SpaceConfig, samples: usize, seed: u64) -> Result<f64> {
    let dual = space.dual();
    check_strong_p_monotonicity_of_jp(&dual, samples, seed ^ 0x5eed)
        .c_hat
        .ok_or_else(|| crate::error::domain("no usable pairs for the dual monotonicity constant"))
}

/// `(p-1)`-Hoelder continuity of `J_p` on `l^p`, `1 < p <= 2`.
pub fn check_holder_of_jp(
    space: &SpaceConfig,
    samples: usize,
    seed: u64,
    tol: Option<f64>,
) -> Result<(CheckReport, Option<PowerFit>)> {
    let p = space.p();
    let name = format!("holder_jp/p={p}/dim={}", space.dim());
    if p > 2.0 {
        return Ok((
            CheckReport::inapplicable(name, "requires p <= 2; use the monotonicity check", seed),
            None,
        ));
    }
    let q = dual_exponent(p)?;
    let c_hat = dual_constant(space, samples, seed)?;
    let n = space.dim();
    let mut r = rng(seed);
    let near = anchored_near_pairs(&mut r, &vec![0.0; n], samples);
    // Rays x, s x, where homogeneity makes the exponent exact.
    let rays: Vec<(Vec<f64>, Vec<f64>)> = (0..samples / 10)
        .map(|_| {
            let t = log_uniform(&mut r, 1e-4, 1.0);
            let u = gaussian(&mut r, n);
            (
                u.iter().map(|v| v * t).collect(),
                u.iter().map(|v| v * 2.0 * t).collect(),
            )
        })
        .collect();
    let extremes = structured_pairs(&mut r, n, samples / 10);
    let slack = tol.unwrap_or(0.01);
    let mut fit_pairs = Vec::new();
    let (mut violations, mut worst) = (0usize, 0.0_f64);
    for (k, (x, y)) in near.iter().chain(&rays).chain(&extremes).enumerate() {
        let dx = lp_norm(&diff_pair(x, y), p);
        let dj = lp_norm(&diff_pair(&duality_map(x, p), &duality_map(y, p)), q);
        if dx == 0.0 {
            continue;
        }
        let bound = (dx / c_hat).powf(p - 1.0);
        worst = worst.max(dj / bound);
        if dj > bound * (1.0 + slack) {
            violations += 1;
        }
        if k < near.len() + rays.len() {
            fit_pairs.push((dx, dj));
        }
    }
    let fit = PowerFit::fit(&fit_pairs);
    let exponent = fit.map_or(f64::NAN, |f| f.exponent);
    let mut report = CheckReport::new(name, slack, seed);
    report.metric("fitted_exponent", exponent);
    report.metric("target_exponent", p - 1.0);
    report.metric("c_hat_dual", c_hat);
    report.metric("max_bound_ratio", worst);
    report.metric("violations", violations as f64);
    if let Some(f) = fit {
        report.metric("fit_max_residual", f.max_residual);
        report.metric("fit_samples", f.sample_count as f64);
    }
    let ok = (exponent - (p - 1.0)).abs() <= 0.1 && violations == 0;
    Ok((report.conclude(ok), fit))
}

/// Strict and uniform convexity of `phi_p`: positive convexity gaps and a
/// positive fitted `kappa = min gap / (t (1-t) ||x - y||^max(2,p))`.
pub fn check_phi_strict_and_uniform_convexity(space: &SpaceConfig, samples: usize, seed: u64) -> CheckReport {
    let p = space.p();
    let n = space.dim();
    let mut r = rng(seed);
    let power = p.max(2.0);
    let (mut kappa, mut nonpositive) = (f64::INFINITY, 0usize);
    for _ in 0..samples {
        let x = gaussian(&mut r, n);
        let y = gaussian(&mut r, n);
        let t: f64 = r.gen_range(0.01..0.99);
        let m: Vec<f64> = x.iter().zip(&y).map(|(a, b)| t * a + (1.0 - t) * b).collect();
        let gap = t * phi_p(&x, p) + (1.0 - t) * phi_p(&y, p) - phi_p(&m, p);
        let d = lp_norm(&diff_pair(&x, &y), p);
        if d == 0.0 {
            continue;
        }
        if gap <= 0.0 {
            nonpositive += 1;
        }
        kappa = kappa.min(gap / (t * (1.0 - t) * d.powf(power)));
    }
    let mut report = CheckReport::new(format!("phi_convexity/p={p}/dim={n}"), 0.0, seed);
    report.metric("kappa_hat", kappa);
    report.metric("nonpositive_gaps", nonpositive as f64);
    report.metric("samples", samples as f64);
    report.conclude(nonpositive == 0 && kappa > 0.0)
}

// ---------------------------------------------------------------------------
// Moduli

/// Modulus-of-convexity estimates: the Hilbert value at 1, domination by the
/// Hilbert modulus, and power-type exponents.
pub fn check_modulus_of_convexity(budget: &SamplingBudget, seed: u64, tol: Option<f64>) -> Result<CheckReport> {
    let exp_tol = tol.unwrap_or(0.15);
    let eps_grid = log_space(0.05, 0.5, 10);
    let mut report = CheckReport::new("modulus_of_convexity", exp_tol, seed);
    let hilbert_at_one = estimate_modulus_of_convexity(&SpaceConfig::new(2, 2.0)?, 1.0, budget, seed)?;
    let hilbert_err = (hilbert_at_one - (1.0 - 3f64.sqrt() / 2.0)).abs();
    report.metric("hilbert_delta_at_1_error", hilbert_err);
    let mut ok = hilbert_err <= 1e-3;
    let mut max_excess = f64::NEG_INFINITY;
    let mut min_exponent = f64::INFINITY;
    for (k, p) in [1.5, 2.0, 3.0, 4.0].into_iter().enumerate() {
        let space = SpaceConfig::new(2, p)?;
        let mut pairs = Vec::new();
        for (i, &e) in eps_grid.iter().chain(&[1.0, 1.5]).enumerate() {
            let d = estimate_modulus_of_convexity(&space, e, budget, seed.wrapping_add((k * 100 + i) as u64))?;
            max_excess = max_excess.max(d - hilbert_modulus(e)?);
            if i < eps_grid.len() {
                pairs.push((e, d));
            }
        }
        let exponent = PowerFit::fit(&pairs).map_or(f64::NAN, |f| f.exponent);
        report.metric(format!("exponent_l{p}"), exponent);
        min_exponent = min_exponent.min(exponent);
        let target = p.max(2.0);
        if p != 2.0 && p != 4.0 {
            ok &= (exponent - target).abs() <= exp_tol;
        }
    }
    report.metric("max_excess_over_hilbert", max_excess);
    report.metric("min_exponent", min_exponent);
    ok &= max_excess <= 1e-9 && min_exponent >= 2.0 - exp_tol;
    Ok(report.conclude(ok))
}

/// Modulus-of-smoothness estimates: the Hilbert closed form, the trivial
/// bound `rho(tau) <= tau`, and the power-type exponent of `l^1.5`.
pub fn check_modulus_of_smoothness(budget: &SamplingBudget, seed: u64, tol: Option<f64>) -> Result<CheckReport> {
    let exp_tol = tol.unwrap_or(0.15);
    let taus = log_space(0.05, 0.5, 10);
    let mut report = CheckReport::new("modulus_of_smoothness", exp_tol, seed);
    let mut hilbert_err = 0.0_f64;
    let mut bound_violations = 0usize;
    for (k, p) in [1.5, 2.0, 3.0].into_iter().enumerate() {
        let space = SpaceConfig::new(2, p)?;
        let mut pairs = Vec::new();
        for (i, &tau) in taus.iter().enumerate() {
            let rho = estimate_modulus_of_smoothness(&space, tau, budget, seed.wrapping_add((k * 100 + i) as u64))?;
            if !(rho >= 0.0 && rho <= tau * (1.0 + 1e-12)) {
                bound_violations += 1;
            }
            if p == 2.0 {
                hilbert_err = hilbert_err.max((rho - ((1.0 + tau * tau).sqrt() - 1.0)).abs());
            }
            pairs.push((tau, rho));
        }
        let exponent = PowerFit::fit(&pairs).map_or(f64::NAN, |f| f.exponent);
        report.metric(format!("exponent_l{p}"), exponent);
    }
    report.metric("hilbert_max_error", hilbert_err);
    report.metric("bound_violations", bound_violations as f64);
    let e15 = report.get("exponent_l1.5").unwrap_or(f64::NAN);
    let ok = hilbert_err <= 1e-6 && bound_violations == 0 && e15 >= 1.5 - exp_tol && e15 <= 2.0 + exp_tol;
    Ok(report.conclude(ok))
}

// ---------------------------------------------------------------------------
// Catalogue

/// Random point for `f`: inside the box for indicators, otherwise Gaussian
/// around the anchor.
fn sample_point<R: Rng>(r: &mut R, f: &ConvexFunctionSpec, dim: usize, spread: f64) -> Vec<f64> {
    match f {
        ConvexFunctionSpec::BoxIndicator { lo, hi } => {
            lo.iter().zip(hi).map(|(a, b)| a + r.gen::<f64>() * (b - a)).collect()
        }
        _ => f
            .anchor(dim)
            .iter()
            .zip(gaussian(r, dim))
            .map(|(a, g)| a + spread * g)
            .collect(),
    }
}

/// Midpoint convexity, subgradient inequality, monotonicity and cyclical
/// monotonicity of the selected subgradients for every catalogue entry.
pub fn check_catalogue_subgradients(dim: usize, samples: usize, seed: u64, tol: Option<f64>) -> Vec<CheckReport> {
    let slack = tol.unwrap_or(1e-9);
    representatives(dim)
        .into_par_iter()
        .enumerate()
        .map(|(k, f)| {
            let s = seed.wrapping_add(k as u64);
            let mut r = rng(s);
            let (mut midpoint, mut subgrad, mut mono, mut cyclic) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
            for _ in 0..samples {
                let x = sample_point(&mut r, &f, dim, 2.0);
                let y = sample_point(&mut r, &f, dim, 2.0);
                let m: Vec<f64> = x.iter().zip(&y).map(|(a, b)| 0.5 * (a + b)).collect();
                if let (Some(fx), Some(fy), Some(fm)) = (
                    f.evaluate(&x).finite(),
                    f.evaluate(&y).finite(),
                    f.evaluate(&m).finite(),
                ) {
                    midpoint = midpoint.max(fm - 0.5 * (fx + fy));
                    let gx = f.subgradient_any(&x).expect("finite value has a subgradient");
                    let gy = f.subgradient_any(&y).expect("finite value has a subgradient");
                    // f(y) >= f(x) + <g_x, y - x>
                    subgrad = subgrad.max(fx - fy - dot(&gx, &sub(&x, &y)));
                    mono = mono.max(-dot(&sub(&gx, &gy), &sub(&x, &y)));
                }
            }
            for _ in 0..samples / 10 {
                let m = r.gen_range(2..=5);
                let cycle: Vec<Vec<f64>> = (0..m).map(|_| sample_point(&mut r, &f, dim, 2.0)).collect();
                let mut sum = 0.0;
                for i in 0..m {
                    let g = f.subgradient_any(&cycle[i]).expect("in domain");
                    sum += dot(&g, &sub(&cycle[(i + 1) % m], &cycle[i]));
                }
                cyclic = cyclic.max(sum);
            }
            let mut report = CheckReport::new(format!("catalogue/{}/dim={dim}", f.name()), slack, s);
            report.metric("max_midpoint_excess", midpoint);
            report.metric("max_subgradient_excess", subgrad);
            report.metric("max_monotonicity_defect", mono);
            report.metric("max_cyclic_sum", cyclic);
            report.conclude(midpoint <= slack && subgrad <= slack && mono <= slack && cyclic <= slack)
        })
        .collect()
}

/// Closed-form proximal points against brute-force minimization on a grid.
pub fn check_exact_prox_against_grid(exponents: &[f64], points: usize, seed: u64) -> Vec<CheckReport> {
    let fs = representatives(1);
    let mut out = Vec::new();
    for (k, f) in fs.iter().enumerate() {
        let s = seed.wrapping_add(k as u64);
        let mut r = rng(s);
        let mut worst = 0.0_f64;
        let mut compared = 0usize;
        let steps = 200_000usize;
        let spacing = 10.0 / steps as f64;
        for &p in exponents {
            for _ in 0..points {
                let x = sample_point(&mut r, &ConvexFunctionSpec::Zero, 1, 2.0)[0] + f.anchor(1)[0];
                let eps = log_uniform(&mut r, 0.1, 2.0);
                let Some(y) = f.exact_prox_if_available(&[x], p, eps) else {
                    continue;
                };
                let (mut best, mut arg) = (f64::INFINITY, x);
                for j in 0..=steps {
                    let t = x - 5.0 + spacing * j as f64;
                    let v = f.evaluate(&[t]).to_f64() + (x - t).abs().powf(p) / (p * eps);
                    if v < best {
                        best = v;
                        arg = t;
                    }
                }
                worst = worst.max((y[0] - arg).abs());
                compared += 1;
            }
        }
        let name = format!("exact_prox_grid/{}", f.name());
        if compared == 0 {
            out.push(CheckReport::inapplicable(
                name,
                "no closed-form prox for these exponents",
                s,
            ));
            continue;
        }
        let tol = 2.0 * spacing;
        let report = CheckReport::new(name, tol, s)
            .with_metric("max_abs_deviation", worst)
            .with_metric("compared", compared as f64);
        out.push(report.conclude(worst <= tol));
    }
    out
}

/// Fenchel–Young equality at random points of the domain.
pub fn check_fenchel_equalities(dim: usize, points: usize, seed: u64) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for (k, f) in representatives(dim).iter().enumerate() {
        let s = seed.wrapping_add(k as u64);
        let mut r = rng(s);
        let mut worst_ratio = 0.0_f64;
        let mut skipped = 0usize;
        let mut tolerance = 0.0_f64;
        for _ in 0..points {
            let x = sample_point(&mut r, f, dim, 2.0);
            let rep = crate::catalogue::fenchel_equality_check(f, &x)?;
            if rep.is_inapplicable() {
                skipped += 1;
                continue;
            }
            let gap = rep.get("gap").unwrap_or(f64::INFINITY);
            tolerance = tolerance.max(rep.tolerance);
            worst_ratio = worst_ratio.max(if rep.tolerance > 0.0 { gap / rep.tolerance } else { gap });
        }
        let name = format!("fenchel_equality/{}/dim={dim}", f.name());
        if skipped == points {
            out.push(CheckReport::inapplicable(name, "no applicable points", s));
            continue;
        }
        let report = CheckReport::new(name, tolerance, s)
            .with_metric("max_gap_over_tolerance", worst_ratio)
            .with_metric("skipped", skipped as f64);
        out.push(report.conclude(worst_ratio <= 1.0));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Grid conjugates

fn line(lo: f64, hi: f64, n: usize) -> Result<GridSpec> {
    GridSpec::uniform(1, lo, hi, n)
}

/// Grid conjugates of `phi_p / eps` against the closed form `eps^(p*-1) phi_{p*}`.
pub fn check_phi_conjugates(tol: Option<f64>) -> Result<CheckReport> {
    let tol = tol.unwrap_or(5e-3);
    let primal = line(-10.0, 10.0, 2001)?;
    // Keeps every maximizer (eps |s|)^(p*-1) inside the primal box.
    let dual = line(-1.5, 1.5, 301)?;
    let mut worst = 0.0_f64;
    for p in [1.5, 2.0, 3.0] {
        for eps in [0.5, 1.0, 2.0] {
            let scaled = ConvexFunctionSpec::norm_power(p, vec![0.0], 1.0 / eps, 0.0)?;
            let closed = crate::legendre::phi_conjugate_closed_form(p, eps, 1)?;
            let table = conjugate_on_grid(&scaled, &primal, &dual)?;
            for (i, s) in dual.points().iter().enumerate() {
                if !dual.is_interior(i) {
                    continue;
                }
                let exact = closed.evaluate(s).to_f64();
                worst = worst.max((table.resolved(i).to_f64() - exact).abs());
            }
        }
    }
    let report = CheckReport::new("phi_conjugates", tol, 0).with_metric("max_interior_deviation", worst);
    Ok(report.conclude(worst <= tol))
}

/// Biconjugation returns `f` on the interior of the primal grid.
pub fn check_biconjugates(tol: Option<f64>) -> Result<Vec<CheckReport>> {
    let tol = tol.unwrap_or(1e-2);
    let cases = [
        (ConvexFunctionSpec::phi(2.0, 1)?, (-10.0, 10.0), (-10.0, 10.0)),
        (
            ConvexFunctionSpec::one_norm(vec![0.0], 1.0, 0.0)?,
            (-5.0, 5.0),
            (-2.0, 2.0),
        ),
        (ConvexFunctionSpec::affine(vec![0.5], 1.0)?, (-10.0, 10.0), (-2.0, 2.0)),
        (
            ConvexFunctionSpec::norm_power(3.0, vec![0.5], 1.0, 0.0)?,
            (-3.0, 3.0),
            (-12.0, 12.0),
        ),
    ];
    cases
        .iter()
        .map(|(f, (a, b), (c, d))| {
            crate::legendre::biconjugate_check(f, &line(*a, *b, 2001)?, &line(*c, *d, 2001)?, tol)
        })
        .collect()
}

/// Structural properties of grid conjugates: convexity along grid lines,
/// monotone refinement, order reversal and the scaling relation.
pub fn check_conjugate_grid_properties(tol: Option<f64>) -> Result<Vec<CheckReport>> {
    let coarse = line(-10.0, 10.0, 401)?;
    let fine = line(-10.0, 10.0, 801)?;
    let dual = line(-3.0, 3.0, 301)?;
    let lipschitz = 10.0;
    let convex_slack = tol.unwrap_or(2.0 * lipschitz * dual.max_spacing());
    let mut out = Vec::new();
    for f in representatives(1) {
        let a = conjugate_on_grid(&f, &coarse, &dual)?;
        let b = conjugate_on_grid(&f, &fine, &dual)?;
        let convexity = crate::legendre::max_convexity_violation(&a);
        let refinement = a
            .values
            .iter()
            .zip(&b.values)
            .map(|(u, v)| u.to_f64() - v.to_f64())
            .fold(0.0, f64::max);
        // g = f + |x|/2 >= f, so g* <= f*.
        let gvals: Vec<ExtReal> = coarse
            .points()
            .iter()
            .map(|x| f.evaluate(x) + 0.5 * x[0].abs())
            .collect();
        let g = conjugate_of_values(&coarse, &gvals, &dual, "f + |x|/2".into())?;
        let reversal = g
            .values
            .iter()
            .zip(&a.values)
            .map(|(u, v)| u.to_f64() - v.to_f64())
            .fold(0.0, f64::max);
        let mut scaling = 0.0_f64;
        for lambda in [0.5, 2.0] {
            let scaled: Vec<ExtReal> = coarse
                .points()
                .iter()
                .map(|x| match f.evaluate(x) {
                    ExtReal::Finite(v) => ExtReal::Finite(lambda * v),
                    ExtReal::PosInf => ExtReal::PosInf,
                })
                .collect();
            let lhs = conjugate_of_values(&coarse, &scaled, &dual, "lambda f".into())?;
            let shrunk = line(-3.0 / lambda, 3.0 / lambda, 301)?;
            let rhs = conjugate_on_grid(&f, &coarse, &shrunk)?;
            for i in 0..dual.len() {
                let d = (lhs.values[i].to_f64() - lambda * rhs.values[i].to_f64()).abs();
                scaling = scaling.max(d);
            }
        }
        let resolution = 2.0 * lipschitz * coarse.max_spacing();
        let report = CheckReport::new(format!("conjugate_grid/{}", f.name()), convex_slack, 0)
            .with_metric("max_convexity_violation", convexity)
            .with_metric("max_refinement_decrease", refinement)
            .with_metric("max_order_reversal_excess", reversal)
            .with_metric("max_scaling_deviation", scaling)
            .with_metric("scaling_tolerance", resolution);
        let ok = convexity <= convex_slack && refinement <= 1e-12 && reversal <= 1e-12 && scaling <= resolution;
        out.push(report.conclude(ok));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Envelope

/// The envelope of `|x|` at `p = 2` is the Huber function.
pub fn check_huber(eps_values: &[f64], tol: Option<f64>) -> Result<CheckReport> {
    let value_tol = tol.unwrap_or(1e-8);
    let grad_tol = tol.unwrap_or(1e-6);
    let f = ConvexFunctionSpec::one_norm(vec![0.0], 1.0, 0.0)?;
    let (mut worst_value, mut worst_grad) = (0.0_f64, 0.0_f64);
    for &eps in eps_values {
        let cfg = EnvelopeConfig::new(2.0, eps)?;
        for x in lin_space(-3.0, 3.0, 601) {
            let r = prox(&f, &[x], &cfg)?;
            let (huber, slope) = if x.abs() <= eps {
                (x * x / (2.0 * eps), x / eps)
            } else {
                (x.abs() - eps / 2.0, x.signum())
            };
            worst_value = worst_value.max((r.envelope_value - huber).abs());
            worst_grad = worst_grad.max((r.gradient[0] - slope).abs());
        }
    }
    let report = CheckReport::new("huber_envelope", value_tol, 0)
        .with_metric("max_value_error", worst_value)
        .with_metric("max_gradient_error", worst_grad)
        .with_metric("gradient_tolerance", grad_tol);
    Ok(report.conclude(worst_value <= value_tol && worst_grad <= grad_tol))
}

/// Envelope gradients against central finite differences of the envelope.
pub fn check_gradient_finite_differences(
    dim: usize,
    p: f64,
    eps: f64,
    points: usize,
    seed: u64,
    tol: Option<f64>,
) -> Result<Vec<CheckReport>> {
    let tol = tol.unwrap_or(1e-4);
    let cfg = EnvelopeConfig::new(p, eps)?;
    let h = 1e-5;
    representatives(dim)
        .into_par_iter()
        .enumerate()
        .map(|(k, f)| {
            let s = seed.wrapping_add(k as u64);
            let mut r = rng(s);
            let mut worst = 0.0_f64;
            for _ in 0..points {
                let x: Vec<f64> = f
                    .anchor(dim)
                    .iter()
                    .zip(gaussian(&mut r, dim))
                    .map(|(a, g)| a + 1.5 * g)
                    .collect();
                let g = envelope_gradient(&f, &x, &cfg)?;
                let scale = max_abs(&g).max(1.0);
                for j in 0..dim {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[j] += h;
                    xm[j] -= h;
                    let fd = (envelope(&f, &xp, &cfg)? - envelope(&f, &xm, &cfg)?) / (2.0 * h);
                    worst = worst.max((g[j] - fd).abs() / scale);
                }
            }
            let report = CheckReport::new(format!("gradient_fd/{}/p={p}/dim={dim}", f.name()), tol, s)
                .with_metric("max_rel_error", worst)
                .with_metric("points", points as f64);
            Ok(report.conclude(worst <= tol))
        })
        .collect()
}

/// Dominance, `f_eps <= f`, minimizer preservation, monotonicity in `eps`
/// and midpoint convexity of the envelope.
pub fn check_envelope_invariants(
    dim: usize,
    p: f64,
    eps: f64,
    samples: usize,
    seed: u64,
    tol: Option<f64>,
) -> Result<Vec<CheckReport>> {
    let cfg = EnvelopeConfig::new(p, eps)?;
    let inner = cfg.inner_tol;
    let convex_slack = tol.unwrap_or(1e-8);
    representatives(dim)
        .into_par_iter()
        .enumerate()
        .map(|(k, f)| {
            let s = seed.wrapping_add(k as u64);
            let mut r = rng(s);
            let (mut dominance, mut above_f, mut eps_mono, mut midpoint) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
            let wider = cfg.with_eps(2.0 * eps)?;
            for _ in 0..samples {
                let x = sample_point(&mut r, &ConvexFunctionSpec::Zero, dim, 2.0);
                let x: Vec<f64> = x.iter().zip(f.anchor(dim)).map(|(a, b)| a + b).collect();
                let y = sample_point(&mut r, &f, dim, 2.0);
                let fe = envelope(&f, &x, &cfg)?;
                if let Some(fy) = f.evaluate(&y).finite() {
                    let rhs = fy + phi_p(&sub(&x, &y), p) / eps;
                    dominance = dominance.max((fe - rhs) / (1.0 + rhs.abs()));
                }
                if let Some(fx) = f.evaluate(&x).finite() {
                    above_f = above_f.max(fe - fx);
                }
                eps_mono = eps_mono.max(envelope(&f, &x, &wider)? - fe);
                let m: Vec<f64> = x.iter().zip(&y).map(|(a, b)| 0.5 * (a + b)).collect();
                let fy_e = envelope(&f, &y, &cfg)?;
                midpoint = midpoint.max(envelope(&f, &m, &cfg)? - 0.5 * (fe + fy_e));
            }
            let mut report = CheckReport::new(
                format!("envelope_invariants/{}/p={p}/dim={dim}", f.name()),
                convex_slack,
                s,
            );
            report.metric("max_dominance_excess", dominance);
            report.metric("max_excess_over_f", above_f);
            report.metric("max_eps_monotonicity_excess", eps_mono);
            report.metric("max_midpoint_excess", midpoint);
            let mut ok = dominance <= inner && above_f <= 1e-12 && eps_mono <= inner && midpoint <= convex_slack;
            if let (Some(xhat), Some(inf)) = (f.known_minimizer(dim), f.infimum()) {
                let res = prox(&f, &xhat, &cfg)?;
                let value_gap = (res.envelope_value - inf).abs();
                let grad_norm = max_abs(&res.gradient);
                report.metric("minimizer_value_gap", value_gap);
                report.metric("minimizer_gradient_norm", grad_norm);
                ok &= value_gap <= inner && grad_norm <= 1e-6;
            }
            Ok(report.conclude(ok))
        })
        .collect()
}

/// Gradient ratios in the Hilbert case stay below `1/eps`.
pub fn check_hilbert_lipschitz(
    dim: usize,
    eps_values: &[f64],
    samples: usize,
    seed: u64,
    tol: Option<f64>,
) -> Result<Vec<CheckReport>> {
    let slack = tol.unwrap_or(1e-6);
    representatives(dim)
        .into_par_iter()
        .enumerate()
        .map(|(k, f)| {
            let s = seed.wrapping_add(k as u64);
            let mut r = rng(s);
            let mut worst = 0.0_f64;
            for &eps in eps_values {
                let cfg = EnvelopeConfig::new(2.0, eps)?;
                let anchor = f.anchor(dim);
                let mut pairs = anchored_near_pairs(&mut r, &anchor, samples / 2);
                for _ in 0..samples / 2 {
                    let x = sample_point(&mut r, &ConvexFunctionSpec::Zero, dim, 3.0);
                    let y = sample_point(&mut r, &ConvexFunctionSpec::Zero, dim, 3.0);
                    pairs.push((
                        x.iter().zip(&anchor).map(|(a, b)| a + b).collect(),
                        y.iter().zip(&anchor).map(|(a, b)| a + b).collect(),
                    ));
                }
                for (x, y) in pairs {
                    let dx = lp_norm(&sub(&x, &y), 2.0);
                    if dx == 0.0 {
                        continue;
                    }
                    let gx = envelope_gradient(&f, &x, &cfg)?;
                    let gy = envelope_gradient(&f, &y, &cfg)?;
                    worst = worst.max(lp_norm(&sub(&gx, &gy), 2.0) / dx * eps);
                }
            }
            let report = CheckReport::new(format!("hilbert_lipschitz/{}/dim={dim}", f.name()), slack, s)
                .with_metric("max_ratio_times_eps", worst);
            Ok(report.conclude(worst <= 1.0 + slack))
        })
        .collect()
}

/// `||x - prox(x)||^p <= f(x) p eps` over a logarithmic `eps` sweep, for every
/// catalogue entry that is known to be nonnegative.
pub fn check_prox_distance_bounds(dim: usize, p: f64, points: usize, seed: u64) -> Result<Vec<CheckReport>> {
    let sweep = log_space(1e-3, 1.0, 10);
    let cfg = EnvelopeConfig::new(p, 1.0)?;
    let mut out = Vec::new();
    for (k, f) in representatives(dim).iter().enumerate() {
        let s = seed.wrapping_add(k as u64);
        let mut r = rng(s);
        let mut merged: Option<CheckReport> = None;
        let mut worst = 0.0_f64;
        let mut violations = 0.0;
        for _ in 0..points {
            let x = sample_point(&mut r, f, dim, 2.0);
            let rep = crate::envelope::prox_distance_bound_check(f, &x, &cfg, &sweep)?;
            if rep.is_inapplicable() {
                merged = Some(rep);
                break;
            }
            worst = worst.max(rep.get("max_ratio").unwrap_or(0.0));
            violations += rep.get("violations").unwrap_or(0.0);
            merged = Some(rep);
        }
        let name = format!("prox_distance/{}/p={p}/dim={dim}", f.name());
        match merged {
            Some(rep) if rep.is_inapplicable() => {
                out.push(CheckReport::inapplicable(name, rep.note.unwrap_or_default(), s))
            }
            _ => {
                let report = CheckReport::new(name, 1e-9, s)
                    .with_metric("max_ratio", worst)
                    .with_metric("violations", violations);
                out.push(report.conclude(violations == 0.0));
            }
        }
    }
    Ok(out)
}

/// Proximal-point iterations: the quadratic halving sequence and the
/// shifted absolute value reaching its minimizer.
pub fn check_proximal_point(tol: Option<f64>) -> Result<CheckReport> {
    let tol = tol.unwrap_or(1e-12);
    let cfg = EnvelopeConfig::new(2.0, 1.0)?;
    let q = ConvexFunctionSpec::quadratic(vec![1.0], vec![0.0])?;
    let traj = crate::envelope::proximal_point_run(&q, &[1.0], &cfg, 20)?;
    let halving = traj
        .points
        .iter()
        .enumerate()
        .map(|(k, x)| (x[0] - 0.5f64.powi(k as i32)).abs())
        .fold(0.0, f64::max);
    let f = ConvexFunctionSpec::one_norm(vec![4.5], 1.0, 0.5)?;
    let traj = crate::envelope::proximal_point_run(&f, &[0.0], &cfg, 6)?;
    let reached = traj.points.iter().position(|x| (x[0] - 4.5).abs() <= tol);
    let monotone = traj.f_values.windows(2).all(|w| w[1] <= w[0]);
    let mut report = CheckReport::new("proximal_point", tol, 0);
    report.metric("quadratic_max_error", halving);
    report.metric(
        "onenorm_iterations_to_minimizer",
        reached.map_or(f64::INFINITY, |k| k as f64),
    );
    report.metric("onenorm_values_nonincreasing", if monotone { 1.0 } else { 0.0 });
    Ok(report.conclude(halving <= tol && reached.is_some_and(|k| k <= 6) && monotone))
}

// ---------------------------------------------------------------------------
// Conjugate of the envelope

/// Dual grid used for `(g_eps)*` comparisons: where `g*` is finite plus a margin.
fn shift_dual_grid(g: &ConvexFunctionSpec) -> Result<GridSpec> {
    match g {
        ConvexFunctionSpec::QuadraticDiag { .. } => line(-3.0, 3.0, 2001),
        _ => line(-1.0, 1.0, 2001),
    }
}

/// `(g_eps)* = g* + eps^(p*-1) phi_{p*}` on one-dimensional grids.
pub fn verify_conjugate_shift(g: &ConvexFunctionSpec, cfg: &EnvelopeConfig, tol: Option<f64>) -> Result<CheckReport> {
    let tol = tol.unwrap_or(5e-3);
    let name = format!("conjugate_shift/{}/p={}/eps={}", g.name(), cfg.p, cfg.eps);
    g.check_dim(1)?;
    let primal = line(-10.0, 10.0, 2001)?;
    let dual = shift_dual_grid(g)?;
    let env_values: Vec<ExtReal> = primal
        .points()
        .iter()
        .map(|x| envelope(g, x, cfg).map(ExtReal::Finite))
        .collect::<Result<_>>()?;
    let lhs = conjugate_of_values(&primal, &env_values, &dual, format!("envelope of {g}"))?;
    let g_star = conjugate_on_grid(g, &primal, &dual)?;
    let shift = crate::legendre::phi_conjugate_closed_form(cfg.p, cfg.eps, 1)?;
    let (mut worst, mut infinite_matches, mut mismatches) = (0.0_f64, 0usize, 0usize);
    for (i, s) in dual.points().iter().enumerate() {
        if !dual.is_interior(i) {
            continue;
        }
        let expected = g_star.resolved(i) + shift.evaluate(s);
        match (lhs.resolved(i), expected) {
            (ExtReal::PosInf, ExtReal::PosInf) => infinite_matches += 1,
            (ExtReal::Finite(a), ExtReal::Finite(b)) => worst = worst.max((a - b).abs()),
            _ => mismatches += 1,
        }
    }
    let report = CheckReport::new(name, tol, 0)
        .with_metric("max_interior_deviation", worst)
        .with_metric("infinite_matches", infinite_matches as f64)
        .with_metric("finiteness_mismatches", mismatches as f64);
    Ok(report.conclude(worst <= tol && mismatches == 0))
}

/// Size below which two computed envelope gradients count as equal.
///
/// The gradient is `eps^-1 J_p(x - prox)`, and `x - prox` is only resolved
/// to a few ulps of `x`, so for `p < 2` the attainable gradient accuracy is
/// about `eps^-1 ulp^(p-1)` rather than a relative epsilon.
fn gradient_resolution(x: &[f64], y: &[f64], cfg: &EnvelopeConfig) -> f64 {
    let scale = x.iter().chain(y).fold(1.0_f64, |m, v| m.max(v.abs()));
    2.0 * (4.0 * f64::EPSILON * scale).powf(cfg.p - 1.0) / cfg.eps
}

/// Strong `p*`-monotonicity of `(g_eps)*` on pairs `(x, grad g_eps(x))`.
///
/// `c1_hat` is the empirical strong-monotonicity constant of `J_{p*}` on the
/// dual space; the asserted constant is `eps^(p*-1) c1_hat (1 - 0.01)`.
pub fn verify_strong_pstar_monotonicity_of_conjugate(
    g: &ConvexFunctionSpec,
    dim: usize,
    cfg: &EnvelopeConfig,
    c1_hat: f64,
    samples: usize,
    seed: u64,
    tol: Option<f64>,
) -> Result<CheckReport> {
    let p = cfg.p;
    let name = format!("strong_pstar_monotonicity/{}/p={p}/dim={dim}", g.name());
    if p > 2.0 {
        return Ok(CheckReport::inapplicable(name, "requires 1 < p <= 2", seed));
    }
    let q = cfg.p_star();
    let margin = tol.unwrap_or(0.01);
    let c = cfg.eps.powf(q - 1.0) * c1_hat * (1.0 - margin);
    let mut r = rng(seed);
    let anchor = g.anchor(dim);
    let mut pairs = anchored_near_pairs(&mut r, &anchor, samples / 2);
    for (x, y) in structured_pairs(&mut r, dim, samples - samples / 2) {
        pairs.push((
            x.iter().zip(&anchor).map(|(a, b)| a + b).collect(),
            y.iter().zip(&anchor).map(|(a, b)| a + b).collect(),
        ));
    }
    let (mut violations, mut strict_violations, mut min_ratio) = (0usize, 0usize, f64::INFINITY);
    let mut skipped = 0usize;
    for (x, y) in &pairs {
        let xs = envelope_gradient(g, x, cfg)?;
        let ys = envelope_gradient(g, y, cfg)?;
        let ds = sub(&xs, &ys);
        let dx = sub(x, y);
        let lhs = dot(&ds, &dx);
        let dn = lp_norm(&ds, q);
        // Gradient differences at the inner solver's accuracy carry no signal.
        if crate::numeric::max_abs(&ds) <= gradient_resolution(x, y, cfg) {
            skipped += 1;
            continue;
        }
        let rhs = dn.powf(q);
        // Rounding allowance for the pairing.
        let fuzz = 1e-13 * lp_norm(&ds, 2.0) * lp_norm(&dx, 2.0);
        if lhs < c * rhs - fuzz {
            violations += 1;
        }
        if lhs < 1e-12 * rhs - fuzz {
            strict_violations += 1;
        }
        min_ratio = min_ratio.min(lhs / rhs);
    }
    let pairing_gap = if dim <= 2 {
        fenchel_pairing_subsample(g, dim, cfg, seed)?
    } else {
        0.0
    };
    let mut report = CheckReport::new(name, margin, seed);
    report.metric("c_asserted", c);
    report.metric("c1_hat_dual", c1_hat);
    report.metric("min_ratio", min_ratio);
    report.metric("violations", violations as f64);
    report.metric("strict_violations", strict_violations as f64);
    report.metric("pairs", pairs.len() as f64);
    report.metric("skipped_equal_gradients", skipped as f64);
    report.metric("max_pairing_gap", pairing_gap);
    Ok(report.conclude(violations == 0 && strict_violations == 0 && pairing_gap <= 1.0))
}

/// `|g_eps(x) + (g_eps)*(x*) - <x*, x>|`, relative to `1e-8 (1 + |g_eps(x)| + |<x*, x>|)`,
/// at grid points `x` with `x* = grad g_eps(x)`, the conjugate taken on the grid.
fn fenchel_pairing_subsample(g: &ConvexFunctionSpec, dim: usize, cfg: &EnvelopeConfig, seed: u64) -> Result<f64> {
    let count = if dim == 1 { 1001 } else { 51 };
    let grid = GridSpec::uniform(dim, -5.0, 5.0, count)?;
    let points = grid.points();
    let values: Vec<f64> = points.par_iter().map(|x| envelope(g, x, cfg)).collect::<Result<_>>()?;
    let mut r = rng(seed ^ 0xfe11);
    let mut worst = 0.0_f64;
    for _ in 0..16 {
        let i = r.gen_range(0..points.len());
        let x = &points[i];
        let xs = envelope_gradient(g, x, cfg)?;
        let sup = points
            .iter()
            .zip(&values)
            .map(|(y, v)| dot(&xs, y) - v)
            .fold(f64::NEG_INFINITY, f64::max);
        let pairing = dot(&xs, x);
        let gap = (values[i] + sup - pairing).abs();
        worst = worst.max(gap / (1e-8 * (1.0 + values[i].abs() + pairing.abs())));
    }
    Ok(worst)
}

/// `(p-1)`-Hoelder continuity of `grad g_eps` with the constant implied by
/// strong `p*`-monotonicity of the conjugate. The fitted exponent uses only
/// near pairs whose gradients differ and is reported, not asserted.
pub fn check_gradient_holder(
    g: &ConvexFunctionSpec,
    dim: usize,
    cfg: &EnvelopeConfig,
    c1_hat: f64,
    samples: usize,
    seed: u64,
    tol: Option<f64>,
) -> Result<(CheckReport, Option<PowerFit>)> {
    let p = cfg.p;
    let name = format!("gradient_holder/{}/p={p}/dim={dim}", g.name());
    if p > 2.0 {
        return Ok((CheckReport::inapplicable(name, "requires 1 < p <= 2", seed), None));
    }
    let q = cfg.p_star();
    let slack = tol.unwrap_or(0.01);
    let c = cfg.eps.powf(q - 1.0) * c1_hat;
    let mut r = rng(seed);
    let anchor = g.anchor(dim);
    let near = anchored_near_pairs(&mut r, &anchor, samples);
    let extremes: Vec<(Vec<f64>, Vec<f64>)> = structured_pairs(&mut r, dim, samples / 10)
        .into_iter()
        .map(|(x, y)| {
            (
                x.iter().zip(&anchor).map(|(a, b)| a + b).collect(),
                y.iter().zip(&anchor).map(|(a, b)| a + b).collect(),
            )
        })
        .collect();
    let mut fit_pairs = Vec::new();
    let (mut violations, mut worst) = (0usize, 0.0_f64);
    for (k, (x, y)) in near.iter().chain(&extremes).enumerate() {
        let dx = lp_norm(&sub(x, y), p);
        if dx == 0.0 {
            continue;
        }
        let (gx, gy) = (envelope_gradient(g, x, cfg)?, envelope_gradient(g, y, cfg)?);
        let dg = lp_norm(&sub(&gx, &gy), q);
        let bound = (dx / c).powf(p - 1.0);
        worst = worst.max(dg / bound);
        if dg > bound * (1.0 + slack) {
            violations += 1;
        }
        if k < near.len() && crate::numeric::max_abs(&sub(&gx, &gy)) > gradient_resolution(x, y, cfg) {
            fit_pairs.push((dx, dg));
        }
    }
    let fit = PowerFit::fit(&fit_pairs);
    let exponent = fit.map_or(f64::NAN, |f| f.exponent);
    let mut report = CheckReport::new(name, slack, seed);
    report.metric("fitted_exponent", exponent);
    report.metric("c_hat", c);
    report.metric("max_bound_ratio", worst);
    report.metric("violations", violations as f64);
    if let Some(f) = fit {
        report.metric("fit_max_residual", f.max_residual);
        report.metric("fit_samples", f.sample_count as f64);
    }
    Ok((report.conclude(violations == 0), fit))
}

// ---------------------------------------------------------------------------
// Counterexample

/// Midpoint-convexity witnesses for `h(x) = |x - 1|^3 - c |x|^3` on a grid.
///
/// Passes when a witness exists for every `c > 0` and none for `c = 0`.
pub fn check_nonconvexity_counterexample(c_values: &[f64], lo: f64, hi: f64, count: usize) -> CheckReport {
    let grid = lin_space(lo, hi, count);
    let mut report = CheckReport::new("nonconvexity_counterexample", 1e-9, 0);
    let mut ok = true;
    for &c in c_values {
        let h = |x: f64| (x - 1.0).abs().powi(3) - c * x.abs().powi(3);
        let witness = find_midpoint_witness(&grid, h);
        let key = format!("witness_c={c}");
        match witness {
            Some((x, y, excess)) => {
                report.metric(key, 1.0);
                report.metric(format!("witness_x_c={c}"), x);
                report.metric(format!("witness_y_c={c}"), y);
                report.metric(format!("excess_c={c}"), excess);
                ok &= c > 0.0;
            }
            None => {
                report.metric(key, 0.0);
                ok &= c == 0.0;
            }
        }
    }
    report.conclude(ok)
}

fn find_midpoint_witness<H: Fn(f64) -> f64>(grid: &[f64], h: H) -> Option<(f64, f64, f64)> {
    let values: Vec<f64> = grid.iter().map(|x| h(*x)).collect();
    let n = grid.len();
    for k in 1..n / 2 + 1 {
        for i in k..n.saturating_sub(k) {
            let (x, y) = (grid[i - k], grid[i + k]);
            let m = 0.5 * (x + y);
            let excess = h(m) - 0.5 * (values[i - k] + values[i + k]);
            if excess > 1e-9 {
                return Some((x, y, excess));
            }
        }
    }
    None
}
