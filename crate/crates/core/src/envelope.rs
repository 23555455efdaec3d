//! The p-power Moreau envelope `f_eps(x) = min_y f(y) + eps^-1 phi_p(x - y)`,
//! its proximal map and gradient, and the proximal-point iteration.

use serde::{Deserialize, Serialize};

use crate::catalogue::{max_affine_value, AffinePiece, ConvexFunctionSpec, ExtReal};
use crate::error::{domain, Error, Result};
use crate::lab::fit::PowerFit;
use crate::lp_space::{dual_exponent, duality_map, lp_norm, phi_p, scalar_duality, LpVector, Side};
use crate::numeric::{bisect_sign, dot, golden_section, project_simplex, sub};
use crate::report::CheckReport;

/// Whether closed-form proximal maps may be used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverPreference {
    #[default]
    Auto,
    /// Always run the numerical solvers (used to cross-check closed forms).
    Numerical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeConfig {
    pub p: f64,
    pub eps: f64,
    pub inner_tol: f64,
    pub max_inner_iters: usize,
    pub solver: SolverPreference,
}

impl EnvelopeConfig {
    pub const DEFAULT_INNER_TOL: f64 = 1e-10;
    pub const DEFAULT_MAX_INNER_ITERS: usize = 10_000;

    pub fn new(p: f64, eps: f64) -> Result<Self> {
        let cfg = Self {
            p,
            eps,
            inner_tol: Self::DEFAULT_INNER_TOL,
            max_inner_iters: Self::DEFAULT_MAX_INNER_ITERS,
            solver: SolverPreference::Auto,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_eps(mut self, eps: f64) -> Result<Self> {
        self.eps = eps;
        self.validate()?;
        Ok(self)
    }

    pub fn with_inner_tol(mut self, tol: f64) -> Result<Self> {
        self.inner_tol = tol;
        self.validate()?;
        Ok(self)
    }

    pub fn with_max_inner_iters(mut self, iters: usize) -> Self {
        self.max_inner_iters = iters;
        self
    }

    pub fn with_solver(mut self, solver: SolverPreference) -> Self {
        self.solver = solver;
        self
    }

    pub fn validate(&self) -> Result<()> {
        dual_exponent(self.p)?;
        if !(self.eps.is_finite() && self.eps > 0.0) {
            return Err(domain(format!("eps must be positive and finite, got {}", self.eps)));
        }
        if !(self.inner_tol.is_finite() && self.inner_tol > 0.0) {
            return Err(domain(format!(
                "inner tolerance must be positive, got {}",
                self.inner_tol
            )));
        }
        if self.max_inner_iters == 0 {
            return Err(domain("max inner iterations must be positive"));
        }
        Ok(())
    }

    pub fn p_star(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    /// `h(y) = f(y) + eps^-1 phi_p(x - y)`.
    pub fn regularized_objective(&self, f: &ConvexFunctionSpec, x: &[f64], y: &[f64]) -> ExtReal {
        f.evaluate(y) + phi_p(&sub(x, y), self.p) / self.eps
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProxMethod {
    ClosedForm,
    GoldenSection,
    Descent,
}

impl ProxMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::ClosedForm => "closed-form",
            Self::GoldenSection => "golden-section",
            Self::Descent => "descent",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProxResult {
    pub prox_point: LpVector,
    pub envelope_value: f64,
    pub gradient: LpVector,
    /// `l^{p*}` distance from the gradient `eps^-1 J_p(x - prox)` to `∂f(prox)`,
    /// the optimality residual of the prox.
    pub residual: f64,
    pub inner_iters: usize,
    pub method: ProxMethod,
}

fn check_input(f: &ConvexFunctionSpec, x: &[f64], cfg: &EnvelopeConfig) -> Result<()> {
    cfg.validate()?;
    f.validate()?;
    f.check_dim(x.len())?;
    if x.is_empty() {
        return Err(domain("x must be non-empty"));
    }
    if let Some(bad) = x.iter().find(|v| !v.is_finite()) {
        return Err(domain(format!("x has a non-finite coordinate {bad}")));
    }
    Ok(())
}

/// Proximal point of `f` at `x`, with envelope value and gradient.
///
/// Solver cascade: closed form, then per-coordinate golden-section search
/// with a bisection polish for separable functions, then projected dual
/// ascent for max-affine functions.
pub fn prox(f: &ConvexFunctionSpec, x: &[f64], cfg: &EnvelopeConfig) -> Result<ProxResult> {
    check_input(f, x, cfg)?;
    let closed = match cfg.solver {
        SolverPreference::Auto => f.exact_prox_if_available(x, cfg.p, cfg.eps),
        SolverPreference::Numerical => None,
    };
    let (mut y, iters, method) = match closed {
        Some(y) => (y, 0, ProxMethod::ClosedForm),
        None if f.is_separable() => {
            let (y, iters) = solve_separable(f, x, cfg)?;
            (y, iters, ProxMethod::GoldenSection)
        }
        None => {
            let ConvexFunctionSpec::MaxAffine { pieces } = f else {
                unreachable!("only max-affine functions are non-separable")
            };
            let (y, iters) = solve_max_affine(pieces, x, cfg)?;
            (y, iters, ProxMethod::Descent)
        }
    };
    if method == ProxMethod::Descent {
        // Never return something worse than the trivial candidate y = x.
        // The separable solver is exact on the derivative sign and skips this:
        // near a minimizer the objective cannot resolve the relevant steps.
        if cfg.regularized_objective(f, x, x) < cfg.regularized_objective(f, x, &y) {
            y = x.to_vec();
        }
    }
    Ok(assemble(f, x, y, cfg, iters, method))
}

fn assemble(
    f: &ConvexFunctionSpec,
    x: &[f64],
    y: Vec<f64>,
    cfg: &EnvelopeConfig,
    inner_iters: usize,
    method: ProxMethod,
) -> ProxResult {
    let d = sub(x, &y);
    let envelope_value = cfg.regularized_objective(f, x, &y).to_f64();
    let gradient: Vec<f64> = duality_map(&d, cfg.p).iter().map(|v| v / cfg.eps).collect();
    let residual = f.subdifferential_distance(&y, &gradient, cfg.p_star());
    ProxResult {
        prox_point: LpVector::from_computed(y, Side::Primal),
        envelope_value,
        gradient: LpVector::from_computed(gradient, Side::Dual),
        residual,
        inner_iters,
        method,
    }
}

fn coordinate_domain(f: &ConvexFunctionSpec, i: usize) -> (f64, f64) {
    match f {
        ConvexFunctionSpec::BoxIndicator { lo, hi } => (lo[i], hi[i]),
        _ => (f64::NEG_INFINITY, f64::INFINITY),
    }
}

fn solve_separable(f: &ConvexFunctionSpec, x: &[f64], cfg: &EnvelopeConfig) -> Result<(Vec<f64>, usize)> {
    let (p, eps) = (cfg.p, cfg.eps);
    // The distance bound ||x - prox||^p <= p eps f(x) localizes the search.
    let radius = match f.evaluate(x).finite() {
        Some(fx) => 1.0_f64.max(2.0 * (p * eps * fx.abs()).powf(1.0 / p)),
        None => 1.0,
    };
    let mut y = Vec::with_capacity(x.len());
    let mut total = 0usize;
    for (i, &xi) in x.iter().enumerate() {
        let (dlo, dhi) = coordinate_domain(f, i);
        let h = |t: f64| f.coordinate_value(i, t).to_f64() + (xi - t).abs().powf(p) / (p * eps);
        let g = |t: f64| f.coordinate_subgradient(i, t) - scalar_duality(xi - t, p) / eps;
        let center = xi.clamp(dlo, dhi);
        let hc = h(center);
        let mut r = radius;
        let mut expansions = 0usize;
        let (lo, hi) = loop {
            let (a, b) = ((center - r).max(dlo), (center + r).min(dhi));
            let left_ok = a == dlo || h(a) > hc;
            let right_ok = b == dhi || h(b) > hc;
            if left_ok && right_ok {
                break (a, b);
            }
            expansions += 1;
            r *= 2.0;
            if expansions > 200 || !r.is_finite() {
                return Err(Error::InnerSolverFailed {
                    method: ProxMethod::GoldenSection.as_str(),
                    iterations: expansions,
                    residual: r,
                    tolerance: cfg.inner_tol,
                });
            }
        };
        let width_tol = 1e-6 * (1.0 + r);
        let line = golden_section(h, lo, hi, width_tol, cfg.max_inner_iters);
        if line.hi - line.lo > width_tol {
            return Err(Error::InnerSolverFailed {
                method: ProxMethod::GoldenSection.as_str(),
                iterations: line.iterations,
                residual: line.hi - line.lo,
                tolerance: width_tol,
            });
        }
        // Polish on the sign of the (nondecreasing) derivative of h.
        let (blo, bhi) = if g(line.lo) <= 0.0 && g(line.hi) >= 0.0 {
            (line.lo, line.hi)
        } else {
            (lo, hi)
        };
        let (t, bisections) = if g(blo) >= 0.0 {
            (blo, 0)
        } else if g(bhi) <= 0.0 {
            (bhi, 0)
        } else {
            bisect_sign(g, blo, bhi, 4096)
        };
        total += expansions + line.iterations + bisections;
        y.push(t);
    }
    Ok((y, total))
}

/// Prox of `max_k <a_k, y> + b_k` by projected gradient ascent on the dual
/// `D(lambda) = min_y sum_k lambda_k l_k(y) + eps^-1 phi_p(x - y)` over the
/// simplex. The inner minimizer is `y = x - J_{p*}(eps s)` with
/// `s = sum_k lambda_k a_k`, and `grad D = (l_k(y))_k`. The duality gap is
/// `max_k l_k(y) - <lambda, l(y)>`.
///
/// Steps are accepted on a local curvature test over gradients rather than
/// on dual values, whose changes drop below rounding near the optimum.
fn solve_max_affine(pieces: &[AffinePiece], x: &[f64], cfg: &EnvelopeConfig) -> Result<(Vec<f64>, usize)> {
    let (p, eps, p_star) = (cfg.p, cfg.eps, cfg.p_star());
    let n = x.len();
    let inner = |lambda: &[f64]| -> (Vec<f64>, Vec<f64>) {
        let s: Vec<f64> = (0..n)
            .map(|j| pieces.iter().zip(lambda).map(|(a, l)| l * a.slope[j]).sum())
            .collect();
        let z = duality_map(&s.iter().map(|v| eps * v).collect::<Vec<_>>(), p_star);
        let y = sub(x, &z);
        let ell: Vec<f64> = pieces.iter().map(|a| dot(&a.slope, &y) + a.offset).collect();
        (y, ell)
    };
    let gap_of = |lambda: &[f64], ell: &[f64]| -> f64 {
        ell.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - dot(lambda, ell)
    };

    let mut lambda = vec![0.0; pieces.len()];
    let start = pieces
        .iter()
        .enumerate()
        .map(|(k, a)| (k, dot(&a.slope, x) + a.offset))
        .fold(
            (0, f64::NEG_INFINITY),
            |best, cur| if cur.1 > best.1 { cur } else { best },
        )
        .0;
    lambda[start] = 1.0;
    let (mut y, mut ell) = inner(&lambda);
    let mut step = 1.0 / (eps * pieces.iter().map(|a| dot(&a.slope, &a.slope)).sum::<f64>().max(1e-12));
    let mut iterations = 0usize;
    let mut gap = gap_of(&lambda, &ell);
    while iterations < cfg.max_inner_iters && gap > 1e-15 * (1.0 + max_affine_value(pieces, &y).abs()) {
        iterations += 1;
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<f64> = lambda.iter().zip(&ell).map(|(l, g)| l + step * g).collect();
            let cand = project_simplex(&trial);
            let diff: Vec<f64> = cand.iter().zip(&lambda).map(|(a, b)| a - b).collect();
            if diff.iter().all(|d| *d == 0.0) {
                break;
            }
            let (cy, cell) = inner(&cand);
            let curvature = -dot(&sub(&cell, &ell), &diff);
            if curvature <= dot(&diff, &diff) / step {
                lambda = cand;
                y = cy;
                ell = cell;
                step *= 1.5;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        gap = gap_of(&lambda, &ell);
        if !accepted {
            break;
        }
    }
    let h = max_affine_value(pieces, &y) + phi_p(&sub(x, &y), p) / eps;
    let tolerance = cfg.inner_tol * (1.0 + h.abs());
    if gap > tolerance {
        return Err(Error::InnerSolverFailed {
            method: ProxMethod::Descent.as_str(),
            iterations,
            residual: gap,
            tolerance,
        });
    }
    Ok((y, iterations))
}

/// `f_eps(x)`.
pub fn envelope(f: &ConvexFunctionSpec, x: &[f64], cfg: &EnvelopeConfig) -> Result<f64> {
    Ok(prox(f, x, cfg)?.envelope_value)
}

/// `grad f_eps(x) = eps^-1 J_p(x - prox(x))`.
pub fn envelope_gradient(f: &ConvexFunctionSpec, x: &[f64], cfg: &EnvelopeConfig) -> Result<LpVector> {
    Ok(prox(f, x, cfg)?.gradient)
}

/// Iterates `x_{i+1} = prox(x_i)`.
///
/// `points` and `f_values` have `iters + 1` entries; `envelope_values`,
/// `gradients` and `methods` describe the step taken from each of the first
/// `iters` points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub points: Vec<Vec<f64>>,
    pub f_values: Vec<ExtReal>,
    pub envelope_values: Vec<f64>,
    pub gradients: Vec<Vec<f64>>,
    pub methods: Vec<ProxMethod>,
}

impl Trajectory {
    pub fn last(&self) -> &[f64] {
        self.points.last().expect("trajectory holds the start point")
    }
}

pub fn proximal_point_run(
    f: &ConvexFunctionSpec,
    x0: &[f64],
    cfg: &EnvelopeConfig,
    iters: usize,
) -> Result<Trajectory> {
    check_input(f, x0, cfg)?;
    let mut traj = Trajectory {
        points: vec![x0.to_vec()],
        f_values: vec![f.evaluate(x0)],
        envelope_values: Vec::with_capacity(iters),
        gradients: Vec::with_capacity(iters),
        methods: Vec::with_capacity(iters),
    };
    for iteration in 0..iters {
        let current = traj.points.last().expect("non-empty");
        let step = prox(f, current, cfg).map_err(|e| Error::ProximalPoint {
            iteration,
            source: Box::new(e),
        })?;
        traj.envelope_values.push(step.envelope_value);
        traj.gradients.push(step.gradient.into_coords());
        traj.methods.push(step.method);
        let next = step.prox_point.into_coords();
        traj.f_values.push(f.evaluate(&next));
        traj.points.push(next);
    }
    Ok(traj)
}

/// Checks `||x - prox(x)||_p^p <= f(x) p eps` over a sweep of `eps` for a
/// nonnegative `f`, and fits the exponent of the distance against `eps`.
pub fn prox_distance_bound_check(
    f: &ConvexFunctionSpec,
    x: &[f64],
    cfg: &EnvelopeConfig,
    eps_sweep: &[f64],
) -> Result<CheckReport> {
    let name = format!("prox_distance_bound/{}", f.name());
    let Some(fx) = f.evaluate(x).finite() else {
        return Ok(CheckReport::inapplicable(name, "f(x) = +inf", 0));
    };
    if !f.infimum().is_some_and(|m| m >= 0.0) {
        return Ok(CheckReport::inapplicable(name, "f not known to be nonnegative", 0));
    }
    let slack = 1e-9;
    let mut worst_ratio = 0.0_f64;
    let mut violations = 0usize;
    let mut pairs = Vec::new();
    for &eps in eps_sweep {
        let c = cfg.with_eps(eps)?;
        let r = prox(f, x, &c)?;
        let d = lp_norm(&sub(x, &r.prox_point), cfg.p);
        let bound = fx * cfg.p * eps;
        let lhs = d.powf(cfg.p);
        if lhs > bound * (1.0 + slack) {
            violations += 1;
        }
        if bound > 0.0 {
            worst_ratio = worst_ratio.max(lhs / bound);
        } else if lhs > 0.0 {
            worst_ratio = f64::INFINITY;
        }
        if d > 0.0 {
            pairs.push((eps, d));
        }
    }
    let mut report = CheckReport::new(name, slack, 0);
    report.metric("max_ratio", worst_ratio);
    report.metric("violations", violations as f64);
    report.metric("sweep_points", eps_sweep.len() as f64);
    if let Some(fit) = PowerFit::fit(&pairs) {
        report.metric("fitted_exponent", fit.exponent);
        report.metric("fit_max_residual", fit.max_residual);
    }
    Ok(report.conclude(violations == 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::log_space;

    fn cfg(p: f64, eps: f64) -> EnvelopeConfig {
        EnvelopeConfig::new(p, eps).unwrap()
    }

    fn onenorm(c: f64, offset: f64) -> ConvexFunctionSpec {
        ConvexFunctionSpec::one_norm(vec![c], 1.0, offset).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(EnvelopeConfig::new(1.0, 1.0).is_err());
        assert!(EnvelopeConfig::new(2.0, 0.0).is_err());
        assert!(cfg(2.0, 1.0).with_inner_tol(-1.0).is_err());
    }

    #[test]
    fn zero_prox_is_identity() {
        let r = prox(&ConvexFunctionSpec::Zero, &[1.0, -2.0], &cfg(3.0, 0.5)).unwrap();
        assert_eq!(r.prox_point.coords(), &[1.0, -2.0]);
        assert_eq!(r.envelope_value, 0.0);
        assert_eq!(r.gradient.coords(), &[0.0, 0.0]);
    }

    #[test]
    fn quadratic_prox_example() {
        let q = ConvexFunctionSpec::quadratic(vec![1.0], vec![0.0]).unwrap();
        for solver in [SolverPreference::Auto, SolverPreference::Numerical] {
            let r = prox(&q, &[1.0], &cfg(2.0, 1.0).with_solver(solver)).unwrap();
            assert!((r.prox_point[0] - 0.5).abs() < 1e-14, "{solver:?}");
            assert!((r.gradient[0] - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn shifted_onenorm_example() {
        // f(y) = |y - 4.5| + 0.5 at x = 2: prox 3, value f(3) + (2 - 3)^2 / 2 = 2.5.
        let f = onenorm(4.5, 0.5);
        for solver in [SolverPreference::Auto, SolverPreference::Numerical] {
            let r = prox(&f, &[2.0], &cfg(2.0, 1.0).with_solver(solver)).unwrap();
            assert!((r.prox_point[0] - 3.0).abs() < 1e-12);
            assert!((r.envelope_value - 2.5).abs() < 1e-12);
        }
    }

    #[test]
    fn huber_examples() {
        let f = onenorm(0.0, 0.0);
        let c = cfg(2.0, 1.0);
        assert!((envelope(&f, &[0.5], &c).unwrap() - 0.125).abs() < 1e-15);
        assert!((envelope(&f, &[2.0], &c).unwrap() - 1.5).abs() < 1e-15);
        assert!((envelope_gradient(&f, &[2.0], &c).unwrap()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn box_envelope_is_distance_power() {
        let b = ConvexFunctionSpec::box_indicator(vec![0.0, -1.0], vec![1.0, 1.0]).unwrap();
        for p in [1.5, 3.0] {
            let c = cfg(p, 0.7);
            let x = [2.5, 0.3];
            let expected = phi_p(&[1.5, 0.0], p) / 0.7;
            for solver in [SolverPreference::Auto, SolverPreference::Numerical] {
                let v = envelope(&b, &x, &c.with_solver(solver)).unwrap();
                assert!((v - expected).abs() < 1e-12, "{p} {solver:?}: {v} vs {expected}");
            }
        }
    }

    #[test]
    fn numerical_matches_closed_form_for_affine() {
        let f = ConvexFunctionSpec::affine(vec![0.7, -1.2], 0.3).unwrap();
        for p in [1.5, 2.0, 4.0] {
            let c = cfg(p, 0.8);
            let a = prox(&f, &[0.4, 1.0], &c).unwrap();
            let b = prox(&f, &[0.4, 1.0], &c.with_solver(SolverPreference::Numerical)).unwrap();
            for (u, v) in a.prox_point.iter().zip(b.prox_point.iter()) {
                assert!((u - v).abs() < 1e-12, "p={p}: {u} vs {v}");
            }
        }
    }

    #[test]
    fn max_affine_descent_converges() {
        let f = crate::catalogue::representatives(2).pop().unwrap();
        for p in [1.5, 2.0, 3.0] {
            let c = cfg(p, 0.9);
            for x in [[0.0, 0.0], [1.0, -2.0], [3.0, 0.5], [-0.4, 0.25]] {
                let r = prox(&f, &x, &c).unwrap();
                assert_eq!(r.method, ProxMethod::Descent);
                // Dominance over a few competitor points.
                for dy in [[1e-3, 0.0], [0.0, -1e-3], [1e-4, 1e-4]] {
                    let y: Vec<f64> = r.prox_point.iter().zip(dy).map(|(a, b)| a + b).collect();
                    let other = c.regularized_objective(&f, &x, &y).to_f64();
                    assert!(r.envelope_value <= other + 1e-12);
                }
            }
        }
    }

    #[test]
    fn proximal_point_examples() {
        let q = ConvexFunctionSpec::quadratic(vec![1.0], vec![0.0]).unwrap();
        let t = proximal_point_run(&q, &[1.0], &cfg(2.0, 1.0), 20).unwrap();
        for (k, x) in t.points.iter().enumerate() {
            assert!((x[0] - 0.5_f64.powi(k as i32)).abs() < 1e-12);
        }
        let t = proximal_point_run(&onenorm(4.5, 0.5), &[0.0], &cfg(2.0, 1.0), 6).unwrap();
        let xs: Vec<f64> = t.points.iter().map(|x| x[0]).collect();
        assert_eq!(xs, vec![0.0, 1.0, 2.0, 3.0, 4.0, 4.5, 4.5]);
        let z = proximal_point_run(&ConvexFunctionSpec::Zero, &[0.3], &cfg(1.5, 1.0), 3).unwrap();
        assert!(z.points.iter().all(|x| x[0] == 0.3));
    }

    #[test]
    fn distance_bound_examples() {
        let sweep = log_space(1e-3, 1.0, 10);
        let r = prox_distance_bound_check(&onenorm(0.0, 0.0), &[2.0], &cfg(2.0, 1.0), &sweep).unwrap();
        assert!(r.passed, "{r:?}");
        assert!((r.get("fitted_exponent").unwrap() - 1.0).abs() < 1e-9);
        let r = prox_distance_bound_check(&ConvexFunctionSpec::Zero, &[2.0], &cfg(2.0, 1.0), &sweep).unwrap();
        assert!(r.passed && r.get("max_ratio") == Some(0.0));
        let b = ConvexFunctionSpec::box_indicator(vec![0.0], vec![1.0]).unwrap();
        let r = prox_distance_bound_check(&b, &[2.0], &cfg(2.0, 1.0), &sweep).unwrap();
        assert!(r.is_inapplicable());
    }
}
