//! Named registry of checks and the suite runner.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::checks::*;
use super::sampling::derive_seed;
use crate::catalogue::{representatives, ConvexFunctionSpec};
use crate::envelope::EnvelopeConfig;
use crate::error::{Error, Result};
use crate::lp_space::{SamplingBudget, SpaceConfig};
use crate::report::CheckReport;

/// Parameters shared by every check in a suite run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub p: f64,
    pub dim: usize,
    pub eps: f64,
    /// Replaces each check's default tolerance when set.
    pub tol: Option<f64>,
    pub samples: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            p: 2.0,
            dim: 2,
            eps: 1.0,
            tol: None,
            samples: 10_000,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        EnvelopeConfig::new(self.p, self.eps)?;
        if self.dim == 0 {
            return Err(crate::error::domain("dim must be positive"));
        }
        if self.samples < 10 {
            return Err(crate::error::domain("samples must be at least 10"));
        }
        if let Some(t) = self.tol {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(crate::error::domain(format!(
                    "tolerance must be finite and >= 0, got {t}"
                )));
            }
        }
        Ok(())
    }
}

type Runner = fn(&SuiteConfig, u64) -> Result<Vec<CheckReport>>;

struct Entry {
    name: &'static str,
    group: &'static str,
    run: Runner,
}

/// Group names accepted by [`run_suite`] in addition to individual checks.
pub const GROUPS: &[&str] = &[
    "all",
    "duality",
    "moduli",
    "catalogue",
    "conjugate",
    "envelope",
    "theorem6",
];

fn one(r: Result<CheckReport>) -> Result<Vec<CheckReport>> {
    r.map(|x| vec![x])
}

fn dual_c1(cfg: &SuiteConfig, seed: u64) -> Result<f64> {
    let space = SpaceConfig::new(cfg.dim, cfg.p)?.dual();
    check_strong_p_monotonicity_of_jp(&space, cfg.samples, seed ^ 0xc1)
        .c_hat
        .ok_or_else(|| crate::error::domain("no usable pairs for the dual constant"))
}

fn registry() -> Vec<Entry> {
    vec![
        Entry {
            name: "duality_map_law",
            group: "duality",
            run: |c, s| {
                one(check_duality_map_law(
                    &[1, 2, 5, 20],
                    &[1.5, 2.0, 3.0, 4.0],
                    c.samples,
                    s,
                    c.tol,
                ))
            },
        },
        Entry {
            name: "strong_p_monotonicity_jp",
            group: "duality",
            run: |c, s| {
                Ok(vec![
                    check_strong_p_monotonicity_of_jp(&SpaceConfig::new(c.dim, c.p)?, c.samples, s).report,
                ])
            },
        },
        Entry {
            name: "holder_jp",
            group: "duality",
            run: |c, s| {
                Ok(vec![
                    check_holder_of_jp(&SpaceConfig::new(c.dim, c.p)?, c.samples, s, c.tol)?.0,
                ])
            },
        },
        Entry {
            name: "phi_convexity",
            group: "duality",
            run: |c, s| {
                Ok(vec![check_phi_strict_and_uniform_convexity(
                    &SpaceConfig::new(c.dim, c.p)?,
                    c.samples,
                    s,
                )])
            },
        },
        Entry {
            name: "modulus_of_convexity",
            group: "moduli",
            run: |c, s| one(check_modulus_of_convexity(&SamplingBudget::default(), s, c.tol)),
        },
        Entry {
            name: "modulus_of_smoothness",
            group: "moduli",
            run: |c, s| one(check_modulus_of_smoothness(&SamplingBudget::default(), s, c.tol)),
        },
        Entry {
            name: "catalogue_subgradients",
            group: "catalogue",
            run: |c, s| Ok(check_catalogue_subgradients(c.dim, c.samples / 10, s, c.tol)),
        },
        Entry {
            name: "exact_prox_grid",
            group: "catalogue",
            run: |c, s| {
                let exps: Vec<f64> = if c.p == 2.0 { vec![2.0] } else { vec![c.p, 2.0] };
                Ok(check_exact_prox_against_grid(&exps, 10, s))
            },
        },
        Entry {
            name: "fenchel_equality",
            group: "catalogue",
            run: |c, s| check_fenchel_equalities(c.dim, 20, s),
        },
        Entry {
            name: "phi_conjugates",
            group: "conjugate",
            run: |c, _| one(check_phi_conjugates(c.tol)),
        },
        Entry {
            name: "biconjugates",
            group: "conjugate",
            run: |c, _| check_biconjugates(c.tol),
        },
        Entry {
            name: "conjugate_grid_properties",
            group: "conjugate",
            run: |c, _| check_conjugate_grid_properties(c.tol),
        },
        Entry {
            name: "huber_envelope",
            group: "envelope",
            run: |c, _| one(check_huber(&[0.25, 1.0, 4.0], c.tol)),
        },
        Entry {
            name: "gradient_fd",
            group: "envelope",
            run: |c, s| check_gradient_finite_differences(c.dim, c.p, c.eps, 200, s, c.tol),
        },
        Entry {
            name: "envelope_invariants",
            group: "envelope",
            run: |c, s| check_envelope_invariants(c.dim, c.p, c.eps, c.samples / 10, s, c.tol),
        },
        Entry {
            name: "hilbert_lipschitz",
            group: "envelope",
            run: |c, s| check_hilbert_lipschitz(c.dim, &[0.5, 1.0, 2.0], c.samples / 10, s, c.tol),
        },
        Entry {
            name: "prox_distance",
            group: "envelope",
            run: |c, s| check_prox_distance_bounds(c.dim, c.p, 10, s),
        },
        Entry {
            name: "proximal_point",
            group: "envelope",
            run: |c, _| one(check_proximal_point(c.tol)),
        },
        Entry {
            name: "conjugate_shift",
            group: "theorem6",
            run: |c, _| {
                let gs = [
                    ConvexFunctionSpec::one_norm(vec![0.0], 1.0, 0.0)?,
                    ConvexFunctionSpec::quadratic(vec![1.0], vec![0.0])?,
                    ConvexFunctionSpec::Zero,
                ];
                let mut out = Vec::new();
                for g in &gs {
                    for eps in [0.5, 1.0] {
                        out.push(verify_conjugate_shift(g, &EnvelopeConfig::new(c.p, eps)?, c.tol)?);
                    }
                }
                Ok(out)
            },
        },
        Entry {
            name: "strong_pstar_monotonicity",
            group: "theorem6",
            run: |c, s| {
                let cfg = EnvelopeConfig::new(c.p, c.eps)?;
                let c1 = if c.p <= 2.0 { dual_c1(c, s)? } else { f64::NAN };
                representatives(c.dim)
                    .par_iter()
                    .enumerate()
                    .map(|(k, g)| {
                        verify_strong_pstar_monotonicity_of_conjugate(
                            g,
                            c.dim,
                            &cfg,
                            c1,
                            c.samples,
                            s.wrapping_add(k as u64),
                            c.tol,
                        )
                    })
                    .collect()
            },
        },
        Entry {
            name: "gradient_holder",
            group: "theorem6",
            run: |c, s| {
                let cfg = EnvelopeConfig::new(c.p, c.eps)?;
                let c1 = if c.p <= 2.0 { dual_c1(c, s)? } else { f64::NAN };
                representatives(c.dim)
                    .par_iter()
                    .enumerate()
                    .map(|(k, g)| {
                        check_gradient_holder(g, c.dim, &cfg, c1, c.samples / 10, s.wrapping_add(k as u64), c.tol)
                            .map(|r| r.0)
                    })
                    .collect()
            },
        },
        Entry {
            name: "nonconvexity_counterexample",
            group: "theorem6",
            run: |_, _| {
                Ok(vec![check_nonconvexity_counterexample(
                    &[0.01, 0.1, 1.0, 10.0, 0.0],
                    -10.0,
                    10.0,
                    10_000,
                )])
            },
        },
    ]
}

/// All individual check names, in execution order.
pub fn available_checks() -> Vec<&'static str> {
    registry().iter().map(|e| e.name).collect()
}

fn available_listing() -> String {
    let mut names: Vec<&str> = GROUPS.to_vec();
    names.extend(available_checks());
    names.join(", ")
}

/// Runs the named checks or groups with per-check seeds derived from `seed`.
///
/// Reports come back in registry order regardless of scheduling. A check
/// that errors produces a failing report carrying the error message.
pub fn run_suite(names: &[&str], seed: u64, cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    cfg.validate()?;
    let entries = registry();
    let mut selected = vec![false; entries.len()];
    for raw in names {
        let name = raw.trim();
        let mut matched = false;
        for (i, e) in entries.iter().enumerate() {
            if name == "all" || e.group == name || e.name == name {
                selected[i] = true;
                matched = true;
            }
        }
        if !matched {
            return Err(Error::UnknownCheck {
                name: name.to_string(),
                available: available_listing(),
            });
        }
    }
    let chosen: Vec<&Entry> = entries
        .iter()
        .zip(&selected)
        .filter(|(_, s)| **s)
        .map(|(e, _)| e)
        .collect();
    let results: Vec<Vec<CheckReport>> = chosen
        .par_iter()
        .map(|e| {
            let s = derive_seed(seed, e.name);
            match (e.run)(cfg, s) {
                Ok(reports) => reports
                    .into_iter()
                    .map(|mut r| {
                        r.seed = s;
                        r
                    })
                    .collect(),
                Err(err) => vec![CheckReport::new(e.name, 0.0, s)
                    .with_note(format!("error: {err}"))
                    .conclude(false)],
            }
        })
        .collect();
    Ok(results.into_iter().flatten().collect())
}

/// True when no executed check failed (inapplicable checks do not fail).
pub fn all_passed(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| r.passed)
}
