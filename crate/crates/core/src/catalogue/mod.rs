//! A closed catalogue of proper, convex, lower semi-continuous functions on
//! `R^n` with exact evaluation, a deterministic subgradient selection and
//! closed-form proximal maps and conjugates where they exist.

mod ext_real;
mod parse;

pub use ext_real::ExtReal;
pub use parse::{parse_function_spec, parse_vector};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::legendre::{conjugate_at_point, GridSpec};
use crate::lp_space::{dual_exponent, duality_map, lp_norm, scalar_duality};
use crate::numeric::{compensated_sum, dot, project_simplex};
use crate::report::CheckReport;

/// One affine piece `x -> <slope, x> + offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffinePiece {
    pub slope: Vec<f64>,
    pub offset: f64,
}

/// Symbolic description of a catalogue function.
///
/// Offsets shift values only. `QuadraticDiag` is `½ Σ w_i (x_i - c_i)^2`,
/// `NormPower` is `weight · ||x - c||_q^q / q + offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConvexFunctionSpec {
    Zero,
    Affine {
        slope: Vec<f64>,
        offset: f64,
    },
    QuadraticDiag {
        weights: Vec<f64>,
        center: Vec<f64>,
    },
    NormPower {
        q: f64,
        center: Vec<f64>,
        weight: f64,
        offset: f64,
    },
    OneNorm {
        center: Vec<f64>,
        weight: f64,
        offset: f64,
    },
    BoxIndicator {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    MaxAffine {
        pieces: Vec<AffinePiece>,
    },
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidSpec(msg.into())
}

fn all_finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

impl ConvexFunctionSpec {
    pub fn zero() -> Self {
        Self::Zero
    }

    pub fn affine(slope: Vec<f64>, offset: f64) -> Result<Self> {
        Self::Affine { slope, offset }.validated()
    }

    pub fn quadratic(weights: Vec<f64>, center: Vec<f64>) -> Result<Self> {
        Self::QuadraticDiag { weights, center }.validated()
    }

    pub fn norm_power(q: f64, center: Vec<f64>, weight: f64, offset: f64) -> Result<Self> {
        Self::NormPower {
            q,
            center,
            weight,
            offset,
        }
        .validated()
    }

    pub fn one_norm(center: Vec<f64>, weight: f64, offset: f64) -> Result<Self> {
        Self::OneNorm { center, weight, offset }.validated()
    }

    pub fn box_indicator(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        Self::BoxIndicator { lo, hi }.validated()
    }

    pub fn max_affine(pieces: Vec<AffinePiece>) -> Result<Self> {
        Self::MaxAffine { pieces }.validated()
    }

    /// `phi_p = ||.||_p^p / p` on `R^dim`.
    pub fn phi(p: f64, dim: usize) -> Result<Self> {
        Self::norm_power(p, vec![0.0; dim], 1.0, 0.0)
    }

    /// Indicator of the single point `point`.
    pub fn point_indicator(point: Vec<f64>) -> Result<Self> {
        Self::box_indicator(point.clone(), point)
    }

    fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    /// Checks the parameter constraints that make the function convex and proper.
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Zero => Ok(()),
            Self::Affine { slope, offset } => {
                if slope.is_empty() || !all_finite(slope) || !offset.is_finite() {
                    return Err(invalid("affine: slope must be a non-empty finite vector"));
                }
                Ok(())
            }
            Self::QuadraticDiag { weights, center } => {
                if center.is_empty() || weights.len() != center.len() {
                    return Err(invalid("quadratic: weights and center must have equal non-zero length"));
                }
                if !all_finite(center) || weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
                    return Err(invalid("quadratic: weights must be finite and nonnegative"));
                }
                Ok(())
            }
            Self::NormPower {
                q,
                center,
                weight,
                offset,
            } => {
                if !(q.is_finite() && *q > 1.0) {
                    return Err(invalid(format!("normpower: q must be finite and > 1, got {q}")));
                }
                if center.is_empty() || !all_finite(center) || !offset.is_finite() {
                    return Err(invalid("normpower: center must be a non-empty finite vector"));
                }
                if !(weight.is_finite() && *weight > 0.0) {
                    return Err(invalid("normpower: weight must be positive"));
                }
                Ok(())
            }
            Self::OneNorm { center, weight, offset } => {
                if center.is_empty() || !all_finite(center) || !offset.is_finite() {
                    return Err(invalid("onenorm: center must be a non-empty finite vector"));
                }
                if !(weight.is_finite() && *weight > 0.0) {
                    return Err(invalid("onenorm: weight must be positive"));
                }
                Ok(())
            }
            Self::BoxIndicator { lo, hi } => {
                if lo.is_empty() || lo.len() != hi.len() || !all_finite(lo) || !all_finite(hi) {
                    return Err(invalid(
                        "box: lo and hi must be finite vectors of equal non-zero length",
                    ));
                }
                if lo.iter().zip(hi).any(|(a, b)| a > b) {
                    return Err(invalid("box: lo must not exceed hi (empty domain)"));
                }
                Ok(())
            }
            Self::MaxAffine { pieces } => {
                let Some(first) = pieces.first() else {
                    return Err(invalid("maxaffine: at least one piece required"));
                };
                let n = first.slope.len();
                if n == 0 {
                    return Err(invalid("maxaffine: slopes must be non-empty"));
                }
                for piece in pieces {
                    if piece.slope.len() != n || !all_finite(&piece.slope) || !piece.offset.is_finite() {
                        return Err(invalid("maxaffine: all pieces need finite slopes of equal length"));
                    }
                }
                Ok(())
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Zero => "zero",
            Self::Affine { .. } => "affine",
            Self::QuadraticDiag { .. } => "quadratic",
            Self::NormPower { .. } => "normpower",
            Self::OneNorm { .. } => "onenorm",
            Self::BoxIndicator { .. } => "box",
            Self::MaxAffine { .. } => "maxaffine",
        }
    }

    /// The dimension fixed by the parameters; `None` for `Zero`.
    pub fn dim(&self) -> Option<usize> {
        match self {
            Self::Zero => None,
            Self::Affine { slope, .. } => Some(slope.len()),
            Self::QuadraticDiag { center, .. } | Self::NormPower { center, .. } | Self::OneNorm { center, .. } => {
                Some(center.len())
            }
            Self::BoxIndicator { lo, .. } => Some(lo.len()),
            Self::MaxAffine { pieces } => pieces.first().map(|p| p.slope.len()),
        }
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        match self.dim() {
            Some(d) if d != n => Err(Error::DimensionMismatch { expected: d, found: n }),
            _ => Ok(()),
        }
    }

    /// Exact value at `x`; `+inf` outside the domain.
    pub fn evaluate(&self, x: &[f64]) -> ExtReal {
        debug_assert!(self.check_dim(x.len()).is_ok());
        match self {
            Self::Zero => ExtReal::ZERO,
            Self::Affine { slope, offset } => ExtReal::Finite(dot(slope, x) + offset),
            Self::QuadraticDiag { weights, center } => ExtReal::Finite(
                0.5 * compensated_sum(
                    weights
                        .iter()
                        .zip(center)
                        .zip(x)
                        .map(|((w, c), v)| w * (v - c) * (v - c)),
                ),
            ),
            Self::NormPower {
                q,
                center,
                weight,
                offset,
            } => ExtReal::Finite(
                weight * compensated_sum(center.iter().zip(x).map(|(c, v)| (v - c).abs().powf(*q))) / q + offset,
            ),
            Self::OneNorm { center, weight, offset } => {
                ExtReal::Finite(weight * compensated_sum(center.iter().zip(x).map(|(c, v)| (v - c).abs())) + offset)
            }
            Self::BoxIndicator { lo, hi } => {
                if x.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| a <= v && v <= b) {
                    ExtReal::ZERO
                } else {
                    ExtReal::PosInf
                }
            }
            Self::MaxAffine { pieces } => ExtReal::Finite(max_affine_value(pieces, x)),
        }
    }

    pub fn in_domain(&self, x: &[f64]) -> bool {
        self.evaluate(x).is_finite()
    }

    /// One element of `∂f(x)`, or `None` when the subdifferential is empty.
    ///
    /// At kinks the element of minimal Euclidean norm is returned.
    pub fn subgradient_any(&self, x: &[f64]) -> Option<Vec<f64>> {
        let n = x.len();
        match self {
            Self::Zero => Some(vec![0.0; n]),
            Self::Affine { slope, .. } => Some(slope.clone()),
            Self::QuadraticDiag { weights, center } => Some(
                weights
                    .iter()
                    .zip(center)
                    .zip(x)
                    .map(|((w, c), v)| w * (v - c))
                    .collect(),
            ),
            Self::NormPower { q, center, weight, .. } => Some(
                center
                    .iter()
                    .zip(x)
                    .map(|(c, v)| weight * scalar_duality(v - c, *q))
                    .collect(),
            ),
            Self::OneNorm { center, weight, .. } => Some(
                center
                    .iter()
                    .zip(x)
                    .map(|(c, v)| if v == c { 0.0 } else { weight * (v - c).signum() })
                    .collect(),
            ),
            Self::BoxIndicator { .. } => self.in_domain(x).then(|| vec![0.0; n]),
            Self::MaxAffine { pieces } => {
                let m = max_affine_value(pieces, x);
                let tol = 1e-12 * (1.0 + m.abs());
                let active: Vec<&[f64]> = pieces
                    .iter()
                    .filter(|p| dot(&p.slope, x) + p.offset >= m - tol)
                    .map(|p| p.slope.as_slice())
                    .collect();
                Some(min_norm_in_hull(&active))
            }
        }
    }

    /// `l^q` distance from `v` to `∂f(x)`; `+inf` outside the domain.
    ///
    /// Exact for separable functions. For `MaxAffine` the Euclidean
    /// projection onto the active hull is measured, an upper bound.
    pub fn subdifferential_distance(&self, x: &[f64], v: &[f64], q: f64) -> f64 {
        if !self.in_domain(x) {
            return f64::INFINITY;
        }
        let gap: Vec<f64> = match self {
            Self::MaxAffine { pieces } => {
                let m = max_affine_value(pieces, x);
                let tol = 1e-12 * (1.0 + m.abs());
                let shifted: Vec<Vec<f64>> = pieces
                    .iter()
                    .filter(|p| dot(&p.slope, x) + p.offset >= m - tol)
                    .map(|p| p.slope.iter().zip(v).map(|(a, b)| a - b).collect())
                    .collect();
                let refs: Vec<&[f64]> = shifted.iter().map(Vec::as_slice).collect();
                min_norm_in_hull(&refs)
            }
            _ => (0..x.len())
                .map(|i| {
                    let (lo, hi) = self.coordinate_subdifferential(i, x[i]);
                    (lo - v[i]).max(v[i] - hi).max(0.0)
                })
                .collect(),
        };
        lp_norm(&gap, q)
    }

    /// `∂f_i(t)` as an interval for separable `f` with `t` in the domain.
    fn coordinate_subdifferential(&self, i: usize, t: f64) -> (f64, f64) {
        match self {
            Self::OneNorm { center, weight, .. } if t == center[i] => (-weight, *weight),
            Self::BoxIndicator { lo, hi } => {
                let below = if t == lo[i] { f64::NEG_INFINITY } else { 0.0 };
                let above = if t == hi[i] { f64::INFINITY } else { 0.0 };
                (below, above)
            }
            _ => {
                let g = self.coordinate_subgradient(i, t);
                (g, g)
            }
        }
    }

    /// Closed-form proximal point `argmin_y f(y) + eps^-1 phi_p(x - y)` when
    /// one is known: `Zero`, `BoxIndicator` and `Affine` for every `p`,
    /// `OneNorm` and `QuadraticDiag` for `p = 2`.
    pub fn exact_prox_if_available(&self, x: &[f64], p: f64, eps: f64) -> Option<Vec<f64>> {
        match self {
            Self::Zero => Some(x.to_vec()),
            Self::BoxIndicator { lo, hi } => {
                // phi_p(x - y) is coordinate-separable, so the clamp is exact for every p.
                Some(
                    x.iter()
                        .zip(lo.iter().zip(hi))
                        .map(|(v, (a, b))| v.clamp(*a, *b))
                        .collect(),
                )
            }
            Self::Affine { slope, .. } => {
                let p_star = dual_exponent(p).ok()?;
                let scaled: Vec<f64> = slope.iter().map(|a| eps * a).collect();
                let shift = duality_map(&scaled, p_star);
                Some(x.iter().zip(shift).map(|(v, s)| v - s).collect())
            }
            Self::OneNorm { center, weight, .. } if p == 2.0 => {
                let thr = eps * weight;
                Some(
                    x.iter()
                        .zip(center)
                        .map(|(v, c)| {
                            let d = v - c;
                            c + d.signum() * (d.abs() - thr).max(0.0)
                        })
                        .collect(),
                )
            }
            Self::QuadraticDiag { weights, center } if p == 2.0 => Some(
                x.iter()
                    .zip(weights.iter().zip(center))
                    .map(|(v, (w, c))| (v + eps * w * c) / (1.0 + eps * w))
                    .collect(),
            ),
            _ => None,
        }
    }

    /// Closed-form convex conjugate `f*(s) = sup_x <s, x> - f(x)`, where known.
    pub fn conjugate_closed_form(&self, s: &[f64]) -> Option<ExtReal> {
        let indicator = |ok: bool, v: f64| if ok { ExtReal::Finite(v) } else { ExtReal::PosInf };
        match self {
            Self::Zero => Some(indicator(s.iter().all(|v| *v == 0.0), 0.0)),
            Self::Affine { slope, offset } => Some(indicator(s == slope.as_slice(), -offset)),
            Self::QuadraticDiag { weights, center } => {
                let mut terms = Vec::with_capacity(s.len());
                for ((si, w), c) in s.iter().zip(weights).zip(center) {
                    if *w > 0.0 {
                        terms.push(si * si / (2.0 * w) + si * c);
                    } else if *si != 0.0 {
                        return Some(ExtReal::PosInf);
                    }
                }
                Some(ExtReal::Finite(compensated_sum(terms)))
            }
            Self::NormPower {
                q,
                center,
                weight,
                offset,
            } => {
                let q_star = dual_exponent(*q).ok()?;
                let scaled: f64 = compensated_sum(s.iter().map(|v| (v / weight).abs().powf(q_star)));
                Some(ExtReal::Finite(dot(s, center) - offset + weight * scaled / q_star))
            }
            Self::OneNorm { center, weight, offset } => {
                let ok = s.iter().all(|v| v.abs() <= *weight);
                Some(indicator(ok, dot(s, center) - offset))
            }
            Self::BoxIndicator { lo, hi } => Some(ExtReal::Finite(compensated_sum(
                s.iter().zip(lo.iter().zip(hi)).map(|(v, (a, b))| (v * a).max(v * b)),
            ))),
            Self::MaxAffine { .. } => None,
        }
    }

    /// `inf f`, when known in closed form.
    pub fn infimum(&self) -> Option<f64> {
        match self {
            Self::Zero | Self::QuadraticDiag { .. } | Self::BoxIndicator { .. } => Some(0.0),
            Self::NormPower { offset, .. } | Self::OneNorm { offset, .. } => Some(*offset),
            Self::Affine { slope, offset } => slope.iter().all(|a| *a == 0.0).then_some(*offset),
            Self::MaxAffine { .. } => None,
        }
    }

    /// A point of `argmin f`, when known.
    pub fn known_minimizer(&self, dim: usize) -> Option<Vec<f64>> {
        match self {
            Self::Zero => Some(vec![0.0; dim]),
            Self::QuadraticDiag { center, .. } | Self::NormPower { center, .. } | Self::OneNorm { center, .. } => {
                Some(center.clone())
            }
            Self::BoxIndicator { lo, hi } => Some(lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect()),
            Self::Affine { slope, .. } => slope.iter().all(|a| *a == 0.0).then(|| vec![0.0; dim]),
            Self::MaxAffine { .. } => None,
        }
    }

    /// Max-norm distance from `x` to `argmin f`, when the minimizer set is known.
    pub fn distance_to_argmin(&self, x: &[f64]) -> Option<f64> {
        let d = match self {
            Self::Zero => 0.0,
            Self::QuadraticDiag { weights, center } => weights
                .iter()
                .zip(center)
                .zip(x)
                .filter(|((w, _), _)| **w > 0.0)
                .fold(0.0_f64, |m, ((_, c), v)| m.max((v - c).abs())),
            Self::NormPower { center, .. } | Self::OneNorm { center, .. } => {
                center.iter().zip(x).fold(0.0_f64, |m, (c, v)| m.max((v - c).abs()))
            }
            Self::BoxIndicator { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .fold(0.0_f64, |m, (v, (a, b))| m.max(a - v).max(v - b)),
            Self::Affine { slope, .. } if slope.iter().all(|a| *a == 0.0) => 0.0,
            _ => return None,
        };
        Some(d)
    }

    /// Point around which the function is least regular: the center or the
    /// box midpoint, the origin otherwise.
    pub fn anchor(&self, dim: usize) -> Vec<f64> {
        match self {
            Self::MaxAffine { .. } | Self::Affine { .. } => vec![0.0; dim],
            _ => self.known_minimizer(dim).unwrap_or_else(|| vec![0.0; dim]),
        }
    }

    /// `f(x) = Σ_i f_i(x_i) + const`.
    pub fn is_separable(&self) -> bool {
        !matches!(self, Self::MaxAffine { .. })
    }

    /// `f_i(t)` for separable functions, without the constant offset.
    pub(crate) fn coordinate_value(&self, i: usize, t: f64) -> ExtReal {
        match self {
            Self::Zero => ExtReal::ZERO,
            Self::Affine { slope, .. } => ExtReal::Finite(slope[i] * t),
            Self::QuadraticDiag { weights, center } => {
                ExtReal::Finite(0.5 * weights[i] * (t - center[i]) * (t - center[i]))
            }
            Self::NormPower { q, center, weight, .. } => ExtReal::Finite(weight * (t - center[i]).abs().powf(*q) / q),
            Self::OneNorm { center, weight, .. } => ExtReal::Finite(weight * (t - center[i]).abs()),
            Self::BoxIndicator { lo, hi } => {
                if lo[i] <= t && t <= hi[i] {
                    ExtReal::ZERO
                } else {
                    ExtReal::PosInf
                }
            }
            Self::MaxAffine { .. } => unreachable!("maxaffine is not separable"),
        }
    }

    /// A nondecreasing subgradient selection of `f_i` (`±inf` outside a box).
    pub(crate) fn coordinate_subgradient(&self, i: usize, t: f64) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Affine { slope, .. } => slope[i],
            Self::QuadraticDiag { weights, center } => weights[i] * (t - center[i]),
            Self::NormPower { q, center, weight, .. } => weight * scalar_duality(t - center[i], *q),
            Self::OneNorm { center, weight, .. } => {
                let d = t - center[i];
                if d == 0.0 {
                    0.0
                } else {
                    weight * d.signum()
                }
            }
            Self::BoxIndicator { lo, hi } => {
                if t < lo[i] {
                    f64::NEG_INFINITY
                } else if t > hi[i] {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
            Self::MaxAffine { .. } => unreachable!("maxaffine is not separable"),
        }
    }
}

pub(crate) fn max_affine_value(pieces: &[AffinePiece], x: &[f64]) -> f64 {
    pieces
        .iter()
        .map(|p| dot(&p.slope, x) + p.offset)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Minimal-norm point of the convex hull of `points` (projected gradient on
/// the simplex of convex weights, fixed iteration count).
fn min_norm_in_hull(points: &[&[f64]]) -> Vec<f64> {
    if points.len() == 1 {
        return points[0].to_vec();
    }
    let n = points[0].len();
    let combine = |lambda: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|j| compensated_sum(points.iter().zip(lambda).map(|(a, l)| l * a[j])))
            .collect()
    };
    let lipschitz: f64 = points.iter().map(|a| dot(a, a)).sum::<f64>().max(1e-300);
    let mut lambda = vec![1.0 / points.len() as f64; points.len()];
    for _ in 0..2000 {
        let s = combine(&lambda);
        let step: Vec<f64> = points
            .iter()
            .zip(&lambda)
            .map(|(a, l)| l - dot(a, &s) / lipschitz)
            .collect();
        lambda = project_simplex(&step);
    }
    combine(&lambda)
}

/// A fixed, representative family of catalogue functions on `R^dim`.
pub fn representatives(dim: usize) -> Vec<ConvexFunctionSpec> {
    let pattern = |a: f64, b: f64| -> Vec<f64> { (0..dim).map(|i| a + b * i as f64).collect() };
    let slope_b: Vec<f64> = (0..dim).map(|i| if i % 2 == 0 { -1.0 } else { 0.3 }).collect();
    vec![
        ConvexFunctionSpec::Zero,
        ConvexFunctionSpec::Affine {
            slope: pattern(0.5, -0.25),
            offset: 1.0,
        },
        ConvexFunctionSpec::QuadraticDiag {
            weights: pattern(1.0, 0.5),
            center: pattern(0.5, -0.75),
        },
        ConvexFunctionSpec::NormPower {
            q: 1.5,
            center: pattern(0.3, 0.2),
            weight: 1.0,
            offset: 0.0,
        },
        ConvexFunctionSpec::NormPower {
            q: 3.0,
            center: pattern(-0.2, 0.1),
            weight: 0.5,
            offset: 0.1,
        },
        ConvexFunctionSpec::OneNorm {
            center: pattern(0.5, -0.5),
            weight: 1.0,
            offset: 0.5,
        },
        ConvexFunctionSpec::BoxIndicator {
            lo: pattern(-1.0, 0.25),
            hi: pattern(1.0, 0.5),
        },
        ConvexFunctionSpec::MaxAffine {
            pieces: vec![
                AffinePiece {
                    slope: pattern(1.0, -0.5),
                    offset: 0.0,
                },
                AffinePiece {
                    slope: slope_b,
                    offset: 0.5,
                },
                AffinePiece {
                    slope: pattern(0.2, 0.0),
                    offset: -0.2,
                },
            ],
        },
    ]
}

/// Fenchel–Young equality `f(x) + f*(x*) = <x*, x>` for the selected
/// subgradient `x* ∈ ∂f(x)`.
///
/// Uses the closed-form conjugate when available and a grid oracle
/// (dimensions 1 and 2) otherwise.
pub fn fenchel_equality_check(f: &ConvexFunctionSpec, x: &[f64]) -> Result<CheckReport> {
    f.check_dim(x.len())?;
    let name = format!("fenchel_equality/{}", f.name());
    let Some(fx) = f.evaluate(x).finite() else {
        return Ok(CheckReport::inapplicable(name, "x outside dom f", 0));
    };
    let Some(xs) = f.subgradient_any(x) else {
        return Ok(CheckReport::inapplicable(name, "empty subdifferential", 0));
    };
    let pairing = dot(&xs, x);
    let scale = 1.0 + fx.abs() + pairing.abs();
    let (conj, tolerance, oracle) = match f.conjugate_closed_form(&xs) {
        Some(c) => (c, 1e-8 * scale, 0.0),
        None => {
            let n = x.len();
            if n > 2 {
                return Ok(CheckReport::inapplicable(
                    name,
                    "no closed-form conjugate above dimension 2",
                    0,
                ));
            }
            let reach = 10.0_f64.max(2.0 * crate::numeric::max_abs(x) + 1.0);
            let count = if n == 1 { 4001 } else { 401 };
            let primal = GridSpec::uniform(n, -reach, reach, count)?;
            let value = conjugate_at_point(f, &primal, &xs)?;
            let spacing = 2.0 * reach / (count - 1) as f64;
            let lipschitz = lipschitz_bound(f);
            (
                ExtReal::Finite(value),
                2.0 * lipschitz * spacing * (n as f64).sqrt(),
                1.0,
            )
        }
    };
    let mut report = CheckReport::new(name, tolerance, 0);
    report.metric("grid_oracle", oracle);
    let Some(c) = conj.finite() else {
        return Ok(report.with_metric("gap", f64::INFINITY).conclude(false));
    };
    let gap = (fx + c - pairing).abs();
    Ok(report.with_metric("gap", gap).conclude(gap <= tolerance))
}

/// ℓ1 bound on the slopes of a max-affine function (used for grid tolerances).
fn lipschitz_bound(f: &ConvexFunctionSpec) -> f64 {
    match f {
        ConvexFunctionSpec::MaxAffine { pieces } => pieces
            .iter()
            .map(|p| p.slope.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max),
        _ => 1.0,
    }
}

/// Euclidean norm, used for the minimal-norm tie-break in tests.
pub fn l2_norm(v: &[f64]) -> f64 {
    lp_norm(v, 2.0)
}
