//! Geometry of the finite-dimensional sequence space `l_p^n`.
//!
//! Norms, the power function `phi_p = ||.||^p / p`, the generalized duality
//! map `J_p` and its inverse, and Monte-Carlo estimators for the moduli of
//! convexity and smoothness.

mod moduli;

pub use moduli::{estimate_modulus_of_convexity, estimate_modulus_of_smoothness, hilbert_modulus, SamplingBudget};

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::numeric::compensated_sum;

/// Returns the Hölder conjugate `p / (p - 1)`.
pub fn dual_exponent(p: f64) -> Result<f64> {
    if !p.is_finite() || p <= 1.0 {
        return Err(domain(format!("exponent must be finite and > 1, got {p}")));
    }
    Ok(p / (p - 1.0))
}

/// A Hölder-conjugate pair `(p, p*)` with `1/p + 1/p* = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentPair {
    p: f64,
    p_star: f64,
}

impl ExponentPair {
    pub fn new(p: f64) -> Result<Self> {
        Ok(Self {
            p,
            p_star: dual_exponent(p)?,
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn p_star(&self) -> f64 {
        self.p_star
    }

    /// The pair seen from the dual space.
    pub fn dual(&self) -> Self {
        Self {
            p: self.p_star,
            p_star: self.p,
        }
    }
}

/// The space `l_p^n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceConfig {
    dim: usize,
    exponents: ExponentPair,
}

impl SpaceConfig {
    pub fn new(dim: usize, p: f64) -> Result<Self> {
        if dim == 0 {
            return Err(domain("dimension must be at least 1"));
        }
        Ok(Self {
            dim,
            exponents: ExponentPair::new(p)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn p(&self) -> f64 {
        self.exponents.p()
    }

    pub fn exponents(&self) -> ExponentPair {
        self.exponents
    }

    /// `l_{p*}^n`, identified with the dual space.
    pub fn dual(&self) -> Self {
        Self {
            dim: self.dim,
            exponents: self.exponents.dual(),
        }
    }

    pub fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(())
    }
}

/// Which side of the duality pairing a coordinate vector lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Primal,
    Dual,
}

/// Finite coordinate vector tagged as primal (`x in X`) or dual (`x* in X*`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpVector {
    coords: Vec<f64>,
    side: Side,
}

/// Alias used where a vector is known to be a dual element.
pub type DualVector = LpVector;

impl LpVector {
    pub fn new(coords: Vec<f64>, side: Side) -> Result<Self> {
        if let Some(bad) = coords.iter().find(|v| !v.is_finite()) {
            return Err(domain(format!("non-finite coordinate {bad}")));
        }
        Ok(Self { coords, side })
    }

    pub fn primal(coords: Vec<f64>) -> Result<Self> {
        Self::new(coords, Side::Primal)
    }

    pub fn dual(coords: Vec<f64>) -> Result<Self> {
        Self::new(coords, Side::Dual)
    }

    /// Wraps coordinates produced by this crate's own maps.
    pub(crate) fn from_computed(coords: Vec<f64>, side: Side) -> Self {
        debug_assert!(coords.iter().all(|v| v.is_finite()));
        Self { coords, side }
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }
}

impl Deref for LpVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.coords
    }
}

/// `sum_i |x_i|^p`, accumulated with compensation.
pub fn power_sum(x: &[f64], p: f64) -> f64 {
    compensated_sum(x.iter().map(|v| v.abs().powf(p)))
}

/// `(sum_i |x_i|^p)^(1/p)`, scaled by the largest entry to avoid overflow.
pub fn lp_norm(x: &[f64], p: f64) -> f64 {
    let m = crate::numeric::max_abs(x);
    if m == 0.0 {
        return 0.0;
    }
    let s = compensated_sum(x.iter().map(|v| (v.abs() / m).powf(p)));
    m * s.powf(1.0 / p)
}

/// `phi_p(x) = ||x||_p^p / p`.
pub fn phi_p(x: &[f64], p: f64) -> f64 {
    power_sum(x, p) / p
}

/// Generalized duality map `J_p(x)_i = sign(x_i) |x_i|^(p-1)`.
///
/// Written with `sign` rather than `|x_i|^(p-2) x_i` so that zero
/// coordinates map to zero for `p < 2`.
pub fn duality_map(x: &[f64], p: f64) -> Vec<f64> {
    x.iter().map(|&v| scalar_duality(v, p)).collect()
}

#[inline]
pub(crate) fn scalar_duality(v: f64, p: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v.signum() * v.abs().powf(p - 1.0)
    }
}

/// `J_p^{-1} = J_{p*}`, mapping a dual vector back to the primal space.
pub fn duality_map_inverse(xstar: &[f64], p: f64) -> Result<Vec<f64>> {
    let p_star = dual_exponent(p)?;
    Ok(duality_map(xstar, p_star))
}

/// Typed variant of [`duality_map`].
pub fn duality_map_vec(x: &LpVector, p: f64) -> LpVector {
    LpVector::from_computed(duality_map(x, p), Side::Dual)
}

/// Typed variant of [`duality_map_inverse`].
pub fn duality_map_inverse_vec(xstar: &LpVector, p: f64) -> Result<LpVector> {
    Ok(LpVector::from_computed(duality_map_inverse(xstar, p)?, Side::Primal))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn dual_exponent_examples() {
        assert_eq!(dual_exponent(2.0).unwrap(), 2.0);
        assert_eq!(dual_exponent(3.0).unwrap(), 1.5);
        assert_eq!(dual_exponent(1.5).unwrap(), 3.0);
        assert!(dual_exponent(1.0).is_err());
        assert!(dual_exponent(0.5).is_err());
        assert!(dual_exponent(f64::INFINITY).is_err());
        assert!(dual_exponent(f64::NAN).is_err());
    }

    #[test]
    fn exponent_pair_invariant() {
        for p in [1.01, 1.5, 2.0, 3.0, 7.5, 100.0] {
            let e = ExponentPair::new(p).unwrap();
            let s = 1.0 / e.p() + 1.0 / e.p_star();
            assert!((s - 1.0).abs() <= 1e-12);
            assert_eq!(e.dual().dual(), e);
        }
    }

    #[test]
    fn norm_examples() {
        assert_eq!(lp_norm(&[3.0, 4.0], 2.0), 5.0);
        assert_eq!(lp_norm(&[0.0, 0.0, 0.0], 1.7), 0.0);
        // 9^(1/3)
        assert_relative_eq!(lp_norm(&[1.0, -2.0], 3.0), 2.080_083_823_051_904, epsilon = 1e-14);
    }

    #[test]
    fn norm_avoids_overflow() {
        let x = [1e200, 1e200];
        assert_relative_eq!(lp_norm(&x, 4.0), 1e200 * 2f64.powf(0.25), max_relative = 1e-14);
    }

    #[test]
    fn phi_examples() {
        assert_relative_eq!(phi_p(&[3.0, 4.0], 2.0), 12.5, epsilon = 1e-14);
        assert_eq!(phi_p(&[0.0], 2.5), 0.0);
        assert_relative_eq!(phi_p(&[1.0, -2.0], 3.0), 3.0, epsilon = 1e-14);
    }

    #[test]
    fn duality_map_examples() {
        assert_eq!(duality_map(&[0.0, 0.0], 1.5), vec![0.0, 0.0]);
        let x = [1.0, -2.0];
        let j = duality_map(&x, 3.0);
        assert_eq!(j, vec![1.0, -4.0]);
        assert_relative_eq!(crate::numeric::dot(&j, &x), 9.0);
        assert_relative_eq!(lp_norm(&j, 1.5), 9f64.powf(2.0 / 3.0), max_relative = 1e-14);
        let y = [0.3, -1.7, 2.2];
        assert_eq!(duality_map(&y, 2.0), y.to_vec());
    }

    #[test]
    fn inverse_examples() {
        let back = duality_map_inverse(&[1.0, -4.0], 3.0).unwrap();
        assert_relative_eq!(back[0], 1.0);
        assert_relative_eq!(back[1], -2.0, max_relative = 1e-15);
        assert_eq!(duality_map_inverse(&[0.0, 0.0], 1.5).unwrap(), vec![0.0, 0.0]);
        assert_eq!(duality_map_inverse(&[0.5, -3.0], 2.0).unwrap(), vec![0.5, -3.0]);
    }

    #[test]
    fn typed_vectors_reject_non_finite() {
        assert!(LpVector::primal(vec![1.0, f64::NAN]).is_err());
        let x = LpVector::primal(vec![1.0, -2.0]).unwrap();
        let j = duality_map_vec(&x, 3.0);
        assert_eq!(j.side(), Side::Dual);
        let back = duality_map_inverse_vec(&j, 3.0).unwrap();
        assert_eq!(back.side(), Side::Primal);
    }

    #[test]
    fn space_config_checks_dim() {
        assert!(SpaceConfig::new(0, 2.0).is_err());
        let s = SpaceConfig::new(3, 4.0).unwrap();
        assert!(s.check_len(&[1.0, 2.0]).is_err());
        assert_eq!(s.dual().p(), 4.0 / 3.0);
    }
}
