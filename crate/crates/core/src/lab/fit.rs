//! Least-squares power laws `y ≈ C x^k` fitted on log scales.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub exponent: f64,
    /// `ln C`.
    pub log_constant: f64,
    /// Largest absolute residual on the log scale.
    pub max_residual: f64,
    pub sample_count: usize,
}

impl PowerFit {
    /// Fits `ln y = k ln x + ln C` over the pairs with `x, y > 0`.
    ///
    /// Returns `None` with fewer than two usable pairs or when all `x` agree.
    pub fn fit(pairs: &[(f64, f64)]) -> Option<Self> {
        let logs: Vec<(f64, f64)> = pairs
            .iter()
            .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
            .map(|(x, y)| (x.ln(), y.ln()))
            .collect();
        let n = logs.len();
        if n < 2 {
            return None;
        }
        let mx = logs.iter().map(|l| l.0).sum::<f64>() / n as f64;
        let my = logs.iter().map(|l| l.1).sum::<f64>() / n as f64;
        let sxx: f64 = logs.iter().map(|(a, _)| (a - mx) * (a - mx)).sum();
        if sxx <= 0.0 {
            return None;
        }
        let sxy: f64 = logs.iter().map(|(a, b)| (a - mx) * (b - my)).sum();
        let exponent = sxy / sxx;
        let log_constant = my - exponent * mx;
        let max_residual = logs
            .iter()
            .map(|(a, b)| (b - log_constant - exponent * a).abs())
            .fold(0.0, f64::max);
        Some(Self {
            exponent,
            log_constant,
            max_residual,
            sample_count: n,
        })
    }

    pub fn constant(&self) -> f64 {
        self.log_constant.exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let pairs: Vec<(f64, f64)> = (1..20).map(|i| (i as f64, 3.0 * (i as f64).powf(1.7))).collect();
        let fit = PowerFit::fit(&pairs).unwrap();
        assert!((fit.exponent - 1.7).abs() < 1e-12);
        assert!((fit.constant() - 3.0).abs() < 1e-10);
        assert!(fit.max_residual < 1e-12);
        assert_eq!(fit.sample_count, 19);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(PowerFit::fit(&[(1.0, 1.0)]).is_none());
        assert!(PowerFit::fit(&[(2.0, 1.0), (2.0, 3.0)]).is_none());
        assert!(PowerFit::fit(&[(0.0, 1.0), (1.0, 0.0)]).is_none());
    }
}
