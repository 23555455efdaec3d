//! Brute-force Legendre–Fenchel transforms on uniform grids.
//!
//! `f*(s) = max_x <s, x> - f(x)` over the primal grid points, for every point
//! `s` of a dual grid. Grids are restricted to dimensions 1 and 2.

use std::io;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalogue::{ConvexFunctionSpec, ExtReal};
use crate::error::{Error, Result};
use crate::lp_space::dual_exponent;
use crate::numeric::lin_space;
use crate::report::CheckReport;

/// Default upper bound on the number of points of a grid.
pub const DEFAULT_POINT_CAP: usize = 10_000_000;

/// Fraction of each axis, centred, that counts as interior for comparisons.
pub const INTERIOR_FRACTION: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl GridAxis {
    pub fn new(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Grid(format!("axis needs finite lo < hi, got [{lo}, {hi}]")));
        }
        if count < 2 {
            return Err(Error::Grid(format!("axis needs at least 2 points, got {count}")));
        }
        Ok(Self { lo, hi, count })
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.count - 1) as f64
    }

    pub fn values(&self) -> Vec<f64> {
        lin_space(self.lo, self.hi, self.count)
    }

    fn is_interior(&self, k: usize) -> bool {
        let margin = 0.5 * (1.0 - INTERIOR_FRACTION) * (self.count - 1) as f64;
        let k = k as f64;
        k >= margin && k <= (self.count - 1) as f64 - margin
    }
}

/// Tensor-product uniform grid, row-major with the last axis fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    axes: Vec<GridAxis>,
}

impl GridSpec {
    pub fn new(axes: Vec<GridAxis>) -> Result<Self> {
        Self::with_cap(axes, DEFAULT_POINT_CAP)
    }

    pub fn with_cap(axes: Vec<GridAxis>, cap: usize) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::Grid("grid needs at least one axis".into()));
        }
        let total = axes
            .iter()
            .try_fold(1usize, |acc, a| acc.checked_mul(a.count))
            .filter(|t| *t <= cap)
            .ok_or_else(|| Error::Grid(format!("grid exceeds the cap of {cap} points")))?;
        debug_assert!(total >= 2);
        Ok(Self { axes })
    }

    /// The same axis `[lo, hi] x count` in every one of `dim` dimensions.
    pub fn uniform(dim: usize, lo: f64, hi: f64, count: usize) -> Result<Self> {
        let axis = GridAxis::new(lo, hi, count)?;
        Self::new(vec![axis; dim])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[GridAxis] {
        &self.axes
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Multi-index of flat index `i`.
    pub fn multi_index(&self, mut i: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for (d, axis) in self.axes.iter().enumerate().rev() {
            idx[d] = i % axis.count;
            i /= axis.count;
        }
        idx
    }

    fn flat_index(&self, idx: &[usize]) -> usize {
        self.axes.iter().zip(idx).fold(0, |acc, (a, k)| acc * a.count + k)
    }

    /// All grid points, in flat order.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let coords: Vec<Vec<f64>> = self.axes.iter().map(GridAxis::values).collect();
        (0..self.len())
            .map(|i| self.multi_index(i).iter().zip(&coords).map(|(k, c)| c[*k]).collect())
            .collect()
    }

    /// Whether flat index `i` lies in the centred interior 80% of every axis.
    pub fn is_interior(&self, i: usize) -> bool {
        self.multi_index(i)
            .iter()
            .zip(&self.axes)
            .all(|(k, a)| a.is_interior(*k))
    }

    pub fn max_spacing(&self) -> f64 {
        self.axes.iter().map(GridAxis::spacing).fold(0.0, f64::max)
    }
}

/// Grid conjugate values together with where each supremum was attained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjugateTable {
    pub dual_grid: GridSpec,
    /// Supremum over the primal grid points (always finite).
    pub values: Vec<ExtReal>,
    /// Flat primal index of the maximizer (first index wins ties).
    pub argmax: Vec<usize>,
    /// The maximizer sits on the primal grid boundary and the objective is
    /// still increasing outward, so the true conjugate is larger.
    pub boundary_limited: Vec<bool>,
    pub provenance: String,
}

impl ConjugateTable {
    /// Grid value, with boundary-limited entries read as `+inf`.
    ///
    /// This is how finite grids represent conjugates that are infinite, such
    /// as the indicator of `{0}` obtained from `f = 0`.
    pub fn resolved(&self, i: usize) -> ExtReal {
        if self.boundary_limited[i] {
            ExtReal::PosInf
        } else {
            self.values[i]
        }
    }

    pub fn dual_points(&self) -> Vec<Vec<f64>> {
        self.dual_grid.points()
    }

    /// CSV with columns `s_1..s_n,value`, 17 significant digits.
    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = (1..=self.dual_grid.dim()).map(|d| format!("s_{d}")).collect();
        header.push("value".into());
        w.write_record(&header).map_err(io_err)?;
        for (point, v) in self.dual_points().iter().zip(&self.values) {
            let mut row: Vec<String> = point.iter().map(|x| format_f64(*x)).collect();
            row.push(v.to_string_exact());
            w.write_record(&row).map_err(io_err)?;
        }
        w.flush().map_err(|e| Error::Grid(format!("write failed: {e}")))?;
        Ok(())
    }
}

fn io_err(e: csv::Error) -> Error {
    Error::Grid(format!("write failed: {e}"))
}

/// `{:.16e}` formatting: 17 significant digits, '.' decimal separator.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn check_grid_dim(grid: &GridSpec) -> Result<()> {
    if !(1..=2).contains(&grid.dim()) {
        return Err(Error::Grid(format!(
            "grid conjugates support dimensions 1 and 2, got {}",
            grid.dim()
        )));
    }
    Ok(())
}

/// Grid conjugate of `f` sampled on `primal`, evaluated at every dual point.
pub fn conjugate_on_grid(f: &ConvexFunctionSpec, primal: &GridSpec, dual: &GridSpec) -> Result<ConjugateTable> {
    f.check_dim(primal.dim())?;
    let values: Vec<ExtReal> = primal.points().iter().map(|x| f.evaluate(x)).collect();
    let provenance = format!("f = {f}; primal grid {:?}", primal.axes());
    conjugate_of_values(primal, &values, dual, provenance)
}

/// Grid conjugate of arbitrary values sampled on `primal` (`+inf` skipped).
pub fn conjugate_of_values(
    primal: &GridSpec,
    values: &[ExtReal],
    dual: &GridSpec,
    provenance: String,
) -> Result<ConjugateTable> {
    check_grid_dim(primal)?;
    if dual.dim() != primal.dim() {
        return Err(Error::DimensionMismatch {
            expected: primal.dim(),
            found: dual.dim(),
        });
    }
    if values.len() != primal.len() {
        return Err(Error::DimensionMismatch {
            expected: primal.len(),
            found: values.len(),
        });
    }
    let finite: Vec<(usize, Vec<f64>, f64)> = primal
        .points()
        .into_iter()
        .zip(values)
        .enumerate()
        .filter_map(|(i, (x, v))| v.finite().map(|fv| (i, x, fv)))
        .collect();
    if finite.is_empty() {
        return Err(Error::EmptyGridDomain);
    }
    let dual_points = dual.points();
    let results: Vec<(f64, usize, bool)> = dual_points
        .par_iter()
        .map(|s| {
            let (mut best, mut arg) = (f64::NEG_INFINITY, 0usize);
            for (i, x, fx) in &finite {
                let v = pairing(s, x) - fx;
                if v > best {
                    best = v;
                    arg = *i;
                }
            }
            let limited = rising_at_boundary(primal, values, s, arg, best);
            (best, arg, limited)
        })
        .collect();
    Ok(ConjugateTable {
        dual_grid: dual.clone(),
        values: results.iter().map(|r| ExtReal::Finite(r.0)).collect(),
        argmax: results.iter().map(|r| r.1).collect(),
        boundary_limited: results.iter().map(|r| r.2).collect(),
        provenance,
    })
}

fn pairing(s: &[f64], x: &[f64]) -> f64 {
    s.iter().zip(x).map(|(a, b)| a * b).sum()
}

/// Whether the maximizer is on the boundary and its inward neighbour along a
/// boundary axis has a strictly smaller objective.
fn rising_at_boundary(primal: &GridSpec, values: &[ExtReal], s: &[f64], arg: usize, best: f64) -> bool {
    let idx = primal.multi_index(arg);
    let tol = 1e-12 * (1.0 + best.abs());
    for (d, axis) in primal.axes().iter().enumerate() {
        let inward = if idx[d] == 0 {
            1
        } else if idx[d] == axis.count - 1 {
            axis.count - 2
        } else {
            continue;
        };
        let mut neighbour = idx.clone();
        neighbour[d] = inward;
        let j = primal.flat_index(&neighbour);
        let x = primal_point(primal, &neighbour);
        let v = match values[j].finite() {
            Some(fx) => pairing(s, &x) - fx,
            None => f64::NEG_INFINITY,
        };
        if best - v > tol {
            return true;
        }
    }
    false
}

fn primal_point(grid: &GridSpec, idx: &[usize]) -> Vec<f64> {
    grid.axes()
        .iter()
        .zip(idx)
        .map(|(a, k)| {
            if *k + 1 == a.count {
                a.hi
            } else {
                a.lo + a.spacing() * *k as f64
            }
        })
        .collect()
}

/// Grid supremum `max_x <s, x> - f(x)` at a single dual point.
pub fn conjugate_at_point(f: &ConvexFunctionSpec, primal: &GridSpec, s: &[f64]) -> Result<f64> {
    check_grid_dim(primal)?;
    f.check_dim(primal.dim())?;
    primal
        .points()
        .iter()
        .filter_map(|x| f.evaluate(x).finite().map(|fx| pairing(s, x) - fx))
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))))
        .ok_or(Error::EmptyGridDomain)
}

/// The exact conjugate of `eps^-1 phi_p`, namely `eps^(p*-1) phi_{p*}`.
pub fn phi_conjugate_closed_form(p: f64, eps: f64, dim: usize) -> Result<ConvexFunctionSpec> {
    let p_star = dual_exponent(p)?;
    if !(eps.is_finite() && eps > 0.0) {
        return Err(crate::error::domain(format!("eps must be positive, got {eps}")));
    }
    ConvexFunctionSpec::norm_power(p_star, vec![0.0; dim], eps.powf(p_star - 1.0), 0.0)
}

/// Largest violation of discrete midpoint convexity along grid lines.
pub fn max_convexity_violation(table: &ConjugateTable) -> f64 {
    let grid = &table.dual_grid;
    let mut worst = 0.0_f64;
    for i in 0..grid.len() {
        let idx = grid.multi_index(i);
        for (d, axis) in grid.axes().iter().enumerate() {
            if idx[d] == 0 || idx[d] + 1 == axis.count {
                continue;
            }
            let mut lo = idx.clone();
            let mut hi = idx.clone();
            lo[d] -= 1;
            hi[d] += 1;
            let (a, b, c) = (
                table.values[grid.flat_index(&lo)].to_f64(),
                table.values[i].to_f64(),
                table.values[grid.flat_index(&hi)].to_f64(),
            );
            worst = worst.max(b - 0.5 * (a + c));
        }
    }
    worst
}

/// `max |f** - f|` over interior primal points, using two grid transforms.
pub fn biconjugate_check(
    f: &ConvexFunctionSpec,
    primal: &GridSpec,
    dual: &GridSpec,
    tolerance: f64,
) -> Result<CheckReport> {
    let table = conjugate_on_grid(f, primal, dual)?;
    let back = conjugate_of_values(dual, &table.values, primal, "biconjugate".into())?;
    let points = primal.points();
    let mut worst = 0.0_f64;
    let mut compared = 0usize;
    for (i, x) in points.iter().enumerate() {
        if !primal.is_interior(i) {
            continue;
        }
        if let Some(fx) = f.evaluate(x).finite() {
            worst = worst.max((back.values[i].to_f64() - fx).abs());
            compared += 1;
        }
    }
    let report = CheckReport::new(format!("biconjugate/{}", f.name()), tolerance, 0)
        .with_metric("max_deviation", worst)
        .with_metric("compared_points", compared as f64);
    Ok(report.conclude(compared > 0 && worst <= tolerance))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(lo: f64, hi: f64, n: usize) -> GridSpec {
        GridSpec::uniform(1, lo, hi, n).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(GridAxis::new(1.0, 1.0, 3).is_err());
        assert!(GridAxis::new(0.0, 1.0, 1).is_err());
        assert!(GridSpec::with_cap(vec![GridAxis::new(0.0, 1.0, 100).unwrap(); 2], 1000).is_err());
        let g = GridSpec::uniform(2, -1.0, 1.0, 3).unwrap();
        assert_eq!(g.len(), 9);
        assert_eq!(g.points()[5], vec![0.0, 1.0]);
        assert_eq!(g.multi_index(5), vec![1, 2]);
    }

    #[test]
    fn phi2_conjugate_at_one() {
        let f = ConvexFunctionSpec::phi(2.0, 1).unwrap();
        let v = conjugate_at_point(&f, &line(-10.0, 10.0, 2001), &[1.0]).unwrap();
        assert!((v - 0.5).abs() <= 5e-3);
    }

    #[test]
    fn phi3_conjugate_at_one() {
        let f = ConvexFunctionSpec::phi(3.0, 1).unwrap();
        let v = conjugate_at_point(&f, &line(-10.0, 10.0, 2001), &[1.0]).unwrap();
        assert!((v - 2.0 / 3.0).abs() <= 5e-3, "{v}");
    }

    #[test]
    fn zero_conjugate_hits_grid_boundary() {
        let primal = line(-10.0, 10.0, 2001);
        let dual = line(-1.0, 1.0, 5);
        let t = conjugate_on_grid(&ConvexFunctionSpec::Zero, &primal, &dual).unwrap();
        assert_eq!(t.values[4], ExtReal::Finite(10.0));
        assert_eq!(t.resolved(4), ExtReal::PosInf);
        assert_eq!(t.resolved(2), ExtReal::ZERO);
        assert_eq!(t.resolved(0), ExtReal::PosInf);
    }

    #[test]
    fn onenorm_slope_one_is_finite() {
        let f = ConvexFunctionSpec::one_norm(vec![0.0], 1.0, 0.0).unwrap();
        let t = conjugate_on_grid(&f, &line(-10.0, 10.0, 2001), &line(-1.0, 1.0, 3)).unwrap();
        assert_eq!(t.resolved(2), ExtReal::ZERO);
        assert_eq!(t.resolved(0), ExtReal::ZERO);
    }

    #[test]
    fn empty_domain_is_an_error() {
        let f = ConvexFunctionSpec::box_indicator(vec![20.0], vec![21.0]).unwrap();
        let err = conjugate_on_grid(&f, &line(-10.0, 10.0, 11), &line(-1.0, 1.0, 3)).unwrap_err();
        assert!(matches!(err, Error::EmptyGridDomain));
    }

    #[test]
    fn rejects_three_dimensional_grids() {
        let g = GridSpec::uniform(3, -1.0, 1.0, 3).unwrap();
        assert!(conjugate_on_grid(&ConvexFunctionSpec::Zero, &g, &g).is_err());
    }

    #[test]
    fn phi_closed_form_examples() {
        assert_eq!(
            phi_conjugate_closed_form(2.0, 1.0, 1).unwrap(),
            ConvexFunctionSpec::phi(2.0, 1).unwrap()
        );
        let half = phi_conjugate_closed_form(2.0, 0.5, 1).unwrap();
        assert!((half.evaluate(&[1.0]).to_f64() - 0.25).abs() < 1e-15);
        // Cross-check against the grid conjugate of 2 phi_2.
        let two_phi = ConvexFunctionSpec::quadratic(vec![2.0], vec![0.0]).unwrap();
        let v = conjugate_at_point(&two_phi, &line(-10.0, 10.0, 2001), &[1.0]).unwrap();
        assert!((v - 0.25).abs() <= 5e-3);
        let p3 = phi_conjugate_closed_form(3.0, 1.0, 1).unwrap();
        let ConvexFunctionSpec::NormPower { q, weight, .. } = p3 else {
            panic!()
        };
        assert!((q - 1.5).abs() < 1e-15 && weight == 1.0);
    }

    #[test]
    fn biconjugate_examples() {
        let primal = line(-10.0, 10.0, 2001);
        let dual = line(-10.0, 10.0, 2001);
        let r = biconjugate_check(&ConvexFunctionSpec::phi(2.0, 1).unwrap(), &primal, &dual, 5e-3).unwrap();
        assert!(r.passed, "{r:?}");
        let onenorm = ConvexFunctionSpec::one_norm(vec![0.0], 1.0, 0.0).unwrap();
        let r = biconjugate_check(&onenorm, &line(-5.0, 5.0, 2001), &line(-2.0, 2.0, 2001), 5e-3).unwrap();
        assert!(r.passed, "{r:?}");
        let affine = ConvexFunctionSpec::affine(vec![0.5], 1.0).unwrap();
        let r = biconjugate_check(&affine, &primal, &dual, 1e-12).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn conjugate_is_discretely_convex() {
        for f in crate::catalogue::representatives(1) {
            let t = conjugate_on_grid(&f, &line(-10.0, 10.0, 401), &line(-3.0, 3.0, 301)).unwrap();
            let slack = 2.0 * 10.0 * t.dual_grid.max_spacing();
            assert!(max_convexity_violation(&t) <= slack, "{f}");
        }
    }

    #[test]
    fn csv_layout() {
        let f = ConvexFunctionSpec::phi(2.0, 1).unwrap();
        let t = conjugate_on_grid(&f, &line(-2.0, 2.0, 5), &line(-1.0, 1.0, 3)).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "s_1,value");
        assert_eq!(lines.len(), 4);
        assert!(lines[2].starts_with("0.0000000000000000e0,"));
    }
}
