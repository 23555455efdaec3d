//! Small numerical building blocks shared by the solvers and estimators.

/// Compensated (Neumaier) summation.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Compensated dot product `sum_i a_i b_i`.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    compensated_sum(a.iter().zip(b).map(|(x, y)| x * y))
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Outcome of a bracketed one-dimensional minimization.
#[derive(Debug, Clone, Copy)]
pub struct LineMin {
    pub x: f64,
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
    pub iterations: usize,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a unimodal `f` on `[lo, hi]`.
///
/// Stops once the bracket is narrower than `width_tol` or after `max_iter`
/// iterations. Ties move the bracket to the left.
pub fn golden_section<F: FnMut(f64) -> f64>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    width_tol: f64,
    max_iter: usize,
) -> LineMin {
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;
    while hi - lo > width_tol && iterations < max_iter {
        iterations += 1;
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
    }
    let (x, value) = if fc <= fd { (c, fc) } else { (d, fd) };
    LineMin {
        x,
        value,
        lo,
        hi,
        iterations,
    }
}

/// Bisection on the sign of a nondecreasing function `g` over `[lo, hi]`,
/// returning the location of the sign change. Runs until the floating-point
/// interval cannot be split further or `max_iter` is reached.
pub fn bisect_sign<G: FnMut(f64) -> f64>(mut g: G, mut lo: f64, mut hi: f64, max_iter: usize) -> (f64, usize) {
    let mut iterations = 0;
    while iterations < max_iter {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        let v = g(mid);
        if v > 0.0 {
            hi = mid;
        } else if v < 0.0 {
            lo = mid;
        } else {
            return (mid, iterations);
        }
    }
    (0.5 * (lo + hi), iterations)
}

/// Euclidean projection onto the probability simplex.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u: Vec<f64> = v.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cumsum += uj;
        let t = (cumsum - 1.0) / (j as f64 + 1.0);
        if uj - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

/// `count` points spaced evenly in log scale between `lo` and `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// `count` points spaced evenly between `lo` and `hi` inclusive.
pub fn lin_space(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let span = hi - lo;
    let last = (count - 1) as f64;
    (0..count)
        .map(|i| {
            if i + 1 == count {
                hi
            } else {
                lo + span * i as f64 / last
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_cancelled_terms() {
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(v), 2.0);
    }

    #[test]
    fn golden_section_finds_parabola_vertex() {
        let m = golden_section(|x| (x - 0.3) * (x - 0.3), -1.0, 2.0, 1e-9, 500);
        assert!((m.x - 0.3).abs() < 1e-8);
        assert!(m.lo <= 0.3 && 0.3 <= m.hi);
    }

    #[test]
    fn bisection_hits_kink() {
        let (x, _) = bisect_sign(|t| if t > 0.25 { 1.0 } else { -1.0 }, -3.0, 3.0, 200);
        assert!((x - 0.25).abs() < 1e-15);
    }

    #[test]
    fn simplex_projection() {
        let p = project_simplex(&[0.5, 0.5, 0.5]);
        for v in &p {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
        assert_eq!(project_simplex(&[3.0, 0.0]), vec![1.0, 0.0]);
    }

    #[test]
    fn spacing_endpoints_exact() {
        let l = log_space(1e-3, 1.0, 10);
        assert_eq!(l.len(), 10);
        assert!((l[0] - 1e-3).abs() < 1e-18 && (l[9] - 1.0).abs() < 1e-15);
        assert_eq!(*lin_space(-3.0, 3.0, 601).last().unwrap(), 3.0);
    }
}
