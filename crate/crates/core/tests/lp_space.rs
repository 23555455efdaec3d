use approx::assert_relative_eq;
use pmy::lp_space::{estimate_modulus_of_convexity, estimate_modulus_of_smoothness, hilbert_modulus, SamplingBudget};
use pmy::{dual_exponent, duality_map, duality_map_inverse, lp_norm, phi_p, SpaceConfig};
use proptest::prelude::*;

#[test]
fn norm_of_known_vector() {
    // ||(1, -2)||_3 = 9^(1/3); the literal is 9^(1/3) evaluated independently.
    assert_relative_eq!(lp_norm(&[1.0, -2.0], 3.0), 2.080_083_823_051_904, max_relative = 1e-15);
    assert_eq!(lp_norm(&[0.0, 0.0], 3.0), 0.0);
}

#[test]
fn norm_does_not_overflow_or_underflow() {
    assert_relative_eq!(lp_norm(&[1e200, 1e200], 2.0), 2f64.sqrt() * 1e200, max_relative = 1e-14);
    assert_relative_eq!(
        lp_norm(&[1e-200, 1e-200], 4.0),
        2f64.powf(0.25) * 1e-200,
        max_relative = 1e-14
    );
}

#[test]
fn duality_map_known_vector() {
    let xs = duality_map(&[1.0, -2.0], 3.0);
    assert_eq!(xs, vec![1.0, -4.0]);
    let pairing: f64 = xs.iter().zip([1.0, -2.0]).map(|(a, b)| a * b).sum();
    assert_relative_eq!(pairing, 9.0, max_relative = 1e-15);
    assert_relative_eq!(lp_norm(&xs, 1.5), 9f64.powf(2.0 / 3.0), max_relative = 1e-14);
    let back = duality_map_inverse(&xs, 3.0).unwrap();
    assert_relative_eq!(back[0], 1.0, max_relative = 1e-15);
    assert_relative_eq!(back[1], -2.0, max_relative = 1e-15);
}

#[test]
fn exponent_validation() {
    assert!(dual_exponent(1.0).is_err());
    assert!(dual_exponent(f64::INFINITY).is_err());
    assert!(SpaceConfig::new(0, 2.0).is_err());
    assert_relative_eq!(dual_exponent(3.0).unwrap(), 1.5);
    assert_relative_eq!(dual_exponent(1.5).unwrap(), 3.0);
}

#[test]
fn hilbert_moduli_closed_forms() {
    assert_relative_eq!(
        hilbert_modulus(1.0).unwrap(),
        1.0 - 3f64.sqrt() / 2.0,
        max_relative = 1e-15
    );
    assert!(hilbert_modulus(0.0).is_err());
    assert!(hilbert_modulus(2.5).is_err());
    let l2 = SpaceConfig::new(3, 2.0).unwrap();
    let budget = SamplingBudget::default();
    let est = estimate_modulus_of_convexity(&l2, 1.0, &budget, 3).unwrap();
    assert!((est - 0.133_974_596_215_561_35).abs() <= 1e-3, "{est}");
    let rho = estimate_modulus_of_smoothness(&SpaceConfig::new(2, 2.0).unwrap(), 1.0, &budget, 3).unwrap();
    assert!((rho - (2f64.sqrt() - 1.0)).abs() <= 1e-3, "{rho}");
}

#[test]
fn modulus_estimates_are_seed_deterministic() {
    let space = SpaceConfig::new(2, 3.0).unwrap();
    let budget = SamplingBudget {
        pairs: 300,
        refine_steps: 20,
    };
    let a = estimate_modulus_of_convexity(&space, 0.3, &budget, 11).unwrap();
    let b = estimate_modulus_of_convexity(&space, 0.3, &budget, 11).unwrap();
    assert_eq!(a.to_bits(), b.to_bits());
}

#[test]
fn parallelogram_gap_in_hilbert_space() {
    let (x, y, t) = ([0.3, -1.2, 2.0], [1.0, 0.5, -0.25], 0.3);
    let m: Vec<f64> = x.iter().zip(&y).map(|(a, b)| t * a + (1.0 - t) * b).collect();
    let gap = t * phi_p(&x, 2.0) + (1.0 - t) * phi_p(&y, 2.0) - phi_p(&m, 2.0);
    let d: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
    assert_relative_eq!(
        gap,
        t * (1.0 - t) * lp_norm(&d, 2.0).powi(2) / 2.0,
        max_relative = 1e-13
    );
}

fn vector(max_dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((-1e3..1e3f64).prop_filter("nonzero", |v| v.abs() > 1e-6), 1..=max_dim)
}

proptest! {
    #[test]
    fn duality_map_law(x in vector(20), p in 1.2..5.0f64) {
        let q = dual_exponent(p).unwrap();
        let xs = duality_map(&x, p);
        let norm = lp_norm(&x, p);
        let pairing: f64 = xs.iter().zip(&x).map(|(a, b)| a * b).sum();
        prop_assert!((pairing - norm.powf(p)).abs() <= 1e-9 * norm.powf(p));
        prop_assert!((lp_norm(&xs, q) - norm.powf(p - 1.0)).abs() <= 1e-9 * norm.powf(p - 1.0));
        let back = duality_map_inverse(&xs, p).unwrap();
        for (a, b) in back.iter().zip(&x) {
            prop_assert!((a - b).abs() <= 1e-10 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn duality_map_is_homogeneous(x in vector(6), p in 1.2..5.0f64, t in 0.01..100.0f64) {
        let scaled: Vec<f64> = x.iter().map(|v| t * v).collect();
        for (a, b) in duality_map(&scaled, p).iter().zip(duality_map(&x, p)) {
            prop_assert!((a - t.powf(p - 1.0) * b).abs() <= 1e-12 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn duality_map_is_monotone(x in vector(6), y in vector(6), p in 1.2..5.0f64) {
        let n = x.len().min(y.len());
        let (x, y) = (&x[..n], &y[..n]);
        let dj: Vec<f64> = duality_map(x, p).iter().zip(duality_map(y, p)).map(|(a, b)| a - b).collect();
        let pairing: f64 = dj.iter().zip(x.iter().zip(y)).map(|(d, (a, b))| d * (a - b)).sum();
        let scale = lp_norm(x, p).powf(p) + lp_norm(y, p).powf(p);
        prop_assert!(pairing >= -1e-12 * scale);
    }

    #[test]
    fn phi_is_midpoint_convex(x in vector(5), y in vector(5), p in 1.2..5.0f64) {
        let n = x.len().min(y.len());
        let (x, y) = (&x[..n], &y[..n]);
        let m: Vec<f64> = x.iter().zip(y).map(|(a, b)| 0.5 * (a + b)).collect();
        let avg = 0.5 * (phi_p(x, p) + phi_p(y, p));
        prop_assert!(phi_p(&m, p) <= avg * (1.0 + 1e-12));
    }
}
