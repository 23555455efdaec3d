use approx::assert_relative_eq;
use pmy::catalogue::representatives;
use pmy::{
    parse_function_spec, parse_vector, prox, ConvexFunctionSpec, EnvelopeConfig, Error, ExtReal, SolverPreference,
};
use proptest::prelude::*;

#[test]
fn shifted_one_norm_value() {
    let f = parse_function_spec("onenorm:center=[4.5],weight=1,offset=0.5", 1).unwrap();
    assert_eq!(f.evaluate(&[3.5]), ExtReal::Finite(1.5));
    assert_eq!(f.infimum(), Some(0.5));
    assert_eq!(f.known_minimizer(1), Some(vec![4.5]));
}

#[test]
fn box_indicator_values() {
    let f = parse_function_spec("box:lo=[-1 0],hi=[1 2]", 2).unwrap();
    assert_eq!(f.evaluate(&[0.5, 1.0]), ExtReal::Finite(0.0));
    assert_eq!(f.evaluate(&[1.5, 1.0]), ExtReal::PosInf);
    assert!(f.subgradient_any(&[1.5, 1.0]).is_none());
    assert!(f.in_domain(&[1.0, 2.0]));
}

#[test]
fn parse_errors_name_the_problem() {
    let err = parse_function_spec("onenorm:centre=[0]", 1).unwrap_err();
    assert!(matches!(err, Error::Parse(_)));
    assert!(err.to_string().contains("centre"));
    let err = parse_function_spec("banana:center=[0]", 1).unwrap_err();
    assert!(err.to_string().contains("banana"));
    assert!(parse_function_spec("onenorm:center=[0 1 2]", 2).is_err());
    assert!(parse_function_spec("box:lo=[1],hi=[0]", 1).is_err());
    assert!(parse_function_spec("quadratic:weights=[-1]", 1).is_err());
}

#[test]
fn vectors_broadcast_and_validate() {
    assert_eq!(parse_vector("[1 -2]", 2).unwrap(), vec![1.0, -2.0]);
    assert_eq!(parse_vector("3", 3).unwrap(), vec![3.0; 3]);
    assert!(parse_vector("[1 2 3]", 2).is_err());
    assert!(parse_vector("[1 nan]", 2).is_err());
}

#[test]
fn display_round_trips_for_representatives() {
    for dim in [1, 3] {
        for f in representatives(dim) {
            let text = f.to_string();
            assert_eq!(parse_function_spec(&text, dim).unwrap(), f, "{text}");
        }
    }
}

#[test]
fn json_round_trips() {
    for f in representatives(2) {
        let json = serde_json::to_string(&f).unwrap();
        let back: ConvexFunctionSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f);
    }
}

/// Brute-force prox by dense grid minimization in one dimension.
fn grid_prox(f: &ConvexFunctionSpec, x: f64, p: f64, eps: f64) -> (f64, f64) {
    let n = 1_000_000;
    let (lo, hi) = (-10.0, 10.0);
    let mut best = (f64::INFINITY, x);
    for i in 0..=n {
        let y = lo + (hi - lo) * i as f64 / n as f64;
        if let Some(fy) = f.evaluate(&[y]).finite() {
            let v = fy + (x - y).abs().powf(p) / (p * eps);
            if v < best.0 {
                best = (v, y);
            }
        }
    }
    (best.1, best.0)
}

#[test]
fn soft_threshold_matches_grid_minimization() {
    let f = ConvexFunctionSpec::one_norm(vec![0.0], 1.0, 0.0).unwrap();
    let y = f.exact_prox_if_available(&[2.0], 2.0, 1.0).unwrap();
    assert_eq!(y, vec![1.0]);
    let (gy, _) = grid_prox(&f, 2.0, 2.0, 1.0);
    assert!((gy - 1.0).abs() <= 2e-5);
}

#[test]
fn closed_form_proxes_match_grid_minimization() {
    let cases = [
        (ConvexFunctionSpec::affine(vec![0.7], -1.0).unwrap(), 1.5),
        (ConvexFunctionSpec::affine(vec![-1.3], 0.0).unwrap(), 3.0),
        (ConvexFunctionSpec::box_indicator(vec![-1.0], vec![2.0]).unwrap(), 4.0),
        (ConvexFunctionSpec::quadratic(vec![2.0], vec![0.5]).unwrap(), 2.0),
        (ConvexFunctionSpec::one_norm(vec![0.5], 2.0, 0.0).unwrap(), 2.0),
    ];
    for (f, p) in &cases {
        for x in [-3.0, 0.2, 2.5] {
            let Some(y) = f.exact_prox_if_available(&[x], *p, 0.7) else {
                continue;
            };
            let (gy, gv) = grid_prox(f, x, *p, 0.7);
            let v = f.evaluate(&y).to_f64() + (x - y[0]).abs().powf(*p) / (p * 0.7);
            assert!(v <= gv + 1e-9, "{f} x={x}: closed {v} grid {gv}");
            assert!((y[0] - gy).abs() <= 1e-3, "{f} x={x}: {} vs {gy}", y[0]);
        }
    }
}

#[test]
fn conjugate_closed_forms_satisfy_fenchel_equality() {
    // f = |x|, x = 2: the subgradient is 1, f*(1) = 0 and 2 + 0 = 2 * 1.
    let f = ConvexFunctionSpec::one_norm(vec![0.0], 1.0, 0.0).unwrap();
    let s = f.subgradient_any(&[2.0]).unwrap();
    assert_eq!(s, vec![1.0]);
    assert_eq!(f.conjugate_closed_form(&s), Some(ExtReal::Finite(0.0)));
    assert_eq!(f.conjugate_closed_form(&[1.5]), Some(ExtReal::PosInf));
}

fn point(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-4.0..4.0f64, dim)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn subgradient_inequality(x in point(2), y in point(2)) {
        for f in representatives(2) {
            let (Some(fx), Some(fy)) = (f.evaluate(&x).finite(), f.evaluate(&y).finite()) else { continue };
            let g = f.subgradient_any(&x).unwrap();
            let lin: f64 = g.iter().zip(x.iter().zip(&y)).map(|(gi, (a, b))| gi * (b - a)).sum();
            prop_assert!(fy >= fx + lin - 1e-9 * (1.0 + fx.abs() + fy.abs()), "{f}");
        }
    }

    #[test]
    fn fenchel_young_inequality(x in point(2), s in point(2)) {
        for f in representatives(2) {
            let Some(ExtReal::Finite(cs)) = f.conjugate_closed_form(&s) else { continue };
            let ExtReal::Finite(fx) = f.evaluate(&x) else { continue };
            let pairing: f64 = x.iter().zip(&s).map(|(a, b)| a * b).sum();
            prop_assert!(fx + cs >= pairing - 1e-9 * (1.0 + fx.abs() + cs.abs()), "{f}");
        }
    }

    #[test]
    fn numerical_prox_matches_closed_forms(x in point(2), p in prop::sample::select(vec![1.5, 2.0, 3.0]), eps in 0.2..3.0f64) {
        let auto = EnvelopeConfig::new(p, eps).unwrap();
        let numeric = auto.with_solver(SolverPreference::Numerical);
        for f in representatives(2) {
            if f.exact_prox_if_available(&x, p, eps).is_none() || !f.is_separable() {
                continue;
            }
            let a = prox(&f, &x, &auto).unwrap();
            let b = prox(&f, &x, &numeric).unwrap();
            prop_assert!((a.envelope_value - b.envelope_value).abs() <= 1e-9 * (1.0 + a.envelope_value.abs()), "{f}");
            for (u, v) in a.prox_point.coords().iter().zip(b.prox_point.coords()) {
                prop_assert!((u - v).abs() <= 1e-6 * (1.0 + u.abs()), "{f}: {u} vs {v}");
            }
        }
    }
}

#[test]
fn separable_and_anchor_metadata() {
    let reps = representatives(2);
    assert_eq!(reps.len(), 8);
    assert!(reps
        .iter()
        .filter(|f| !f.is_separable())
        .all(|f| f.name() == "maxaffine"));
    for f in &reps {
        assert_eq!(f.anchor(2).len(), 2);
        assert_relative_eq!(f.distance_to_argmin(&f.anchor(2)).unwrap_or(0.0), 0.0, epsilon = 1e-12);
    }
}
