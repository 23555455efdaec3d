//! Fixtures shared by the benchmarks.

use pmy::{ConvexFunctionSpec, EnvelopeConfig, SolverPreference};

/// `(label, function, config)` triples covering each prox solver path.
pub fn prox_cases() -> Vec<(&'static str, ConvexFunctionSpec, EnvelopeConfig)> {
    let onenorm = ConvexFunctionSpec::one_norm(vec![0.5, -0.5], 1.0, 0.0).expect("valid");
    let maxaffine = pmy::catalogue::representatives(2).pop().expect("non-empty");
    let p2 = EnvelopeConfig::new(2.0, 1.0).expect("valid");
    let p15 = EnvelopeConfig::new(1.5, 1.0).expect("valid");
    vec![
        ("closed-form/onenorm/p=2", onenorm.clone(), p2),
        (
            "golden-section/onenorm/p=2",
            onenorm.clone(),
            p2.with_solver(SolverPreference::Numerical),
        ),
        ("golden-section/onenorm/p=1.5", onenorm, p15),
        ("descent/maxaffine/p=2", maxaffine.clone(), p2),
        ("descent/maxaffine/p=1.5", maxaffine, p15),
    ]
}
