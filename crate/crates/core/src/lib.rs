//! p-power Moreau–Yosida regularization on finite-dimensional `l^p` spaces.
//!
//! * [`lp_space`]: exponents, norms, duality maps and modulus estimators.
//! * [`catalogue`]: closed catalogue of convex test functions.
//! * [`legendre`]: grid conjugates and closed-form conjugates of `phi_p`.
//! * [`envelope`]: envelopes, proximal maps and the proximal-point method.
//! * [`lab`]: empirical checks and the suite runner.

pub mod catalogue;
pub mod envelope;
pub mod error;
pub mod lab;
pub mod legendre;
pub mod lp_space;
pub mod numeric;
pub mod report;

pub use catalogue::{parse_function_spec, parse_vector, AffinePiece, ConvexFunctionSpec, ExtReal};
pub use envelope::{
    envelope, envelope_gradient, prox, prox_distance_bound_check, proximal_point_run, EnvelopeConfig, ProxMethod,
    ProxResult, SolverPreference, Trajectory,
};
pub use error::{Error, Result};
pub use lab::{run_suite, PowerFit, SuiteConfig};
pub use legendre::{conjugate_on_grid, phi_conjugate_closed_form, ConjugateTable, GridAxis, GridSpec};
pub use lp_space::{
    dual_exponent, duality_map, duality_map_inverse, lp_norm, phi_p, DualVector, ExponentPair, LpVector, Side,
    SpaceConfig,
};
pub use report::{render_table, CheckReport, CheckStatus};
