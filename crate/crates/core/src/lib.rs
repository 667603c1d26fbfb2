//! Gaussian noise sensitivity and Gaussian surface area of polynomial
//! threshold functions: closed-form bounds, exact sign-change counting along
//! great circles, and reproducible Monte Carlo estimators.

pub mod bounds;
pub mod circle;
pub mod error;
pub mod estimators;
pub mod families;
pub mod poly;
pub mod sampling;

pub use bounds::{
    chi2_log_density, gns_bound, gns_bound_asymptotic, radial_bound, surface_bound, wiggle_bound,
    BoundName, BoundReport,
};
pub use circle::{
    circle_polynomial, count_sign_changes, eval_along_circle, CirclePolynomial, RootConfig,
    SignChangeReport,
};
pub use error::{Error, Result};
pub use estimators::{
    estimate_expected_sign_changes, estimate_gns, estimate_radial, estimate_rotation_disagreement,
    estimate_surface_collar, estimate_surface_crossing, estimate_wiggle, EstimateResult, McConfig,
    SignChangeSummary, SurfaceEstimate,
};
pub use families::FamilySpec;
pub use poly::{product_expand, Monomial, Polynomial, Ptf};
pub use sampling::{CorrelationSpec, GaussianStream, SeededStream};
