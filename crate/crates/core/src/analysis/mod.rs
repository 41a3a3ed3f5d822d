//! Convergence constants and the estimators that confront them with runs.

mod constants;
mod estimate;
mod geometry;

pub use constants::{
    feasibility_profile, kappa_from_theta, neighborhood_radius, parse_report, predicted_rate,
    reflector_profile, reflector_profile_inverse, subtransversality_constant, tlambda_profile,
    AveragedProfile, ConstantsInput, ConstantsReport, Rate,
};
pub use estimate::{
    averagedness_slack, estimate_kappa, estimate_rate, fit_geometric_rate, KappaEstimate,
    RateEstimate, RateQuantity, Region, DEFAULT_TAIL_FRACTION, KAPPA_MIN_DISTANCE, RATE_FLOOR,
};
pub use geometry::{
    estimate_gap_vector, fixed_point_set_affine, fixed_point_set_inconsistent, friedrichs_cosine,
    friedrichs_cosine_flats, hull_directions, GapVector, GAP_MAX_ITER, GAP_TOL,
};
