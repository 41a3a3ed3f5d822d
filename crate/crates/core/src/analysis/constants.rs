//! Closed-form convergence constants.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::Real;

/// Violation `eps` and averaging constant `alpha` of an almost averaged map:
///
/// ```text
/// |Tx - Ty|^2 <= (1 + eps)|x - y|^2 - (1 - alpha)/alpha |(x - Tx) - (y - Ty)|^2
/// ```
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AveragedProfile<R> {
    pub eps: R,
    pub alpha: R,
}

impl<R: Real> AveragedProfile<R> {
    pub fn new(eps: R, alpha: R) -> Result<Self> {
        if !(eps >= R::zero()) || !eps.is_finite() {
            return Err(Error::OutOfDomain(format!(
                "violation must be finite and >= 0, got {eps}"
            )));
        }
        if !(alpha > R::zero() && alpha <= R::one()) {
            return Err(Error::OutOfDomain(format!(
                "averaging constant must lie in (0, 1], got {alpha}"
            )));
        }
        Ok(Self { eps, alpha })
    }
}

fn check_lambda<R: Real>(lambda: R) -> Result<()> {
    if lambda >= R::zero() && lambda <= R::one() {
        Ok(())
    } else {
        Err(Error::OutOfDomain(format!(
            "lambda must lie in [0, 1], got {lambda}"
        )))
    }
}

fn check_theta<R: Real>(theta: R) -> Result<()> {
    if theta >= R::zero() && theta < R::one() {
        Ok(())
    } else {
        Err(Error::OutOfDomain(format!(
            "theta must lie in [0, 1), got {theta}"
        )))
    }
}

fn check_reflector_domain<R: Real>(eps: R, alpha: R, lambda: R) -> Result<()> {
    check_lambda(lambda)?;
    AveragedProfile::new(eps, alpha)?;
    if alpha > R::one() / (R::one() + lambda) {
        return Err(Error::OutOfDomain(format!(
            "alpha = {alpha} exceeds 1/(1 + lambda) = {}",
            R::one() / (R::one() + lambda)
        )));
    }
    Ok(())
}

/// Profile of the `lambda`-reflector `(1 + lambda)T - lambda id` of an
/// `(eps, alpha)` map.
pub fn reflector_profile<R: Real>(eps: R, alpha: R, lambda: R) -> Result<AveragedProfile<R>> {
    check_reflector_domain(eps, alpha, lambda)?;
    let one = R::one();
    let alpha_r = one / (one + (one + lambda) * ((one - alpha) / alpha - lambda));
    Ok(AveragedProfile {
        eps: (one + lambda) * eps,
        alpha: alpha_r,
    })
}

/// Recovers the base profile from a reflector profile; inverse of
/// [`reflector_profile`].
pub fn reflector_profile_inverse<R: Real>(
    reflector: AveragedProfile<R>,
    lambda: R,
) -> Result<AveragedProfile<R>> {
    check_lambda(lambda)?;
    let one = R::one();
    let ratio = (one / reflector.alpha - one) / (one + lambda) + lambda;
    AveragedProfile::new(reflector.eps / (one + lambda), one / (one + ratio))
}

/// Profile of `T_lambda` built from two `(eps, alpha)` projectors.
pub fn tlambda_profile<R: Real>(eps: R, alpha: R, lambda: R) -> Result<AveragedProfile<R>> {
    check_reflector_domain(eps, alpha, lambda)?;
    let one = R::one();
    let half = R::lit(0.5);
    let l1 = one + lambda;
    Ok(AveragedProfile {
        eps: R::lit(2.0) * eps + l1 * eps * eps,
        alpha: one / (l1 * (one + l1 * half * ((one - alpha) / alpha - lambda))),
    })
}

/// Profile of `T_lambda` on an `(eps, delta)`-regular feasibility pair.
pub fn feasibility_profile<R: Real>(eps: R, lambda: R) -> Result<AveragedProfile<R>> {
    check_lambda(lambda)?;
    if !(eps >= R::zero()) || !eps.is_finite() {
        return Err(Error::OutOfDomain(format!(
            "violation must be finite and >= 0, got {eps}"
        )));
    }
    let two = R::lit(2.0);
    let inner = two * eps + two * eps * eps;
    Ok(AveragedProfile {
        eps: two * inner + (R::one() + lambda) * inner * inner,
        alpha: two / (R::lit(3.0) + lambda),
    })
}

/// Metric subregularity constant implied by transversality constant `theta`.
pub fn kappa_from_theta<R: Real>(theta: R, lambda: R) -> Result<R> {
    check_theta(theta)?;
    check_lambda(lambda)?;
    let one = R::one();
    let denom = R::SQRT_2() * one.max(lambda + (one - theta * theta).sqrt());
    Ok((one - theta) * (one + theta).sqrt() / denom)
}

/// Predicted linear rate; invalid when `kappa` is too small for the profile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Rate<R> {
    Valid { c: R, radicand: R },
    Invalid { radicand: R },
}

impl<R: Real> Rate<R> {
    pub fn value(&self) -> Option<R> {
        match self {
            Rate::Valid { c, .. } => Some(*c),
            Rate::Invalid { .. } => None,
        }
    }

    pub fn radicand(&self) -> R {
        match self {
            Rate::Valid { radicand, .. } | Rate::Invalid { radicand } => *radicand,
        }
    }

    pub fn is_valid(&self) -> bool {
        matches!(self, Rate::Valid { .. })
    }
}

/// `c = sqrt(1 + eps - (1 - alpha) kappa^2 / alpha)`, valid when the radicand
/// lies in `[0, 1)`.
pub fn predicted_rate<R: Real>(profile: AveragedProfile<R>, kappa: R) -> Rate<R> {
    let one = R::one();
    let radicand = one + profile.eps - (one - profile.alpha) * kappa * kappa / profile.alpha;
    if radicand >= R::zero() && radicand < one {
        Rate::Valid {
            c: radicand.sqrt(),
            radicand,
        }
    } else {
        Rate::Invalid { radicand }
    }
}

/// Error-bound constant `sqrt((1 - theta)/2)`.
pub fn subtransversality_constant<R: Real>(theta: R) -> Result<R> {
    check_theta(theta)?;
    Ok(((R::one() - theta) / R::lit(2.0)).sqrt())
}

/// Radius `delta'` of the neighborhood on which the rate applies.
pub fn neighborhood_radius<R: Real>(eps: R, lambda: R, delta: R) -> Result<R> {
    check_lambda(lambda)?;
    if !(delta > R::zero()) || !(eps >= R::zero()) {
        return Err(Error::OutOfDomain(format!(
            "need delta > 0 and eps >= 0, got delta = {delta}, eps = {eps}"
        )));
    }
    let one = R::one();
    let two = R::lit(2.0);
    let inner = two * eps + two * eps * eps;
    Ok(delta / (two * (one + eps) * (one + (one + lambda) * inner).sqrt()))
}

/// Inputs of a [`ConstantsReport`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantsInput<R> {
    pub eps: R,
    pub alpha: R,
    pub lambda: R,
    pub theta: R,
    pub delta: R,
    /// Replaces the `kappa` derived from `theta` when set.
    pub kappa: Option<R>,
}

impl<R: Real> ConstantsInput<R> {
    /// Projectors onto convex sets: `eps = 0`, `alpha = 1/2`, `delta = 1`.
    pub fn new(lambda: R, theta: R) -> Self {
        Self {
            eps: R::zero(),
            alpha: R::lit(0.5),
            lambda,
            theta,
            delta: R::one(),
            kappa: None,
        }
    }
}

/// Every derived constant for one configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport<R> {
    pub input: ConstantsInput<R>,
    /// `None` when `alpha > 1/(1 + lambda)`.
    pub reflector: Option<AveragedProfile<R>>,
    pub tlambda: Option<AveragedProfile<R>>,
    pub feasibility: AveragedProfile<R>,
    pub kappa: R,
    pub subtransversality: R,
    /// Rate from the feasibility profile and `kappa`.
    pub rate: Rate<R>,
    /// Rate from the `T_lambda` profile and `kappa`, when that profile exists.
    pub tlambda_rate: Option<Rate<R>>,
    pub delta_prime: R,
}

impl<R: Real> ConstantsReport<R> {
    pub fn new(input: ConstantsInput<R>) -> Result<Self> {
        AveragedProfile::new(input.eps, input.alpha)?;
        let reflector = reflector_profile(input.eps, input.alpha, input.lambda).ok();
        let tlambda = tlambda_profile(input.eps, input.alpha, input.lambda).ok();
        let feasibility = feasibility_profile(input.eps, input.lambda)?;
        let kappa = match input.kappa {
            Some(k) if k > R::zero() => k,
            Some(k) => {
                return Err(Error::OutOfDomain(format!(
                    "kappa must be positive, got {k}"
                )))
            }
            None => kappa_from_theta(input.theta, input.lambda)?,
        };
        Ok(Self {
            input,
            reflector,
            tlambda,
            feasibility,
            kappa,
            subtransversality: subtransversality_constant(input.theta)?,
            rate: predicted_rate(feasibility, kappa),
            tlambda_rate: tlambda.map(|p| predicted_rate(p, kappa)),
            delta_prime: neighborhood_radius(input.eps, input.lambda, input.delta)?,
        })
    }

    /// Flat `key = value` block with stable key names.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        let opt = |v: Option<R>| v.map_or_else(|| "undefined".to_string(), |v| v.to_string());
        let i = &self.input;
        line("lambda", i.lambda.to_string());
        line("eps", i.eps.to_string());
        line("alpha", i.alpha.to_string());
        line("theta", i.theta.to_string());
        line("delta", i.delta.to_string());
        line("reflector.eps", opt(self.reflector.map(|p| p.eps)));
        line("reflector.alpha", opt(self.reflector.map(|p| p.alpha)));
        line("tlambda.eps", opt(self.tlambda.map(|p| p.eps)));
        line("tlambda.alpha", opt(self.tlambda.map(|p| p.alpha)));
        line("feasibility.eps", self.feasibility.eps.to_string());
        line("feasibility.alpha", self.feasibility.alpha.to_string());
        line("kappa", self.kappa.to_string());
        line("subtransversality", self.subtransversality.to_string());
        line("rate.radicand", self.rate.radicand().to_string());
        line("rate.valid", self.rate.is_valid().to_string());
        line("rate.c", opt(self.rate.value()));
        line(
            "tlambda_rate.radicand",
            opt(self.tlambda_rate.map(|r| r.radicand())),
        );
        line(
            "tlambda_rate.c",
            opt(self.tlambda_rate.and_then(|r| r.value())),
        );
        line("delta_prime", self.delta_prime.to_string());
        out
    }
}

/// Parses a block produced by [`ConstantsReport::render`] into key/value pairs.
pub fn parse_report(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn reflector_examples() {
        let p = reflector_profile(0.0, 0.5, 1.0).unwrap();
        assert_abs_diff_eq!(p.eps, 0.0);
        assert_abs_diff_eq!(p.alpha, 1.0, epsilon = 1e-15);
        let p = reflector_profile(0.1, 0.5, 1.0).unwrap();
        assert_abs_diff_eq!(p.eps, 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(p.alpha, 1.0, epsilon = 1e-15);
        let p = reflector_profile(0.07, 0.3, 0.0).unwrap();
        assert_abs_diff_eq!(p.eps, 0.07, epsilon = 1e-15);
        assert_abs_diff_eq!(p.alpha, 0.3, epsilon = 1e-15);
        assert!(matches!(
            reflector_profile(0.0, 0.6, 1.0),
            Err(Error::OutOfDomain(_))
        ));
    }

    #[test]
    fn inverse_round_trip_grid() {
        for lambda in [0.0, 0.25, 0.5, 0.75, 1.0] {
            for eps in [0.0, 0.05, 0.1] {
                for alpha in [0.3, 0.5] {
                    let r = reflector_profile(eps, alpha, lambda).unwrap();
                    let back = reflector_profile_inverse(r, lambda).unwrap();
                    assert_abs_diff_eq!(back.eps, eps, epsilon = 1e-12);
                    assert_abs_diff_eq!(back.alpha, alpha, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn tlambda_examples() {
        let p = tlambda_profile(0.0, 0.5, 0.0).unwrap();
        assert_abs_diff_eq!(p.alpha, 2.0 / 3.0, epsilon = 1e-15);
        let p = tlambda_profile(0.0, 0.5, 1.0).unwrap();
        assert_abs_diff_eq!(p.alpha, 0.5, epsilon = 1e-15);
        for lambda in [0.0, 0.3, 0.9] {
            assert_eq!(tlambda_profile(0.0, 0.4, lambda).unwrap().eps, 0.0);
        }
    }

    #[test]
    fn feasibility_examples() {
        let p = feasibility_profile(0.0, 0.5).unwrap();
        assert_abs_diff_eq!(p.alpha, 4.0 / 7.0, epsilon = 1e-15);
        assert_eq!(p.eps, 0.0);
        assert_abs_diff_eq!(feasibility_profile(0.0, 1.0).unwrap().alpha, 0.5);
        let p = feasibility_profile(0.1, 1.0).unwrap();
        assert_abs_diff_eq!(p.eps, 0.5368, epsilon = 1e-12);
    }

    #[test]
    fn kappa_examples() {
        assert_abs_diff_eq!(kappa_from_theta(0.0, 0.0).unwrap(), 0.70711, epsilon = 1e-5);
        assert_abs_diff_eq!(kappa_from_theta(0.0, 1.0).unwrap(), 0.35355, epsilon = 1e-5);
        assert_abs_diff_eq!(kappa_from_theta(0.5, 1.0).unwrap(), 0.23205, epsilon = 1e-5);
        assert!(kappa_from_theta(1.0, 0.5).is_err());
    }

    #[test]
    fn kappa_decreases_in_theta() {
        for lambda in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let values: Vec<f64> = (0..100)
                .map(|i| kappa_from_theta(i as f64 / 100.0, lambda).unwrap())
                .collect();
            assert!(values.windows(2).all(|w| w[1] < w[0]));
        }
    }

    #[test]
    fn rate_examples() {
        let r = predicted_rate(
            AveragedProfile {
                eps: 0.0,
                alpha: 2.0 / 3.0,
            },
            0.5f64.sqrt(),
        );
        assert_abs_diff_eq!(r.value().unwrap(), 0.86603, epsilon = 1e-5);
        let r = predicted_rate(
            AveragedProfile {
                eps: 0.0,
                alpha: 0.5,
            },
            1.0,
        );
        assert_eq!(r.value(), Some(0.0));
        let r = predicted_rate(
            AveragedProfile {
                eps: 0.5368,
                alpha: 0.5,
            },
            0.23205,
        );
        assert!(!r.is_valid());
        assert_abs_diff_eq!(r.radicand(), 1.4829, epsilon = 1e-4);
    }

    #[test]
    fn subtransversality_and_radius() {
        assert_abs_diff_eq!(subtransversality_constant(0.0).unwrap(), 0.5f64.sqrt());
        assert_abs_diff_eq!(subtransversality_constant(0.5).unwrap(), 0.5);
        assert!(subtransversality_constant(0.999).unwrap() < 0.023);
        assert_abs_diff_eq!(neighborhood_radius(0.0, 0.3, 1.0).unwrap(), 0.5);
        assert_abs_diff_eq!(
            neighborhood_radius(0.1, 1.0, 1.0).unwrap(),
            1.0 / 2.64,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(neighborhood_radius(0.0, 0.0, 2.0).unwrap(), 1.0);
    }

    #[test]
    fn report_renders_stable_keys() {
        let report = ConstantsReport::new(ConstantsInput::new(1.0, 0.5)).unwrap();
        let kv = parse_report(&report.render());
        let get = |k: &str| {
            kv.iter()
                .find(|(key, _)| key == k)
                .map(|(_, v)| v.clone())
                .unwrap()
        };
        assert!((get("kappa").parse::<f64>().unwrap() - 0.23205).abs() < 1e-5);
        assert_eq!(get("tlambda.alpha").parse::<f64>().unwrap(), 0.5);
        assert_eq!(get("rate.valid"), "true");
    }
}
