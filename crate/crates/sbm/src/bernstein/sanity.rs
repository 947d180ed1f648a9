//! Pointwise sanity checks that every Bernstein function must satisfy,
//! evaluated on a grid of (λ, t) pairs. These are cheap necessary
//! conditions; a custom evaluator that passes them is still only trusted,
//! not certified, to be complete Bernstein.

use super::BernsteinSpec;
use crate::error::Result;
use serde::Serialize;

/// A structured record of the first failed inequality.
#[derive(Debug, Clone, Serialize)]
pub struct SanityViolation {
    /// Which inequality failed.
    pub law: String,
    pub lambda: f64,
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SanityReport {
    pub label: String,
    pub pairs_checked: usize,
    pub violation: Option<SanityViolation>,
}

impl SanityReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

const SLACK: f64 = 1e-10;

/// Check, for each pair (λ, t):
///   * monotonicity: sign(φ(λt) − φ(t)) matches sign(λ − 1);
///   * φ(λt) ≤ λ φ(t) for λ ≥ 1;
///   * the sandwich 1 ∧ λ ≤ φ(λt)/φ(t) ≤ 1 ∨ λ;
///   * s ↦ φ(s)/s non-increasing between t and λt;
///   * s φ′(s) ≤ φ(s) at s = t.
///
/// Returns the first violation rather than aborting, so adversarial
/// evaluators produce a diagnosable record.
pub fn check_bernstein_sanity(spec: &BernsteinSpec, pairs: &[(f64, f64)]) -> Result<SanityReport> {
    let mut checked = 0usize;
    let mut violation = None;
    'outer: for &(lambda, t) in pairs {
        let phi_t = spec.phi(t)?;
        let phi_lt = spec.phi(lambda * t)?;
        let ratio = phi_lt / phi_t;
        checked += 1;

        let mut fail = |law: &str, lhs: f64, rhs: f64| -> bool {
            violation = Some(SanityViolation {
                law: law.to_string(),
                lambda,
                t,
                lhs,
                rhs,
            });
            true
        };

        if lambda >= 1.0 && ratio < 1.0 - SLACK && fail("monotone", ratio, 1.0) {
            break 'outer;
        }
        if lambda <= 1.0 && ratio > 1.0 + SLACK && fail("monotone", ratio, 1.0) {
            break 'outer;
        }
        if lambda >= 1.0
            && phi_lt > lambda * phi_t * (1.0 + SLACK)
            && fail("phi(lambda*t) <= lambda*phi(t)", phi_lt, lambda * phi_t)
        {
            break 'outer;
        }
        let lo = lambda.min(1.0);
        let hi = lambda.max(1.0);
        if ratio < lo * (1.0 - SLACK) && fail("sandwich lower (1 ^ lambda)", ratio, lo) {
            break 'outer;
        }
        if ratio > hi * (1.0 + SLACK) && fail("sandwich upper (1 v lambda)", ratio, hi) {
            break 'outer;
        }
        let (u, v) = if lambda >= 1.0 {
            (t, lambda * t)
        } else {
            (lambda * t, t)
        };
        let phi_u = spec.phi(u)?;
        let phi_v = spec.phi(v)?;
        if phi_v / v > phi_u / u * (1.0 + SLACK)
            && fail("phi(v)/v <= phi(u)/u", phi_v / v, phi_u / u)
        {
            break 'outer;
        }
        let dphi = spec.phi_prime(t)?;
        if t * dphi > phi_t * (1.0 + 1e-8) && fail("t*phi'(t) <= phi(t)", t * dphi, phi_t) {
            break 'outer;
        }
    }
    Ok(SanityReport {
        label: spec.label(),
        pairs_checked: checked,
        violation,
    })
}

/// The default (λ, t) test grid: log-spaced λ and t over `[1e-4, 1e4]`.
pub fn default_pair_grid(points_per_decade: usize) -> Vec<(f64, f64)> {
    let axis = crate::numeric::log_grid(1e-4, 1e4, points_per_decade);
    let mut pairs = Vec::with_capacity(axis.len() * axis.len());
    for &l in &axis {
        for &t in &axis {
            pairs.push((l, t));
        }
    }
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bernstein::catalogue;

    #[test]
    fn stable_case_passes_with_equality_structure() {
        let spec = BernsteinSpec::pure_power(1.0).unwrap();
        let report = check_bernstein_sanity(&spec, &default_pair_grid(4)).unwrap();
        assert!(report.passed(), "{:?}", report.violation);
    }

    #[test]
    fn all_catalogue_families_pass_on_the_wide_grid() {
        let pairs = default_pair_grid(4);
        for spec in catalogue() {
            let report = check_bernstein_sanity(&spec, &pairs).unwrap();
            assert!(report.passed(), "{}: {:?}", spec.label(), report.violation);
        }
    }

    #[test]
    fn quadratic_violates_the_subadditivity_bound() {
        let spec = BernsteinSpec::named_custom("quadratic").unwrap();
        let report = check_bernstein_sanity(&spec, &[(2.0, 1.0)]).unwrap();
        let v = report.violation.expect("quadratic must fail");
        // (λt)² > λt² for λ > 1
        assert!(v.law.contains("lambda*phi(t)") || v.law.contains("sandwich upper"));
    }
}
