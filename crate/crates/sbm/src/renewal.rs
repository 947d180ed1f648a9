//! Ladder-height structure of the one-dimensional projection of X: the
//! ladder Laplace exponent χ (Fristedt's formula), the renewal function V,
//! and the half-space boundary-decay profile w(x) = V((x_d)⁺).
//!
//! V is the quantity the boundary Harnack principle speaks through: it is
//! comparable to 1/√φ(r⁻²), and ratios of nonnegative harmonic functions
//! vanishing at the wall track V(δ(x))/V(δ(y)).

use crate::bernstein::BernsteinSpec;
use crate::error::{Error, Result};
use crate::laplace::{invert_cm, CmFunctionHandle, QuadratureConfig};
use crate::numeric::interp::Pchip;
use crate::numeric::gl16;
use std::sync::Arc;

/// χ(λ) = exp( (1/π) ∫₀^∞ log φ(λ²θ²) / (1+θ²) dθ ), evaluated after the
/// substitution θ = tan u with dyadic grading toward both endpoints (the
/// integrand has integrable log singularities at u = 0 and u = π/2).
pub fn ladder_exponent_chi(
    spec: &BernsteinSpec,
    lambda: f64,
    _config: &QuadratureConfig,
) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::domain(
            "ladder_exponent_chi",
            format!("lambda must be positive and finite, got {lambda}"),
        ));
    }
    let l2 = lambda * lambda;
    // Fold the interval at π/4: the paired integrand
    //   g(u) = log φ(λ² tan²u) + log φ(λ² cot²u)
    // cancels the ±log-tan oscillation analytically (tan·cot = 1), which
    // keeps the panel sum cancellation-free. Downstream transform inversion
    // amplifies relative noise in χ by ~1e8, so every ulp here matters.
    let g = |u: f64| {
        let tan = u.tan();
        spec.phi_unchecked(l2 * tan * tan).ln() + spec.phi_unchecked(l2 / (tan * tan)).ln()
    };
    let quarter = std::f64::consts::FRAC_PI_4;
    let mut acc = 0.0f64;
    let mut comp = 0.0f64;
    let mut abs_acc = 0.0f64;
    let mut hi = quarter;
    for _ in 0..50 {
        let lo = 0.5 * hi;
        let panel = gl16(&g, lo, hi);
        let sum = acc + panel;
        if acc.abs() >= panel.abs() {
            comp += (acc - sum) + panel;
        } else {
            comp += (panel - sum) + acc;
        }
        acc = sum;
        abs_acc += panel.abs();
        // The integrand is O(|log u|); once panels stop contributing at the
        // noise floor the rest are below 1e-15 of the total.
        if panel.abs() < 1e-17 * abs_acc {
            break;
        }
        hi = lo;
    }
    Ok(((acc + comp) / std::f64::consts::PI).exp())
}

/// Laplace transform of the ladder potential density: λ ↦ 1/χ(λ).
/// Real-axis only (the Fristedt integral is evaluated on (0, ∞)).
pub fn ladder_transform(spec: &BernsteinSpec, config: &QuadratureConfig) -> CmFunctionHandle {
    let s = spec.clone();
    let c = config.clone();
    CmFunctionHandle::new(
        format!("1/chi[{}]", spec.label()),
        Arc::new(move |l: f64| 1.0 / ladder_exponent_chi(&s, l, &c).expect("chi evaluation")),
        None,
    )
}

/// Tabulated ladder potential density v and renewal function V on an
/// increasing grid. Immutable after construction.
#[derive(Debug, Clone)]
pub struct RenewalTable {
    grid: Vec<f64>,
    v: Vec<f64>,
    v_cum: Vec<f64>,
    spec_label: String,
    interp: Pchip,
}

impl RenewalTable {
    /// Build the table: v by transform inversion of 1/χ, V by cumulative
    /// integration with a local power-law rule on each panel and a
    /// power-law head correction below the first grid point (v is
    /// integrably singular there; a plain trapezoid under-counts).
    pub fn build(spec: &BernsteinSpec, grid: &[f64], config: &QuadratureConfig) -> Result<Self> {
        if grid.len() < 8 || grid.windows(2).any(|w| w[1] <= w[0]) || grid[0] <= 0.0 {
            return Err(Error::domain(
                "renewal_table",
                "grid must be increasing, positive, with at least 8 points",
            ));
        }
        let handle = ladder_transform(spec, config);
        let v: Vec<f64> = grid
            .iter()
            .map(|&t| invert_cm(&handle, t, config))
            .collect::<Result<_>>()?;
        // head: fit v ≈ c r^{-κ} near the left edge, so
        // ∫₀^{r₀} v = v(r₀) r₀ / (1 − κ). A wider least-squares stencil keeps
        // the fitted exponent stable against inversion jitter at single
        // points.
        let stencil = 16.min(grid.len() / 2);
        let xs: Vec<f64> = grid[..stencil].iter().map(|r| r.ln()).collect();
        let ys: Vec<f64> = v[..stencil].iter().map(|w| w.ln()).collect();
        let (slope, _) = crate::numeric::linear_fit(&xs, &ys);
        let kappa = -slope;
        if !(kappa < 1.0) {
            return Err(Error::non_convergence(
                "renewal_table",
                format!("head exponent {kappa} >= 1: ladder density not integrable at 0"),
            ));
        }
        let mut v_cum = Vec::with_capacity(grid.len());
        let mut acc = v[0] * grid[0] / (1.0 - kappa);
        v_cum.push(acc);
        for i in 0..grid.len() - 1 {
            // local power panel: exact when v is a pure power on the panel
            let k = -(v[i + 1] / v[i]).ln() / (grid[i + 1] / grid[i]).ln();
            let panel = if (1.0 - k).abs() > 1e-9 {
                (v[i + 1] * grid[i + 1] - v[i] * grid[i]) / (1.0 - k)
            } else {
                v[i] * grid[i] * (grid[i + 1] / grid[i]).ln()
            };
            acc += panel;
            v_cum.push(acc);
        }
        let log_r: Vec<f64> = grid.iter().map(|r| r.ln()).collect();
        let log_v_cum: Vec<f64> = v_cum.iter().map(|v| v.ln()).collect();
        Ok(RenewalTable {
            grid: grid.to_vec(),
            v,
            v_cum,
            spec_label: spec.label(),
            interp: Pchip::new(log_r, log_v_cum),
        })
    }

    pub fn spec_label(&self) -> &str {
        &self.spec_label
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn density(&self) -> &[f64] {
        &self.v
    }

    pub fn values(&self) -> &[f64] {
        &self.v_cum
    }

    /// V(r) by monotone log-log interpolation; refuses to extrapolate.
    pub fn renewal_value(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::domain("renewal_value", "r must be positive"));
        }
        let (lo, hi) = (self.grid[0], *self.grid.last().unwrap());
        if r < lo || r > hi {
            return Err(Error::domain(
                "renewal_value",
                format!("r={r:e} outside the table range [{lo:e}, {hi:e}]"),
            ));
        }
        Ok(self.interp.eval(r.ln()).exp())
    }

    /// Boundary decay profile w(x) = V((x_d)⁺): zero at and below the wall.
    pub fn boundary_decay_w(&self, x_d: f64) -> Result<f64> {
        if x_d <= 0.0 {
            return Ok(0.0);
        }
        self.renewal_value(x_d)
    }

    /// CSV serialization: `r,v,V` per line, plot-ready and cacheable.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,v,V\n");
        for i in 0..self.grid.len() {
            out.push_str(&format!("{:e},{:e},{:e}\n", self.grid[i], self.v[i], self.v_cum[i]));
        }
        out
    }

    pub fn from_csv(text: &str, spec_label: &str) -> Result<Self> {
        let mut grid = Vec::new();
        let mut v = Vec::new();
        let mut v_cum = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if i == 0 {
                continue;
            }
            let mut parts = line.split(',');
            let mut next = || -> Result<f64> {
                parts
                    .next()
                    .and_then(|p| p.trim().parse::<f64>().ok())
                    .ok_or_else(|| Error::domain("renewal_from_csv", format!("bad line {i}")))
            };
            grid.push(next()?);
            v.push(next()?);
            v_cum.push(next()?);
        }
        if grid.len() < 8 {
            return Err(Error::domain("renewal_from_csv", "too few rows"));
        }
        let log_r: Vec<f64> = grid.iter().map(|r| r.ln()).collect();
        let log_v_cum: Vec<f64> = v_cum.iter().map(|v| v.ln()).collect();
        Ok(RenewalTable {
            grid,
            v,
            v_cum,
            spec_label: spec_label.to_string(),
            interp: Pchip::new(log_r, log_v_cum),
        })
    }
}

/// Default table grid: 1024 log-spaced points over [1e-6, 1e6].
pub fn default_renewal_grid() -> Vec<f64> {
    crate::numeric::log_grid(1e-6, 1e6, 1024 / 12)
}

/// The explicit boundary-decay rate √(φ(δy⁻²)/φ(δx⁻²)) that harmonic
/// ratios u(x)/u(y) are bounded by near the wall.
pub fn bhp_decay_comparator(spec: &BernsteinSpec, delta_x: f64, delta_y: f64) -> Result<f64> {
    if !(delta_x > 0.0 && delta_y > 0.0) {
        return Err(Error::domain(
            "bhp_decay_comparator",
            "boundary distances must be positive",
        ));
    }
    Ok((spec.phi_unchecked(delta_y.powi(-2)) / spec.phi_unchecked(delta_x.powi(-2))).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bernstein::catalogue;
    use approx::assert_relative_eq;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn fristedt_reproduces_pure_powers() {
        // ∫₀^∞ log θ/(1+θ²)dθ = 0 (θ ↦ 1/θ), so χ(λ) = λ^{α/2} exactly
        for &alpha in &[0.5, 1.0, 1.5] {
            let spec = BernsteinSpec::pure_power(alpha).unwrap();
            for &l in &[1e-4, 1e-2, 1.0, 4.0, 1e2, 1e4] {
                let chi = ladder_exponent_chi(&spec, l, &cfg()).unwrap();
                assert_relative_eq!(chi, l.powf(alpha / 2.0), max_relative = 1e-8);
            }
        }
        let spec = BernsteinSpec::pure_power(1.0).unwrap();
        assert_relative_eq!(
            ladder_exponent_chi(&spec, 4.0, &cfg()).unwrap(),
            2.0,
            max_relative = 1e-9
        );
    }

    #[test]
    fn chi_is_increasing() {
        for spec in catalogue() {
            let mut prev = 0.0;
            for &l in &[1e-3, 1e-1, 1.0, 1e1, 1e3] {
                let chi = ladder_exponent_chi(&spec, l, &cfg()).unwrap();
                assert!(chi > prev, "{}", spec.label());
                prev = chi;
            }
        }
    }

    #[test]
    fn chi_rescaling_identity() {
        // χ_a(λ) = φ(a^{-2})^{-1/2} χ(λ/a)
        let spec = BernsteinSpec::sum_of_powers(0.3, 0.7).unwrap();
        let a = 5.0f64;
        let scaled = spec.rescale(a).unwrap();
        let phi_a = spec.phi(a.powi(-2)).unwrap();
        for &l in &[0.1, 1.0, 20.0] {
            let lhs = ladder_exponent_chi(&scaled, l, &cfg()).unwrap();
            let rhs = phi_a.powf(-0.5) * ladder_exponent_chi(&spec, l / a, &cfg()).unwrap();
            assert_relative_eq!(lhs, rhs, max_relative = 1e-9);
        }
    }

    #[test]
    fn stable_renewal_function() {
        // α=1 ladder: v(t) = t^{-1/2}/Γ(1/2), V(r) = 2√(r/π)
        let spec = BernsteinSpec::pure_power(1.0).unwrap();
        let grid = default_renewal_grid();
        let table = RenewalTable::build(&spec, &grid, &cfg()).unwrap();
        assert_relative_eq!(
            table.renewal_value(1.0).unwrap(),
            1.1283791670955126,
            max_relative = 1e-6
        );
        for &r in &[1e-3, 0.3, 1.0, 55.0, 1e3] {
            let expect = 2.0 * (r / std::f64::consts::PI).sqrt();
            assert_relative_eq!(table.renewal_value(r).unwrap(), expect, max_relative = 1e-6);
        }
    }

    #[test]
    fn table_shape_invariants() {
        for spec in [
            BernsteinSpec::sum_of_powers(0.3, 0.7).unwrap(),
            BernsteinSpec::log_cosh(0.8).unwrap(),
        ] {
            let grid = crate::numeric::log_grid(1e-4, 1e4, 16);
            let table = RenewalTable::build(&spec, &grid, &cfg()).unwrap();
            let v = table.density();
            let vc = table.values();
            for i in 1..v.len() {
                assert!(v[i] > 0.0 && v[i] <= v[i - 1] * (1.0 + 1e-7), "{}", spec.label());
                assert!(vc[i] > vc[i - 1], "{}", spec.label());
            }
            // V(0+) = 0 along the table: the head shrinks with the grid
            assert!(vc[0] < 0.05 * vc[v.len() - 1]);
        }
    }

    #[test]
    fn renewal_comparability_band() {
        // V(r) ≍ 1/√φ(r^{-2}): the band over six decades stays modest
        for spec in catalogue() {
            let grid = crate::numeric::log_grid(1e-4, 1e4, 16);
            let table = RenewalTable::build(&spec, &grid, &cfg()).unwrap();
            let mut lo = f64::INFINITY;
            let mut hi = 0.0f64;
            for &r in &crate::numeric::log_grid(1e-3, 1e3, 4) {
                let ratio =
                    table.renewal_value(r).unwrap() * spec.phi(r.powi(-2)).unwrap().sqrt();
                lo = lo.min(ratio);
                hi = hi.max(ratio);
            }
            assert!(hi / lo < 3.0, "{}: band {}", spec.label(), hi / lo);
        }
    }

    #[test]
    fn renewal_rescaling_identity() {
        // V_a(r) = √φ(a^{-2}) V(ar). The head correction is asymptotically
        // exact only well above the first grid point, so both tables use the
        // full default grid and the comparison stays four decades inside.
        let spec = BernsteinSpec::sum_of_powers(0.3, 0.7).unwrap();
        let a = 4.0f64;
        let grid = default_renewal_grid();
        let base = RenewalTable::build(&spec, &grid, &cfg()).unwrap();
        let scaled = RenewalTable::build(&spec.rescale(a).unwrap(), &grid, &cfg()).unwrap();
        let phi_a = spec.phi(a.powi(-2)).unwrap();
        for &r in &[1e-2, 1.0, 1e2] {
            let lhs = scaled.renewal_value(r).unwrap();
            let rhs = phi_a.sqrt() * base.renewal_value(a * r).unwrap();
            assert_relative_eq!(lhs, rhs, max_relative = 1e-5);
        }
    }

    #[test]
    fn boundary_decay_profile() {
        let spec = BernsteinSpec::pure_power(1.0).unwrap();
        let grid = crate::numeric::log_grid(1e-5, 1e5, 16);
        let table = RenewalTable::build(&spec, &grid, &cfg()).unwrap();
        assert_eq!(table.boundary_decay_w(-1.0).unwrap(), 0.0);
        assert_eq!(table.boundary_decay_w(0.0).unwrap(), 0.0);
        assert_relative_eq!(
            table.boundary_decay_w(1.0).unwrap(),
            1.1283791670955126,
            max_relative = 1e-6
        );
        // extrapolation is an error, not a guess
        assert!(table.boundary_decay_w(1e7).is_err());
    }

    #[test]
    fn decay_comparator_cases() {
        let spec = BernsteinSpec::pure_power(1.0).unwrap();
        assert_relative_eq!(
            bhp_decay_comparator(&spec, 0.5, 0.5).unwrap(),
            1.0,
            max_relative = 1e-14
        );
        // for φ(λ) = λ^{1/2} the rate is √(δx/δy): near the wall the
        // harmonic ratio u(x)/u(y) is small
        assert_relative_eq!(
            bhp_decay_comparator(&spec, 0.01, 1.0).unwrap(),
            0.1,
            max_relative = 1e-12
        );
        // increasing in δx for fixed δy (φ increasing)
        let mut prev = 0.0;
        for &dx in &[0.01, 0.1, 1.0, 10.0] {
            let v = bhp_decay_comparator(&spec, dx, 1.0).unwrap();
            assert!(v > prev);
            prev = v;
        }
        assert!(bhp_decay_comparator(&spec, 0.0, 1.0).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let spec = BernsteinSpec::pure_power(1.0).unwrap();
        let grid = crate::numeric::log_grid(1e-2, 1e2, 8);
        let table = RenewalTable::build(&spec, &grid, &cfg()).unwrap();
        let csv = table.to_csv();
        let back = RenewalTable::from_csv(&csv, table.spec_label()).unwrap();
        assert_relative_eq!(
            back.renewal_value(3.0).unwrap(),
            table.renewal_value(3.0).unwrap(),
            max_relative = 1e-12
        );
    }
}
