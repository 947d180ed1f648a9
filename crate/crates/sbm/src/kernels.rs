//! Kernels of the subordinate Brownian motion `X_t = W(S_t)`: the jump
//! density `j`, the radial Green function `g`, the free heat kernel
//! `p(t, x, y)`, and the closed-form comparators they are measured against.
//!
//! `j` and `g` are the subordination integrals
//!
//! ```text
//! j(r) = ∫₀^∞ (4πt)^{-d/2} e^{-r²/(4t)} μ(t) dt
//! g(r) = ∫₀^∞ (4πt)^{-d/2} e^{-r²/(4t)} u(t) dt   (transient case)
//! ```
//!
//! evaluated by splitting at `t = r²` and substituting `t = r²s` on each
//! piece, with the subordinator densities coming from a per-spec cache
//! (log-log monotone interpolation of inverted transforms) or, in exact
//! mode, from direct inversion at every quadrature node.

use crate::bernstein::{BernsteinSpec, ScalingSide, SideCertificate};
use crate::error::{Error, Result};
use crate::laplace::{
    invert_cm, levy_transform, potential_transform, QuadratureConfig, T_DOMAIN,
};
use crate::numeric::interp::Pchip;
use crate::numeric::{bessel::bessel_j, gl16, integrate_to_inf, log_grid};
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

/// A space(-time) evaluation point for the kernels.
#[derive(Debug, Clone)]
pub struct KernelPoint {
    pub d: u32,
    pub t: Option<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl KernelPoint {
    pub fn new(d: u32, t: Option<f64>, x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if d < 1 {
            return Err(Error::domain("kernel_point", "dimension must be >= 1"));
        }
        if x.len() != d as usize || y.len() != d as usize {
            return Err(Error::domain(
                "kernel_point",
                format!("points must have dimension {d}"),
            ));
        }
        if let Some(t) = t {
            if !(t > 0.0) {
                return Err(Error::domain("kernel_point", "t must be positive"));
            }
        }
        Ok(KernelPoint { d, t, x, y })
    }

    /// Euclidean distance |x − y|.
    pub fn r(&self) -> f64 {
        self.x
            .iter()
            .zip(&self.y)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Distance to the half-space boundary, `(x_d)^+`.
    pub fn delta_x(&self) -> f64 {
        self.x[self.d as usize - 1].max(0.0)
    }

    pub fn delta_y(&self) -> f64 {
        self.y[self.d as usize - 1].max(0.0)
    }
}

/// Whether kernel quadratures read the subordinator densities from the
/// per-spec cache or invert the transform at every node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityMode {
    Cached,
    Exact,
}

/// Log-log monotone interpolant of an inverted density over `T_DOMAIN`,
/// with power-law extrapolation from the edge slopes outside it.
struct DensityCache {
    interp: Pchip,
    lo: f64,
    hi: f64,
    value_lo: f64,
    value_hi: f64,
    slope_lo: f64,
    slope_hi: f64,
}

impl DensityCache {
    fn build(
        handle: &crate::laplace::CmFunctionHandle,
        points: usize,
        config: &QuadratureConfig,
    ) -> Result<Self> {
        let grid = log_grid(T_DOMAIN.0, T_DOMAIN.1, points / 24);
        let mut log_t = Vec::with_capacity(grid.len());
        let mut log_v = Vec::with_capacity(grid.len());
        for &t in &grid {
            let v = invert_cm(handle, t, config)?;
            if !(v > 0.0) {
                return Err(Error::non_convergence(
                    "density_cache",
                    format!("{} non-positive at t={t:e}", handle.label),
                ));
            }
            log_t.push(t.ln());
            log_v.push(v.ln());
        }
        // Edge slopes fitted over the outermost decade, for extrapolation.
        let k = (points / 24).max(2);
        let slope = |a: &[f64], b: &[f64]| -> f64 {
            let n = a.len();
            (b[n - 1] - b[0]) / (a[n - 1] - a[0])
        };
        let slope_lo = slope(&log_t[..k], &log_v[..k]);
        let slope_hi = slope(&log_t[log_t.len() - k..], &log_v[log_v.len() - k..]);
        Ok(DensityCache {
            lo: T_DOMAIN.0,
            hi: T_DOMAIN.1,
            value_lo: log_v[0].exp(),
            value_hi: log_v[log_v.len() - 1].exp(),
            slope_lo,
            slope_hi,
            interp: Pchip::new(log_t, log_v),
        })
    }

    fn eval(&self, t: f64) -> f64 {
        if t < self.lo {
            self.value_lo * (t / self.lo).powf(self.slope_lo)
        } else if t > self.hi {
            self.value_hi * (t / self.hi).powf(self.slope_hi)
        } else {
            self.interp.eval(t.ln()).exp()
        }
    }
}

/// Persistent kernel evaluator for one spec and dimension. Density caches
/// are built once (lazily, idempotently) and read concurrently afterwards.
pub struct Kernels {
    spec: BernsteinSpec,
    d: u32,
    config: QuadratureConfig,
    mode: DensityMode,
    cache_points: usize,
    mu_cache: OnceLock<DensityCache>,
    u_cache: OnceLock<DensityCache>,
}

impl Kernels {
    pub fn new(spec: BernsteinSpec, d: u32, config: QuadratureConfig) -> Result<Self> {
        if d < 1 {
            return Err(Error::domain("kernels", "dimension must be >= 1"));
        }
        Ok(Kernels {
            spec,
            d,
            config,
            mode: DensityMode::Cached,
            cache_points: 512,
            mu_cache: OnceLock::new(),
            u_cache: OnceLock::new(),
        })
    }

    pub fn with_mode(mut self, mode: DensityMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn spec(&self) -> &BernsteinSpec {
        &self.spec
    }

    pub fn dimension(&self) -> u32 {
        self.d
    }

    fn mu(&self, t: f64) -> f64 {
        match self.mode {
            DensityMode::Cached => {
                let cache = self.mu_cache.get_or_init(|| {
                    DensityCache::build(&levy_transform(&self.spec), self.cache_points, &self.config)
                        .expect("levy density cache")
                });
                cache.eval(t) / t
            }
            DensityMode::Exact => {
                let tt = t.clamp(T_DOMAIN.0, T_DOMAIN.1);
                invert_cm(&levy_transform(&self.spec), tt, &self.config).expect("levy inversion")
                    / t
            }
        }
    }

    fn u(&self, t: f64) -> f64 {
        match self.mode {
            DensityMode::Cached => {
                let cache = self.u_cache.get_or_init(|| {
                    DensityCache::build(
                        &potential_transform(&self.spec),
                        self.cache_points,
                        &self.config,
                    )
                    .expect("potential density cache")
                });
                cache.eval(t)
            }
            DensityMode::Exact => {
                let tt = t.clamp(T_DOMAIN.0, T_DOMAIN.1);
                invert_cm(&potential_transform(&self.spec), tt, &self.config)
                    .expect("potential inversion")
            }
        }
    }

    /// The subordination integral with the density `w`, as a function of r:
    /// `r^{2-d} (4π)^{-d/2} ∫₀^∞ s^{-d/2} e^{-1/(4s)} w(r² s) ds`,
    /// split at s = 1.
    fn subordination_integral<W: Fn(f64) -> f64>(&self, r: f64, w: W) -> Result<f64> {
        let d = self.d as f64;
        let r2 = r * r;
        let integrand = |s: f64| s.powf(-d / 2.0) * (-0.25 / s).exp() * w(r2 * s);
        // e^{-1/(4s)} underflows below s ≈ 1/2900; the dyadic scheme stops on
        // its own well before that.
        let inner = crate::numeric::integrate_to_zero(&integrand, 1.0, self.config.rel_tol, 60);
        let outer = integrate_to_inf(&integrand, 1.0, self.config.rel_tol, 200)?;
        let pref = r.powf(2.0 - d) * (4.0 * std::f64::consts::PI).powf(-d / 2.0);
        Ok(pref * (inner + outer))
    }

    /// Jump density j(r) of X.
    pub fn jump_density_j(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::domain("jump_density_j", format!("r must be positive, got {r}")));
        }
        self.subordination_integral(r, |t| self.mu(t))
    }

    /// Radial Green function g(r); requires transience.
    pub fn green_radial_g(&self, r: f64, zero_cert: &SideCertificate) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::domain("green_radial_g", format!("r must be positive, got {r}")));
        }
        match check_transience(&self.spec, self.d, zero_cert)? {
            Transience::Transient => {}
            other => {
                return Err(Error::NotTransient {
                    d: self.d,
                    message: format!("transience test returned {other:?}"),
                })
            }
        }
        self.subordination_integral(r, |t| self.u(t))
    }

    /// Free heat kernel p(t, x, y) at |x − y| = r, by radial Fourier
    /// inversion of ξ ↦ e^{−tφ(|ξ|²)}.
    pub fn free_heat_kernel(&self, t: f64, r: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::domain("free_heat_kernel", format!("t must be positive, got {t}")));
        }
        if r < 0.0 {
            return Err(Error::domain("free_heat_kernel", "r must be nonnegative"));
        }
        let d = self.d as f64;
        // truncate where tφ(ρ²) > 40 (integrand below e^{-40})
        let rho_max = 1.0
            / self
                .spec
                .capital_phi_inv_with(t / 40.0, self.config.truncation_exponent_range, 1e-10)?;
        let weight = |rho: f64| (-t * self.spec.phi_unchecked(rho * rho)).exp();
        // panel width: half an oscillation period, or a fraction of the
        // decay scale when oscillation is slow
        let decay_scale = 1.0 / self.spec.capital_phi_inv_with(t, self.config.truncation_exponent_range, 1e-10)?;
        let h_osc = if r > 0.0 { std::f64::consts::PI / (2.0 * r) } else { f64::INFINITY };
        let h = h_osc.min(decay_scale / 4.0).min(rho_max / 8.0);
        let n_panels = (rho_max / h).ceil() as usize;
        if n_panels > 400_000 {
            return Err(Error::non_convergence(
                "free_heat_kernel",
                format!(
                    "oscillatory tail too long: r/Phi^-1(t) = {:e} needs {n_panels} panels",
                    r / decay_scale
                ),
            ));
        }
        let integrand: Box<dyn Fn(f64) -> f64> = match self.d {
            1 => Box::new(move |rho: f64| (rho * r).cos() * weight(rho)),
            3 => {
                if r > 0.0 {
                    Box::new(move |rho: f64| rho * (rho * r).sin() * weight(rho))
                } else {
                    Box::new(move |rho: f64| rho * rho * weight(rho))
                }
            }
            _ => {
                let nu2 = self.d - 2; // 2ν with ν = d/2 − 1
                if r > 0.0 {
                    Box::new(move |rho: f64| rho.powf(d / 2.0) * bessel_j(nu2, rho * r) * weight(rho))
                } else {
                    Box::new(move |rho: f64| rho.powf(d - 1.0) * weight(rho))
                }
            }
        };
        let mut acc = 0.0;
        let mut lo = 0.0;
        for _ in 0..n_panels {
            let hi = (lo + h).min(rho_max);
            acc += gl16(&integrand, lo, hi);
            lo = hi;
            if lo >= rho_max {
                break;
            }
        }
        let value = match self.d {
            1 => acc / std::f64::consts::PI,
            3 => {
                if r > 0.0 {
                    acc / (2.0 * std::f64::consts::PI.powi(2) * r)
                } else {
                    acc / (2.0 * std::f64::consts::PI.powi(2))
                }
            }
            _ => {
                if r > 0.0 {
                    (2.0 * std::f64::consts::PI).powf(-d / 2.0) * r.powf(1.0 - d / 2.0) * acc
                } else {
                    let omega = 2.0 * std::f64::consts::PI.powf(d / 2.0) / gamma_half_int(self.d);
                    (2.0 * std::f64::consts::PI).powf(-d) * omega * acc
                }
            }
        };
        Ok(value.max(0.0))
    }

    /// Closed-form comparator for j: r^{-d} φ(r^{-2}).
    pub fn j_estimate(&self, r: f64) -> f64 {
        r.powf(-(self.d as f64)) * self.spec.phi_unchecked(r.powi(-2))
    }

    /// Closed-form comparator for g: r^{-d} φ(r^{-2})^{-1}.
    pub fn g_estimate(&self, r: f64) -> f64 {
        r.powf(-(self.d as f64)) / self.spec.phi_unchecked(r.powi(-2))
    }

    /// Free heat kernel comparator: Φ^{-1}(t)^{-d} ∧ t·j_estimate(r).
    pub fn p_estimate(&self, t: f64, r: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::domain("p_estimate", "t must be positive"));
        }
        let vol = self
            .spec
            .capital_phi_inv_with(t, self.config.truncation_exponent_range, 1e-10)?
            .powf(-(self.d as f64));
        if r <= 0.0 {
            return Ok(vol);
        }
        Ok(vol.min(t * self.j_estimate(r)))
    }

    /// Half-space heat kernel comparator: two boundary factors
    /// √(Φ(δ)/t) ∧ 1 times the free comparator.
    pub fn half_space_hk_estimate(&self, t: f64, x: &[f64], y: &[f64]) -> Result<f64> {
        let point = KernelPoint::new(self.d, Some(t), x.to_vec(), y.to_vec())?;
        let (dx, dy) = (point.delta_x(), point.delta_y());
        if !(dx > 0.0 && dy > 0.0) {
            return Err(Error::domain(
                "half_space_hk_estimate",
                "both points must lie inside the half-space (positive last coordinate)",
            ));
        }
        let bf = |delta: f64| -> Result<f64> {
            Ok((self.spec.capital_phi(delta)? / t).sqrt().min(1.0))
        };
        Ok(bf(dx)? * bf(dy)? * self.p_estimate(t, point.r())?)
    }

    /// Half-space Green comparator; regime selection is explicit and
    /// surfaced in the result.
    pub fn half_space_green_estimate(
        &self,
        cert: &crate::bernstein::ScalingCertificate,
        x: &[f64],
        y: &[f64],
    ) -> Result<GreenEstimate> {
        let point = KernelPoint::new(self.d, None, x.to_vec(), y.to_vec())?;
        let (dx, dy) = (point.delta_x(), point.delta_y());
        let r = point.r();
        if !(dx > 0.0 && dy > 0.0) {
            return Err(Error::domain(
                "half_space_green_estimate",
                "both points must lie inside the half-space",
            ));
        }
        if !(r > 0.0) {
            return Err(Error::domain("half_space_green_estimate", "x and y must differ"));
        }
        let d = self.d as f64;
        if d > cert.delta_combined_upper {
            let phi_r = self.spec.capital_phi(r)?;
            let clamp = |delta: f64| -> Result<f64> {
                Ok((self.spec.capital_phi(delta)? / phi_r).sqrt().min(1.0))
            };
            return Ok(GreenEstimate {
                value: phi_r / r.powf(d) * clamp(dx)? * clamp(dy)?,
                regime: GreenRegime::Bulk,
            });
        }
        if self.d == 1 && cert.delta_combined_lower > 0.5 {
            let p = (self.spec.capital_phi(dx)? * self.spec.capital_phi(dy)?).sqrt();
            let inv = self
                .spec
                .capital_phi_inv_with(p, self.config.truncation_exponent_range, 1e-10)?;
            return Ok(GreenEstimate {
                value: (p / inv).min(p / r),
                regime: GreenRegime::Line,
            });
        }
        Err(Error::RegimeUnavailable {
            message: format!(
                "two-sided Green comparator needs d > {:.3} (combined upper index) or d = 1 with \
                 combined lower index > 1/2 (got {:.3}); only the one-sided comparators apply",
                cert.delta_combined_upper, cert.delta_combined_lower
            ),
        })
    }

    /// One-sided upper Green comparator, valid when Φ(δx)Φ(δy) ≤ Φ(r)²:
    /// √(Φ(δx)Φ(δy)) / r^d.
    pub fn green_upper_comparator(&self, x: &[f64], y: &[f64]) -> Result<Option<f64>> {
        let point = KernelPoint::new(self.d, None, x.to_vec(), y.to_vec())?;
        let (dx, dy) = (point.delta_x(), point.delta_y());
        let r = point.r();
        let phi_r = self.spec.capital_phi(r)?;
        let px = self.spec.capital_phi(dx.max(f64::MIN_POSITIVE))?;
        let py = self.spec.capital_phi(dy.max(f64::MIN_POSITIVE))?;
        if px * py > phi_r * phi_r {
            return Ok(None);
        }
        Ok(Some((px * py).sqrt() / r.powf(self.d as f64)))
    }
}

/// Which branch of the half-space Green comparator was used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GreenRegime {
    /// d above the combined upper index: Φ(r)/r^d with boundary clamps.
    Bulk,
    /// d = 1 with combined lower index > 1/2.
    Line,
}

#[derive(Debug, Clone, Copy)]
pub struct GreenEstimate {
    pub value: f64,
    pub regime: GreenRegime,
}

/// Γ(d/2) for integer d ≥ 1.
fn gamma_half_int(d: u32) -> f64 {
    if d % 2 == 0 {
        // Γ(n) = (n−1)!
        (1..d / 2).map(|k| k as f64).product::<f64>().max(1.0)
    } else {
        // Γ(n + 1/2) = (2n)! √π / (4^n n!)
        let n = (d - 1) / 2;
        let fact = |k: u32| (1..=k).map(|v| v as f64).product::<f64>().max(1.0);
        fact(2 * n) * std::f64::consts::PI.sqrt() / (4f64.powi(n as i32) * fact(n))
    }
}

/// Result of the transience test at dimension d.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transience {
    Transient,
    Recurrent,
    /// d/2 sits inside the fitted index window and the integral trend is
    /// inconclusive.
    Borderline,
}

/// Integral test at zero: converges iff `∫₀¹ λ^{d/2-1}/φ(λ) dλ < ∞`,
/// decided from the fitted scaling indices at zero with a direct quadrature
/// trend confirmation in the indeterminate window.
pub fn check_transience(
    spec: &BernsteinSpec,
    d: u32,
    zero_cert: &SideCertificate,
) -> Result<Transience> {
    if zero_cert.side != ScalingSide::AtZero {
        return Err(Error::domain(
            "check_transience",
            "needs the at_zero scaling certificate",
        ));
    }
    let half_d = d as f64 / 2.0;
    const TOL: f64 = 0.02;
    if half_d > zero_cert.delta_upper + TOL {
        return Ok(Transience::Transient);
    }
    if half_d < zero_cert.delta_lower - TOL {
        return Ok(Transience::Recurrent);
    }
    // Indeterminate by indices: examine the growth of ∫_ε^1 as ε shrinks.
    // Geometrically shrinking two-decade increments mean convergence; flat
    // or growing increments mean divergence.
    let integrand = |l: f64| l.powf(half_d - 1.0) / spec.phi_unchecked(l);
    let mut increments = Vec::new();
    let mut hi = 1.0;
    for _ in 0..5 {
        let lo = hi * 1e-2;
        let mut piece = 0.0;
        let mut p_hi = hi;
        for _ in 0..8 {
            let p_lo = p_hi / (10f64).powf(0.25);
            piece += gl16(&integrand, p_lo, p_hi);
            p_hi = p_lo;
        }
        increments.push(piece);
        hi = lo;
    }
    let ratio = increments[4] / increments[3];
    if ratio < 0.9 {
        Ok(Transience::Transient)
    } else if ratio > 0.99 {
        Ok(Transience::Recurrent)
    } else {
        Ok(Transience::Borderline)
    }
}
