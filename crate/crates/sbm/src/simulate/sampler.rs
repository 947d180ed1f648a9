//! Subordinator increment sampling. Four strategies, picked per family:
//! exact positive-stable draws (Kanter's representation) for pure powers,
//! sums of scaled stable draws when the Laplace exponent is a mixture of
//! powers, and two general-purpose fallbacks — a tabulated inverse CDF of
//! the increment law at fixed step resolution, and a compound-Poisson
//! decomposition with the small jumps replaced by their mean.

use crate::bernstein::{BernsteinSpec, Family};
use crate::error::{Error, Result};
use crate::laplace::{invert_cm, levy_tail, CmFunctionHandle, QuadratureConfig};
use crate::numeric::{gl16, log_grid};
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use std::sync::Arc;

/// One positive ρ-stable draw with E e^{−λS} = e^{−λ^ρ} (Kanter).
pub fn sample_positive_stable<R: Rng>(rho: f64, rng: &mut R) -> f64 {
    let u = rng.random::<f64>().clamp(1e-15, 1.0 - 1e-15) * std::f64::consts::PI;
    let w = -(rng.random::<f64>().clamp(1e-300, 1.0)).ln();
    (rho * u).sin()
        * u.sin().powf(-1.0 / rho)
        * (((1.0 - rho) * u).sin() / w).powf((1.0 - rho) / rho)
}

/// Tabulated inverse CDF of the increment law S_dt at one fixed step.
#[derive(Debug, Clone)]
pub struct IncrementTable {
    pub dt: f64,
    x: Vec<f64>,
    cdf: Vec<f64>,
    /// power-law tail exponent for draws beyond the table
    tail_exponent: f64,
}

impl IncrementTable {
    /// Build by inverting the transform of the CDF, e^{−dt φ(λ)}/λ, on a
    /// log grid covering quantiles ~1e-6 to 1−1e-7.
    pub fn build(spec: &BernsteinSpec, dt: f64, config: &QuadratureConfig) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::domain("increment_table", "dt must be positive"));
        }
        let s = spec.clone();
        let handle = CmFunctionHandle::new(
            format!("cdf[S_dt, {}]", spec.label()),
            Arc::new(move |l: f64| (-dt * s.phi_unchecked(l)).exp() / l),
            None,
        );
        let cdf_at = |x: f64| -> Result<f64> {
            Ok(invert_cm(&handle, x, config)?.clamp(0.0, 1.0))
        };
        // typical increment scale: 1/λ* with dt·φ(λ*) = 1
        let lambda_star = crate::numeric::solve_monotone(
            &|l: f64| spec.phi_unchecked(l),
            1.0 / dt,
            config.truncation_exponent_range,
            1e-9,
        )?;
        let x0 = 1.0 / lambda_star;
        let mut x_lo = x0;
        for _ in 0..80 {
            if cdf_at(x_lo)? < 1e-6 || x_lo < 1e-12 {
                break;
            }
            x_lo *= 0.5;
        }
        let mut x_hi = x0;
        for _ in 0..80 {
            if cdf_at(x_hi)? > 1.0 - 1e-7 || x_hi > 1e12 {
                break;
            }
            x_hi *= 2.0;
        }
        let grid = log_grid(x_lo, x_hi, (512.0 / (x_hi / x_lo).log10()).ceil() as usize);
        let mut x = Vec::with_capacity(grid.len());
        let mut cdf = Vec::with_capacity(grid.len());
        let mut prev = 0.0f64;
        for &xi in &grid {
            let f = cdf_at(xi)?.max(prev); // enforce monotonicity against jitter
            x.push(xi);
            cdf.push(f);
            prev = f;
        }
        // tail exponent: slope of ln(1−F) against ln x at the top
        let k = x.len().saturating_sub(24);
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for i in k..x.len() {
            if cdf[i] < 1.0 {
                xs.push(x[i].ln());
                ys.push((1.0 - cdf[i]).max(1e-300).ln());
            }
        }
        let (slope, _) = crate::numeric::linear_fit(&xs, &ys);
        let tail_exponent = (-slope).clamp(0.05, 2.0);
        Ok(IncrementTable {
            dt,
            x,
            cdf,
            tail_exponent,
        })
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        let u = rng.random::<f64>();
        let f_max = *self.cdf.last().unwrap();
        if u >= f_max {
            // Pareto extension beyond the table
            let x_max = *self.x.last().unwrap();
            return x_max * ((1.0 - f_max) / (1.0 - u)).powf(1.0 / self.tail_exponent);
        }
        let f_min = self.cdf[0];
        if u <= f_min {
            return self.x[0] * u / f_min.max(1e-300);
        }
        let i = match self
            .cdf
            .binary_search_by(|v| v.partial_cmp(&u).expect("finite"))
        {
            Ok(i) => return self.x[i],
            Err(i) => i, // cdf[i-1] < u < cdf[i]
        };
        let (f0, f1) = (self.cdf[i - 1], self.cdf[i]);
        let w = if f1 > f0 { (u - f0) / (f1 - f0) } else { 0.5 };
        // log-linear in x between knots
        (self.x[i - 1].ln() + w * (self.x[i] / self.x[i - 1]).ln()).exp()
    }
}

/// Compound-Poisson decomposition at a jump-size cutoff: jumps above the
/// cutoff are sampled from the normalized tail, jumps below it contribute
/// their mean as deterministic drift.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub cutoff: f64,
    pub rate: f64,
    pub drift: f64,
    jump_x: Vec<f64>,
    jump_cdf: Vec<f64>,
    tail_exponent: f64,
}

impl Decomposition {
    pub fn build(spec: &BernsteinSpec, cutoff: f64, config: &QuadratureConfig) -> Result<Self> {
        if !(cutoff > 0.0) {
            return Err(Error::domain("decomposition", "cutoff must be positive"));
        }
        let rate = levy_tail(spec, cutoff, config)?.value;
        // drift = ∫₀^ε s μ(s) ds, via the inverted t·μ(t) transform on
        // dyadic panels (integrand ~ s^{-ρ}, integrable)
        let handle = crate::laplace::levy_transform(spec);
        let t_mu = |s: f64| {
            invert_cm(&handle, s.max(crate::laplace::T_DOMAIN.0), config).unwrap_or(0.0)
        };
        let drift = crate::numeric::integrate_to_zero(&t_mu, cutoff, 1e-9, 50);
        // jump CDF on [ε, ∞): G(x) = 1 − tail(x)/tail(ε)
        let mut x_hi = cutoff;
        for _ in 0..80 {
            let tail = levy_tail(spec, x_hi, config)?.value;
            if tail / rate < 1e-7 || x_hi > 1e12 {
                break;
            }
            x_hi *= 2.0;
        }
        let grid = log_grid(
            cutoff,
            x_hi,
            (512.0 / (x_hi / cutoff).log10()).ceil() as usize,
        );
        let mut jump_x = Vec::with_capacity(grid.len());
        let mut jump_cdf = Vec::with_capacity(grid.len());
        let mut prev = 0.0f64;
        for &xi in &grid {
            let g = (1.0 - levy_tail(spec, xi, config)?.value / rate).clamp(0.0, 1.0);
            let g = g.max(prev);
            jump_x.push(xi);
            jump_cdf.push(g);
            prev = g;
        }
        let k = jump_x.len().saturating_sub(24);
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for i in k..jump_x.len() {
            if jump_cdf[i] < 1.0 {
                xs.push(jump_x[i].ln());
                ys.push((1.0 - jump_cdf[i]).max(1e-300).ln());
            }
        }
        let (slope, _) = crate::numeric::linear_fit(&xs, &ys);
        Ok(Decomposition {
            cutoff,
            rate,
            drift,
            jump_x,
            jump_cdf,
            tail_exponent: (-slope).clamp(0.05, 2.0),
        })
    }

    fn draw_jump<R: Rng>(&self, rng: &mut R) -> f64 {
        let u = rng.random::<f64>();
        let f_max = *self.jump_cdf.last().unwrap();
        if u >= f_max {
            let x_max = *self.jump_x.last().unwrap();
            return x_max * ((1.0 - f_max) / (1.0 - u)).powf(1.0 / self.tail_exponent);
        }
        let i = match self
            .jump_cdf
            .binary_search_by(|v| v.partial_cmp(&u).expect("finite"))
        {
            Ok(i) => return self.jump_x[i],
            Err(0) => return self.jump_x[0],
            Err(i) => i,
        };
        let (f0, f1) = (self.jump_cdf[i - 1], self.jump_cdf[i]);
        let w = if f1 > f0 { (u - f0) / (f1 - f0) } else { 0.5 };
        (self.jump_x[i - 1].ln() + w * (self.jump_x[i] / self.jump_x[i - 1]).ln()).exp()
    }
}

#[derive(Debug, Clone)]
pub enum Strategy {
    /// Exact Kanter draws scaled by dt^{1/ρ}.
    StableClosedForm { rho: f64 },
    /// Independent scaled stable draws summed: φ = Σ wᵢ λ^{ρᵢ}.
    StableMixture {
        weights: Vec<f64>,
        exponents: Vec<f64>,
    },
    /// Inverse CDF of the increment law at fixed step resolution(s).
    TabulatedInverseCdf { tables: Vec<IncrementTable> },
    /// Compound Poisson above a cutoff plus small-jump drift.
    GeneralDecomposition(Decomposition),
}

/// Increment sampler for the subordinator attached to one spec.
#[derive(Debug, Clone)]
pub struct SubordinatorSampler {
    pub label: String,
    strategy: Strategy,
}

impl SubordinatorSampler {
    pub fn stable(rho: f64) -> Result<Self> {
        if !(0.0 < rho && rho < 1.0) {
            return Err(Error::domain("sampler", "stable index must be in (0,1)"));
        }
        Ok(SubordinatorSampler {
            label: format!("stable({rho})"),
            strategy: Strategy::StableClosedForm { rho },
        })
    }

    pub fn mixture(weights: Vec<f64>, exponents: Vec<f64>) -> Result<Self> {
        if weights.len() != exponents.len()
            || weights.iter().any(|&w| w <= 0.0)
            || exponents.iter().any(|&e| !(0.0 < e && e < 1.0))
        {
            return Err(Error::domain(
                "sampler",
                "mixture needs positive weights and exponents in (0,1)",
            ));
        }
        Ok(SubordinatorSampler {
            label: format!("mixture({weights:?}, {exponents:?})"),
            strategy: Strategy::StableMixture { weights, exponents },
        })
    }

    pub fn tabulated(spec: &BernsteinSpec, dts: &[f64], config: &QuadratureConfig) -> Result<Self> {
        let tables = dts
            .iter()
            .map(|&dt| IncrementTable::build(spec, dt, config))
            .collect::<Result<Vec<_>>>()?;
        Ok(SubordinatorSampler {
            label: format!("tabulated[{}]", spec.label()),
            strategy: Strategy::TabulatedInverseCdf { tables },
        })
    }

    pub fn decomposition(
        spec: &BernsteinSpec,
        cutoff: f64,
        config: &QuadratureConfig,
    ) -> Result<Self> {
        Ok(SubordinatorSampler {
            label: format!("decomposition[{}, eps={cutoff}]", spec.label()),
            strategy: Strategy::GeneralDecomposition(Decomposition::build(spec, cutoff, config)?),
        })
    }

    /// Family dispatch: exact stable structure where the Laplace exponent
    /// admits one, tabulated inversion otherwise. `dts` lists every step
    /// resolution the run will use (a no-op for the closed-form samplers).
    pub fn auto(spec: &BernsteinSpec, dts: &[f64], config: &QuadratureConfig) -> Result<Self> {
        match spec.family() {
            Family::PurePower { alpha } => Self::stable(alpha / 2.0),
            Family::SumOfPowers { alpha, beta } => {
                // normalized: φ = (λ^α + λ^β)/2
                Self::mixture(vec![0.5, 0.5], vec![*alpha, *beta])
            }
            _ => Self::tabulated(spec, dts, config),
        }
    }

    /// One increment of S over a step of length dt.
    pub fn sample_increment<R: Rng>(&self, dt: f64, rng: &mut R) -> Result<f64> {
        if !(dt > 0.0) {
            return Err(Error::domain("sample_increment", "dt must be positive"));
        }
        match &self.strategy {
            Strategy::StableClosedForm { rho } => {
                Ok(dt.powf(1.0 / rho) * sample_positive_stable(*rho, rng))
            }
            Strategy::StableMixture { weights, exponents } => {
                let mut acc = 0.0;
                for (w, rho) in weights.iter().zip(exponents) {
                    acc += (w * dt).powf(1.0 / rho) * sample_positive_stable(*rho, rng);
                }
                Ok(acc)
            }
            Strategy::TabulatedInverseCdf { tables } => {
                let table = tables
                    .iter()
                    .find(|t| ((t.dt - dt) / dt).abs() < 1e-9)
                    .ok_or_else(|| {
                        Error::precondition(
                            "sample_increment",
                            format!(
                                "no increment table at dt={dt:e}; tabulated resolutions: {:?}",
                                tables.iter().map(|t| t.dt).collect::<Vec<_>>()
                            ),
                        )
                    })?;
                Ok(table.draw(rng))
            }
            Strategy::GeneralDecomposition(dec) => {
                let n = Poisson::new(dec.rate * dt)
                    .map_err(|e| Error::domain("sample_increment", e.to_string()))?
                    .sample(rng) as u64;
                let mut acc = dec.drift * dt;
                for _ in 0..n {
                    acc += dec.draw_jump(rng);
                }
                Ok(acc)
            }
        }
    }
}

/// ∫₀^ε s μ(s) ds + ε μ(ε, ∞) should equal ∫ (s ∧ ε) μ(ds); cheap
/// consistency scale for choosing decomposition cutoffs.
pub fn small_jump_mean(spec: &BernsteinSpec, cutoff: f64, config: &QuadratureConfig) -> f64 {
    let handle = crate::laplace::levy_transform(spec);
    let t_mu =
        |s: f64| invert_cm(&handle, s.max(crate::laplace::T_DOMAIN.0), config).unwrap_or(0.0);
    gl16(&t_mu, cutoff * 1e-6, cutoff)
}
