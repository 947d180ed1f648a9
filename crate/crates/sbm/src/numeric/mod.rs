//! Shared numerical routines: Gauss–Legendre panels, integrators for
//! decaying/singular integrands, monotone root bracketing, and small
//! least-squares helpers.

pub mod bessel;
pub mod interp;

use crate::error::{Error, Result};
use std::sync::OnceLock;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, computed once by Newton
/// iteration on the Legendre recurrence (accurate to ~1e-15).
pub fn gauss_legendre(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static TABLE16: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    static TABLE32: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    match n {
        16 => TABLE16.get_or_init(|| compute_gauss_legendre(16)),
        32 => TABLE32.get_or_init(|| compute_gauss_legendre(32)),
        _ => panic!("only 16- and 32-point rules are cached"),
    }
}

fn compute_gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Chebyshev-based initial guess for the i-th root of P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Value and derivative of the Legendre polynomial `P_n` at `x`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// 16-point Gauss–Legendre quadrature of `f` over `[a, b]`.
pub fn gl16<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let (nodes, weights) = gauss_legendre(16);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Adaptive bisection quadrature over a finite interval.
///
/// Refines panels until the GL16 estimate of a panel agrees with the sum of
/// its halves to `rel_tol` of the running total (or `max_depth` is reached).
pub fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_depth: u32,
) -> Result<f64> {
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        floor: f64,
        depth: u32,
    ) -> Result<f64> {
        let mid = 0.5 * (a + b);
        let left = gl16(f, a, mid);
        let right = gl16(f, mid, b);
        let diff = (left + right - whole).abs();
        if diff <= tol.max(floor) || depth == 0 {
            if depth == 0 && diff > 64.0 * tol.max(floor) {
                return Err(Error::non_convergence(
                    "adaptive_quadrature",
                    format!("panel [{a}, {b}] did not converge (residual {diff:e})"),
                ));
            }
            return Ok(left + right);
        }
        Ok(
            recurse(f, a, mid, left, (0.5 * tol).max(floor), floor, depth - 1)?
                + recurse(f, mid, b, right, (0.5 * tol).max(floor), floor, depth - 1)?,
        )
    }
    let whole = gl16(f, a, b);
    let tol = abs_tol.max(rel_tol * whole.abs());
    // Noise floor: integrands built on inverted transforms carry relative
    // jitter well above machine epsilon, which must not trigger endless
    // refinement.
    let floor = 1e-13 * whole.abs();
    recurse(f, a, b, whole, tol, floor, max_depth)
}

/// Integral of `f` over `(0, b]` where `f` may be integrably singular at 0.
///
/// Dyadic panels `[b/2^{k+1}, b/2^k]` accumulated until a panel falls below
/// `rel_tol` of the running sum, each panel evaluated with GL16.
pub fn integrate_to_zero<F: Fn(f64) -> f64>(f: &F, b: f64, rel_tol: f64, max_levels: u32) -> f64 {
    let mut acc = 0.0;
    let mut hi = b;
    let mut small_run = 0;
    for _ in 0..max_levels {
        let lo = 0.5 * hi;
        let panel = gl16(f, lo, hi);
        acc += panel;
        if panel.abs() <= rel_tol * acc.abs() {
            small_run += 1;
            if small_run >= 3 {
                break;
            }
        } else {
            small_run = 0;
        }
        hi = lo;
    }
    acc
}

/// Integral of `f` over `[a, ∞)` for an eventually decaying integrand.
///
/// Doubling panels `[a 2^k, a 2^{k+1}]`; stops after three consecutive
/// panels below `rel_tol` of the running sum.
pub fn integrate_to_inf<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    rel_tol: f64,
    max_panels: u32,
) -> Result<f64> {
    let mut acc = 0.0;
    let mut lo = a;
    let mut small_run = 0;
    for _ in 0..max_panels {
        let hi = 2.0 * lo;
        let panel = gl16(f, lo, hi);
        acc += panel;
        if panel.abs() <= rel_tol * acc.abs().max(f64::MIN_POSITIVE) {
            small_run += 1;
            if small_run >= 3 {
                return Ok(acc);
            }
        } else {
            small_run = 0;
        }
        lo = hi;
    }
    Err(Error::non_convergence(
        "integrate_to_inf",
        format!("tail did not decay after {max_panels} doubling panels from {a}"),
    ))
}

/// Solve `f(x) = target` for strictly increasing `f` on a log-spaced bracket.
///
/// Brackets by scanning powers of ten in `exponent_range`, then runs
/// bisection with a secant acceleration step until the relative residual
/// drops below `rel_tol`.
pub fn solve_monotone<F: Fn(f64) -> f64>(
    f: &F,
    target: f64,
    exponent_range: (f64, f64),
    rel_tol: f64,
) -> Result<f64> {
    let (e_lo, e_hi) = exponent_range;
    let mut lo = 10f64.powf(e_lo);
    let mut hi = 10f64.powf(e_hi);
    if f(lo) > target || f(hi) < target {
        return Err(Error::non_convergence(
            "solve_monotone",
            format!("target {target:e} not bracketed in 10^[{e_lo}, {e_hi}]"),
        ));
    }
    // Coarse decade scan narrows the bracket before bisection.
    let mut e = e_lo;
    while e + 1.0 <= e_hi {
        let x = 10f64.powf(e + 1.0);
        if f(x) >= target {
            lo = 10f64.powf(e);
            hi = x;
            break;
        }
        e += 1.0;
    }
    let mut f_lo = f(lo);
    let mut f_hi = f(hi);
    let mut best = 0.5 * (lo + hi);
    for iter in 0..400 {
        // Alternate a log-space secant proposal with plain bisection so the
        // bracket always shrinks geometrically.
        let (llo, lhi) = (lo.ln(), hi.ln());
        let mut m = if iter % 2 == 0 && (f_hi - f_lo).abs() > 0.0 {
            llo + (lhi - llo) * (target - f_lo) / (f_hi - f_lo)
        } else {
            0.5 * (llo + lhi)
        };
        if !(m > llo && m < lhi) {
            m = 0.5 * (llo + lhi);
        }
        let x = m.exp();
        let fx = f(x);
        best = x;
        if ((fx - target) / target).abs() <= rel_tol || (hi - lo) <= rel_tol * lo {
            return Ok(x);
        }
        if fx < target {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
            f_hi = fx;
        }
    }
    Ok(best)
}

/// Least-squares slope and intercept of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

/// Log-spaced grid with `points_per_decade` samples per decade of `[lo, hi]`,
/// endpoints included.
pub fn log_grid(lo: f64, hi: f64, points_per_decade: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo);
    let decades = (hi / lo).log10();
    let n = ((decades * points_per_decade as f64).round() as usize).max(1);
    (0..=n)
        .map(|i| lo * 10f64.powf(decades * i as f64 / n as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gl16_is_exact_for_low_degree_polynomials() {
        // degree 31 and below is exact for a 16-point rule
        let f = |x: f64| 3.0 * x * x + 2.0 * x + 1.0;
        assert_relative_eq!(gl16(&f, 0.0, 2.0), 14.0, max_relative = 1e-14);
    }

    #[test]
    fn adaptive_integrates_gaussian() {
        let f = |x: f64| (-x * x).exp();
        let v = adaptive(&f, -8.0, 8.0, 1e-12, 1e-300, 30).unwrap();
        assert_relative_eq!(v, std::f64::consts::PI.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn singular_and_tail_integrators() {
        // ∫_0^1 x^{-1/2} dx = 2
        let v = integrate_to_zero(&|x: f64| x.powf(-0.5), 1.0, 1e-12, 200);
        assert_relative_eq!(v, 2.0, max_relative = 1e-10);
        // ∫_1^∞ x^{-2} dx = 1
        let v = integrate_to_inf(&|x: f64| x.powi(-2), 1.0, 1e-13, 300).unwrap();
        assert_relative_eq!(v, 1.0, max_relative = 1e-10);
    }

    #[test]
    fn monotone_solver_inverts_cube() {
        let f = |x: f64| x * x * x;
        let x = solve_monotone(&f, 27.0, (-6.0, 6.0), 1e-12).unwrap();
        assert_relative_eq!(x, 3.0, max_relative = 1e-10);
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(1e-3, 1e3, 8);
        assert_eq!(g.len(), 49);
        assert_relative_eq!(g[0], 1e-3, max_relative = 1e-12);
        assert_relative_eq!(*g.last().unwrap(), 1e3, max_relative = 1e-12);
    }
}
