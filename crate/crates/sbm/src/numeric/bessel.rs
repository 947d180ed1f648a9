//! Bessel functions `J_ν` for integer and half-integer order, via Miller's
//! downward recurrence. Orders stay small here (ν = d/2 − 1 for spatial
//! dimension d), so no asymptotic machinery is needed.

/// `J_ν(x)` for `2ν = two_nu` (nonnegative), `x ≥ 0`.
pub fn bessel_j(two_nu: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if two_nu == 0 { 1.0 } else { 0.0 };
    }
    if two_nu % 2 == 0 {
        bessel_j_int(two_nu / 2, x)
    } else {
        bessel_j_half(two_nu, x)
    }
}

/// Integer order by downward recurrence, normalized with
/// `J_0 + 2 Σ_{k≥1} J_{2k} = 1`.
fn bessel_j_int(n: u32, x: f64) -> f64 {
    let start = ((n as f64).max(x) as u32 + 24) & !1; // even start order
    let mut jp = 0.0f64;
    let mut jc = 1e-300;
    let mut norm = 0.0;
    let mut result = 0.0;
    for k in (0..=start).rev() {
        let jm = (2.0 * (k as f64 + 1.0) / x) * jc - jp;
        jp = jc;
        jc = jm;
        // jc now holds J_k (unnormalized)
        if k == n {
            result = jc;
        }
        if k % 2 == 0 {
            norm += if k == 0 { jc } else { 2.0 * jc };
        }
        // Rescale to avoid overflow during the recurrence.
        if jc.abs() > 1e250 {
            jp /= 1e250;
            jc /= 1e250;
            norm /= 1e250;
            result /= 1e250;
        }
    }
    result / norm
}

/// Half-integer order: downward recurrence anchored at the closed forms
/// `J_{1/2}` and `J_{3/2}` (whichever is farther from a zero).
fn bessel_j_half(two_nu: u32, x: f64) -> f64 {
    let pref = (2.0 / (std::f64::consts::PI * x)).sqrt();
    let j_half = pref * x.sin();
    let j_3half = pref * (x.sin() / x - x.cos());
    match two_nu {
        1 => return j_half,
        3 => return j_3half,
        _ => {}
    }
    let n_steps = (two_nu - 1) / 2; // index of target above 1/2
    let start = n_steps + ((x as u32).max(n_steps)) + 24;
    let mut jp = 0.0f64;
    let mut jc = 1e-300;
    let mut at_target = 0.0;
    let mut at_half = 0.0;
    let mut at_3half = 0.0;
    for k in (0..=start).rev() {
        // order ν = k + 1/2
        let nu = k as f64 + 0.5;
        let jm = (2.0 * (nu + 1.0) / x) * jc - jp;
        jp = jc;
        jc = jm;
        if k == n_steps {
            at_target = jc;
        }
        if k == 1 {
            at_3half = jc;
        }
        if k == 0 {
            at_half = jc;
        }
        if jc.abs() > 1e250 {
            jp /= 1e250;
            jc /= 1e250;
            at_target /= 1e250;
            at_half /= 1e250;
            at_3half /= 1e250;
        }
    }
    if j_half.abs() >= j_3half.abs() {
        at_target * (j_half / at_half)
    } else {
        at_target * (j_3half / at_3half)
    }
}
