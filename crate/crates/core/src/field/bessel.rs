//! Modified Bessel functions K0, K1, K2 of a positive real argument,
//! needed for the massive-field position-space kernels.
//!
//! Branches: power series below z = 2, the integral representation
//! K_nu(z) = ∫ exp(-z cosh t) cosh(nu t) dt in the middle range, and the
//! large-z asymptotic expansion above z = 30 (where its optimal truncation
//! error is far below double precision).

use super::quad::gl_fixed;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// I0 and I1 by their power series (moderate z only).
fn i0_i1_series(z: f64) -> (f64, f64) {
    let q = 0.25 * z * z;
    let mut term = 1.0;
    let mut i0 = 1.0;
    let mut i1 = 0.5;
    let mut k = 1.0;
    loop {
        term *= q / (k * k);
        i0 += term;
        i1 += term / (2.0 * (k + 1.0));
        if term < 1e-18 * i0 {
            break;
        }
        k += 1.0;
    }
    (i0, i1 * z)
}

fn k0_k1_series(z: f64) -> (f64, f64) {
    let (i0, i1) = i0_i1_series(z);
    let lg = (0.5 * z).ln() + EULER_GAMMA;
    let q = 0.25 * z * z;

    // K0 = -(ln(z/2) + gamma) I0 + sum_{k>=1} q^k/(k!)^2 H_k
    let mut term = 1.0;
    let mut hk = 0.0;
    let mut sum0 = 0.0;
    let mut k = 1.0;
    loop {
        term *= q / (k * k);
        hk += 1.0 / k;
        sum0 += term * hk;
        if term * hk < 1e-18 * (sum0.abs() + 1.0) {
            break;
        }
        k += 1.0;
    }
    let k0 = -lg * i0 + sum0;

    // K1 = 1/z + (ln(z/2) + gamma) I1
    //      - (z/4) sum_{k>=0} q^k/(k!(k+1)!) (H_k + H_{k+1})
    let mut term = 1.0;
    let mut hk = 0.0;
    let mut hk1 = 1.0;
    let mut sum1 = term * (hk + hk1);
    let mut kk = 1.0;
    loop {
        term *= q / (kk * (kk + 1.0));
        hk += 1.0 / kk;
        hk1 += 1.0 / (kk + 1.0);
        let add = term * (hk + hk1);
        sum1 += add;
        if add < 1e-18 * (sum1.abs() + 1.0) {
            break;
        }
        kk += 1.0;
    }
    let k1 = 1.0 / z + lg * i1 - 0.25 * z * sum1;
    (k0, k1)
}

/// K_nu(z) = ∫_0^∞ exp(-z cosh t) cosh(nu t) dt by composite quadrature;
/// the integrand is analytic and decays double-exponentially.
fn k_integral(nu: f64, z: f64) -> f64 {
    // beyond z cosh(t) ~ 750 the integrand underflows
    let t_max = (750.0 / z).acosh().clamp(1.0, 12.0);
    let f = |t: f64| (-z * t.cosh()).exp() * (nu * t).cosh();
    let panels = 10;
    let mut total = 0.0;
    for i in 0..panels {
        let a = t_max * i as f64 / panels as f64;
        let b = t_max * (i + 1) as f64 / panels as f64;
        total += gl_fixed(&f, a, b, 64);
    }
    total
}

/// Asymptotic expansion K_nu(z) ~ sqrt(pi/2z) e^{-z} sum_k a_k(nu)/z^k,
/// truncated at the smallest term.
fn k_asymptotic(nu: f64, z: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..40 {
        let kf = k as f64;
        term *= (mu - (2.0 * kf - 1.0).powi(2)) / (8.0 * z * kf);
        if term.abs() > prev {
            break;
        }
        sum += term;
        prev = term.abs();
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    (std::f64::consts::FRAC_PI_2 / z).sqrt() * (-z).exp() * sum
}

fn k_nu(nu: f64, z: f64) -> f64 {
    assert!(z > 0.0, "K_nu needs z > 0");
    if z < 2.0 {
        match nu as usize {
            0 => k0_k1_series(z).0,
            _ => k0_k1_series(z).1,
        }
    } else if z <= 30.0 {
        k_integral(nu, z)
    } else {
        k_asymptotic(nu, z)
    }
}

pub fn k0(z: f64) -> f64 {
    k_nu(0.0, z)
}

pub fn k1(z: f64) -> f64 {
    k_nu(1.0, z)
}

/// K2 via the recurrence K2 = K0 + 2 K1 / z.
pub fn k2(z: f64) -> f64 {
    k0(z) + 2.0 * k1(z) / z
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_reference_values_at_one() {
        // high-confidence tabulated values
        assert!((k0(1.0) - 0.421_024_438_240_708).abs() < 1e-13);
        assert!((k1(1.0) - 0.601_907_230_197_235).abs() < 1e-13);
    }

    #[test]
    fn series_branch_agrees_with_integral_representation() {
        for z in [0.05, 0.3, 0.9, 1.5, 1.99] {
            let (s0, s1) = k0_k1_series(z);
            let (q0, q1) = (k_integral(0.0, z), k_integral(1.0, z));
            assert!((s0 - q0).abs() / q0 < 1e-12, "K0({z}): {s0} vs {q0}");
            assert!((s1 - q1).abs() / q1 < 1e-12, "K1({z}): {s1} vs {q1}");
        }
    }

    #[test]
    fn asymptotic_branch_agrees_with_integral_representation() {
        for z in [25.0, 30.0, 35.0, 60.0] {
            let a0 = k_asymptotic(0.0, z);
            let q0 = k_integral(0.0, z);
            assert!((a0 - q0).abs() / q0 < 1e-12, "K0({z}): {a0} vs {q0}");
            let a1 = k_asymptotic(1.0, z);
            let q1 = k_integral(1.0, z);
            assert!((a1 - q1).abs() / q1 < 1e-12, "K1({z}): {a1} vs {q1}");
        }
    }

    #[test]
    fn branches_agree_at_the_crossover_points() {
        // both branch implementations evaluated at the same z
        let (s0, s1) = k0_k1_series(2.0);
        assert!((s0 - k_integral(0.0, 2.0)).abs() / s0 < 1e-12);
        assert!((s1 - k_integral(1.0, 2.0)).abs() / s1 < 1e-12);
        let q0 = k_integral(0.0, 30.0);
        assert!((q0 - k_asymptotic(0.0, 30.0)).abs() / q0 < 1e-12);
        let q1 = k_integral(1.0, 30.0);
        assert!((q1 - k_asymptotic(1.0, 30.0)).abs() / q1 < 1e-12);
    }

    #[test]
    fn k2_recurrence_and_small_z_limit() {
        // K2(z) -> 2/z^2 as z -> 0
        let z = 1e-3;
        assert!((k2(z) * z * z / 2.0 - 1.0).abs() < 1e-5);
        // K2 = K0 + 2 K1/z against the integral representation of K2
        for z in [0.8, 3.0, 8.0] {
            let direct = k_integral(2.0, z);
            assert!((k2(z) - direct).abs() / direct < 1e-11, "K2({z})");
        }
    }

    #[test]
    fn derivative_identity_k0p_eq_minus_k1() {
        for z in [0.7, 2.5, 6.0, 40.0] {
            let h = 1e-5 * z;
            let d = (k0(z + h) - k0(z - h)) / (2.0 * h);
            assert!((d + k1(z)).abs() < 1e-6 * k1(z).max(1e-10), "z={z}");
        }
    }
}
