//! Quadrature kernels for the radial momentum integrals: composite
//! Gauss-Kronrod G7K15 panels sized to the oscillation scale, plus fixed
//! Gauss-Legendre rules for smooth compact integrands.

/// G7K15 nodes and weights (positive half; the rule is symmetric).
/// Standard QUADPACK values.
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// One G7K15 panel: returns (kronrod, |kronrod - gauss|).
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, &x) in XGK.iter().enumerate().take(7) {
        let dx = h * x;
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        kronrod += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Composite G7K15 over [a, b] with panels no wider than `max_width`.
/// Returns (value, summed error estimate, panel count).
pub fn composite_gk<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, max_width: f64) -> (f64, f64, usize) {
    assert!(b > a);
    let n = ((b - a) / max_width).ceil().max(1.0) as usize;
    let h = (b - a) / n as f64;
    let mut sum = 0.0;
    let mut err = 0.0;
    for i in 0..n {
        let (v, e) = gk15(f, a + i as f64 * h, a + (i + 1) as f64 * h);
        sum += v;
        err += e;
    }
    (sum, err, n)
}

/// Composite rule with one halving pass when the error estimate misses the
/// target. Returns (value, error estimate, panels).
pub fn composite_gk_refined<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    max_width: f64,
    target: f64,
) -> (f64, f64, usize) {
    let (v, e, n) = composite_gk(f, a, b, max_width);
    if e <= target {
        return (v, e, n);
    }
    let (v2, e2, n2) = composite_gk(f, a, b, max_width * 0.5);
    // the change between refinements is itself an error estimate
    let diff = (v2 - v).abs();
    (v2, e2.min(diff.max(f64::MIN_POSITIVE)), n + n2)
}

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1],
/// computed by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-like initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0f64, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Fixed Gauss-Legendre integration of a smooth function on [a, b].
pub fn gl_fixed<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, n: usize) -> f64 {
    let (x, w) = cached_gl(n);
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    x.iter()
        .zip(w.iter())
        .map(|(&xi, &wi)| wi * f(c + h * xi))
        .sum::<f64>()
        * h
}

/// Composite Gauss-Legendre with panel widths shrinking geometrically
/// toward one endpoint (for integrands peaked or weakly singular at or
/// just past it). The panel adjacent to the graded endpoint has width
/// (b - a) 2^-levels, so even an integrable endpoint singularity
/// contributes a controlled remainder there.
pub fn gl_graded<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    n: usize,
    levels: usize,
    toward_b: bool,
) -> f64 {
    let w0 = b - a;
    let mut total = 0.0;
    if toward_b {
        // panels [b - w, b - w/2] with w halving toward b
        let mut w = w0;
        for _ in 0..levels {
            total += gl_fixed(f, b - w, b - 0.5 * w, n);
            w *= 0.5;
        }
        total + gl_fixed(f, b - w, b, n)
    } else {
        let mut w = w0;
        for _ in 0..levels {
            total += gl_fixed(f, a + 0.5 * w, a + w, n);
            w *= 0.5;
        }
        total + gl_fixed(f, a, a + w, n)
    }
}

fn cached_gl(n: usize) -> (&'static Vec<f64>, &'static Vec<f64>) {
    use std::sync::OnceLock;
    static GL32: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    static GL64: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    static GL128: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    match n {
        32 => {
            let v = GL32.get_or_init(|| gauss_legendre(32));
            (&v.0, &v.1)
        }
        64 => {
            let v = GL64.get_or_init(|| gauss_legendre(64));
            (&v.0, &v.1)
        }
        128 => {
            let v = GL128.get_or_init(|| gauss_legendre(128));
            (&v.0, &v.1)
        }
        other => panic!("uncached Gauss-Legendre order {other}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gk15_is_exact_on_low_degree_polynomials() {
        let f = |x: f64| 3.0 * x * x * x * x - 2.0 * x + 1.0;
        let (v, e) = gk15(&f, -1.0, 2.0);
        // exact: 3/5 x^5 - x^2 + x over [-1, 2]
        let exact = (0.6 * 32.0 - 4.0 + 2.0) - (-0.6 - 1.0 - 1.0);
        assert!((v - exact).abs() < 1e-13);
        assert!(e < 1e-12);
    }

    #[test]
    fn composite_handles_oscillation() {
        // int_0^20 sin(7x) dx = (1 - cos(140))/7
        let f = |x: f64| (7.0 * x).sin();
        let (v, e, n) = composite_gk(&f, 0.0, 20.0, 0.4);
        let exact = (1.0 - 140.0f64.cos()) / 7.0;
        assert!((v - exact).abs() < 1e-12, "err {}", (v - exact).abs());
        assert!(e < 1e-9);
        assert!(n >= 50);
    }

    #[test]
    fn refinement_tightens_the_estimate() {
        let f = |x: f64| (40.0 * x).cos() / (1.0 + x * x);
        let (v1, _, _) = composite_gk(&f, 0.0, 10.0, 0.5);
        let (v2, e2, _) = composite_gk_refined(&f, 0.0, 10.0, 0.5, 1e-14);
        assert!((v1 - v2).abs() < 1e-10);
        assert!(e2 <= 1e-10);
    }

    #[test]
    fn gauss_legendre_romberg_consistency() {
        // smooth gaussian integrand against a known value
        let f = |x: f64| (-x * x).exp();
        let v = gl_fixed(&f, 0.0, 1.0, 64);
        // erf(1) * sqrt(pi)/2
        let exact = 0.746_824_132_812_427;
        assert!((v - exact).abs() < 1e-14);
        let v32 = gl_fixed(&f, 0.0, 1.0, 32);
        assert!((v32 - exact).abs() < 1e-14);
    }

    #[test]
    fn graded_panels_capture_log_endpoint() {
        // int_0^1 ln(1 - x) dx = -1 and its mirror
        let f = |x: f64| (1.0 - x).max(1e-300).ln();
        let v = gl_graded(&f, 0.0, 1.0, 32, 40, true);
        assert!((v + 1.0).abs() < 1e-10, "got {v}");
        let g = |x: f64| x.max(1e-300).ln();
        let v = gl_graded(&g, 0.0, 1.0, 32, 40, false);
        assert!((v + 1.0).abs() < 1e-10, "got {v}");
    }
}
