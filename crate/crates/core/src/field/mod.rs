//! The Minkowski-vacuum ball/shell example reduced to one-dimensional
//! radial quadrature.
//!
//! Mode A is smeared with a cos^2 window inside a ball of radius R_A, mode
//! B with a sin^2 window on a concentric shell [R_B, R_B + d_B]. Each
//! window f defines a momentum-smeared Darboux pair (0, f), (-f, 0), i.e. a
//! complex mode vector (i f, f)/sqrt(2). For the vacuum, every entry of the
//! restricted two-mode covariance reduces to the pairing integrals
//!
//!   I_p(X, Y) = (1/2 pi^2) ∫ dk k^2 omega_k^p  f~_X(k) f~_Y(k),
//!   omega_k = sqrt(k^2 + m^2),  p = ±1,
//!
//! with f~ the 3-D Fourier transform of the window,
//! f~(k) = (4 pi / k) ∫ dr r sin(kr) f(r), evaluated here in closed form.
//! The 4x4 covariance in the Darboux basis (A1, A2, B1, B2) is
//!
//!   [[I-AA, 0, I-AB, 0], [0, I+AA, 0, I+AB],
//!    [I-AB, 0, I-BB, 0], [0, I+AB, 0, I+BB]],
//!
//! so det J_A = I+AA I-AA, det J_B = I+BB I-BB, det J_C = I+AB I-AB.
//! Partner radial profiles follow from the same transforms:
//!
//!   f_Ap = [(omega * f) - I+AA f] / sqrt(det J_A - 1),
//!   g_Ap = [I-AA f - (omega^-1 * f)] / sqrt(det J_A - 1),
//!
//! where (omega^p * f)(r) = (1/2 pi^2 r) ∫ dk k sin(kr) omega_k^p f~(k).
//! Outside the window support the convolutions are evaluated through the
//! closed position-space kernels instead (rational/log forms for m = 0,
//! modified Bessel K for m > 0), which are regular there.
//!
//! All lengths are in units of R_A; the mass enters as mu = m R_A.

pub mod bessel;
pub mod quad;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::{criterion, CriterionReport};
use crate::phase::ModeSubspace;
use crate::state::{GaussianState, TwoModeBlocks};
use quad::{composite_gk_refined, gl_fixed, gl_graded};

const PI: f64 = std::f64::consts::PI;

/// Numerical knobs for the radial quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadConfig {
    /// Relative tolerance for pairing integrals.
    pub rel_tol: f64,
    /// Absolute floor for pairing integrals near zero.
    pub abs_tol: f64,
    /// Panels per oscillation wavelength of the integrand.
    pub panels_per_wavelength: f64,
    /// Hard cap on the momentum cutoff.
    pub k_max_cap: f64,
    /// Absolute tolerance for partner-profile points.
    pub profile_tol: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-16,
            panels_per_wavelength: 3.0,
            k_max_cap: 1e7,
            profile_tol: 1e-7,
        }
    }
}

/// Convergence record of one adaptive momentum integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadDiagnostics {
    pub k_max: f64,
    pub err_estimate: f64,
    pub tail_bound: f64,
    pub panels: usize,
}

impl QuadDiagnostics {
    fn merge(self, other: Self) -> Self {
        Self {
            k_max: self.k_max.max(other.k_max),
            err_estimate: self.err_estimate.max(other.err_estimate),
            tail_bound: self.tail_bound.max(other.tail_bound),
            panels: self.panels + other.panels,
        }
    }
}

/// Spherically symmetric smearing window, unit-normalized so that
/// ∫ d^3x f(x)^2 = 4 pi ∫ dr r^2 f(r)^2 = 1 (the canonical-pair condition
/// for its Darboux vectors).
#[derive(Debug, Clone, PartialEq)]
pub struct RadialWindow {
    kind: WindowKind,
    k_norm: f64,
    /// Moments ∫ r^(2m+2) f dr for the small-k series of the transform.
    even_moments: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WindowKind {
    /// f(r) = K cos^2(pi r / 2 R_A) for r <= R_A.
    CosSqBall { r_a: f64 },
    /// f(r) = K sin^2(pi (r - R_B)/d_B) for R_B <= r <= R_B + d_B.
    SinSqShell { r_b: f64, d_b: f64 },
}

impl RadialWindow {
    /// The ball window; K_A = (2 / R_A^(3/2)) sqrt(pi / (2 pi^2 - 15)).
    pub fn ball(r_a: f64) -> Result<Self> {
        if !(r_a > 0.0 && r_a.is_finite()) {
            return Err(Error::InvalidConfig("ball radius must be positive".into()));
        }
        let k_norm = 2.0 / r_a.powf(1.5) * (PI / (2.0 * PI * PI - 15.0)).sqrt();
        Ok(Self::finish(WindowKind::CosSqBall { r_a }, k_norm))
    }

    /// The shell window; K_B is fixed by the unit-norm integral, which has
    /// the closed form 4 pi K^2 d [3 R_B^2/8 + 3 R_B d/8
    /// + d^2 (8 pi^2 - 15)/(64 pi^2)] = 1.
    pub fn shell(r_b: f64, d_b: f64) -> Result<Self> {
        if !(r_b > 0.0 && d_b > 0.0 && r_b.is_finite() && d_b.is_finite()) {
            return Err(Error::InvalidConfig(
                "shell needs positive inner radius and width".into(),
            ));
        }
        let bracket = 3.0 * r_b * r_b / 8.0
            + 3.0 * r_b * d_b / 8.0
            + d_b * d_b * (8.0 * PI * PI - 15.0) / (64.0 * PI * PI);
        let k_norm = 1.0 / (4.0 * PI * d_b * bracket).sqrt();
        Ok(Self::finish(WindowKind::SinSqShell { r_b, d_b }, k_norm))
    }

    fn finish(kind: WindowKind, k_norm: f64) -> Self {
        let mut w = Self {
            kind,
            k_norm,
            even_moments: Vec::new(),
        };
        let (lo, hi) = w.support();
        // moments ∫ r^(2m+2) f(r) dr, m = 0..8, for the small-k branch
        w.even_moments = (0..9)
            .map(|m| {
                let p = 2 * m + 2;
                gl_fixed(&|r: f64| r.powi(p) * w.value(r), lo, hi, 64)
            })
            .collect();
        w
    }

    pub fn kind(&self) -> WindowKind {
        self.kind
    }

    /// The normalization constant K.
    pub fn normalization(&self) -> f64 {
        self.k_norm
    }

    /// Support interval (lo, hi); the window vanishes identically outside.
    pub fn support(&self) -> (f64, f64) {
        match self.kind {
            WindowKind::CosSqBall { r_a } => (0.0, r_a),
            WindowKind::SinSqShell { r_b, d_b } => (r_b, r_b + d_b),
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        match self.kind {
            WindowKind::CosSqBall { r_a } => {
                if r < 0.0 || r > r_a {
                    0.0
                } else {
                    let c = (0.5 * PI * r / r_a).cos();
                    self.k_norm * c * c
                }
            }
            WindowKind::SinSqShell { r_b, d_b } => {
                if r < r_b || r > r_b + d_b {
                    0.0
                } else {
                    let s = (PI * (r - r_b) / d_b).sin();
                    self.k_norm * s * s
                }
            }
        }
    }

    /// Radial Laplacian f'' + 2 f'/r of the window (piecewise; zero
    /// outside the support). Used by the position-space oracle route.
    pub fn laplacian(&self, r: f64) -> f64 {
        match self.kind {
            WindowKind::CosSqBall { r_a } => {
                if r < 0.0 || r > r_a {
                    return 0.0;
                }
                let a = PI / r_a;
                let fpp = -self.k_norm * 0.5 * a * a * (a * r).cos();
                if r < 1e-8 * r_a {
                    // 2 f'/r -> 2 f''(0)
                    3.0 * (-self.k_norm * 0.5 * a * a)
                } else {
                    let fp = -self.k_norm * 0.5 * a * (a * r).sin();
                    fpp + 2.0 * fp / r
                }
            }
            WindowKind::SinSqShell { r_b, d_b } => {
                if r < r_b || r > r_b + d_b {
                    return 0.0;
                }
                let b = 2.0 * PI / d_b;
                let fp = self.k_norm * 0.5 * b * (b * (r - r_b)).sin();
                let fpp = self.k_norm * 0.5 * b * b * (b * (r - r_b)).cos();
                fpp + 2.0 * fp / r
            }
        }
    }

    /// The 3-D Fourier transform f~(k) = (4 pi / k) ∫ dr r sin(kr) f(r),
    /// in closed form with series branches across the removable points
    /// (k = 0, k = pi/R_A for the ball, k = 2 pi/d_B for the shell).
    pub fn radial_ft(&self, k: f64) -> f64 {
        debug_assert!(k >= 0.0);
        let (_, hi) = self.support();
        if k * hi < 0.5 {
            // small-k moment series: 4 pi sum_m (-1)^m k^(2m) M_(2m+2)/(2m+1)!
            let mut sum = 0.0;
            let mut fac = 1.0; // (2m+1)!
            let k2 = k * k;
            let mut kpow = 1.0;
            for (m, mom) in self.even_moments.iter().enumerate() {
                if m > 0 {
                    let mf = 2.0 * m as f64;
                    fac *= mf * (mf + 1.0);
                    kpow *= k2;
                }
                let term = kpow / fac * mom;
                sum += if m % 2 == 0 { term } else { -term };
            }
            return 4.0 * PI * sum;
        }
        match self.kind {
            WindowKind::CosSqBall { r_a } => {
                let x = k * r_a;
                let bracket = g_fn(x) + 0.5 * g_fn(x + PI) + 0.5 * g_fn(x - PI);
                2.0 * PI * self.k_norm * r_a * r_a / k * bracket
            }
            WindowKind::SinSqShell { r_b, d_b } => {
                let r2 = r_b + d_b;
                let b = 2.0 * PI / d_b;
                let w = 0.5 * (h_fn(k * r2) - h_fn(k * r_b)) / (k * k)
                    - 0.25 * (sin_primitive(k + b, r_b, r2, k) + sin_primitive(k - b, r_b, r2, k));
                4.0 * PI * self.k_norm / k * w
            }
        }
    }

    /// Envelope constant C with |f~(k)| <= C / k^4 in the asymptotic
    /// region, used for tail truncation bounds (2x safety built in).
    pub fn ft_envelope_c4(&self) -> f64 {
        match self.kind {
            WindowKind::CosSqBall { r_a } => 4.0 * PI.powi(3) * self.k_norm / r_a,
            WindowKind::SinSqShell { r_b, d_b } => {
                let b = 2.0 * PI / d_b;
                4.0 * PI * self.k_norm * b * b * (2.0 * r_b + d_b)
            }
        }
    }

    /// Momentum above which the k^-4 envelope is reliable.
    pub fn ft_asymptotic_from(&self) -> f64 {
        match self.kind {
            WindowKind::CosSqBall { r_a } => 8.0 / r_a * PI,
            WindowKind::SinSqShell { d_b, .. } => 4.0 * (2.0 * PI / d_b),
        }
    }

    /// 4 pi ∫ r^2 f^2 dr by direct quadrature; equals 1 for a correctly
    /// normalized window.
    pub fn norm_integral(&self) -> f64 {
        let (lo, hi) = self.support();
        4.0 * PI * gl_fixed(&|r: f64| r * r * self.value(r) * self.value(r), lo, hi, 64)
    }
}

/// H(y) = sin y - y cos y, with a series branch near zero.
fn h_fn(y: f64) -> f64 {
    if y.abs() < 0.05 {
        let y2 = y * y;
        y * y2 * (1.0 / 3.0 - y2 / 30.0 + y2 * y2 / 840.0 - y2 * y2 * y2 / 45360.0)
    } else {
        y.sin() - y * y.cos()
    }
}

/// g(y) = (sin y - y cos y) / y^2 = H(y)/y^2, series near zero.
fn g_fn(y: f64) -> f64 {
    if y.abs() < 0.5 {
        let y2 = y * y;
        y * (1.0 / 3.0 - y2 / 30.0 + y2 * y2 / 840.0 - y2 * y2 * y2 / 45360.0
            + y2 * y2 * y2 * y2 / 3991680.0)
    } else {
        (y.sin() - y * y.cos()) / (y * y)
    }
}

/// P(a) = ∫_{r1}^{r2} r sin(a r + c) dr for the shell transform, where the
/// phase c makes a r + c equal k r at both endpoints modulo 2 pi (so the
/// closed form is evaluated with the well-conditioned angles k r1, k r2).
/// A series branch covers the removable point a -> 0.
fn sin_primitive(a: f64, r1: f64, r2: f64, k: f64) -> f64 {
    if (a * r2).abs() < 0.5 {
        // sin(a r + c) with c = (k - a) r1; expand around a = 0
        let c = (k - a) * r1;
        let (sc, cc) = (c.sin(), c.cos());
        let trig = [sc, cc, -sc, -cc];
        let mut sum = 0.0;
        let mut apow = 1.0;
        let mut fac = 1.0;
        for n in 0..16 {
            if n > 0 {
                apow *= a;
                fac *= n as f64;
            }
            let p = (n + 2) as i32;
            let moment = (r2.powi(p) - r1.powi(p)) / p as f64;
            sum += apow / fac * trig[n % 4] * moment;
        }
        sum
    } else {
        let (s2, c2) = ((k * r2).sin(), (k * r2).cos());
        let (s1, c1) = ((k * r1).sin(), (k * r1).cos());
        (s2 / (a * a) - r2 * c2 / a) - (s1 / (a * a) - r1 * c1 / a)
    }
}

/// The six vacuum pairing integrals of a ball/shell pair, with the mass and
/// quadrature diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairingSet {
    /// Dimensionless mass mu = m R_A (R_A = 1 units are conventional).
    pub mass: f64,
    pub i_plus_aa: f64,
    pub i_minus_aa: f64,
    pub i_plus_bb: f64,
    pub i_minus_bb: f64,
    pub i_plus_ab: f64,
    pub i_minus_ab: f64,
    pub diagnostics: QuadDiagnostics,
}

impl PairingSet {
    /// Determinant identities implied by the pairing structure:
    /// (det J_A, det J_B, det J_C) = (I+ I-) per pair.
    pub fn det_identities(&self) -> (f64, f64, f64) {
        (
            self.i_plus_aa * self.i_minus_aa,
            self.i_plus_bb * self.i_minus_bb,
            self.i_plus_ab * self.i_minus_ab,
        )
    }
}

/// One momentum pairing integral
/// I_p(X, Y) = (1/2 pi^2) ∫ dk k^2 omega^p f~_X f~_Y, p in {-1, 0, +1}.
pub fn pairing_integral(
    wx: &RadialWindow,
    wy: &RadialWindow,
    p: i32,
    mass: f64,
    cfg: &QuadConfig,
) -> Result<(f64, QuadDiagnostics)> {
    assert!((-1..=1).contains(&p));
    if mass < 0.0 {
        return Err(Error::InvalidConfig("mass must be nonnegative".into()));
    }
    let osc_len = wx.support().1 + wy.support().1;
    let width = 2.0 * PI / (cfg.panels_per_wavelength * osc_len);
    let integrand = |k: f64| {
        if k <= 0.0 {
            return 0.0;
        }
        let om = (k * k + mass * mass).sqrt();
        let omp = match p {
            1 => om,
            0 => 1.0,
            _ => 1.0 / om,
        };
        k * k * omp * wx.radial_ft(k) * wy.radial_ft(k) / (2.0 * PI * PI)
    };

    let c4 = wx.ft_envelope_c4() * wy.ft_envelope_c4();
    let tail_bound = |kk: f64| -> f64 {
        match p {
            1 => 1.2 * c4 / (8.0 * PI * PI * kk.powi(4)),
            0 => c4 / (10.0 * PI * PI * kk.powi(5)),
            _ => c4 / (12.0 * PI * PI * kk.powi(6)),
        }
    };

    let mut k_hi = wx
        .ft_asymptotic_from()
        .max(wy.ft_asymptotic_from())
        .max(4.0 * mass)
        .max(8.0 * PI / osc_len);
    let (mut value, mut err, mut panels) =
        composite_gk_refined(&integrand, 0.0, k_hi, width, cfg.abs_tol);
    loop {
        let target = (cfg.rel_tol * value.abs()).max(cfg.abs_tol);
        if tail_bound(k_hi) <= 0.5 * target {
            break;
        }
        if 2.0 * k_hi > cfg.k_max_cap {
            return Err(Error::QuadratureNonConvergence {
                what: format!("pairing integral p={p} tail stuck at k_max={k_hi:.3e}"),
                estimate: tail_bound(k_hi),
                panels,
            });
        }
        let (v, e, n) = composite_gk_refined(&integrand, k_hi, 2.0 * k_hi, width, target);
        value += v;
        err += e;
        panels += n;
        k_hi *= 2.0;
    }
    // One more refinement pass if the panel-error estimate misses the goal.
    let target = (cfg.rel_tol * value.abs()).max(cfg.abs_tol);
    if err > target {
        let (v2, e2, n2) = composite_gk_refined(&integrand, 0.0, k_hi, width * 0.5, target);
        let diff = (v2 - value).abs();
        value = v2;
        err = e2.min(diff.max(f64::MIN_POSITIVE));
        panels += n2;
    }
    Ok((
        value,
        QuadDiagnostics {
            k_max: k_hi,
            err_estimate: err,
            tail_bound: tail_bound(k_hi),
            panels,
        },
    ))
}

/// All six pairing integrals for a ball/shell pair.
pub fn compute_pairings(
    ball: &RadialWindow,
    shell: &RadialWindow,
    mass: f64,
    cfg: &QuadConfig,
) -> Result<PairingSet> {
    let (i_plus_aa, d1) = pairing_integral(ball, ball, 1, mass, cfg)?;
    let (i_minus_aa, d2) = pairing_integral(ball, ball, -1, mass, cfg)?;
    let (i_plus_bb, d3) = pairing_integral(shell, shell, 1, mass, cfg)?;
    let (i_minus_bb, d4) = pairing_integral(shell, shell, -1, mass, cfg)?;
    let (i_plus_ab, d5) = pairing_integral(ball, shell, 1, mass, cfg)?;
    let (i_minus_ab, d6) = pairing_integral(ball, shell, -1, mass, cfg)?;
    let diagnostics = [d2, d3, d4, d5, d6].iter().fold(d1, |a, b| a.merge(*b));
    Ok(PairingSet {
        mass,
        i_plus_aa,
        i_minus_aa,
        i_plus_bb,
        i_minus_bb,
        i_plus_ab,
        i_minus_ab,
        diagnostics,
    })
}

/// Assembles the 4x4 vacuum covariance of the (A, B) pair from the pairing
/// integrals and runs it through the standard two-mode-block pipeline.
/// Verifies the determinant identities det J_X = I+ I- at 1e-10; failures
/// of physicality or of the identities flag insufficient quadrature.
pub fn assemble_blocks(pairings: &PairingSet) -> Result<TwoModeBlocks> {
    let p = pairings;
    let sigma = nalgebra::DMatrix::from_row_slice(
        4,
        4,
        &[
            p.i_minus_aa,
            0.0,
            p.i_minus_ab,
            0.0, //
            0.0,
            p.i_plus_aa,
            0.0,
            p.i_plus_ab, //
            p.i_minus_ab,
            0.0,
            p.i_minus_bb,
            0.0, //
            0.0,
            p.i_plus_ab,
            0.0,
            p.i_plus_bb,
        ],
    );
    let state = GaussianState::new(sigma, None).map_err(|e| Error::QuadratureNonConvergence {
        what: format!(
            "assembled covariance failed physicality ({e}); increase quadrature accuracy"
        ),
        estimate: p.diagnostics.err_estimate,
        panels: p.diagnostics.panels,
    })?;
    let a = ModeSubspace::standard_mode(2, 0)?;
    let b = ModeSubspace::standard_mode(2, 1)?;
    let blocks = state.complex_structure().two_mode_blocks(&a, &b)?;
    let (det_ja, det_jb, det_jc) = p.det_identities();
    for (got, want) in [
        (blocks.det_ja, det_ja),
        (blocks.det_jb, det_jb),
        (blocks.det_jc, det_jc),
    ] {
        if (got - want).abs() > 1e-10 * want.abs().max(1.0) {
            return Err(Error::QuadratureNonConvergence {
                what: format!(
                    "determinant identity violated: blocks give {got:.14e}, pairings give {want:.14e}"
                ),
                estimate: (got - want).abs(),
                panels: p.diagnostics.panels,
            });
        }
    }
    Ok(blocks)
}

/// Geometry and mass of one ball/shell configuration, in units of R_A.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BallShellParams {
    /// Inner shell radius R_B >= R_A = 1.
    pub r_b: f64,
    /// Shell width d_B > 0.
    pub d_b: f64,
    /// Dimensionless mass mu = m R_A.
    pub mu: f64,
}

impl BallShellParams {
    pub fn validate(&self) -> Result<()> {
        if self.r_b < 1.0 {
            return Err(Error::InvalidConfig(
                "shell must enclose the ball: R_B >= R_A = 1".into(),
            ));
        }
        if self.d_b <= 0.0 {
            return Err(Error::InvalidConfig("shell width must be positive".into()));
        }
        if self.mu < 0.0 {
            return Err(Error::InvalidConfig("mass must be nonnegative".into()));
        }
        Ok(())
    }
}

/// Full pipeline for one configuration: windows, pairings, blocks, report.
pub fn ball_shell_report(
    params: &BallShellParams,
    cfg: &QuadConfig,
) -> Result<(CriterionReport, PairingSet)> {
    params.validate()?;
    let ball = RadialWindow::ball(1.0)?;
    let shell = RadialWindow::shell(params.r_b, params.d_b)?;
    let pairings = compute_pairings(&ball, &shell, params.mu, cfg)?;
    let blocks = assemble_blocks(&pairings)?;
    Ok((criterion(&blocks), pairings))
}

/// One row of a parameter scan; quadrature failures are recorded per point
/// and the scan continues.
#[derive(Debug, Clone, Serialize)]
pub struct ScanPoint {
    /// The swept parameter (separation, mass or width).
    pub param: f64,
    pub report: Option<CriterionReport>,
    /// w(Delta) * d_t, the first-order negativity proxy (no clamping).
    pub w_dt: Option<f64>,
    pub diagnostics: Option<QuadDiagnostics>,
    pub error: Option<String>,
}

fn scan_grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    assert!(steps >= 2);
    (0..steps)
        .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
        .collect()
}

/// Evaluates one scan point, turning failures into a recorded row.
pub fn evaluate_point(params: BallShellParams, param: f64, cfg: &QuadConfig) -> ScanPoint {
    match ball_shell_report(&params, cfg) {
        Ok((report, pairings)) => {
            let w_dt = match (report.w_delta, report.d_t) {
                (Some(w), Some(dt)) => Some(w * dt),
                _ => None,
            };
            ScanPoint {
                param,
                report: Some(report),
                w_dt,
                diagnostics: Some(pairings.diagnostics),
                error: None,
            }
        }
        Err(e) => ScanPoint {
            param,
            report: None,
            w_dt: None,
            diagnostics: None,
            error: Some(e.to_string()),
        },
    }
}

/// Parameter grid for a separation scan: (param = R_B - R_A, geometry).
pub fn separation_grid(
    mu: f64,
    d_b: f64,
    separation: (f64, f64),
    steps: usize,
) -> Result<Vec<(f64, BallShellParams)>> {
    if separation.0 < 0.0 || separation.1 < separation.0 {
        return Err(Error::InvalidConfig(
            "separation range must be ascending and nonnegative".into(),
        ));
    }
    Ok(scan_grid(separation.0, separation.1, steps)
        .into_iter()
        .map(|s| {
            (
                s,
                BallShellParams {
                    r_b: 1.0 + s,
                    d_b,
                    mu,
                },
            )
        })
        .collect())
}

/// Parameter grid for a mass scan: (param = mu, geometry).
pub fn mass_grid(
    mu_range: (f64, f64),
    steps: usize,
    r_b: f64,
    d_b: f64,
) -> Result<Vec<(f64, BallShellParams)>> {
    if mu_range.0 < 0.0 || mu_range.1 < mu_range.0 {
        return Err(Error::InvalidConfig(
            "mass range must be ascending and nonnegative".into(),
        ));
    }
    Ok(scan_grid(mu_range.0, mu_range.1, steps)
        .into_iter()
        .map(|mu| (mu, BallShellParams { r_b, d_b, mu }))
        .collect())
}

/// Parameter grid for a width scan: (param = d_B, geometry).
pub fn width_grid(
    db_range: (f64, f64),
    steps: usize,
    mu: f64,
    r_b: f64,
) -> Result<Vec<(f64, BallShellParams)>> {
    if db_range.0 <= 0.0 || db_range.1 < db_range.0 {
        return Err(Error::InvalidConfig(
            "width range must be ascending and positive".into(),
        ));
    }
    Ok(scan_grid(db_range.0, db_range.1, steps)
        .into_iter()
        .map(|d_b| (d_b, BallShellParams { r_b, d_b, mu }))
        .collect())
}

/// Scan over the radial separation R_B - R_A at fixed mass and width;
/// `param` is R_B - R_A.
pub fn scan_separation(
    mu: f64,
    d_b: f64,
    separation: (f64, f64),
    steps: usize,
    cfg: &QuadConfig,
) -> Result<Vec<ScanPoint>> {
    Ok(separation_grid(mu, d_b, separation, steps)?
        .into_iter()
        .map(|(s, params)| evaluate_point(params, s, cfg))
        .collect())
}

/// Scan over the dimensionless mass mu at fixed geometry; `param` is mu.
pub fn scan_mass(
    mu_range: (f64, f64),
    steps: usize,
    r_b: f64,
    d_b: f64,
    cfg: &QuadConfig,
) -> Result<Vec<ScanPoint>> {
    Ok(mass_grid(mu_range, steps, r_b, d_b)?
        .into_iter()
        .map(|(mu, params)| evaluate_point(params, mu, cfg))
        .collect())
}

/// Scan over the shell width d_B at fixed mass and inner radius;
/// `param` is d_B.
pub fn scan_width(
    db_range: (f64, f64),
    steps: usize,
    mu: f64,
    r_b: f64,
    cfg: &QuadConfig,
) -> Result<Vec<ScanPoint>> {
    Ok(width_grid(db_range, steps, mu, r_b)?
        .into_iter()
        .map(|(d_b, params)| evaluate_point(params, d_b, cfg))
        .collect())
}

/// Sampled radial profiles of the partner mode of a window.
#[derive(Debug, Clone, Serialize)]
pub struct PartnerProfile {
    pub r_grid: Vec<f64>,
    pub f_ap: Vec<f64>,
    pub g_ap: Vec<f64>,
    pub det_ja: f64,
    pub i_plus: f64,
    pub i_minus: f64,
    /// Per-point convergence flags (false where the k-space tail bound
    /// could not be pushed below the profile tolerance).
    pub converged: Vec<bool>,
}

/// Default logarithmic grid: 400 points over [1e-2, 50] * scale.
pub fn default_r_grid(scale: f64) -> Vec<f64> {
    let n = 400;
    let (lo, hi) = (1e-2 * scale, 50.0 * scale);
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

/// The convolution (omega^p * f)(r) for a point strictly outside the
/// window support, through the closed position-space kernels.
fn convolution_outside(w: &RadialWindow, p: i32, mass: f64, r: f64) -> f64 {
    let (lo, hi) = w.support();
    debug_assert!(r < lo || r > hi);
    let toward_hi = r > hi; // grade panels toward the nearest support edge
    let integrand: Box<dyn Fn(f64) -> f64> = if p == -1 {
        if mass == 0.0 {
            Box::new(move |rp: f64| rp * ((r + rp) / (r - rp).abs()).ln())
        } else {
            Box::new(move |rp: f64| {
                rp * (bessel::k0(mass * (r - rp).abs()) - bessel::k0(mass * (r + rp)))
            })
        }
    } else if mass == 0.0 {
        Box::new(move |rp: f64| {
            let d2 = (r - rp) * (r - rp) * (r + rp) * (r + rp);
            -4.0 * r / PI * rp * rp / d2 // carries the 1/(pi r) prefactor below
        })
    } else {
        Box::new(move |rp: f64| {
            let s1 = (r - rp).abs();
            let s2 = r + rp;
            -mass * rp * (bessel::k1(mass * s1) / s1 - bessel::k1(mass * s2) / s2)
        })
    };
    let f = |rp: f64| integrand(rp) * w.value(rp);
    let val = gl_graded(&f, lo, hi, 32, 30, toward_hi);
    if p == -1 {
        val / (PI * r)
    } else if mass == 0.0 {
        val / r // the -4 r/pi already carries pi; net -(4/pi) ∫ r'^2 f / (...)
    } else {
        val / (PI * r)
    }
}

/// The convolution (omega^p * f)(r) through the oscillatory momentum
/// integral (1/2 pi^2 r) ∫ dk k sin(kr) omega^p f~(k); used inside and
/// near the support where the position kernels are singular.
/// Returns (value, converged).
fn convolution_kspace(
    w: &RadialWindow,
    p: i32,
    mass: f64,
    r: f64,
    cfg: &QuadConfig,
) -> (f64, bool) {
    let (_, hi) = w.support();
    let c4 = w.ft_envelope_c4();
    // choose k_max from integration-by-parts tail bounds
    let base = (2.0 * PI * PI * r) * cfg.profile_tol;
    let k_req: f64 = if p == 1 {
        let near = (r - hi).abs().max(1e-3 * hi);
        let osc = (3.0 * c4 * (1.0 / (r + hi) + 1.0 / near) / base).sqrt();
        let abs = 1.5 * c4 / base;
        osc.min(abs)
    } else {
        (c4 / (3.0 * base)).cbrt()
    };
    let k_max = k_req.max(w.ft_asymptotic_from()).max(4.0 * mass).min(5e5);
    let converged = k_req <= k_max + 1.0;
    let width = 2.0 * PI / (cfg.panels_per_wavelength * (r + hi));
    let integrand = |k: f64| {
        if k <= 0.0 {
            return 0.0;
        }
        let om = (k * k + mass * mass).sqrt();
        let omp = if p == 1 { om } else { 1.0 / om };
        k * (k * r).sin() * omp * w.radial_ft(k)
    };
    let (v, _, _) = composite_gk_refined(&integrand, 0.0, k_max, width, cfg.profile_tol);
    (v / (2.0 * PI * PI * r), converged)
}

/// Samples the partner-mode radial profiles f_Ap, g_Ap of a window on a
/// grid. Points well outside the support use the regular position-space
/// kernels; the rest use the momentum integrals.
pub fn partner_profile(
    w: &RadialWindow,
    mass: f64,
    r_grid: &[f64],
    cfg: &QuadConfig,
) -> Result<PartnerProfile> {
    if r_grid.is_empty() || r_grid.iter().any(|&r| r <= 0.0) {
        return Err(Error::InvalidConfig("r grid must be positive".into()));
    }
    let (i_plus, d1) = pairing_integral(w, w, 1, mass, cfg)?;
    let (i_minus, _d2) = pairing_integral(w, w, -1, mass, cfg)?;
    let det_ja = i_plus * i_minus;
    if det_ja <= 1.0 + crate::tol::VALIDATION {
        return Err(Error::NearPureReduction { det_j: det_ja });
    }
    let norm = 1.0 / (det_ja - 1.0).sqrt();
    let (lo, hi) = w.support();
    let mut f_ap = Vec::with_capacity(r_grid.len());
    let mut g_ap = Vec::with_capacity(r_grid.len());
    let mut converged = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let outside = r > hi * 1.05 || (lo > 0.0 && r < lo * 0.95);
        let (om_f, om_inv_f, ok) = if outside {
            (
                convolution_outside(w, 1, mass, r),
                convolution_outside(w, -1, mass, r),
                true,
            )
        } else {
            let (a, ok_a) = convolution_kspace(w, 1, mass, r, cfg);
            let (b, ok_b) = convolution_kspace(w, -1, mass, r, cfg);
            (a, b, ok_a && ok_b)
        };
        let fv = w.value(r);
        f_ap.push((om_f - i_plus * fv) * norm);
        g_ap.push((i_minus * fv - om_inv_f) * norm);
        converged.push(ok);
    }
    let _ = d1;
    Ok(PartnerProfile {
        r_grid: r_grid.to_vec(),
        f_ap,
        g_ap,
        det_ja,
        i_plus,
        i_minus,
        converged,
    })
}

/// Least-squares slope of log|v| against log r, with its standard error.
/// Needs at least 10 nonzero samples.
pub fn falloff_exponent(r: &[f64], v: &[f64]) -> Result<(f64, f64)> {
    if r.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: r.len(),
            got: v.len(),
        });
    }
    let pts: Vec<(f64, f64)> = r
        .iter()
        .zip(v.iter())
        .filter(|(&ri, &vi)| ri > 0.0 && vi != 0.0 && vi.is_finite())
        .map(|(&ri, &vi)| (ri.ln(), vi.abs().ln()))
        .collect();
    if pts.len() < 10 {
        return Err(Error::InsufficientSamples {
            needed: 10,
            have: pts.len(),
        });
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom <= 0.0 {
        return Err(Error::InsufficientSamples {
            needed: 10,
            have: pts.len(),
        });
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let ss_res: f64 = pts
        .iter()
        .map(|p| {
            let e = p.1 - (intercept + slope * p.0);
            e * e
        })
        .sum();
    let dof = (pts.len().max(3) - 2) as f64;
    let stderr = (ss_res / dof / (sxx - sx * sx / n)).sqrt();
    Ok((slope, stderr))
}
