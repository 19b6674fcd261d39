//! Shared oracles for the integration tests. Everything here is computed
//! through routes independent of the library paths under test: explicit
//! covariance matrices, partial transposition in position space, and
//! position-space double integrals for the field pairings.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;
use symoverlap::field::quad::{gl_fixed, gl_graded};
use symoverlap::field::{bessel, RadialWindow};
use symoverlap::PhaseVector;

/// The explicit two-mode squeezed vacuum covariance (cosh/sinh pattern).
pub fn tmsv_sigma(r: f64) -> DMatrix<f64> {
    let (c2, s2) = ((2.0 * r).cosh(), (2.0 * r).sinh());
    DMatrix::from_row_slice(
        4,
        4,
        &[
            c2, 0.0, s2, 0.0, //
            0.0, c2, 0.0, -s2, //
            s2, 0.0, c2, 0.0, //
            0.0, -s2, 0.0, c2,
        ],
    )
}

/// Symplectic eigenvalues of an arbitrary symmetric positive-definite
/// matrix by the Williamson singular-value route, independent of any
/// library validation (partial transposes of entangled states are
/// unphysical on purpose).
pub fn williamson_of_matrix(sigma: &DMatrix<f64>) -> Vec<f64> {
    let n = sigma.nrows() / 2;
    let eig = sigma.clone().symmetric_eigen();
    let half = &eig.eigenvectors
        * DMatrix::from_diagonal(&eig.eigenvalues.map(|x| x.sqrt()))
        * eig.eigenvectors.transpose();
    let mut omega = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    let k = &half * omega * &half;
    let sv = k.svd(false, false).singular_values;
    let mut s: Vec<f64> = sv.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s.into_iter().step_by(2).collect()
}

/// Smallest PT symplectic eigenvalue by brute force: flip the momentum of
/// mode A in the explicit 4x4 covariance and rerun Williamson.
pub fn pt_nu_minus_brute(sigma: &DMatrix<f64>) -> f64 {
    let mut t = DMatrix::identity(4, 4);
    t[(1, 1)] = -1.0;
    let flipped = &t * sigma * &t;
    let nus = williamson_of_matrix(&flipped);
    nus.last().copied().unwrap()
}

/// Random complex phase-space vector with standard-normal components.
pub fn random_vector<R: Rng>(rng: &mut R, n_modes: usize) -> PhaseVector {
    use rand_distr::{Distribution, StandardNormal};
    PhaseVector::new(
        (0..2 * n_modes)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                C64::new(re, im)
            })
            .collect(),
    )
    .unwrap()
}

/// Position-space oracle for the vacuum pairing integrals.
///
/// Uses the closed kernels of omega^(-1): for the massless field
/// kappa(r, r') = ln((r + r')/|r - r'|) / (pi r r'), for a massive field
/// [K0(m|r - r'|) - K0(m(r + r'))] / (pi r r'), and integration by parts
/// for the omega branch:
///
///   I- = ∫ f_X omega^-1 f_Y,   I+ = ∫ (-lap f_X) omega^-1 f_Y + m^2 I-.
///
/// Everything is a 2-D radial integral over the compact supports with a
/// logarithmic diagonal singularity, handled by graded panels. No Fourier
/// transforms and no momentum quadrature are involved.
pub fn pairing_oracle(wx: &RadialWindow, wy: &RadialWindow, p: i32, mass: f64) -> f64 {
    assert!(p == 1 || p == -1);
    let lap = p == 1;
    let outer = |r: f64| -> f64 {
        let fx = if lap { -wx.laplacian(r) } else { wx.value(r) };
        if fx == 0.0 {
            return 0.0;
        }
        let (lo, hi) = wy.support();
        let kernel = |rp: f64| -> f64 {
            // graded panel nodes can round onto the diagonal; the clamped
            // region contributes O(1e-14 ln) and is far below the 1e-6 goal
            let s1 = (r - rp).abs().max(1e-14 * (r + rp));
            let s2 = r + rp;
            let k = if mass == 0.0 {
                (s2 / s1).ln()
            } else {
                bessel::k0(mass * s1) - bessel::k0(mass * s2)
            };
            rp * wy.value(rp) * k
        };
        // split the inner integral at the diagonal point when it falls
        // inside the support; grade panels into the log singularity
        let inner = if r > lo && r < hi {
            gl_graded(&kernel, lo, r, 32, 30, true) + gl_graded(&kernel, r, hi, 32, 30, false)
        } else if r <= lo {
            gl_graded(&kernel, lo, hi, 32, 30, false)
        } else {
            gl_graded(&kernel, lo, hi, 32, 30, true)
        };
        fx * r * inner
    };
    let (lo, hi) = wx.support();
    // two-level composite outer rule: the inner result has mild kinks
    let panels = 24;
    let mut total = 0.0;
    for i in 0..panels {
        let a = lo + (hi - lo) * i as f64 / panels as f64;
        let b = lo + (hi - lo) * (i + 1) as f64 / panels as f64;
        total += gl_fixed(&outer, a, b, 32);
    }
    let base = 4.0 * total; // 4 ∫∫ dr dr' r r' (...) with 1/(pi r r') folded in
    if lap {
        base + mass * mass * pairing_oracle(wx, wy, -1, mass)
    } else {
        base
    }
}
