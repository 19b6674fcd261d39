//! Finite-dimensional symplectic gates and the three-oscillator worked
//! example (two-mode squeezer followed by a beam splitter), used as a
//! closed-form regression target for the overlap pipeline.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::{criterion, CriterionReport};
use crate::partner::partner_basis_vector;
use crate::phase::{sprod_unchecked, ModeSubspace, PhaseVector, SymplecticForm};
use crate::state::GaussianState;
use crate::tol;

/// Guard band around theta = (n + 1/2) pi where mode B of the worked
/// example becomes pure and the criterion does not apply.
pub const THETA_GUARD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub enum GateLabel {
    Squeezer { r: f64, modes: (usize, usize) },
    BeamSplitter { theta: f64, modes: (usize, usize) },
    Rotation { phi: f64, mode: usize },
    Custom,
}

/// A symplectic gate acting on covariance matrices by congruence.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticGate {
    matrix: DMatrix<f64>,
    label: GateLabel,
}

impl SymplecticGate {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn label(&self) -> &GateLabel {
        &self.label
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    /// Wraps an arbitrary matrix, checking S^T Omega S = Omega.
    pub fn custom(matrix: DMatrix<f64>) -> Result<Self> {
        let n2 = matrix.nrows();
        if n2 == 0 || !n2.is_multiple_of(2) || matrix.ncols() != n2 {
            return Err(Error::DimensionMismatch {
                expected: n2,
                got: matrix.ncols(),
            });
        }
        let omega = SymplecticForm::new(n2 / 2).matrix();
        let dev = (matrix.transpose() * &omega * &matrix - &omega).amax();
        if dev > tol::ALGEBRAIC {
            return Err(Error::NotSymplectic { max_dev: dev });
        }
        Ok(Self {
            matrix,
            label: GateLabel::Custom,
        })
    }

    /// Gate composition: applying `self` after `first`.
    pub fn after(&self, first: &SymplecticGate) -> Result<SymplecticGate> {
        if self.n_modes() != first.n_modes() {
            return Err(Error::DimensionMismatch {
                expected: self.matrix.nrows(),
                got: first.matrix.nrows(),
            });
        }
        Ok(SymplecticGate {
            matrix: &self.matrix * &first.matrix,
            label: GateLabel::Custom,
        })
    }
}

fn check_pair(i: usize, j: usize, n_modes: usize) -> Result<()> {
    if i == j {
        return Err(Error::InvalidConfig("gate needs two distinct modes".into()));
    }
    for idx in [i, j] {
        if idx >= n_modes {
            return Err(Error::IndexOutOfRange {
                index: idx,
                n_modes,
            });
        }
    }
    Ok(())
}

/// Two-mode squeezer on modes (i, j):
/// x_i' = cosh r x_i + sinh r x_j, p_i' = cosh r p_i - sinh r p_j, and
/// symmetrically for mode j.
pub fn squeezer(r: f64, modes: (usize, usize), n_modes: usize) -> Result<SymplecticGate> {
    let (i, j) = modes;
    check_pair(i, j, n_modes)?;
    let (ch, sh) = (r.cosh(), r.sinh());
    let mut m = DMatrix::identity(2 * n_modes, 2 * n_modes);
    m[(2 * i, 2 * i)] = ch;
    m[(2 * i, 2 * j)] = sh;
    m[(2 * i + 1, 2 * i + 1)] = ch;
    m[(2 * i + 1, 2 * j + 1)] = -sh;
    m[(2 * j, 2 * i)] = sh;
    m[(2 * j, 2 * j)] = ch;
    m[(2 * j + 1, 2 * i + 1)] = -sh;
    m[(2 * j + 1, 2 * j + 1)] = ch;
    Ok(SymplecticGate {
        matrix: m,
        label: GateLabel::Squeezer { r, modes },
    })
}

/// Beam splitter on modes (i, j):
/// x_i' = cos t x_i + sin t x_j, x_j' = -sin t x_i + cos t x_j, and the
/// same rotation on the momenta.
pub fn beam_splitter(theta: f64, modes: (usize, usize), n_modes: usize) -> Result<SymplecticGate> {
    let (i, j) = modes;
    check_pair(i, j, n_modes)?;
    let (c, s) = (theta.cos(), theta.sin());
    let mut m = DMatrix::identity(2 * n_modes, 2 * n_modes);
    m[(2 * i, 2 * i)] = c;
    m[(2 * i, 2 * j)] = s;
    m[(2 * i + 1, 2 * i + 1)] = c;
    m[(2 * i + 1, 2 * j + 1)] = s;
    m[(2 * j, 2 * i)] = -s;
    m[(2 * j, 2 * j)] = c;
    m[(2 * j + 1, 2 * i + 1)] = -s;
    m[(2 * j + 1, 2 * j + 1)] = c;
    Ok(SymplecticGate {
        matrix: m,
        label: GateLabel::BeamSplitter { theta, modes },
    })
}

/// Single-mode phase rotation: x' = cos phi x + sin phi p,
/// p' = -sin phi x + cos phi p.
pub fn rotation(phi: f64, mode: usize, n_modes: usize) -> Result<SymplecticGate> {
    if mode >= n_modes {
        return Err(Error::IndexOutOfRange {
            index: mode,
            n_modes,
        });
    }
    let (c, s) = (phi.cos(), phi.sin());
    let mut m = DMatrix::identity(2 * n_modes, 2 * n_modes);
    m[(2 * mode, 2 * mode)] = c;
    m[(2 * mode, 2 * mode + 1)] = s;
    m[(2 * mode + 1, 2 * mode)] = -s;
    m[(2 * mode + 1, 2 * mode + 1)] = c;
    Ok(SymplecticGate {
        matrix: m,
        label: GateLabel::Rotation { phi, mode },
    })
}

/// Applies a gate: sigma' = G sigma G^T, mu' = G mu.
pub fn apply(state: &GaussianState, gate: &SymplecticGate) -> Result<GaussianState> {
    if state.n_modes() != gate.n_modes() {
        return Err(Error::DimensionMismatch {
            expected: 2 * gate.n_modes(),
            got: 2 * state.n_modes(),
        });
    }
    let sigma = gate.matrix() * state.sigma() * gate.matrix().transpose();
    let mu = gate.matrix() * state.mu();
    GaussianState::new(sigma, Some(mu))
}

/// One point of the worked example: vacuum of three oscillators, two-mode
/// squeezing (A, B) with intensity r, then a beam splitter (B, C) with
/// angle theta; all quantities refer to the pair (A, B).
#[derive(Debug, Clone, Serialize)]
pub struct HoExample {
    pub r: f64,
    pub theta: f64,
    /// Magnitudes of the partner-mode weights on modes B and C.
    pub partner_weights: Option<(f64, f64)>,
    pub report: CriterionReport,
}

/// Runs the full pipeline on the worked example.
pub fn ho_example(r: f64, theta: f64) -> Result<HoExample> {
    if r <= 0.0 {
        return Err(Error::InvalidConfig("squeezing must be positive".into()));
    }
    let s_ab = squeezer(r, (0, 1), 3)?;
    let m_bc = beam_splitter(theta, (1, 2), 3)?;
    let state = apply(&apply(&GaussianState::vacuum(3), &s_ab)?, &m_bc)?;
    let j = state.complex_structure();
    let a = ModeSubspace::standard_mode(3, 0)?;
    let b = ModeSubspace::standard_mode(3, 1)?;
    let blocks = j.two_mode_blocks(&a, &b)?;
    let report = criterion(&blocks);

    // Partner weights |<g_B, g_Ap>|, |<g_C, g_Ap>|; the partner exists for
    // every r > 0 since A stays correlated for all theta.
    let partner_weights = match partner_basis_vector(&j, &a) {
        Ok(gap) => {
            let gb = PhaseVector::standard_mode(3, 1)?;
            let gc = PhaseVector::standard_mode(3, 2)?;
            Some((
                sprod_unchecked(&gb, &gap).norm(),
                sprod_unchecked(&gc, &gap).norm(),
            ))
        }
        Err(Error::NearPureReduction { .. }) | Err(Error::UncorrelatedSubsystem) => None,
        Err(e) => return Err(e),
    };

    Ok(HoExample {
        r,
        theta,
        partner_weights,
        report,
    })
}

/// The printed closed forms for the worked example,
/// returning (d_sym, d_c). Singular at theta = (n + 1/2) pi.
pub fn ho_closed_forms(r: f64, theta: f64) -> (f64, f64) {
    let c2 = theta.cos().powi(2);
    let sh = r.sinh();
    let ch = r.cosh();
    let d_sym = c2
        * ((2.0 * r).sinh().powi(2) / (((2.0 * theta).cos() * sh * sh + ch * ch).powi(2) - 1.0)
            + 1.0);
    let d_c = -c2 - 4.0 * ch * ch / (2.0 * (2.0 * theta).cos() * sh * sh + (2.0 * r).cosh() + 3.0);
    (d_sym, d_c)
}

/// True when theta is within the guard band of a half-integer multiple of
/// pi, where the closed forms are singular and the criterion inapplicable.
pub fn near_half_pi(theta: f64) -> bool {
    let t = (theta / std::f64::consts::PI).rem_euclid(1.0);
    (t - 0.5).abs() < THETA_GUARD / std::f64::consts::PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Verdict;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn squeezer_matches_printed_matrix() {
        let r = 0.5;
        let g = squeezer(r, (0, 1), 3).unwrap();
        let m = g.matrix();
        let (ch, sh) = (r.cosh(), r.sinh());
        assert!(close(m[(0, 0)], ch, 0.0));
        assert!(close(m[(0, 2)], sh, 0.0));
        assert!(close(m[(1, 1)], ch, 0.0));
        assert!(close(m[(1, 3)], -sh, 0.0));
        assert!(close(m[(2, 0)], sh, 0.0));
        assert!(close(m[(3, 1)], -sh, 0.0));
        assert!(close(m[(4, 4)], 1.0, 0.0));
        assert!(close(m[(5, 5)], 1.0, 0.0));
        // r = 0 is the identity
        let id = squeezer(0.0, (0, 1), 3).unwrap();
        assert!((id.matrix() - DMatrix::identity(6, 6)).amax() == 0.0);
        // symplectic invariant
        let omega = SymplecticForm::new(3).matrix();
        assert!((m.transpose() * &omega * m - &omega).amax() < 1e-12);
    }

    #[test]
    fn beam_splitter_matches_printed_matrix() {
        let theta = 0.7;
        let g = beam_splitter(theta, (1, 2), 3).unwrap();
        let m = g.matrix();
        let (c, s) = (theta.cos(), theta.sin());
        assert!(close(m[(2, 2)], c, 0.0));
        assert!(close(m[(2, 4)], s, 0.0));
        assert!(close(m[(3, 3)], c, 0.0));
        assert!(close(m[(3, 5)], s, 0.0));
        assert!(close(m[(4, 2)], -s, 0.0));
        assert!(close(m[(5, 3)], -s, 0.0));
        assert!(close(m[(0, 0)], 1.0, 0.0));
        // theta = 0 is the identity, theta = pi/2 a full reflection
        let id = beam_splitter(0.0, (1, 2), 3).unwrap();
        assert!((id.matrix() - DMatrix::identity(6, 6)).amax() == 0.0);
        let refl = beam_splitter(FRAC_PI_2, (1, 2), 3).unwrap();
        assert!(close(refl.matrix()[(2, 4)], 1.0, 1e-15));
        assert!(close(refl.matrix()[(4, 2)], -1.0, 1e-15));
        assert!(close(refl.matrix()[(2, 2)], 0.0, 1e-16));
        let omega = SymplecticForm::new(3).matrix();
        assert!((m.transpose() * &omega * m - &omega).amax() < 1e-12);
    }

    #[test]
    fn rotation_and_composition_stay_symplectic() {
        let omega = SymplecticForm::new(2).matrix();
        let a = rotation(0.3, 0, 2).unwrap();
        let b = squeezer(0.8, (0, 1), 2).unwrap();
        let c = a.after(&b).unwrap();
        let dev = (c.matrix().transpose() * &omega * c.matrix() - &omega).amax();
        assert!(dev < 1e-12);
        assert!(SymplecticGate::custom(c.matrix().clone()).is_ok());
        assert!(SymplecticGate::custom(DMatrix::identity(4, 4) * 2.0).is_err());
    }

    #[test]
    fn gate_index_errors() {
        assert!(matches!(
            squeezer(0.1, (0, 3), 2),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(squeezer(0.1, (1, 1), 3).is_err());
    }

    #[test]
    fn apply_reproduces_the_example_construction() {
        let (r, theta) = (0.5, 0.7);
        let s_ab = squeezer(r, (0, 1), 3).unwrap();
        let m_bc = beam_splitter(theta, (1, 2), 3).unwrap();
        let st = apply(&apply(&GaussianState::vacuum(3), &s_ab).unwrap(), &m_bc).unwrap();
        // entrywise equality with the direct matrix product
        let manual =
            m_bc.matrix() * s_ab.matrix() * s_ab.matrix().transpose() * m_bc.matrix().transpose();
        assert!((st.sigma() - manual).amax() < 1e-14);
        // symplectic conjugation preserves purity
        assert!(st.complex_structure().purity_deviation() < 1e-12);
        // identity gate is a no-op
        let id = beam_splitter(0.0, (0, 1), 3).unwrap();
        let same = apply(&st, &id).unwrap();
        assert!((same.sigma() - st.sigma()).amax() == 0.0);
    }

    #[test]
    fn closed_forms_at_theta_zero() {
        for r in [0.1, 0.5, 1.0, 2.0] {
            let (d_sym, d_c) = ho_closed_forms(r, 0.0);
            assert!(close(d_sym, 2.0, 1e-12), "d_sym(r={r}) = {d_sym}");
            assert!(close(d_c, -2.0, 1e-12), "d_c(r={r}) = {d_c}");
        }
    }

    #[test]
    fn pipeline_matches_closed_forms_at_theta_zero() {
        let ex = ho_example(0.75, 0.0).unwrap();
        assert!(close(ex.report.d_sym.unwrap(), 2.0, 1e-10));
        assert!(close(ex.report.d_c.unwrap(), -2.0, 1e-10));
        assert_eq!(ex.report.verdict, Verdict::Entangled);
    }

    #[test]
    fn pipeline_matches_closed_forms_on_a_grid() {
        for i in 0..12 {
            let r = 0.1 + 0.17 * i as f64;
            for k in 1..40 {
                let theta = PI * k as f64 / 40.0;
                if near_half_pi(theta) {
                    continue;
                }
                let ex = ho_example(r, theta).unwrap();
                let (d_sym, d_c) = ho_closed_forms(r, theta);
                let ds = ex.report.d_sym.expect("applicable");
                let dc = ex.report.d_c.expect("applicable");
                assert!(
                    close(ds, d_sym, 1e-10 * d_sym.abs().max(1.0)),
                    "r={r} theta={theta}: {ds} vs {d_sym}"
                );
                assert!(
                    close(dc, d_c, 1e-10 * d_c.abs().max(1.0)),
                    "r={r} theta={theta}: {dc} vs {d_c}"
                );
            }
        }
    }

    #[test]
    fn half_pi_is_not_applicable_with_zero_negativity() {
        let ex = ho_example(0.5, FRAC_PI_2).unwrap();
        assert_eq!(ex.report.verdict, Verdict::NotApplicable);
        assert!(close(ex.report.log_negativity, 0.0, 1e-12));
    }

    #[test]
    fn negativity_and_threshold_gap_vanish_together() {
        let r = 0.5;
        let n = 200;
        for k in 1..n {
            let theta = PI * k as f64 / n as f64;
            let ex = ho_example(r, theta).unwrap();
            if near_half_pi(theta) || ex.report.verdict == Verdict::NotApplicable {
                continue;
            }
            let dt = ex.report.d_t.unwrap();
            let en = ex.report.log_negativity;
            // E_N and d_t are strictly positive away from (n + 1/2) pi
            assert!(en > 0.0 && dt > 0.0, "theta={theta}: en={en}, dt={dt}");
        }
    }

    #[test]
    fn partner_weights_follow_cos_sin_and_ignore_r() {
        for theta in [0.4, 1.0, 2.2] {
            let w1 = ho_example(0.3, theta).unwrap().partner_weights.unwrap();
            let w2 = ho_example(1.5, theta).unwrap().partner_weights.unwrap();
            assert!(close(w1.0, theta.cos().abs(), 1e-10));
            assert!(close(w1.1, theta.sin().abs(), 1e-10));
            assert!(close(w1.0, w2.0, 1e-10));
            assert!(close(w1.1, w2.1, 1e-10));
        }
    }
}
