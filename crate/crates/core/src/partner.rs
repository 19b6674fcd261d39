//! Purification partner modes of subsystems of a pure Gaussian state.
//!
//! For a correlated subsystem A of a pure state with complex structure J,
//! the partner subspace is `Gamma_Ap = Pi_A^perp (J Gamma_A)`; it is
//! independent of A and the pair (A, A_p) is uncorrelated with everything
//! else, i.e. the partner absorbs all correlations with A.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::phase::{orthonormalize, sprod_unchecked, ModeSubspace, PhaseVector};
use crate::state::ComplexStructure;
use crate::tol;

/// Purity tolerance for the global state backing a partner construction.
const PURITY_TOL: f64 = 1e-9;

/// det J_A of a single-mode subsystem, straight from the symplectic products.
fn single_mode_det(j: &ComplexStructure, gamma: &PhaseVector) -> Result<f64> {
    let jg = j.apply(gamma)?;
    let jgs = j.apply(&gamma.conjugate())?;
    let diag = sprod_unchecked(gamma, &jg);
    let off = sprod_unchecked(gamma, &jgs);
    Ok(diag.norm_sqr() - off.norm_sqr())
}

/// The partner subspace `Pi_A^perp (J Gamma_A)` of a correlated subsystem.
///
/// For multimode A the map is applied to every basis vector and its
/// conjugate and the image is orthonormalized; only the span is meaningful.
pub fn partner_subspace(j: &ComplexStructure, a: &ModeSubspace) -> Result<ModeSubspace> {
    let dev = j.purity_deviation();
    if dev > PURITY_TOL {
        return Err(Error::NotPure { deviation: dev });
    }
    if j.is_uncorrelated(a, tol::VALIDATION)? {
        return Err(Error::UncorrelatedSubsystem);
    }
    let mut images = Vec::with_capacity(2 * a.n_modes());
    for g in a.basis() {
        for v in [g.clone(), g.conjugate()] {
            let img = a.complement_project(&j.apply(&v)?)?;
            if img.euclidean_norm() > 1e-12 {
                images.push(img);
            }
        }
    }
    if images.is_empty() {
        return Err(Error::UncorrelatedSubsystem);
    }
    orthonormalize(&images)
}

/// The normalized partner basis vector of a single-mode subsystem:
/// `g_Ap = (det J_A - 1)^(-1/2) Pi_A^perp (J g_A^*)`.
///
/// Together with its conjugate it is an orthonormal basis of the partner
/// mode. Defined up to the crate-wide phase convention.
pub fn partner_basis_vector(j: &ComplexStructure, a: &ModeSubspace) -> Result<PhaseVector> {
    if a.n_modes() != 1 {
        return Err(Error::InvalidConfig(
            "partner_basis_vector needs a single-mode subsystem".into(),
        ));
    }
    let dev = j.purity_deviation();
    if dev > PURITY_TOL {
        return Err(Error::NotPure { deviation: dev });
    }
    let gamma = &a.basis()[0];
    let det_j = single_mode_det(j, gamma)?;
    if det_j <= 1.0 + tol::VALIDATION {
        // includes the uncorrelated case det J_A = 1, where the
        // normalization 1/sqrt(det J_A - 1) is genuinely singular
        return Err(Error::NearPureReduction { det_j });
    }
    let image = a.complement_project(&j.apply(&gamma.conjugate())?)?;
    let scale = 1.0 / (det_j - 1.0).sqrt();
    Ok(image.scale(C64::new(scale, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits;
    use crate::phase::symplectic_product;
    use crate::state::{GaussianState, StateSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn tmsv(r: f64) -> GaussianState {
        let gate = circuits::squeezer(r, (0, 1), 2).unwrap();
        circuits::apply(&GaussianState::vacuum(2), &gate).unwrap()
    }

    fn ho_example_state(r: f64, theta: f64) -> GaussianState {
        let s_ab = circuits::squeezer(r, (0, 1), 3).unwrap();
        let m_bc = circuits::beam_splitter(theta, (1, 2), 3).unwrap();
        let st = circuits::apply(&GaussianState::vacuum(3), &s_ab).unwrap();
        circuits::apply(&st, &m_bc).unwrap()
    }

    /// The printed partner span of the worked example: the single mode
    /// spanned by cos(theta) g_B - sin(theta) g_C and its conjugate.
    fn printed_partner(theta: f64) -> ModeSubspace {
        let gb = PhaseVector::standard_mode(3, 1).unwrap();
        let gc = PhaseVector::standard_mode(3, 2).unwrap();
        let w = gb
            .scale(C64::new(theta.cos(), 0.0))
            .sub(&gc.scale(C64::new(theta.sin(), 0.0)))
            .unwrap();
        ModeSubspace::single(w.scale(C64::new(0.0, 1.0)).phase_normalized()).unwrap()
    }

    #[test]
    fn tmsv_partner_of_a_is_b() {
        let j = tmsv(0.5).complex_structure();
        let a = ModeSubspace::standard_mode(2, 0).unwrap();
        let b = ModeSubspace::standard_mode(2, 1).unwrap();
        let ap = partner_subspace(&j, &a).unwrap();
        assert!(ap.subspace_distance(&b).unwrap() < 1e-9);
        // the normalized basis vector spans mode B with unit norm
        let gap = partner_basis_vector(&j, &a).unwrap();
        let n = symplectic_product(&gap, &gap).unwrap();
        assert!((n - C64::new(1.0, 0.0)).norm() < 1e-9);
        assert!(b.complement_project(&gap).unwrap().euclidean_norm() < 1e-9);
        // and it is orthogonal to A and A^*
        let ga = &a.basis()[0];
        assert!(symplectic_product(&gap, ga).unwrap().norm() < 1e-9);
        assert!(symplectic_product(&gap, &ga.conjugate()).unwrap().norm() < 1e-9);
    }

    #[test]
    fn example_partner_weights_follow_the_beam_splitter() {
        for theta in [0.3, 0.7, 1.2, 2.0, 2.8] {
            let j = ho_example_state(0.5, theta).complex_structure();
            let a = ModeSubspace::standard_mode(3, 0).unwrap();
            let ap = partner_subspace(&j, &a).unwrap();
            let dist = ap.subspace_distance(&printed_partner(theta)).unwrap();
            assert!(dist < 1e-9, "theta={theta}: span distance {dist:.2e}");
        }
    }

    #[test]
    fn example_partner_limits_theta_zero_and_half_pi() {
        let a = ModeSubspace::standard_mode(3, 0).unwrap();
        let b = ModeSubspace::standard_mode(3, 1).unwrap();
        let c = ModeSubspace::standard_mode(3, 2).unwrap();
        let j0 = ho_example_state(0.8, 0.0).complex_structure();
        let ap = partner_subspace(&j0, &a).unwrap();
        assert!(ap.subspace_distance(&b).unwrap() < 1e-10);
        let j1 = ho_example_state(0.8, std::f64::consts::FRAC_PI_2).complex_structure();
        let ap = partner_subspace(&j1, &a).unwrap();
        assert!(ap.subspace_distance(&c).unwrap() < 1e-10);
    }

    #[test]
    fn vacuum_has_no_partner() {
        let j = GaussianState::vacuum(2).complex_structure();
        let a = ModeSubspace::standard_mode(2, 0).unwrap();
        assert!(matches!(
            partner_subspace(&j, &a),
            Err(Error::UncorrelatedSubsystem)
        ));
        assert!(matches!(
            partner_basis_vector(&j, &a),
            Err(Error::NearPureReduction { .. })
        ));
    }

    #[test]
    fn mixed_state_has_no_partner() {
        let j = GaussianState::thermal(&[2.0, 2.0])
            .unwrap()
            .complex_structure();
        let a = ModeSubspace::standard_mode(2, 0).unwrap();
        assert!(matches!(
            partner_subspace(&j, &a),
            Err(Error::NotPure { .. })
        ));
    }

    #[test]
    fn partner_purifies_random_states() {
        // (A + A_p) is uncorrelated for random pure 4-mode states
        for seed in 0..30u64 {
            let st = GaussianState::random(4, StateSpec::Pure, 900 + seed);
            let j = st.complex_structure();
            let a = ModeSubspace::standard_mode(4, seed as usize % 4).unwrap();
            let ap = match partner_subspace(&j, &a) {
                Ok(s) => s,
                Err(Error::UncorrelatedSubsystem) => continue,
                Err(e) => panic!("{e}"),
            };
            let joint = a.join(&ap).unwrap();
            assert!(j.is_uncorrelated(&joint, 1e-8).unwrap());
            // the joint pair carries all correlations: reduced state is pure
            let red = st.reduce(&joint).unwrap();
            assert!(red.complex_structure().purity_deviation() < 1e-8);
        }
    }

    #[test]
    fn partner_span_is_basis_independent() {
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let st = GaussianState::random(4, StateSpec::Pure, 77);
        let j = st.complex_structure();
        let a = ModeSubspace::standard_mode(4, 1).unwrap();
        let base = partner_subspace(&j, &a).unwrap();
        for _ in 0..8 {
            // re-phase and Bogoliubov-mix the basis of A: same partner span
            let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let z: f64 = rng.random_range(-0.8..0.8);
            let ga = &a.basis()[0];
            let mixed = ga
                .scale(C64::new(0.0, phi).exp() * C64::new(z.cosh(), 0.0))
                .add(&ga.conjugate().scale(C64::new(z.sinh(), 0.0)))
                .unwrap();
            let a2 = ModeSubspace::single(mixed).unwrap();
            let ap2 = partner_subspace(&j, &a2).unwrap();
            assert!(base.subspace_distance(&ap2).unwrap() < 1e-8);
        }
    }

    #[test]
    fn partner_of_partner_is_the_original_mode() {
        for seed in [3u64, 8, 21] {
            let st = GaussianState::random(4, StateSpec::Pure, seed);
            let j = st.complex_structure();
            let a = ModeSubspace::standard_mode(4, 0).unwrap();
            let ap = match partner_subspace(&j, &a) {
                Ok(s) => s,
                Err(Error::UncorrelatedSubsystem) => continue,
                Err(e) => panic!("{e}"),
            };
            let app = partner_subspace(&j, &ap).unwrap();
            assert!(app.subspace_distance(&a).unwrap() < 1e-8);
        }
    }

    #[test]
    fn multimode_partner_purifies() {
        let st = GaussianState::random(5, StateSpec::Pure, 1234);
        let j = st.complex_structure();
        let a = ModeSubspace::standard_modes(5, &[0, 1]).unwrap();
        let ap = partner_subspace(&j, &a).unwrap();
        let joint = a.join(&ap).unwrap();
        assert!(j.is_uncorrelated(&joint, 1e-7).unwrap());
    }
}
