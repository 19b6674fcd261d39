//! Gaussian states as covariance matrices, the complex structure
//! J = -Omega sigma, symplectic spectra, purity and correlation tests,
//! restricted two-mode blocks, and seeded random-state generation.

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase::{sprod_unchecked, ModeSubspace, PhaseVector, SymplecticForm};
use crate::tol;

/// A Gaussian state: real symmetric covariance matrix in the Darboux basis
/// (vacuum-normalized, vacuum sigma = identity) plus optional first moments.
///
/// First moments are stored but ignored by every correlation measure: the
/// covariance is taken about the mean, which encodes centering implicitly.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    sigma: DMatrix<f64>,
    mu: DVector<f64>,
}

impl GaussianState {
    /// Validates symmetry (1e-12) and physicality (all symplectic
    /// eigenvalues >= 1 - 1e-9), then stores the symmetrized matrix.
    pub fn new(sigma: DMatrix<f64>, mu: Option<DVector<f64>>) -> Result<Self> {
        let n2 = sigma.nrows();
        if n2 == 0 || !n2.is_multiple_of(2) || sigma.ncols() != n2 {
            return Err(Error::DimensionMismatch {
                expected: n2,
                got: sigma.ncols(),
            });
        }
        if sigma.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let asym = (&sigma - sigma.transpose()).amax();
        if asym > tol::ALGEBRAIC {
            return Err(Error::NonSymmetricSigma { max_dev: asym });
        }
        let sigma = (&sigma + sigma.transpose()) * 0.5;
        let mu = match mu {
            Some(m) => {
                if m.len() != n2 {
                    return Err(Error::DimensionMismatch {
                        expected: n2,
                        got: m.len(),
                    });
                }
                m
            }
            None => DVector::zeros(n2),
        };
        let state = Self { sigma, mu };
        let nu = state.williamson_spectrum()?;
        let nu_min = nu.last().copied().unwrap_or(0.0);
        if nu_min < 1.0 - tol::VALIDATION {
            return Err(Error::Unphysical { nu_min });
        }
        Ok(state)
    }

    pub fn vacuum(n_modes: usize) -> Self {
        Self {
            sigma: DMatrix::identity(2 * n_modes, 2 * n_modes),
            mu: DVector::zeros(2 * n_modes),
        }
    }

    /// Product of thermal modes with the given symplectic eigenvalues.
    pub fn thermal(nus: &[f64]) -> Result<Self> {
        let n = nus.len();
        let mut sigma = DMatrix::zeros(2 * n, 2 * n);
        for (k, &nu) in nus.iter().enumerate() {
            sigma[(2 * k, 2 * k)] = nu;
            sigma[(2 * k + 1, 2 * k + 1)] = nu;
        }
        Self::new(sigma, None)
    }

    pub fn n_modes(&self) -> usize {
        self.sigma.nrows() / 2
    }

    pub fn sigma(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    pub fn mu(&self) -> &DVector<f64> {
        &self.mu
    }

    /// The complex structure J = -Omega sigma (exact matrix product).
    pub fn complex_structure(&self) -> ComplexStructure {
        let omega = SymplecticForm::new(self.n_modes()).matrix();
        ComplexStructure {
            j: -(&omega * &self.sigma),
        }
    }

    /// Symplectic eigenvalues via the Williamson route: the singular values
    /// of sigma^(1/2) Omega sigma^(1/2) come in pairs (nu_I, nu_I).
    /// Descending order.
    pub fn williamson_spectrum(&self) -> Result<Vec<f64>> {
        let eig = self.sigma.clone().symmetric_eigen();
        let min_eig = eig.eigenvalues.min();
        if min_eig <= 0.0 {
            // sigma must be positive definite for any physical state
            return Err(Error::Unphysical { nu_min: min_eig });
        }
        let sqrt_vals = eig.eigenvalues.map(|x| x.sqrt());
        let half =
            &eig.eigenvectors * DMatrix::from_diagonal(&sqrt_vals) * eig.eigenvectors.transpose();
        let omega = SymplecticForm::new(self.n_modes()).matrix();
        let k = &half * omega * &half;
        let sv = k.svd(false, false).singular_values;
        let mut s: Vec<f64> = sv.iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        Ok(s.into_iter().step_by(2).collect())
    }

    /// Reduced Gaussian state on a subsystem: sigma entries are assembled
    /// from -i <b_i^*, J b_j> over a real Darboux basis of the subspace.
    pub fn reduce(&self, subspace: &ModeSubspace) -> Result<GaussianState> {
        let j = self.complex_structure();
        let sigma = j.reduce_sigma(subspace)?;
        // first moments restrict by contraction with the same basis
        let basis = subspace.real_darboux_basis();
        let mu = DVector::from_iterator(
            basis.len(),
            basis.iter().map(|b| {
                b.coeffs()
                    .iter()
                    .zip(self.mu.iter())
                    .map(|(c, m)| c.re * m)
                    .sum::<f64>()
            }),
        );
        GaussianState::new(sigma, Some(mu))
    }

    /// Seeded random Gaussian state built as sigma = S diag(nu) S^T with S a
    /// random symplectic in Euler form (orthogonal-symplectic, squeezers,
    /// orthogonal-symplectic). Deterministic for a fixed seed.
    pub fn random(n_modes: usize, spec: StateSpec, seed: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        Self::random_with_rng(n_modes, spec, &mut rng)
    }

    pub fn random_with_rng<R: Rng>(n_modes: usize, spec: StateSpec, rng: &mut R) -> Self {
        let s = random_symplectic(n_modes, rng);
        let mut d = DMatrix::zeros(2 * n_modes, 2 * n_modes);
        for k in 0..n_modes {
            let nu = match spec {
                StateSpec::Pure => 1.0,
                StateSpec::Mixed { nu_min, nu_max } => rng.random_range(nu_min..=nu_max),
            };
            d[(2 * k, 2 * k)] = nu;
            d[(2 * k + 1, 2 * k + 1)] = nu;
        }
        let sigma = &s * d * s.transpose();
        let sigma = (&sigma + sigma.transpose()) * 0.5;
        Self {
            sigma,
            mu: DVector::zeros(2 * n_modes),
        }
    }
}

impl Serialize for GaussianState {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            n_modes: usize,
            sigma: Vec<f64>,
            mu: &'a [f64],
        }
        // row-major serialization in the fixed Darboux ordering
        let d = self.sigma.nrows();
        let mut sigma = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                sigma.push(self.sigma[(i, j)]);
            }
        }
        Repr {
            n_modes: self.n_modes(),
            sigma,
            mu: self.mu.as_slice(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for GaussianState {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            n_modes: usize,
            sigma: Vec<f64>,
            mu: Option<Vec<f64>>,
        }
        let r = Repr::deserialize(de)?;
        let d = 2 * r.n_modes;
        if r.sigma.len() != d * d {
            return Err(serde::de::Error::custom("sigma length mismatch"));
        }
        let sigma = DMatrix::from_row_slice(d, d, &r.sigma);
        let mu = r.mu.map(DVector::from_vec);
        GaussianState::new(sigma, mu).map_err(serde::de::Error::custom)
    }
}

/// Spec for [`GaussianState::random`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateSpec {
    Pure,
    Mixed { nu_min: f64, nu_max: f64 },
}

/// Random symplectic in Euler form O1 * Z * O2 with O_i orthogonal-symplectic
/// (image of Haar-ish unitaries) and Z single-mode squeezers, |z| <= 1.
pub fn random_symplectic<R: Rng>(n_modes: usize, rng: &mut R) -> DMatrix<f64> {
    let o1 = random_orthogonal_symplectic(n_modes, rng);
    let o2 = random_orthogonal_symplectic(n_modes, rng);
    let mut z = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        let zk: f64 = rng.random_range(-1.0..1.0);
        z[(2 * k, 2 * k)] = zk.exp();
        z[(2 * k + 1, 2 * k + 1)] = (-zk).exp();
    }
    o1 * z * o2
}

/// Embeds a Haar-ish random unitary U = X + iY into Sp(2N) ∩ O(2N) in the
/// interleaved Darboux ordering.
pub fn random_orthogonal_symplectic<R: Rng>(n_modes: usize, rng: &mut R) -> DMatrix<f64> {
    let ginibre = DMatrix::from_fn(n_modes, n_modes, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    });
    let qr = ginibre.qr();
    let mut q = qr.q();
    let r = qr.r();
    // fix column phases so the distribution does not depend on the QR choice
    for j in 0..n_modes {
        let rjj = r[(j, j)];
        if rjj.norm() > 0.0 {
            let ph = rjj / rjj.norm();
            for i in 0..n_modes {
                q[(i, j)] *= ph.conj();
            }
        }
    }
    let mut o = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for a in 0..n_modes {
        for b in 0..n_modes {
            let u = q[(a, b)];
            o[(2 * a, 2 * b)] = u.re;
            o[(2 * a, 2 * b + 1)] = -u.im;
            o[(2 * a + 1, 2 * b)] = u.im;
            o[(2 * a + 1, 2 * b + 1)] = u.re;
        }
    }
    o
}

/// The linear map J = -Omega sigma associated with a Gaussian state.
///
/// Its eigenvalues come in pairs ±i nu_I with nu_I >= 1; the state is pure
/// exactly when J^2 = -I.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexStructure {
    j: DMatrix<f64>,
}

impl ComplexStructure {
    pub fn from_matrix(j: DMatrix<f64>) -> Self {
        Self { j }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.j
    }

    pub fn n_modes(&self) -> usize {
        self.j.nrows() / 2
    }

    /// Applies J to a phase vector (J is real, acting componentwise).
    pub fn apply(&self, v: &PhaseVector) -> Result<PhaseVector> {
        if v.dim() != self.j.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.j.nrows(),
                got: v.dim(),
            });
        }
        let n = v.dim();
        let mut out = DVector::zeros(n);
        for i in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..n {
                acc += v.coeffs()[k] * self.j[(i, k)];
            }
            out[i] = acc;
        }
        PhaseVector::from_dvector(out)
    }

    /// Symplectic eigenvalues from the spectrum of J directly: the
    /// eigenvalues are ±i nu_I, so the nu_I are the positive imaginary
    /// parts. Descending order.
    pub fn symplectic_spectrum(&self) -> Vec<f64> {
        let eig = self.j.clone().complex_eigenvalues();
        let mut im: Vec<f64> = eig.iter().map(|z| z.im.abs()).collect();
        im.sort_by(|a, b| b.total_cmp(a));
        im.into_iter().step_by(2).collect()
    }

    /// Same spectrum through the Williamson route on sigma = Omega J.
    pub fn williamson_spectrum(&self) -> Result<Vec<f64>> {
        self.to_state()?.williamson_spectrum()
    }

    /// Recovers the Gaussian state (sigma = Omega J, zero first moments).
    pub fn to_state(&self) -> Result<GaussianState> {
        let omega = SymplecticForm::new(self.n_modes()).matrix();
        GaussianState::new(omega * &self.j, None)
    }

    /// Max-norm deviation of J^2 from -I; zero exactly for pure states.
    pub fn purity_deviation(&self) -> f64 {
        let j2 = &self.j * &self.j;
        let d = self.j.nrows();
        let mut dev = 0.0f64;
        for i in 0..d {
            for k in 0..d {
                let idm = if i == k { 1.0 } else { 0.0 };
                dev = dev.max((j2[(i, k)] + idm).abs());
            }
        }
        dev
    }

    pub fn is_pure(&self, tolerance: f64) -> bool {
        self.purity_deviation() <= tolerance
    }

    /// True when J leaves the subspace invariant, i.e. the subsystem is
    /// uncorrelated with its symplectic complement. Residuals are measured
    /// in the Euclidean norm of Darboux coefficients.
    pub fn is_uncorrelated(&self, subspace: &ModeSubspace, tolerance: f64) -> Result<bool> {
        for g in subspace.basis() {
            let jg = self.apply(g)?;
            let resid = subspace.complement_project(&jg)?;
            if resid.euclidean_norm() > tolerance {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Reduced covariance over a real Darboux basis of the subspace:
    /// sigma_ij = -i <b_i^*, J b_j>.
    pub(crate) fn reduce_sigma(&self, subspace: &ModeSubspace) -> Result<DMatrix<f64>> {
        if 2 * subspace.ambient_modes() != self.j.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.j.nrows(),
                got: 2 * subspace.ambient_modes(),
            });
        }
        let basis = subspace.real_darboux_basis();
        let d = basis.len();
        let mut sigma = DMatrix::zeros(d, d);
        let images: Vec<PhaseVector> =
            basis.iter().map(|b| self.apply(b)).collect::<Result<_>>()?;
        for (i, bi) in basis.iter().enumerate() {
            for (j, jbj) in images.iter().enumerate() {
                let v = -C64::new(0.0, 1.0) * sprod_unchecked(&bi.conjugate(), jbj);
                sigma[(i, j)] = v.re;
            }
        }
        Ok(sigma)
    }

    /// Restricted two-mode complex-structure blocks for two independent
    /// single-mode subsystems.
    pub fn two_mode_blocks(&self, a: &ModeSubspace, b: &ModeSubspace) -> Result<TwoModeBlocks> {
        if a.n_modes() != 1 || b.n_modes() != 1 {
            return Err(Error::InvalidConfig(
                "two_mode_blocks needs single-mode subsystems".into(),
            ));
        }
        let ga = &a.basis()[0];
        let gb = &b.basis()[0];
        let (gas, gbs) = (ga.conjugate(), gb.conjugate());
        // independence check on all cross products
        let mut max_cross = 0.0f64;
        for u in [ga, &gas] {
            for v in [gb, &gbs] {
                max_cross = max_cross.max(sprod_unchecked(u, v).norm());
            }
        }
        if max_cross > tol::VALIDATION {
            return Err(Error::OverlappingSubsystems { max_cross });
        }

        let basis = [ga.clone(), gas, gb.clone(), gbs];
        let images: Vec<PhaseVector> =
            basis.iter().map(|v| self.apply(v)).collect::<Result<_>>()?;
        let mut m = DMatrix::zeros(4, 4);
        for (i, u) in basis.iter().enumerate() {
            let sign = if i % 2 == 1 {
                C64::new(-1.0, 0.0)
            } else {
                C64::new(1.0, 0.0)
            };
            for (j, jv) in images.iter().enumerate() {
                m[(i, j)] = sign * sprod_unchecked(u, jv);
            }
        }
        TwoModeBlocks::from_complex_matrix(&m)
    }
}

/// The 4x4 restricted complex structure of a two-mode subsystem in the
/// complex basis (g_A, g_A^*, g_B, g_B^*), with its determinant invariants
/// and partially transposed symplectic eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoModeBlocks {
    #[serde(skip)]
    pub j_a: Matrix2<C64>,
    #[serde(skip)]
    pub j_b: Matrix2<C64>,
    #[serde(skip)]
    pub j_c: Matrix2<C64>,
    pub det_ja: f64,
    pub det_jb: f64,
    pub det_jc: f64,
    pub det_jab: f64,
    /// Delta = det J_A + det J_B + 2 det J_C
    pub delta: f64,
    /// Delta-tilde = det J_A + det J_B - 2 det J_C
    pub delta_tilde: f64,
    pub nu_tilde_plus: f64,
    pub nu_tilde_minus: f64,
}

impl TwoModeBlocks {
    /// Builds the invariants from the 4x4 complex-basis matrix, checking the
    /// reality of the determinants, the single-mode purity bounds and the
    /// physical positivity set.
    pub fn from_complex_matrix(m: &DMatrix<C64>) -> Result<Self> {
        assert_eq!(m.nrows(), 4);
        assert_eq!(m.ncols(), 4);
        let block = |r: usize, c: usize| {
            Matrix2::new(m[(r, c)], m[(r, c + 1)], m[(r + 1, c)], m[(r + 1, c + 1)])
        };
        let j_a = block(0, 0);
        let j_b = block(2, 2);
        let j_c = block(0, 2);
        let det2 = |b: &Matrix2<C64>| b[(0, 0)] * b[(1, 1)] - b[(0, 1)] * b[(1, 0)];
        let det_ja_c = det2(&j_a);
        let det_jb_c = det2(&j_b);
        let det_jc_c = det2(&j_c);
        let det_jab_c = m.determinant();
        for d in [det_ja_c, det_jb_c, det_jc_c, det_jab_c] {
            if d.im.abs() > tol::DET_REALITY {
                return Err(Error::InvalidConfig(format!(
                    "determinant has imaginary residue {:.3e}",
                    d.im
                )));
            }
        }
        let (det_ja, det_jb, det_jc, det_jab) =
            (det_ja_c.re, det_jb_c.re, det_jc_c.re, det_jab_c.re);

        if det_ja < 1.0 - tol::VALIDATION || det_jb < 1.0 - tol::VALIDATION {
            return Err(Error::Unphysical {
                nu_min: det_ja.min(det_jb).max(0.0).sqrt(),
            });
        }
        let delta = det_ja + det_jb + 2.0 * det_jc;
        let delta_tilde = det_ja + det_jb - 2.0 * det_jc;
        // positivity set for a physical two-mode state
        if det_jab - delta + 1.0 < -tol::VALIDATION
            || delta * delta < 4.0 * det_jab - tol::VALIDATION
        {
            return Err(Error::Unphysical {
                nu_min: (det_jab - delta + 1.0).min(delta * delta - 4.0 * det_jab),
            });
        }
        let disc = delta_tilde * delta_tilde - 4.0 * det_jab;
        if disc < -tol::VALIDATION {
            return Err(Error::InconsistentBlocks { discriminant: disc });
        }
        let root = disc.max(0.0).sqrt();
        let nu_tilde_plus = ((delta_tilde + root) / 2.0).max(0.0).sqrt();
        // rationalized form of (delta_tilde - root)/2: no cancellation for
        // strongly squeezed states
        let nu_tilde_minus = (2.0 * det_jab.max(0.0) / (delta_tilde + root)).sqrt();
        Ok(Self {
            j_a,
            j_b,
            j_c,
            det_ja,
            det_jb,
            det_jc,
            det_jab,
            delta,
            delta_tilde,
            nu_tilde_plus,
            nu_tilde_minus,
        })
    }

    /// Largest magnitude among the correlation-block entries; zero exactly
    /// when A and B are mutually uncorrelated.
    pub fn correlation_block_max(&self) -> f64 {
        self.j_c.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Exports a symplectic spectrum as CSV with columns (index, nu).
pub fn spectrum_to_csv(nus: &[f64]) -> String {
    let mut out = String::from("index,nu\n");
    for (i, nu) in nus.iter().enumerate() {
        out.push_str(&format!("{},{:.16e}\n", i, nu));
    }
    out
}
