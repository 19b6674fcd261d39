//! Complexified phase space: vectors, the symplectic product, mode
//! subspaces, symplectic projectors and symplectic Gram-Schmidt.
//!
//! Conventions fixed here and used everywhere else:
//!
//! - Darboux ordering (x1, p1, ..., xN, pN);
//! - Omega is the block-diagonal ⊕ [[0, 1], [-1, 0]];
//! - the Hermitian (indefinite) symplectic product is
//!   `<u, v> = i * u^dag Omega v`, conjugate-linear in the first slot.
//!
//! With these choices a canonically conjugate real pair (g1, g2) satisfies
//! `<g1, g2> = i`, and the complex combination `(g1 - i g2)/sqrt(2)` has unit
//! symplectic norm, matching the harmonic-oscillator and field-mode bases
//! used throughout the crate.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::tol;

/// A vector of the complexified phase space in Darboux ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVector {
    coeffs: DVector<C64>,
}

impl PhaseVector {
    /// Builds a vector from its 2N Darboux components.
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() < 2 || !coeffs.len().is_multiple_of(2) {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: coeffs.len(),
            });
        }
        if coeffs
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            coeffs: DVector::from_vec(coeffs),
        })
    }

    pub fn from_dvector(coeffs: DVector<C64>) -> Result<Self> {
        Self::new(coeffs.as_slice().to_vec())
    }

    /// Builds a real vector from f64 Darboux components.
    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(n_modes: usize) -> Self {
        Self {
            coeffs: DVector::zeros(2 * n_modes),
        }
    }

    /// The complex basis vector of one standard Darboux mode: for mode k this
    /// is (i e_x + e_p)/sqrt(2), the unit-norm eigenvector of the vacuum
    /// complex structure on that mode.
    pub fn standard_mode(n_modes: usize, mode: usize) -> Result<Self> {
        if mode >= n_modes {
            return Err(Error::IndexOutOfRange {
                index: mode,
                n_modes,
            });
        }
        let mut v = DVector::zeros(2 * n_modes);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        v[2 * mode] = C64::new(0.0, s);
        v[2 * mode + 1] = C64::new(s, 0.0);
        Ok(Self { coeffs: v })
    }

    pub fn n_modes(&self) -> usize {
        self.coeffs.len() / 2
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &DVector<C64> {
        &self.coeffs
    }

    /// Componentwise complex conjugate in the Darboux basis.
    pub fn conjugate(&self) -> Self {
        Self {
            coeffs: self.coeffs.map(|c| c.conj()),
        }
    }

    pub fn scale(&self, a: C64) -> Self {
        Self {
            coeffs: &self.coeffs * a,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self {
            coeffs: &self.coeffs + &other.coeffs,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self {
            coeffs: &self.coeffs - &other.coeffs,
        })
    }

    /// Euclidean norm of the Darboux coefficients. This is the norm used for
    /// residual checks: the symplectic "norm" can vanish on nonzero vectors.
    pub fn euclidean_norm(&self) -> f64 {
        self.coeffs.norm()
    }

    pub fn is_real(&self, tolerance: f64) -> bool {
        self.coeffs.iter().all(|c| c.im.abs() <= tolerance)
    }

    pub fn real_part(&self) -> Self {
        Self {
            coeffs: self.coeffs.map(|c| C64::new(c.re, 0.0)),
        }
    }

    pub fn imag_part(&self) -> Self {
        Self {
            coeffs: self.coeffs.map(|c| C64::new(c.im, 0.0)),
        }
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(())
    }

    /// Multiplies by the phase that makes the largest-magnitude component
    /// real-positive (first index wins ties within a 1e-9 relative band).
    /// All exported quantities are independent of this convention.
    pub fn phase_normalized(&self) -> Self {
        let mut max = 0.0f64;
        for c in self.coeffs.iter() {
            max = max.max(c.norm());
        }
        if max == 0.0 {
            return self.clone();
        }
        for c in self.coeffs.iter() {
            if c.norm() >= max * (1.0 - 1e-9) {
                return self.scale(c.conj() / c.norm());
            }
        }
        self.clone()
    }
}

impl Serialize for PhaseVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.coeffs.iter().map(|c| [c.re, c.im]).collect();
        pairs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PhaseVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let pairs: Vec<[f64; 2]> = Vec::deserialize(deserializer)?;
        PhaseVector::new(pairs.iter().map(|p| C64::new(p[0], p[1])).collect())
            .map_err(D::Error::custom)
    }
}

/// The standard symplectic form on N modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymplecticForm {
    n_modes: usize,
}

impl SymplecticForm {
    pub fn new(n_modes: usize) -> Self {
        Self { n_modes }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// The matrix ⊕ [[0, 1], [-1, 0]].
    pub fn matrix(&self) -> DMatrix<f64> {
        let d = 2 * self.n_modes;
        let mut m = DMatrix::zeros(d, d);
        for k in 0..self.n_modes {
            m[(2 * k, 2 * k + 1)] = 1.0;
            m[(2 * k + 1, 2 * k)] = -1.0;
        }
        m
    }

    /// The complex-bilinear two-form u^T Omega v (no conjugation). A
    /// canonically conjugate real pair gives +1.
    pub fn two_form(&self, u: &PhaseVector, v: &PhaseVector) -> Result<C64> {
        if u.n_modes() != self.n_modes || v.n_modes() != self.n_modes {
            return Err(Error::DimensionMismatch {
                expected: 2 * self.n_modes,
                got: u.dim().max(v.dim()),
            });
        }
        let (uc, vc) = (u.coeffs(), v.coeffs());
        let mut s = C64::new(0.0, 0.0);
        for k in 0..self.n_modes {
            s += uc[2 * k] * vc[2 * k + 1] - uc[2 * k + 1] * vc[2 * k];
        }
        Ok(s)
    }
}

/// The Hermitian symplectic product `<u, v> = i u^dag Omega v`.
///
/// Sesquilinear (conjugate-linear in the first slot), Hermitian, indefinite.
pub fn symplectic_product(u: &PhaseVector, v: &PhaseVector) -> Result<C64> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            got: v.dim(),
        });
    }
    Ok(sprod_unchecked(u, v))
}

pub(crate) fn sprod_unchecked(u: &PhaseVector, v: &PhaseVector) -> C64 {
    let (uc, vc) = (u.coeffs(), v.coeffs());
    let n = uc.len() / 2;
    let mut s = C64::new(0.0, 0.0);
    for k in 0..n {
        s += uc[2 * k].conj() * vc[2 * k + 1] - uc[2 * k + 1].conj() * vc[2 * k];
    }
    C64::new(0.0, 1.0) * s
}

/// An ordered, symplectically orthonormal complex basis {g_I} defining a
/// subsystem of k modes. The conjugate partners g_I^* are implicit, so the
/// subspace has complex dimension 2k.
#[derive(Debug, Clone)]
pub struct ModeSubspace {
    ambient_modes: usize,
    basis: Vec<PhaseVector>,
}

impl ModeSubspace {
    /// Validates the orthonormality invariants `<g_I, g_J> = delta_IJ` and
    /// `<g_I, g_J^*> = 0` at the user-facing tolerance.
    pub fn new(basis: Vec<PhaseVector>) -> Result<Self> {
        if basis.is_empty() {
            return Err(Error::InvalidConfig("empty subspace basis".into()));
        }
        let ambient = basis[0].n_modes();
        for v in &basis {
            if v.n_modes() != ambient {
                return Err(Error::DimensionMismatch {
                    expected: 2 * ambient,
                    got: v.dim(),
                });
            }
        }
        let s = Self {
            ambient_modes: ambient,
            basis,
        };
        let dev = s.gram_deviation();
        if dev > tol::VALIDATION {
            return Err(Error::NonOrthonormalBasis { max_dev: dev });
        }
        Ok(s)
    }

    pub fn single(gamma: PhaseVector) -> Result<Self> {
        Self::new(vec![gamma])
    }

    /// The subspace of one standard Darboux mode.
    pub fn standard_mode(n_modes: usize, mode: usize) -> Result<Self> {
        Self::new(vec![PhaseVector::standard_mode(n_modes, mode)?])
    }

    /// The subspace spanned by several standard Darboux modes.
    pub fn standard_modes(n_modes: usize, modes: &[usize]) -> Result<Self> {
        let basis = modes
            .iter()
            .map(|&m| PhaseVector::standard_mode(n_modes, m))
            .collect::<Result<Vec<_>>>()?;
        Self::new(basis)
    }

    pub fn ambient_modes(&self) -> usize {
        self.ambient_modes
    }

    pub fn n_modes(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[PhaseVector] {
        &self.basis
    }

    /// Largest deviation of the basis from exact symplectic orthonormality.
    pub fn gram_deviation(&self) -> f64 {
        let mut dev = 0.0f64;
        for (i, u) in self.basis.iter().enumerate() {
            for (j, v) in self.basis.iter().enumerate() {
                let d = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((sprod_unchecked(u, v) - C64::new(d, 0.0)).norm());
                dev = dev.max(sprod_unchecked(&u.conjugate(), v).norm());
            }
        }
        dev
    }

    /// Symplectic projector onto the subspace:
    /// `Pi(v) = sum_I [ g_I <g_I, v> - g_I^* <g_I^*, v> ]`.
    pub fn project(&self, v: &PhaseVector) -> Result<PhaseVector> {
        if v.n_modes() != self.ambient_modes {
            return Err(Error::DimensionMismatch {
                expected: 2 * self.ambient_modes,
                got: v.dim(),
            });
        }
        let mut out = DVector::zeros(v.dim());
        for g in &self.basis {
            let gs = g.conjugate();
            let a = sprod_unchecked(g, v);
            let b = sprod_unchecked(&gs, v);
            out += g.coeffs() * a - gs.coeffs() * b;
        }
        Ok(PhaseVector { coeffs: out })
    }

    /// Projector onto the symplectic orthogonal complement, `1 - Pi`.
    pub fn complement_project(&self, v: &PhaseVector) -> Result<PhaseVector> {
        let p = self.project(v)?;
        v.sub(&p)
    }

    /// A real Darboux basis (e_1, f_1, ..., e_k, f_k) of the subspace with
    /// `<e_I, f_I> = i`, built from the complex basis as
    /// e = (g + g^*)/sqrt(2), f = i (g - g^*)/sqrt(2).
    pub fn real_darboux_basis(&self) -> Vec<PhaseVector> {
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let i = C64::new(0.0, 1.0);
        let mut out = Vec::with_capacity(2 * self.basis.len());
        for g in &self.basis {
            let gs = g.conjugate();
            out.push(g.add(&gs).unwrap().scale(s).real_part());
            out.push(g.sub(&gs).unwrap().scale(i * s).real_part());
        }
        out
    }

    /// Concatenates two mutually independent subspaces into one.
    pub fn join(&self, other: &Self) -> Result<Self> {
        if self.ambient_modes != other.ambient_modes {
            return Err(Error::DimensionMismatch {
                expected: 2 * self.ambient_modes,
                got: 2 * other.ambient_modes,
            });
        }
        let mut basis = self.basis.clone();
        basis.extend(other.basis.iter().cloned());
        Self::new(basis)
    }

    /// Subspace distance measured as the sine of the largest principal angle
    /// between the Darboux-coefficient column spans (conjugates included).
    pub fn subspace_distance(&self, other: &Self) -> Result<f64> {
        if self.ambient_modes != other.ambient_modes {
            return Err(Error::DimensionMismatch {
                expected: 2 * self.ambient_modes,
                got: 2 * other.ambient_modes,
            });
        }
        let qa = self.euclidean_frame();
        let qb = other.euclidean_frame();
        // sigma_max of (I - Qa Qa^dag) Qb
        let proj = &qa * (qa.adjoint() * &qb);
        let resid = &qb - proj;
        let svd = resid.svd(false, false);
        Ok(svd.singular_values.max())
    }

    /// Euclidean-orthonormal frame of span{g_I, g_I^*}.
    fn euclidean_frame(&self) -> DMatrix<C64> {
        let d = 2 * self.ambient_modes;
        let k = self.basis.len();
        let mut m = DMatrix::zeros(d, 2 * k);
        for (j, g) in self.basis.iter().enumerate() {
            m.set_column(j, g.coeffs());
            m.set_column(k + j, &g.coeffs().map(|c| c.conj()));
        }
        orthonormal_columns(&m, 1e-12)
    }
}

impl Serialize for ModeSubspace {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.basis.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ModeSubspace {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let basis: Vec<PhaseVector> = Vec::deserialize(deserializer)?;
        ModeSubspace::new(basis).map_err(D::Error::custom)
    }
}

/// Euclidean-orthonormal basis of the column span, with rank truncation.
fn orthonormal_columns(m: &DMatrix<C64>, rel_tol: f64) -> DMatrix<C64> {
    let svd = m.clone().svd(true, false);
    let u = svd.u.as_ref().expect("svd with u requested");
    let smax = svd.singular_values.max();
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > smax * rel_tol)
        .count();
    u.columns(0, rank).into_owned()
}

/// Symplectic Gram-Schmidt: turns a spanning set (conjugates implied) into a
/// symplectically orthonormal [`ModeSubspace`] with the same span.
///
/// Pivoting picks the candidate with the largest normalized |<v, v>|; when
/// every candidate has vanishing symplectic norm (e.g. real Darboux pairs)
/// it falls back to pairing two real vectors with the largest |two-form|.
/// A canonically conjugate real pair (g1, g2) with two-form +1 maps exactly
/// to (g1 - i g2)/sqrt(2) before phase normalization. Inputs that already
/// satisfy the orthonormality invariants are returned unchanged up to the
/// phase convention.
pub fn orthonormalize(vectors: &[PhaseVector]) -> Result<ModeSubspace> {
    if vectors.is_empty() {
        return Err(Error::InvalidConfig("empty spanning set".into()));
    }
    let ambient = vectors[0].n_modes();
    for v in vectors {
        if v.n_modes() != ambient {
            return Err(Error::DimensionMismatch {
                expected: 2 * ambient,
                got: v.dim(),
            });
        }
        if v.coeffs()
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
    }

    // Fast path: already orthonormal input stays fixed (up to phase), which
    // also makes the operation idempotent.
    if let Ok(s) = ModeSubspace::new(
        vectors
            .iter()
            .map(|v| v.phase_normalized())
            .collect::<Vec<_>>(),
    ) {
        if s.gram_deviation() <= tol::ALGEBRAIC * 10.0 {
            return Ok(s);
        }
    }

    // Span of inputs and conjugates, with rank detection and the
    // non-degeneracy (condition number) check on the restricted product.
    let d = 2 * ambient;
    let mut cols = DMatrix::zeros(d, 2 * vectors.len());
    for (j, v) in vectors.iter().enumerate() {
        cols.set_column(2 * j, v.coeffs());
        cols.set_column(2 * j + 1, &v.coeffs().map(|c| c.conj()));
    }
    let q = orthonormal_columns(&cols, 1e-12);
    let dim = q.ncols();
    if !dim.is_multiple_of(2) {
        return Err(Error::NonSymplecticSubspace {
            cond: f64::INFINITY,
        });
    }
    let omega = SymplecticForm::new(ambient);
    let omc = omega.matrix().map(|x| C64::new(x, 0.0));
    let gram = (q.adjoint() * (&omc * &q)) * C64::new(0.0, 1.0);
    let sv = gram.svd(false, false).singular_values;
    let cond = sv.max() / sv.min().max(f64::MIN_POSITIVE);
    if !(cond.is_finite()) || cond > tol::SYMPLECTIC_COND_LIMIT {
        return Err(Error::NonSymplecticSubspace { cond });
    }
    let n_target = dim / 2;

    // Candidate pool: inputs plus conjugates (deduplicated for real inputs).
    let mut pool: Vec<PhaseVector> = Vec::new();
    for v in vectors {
        pool.push(v.clone());
        if !v.is_real(0.0) {
            pool.push(v.conjugate());
        }
    }

    let mut modes: Vec<PhaseVector> = Vec::new();
    let scale0 = pool
        .iter()
        .map(|v| v.euclidean_norm())
        .fold(0.0f64, f64::max);

    while modes.len() < n_target {
        // Residuals against the modes found so far.
        let found = ModeSubspace {
            ambient_modes: ambient,
            basis: modes.clone(),
        };
        let mut residuals: Vec<PhaseVector> = Vec::new();
        for v in &pool {
            let r = if modes.is_empty() {
                v.clone()
            } else {
                found.complement_project(v)?
            };
            if r.euclidean_norm() > 1e-10 * scale0 {
                residuals.push(r);
            }
        }
        if residuals.is_empty() {
            return Err(Error::NonSymplecticSubspace { cond });
        }

        // Pivot on the largest normalized |<v, v>|.
        let mut best: Option<(f64, usize)> = None;
        for (i, r) in residuals.iter().enumerate() {
            let nn = sprod_unchecked(r, r).re;
            let q = nn.abs() / (r.euclidean_norm().powi(2));
            if best.is_none_or(|(bq, _)| q > bq) {
                best = Some((q, i));
            }
        }
        let (qmax, imax) = best.unwrap();

        if qmax > 1e-3 {
            let r = &residuals[imax];
            let nn = sprod_unchecked(r, r).re;
            let g = if nn > 0.0 {
                r.scale(C64::new(1.0 / nn.sqrt(), 0.0))
            } else {
                r.conjugate().scale(C64::new(1.0 / (-nn).sqrt(), 0.0))
            };
            modes.push(g.phase_normalized());
            continue;
        }

        // Degenerate self-norms: realify the residual pool and pair two real
        // vectors with the largest normalized two-form.
        let mut reals: Vec<PhaseVector> = Vec::new();
        for r in &residuals {
            let re = r.real_part();
            let im = r.imag_part();
            if re.euclidean_norm() > 1e-12 * scale0 {
                reals.push(re);
            }
            if im.euclidean_norm() > 1e-12 * scale0 {
                reals.push(im);
            }
        }
        let mut bestpair: Option<(f64, usize, usize)> = None;
        for i in 0..reals.len() {
            for j in 0..reals.len() {
                if i == j {
                    continue;
                }
                let c = omega.two_form(&reals[i], &reals[j])?.re;
                let q = c / (reals[i].euclidean_norm() * reals[j].euclidean_norm());
                if bestpair.is_none_or(|(bq, _, _)| q > bq) {
                    bestpair = Some((q, i, j));
                }
            }
        }
        let (qpair, ip, jp) = bestpair.ok_or(Error::NonSymplecticSubspace { cond })?;
        if qpair < 1e-8 {
            return Err(Error::NonSymplecticSubspace { cond });
        }
        let e = reals[ip].clone();
        let c = omega.two_form(&e, &reals[jp])?.re;
        let f = reals[jp].scale(C64::new(1.0 / c, 0.0));
        // g = (e - i f)/sqrt(2) has unit symplectic norm by construction.
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let g = e.sub(&f.scale(C64::new(0.0, 1.0)))?.scale(s);
        // One re-orthogonalization pass guards against drift for skewed pairs.
        let g = if modes.is_empty() {
            g
        } else {
            ModeSubspace {
                ambient_modes: ambient,
                basis: modes.clone(),
            }
            .complement_project(&g)?
        };
        let nn = sprod_unchecked(&g, &g).re;
        if nn.abs() < 1e-12 {
            return Err(Error::NonSymplecticSubspace { cond });
        }
        let g = if nn > 0.0 {
            g.scale(C64::new(1.0 / nn.sqrt(), 0.0))
        } else {
            g.conjugate().scale(C64::new(1.0 / (-nn).sqrt(), 0.0))
        };
        modes.push(g.phase_normalized());
    }

    let out = ModeSubspace {
        ambient_modes: ambient,
        basis: modes,
    };
    let dev = out.gram_deviation();
    if dev > tol::VALIDATION {
        return Err(Error::NonOrthonormalBasis { max_dev: dev });
    }
    Ok(out)
}
