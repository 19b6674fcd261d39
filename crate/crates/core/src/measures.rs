//! Correlation and entanglement quantifiers: the mode overlap, the
//! symmetric overlap `D^sym` (projection and determinant routes), the
//! state-dependent threshold `D_c`, PPT spectra, logarithmic negativity,
//! the two-mode criterion verdict, and the small-entanglement coefficient
//! w(Delta).
//!
//! The central facts wired through this module: for two independent
//! single-mode subsystems of a Gaussian state,
//!
//! - `D^sym = D_{ApB} + D_{BpA} = (-det J_C) (1/(det J_A - 1) + 1/(det J_B - 1))`,
//! - A and B (mutually correlated) are entangled iff `D^sym > D_c`,
//! - which is equivalent to the PPT statement `nu_tilde_minus < 1`.
//!
//! `D_{ApB} = 0` together with `D_{ABp} = 0` does NOT imply that A and B
//! are uncorrelated: a state with position-position correlations only has
//! det J_C = 0 with a nonzero correlation block. The criterion still
//! decides entanglement for such states; see the caveat test below.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partner::partner_subspace;
use crate::phase::{sprod_unchecked, ModeSubspace};
use crate::state::{ComplexStructure, GaussianState, StateSpec, TwoModeBlocks};
use crate::tol;

/// Kinematic overlap between two mode subspaces:
/// `D_XY = sum_J <Pi_X g_J^(Y), Pi_X g_J^(Y)>`.
///
/// Symmetric, invariant under local symplectic transformations on either
/// side, zero for independent subsystems (but not only for them: it is an
/// indefinite quantity and can vanish by cancellation).
pub fn overlap(x: &ModeSubspace, y: &ModeSubspace) -> Result<f64> {
    if x.ambient_modes() != y.ambient_modes() {
        return Err(Error::DimensionMismatch {
            expected: 2 * x.ambient_modes(),
            got: 2 * y.ambient_modes(),
        });
    }
    let mut total = 0.0;
    for g in y.basis() {
        let p = x.project(g)?;
        total += sprod_unchecked(&p, &p).re;
    }
    Ok(total)
}

/// `D^sym` through the partner construction: `D_{ApB} + D_{BpA}`.
///
/// Requires a pure global state and independent, mutually correlated
/// subsystems (so both partners exist).
pub fn d_sym_projection(j: &ComplexStructure, a: &ModeSubspace, b: &ModeSubspace) -> Result<f64> {
    let ap = partner_subspace(j, a)?;
    let bp = partner_subspace(j, b)?;
    Ok(overlap(&ap, b)? + overlap(&bp, a)?)
}

/// `D^sym` through the determinant invariants:
/// `(-det J_C) (1/(det J_A - 1) + 1/(det J_B - 1))`.
pub fn d_sym_determinant(blocks: &TwoModeBlocks) -> Result<f64> {
    let da = blocks.det_ja - 1.0;
    let db = blocks.det_jb - 1.0;
    if da <= tol::BOUNDARY || db <= tol::BOUNDARY {
        return Err(Error::NearPureReduction {
            det_j: blocks.det_ja.min(blocks.det_jb),
        });
    }
    Ok((1.0 / da + 1.0 / db) * (-blocks.det_jc))
}

/// The state-dependent entanglement threshold:
/// `D_c = 1/2 [ (det J_AB - det J_A)/(det J_B - 1)
///            + (det J_AB - det J_B)/(det J_A - 1) ] - 1`.
pub fn d_critical(blocks: &TwoModeBlocks) -> Result<f64> {
    let da = blocks.det_ja - 1.0;
    let db = blocks.det_jb - 1.0;
    if da <= tol::BOUNDARY || db <= tol::BOUNDARY {
        return Err(Error::NearPureReduction {
            det_j: blocks.det_ja.min(blocks.det_jb),
        });
    }
    Ok(0.5 * ((blocks.det_jab - blocks.det_ja) / db + (blocks.det_jab - blocks.det_jb) / da) - 1.0)
}

/// Symplectic eigenvalues of the partially transposed two-mode state:
/// `nu_tilde_pm^2 = (delta_tilde ± sqrt(delta_tilde^2 - 4 det J_AB)) / 2`.
pub fn pt_spectrum(blocks: &TwoModeBlocks) -> Result<(f64, f64)> {
    let disc = blocks.delta_tilde * blocks.delta_tilde - 4.0 * blocks.det_jab;
    if disc < -tol::VALIDATION {
        return Err(Error::InconsistentBlocks { discriminant: disc });
    }
    let root = disc.max(0.0).sqrt();
    let plus = ((blocks.delta_tilde + root) / 2.0).max(0.0).sqrt();
    // rationalized to avoid cancellation when delta_tilde >> 1
    let minus = (2.0 * blocks.det_jab.max(0.0) / (blocks.delta_tilde + root)).sqrt();
    Ok((plus, minus))
}

/// Logarithmic negativity `E_N = max(0, -log2 nu_tilde_minus)`.
pub fn log_negativity(blocks: &TwoModeBlocks) -> f64 {
    (-blocks.nu_tilde_minus.log2()).max(0.0)
}

/// First-order coefficient of the small-entanglement expansion
/// `E_N ≈ w(Delta) (D^sym - D_c)`:
/// `w = (1/ln 2) Delta_A Delta_B / (Delta_AB (Delta_A + Delta_B))`
/// with `Delta_X = det J_X - 1`.
pub fn w_coefficient(blocks: &TwoModeBlocks) -> Result<f64> {
    let da = blocks.det_ja - 1.0;
    let db = blocks.det_jb - 1.0;
    let dab = blocks.det_jab - 1.0;
    if da <= tol::BOUNDARY || db <= tol::BOUNDARY || dab <= tol::BOUNDARY {
        return Err(Error::NotApplicable(format!(
            "w(Delta) needs mixed A, B and AB (Delta_A={da:.3e}, Delta_B={db:.3e}, Delta_AB={dab:.3e})"
        )));
    }
    Ok(da * db / (dab * (da + db)) / std::f64::consts::LN_2)
}

/// Verdict of the two-mode entanglement criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Entangled,
    Separable,
    /// Inside the numerical dead zone around the separability boundary.
    Boundary,
    /// The criterion presumes mutually correlated subsystems with mixed
    /// reductions; outside that domain only E_N is meaningful.
    NotApplicable,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Entangled => "entangled",
            Verdict::Separable => "separable",
            Verdict::Boundary => "boundary",
            Verdict::NotApplicable => "not_applicable",
        };
        f.write_str(s)
    }
}

/// Everything the criterion produces for one two-mode state. Fields that
/// are undefined in the not-applicable regime serialize as null.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub d_sym: Option<f64>,
    pub d_c: Option<f64>,
    /// d_t = d_sym - d_c
    pub d_t: Option<f64>,
    pub log_negativity: f64,
    pub nu_tilde_minus: f64,
    pub verdict: Verdict,
    pub w_delta: Option<f64>,
    /// max(0, w_delta * d_t)
    pub first_order_logneg: Option<f64>,
}

/// Evaluates the criterion on a set of two-mode blocks.
///
/// The verdict is driven by the sign of `d_t = D^sym - D_c` (the overlap
/// criterion); PPT data (`nu_tilde_minus`, E_N) is always reported and the
/// two agree outside the boundary band.
pub fn criterion(blocks: &TwoModeBlocks) -> CriterionReport {
    let nu = blocks.nu_tilde_minus;
    let e_n = log_negativity(blocks);
    // the overlap quantities exist whenever both reductions are mixed
    let dets_mixed = blocks.det_ja > 1.0 + tol::BOUNDARY && blocks.det_jb > 1.0 + tol::BOUNDARY;
    let (d_sym, d_c, d_t) = if dets_mixed {
        let ds = d_sym_determinant(blocks).expect("mixedness checked");
        let dc = d_critical(blocks).expect("mixedness checked");
        (Some(ds), Some(dc), Some(ds - dc))
    } else {
        (None, None, None)
    };
    let w_delta = w_coefficient(blocks).ok();
    let first_order_logneg = match (w_delta, d_t) {
        (Some(w), Some(dt)) => Some((w * dt).max(0.0)),
        _ => None,
    };
    // the theorem presumes mutually correlated subsystems on top of that
    let applicable = dets_mixed && blocks.correlation_block_max() > tol::BOUNDARY;
    let verdict = if !applicable {
        Verdict::NotApplicable
    } else {
        let dt = d_t.expect("dets_mixed holds");
        if dt.abs() <= tol::BOUNDARY || (nu - 1.0).abs() <= tol::BOUNDARY {
            Verdict::Boundary
        } else if dt > 0.0 {
            Verdict::Entangled
        } else {
            Verdict::Separable
        }
    };
    CriterionReport {
        d_sym,
        d_c,
        d_t,
        log_negativity: e_n,
        nu_tilde_minus: nu,
        verdict,
        w_delta,
        first_order_logneg,
    }
}

/// Outcome counts of a Monte-Carlo run of the criterion against PPT.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomCheckReport {
    pub n_trials: usize,
    pub n_entangled: usize,
    pub n_separable: usize,
    pub n_boundary: usize,
    pub n_not_applicable: usize,
    /// Disagreements between (d_t > 0) and (nu_tilde_minus < 1) outside the
    /// boundary band. Zero for a correct implementation.
    pub n_disagreements: usize,
    pub seed: u64,
}

/// One row of a Monte-Carlo sweep over random two-mode states.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub seed: u64,
    pub det_ja: f64,
    pub det_jb: f64,
    pub det_jc: f64,
    pub det_jab: f64,
    pub d_sym: Option<f64>,
    pub d_c: Option<f64>,
    pub d_t: Option<f64>,
    pub nu_tilde_minus: f64,
    pub log_negativity: f64,
    pub verdict: Verdict,
}

impl SweepRow {
    pub const CSV_HEADER: &'static str =
        "seed,det_ja,det_jb,det_jc,det_jab,d_sym,d_c,d_t,nu_tilde_minus,log_negativity,verdict";

    pub fn to_csv(&self) -> String {
        let opt = |x: Option<f64>| x.map(|v| format!("{v:.16e}")).unwrap_or_default();
        format!(
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{},{},{},{:.16e},{:.16e},{}",
            self.seed,
            self.det_ja,
            self.det_jb,
            self.det_jc,
            self.det_jab,
            opt(self.d_sym),
            opt(self.d_c),
            opt(self.d_t),
            self.nu_tilde_minus,
            self.log_negativity,
            self.verdict
        )
    }
}

/// One Monte-Carlo trial: a random physical two-mode mixed state through
/// the full block/criterion pipeline. States always come from
/// `GaussianState::random` (never from sampling block matrices directly),
/// which guarantees physicality.
pub fn sweep_trial(trial_seed: u64) -> (SweepRow, CriterionReport) {
    let a = ModeSubspace::standard_mode(2, 0).expect("static");
    let b = ModeSubspace::standard_mode(2, 1).expect("static");
    let st = GaussianState::random(
        2,
        StateSpec::Mixed {
            nu_min: 1.0,
            nu_max: 2.5,
        },
        trial_seed,
    );
    let blocks = st
        .complex_structure()
        .two_mode_blocks(&a, &b)
        .expect("random states are physical by construction");
    let rep = criterion(&blocks);
    let row = SweepRow {
        seed: trial_seed,
        det_ja: blocks.det_ja,
        det_jb: blocks.det_jb,
        det_jc: blocks.det_jc,
        det_jab: blocks.det_jab,
        d_sym: rep.d_sym,
        d_c: rep.d_c,
        d_t: rep.d_t,
        nu_tilde_minus: rep.nu_tilde_minus,
        log_negativity: rep.log_negativity,
        verdict: rep.verdict,
    };
    (row, rep)
}

/// Runs the criterion on random physical two-mode mixed Gaussian states and
/// counts disagreements between the overlap verdict and PPT.
pub fn random_check(n_trials: usize, seed: u64) -> RandomCheckReport {
    let mut report = RandomCheckReport {
        n_trials,
        n_entangled: 0,
        n_separable: 0,
        n_boundary: 0,
        n_not_applicable: 0,
        n_disagreements: 0,
        seed,
    };
    for i in 0..n_trials {
        let (_, rep) = sweep_trial(seed.wrapping_add(i as u64));
        tally(&mut report, &rep);
    }
    report
}

/// Like [`random_check`] but also returns the per-trial sweep rows.
pub fn random_sweep(n_trials: usize, seed: u64) -> (RandomCheckReport, Vec<SweepRow>) {
    let mut report = RandomCheckReport {
        n_trials,
        n_entangled: 0,
        n_separable: 0,
        n_boundary: 0,
        n_not_applicable: 0,
        n_disagreements: 0,
        seed,
    };
    let mut rows = Vec::with_capacity(n_trials);
    for i in 0..n_trials {
        let (row, rep) = sweep_trial(seed.wrapping_add(i as u64));
        tally(&mut report, &rep);
        rows.push(row);
    }
    (report, rows)
}

fn tally(report: &mut RandomCheckReport, rep: &CriterionReport) {
    match rep.verdict {
        Verdict::Entangled => report.n_entangled += 1,
        Verdict::Separable => report.n_separable += 1,
        Verdict::Boundary => report.n_boundary += 1,
        Verdict::NotApplicable => report.n_not_applicable += 1,
    }
    if matches!(rep.verdict, Verdict::Entangled | Verdict::Separable) {
        let by_overlap = rep.d_t.expect("definite verdicts carry d_t") > 0.0;
        let by_ppt = rep.nu_tilde_minus < 1.0;
        if by_overlap != by_ppt {
            report.n_disagreements += 1;
        }
    }
}
