//! Optimal unambiguous discrimination of a symmetric-state family and the
//! minimum-error measurement concatenated at its inconclusive branch.
//!
//! The channel is a diagonal Kraus pair {A⊥, A?}: the conclusive operator
//! rescales every coefficient to c_min (mapping the family onto orthogonal
//! Fourier states), the inconclusive one annihilates the minimal
//! coefficients. A projective Fourier measurement then retrodicts the input:
//! perfectly on the conclusive branch, and with the best average success the
//! inconclusive branch admits. [`theory_report`] collects the closed-form
//! probabilities of the conventional strategy (inconclusive events answered
//! by a random guess) and the concatenated one, plus their ratio.
//!
//! [`ancilla_unitary`]/[`project_ancilla`] realize the same channel as a
//! per-mode two-level ancilla rotation followed by a projective ancilla
//! measurement; [`apply_kraus`] and [`project_ancilla`] must agree branch by
//! branch, which the test suites check.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qudit::{root_of_unity, CoefficientVector, StateVector};

/// Tolerance on per-mode Kraus completeness |A⊥_nn|² + |A?_nn|² = 1.
pub const COMPLETENESS_TOL: f64 = 1e-12;
/// Tolerance for counting coefficients degenerate with c_min.
pub const MULTIPLICITY_TOL: f64 = 1e-9;
/// Branch probabilities below this are treated as absent.
pub const ZERO_BRANCH_TOL: f64 = 1e-15;

/// The two outcomes of the discrimination channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Conclusive,
    Inconclusive,
}

/// Ancilla polarization labels; projecting on `V` keeps the conclusive
/// branch, on `H` the inconclusive one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    H,
    V,
}

/// Diagonal conclusive/inconclusive Kraus operators of the optimal
/// unambiguous channel for one coefficient vector.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausPair {
    conclusive: Vec<Complex64>,
    inconclusive: Vec<Complex64>,
}

impl KrausPair {
    pub fn dim(&self) -> usize {
        self.conclusive.len()
    }

    pub fn conclusive_diag(&self) -> &[Complex64] {
        &self.conclusive
    }

    pub fn inconclusive_diag(&self) -> &[Complex64] {
        &self.inconclusive
    }

    pub fn diag(&self, branch: Branch) -> &[Complex64] {
        match branch {
            Branch::Conclusive => &self.conclusive,
            Branch::Inconclusive => &self.inconclusive,
        }
    }

    /// max_n | |A⊥_nn|² + |A?_nn|² − 1 |.
    pub fn completeness_deviation(&self) -> f64 {
        self.conclusive
            .iter()
            .zip(&self.inconclusive)
            .map(|(a, b)| (a.norm_sqr() + b.norm_sqr() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Optimal Kraus pair: A⊥_nn = (c_min/|c_n|)·e^{−i·arg c_n} and
/// A?_nn = √(1 − c_min²/|c_n|²)·e^{−i·arg c_n}.
pub fn kraus_pair(c: &CoefficientVector) -> KrausPair {
    let c_min = c.min_magnitude();
    let mut conclusive = Vec::with_capacity(c.dim());
    let mut inconclusive = Vec::with_capacity(c.dim());
    for &cn in c.amps() {
        let mag = cn.norm();
        let dephase = Complex64::from_polar(1.0, -cn.arg());
        let keep = (c_min / mag).min(1.0);
        conclusive.push(dephase * keep);
        inconclusive.push(dephase * (1.0 - keep * keep).max(0.0).sqrt());
    }
    KrausPair {
        conclusive,
        inconclusive,
    }
}

/// Result of selecting one channel branch: the Born probability and the
/// normalized post-channel state, absent when the branch carries no weight.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchOutcome {
    pub probability: f64,
    pub state: Option<StateVector>,
}

/// Applies one Kraus operator: returns ‖A|ψ⟩‖² and A|ψ⟩/‖A|ψ⟩‖.
pub fn apply_kraus(k: &KrausPair, psi: &StateVector, branch: Branch) -> Result<BranchOutcome> {
    if k.dim() != psi.dim() {
        return Err(Error::DimensionMismatch {
            left: k.dim(),
            right: psi.dim(),
        });
    }
    let amps: Vec<Complex64> = k
        .diag(branch)
        .iter()
        .zip(psi.amps())
        .map(|(a, p)| a * p)
        .collect();
    finish_branch(amps)
}

fn finish_branch(amps: Vec<Complex64>) -> Result<BranchOutcome> {
    let probability: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    let state = if probability < ZERO_BRANCH_TOL {
        None
    } else {
        Some(StateVector::normalized(amps)?)
    };
    Ok(BranchOutcome { probability, state })
}

/// Born probabilities of the projective Fourier measurement
/// Π_n = F|n⟩⟨n|F⁻¹: entry n is |⟨n|F⁻¹|ψ⟩|².
pub fn me_outcome_distribution(psi: &StateVector) -> Vec<f64> {
    let d = psi.dim();
    let scale = 1.0 / d as f64;
    (0..d)
        .map(|n| {
            let amp: Complex64 = psi
                .amps()
                .iter()
                .enumerate()
                .map(|(k, &a)| root_of_unity(d, -((n * k) as i64)) * a)
                .sum();
            amp.norm_sqr() * scale
        })
        .collect()
}

/// Number of k with |c_k| within [`MULTIPLICITY_TOL`] of c_min.
fn min_multiplicity(c: &CoefficientVector) -> usize {
    let c_min = c.min_magnitude();
    c.amps()
        .iter()
        .filter(|a| (a.norm() - c_min).abs() < MULTIPLICITY_TOL)
        .count()
}

/// Dimension of the inconclusive subspace, d − μ(c_min).
pub fn inconclusive_space_dim(c: &CoefficientVector) -> usize {
    c.dim() - min_multiplicity(c)
}

/// Average success of the Fourier measurement on the inconclusive branch:
/// [Σ_k √(|c_k|² − c_min²)]² / (d·p?), in [1/d, 1). A vanishing
/// inconclusive branch (uniform coefficients) returns the random-guess
/// value 1/d by continuity.
pub fn p_me_inconclusive(c: &CoefficientVector) -> f64 {
    let d = c.dim() as f64;
    let c_min_sq = c.min_magnitude().powi(2);
    let p_inc = 1.0 - (d * c_min_sq).min(1.0);
    if p_inc < ZERO_BRANCH_TOL {
        return 1.0 / d;
    }
    let s: f64 = c
        .amps()
        .iter()
        .map(|a| (a.norm_sqr() - c_min_sq).max(0.0).sqrt())
        .sum();
    s * s / (d * p_inc)
}

/// Closed-form figures of merit for one coefficient vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryReport {
    /// Probability of a conclusive channel outcome, d·c_min².
    pub p_perp: f64,
    /// Probability of an inconclusive outcome, 1 − p_perp.
    pub p_inc: f64,
    /// Average correct-retrodiction probability on the conclusive branch
    /// (exactly 1: conclusive outputs are orthogonal Fourier states).
    pub p_me_conclusive: f64,
    /// Average correct-retrodiction probability of the Fourier measurement
    /// on the inconclusive branch.
    pub p_me_inconclusive: f64,
    /// Overall correct-retrodiction probability when inconclusive events
    /// are answered by a random guess.
    pub p_ud: f64,
    /// Overall correct-retrodiction probability when the measurement is
    /// concatenated at the inconclusive branch.
    pub p_cud: f64,
    /// p_cud / p_ud ≥ 1.
    pub r_theory: f64,
    /// Dimension of the inconclusive subspace.
    pub dim_inconclusive: usize,
}

/// Evaluates every closed-form quantity for one coefficient vector.
pub fn theory_report(c: &CoefficientVector) -> TheoryReport {
    let d = c.dim() as f64;
    let p_perp = (d * c.min_magnitude().powi(2)).min(1.0);
    let p_inc = 1.0 - p_perp;
    let p_me_conclusive = 1.0;
    let p_me_inconclusive = p_me_inconclusive(c);
    let p_ud = p_perp * p_me_conclusive + p_inc / d;
    let p_cud = p_perp * p_me_conclusive + p_inc * p_me_inconclusive;
    TheoryReport {
        p_perp,
        p_inc,
        p_me_conclusive,
        p_me_inconclusive,
        p_ud,
        p_cud,
        r_theory: p_cud / p_ud,
        dim_inconclusive: inconclusive_space_dim(c),
    }
}

/// One 2×2 block of the ancilla-coupled unitary: e^{iφ}[[a, b], [−b, a]]
/// in the {|h⟩, |v⟩} polarization basis, with a² + b² = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeRotation {
    pub phase: f64,
    pub keep: f64,
    pub flip: f64,
}

/// Per-spatial-mode ancilla rotations realizing the Kraus pair once the
/// ancilla is projected.
#[derive(Debug, Clone, PartialEq)]
pub struct AncillaCoupledUnitary {
    modes: Vec<ModeRotation>,
}

impl AncillaCoupledUnitary {
    pub fn dim(&self) -> usize {
        self.modes.len()
    }

    pub fn modes(&self) -> &[ModeRotation] {
        &self.modes
    }

    /// max_n |a_n² + b_n² − 1|.
    pub fn rotation_deviation(&self) -> f64 {
        self.modes
            .iter()
            .map(|m| (m.keep * m.keep + m.flip * m.flip - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Mode rotations with a_n = c_min/|c_n|, b_n = √(1 − a_n²) and
/// φ_n = −arg(c_n).
pub fn ancilla_unitary(c: &CoefficientVector) -> AncillaCoupledUnitary {
    let c_min = c.min_magnitude();
    let modes = c
        .amps()
        .iter()
        .map(|cn| {
            let keep = (c_min / cn.norm()).min(1.0);
            ModeRotation {
                phase: -cn.arg(),
                keep,
                flip: (1.0 - keep * keep).max(0.0).sqrt(),
            }
        })
        .collect();
    AncillaCoupledUnitary { modes }
}

/// Applies the ancilla-coupled unitary to |ψ⟩|v⟩ and projects the ancilla
/// onto `pol`. The `V` output reproduces the conclusive Kraus branch, the
/// `H` output the inconclusive one.
pub fn project_ancilla(
    u: &AncillaCoupledUnitary,
    psi: &StateVector,
    pol: Polarization,
) -> Result<BranchOutcome> {
    if u.dim() != psi.dim() {
        return Err(Error::DimensionMismatch {
            left: u.dim(),
            right: psi.dim(),
        });
    }
    // the 2x2 block maps |v> to b_n|h> + a_n|v>, up to the mode phase
    let amps: Vec<Complex64> = u
        .modes()
        .iter()
        .zip(psi.amps())
        .map(|(m, &p)| {
            let weight = match pol {
                Polarization::V => m.keep,
                Polarization::H => m.flip,
            };
            Complex64::from_polar(weight, m.phase) * p
        })
        .collect();
    finish_branch(amps)
}
