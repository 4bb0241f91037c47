//! Shot-level sampling of the full protocol and the intensity-ratio
//! estimators applied to the sampled counts.
//!
//! Each trial prepares one family member, routes it through the channel and
//! records (branch, Fourier outcome). A single-parameter depolarization
//! weight γ mixes the ideal distribution with a flat one over all
//! 2d (branch, outcome) cells, which shifts the conclusive fraction to
//! (1−γ)p⊥ + γ/2 and degrades both retrodiction probabilities — the same
//! qualitative structure as the reference hardware. Estimators are plain
//! ratios of counts, so they apply unchanged to exact distributions
//! (the infinite-shot limit) via [`estimate_from_distributions`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::discrimination::{
    apply_kraus, kraus_pair, me_outcome_distribution, Branch, TheoryReport,
};
use crate::error::{Error, Result};
use crate::qudit::{build_symmetric_state, CoefficientVector};

/// Single-parameter depolarization: weight γ of every trial is replaced by
/// a uniform draw over all (branch, outcome) cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    gamma: f64,
}

impl NoiseModel {
    pub fn new(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || !(0.0..=1.0).contains(&gamma) {
            return Err(Error::GammaOutOfRange(gamma));
        }
        Ok(Self { gamma })
    }

    /// Noise-free model, γ = 0.
    pub fn ideal() -> Self {
        Self { gamma: 0.0 }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// Probability table over (branch, outcome) for one input state.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchDistribution {
    conclusive: Vec<f64>,
    inconclusive: Vec<f64>,
}

impl BranchDistribution {
    pub fn dim(&self) -> usize {
        self.conclusive.len()
    }

    pub fn prob(&self, branch: Branch, outcome: usize) -> f64 {
        match branch {
            Branch::Conclusive => self.conclusive[outcome],
            Branch::Inconclusive => self.inconclusive[outcome],
        }
    }

    /// Marginal probability of one branch.
    pub fn branch_total(&self, branch: Branch) -> f64 {
        match branch {
            Branch::Conclusive => self.conclusive.iter().sum(),
            Branch::Inconclusive => self.inconclusive.iter().sum(),
        }
    }

    pub fn total(&self) -> f64 {
        self.branch_total(Branch::Conclusive) + self.branch_total(Branch::Inconclusive)
    }

    /// Cells in a fixed (branch-major, then outcome) order.
    fn cells(&self) -> impl Iterator<Item = f64> + '_ {
        self.conclusive
            .iter()
            .chain(self.inconclusive.iter())
            .copied()
    }
}

/// Joint distribution over (branch, outcome) for input j:
/// P(⊥,i|j) = (1−γ)·p_j(⊥)·q⊥_j(i) + γ/(2d) and likewise for the
/// inconclusive branch, with q the Fourier-measurement distribution of the
/// corresponding branch output.
pub fn branch_distributions(
    c: &CoefficientVector,
    j: usize,
    noise: &NoiseModel,
) -> Result<BranchDistribution> {
    let d = c.dim();
    let psi = build_symmetric_state(c, j)?;
    let k = kraus_pair(c);
    let gamma = noise.gamma();
    let flat = gamma / (2.0 * d as f64);
    let mut table = BranchDistribution {
        conclusive: vec![flat; d],
        inconclusive: vec![flat; d],
    };
    for branch in [Branch::Conclusive, Branch::Inconclusive] {
        let out = apply_kraus(&k, &psi, branch)?;
        if let Some(state) = out.state {
            let q = me_outcome_distribution(&state);
            let row = match branch {
                Branch::Conclusive => &mut table.conclusive,
                Branch::Inconclusive => &mut table.inconclusive,
            };
            for (cell, qi) in row.iter_mut().zip(q) {
                *cell += (1.0 - gamma) * out.probability * qi;
            }
        }
    }
    Ok(table)
}

/// Event counts N[branch][outcome][input] from a fixed number of trials
/// per input state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountsTable {
    dim: usize,
    shots_per_input: u64,
    // branch-major, then outcome, then input
    counts: Vec<u64>,
}

impl CountsTable {
    fn zeros(dim: usize, shots_per_input: u64) -> Self {
        Self {
            dim,
            shots_per_input,
            counts: vec![0; 2 * dim * dim],
        }
    }

    fn idx(&self, branch: Branch, outcome: usize, input: usize) -> usize {
        let b = match branch {
            Branch::Conclusive => 0,
            Branch::Inconclusive => 1,
        };
        (b * self.dim + outcome) * self.dim + input
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shots_per_input(&self) -> u64 {
        self.shots_per_input
    }

    pub fn count(&self, branch: Branch, outcome: usize, input: usize) -> u64 {
        self.counts[self.idx(branch, outcome, input)]
    }

    fn add(&mut self, branch: Branch, outcome: usize, input: usize, n: u64) {
        let i = self.idx(branch, outcome, input);
        self.counts[i] += n;
    }

    /// Total counts of one branch for one input.
    pub fn branch_total(&self, branch: Branch, input: usize) -> u64 {
        (0..self.dim).map(|i| self.count(branch, i, input)).sum()
    }

    /// Checks that every input column sums to `shots_per_input`.
    pub fn validate(&self) -> Result<()> {
        for j in 0..self.dim {
            let total = self.branch_total(Branch::Conclusive, j)
                + self.branch_total(Branch::Inconclusive, j);
            if total != self.shots_per_input {
                return Err(Error::InconsistentCounts {
                    input: j,
                    total,
                    expected: self.shots_per_input,
                });
            }
        }
        Ok(())
    }
}

/// Mixes a salt into a master seed (splitmix64 finalizer) so derived
/// streams are decorrelated and order-independent.
pub fn derive_seed(master: u64, salt: u64) -> u64 {
    let mut z = master ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Samples the (branch, outcome) counts of `shots` trials in one
/// multinomial draw: sequential conditional binomials over the cells.
/// Column totals are exact by construction.
fn sample_column(
    rng: &mut ChaCha8Rng,
    cells: &[f64],
    shots: u64,
) -> Vec<u64> {
    let mut out = Vec::with_capacity(cells.len());
    let mut remaining = shots;
    let mut rem_prob = 1.0f64;
    for (i, &p) in cells.iter().enumerate() {
        if i + 1 == cells.len() {
            out.push(remaining);
            break;
        }
        let cond = if rem_prob > 0.0 {
            (p / rem_prob).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let n = Binomial::new(remaining, cond)
            .expect("conditional probability clamped to [0, 1]")
            .sample(rng);
        out.push(n);
        remaining -= n;
        rem_prob -= p;
    }
    out
}

/// Runs `shots_per_input` trials for every input state. Each input draws
/// from its own ChaCha stream derived from the master seed, so results are
/// reproducible and independent of evaluation order.
pub fn run_trials(
    c: &CoefficientVector,
    noise: &NoiseModel,
    shots_per_input: u64,
    seed: u64,
) -> Result<CountsTable> {
    if shots_per_input == 0 {
        return Err(Error::ZeroShots);
    }
    let d = c.dim();
    let mut table = CountsTable::zeros(d, shots_per_input);
    for j in 0..d {
        let dist = branch_distributions(c, j, noise)?;
        let cells: Vec<f64> = dist.cells().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(j as u64);
        let drawn = sample_column(&mut rng, &cells, shots_per_input);
        for (cell, n) in drawn.into_iter().enumerate() {
            let branch = if cell < d {
                Branch::Conclusive
            } else {
                Branch::Inconclusive
            };
            table.add(branch, cell % d, j, n);
        }
    }
    Ok(table)
}

/// Per-input estimators: conclusive fractions and conditional outcome
/// distributions per branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerInputEstimates {
    /// p_⊥j: fraction of trials for input j that ended conclusive.
    pub p_perp_j: Vec<f64>,
    /// P^⊥_ij indexed [j][i]: outcome distribution within the conclusive
    /// branch for input j.
    pub conclusive_conditionals: Vec<Vec<f64>>,
    /// P^?_ij indexed [j][i].
    pub inconclusive_conditionals: Vec<Vec<f64>>,
    /// (branch, input) columns whose branch total was zero; their
    /// conditionals were substituted by the uniform distribution.
    pub flagged: Vec<(Branch, usize)>,
}

/// Estimator outputs mirroring the closed-form report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub p_perp_est: f64,
    pub p_me_conclusive_est: f64,
    pub p_me_inconclusive_est: f64,
    pub p_ud_est: f64,
    pub p_cud_est: f64,
    /// Estimated overall success of the concatenated strategy over the
    /// closed-form success of the conventional one.
    pub r_vs_theory_ud: f64,
    pub per_input: PerInputEstimates,
}

/// Ratio estimators over nonnegative weights w[branch][outcome][input];
/// counts and exact probabilities share this path.
fn estimate_weights<F>(dim: usize, weight: F, theory: &TheoryReport) -> EstimateReport
where
    F: Fn(Branch, usize, usize) -> f64,
{
    let d = dim;
    let df = d as f64;
    let mut p_perp_j = Vec::with_capacity(d);
    let mut conclusive_conditionals = Vec::with_capacity(d);
    let mut inconclusive_conditionals = Vec::with_capacity(d);
    let mut flagged = Vec::new();

    for j in 0..d {
        let col_conc: f64 = (0..d).map(|i| weight(Branch::Conclusive, i, j)).sum();
        let col_inc: f64 = (0..d).map(|i| weight(Branch::Inconclusive, i, j)).sum();
        let total = col_conc + col_inc;
        p_perp_j.push(if total > 0.0 { col_conc / total } else { 0.0 });
        for (branch, col, dest) in [
            (Branch::Conclusive, col_conc, &mut conclusive_conditionals),
            (Branch::Inconclusive, col_inc, &mut inconclusive_conditionals),
        ] {
            if col > 0.0 {
                dest.push((0..d).map(|i| weight(branch, i, j) / col).collect());
            } else {
                flagged.push((branch, j));
                dest.push(vec![1.0 / df; d]);
            }
        }
    }

    let p_perp_est = p_perp_j.iter().sum::<f64>() / df;
    let p_me_conclusive_est = (0..d)
        .map(|j| conclusive_conditionals[j][j])
        .sum::<f64>()
        / df;
    let p_me_inconclusive_est = (0..d)
        .map(|j| inconclusive_conditionals[j][j])
        .sum::<f64>()
        / df;
    let p_inc_est = 1.0 - p_perp_est;
    let p_ud_est = p_perp_est * p_me_conclusive_est + p_inc_est / df;
    let p_cud_est = p_perp_est * p_me_conclusive_est + p_inc_est * p_me_inconclusive_est;

    EstimateReport {
        p_perp_est,
        p_me_conclusive_est,
        p_me_inconclusive_est,
        p_ud_est,
        p_cud_est,
        r_vs_theory_ud: p_cud_est / theory.p_ud,
        per_input: PerInputEstimates {
            p_perp_j,
            conclusive_conditionals,
            inconclusive_conditionals,
            flagged,
        },
    }
}

/// Applies the ratio estimators to sampled counts.
pub fn estimate(counts: &CountsTable, theory: &TheoryReport) -> Result<EstimateReport> {
    counts.validate()?;
    Ok(estimate_weights(
        counts.dim(),
        |branch, outcome, input| counts.count(branch, outcome, input) as f64,
        theory,
    ))
}

/// Applies the ratio estimators to the exact per-input distributions — the
/// infinite-shot limit of [`estimate`].
pub fn estimate_from_distributions(
    c: &CoefficientVector,
    noise: &NoiseModel,
    theory: &TheoryReport,
) -> Result<EstimateReport> {
    let d = c.dim();
    let mut tables = Vec::with_capacity(d);
    for j in 0..d {
        tables.push(branch_distributions(c, j, noise)?);
    }
    Ok(estimate_weights(
        d,
        |branch, outcome, input| tables[input].prob(branch, outcome),
        theory,
    ))
}

/// Relative deviations (percent) of the estimated probabilities from the
/// closed-form ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PercentageErrors {
    pub p_perp: f64,
    pub p_me_conclusive: f64,
    pub p_me_inconclusive: f64,
}

/// Δ(q) = 100·|q_theory − q_est| / q_theory for the conclusive fraction and
/// both retrodiction probabilities.
pub fn percentage_errors(est: &EstimateReport, theory: &TheoryReport) -> PercentageErrors {
    let delta = |th: f64, est: f64| 100.0 * (th - est).abs() / th;
    PercentageErrors {
        p_perp: delta(theory.p_perp, est.p_perp_est),
        p_me_conclusive: delta(theory.p_me_conclusive, est.p_me_conclusive_est),
        p_me_inconclusive: delta(theory.p_me_inconclusive, est.p_me_inconclusive_est),
    }
}
