//! Self-verification: a brute-force Born-rule evaluation of every protocol
//! quantity, and randomized suites that cross-check the closed forms, the
//! channel realizations and the structural invariants against it.
//!
//! [`born_average_report`] never touches the closed-form expressions it is
//! used to check: branch probabilities come from ‖A|ψ⟩‖², retrodiction
//! probabilities from explicit overlaps with Fourier columns, and the
//! inconclusive dimension from the numerical rank of the inconclusive
//! outputs.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

use crate::discrimination::{
    ancilla_unitary, apply_kraus, kraus_pair, me_outcome_distribution, project_ancilla,
    theory_report, Branch, Polarization, TheoryReport, COMPLETENESS_TOL, ZERO_BRANCH_TOL,
};
use crate::qudit::{build_symmetric_state, fourier_matrix, CoefficientVector, StateVector};

/// Tolerance for closed-form vs brute-force agreement.
pub const ORACLE_TOL: f64 = 1e-10;
/// Tolerance for the Fourier-measurement delta property on the conclusive
/// branch and for path equivalence.
pub const PATH_TOL: f64 = 1e-10;
/// Tolerance for phase invariance of the closed forms.
pub const PHASE_TOL: f64 = 1e-12;

/// Numerical rank of a set of vectors by modified Gram-Schmidt: the count
/// of residuals above threshold.
fn rank(vectors: &[Vec<Complex64>]) -> usize {
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for b in &basis {
            let proj: Complex64 = b.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= proj * bi;
            }
        }
        let norm = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-7 {
            for x in &mut w {
                *x /= norm;
            }
            basis.push(w);
        }
    }
    basis.len()
}

/// Evaluates every protocol quantity by averaging Born probabilities over
/// all inputs, branches and measurement outcomes.
pub fn born_average_report(c: &CoefficientVector) -> TheoryReport {
    let d = c.dim();
    let df = d as f64;
    let k = kraus_pair(c);
    let f = fourier_matrix(d).expect("dimension already validated");
    let fourier_columns: Vec<StateVector> =
        (0..d).map(|n| f.column(n).expect("valid column")).collect();

    let mut p_perp = 0.0;
    let mut p_me_conclusive = 0.0;
    let mut p_me_inconclusive = 0.0;
    let mut inconclusive_outputs: Vec<Vec<Complex64>> = Vec::new();
    let mut inconclusive_weight = 0.0;

    for j in 0..d {
        let psi = build_symmetric_state(c, j).expect("index in range");
        let conclusive = apply_kraus(&k, &psi, Branch::Conclusive).expect("dims match");
        let inconclusive = apply_kraus(&k, &psi, Branch::Inconclusive).expect("dims match");
        p_perp += conclusive.probability / df;
        inconclusive_weight += inconclusive.probability / df;
        if let Some(state) = conclusive.state {
            let correct = fourier_columns[j].inner(&state).expect("dims match");
            p_me_conclusive += correct.norm_sqr() / df;
        }
        if let Some(state) = inconclusive.state {
            let correct = fourier_columns[j].inner(&state).expect("dims match");
            p_me_inconclusive += correct.norm_sqr() / df;
            inconclusive_outputs.push(state.amps().to_vec());
        }
    }

    let degenerate = inconclusive_weight < ZERO_BRANCH_TOL;
    if degenerate {
        p_me_inconclusive = 1.0 / df;
    }
    // conclusive weight never vanishes (c_min > 0), so p_me_conclusive is a
    // full average; renormalize nothing there.
    let p_inc = 1.0 - p_perp;
    let p_ud = p_perp * p_me_conclusive + p_inc / df;
    let p_cud = p_perp * p_me_conclusive + p_inc * p_me_inconclusive;
    TheoryReport {
        p_perp,
        p_inc,
        p_me_conclusive,
        p_me_inconclusive,
        p_ud,
        p_cud,
        r_theory: p_cud / p_ud,
        dim_inconclusive: rank(&inconclusive_outputs),
    }
}

/// Draws squared magnitudes with pairwise well-separated levels so minimum
/// multiplicity is unambiguous at float precision, plus uniform phases.
/// Keeps both branch probabilities away from zero.
pub fn random_instance(rng: &mut impl Rng, dim: usize, with_phases: bool) -> CoefficientVector {
    loop {
        let csq: Vec<f64> = (0..dim).map(|_| rng.random_range(0.05..1.0)).collect();
        let mut sorted = csq.clone();
        sorted.sort_by(f64::total_cmp);
        let separated = sorted.windows(2).all(|w| w[1] - w[0] > 1e-3);
        if !separated {
            continue;
        }
        let sum: f64 = csq.iter().sum();
        let d = dim as f64;
        let p_perp = d * sorted[0] / sum;
        if !(0.05..=0.95).contains(&p_perp) {
            continue;
        }
        let phases: Vec<f64> = if with_phases {
            (0..dim).map(|_| rng.random_range(0.0..TAU)).collect()
        } else {
            vec![0.0; dim]
        };
        return CoefficientVector::from_squared_magnitudes_with_phases(&csq, &phases)
            .expect("generated magnitudes are positive and separated");
    }
}

fn describe(c: &CoefficientVector) -> String {
    let csq: Vec<String> = c
        .squared_magnitudes()
        .iter()
        .map(|w| format!("{w:.17e}"))
        .collect();
    let phases: Vec<String> = c.amps().iter().map(|a| format!("{:.17e}", a.arg())).collect();
    format!(
        "d={} csq=[{}] phases=[{}]",
        c.dim(),
        csq.join(","),
        phases.join(",")
    )
}

/// Configuration of the randomized verification run.
#[derive(Debug, Clone)]
pub struct VerifyConfig {
    /// Instances per dimension per suite.
    pub trials: usize,
    pub seed: u64,
    pub min_dim: usize,
    pub max_dim: usize,
    /// Allowed per-mode deviation from Kraus completeness.
    pub completeness_tol: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            trials: 25,
            seed: 0,
            min_dim: 2,
            max_dim: 9,
            completeness_tol: COMPLETENESS_TOL,
        }
    }
}

/// Outcome of one suite: checks passed and serialized failing instances.
#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: &'static str,
    pub checks: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

fn for_each_instance(
    cfg: &VerifyConfig,
    salt: u64,
    mut body: impl FnMut(&CoefficientVector),
) {
    let mut rng = ChaCha8Rng::seed_from_u64(crate::montecarlo::derive_seed(cfg.seed, salt));
    for dim in cfg.min_dim..=cfg.max_dim {
        for t in 0..cfg.trials {
            let c = random_instance(&mut rng, dim, t % 2 == 1);
            body(&c);
        }
    }
}

fn suite_completeness(cfg: &VerifyConfig) -> SuiteReport {
    let mut report = SuiteReport {
        name: "completeness",
        checks: 0,
        failures: vec![],
    };
    for_each_instance(cfg, 1, |c| {
        report.checks += 1;
        let dev = kraus_pair(c).completeness_deviation();
        if dev > cfg.completeness_tol {
            report
                .failures
                .push(format!("{}: completeness deviation {dev:e}", describe(c)));
        }
    });
    report
}

fn suite_conclusive_delta(cfg: &VerifyConfig) -> SuiteReport {
    let mut report = SuiteReport {
        name: "conclusive-me-delta",
        checks: 0,
        failures: vec![],
    };
    for_each_instance(cfg, 2, |c| {
        let k = kraus_pair(c);
        for j in 0..c.dim() {
            report.checks += 1;
            let psi = build_symmetric_state(c, j).unwrap();
            let out = apply_kraus(&k, &psi, Branch::Conclusive).unwrap();
            let state = match out.state {
                Some(s) => s,
                None => {
                    report
                        .failures
                        .push(format!("{}: conclusive branch vanished at j={j}", describe(c)));
                    continue;
                }
            };
            let dist = me_outcome_distribution(&state);
            let worst = dist
                .iter()
                .enumerate()
                .map(|(n, &p)| (p - if n == j { 1.0 } else { 0.0 }).abs())
                .fold(0.0, f64::max);
            if worst > PATH_TOL {
                report.failures.push(format!(
                    "{}: j={j} deviates from the delta distribution by {worst:e}",
                    describe(c)
                ));
            }
        }
    });
    report
}

fn suite_cud_advantage(cfg: &VerifyConfig) -> SuiteReport {
    let mut report = SuiteReport {
        name: "cud-advantage",
        checks: 0,
        failures: vec![],
    };
    for_each_instance(cfg, 3, |c| {
        report.checks += 1;
        let t = theory_report(c);
        if t.p_cud < t.p_ud - 1e-12 {
            report.failures.push(format!(
                "{}: p_cud {} < p_ud {}",
                describe(c),
                t.p_cud,
                t.p_ud
            ));
        }
        if t.dim_inconclusive > 1 && t.p_inc > 1e-9 && t.p_cud <= t.p_ud {
            report.failures.push(format!(
                "{}: advantage not strict (dim {}, p_inc {})",
                describe(c),
                t.dim_inconclusive,
                t.p_inc
            ));
        }
    });
    report
}

fn suite_path_equivalence(cfg: &VerifyConfig) -> SuiteReport {
    let mut report = SuiteReport {
        name: "path-equivalence",
        checks: 0,
        failures: vec![],
    };
    for_each_instance(cfg, 4, |c| {
        let k = kraus_pair(c);
        let u = ancilla_unitary(c);
        for j in 0..c.dim() {
            report.checks += 1;
            let psi = build_symmetric_state(c, j).unwrap();
            for (branch, pol) in [
                (Branch::Conclusive, Polarization::V),
                (Branch::Inconclusive, Polarization::H),
            ] {
                let a = apply_kraus(&k, &psi, branch).unwrap();
                let b = project_ancilla(&u, &psi, pol).unwrap();
                if (a.probability - b.probability).abs() > PATH_TOL {
                    report.failures.push(format!(
                        "{}: j={j} branch probabilities differ by {:e}",
                        describe(c),
                        (a.probability - b.probability).abs()
                    ));
                    continue;
                }
                match (a.state, b.state) {
                    (Some(sa), Some(sb)) => {
                        let overlap = sa.overlap_magnitude(&sb).unwrap();
                        if overlap < 1.0 - PATH_TOL {
                            report.failures.push(format!(
                                "{}: j={j} output overlap {overlap}",
                                describe(c)
                            ));
                        }
                    }
                    (None, None) => {}
                    _ => report.failures.push(format!(
                        "{}: j={j} branch presence disagrees",
                        describe(c)
                    )),
                }
            }
        }
    });
    report
}

fn suite_phase_invariance(cfg: &VerifyConfig) -> SuiteReport {
    let mut report = SuiteReport {
        name: "phase-invariance",
        checks: 0,
        failures: vec![],
    };
    let mut rng = ChaCha8Rng::seed_from_u64(crate::montecarlo::derive_seed(cfg.seed, 5));
    for dim in cfg.min_dim..=cfg.max_dim {
        for _ in 0..cfg.trials {
            report.checks += 1;
            let base = random_instance(&mut rng, dim, false);
            let csq = base.squared_magnitudes();
            let phases: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..TAU)).collect();
            let shifted =
                CoefficientVector::from_squared_magnitudes_with_phases(&csq, &phases).unwrap();
            let t0 = theory_report(&base);
            let t1 = theory_report(&shifted);
            let worst = [
                t0.p_perp - t1.p_perp,
                t0.p_inc - t1.p_inc,
                t0.p_me_conclusive - t1.p_me_conclusive,
                t0.p_me_inconclusive - t1.p_me_inconclusive,
                t0.p_ud - t1.p_ud,
                t0.p_cud - t1.p_cud,
                t0.r_theory - t1.r_theory,
            ]
            .iter()
            .map(|x| x.abs())
            .fold(0.0, f64::max);
            if worst > PHASE_TOL || t0.dim_inconclusive != t1.dim_inconclusive {
                report.failures.push(format!(
                    "{}: phase reassignment moved a closed form by {worst:e}",
                    describe(&shifted)
                ));
            }
        }
    }
    report
}

fn suite_oracle_equivalence(cfg: &VerifyConfig) -> SuiteReport {
    let mut report = SuiteReport {
        name: "oracle-equivalence",
        checks: 0,
        failures: vec![],
    };
    for_each_instance(cfg, 6, |c| {
        report.checks += 1;
        let closed = theory_report(c);
        let brute = born_average_report(c);
        let worst = [
            closed.p_perp - brute.p_perp,
            closed.p_inc - brute.p_inc,
            closed.p_me_conclusive - brute.p_me_conclusive,
            closed.p_me_inconclusive - brute.p_me_inconclusive,
            closed.p_ud - brute.p_ud,
            closed.p_cud - brute.p_cud,
            closed.r_theory - brute.r_theory,
        ]
        .iter()
        .map(|x| x.abs())
        .fold(0.0, f64::max);
        if worst > ORACLE_TOL || closed.dim_inconclusive != brute.dim_inconclusive {
            report.failures.push(format!(
                "{}: closed form deviates from Born average by {worst:e} \
                 (dims {} vs {})",
                describe(c),
                closed.dim_inconclusive,
                brute.dim_inconclusive
            ));
        }
    });
    report
}

/// Runs all six suites with the given configuration.
pub fn run_suites(cfg: &VerifyConfig) -> Vec<SuiteReport> {
    vec![
        suite_completeness(cfg),
        suite_conclusive_delta(cfg),
        suite_cud_advantage(cfg),
        suite_path_equivalence(cfg),
        suite_phase_invariance(cfg),
        suite_oracle_equivalence(cfg),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_agrees_on_worked_set() {
        let c = CoefficientVector::from_squared_magnitudes(&[0.4, 0.3, 0.2, 0.1]).unwrap();
        let brute = born_average_report(&c);
        assert!((brute.p_perp - 0.4).abs() < 1e-12);
        assert!((brute.p_me_conclusive - 1.0).abs() < 1e-12);
        assert!((brute.p_me_inconclusive - 0.7163128427270958).abs() < 1e-12);
        assert!((brute.p_ud - 0.55).abs() < 1e-12);
        assert!((brute.p_cud - 0.8297877056362575).abs() < 1e-12);
        assert_eq!(brute.dim_inconclusive, 3);
    }

    #[test]
    fn oracle_rank_detects_designed_degeneracy() {
        let c = CoefficientVector::from_squared_magnitudes(&[0.5, 0.25, 0.25]).unwrap();
        assert_eq!(born_average_report(&c).dim_inconclusive, 1);
        let u = CoefficientVector::uniform(5).unwrap();
        assert_eq!(born_average_report(&u).dim_inconclusive, 0);
    }

    #[test]
    fn default_run_is_clean_and_deterministic() {
        let cfg = VerifyConfig {
            trials: 5,
            ..VerifyConfig::default()
        };
        let first = run_suites(&cfg);
        assert_eq!(first.len(), 6);
        for suite in &first {
            assert!(suite.ok(), "{}: {:?}", suite.name, suite.failures);
            assert!(suite.checks > 0);
        }
        let second = run_suites(&cfg);
        for (a, b) in first.iter().zip(&second) {
            assert_eq!(a.checks, b.checks);
            assert_eq!(a.failures, b.failures);
        }
    }

    #[test]
    fn zero_completeness_tolerance_fails_with_named_suite() {
        let cfg = VerifyConfig {
            trials: 5,
            completeness_tol: 0.0,
            ..VerifyConfig::default()
        };
        let reports = run_suites(&cfg);
        let completeness = reports.iter().find(|r| r.name == "completeness").unwrap();
        assert!(!completeness.ok());
        // every other suite stays green
        for suite in reports.iter().filter(|r| r.name != "completeness") {
            assert!(suite.ok());
        }
    }

    #[test]
    fn random_instances_are_valid_and_separated() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in 2..=9usize {
            for t in 0..10 {
                let c = random_instance(&mut rng, d, t % 2 == 0);
                let mut csq = c.squared_magnitudes();
                csq.sort_by(f64::total_cmp);
                let norm: f64 = csq.iter().sum();
                assert!((norm - 1.0).abs() < 1e-12);
                for w in csq.windows(2) {
                    assert!(w[1] - w[0] > 1e-4);
                }
            }
        }
    }
}
