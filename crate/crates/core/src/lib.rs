//! Discrimination of symmetric qudit states by an optimal unambiguous
//! channel with a minimum-error Fourier measurement concatenated at the
//! inconclusive branch.
//!
//! The crate covers four layers:
//!
//! - [`qudit`]: coefficient vectors, symmetric states, the (j0, ξ′)
//!   coefficient profiles and the discrete Fourier transform;
//! - [`discrimination`]: the diagonal Kraus pair, the Fourier measurement,
//!   all closed-form figures of merit, and an ancilla-coupled realization
//!   of the same channel;
//! - [`montecarlo`]: seeded shot-level sampling with a one-parameter
//!   depolarization model and the intensity-ratio estimators;
//! - [`sweep`]: grid runs over (j0, ξ′), histogram summaries and
//!   deterministic CSV/JSON export.
//!
//! [`verify`] adds a brute-force Born-rule oracle and randomized
//! cross-check suites over all of the above.
//!
//! All operations are pure functions over immutable values; sweeps
//! parallelize over grid points with per-point RNG streams, so parallel and
//! serial runs produce identical output.

pub mod discrimination;
pub mod error;
pub mod montecarlo;
pub mod qudit;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};

pub use discrimination::{
    ancilla_unitary, apply_kraus, inconclusive_space_dim, kraus_pair, me_outcome_distribution,
    p_me_inconclusive, project_ancilla, theory_report, AncillaCoupledUnitary, Branch,
    BranchOutcome, KrausPair, Polarization, TheoryReport,
};
pub use montecarlo::{
    branch_distributions, estimate, estimate_from_distributions, percentage_errors, run_trials,
    CountsTable, EstimateReport, NoiseModel, PercentageErrors,
};
pub use qudit::{
    build_symmetric_state, coefficients_from_profile, compute_xi_max, fourier_matrix,
    gram_overlap, CoefficientProfile, CoefficientVector, StateVector, UnitaryMatrix,
};
pub use sweep::{
    error_histograms, export, import_json, r_histogram, run_sweep, ExportFormat, Histogram,
    HistogramSummary, SweepGrid, SweepResult, SweepRow,
};
