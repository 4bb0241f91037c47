//! Grid runs over the (j0, ξ′) coefficient profiles: closed-form report,
//! sampled estimate and percentage errors per grid point, histogram
//! summaries, and deterministic CSV/JSON export.

use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discrimination::{theory_report, TheoryReport};
use crate::error::{Error, Result};
use crate::montecarlo::{
    derive_seed, estimate, percentage_errors, run_trials, EstimateReport, NoiseModel,
    PercentageErrors,
};
use crate::qudit::{CoefficientProfile, DEFAULT_AMPLITUDE_FLOOR};

/// Default number of uniform histogram bins.
pub const DEFAULT_HISTOGRAM_BINS: usize = 20;
/// Default trials per input state in a sweep.
pub const DEFAULT_SHOTS_PER_INPUT: u64 = 100_000;

/// Full configuration of one sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub dim: usize,
    pub j0_values: Vec<usize>,
    pub xi_prime_values: Vec<f64>,
    pub floor: f64,
    pub noise: NoiseModel,
    pub shots_per_input: u64,
    pub seed: u64,
}

impl SweepGrid {
    /// The standard grid for one dimension: j0 ∈ {1, …, d−1} crossed with
    /// ξ′ ∈ {0.1, 0.2, …, 1.0}, i.e. (d−1)×10 points.
    pub fn default_for_dim(dim: usize) -> Self {
        Self {
            dim,
            j0_values: (1..dim).collect(),
            xi_prime_values: (1..=10).map(|i| i as f64 / 10.0).collect(),
            floor: DEFAULT_AMPLITUDE_FLOOR,
            noise: NoiseModel::ideal(),
            shots_per_input: DEFAULT_SHOTS_PER_INPUT,
            seed: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.j0_values.len() * self.xi_prime_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Theory, estimate and error triple for one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub j0: usize,
    pub xi_prime: f64,
    pub xi: f64,
    pub theory: TheoryReport,
    pub estimate: EstimateReport,
    pub errors: PercentageErrors,
}

/// All rows of a sweep together with the grid that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub grid: SweepGrid,
    pub rows: Vec<SweepRow>,
}

fn run_point(grid: &SweepGrid, index: usize, j0: usize, xi_prime: f64) -> Result<SweepRow> {
    let attach = |source: Error| Error::SweepPoint {
        j0,
        xi_prime,
        source: Box::new(source),
    };
    let profile =
        CoefficientProfile::new(grid.dim, j0, xi_prime, grid.floor).map_err(attach)?;
    let c = profile.coefficients().map_err(attach)?;
    let theory = theory_report(&c);
    let row_seed = derive_seed(grid.seed, ((j0 as u64) << 32) | index as u64);
    let counts = run_trials(&c, &grid.noise, grid.shots_per_input, row_seed).map_err(attach)?;
    let est = estimate(&counts, &theory).map_err(attach)?;
    let errors = percentage_errors(&est, &theory);
    Ok(SweepRow {
        j0,
        xi_prime,
        xi: profile.xi(),
        theory,
        estimate: est,
        errors,
    })
}

/// Runs the full grid. Points run in parallel; each owns an RNG stream
/// derived from (seed, j0, ξ′ index), so parallel and serial runs agree and
/// rows come back in grid order.
pub fn run_sweep(grid: &SweepGrid) -> Result<SweepResult> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let points: Vec<(usize, usize, f64)> = grid
        .j0_values
        .iter()
        .flat_map(|&j0| {
            grid.xi_prime_values
                .iter()
                .enumerate()
                .map(move |(xi_index, &xp)| (xi_index, j0, xp))
        })
        .collect();
    let rows = points
        .par_iter()
        .map(|&(xi_index, j0, xp)| run_point(grid, xi_index, j0, xp))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        grid: grid.clone(),
        rows,
    })
}

/// Binned counts over a closed interval; values outside are clamped into
/// the end bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    bin_edges: Vec<f64>,
    counts: Vec<u64>,
}

impl Histogram {
    pub fn from_values(values: &[f64], bins: usize, lo: f64, hi: f64) -> Result<Self> {
        if bins == 0 {
            return Err(Error::ZeroBins);
        }
        if values.is_empty() {
            return Err(Error::EmptyHistogram);
        }
        // degenerate span: keep strictly increasing edges
        let hi = if hi > lo { hi } else { lo + 1.0 };
        let width = (hi - lo) / bins as f64;
        let bin_edges = (0..=bins).map(|i| lo + i as f64 * width).collect();
        let mut counts = vec![0u64; bins];
        for &v in values {
            let raw = ((v - lo) / width).floor();
            let idx = (raw.max(0.0) as usize).min(bins - 1);
            counts[idx] += 1;
        }
        Ok(Self { bin_edges, counts })
    }

    pub fn bin_edges(&self) -> &[f64] {
        &self.bin_edges
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// A histogram plus the extremes and mean of the data behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramSummary {
    pub histogram: Histogram,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

fn summarize(values: &[f64], bins: usize, lo: f64) -> Result<HistogramSummary> {
    if values.is_empty() {
        return Err(Error::EmptyHistogram);
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    Ok(HistogramSummary {
        histogram: Histogram::from_values(values, bins, lo, max)?,
        min,
        max,
        mean,
    })
}

/// Histogram of the estimated enhancement ratio over [1, max R]. Grid
/// points with ξ′ = 0 describe orthogonal families and are excluded.
pub fn r_histogram(rows: &[SweepRow], bins: usize) -> Result<HistogramSummary> {
    let values: Vec<f64> = rows
        .iter()
        .filter(|r| r.xi_prime != 0.0)
        .map(|r| r.estimate.r_vs_theory_ud)
        .collect();
    summarize(&values, bins, 1.0)
}

/// One percentage-error histogram per estimated probability, each spanning
/// [0, max Δ]: conclusive fraction, conclusive retrodiction, inconclusive
/// retrodiction.
pub fn error_histograms_with_bins(
    rows: &[SweepRow],
    bins: usize,
) -> Result<[HistogramSummary; 3]> {
    let collect = |f: fn(&PercentageErrors) -> f64| -> Vec<f64> {
        rows.iter().map(|r| f(&r.errors)).collect()
    };
    Ok([
        summarize(&collect(|e| e.p_perp), bins, 0.0)?,
        summarize(&collect(|e| e.p_me_conclusive), bins, 0.0)?,
        summarize(&collect(|e| e.p_me_inconclusive), bins, 0.0)?,
    ])
}

/// [`error_histograms_with_bins`] with the default bin count.
pub fn error_histograms(rows: &[SweepRow]) -> Result<[HistogramSummary; 3]> {
    error_histograms_with_bins(rows, DEFAULT_HISTOGRAM_BINS)
}

/// Output format of [`export`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
}

/// One exported record; field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportRow {
    pub d: usize,
    pub j0: usize,
    pub xi_prime: f64,
    pub xi: f64,
    pub p_perp_th: f64,
    pub p_me_inc_th: f64,
    pub p_ud_th: f64,
    pub p_cud_th: f64,
    pub r_th: f64,
    pub p_perp_est: f64,
    pub p_me_conc_est: f64,
    pub p_me_inc_est: f64,
    pub p_cud_est: f64,
    pub r_est: f64,
    pub dpp: f64,
    pub dpmc: f64,
    pub dpmi: f64,
    pub seed: u64,
    pub shots: u64,
    pub gamma: f64,
}

impl ExportRow {
    fn from_row(grid: &SweepGrid, row: &SweepRow) -> Self {
        Self {
            d: grid.dim,
            j0: row.j0,
            xi_prime: row.xi_prime,
            xi: row.xi,
            p_perp_th: row.theory.p_perp,
            p_me_inc_th: row.theory.p_me_inconclusive,
            p_ud_th: row.theory.p_ud,
            p_cud_th: row.theory.p_cud,
            r_th: row.theory.r_theory,
            p_perp_est: row.estimate.p_perp_est,
            p_me_conc_est: row.estimate.p_me_conclusive_est,
            p_me_inc_est: row.estimate.p_me_inconclusive_est,
            p_cud_est: row.estimate.p_cud_est,
            r_est: row.estimate.r_vs_theory_ud,
            dpp: row.errors.p_perp,
            dpmc: row.errors.p_me_conclusive,
            dpmi: row.errors.p_me_inconclusive,
            seed: grid.seed,
            shots: grid.shots_per_input,
            gamma: grid.noise.gamma(),
        }
    }
}

/// Exported JSON document: the grid, the ξ′ sampling convention, and one
/// record per grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonExport {
    pub grid: SweepGrid,
    /// The ξ′ axis is sampled on a uniform grid; recorded here because the
    /// sample points are a convention, not a derived quantity.
    pub xi_prime_grid: String,
    pub rows: Vec<ExportRow>,
}

pub const CSV_HEADER: &str = "d,j0,xi_prime,xi,p_perp_th,p_me_inc_th,p_ud_th,p_cud_th,r_th,\
p_perp_est,p_me_conc_est,p_me_inc_est,p_cud_est,r_est,dpp,dpmc,dpmi,seed,shots,gamma";

// 17 significant digits: enough to reproduce any f64 exactly.
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// Renders the CSV document (UTF-8, LF newlines, 17 significant digits).
pub fn csv_string(result: &SweepResult) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in &result.rows {
        let e = ExportRow::from_row(&result.grid, row);
        let fields = [
            e.d.to_string(),
            e.j0.to_string(),
            fmt(e.xi_prime),
            fmt(e.xi),
            fmt(e.p_perp_th),
            fmt(e.p_me_inc_th),
            fmt(e.p_ud_th),
            fmt(e.p_cud_th),
            fmt(e.r_th),
            fmt(e.p_perp_est),
            fmt(e.p_me_conc_est),
            fmt(e.p_me_inc_est),
            fmt(e.p_cud_est),
            fmt(e.r_est),
            fmt(e.dpp),
            fmt(e.dpmc),
            fmt(e.dpmi),
            e.seed.to_string(),
            e.shots.to_string(),
            fmt(e.gamma),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// Renders the JSON document.
pub fn json_string(result: &SweepResult) -> Result<String> {
    let doc = JsonExport {
        grid: result.grid.clone(),
        xi_prime_grid: "uniform".to_string(),
        rows: result
            .rows
            .iter()
            .map(|r| ExportRow::from_row(&result.grid, r))
            .collect(),
    };
    serde_json::to_string_pretty(&doc).map_err(|source| Error::Json {
        path: "<memory>".to_string(),
        source,
    })
}

/// Writes the sweep dataset to `path` in the chosen format.
pub fn export(result: &SweepResult, format: ExportFormat, path: &Path) -> Result<()> {
    let body = match format {
        ExportFormat::Csv => csv_string(result),
        ExportFormat::Json => json_string(result)?,
    };
    let io_err = |source| Error::Io {
        path: path.display().to_string(),
        source,
    };
    let mut file = fs::File::create(path).map_err(io_err)?;
    file.write_all(body.as_bytes()).map_err(io_err)?;
    Ok(())
}

/// Reads back a JSON export.
pub fn import_json(path: &Path) -> Result<JsonExport> {
    let body = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&body).map_err(|source| Error::Json {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_grid(dim: usize) -> SweepGrid {
        SweepGrid {
            shots_per_input: 2000,
            ..SweepGrid::default_for_dim(dim)
        }
    }

    #[test]
    fn default_grid_has_expected_size() {
        for d in [2usize, 4, 9] {
            let grid = SweepGrid::default_for_dim(d);
            assert_eq!(grid.len(), (d - 1) * 10);
            let result = run_sweep(&quick_grid(d)).unwrap();
            assert_eq!(result.rows.len(), (d - 1) * 10);
        }
    }

    #[test]
    fn rows_carry_consistent_coordinates() {
        let grid = quick_grid(4);
        let result = run_sweep(&grid).unwrap();
        for row in &result.rows {
            let xi_max = crate::qudit::compute_xi_max(4, row.j0, grid.floor).unwrap();
            assert!((row.xi - row.xi_prime * xi_max).abs() < 1e-15);
            assert!(row.theory.p_cud >= row.theory.p_ud - 1e-12);
        }
    }

    #[test]
    fn theory_p_perp_nonincreasing_in_xi_prime() {
        let result = run_sweep(&quick_grid(9)).unwrap();
        for j0 in 1..9 {
            let mut prev = f64::INFINITY;
            for row in result.rows.iter().filter(|r| r.j0 == j0) {
                assert!(row.theory.p_perp <= prev + 1e-12);
                prev = row.theory.p_perp;
            }
        }
    }

    #[test]
    fn sweep_is_deterministic() {
        let grid = quick_grid(4);
        let a = run_sweep(&grid).unwrap();
        let b = run_sweep(&grid).unwrap();
        assert_eq!(csv_string(&a), csv_string(&b));
    }

    #[test]
    fn csv_layout() {
        let result = run_sweep(&quick_grid(4)).unwrap();
        let body = csv_string(&result);
        let lines: Vec<&str> = body.lines().collect();
        assert_eq!(lines.len(), 31);
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[1].split(',').count(), 20);
        // empty result still renders the header
        let empty = SweepResult {
            grid: quick_grid(4),
            rows: vec![],
        };
        assert_eq!(csv_string(&empty), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn json_roundtrip_is_identity() {
        let result = run_sweep(&quick_grid(4)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rows.json");
        export(&result, ExportFormat::Json, &path).unwrap();
        let back = import_json(&path).unwrap();
        assert_eq!(back.grid, result.grid);
        assert_eq!(back.xi_prime_grid, "uniform");
        let direct: Vec<ExportRow> = result
            .rows
            .iter()
            .map(|r| ExportRow::from_row(&result.grid, r))
            .collect();
        assert_eq!(back.rows, direct);
    }

    #[test]
    fn export_reports_unwritable_path() {
        let result = run_sweep(&quick_grid(4)).unwrap();
        let err = export(
            &result,
            ExportFormat::Csv,
            Path::new("/nonexistent-dir/rows.csv"),
        )
        .unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/rows.csv"));
    }

    #[test]
    fn r_histogram_excludes_orthogonal_rows() {
        let mut grid = quick_grid(4);
        grid.xi_prime_values = vec![0.0, 0.5, 1.0];
        let result = run_sweep(&grid).unwrap();
        assert_eq!(result.rows.len(), 9);
        let summary = r_histogram(&result.rows, 10).unwrap();
        assert_eq!(summary.histogram.total(), 6);

        grid.xi_prime_values = vec![0.0];
        let orthogonal_only = run_sweep(&grid).unwrap();
        assert!(matches!(
            r_histogram(&orthogonal_only.rows, 10),
            Err(Error::EmptyHistogram)
        ));
    }

    #[test]
    fn degenerate_r_span_still_bins() {
        // with d = 2 every grid point has a one-dimensional inconclusive
        // space, so theory R is 1 everywhere
        let result = run_sweep(&quick_grid(2)).unwrap();
        for row in &result.rows {
            assert!((row.theory.r_theory - 1.0).abs() < 1e-12);
        }
        let values: Vec<f64> = result.rows.iter().map(|r| r.theory.r_theory).collect();
        let hist = Histogram::from_values(&values, 5, 1.0, 1.0).unwrap();
        assert_eq!(hist.total(), values.len() as u64);
        assert_eq!(hist.counts()[0], values.len() as u64);
    }

    #[test]
    fn error_histograms_cover_all_rows() {
        let result = run_sweep(&quick_grid(4)).unwrap();
        let [dpp, dpmc, dpmi] = error_histograms(&result.rows).unwrap();
        for h in [&dpp, &dpmc, &dpmi] {
            assert_eq!(h.histogram.total(), 30);
            assert!(h.min >= 0.0);
        }
        // ideal noise, moderate statistics: errors stay small
        assert!(dpp.max < 5.0, "{}", dpp.max);
    }

    #[test]
    fn run_sweep_attaches_grid_coordinates_to_failures() {
        let mut grid = quick_grid(4);
        grid.j0_values = vec![7]; // out of range for d = 4
        let err = run_sweep(&grid).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("j0 = 7"), "{msg}");
    }

    #[test]
    fn empty_grid_is_an_error() {
        let mut grid = quick_grid(4);
        grid.xi_prime_values.clear();
        assert!(matches!(run_sweep(&grid), Err(Error::EmptyGrid)));
    }
}
