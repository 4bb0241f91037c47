//! Symmetric-state families on a d-dimensional Hilbert space.
//!
//! A family is fixed by a coefficient vector {c_k} with all |c_k| > 0 and
//! Σ|c_k|² = 1. The j-th member has amplitudes c_k·ω^{jk} with
//! ω = exp(2πi/d); every member is a unit vector and the Gram matrix of the
//! family is circulant. A two-parameter profile (j0, ξ) produces coefficient
//! vectors of graded distinguishability, with ξ bounded by the smallest
//! amplitude ratio the hardware-motivated floor admits.

use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// Smallest supported dimension.
pub const MIN_DIM: usize = 2;
/// Largest supported dimension; everything here is dense O(d²).
pub const MAX_DIM: usize = 64;
/// Tolerance on state and coefficient normalization.
pub const NORM_TOL: f64 = 1e-12;
/// Tolerance on U†U = I, Frobenius norm.
pub const UNITARITY_TOL: f64 = 1e-10;
/// Default lower bound on min|c_n|²/max|c_n|² before normalization,
/// the measured modulation floor of the reference hardware.
pub const DEFAULT_AMPLITUDE_FLOOR: f64 = 0.12;

fn check_dim(dim: usize) -> Result<()> {
    if !(MIN_DIM..=MAX_DIM).contains(&dim) {
        return Err(Error::DimensionOutOfRange(dim));
    }
    Ok(())
}

/// ω^e with ω = exp(2πi/d); the exponent is reduced mod d before the
/// trig call so large j·k products lose no precision.
pub(crate) fn root_of_unity(dim: usize, exponent: i64) -> Complex64 {
    let e = exponent.rem_euclid(dim as i64) as f64;
    Complex64::from_polar(1.0, TAU * e / dim as f64)
}

/// The complex amplitudes {c_k} defining one symmetric-state family.
///
/// Invariants enforced at construction: Σ|c_k|² = 1 within [`NORM_TOL`] and
/// |c_k| > 0 for every k.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    amps: Vec<Complex64>,
}

impl CoefficientVector {
    /// Validates and wraps explicit complex amplitudes.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        check_dim(amps.len())?;
        let mut sum = 0.0;
        for (k, a) in amps.iter().enumerate() {
            if !a.re.is_finite() || !a.im.is_finite() {
                return Err(Error::NonFinite(k));
            }
            let m = a.norm();
            if m <= 0.0 {
                return Err(Error::VanishingCoefficient {
                    index: k,
                    magnitude: m,
                });
            }
            sum += a.norm_sqr();
        }
        if (sum - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { sum, tol: NORM_TOL });
        }
        Ok(Self { amps })
    }

    /// Builds real nonnegative amplitudes from squared magnitudes,
    /// normalizing them to unit total weight. Phases are zero.
    pub fn from_squared_magnitudes(csq: &[f64]) -> Result<Self> {
        let zeros = vec![0.0; csq.len()];
        Self::from_squared_magnitudes_with_phases(csq, &zeros)
    }

    /// Like [`from_squared_magnitudes`](Self::from_squared_magnitudes) with an
    /// explicit phase arg(c_k) per coefficient.
    pub fn from_squared_magnitudes_with_phases(csq: &[f64], phases: &[f64]) -> Result<Self> {
        check_dim(csq.len())?;
        if csq.len() != phases.len() {
            return Err(Error::DimensionMismatch {
                left: csq.len(),
                right: phases.len(),
            });
        }
        let mut sum = 0.0;
        for (k, &w) in csq.iter().enumerate() {
            if !w.is_finite() || !phases[k].is_finite() {
                return Err(Error::NonFinite(k));
            }
            if w <= 0.0 {
                return Err(Error::VanishingCoefficient {
                    index: k,
                    magnitude: w,
                });
            }
            sum += w;
        }
        let amps = csq
            .iter()
            .zip(phases)
            .map(|(&w, &ph)| Complex64::from_polar((w / sum).sqrt(), ph))
            .collect();
        Ok(Self { amps })
    }

    /// The uniform family c_k = 1/√d; its members are orthogonal.
    pub fn uniform(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Ok(Self {
            amps: vec![a; dim],
        })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amp(&self, k: usize) -> Complex64 {
        self.amps[k]
    }

    pub fn magnitude(&self, k: usize) -> f64 {
        self.amps[k].norm()
    }

    pub fn squared_magnitudes(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// c_min = min_k |c_k|.
    pub fn min_magnitude(&self) -> f64 {
        self.amps
            .iter()
            .map(|a| a.norm())
            .fold(f64::INFINITY, f64::min)
    }
}

/// A unit vector in the d-dimensional Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Validates unit norm within [`NORM_TOL`].
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        check_dim(amps.len())?;
        let sum: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (sum - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { sum, tol: NORM_TOL });
        }
        Ok(Self { amps })
    }

    /// Rescales the amplitudes to unit norm. Errors on (near-)zero input.
    pub fn normalized(amps: Vec<Complex64>) -> Result<Self> {
        check_dim(amps.len())?;
        let sum: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if sum <= 0.0 || !sum.is_finite() {
            return Err(Error::NotNormalized { sum, tol: NORM_TOL });
        }
        let scale = 1.0 / sum.sqrt();
        Ok(Self {
            amps: amps.into_iter().map(|a| a * scale).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amp(&self, k: usize) -> Complex64 {
        self.amps[k]
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// |⟨self|other⟩| — the physically meaningful overlap of two rays.
    pub fn overlap_magnitude(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm())
    }
}

/// Two-parameter coefficient profile (j0, ξ′) with a hardware amplitude
/// floor. ξ = ξ′·ξ_max and the unnormalized squared magnitude at n ≥ j0 is
/// 1 − (ξ(n−j0+1)/(d−j0))^{1/d}; positions n < j0 keep weight 1, so |c_n| is
/// nonincreasing from j0 on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientProfile {
    dim: usize,
    j0: usize,
    xi_prime: f64,
    floor: f64,
}

impl CoefficientProfile {
    pub fn new(dim: usize, j0: usize, xi_prime: f64, floor: f64) -> Result<Self> {
        check_dim(dim)?;
        if j0 < 1 || j0 > dim - 1 {
            return Err(Error::J0OutOfRange { j0, max: dim - 1 });
        }
        if !(0.0..1.0).contains(&floor) || floor <= 0.0 {
            return Err(Error::FloorOutOfRange(floor));
        }
        if !xi_prime.is_finite() || !(0.0..=1.0).contains(&xi_prime) {
            return Err(Error::XiOutOfRange {
                xi: xi_prime,
                xi_max: 1.0,
            });
        }
        Ok(Self {
            dim,
            j0,
            xi_prime,
            floor,
        })
    }

    /// Profile with the default amplitude floor of 0.12.
    pub fn with_default_floor(dim: usize, j0: usize, xi_prime: f64) -> Result<Self> {
        Self::new(dim, j0, xi_prime, DEFAULT_AMPLITUDE_FLOOR)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn j0(&self) -> usize {
        self.j0
    }

    pub fn xi_prime(&self) -> f64 {
        self.xi_prime
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    pub fn xi_max(&self) -> f64 {
        (1.0 - self.floor).powi(self.dim as i32)
    }

    pub fn xi(&self) -> f64 {
        self.xi_prime * self.xi_max()
    }

    /// Shorthand for [`coefficients_from_profile`].
    pub fn coefficients(&self) -> Result<CoefficientVector> {
        coefficients_from_profile(self)
    }
}

/// Largest admissible ξ for the (d, j0) family: the binding coefficient is
/// n = d−1, whose unnormalized weight 1 − ξ^{1/d} must stay at or above
/// `floor` relative to the unsuppressed weight 1, so ξ_max = (1 − floor)^d.
pub fn compute_xi_max(dim: usize, j0: usize, floor: f64) -> Result<f64> {
    check_dim(dim)?;
    if j0 < 1 || j0 > dim - 1 {
        return Err(Error::J0OutOfRange { j0, max: dim - 1 });
    }
    if !floor.is_finite() || floor <= 0.0 || floor >= 1.0 {
        return Err(Error::FloorOutOfRange(floor));
    }
    Ok((1.0 - floor).powi(dim as i32))
}

/// Coefficient vector of the (j0, ξ) profile: weights 1 for n < j0 and
/// 1 − (ξ(n−j0+1)/(d−j0))^{1/d} for n ≥ j0, normalized. Amplitudes are real
/// and nonnegative; phases default to zero.
pub fn coefficients_from_profile(profile: &CoefficientProfile) -> Result<CoefficientVector> {
    let d = profile.dim;
    let j0 = profile.j0;
    let xi = profile.xi();
    let xi_max = profile.xi_max();
    if !(0.0..=xi_max + NORM_TOL).contains(&xi) {
        return Err(Error::XiOutOfRange { xi, xi_max });
    }
    let mut weights = Vec::with_capacity(d);
    for n in 0..d {
        let w = if n >= j0 {
            let frac = xi * (n - j0 + 1) as f64 / (d - j0) as f64;
            1.0 - frac.powf(1.0 / d as f64)
        } else {
            1.0
        };
        if w <= 0.0 {
            return Err(Error::NonpositiveWeight {
                index: n,
                weight: w,
            });
        }
        weights.push(w);
    }
    CoefficientVector::from_squared_magnitudes(&weights)
}

/// |ψ_j⟩ with amplitude c_k·ω^{jk} at position k.
pub fn build_symmetric_state(c: &CoefficientVector, j: usize) -> Result<StateVector> {
    let d = c.dim();
    if j >= d {
        return Err(Error::IndexOutOfRange { index: j, dim: d });
    }
    let amps = c
        .amps()
        .iter()
        .enumerate()
        .map(|(k, &ck)| ck * root_of_unity(d, (j * k) as i64))
        .collect();
    StateVector::new(amps)
}

/// ⟨ψ_j|ψ_k⟩ = Σ_n |c_n|² ω^{(k−j)n}; depends only on (k−j) mod d, making
/// the Gram matrix circulant.
pub fn gram_overlap(c: &CoefficientVector, j: usize, k: usize) -> Result<Complex64> {
    let d = c.dim();
    if j >= d {
        return Err(Error::IndexOutOfRange { index: j, dim: d });
    }
    if k >= d {
        return Err(Error::IndexOutOfRange { index: k, dim: d });
    }
    let diff = k as i64 - j as i64;
    Ok((0..d)
        .map(|n| c.amp(n).norm_sqr() * root_of_unity(d, diff * n as i64))
        .sum())
}

/// Dense complex square matrix checked to be unitary at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    dim: usize,
    entries: Vec<Complex64>, // row-major
}

impl UnitaryMatrix {
    /// Validates U†U = I within [`UNITARITY_TOL`] in Frobenius norm.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                left: entries.len(),
                right: dim * dim,
            });
        }
        let m = Self { dim, entries };
        let dev = m.unitarity_deviation();
        if dev > UNITARITY_TOL {
            return Err(Error::NotUnitary {
                deviation: dev,
                tol: UNITARITY_TOL,
            });
        }
        Ok(m)
    }

    /// ‖U†U − I‖_F.
    pub fn unitarity_deviation(&self) -> f64 {
        let d = self.dim;
        let mut acc = 0.0;
        for r in 0..d {
            for c in 0..d {
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..d {
                    s += self.entry(k, r).conj() * self.entry(k, c);
                }
                if r == c {
                    s -= 1.0;
                }
                acc += s.norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    /// Column `col` as a state vector.
    pub fn column(&self, col: usize) -> Result<StateVector> {
        if col >= self.dim {
            return Err(Error::IndexOutOfRange {
                index: col,
                dim: self.dim,
            });
        }
        StateVector::normalized((0..self.dim).map(|r| self.entry(r, col)).collect())
    }

    /// U|ψ⟩, renormalized against float drift.
    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        if psi.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: psi.dim(),
            });
        }
        let amps = (0..self.dim)
            .map(|r| {
                (0..self.dim)
                    .map(|c| self.entry(r, c) * psi.amp(c))
                    .sum()
            })
            .collect();
        StateVector::normalized(amps)
    }

    /// U†|ψ⟩.
    pub fn apply_adjoint(&self, psi: &StateVector) -> Result<StateVector> {
        if psi.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: psi.dim(),
            });
        }
        let amps = (0..self.dim)
            .map(|r| {
                (0..self.dim)
                    .map(|c| self.entry(c, r).conj() * psi.amp(c))
                    .sum()
            })
            .collect();
        StateVector::normalized(amps)
    }
}

/// The discrete Fourier transform F with entry (j,k) = ω^{jk}/√d.
pub fn fourier_matrix(dim: usize) -> Result<UnitaryMatrix> {
    check_dim(dim)?;
    let scale = 1.0 / (dim as f64).sqrt();
    let mut entries = Vec::with_capacity(dim * dim);
    for j in 0..dim {
        for k in 0..dim {
            entries.push(root_of_unity(dim, (j * k) as i64) * scale);
        }
    }
    UnitaryMatrix::new(dim, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    fn assert_cclose(a: Complex64, b: Complex64, tol: f64) {
        assert!((a - b).norm() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn xi_max_matches_floor_solution() {
        // solve 1 - xi^{1/d} = floor
        assert_close(compute_xi_max(4, 3, 0.12).unwrap(), 0.59969536, 1e-12);
        assert_close(
            compute_xi_max(9, 8, 0.12).unwrap(),
            0.31647838182886606,
            1e-12,
        );
        // floor -> 1 leaves no room for suppression
        assert!(compute_xi_max(5, 2, 1.0 - 1e-9).unwrap() < 1e-40);
    }

    #[test]
    fn xi_max_rejects_bad_inputs() {
        assert!(compute_xi_max(4, 0, 0.12).is_err());
        assert!(compute_xi_max(4, 4, 0.12).is_err());
        assert!(compute_xi_max(4, 2, 0.0).is_err());
        assert!(compute_xi_max(4, 2, 1.0).is_err());
        assert!(compute_xi_max(1, 1, 0.12).is_err());
        assert!(compute_xi_max(65, 1, 0.12).is_err());
    }

    #[test]
    fn profile_at_zero_xi_is_uniform() {
        for d in [2usize, 4, 9] {
            for j0 in 1..d {
                let c = CoefficientProfile::with_default_floor(d, j0, 0.0)
                    .unwrap()
                    .coefficients()
                    .unwrap();
                for k in 0..d {
                    assert_close(c.amp(k).norm_sqr(), 1.0 / d as f64, 1e-14);
                }
            }
        }
    }

    #[test]
    fn profile_extreme_d4() {
        // unnormalized weights (1, 1, 1, 0.12), total 3.12
        let c = CoefficientProfile::with_default_floor(4, 3, 1.0)
            .unwrap()
            .coefficients()
            .unwrap();
        let csq = c.squared_magnitudes();
        for k in 0..3 {
            assert_close(csq[k], 0.3205128205128205, 1e-12);
        }
        assert_close(csq[3], 0.03846153846153846, 1e-12);
    }

    #[test]
    fn profile_extreme_d9() {
        let c = CoefficientProfile::with_default_floor(9, 8, 1.0)
            .unwrap()
            .coefficients()
            .unwrap();
        let csq = c.squared_magnitudes();
        assert_close(csq[8], 0.01477832512315271, 1e-12);
        for k in 0..8 {
            assert_close(csq[k], 0.12315270935960593, 1e-12);
        }
    }

    #[test]
    fn profile_magnitudes_nonincreasing_from_j0() {
        for d in [4usize, 7, 9] {
            for j0 in 1..d {
                for i in 0..=10 {
                    let c = CoefficientProfile::with_default_floor(d, j0, i as f64 / 10.0)
                        .unwrap()
                        .coefficients()
                        .unwrap();
                    for n in j0..d - 1 {
                        assert!(c.magnitude(n + 1) <= c.magnitude(n) + 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn profile_rejects_out_of_range() {
        assert!(CoefficientProfile::with_default_floor(4, 0, 0.5).is_err());
        assert!(CoefficientProfile::with_default_floor(4, 4, 0.5).is_err());
        assert!(CoefficientProfile::with_default_floor(4, 2, 1.5).is_err());
        assert!(CoefficientProfile::with_default_floor(4, 2, -0.1).is_err());
        assert!(CoefficientProfile::new(4, 2, 0.5, 0.0).is_err());
    }

    #[test]
    fn coefficient_vector_validation() {
        assert!(CoefficientVector::from_squared_magnitudes(&[0.5, 0.5]).is_ok());
        assert!(CoefficientVector::from_squared_magnitudes(&[0.5, 0.0]).is_err());
        assert!(CoefficientVector::from_squared_magnitudes(&[0.5, -0.1, 0.6]).is_err());
        assert!(CoefficientVector::from_squared_magnitudes(&[1.0]).is_err());
        let bad_norm = vec![Complex64::new(0.5, 0.0); 2];
        assert!(CoefficientVector::new(bad_norm).is_err());
        assert!(CoefficientVector::new(vec![
            Complex64::new(f64::NAN, 0.0),
            Complex64::new(1.0, 0.0)
        ])
        .is_err());
    }

    #[test]
    fn symmetric_state_j0_is_coefficients() {
        let c = CoefficientVector::from_squared_magnitudes(&[0.4, 0.3, 0.2, 0.1]).unwrap();
        let psi = build_symmetric_state(&c, 0).unwrap();
        for k in 0..4 {
            assert_cclose(psi.amp(k), c.amp(k), 1e-15);
        }
    }

    #[test]
    fn symmetric_state_d4_j1_phases() {
        // omega = i for d = 4
        let c = CoefficientVector::from_squared_magnitudes(&[0.4, 0.3, 0.2, 0.1]).unwrap();
        let psi = build_symmetric_state(&c, 1).unwrap();
        assert_cclose(psi.amp(0), Complex64::new(0.4f64.sqrt(), 0.0), 1e-12);
        assert_cclose(psi.amp(1), Complex64::new(0.0, 0.3f64.sqrt()), 1e-12);
        assert_cclose(psi.amp(2), Complex64::new(-(0.2f64.sqrt()), 0.0), 1e-12);
        assert_cclose(psi.amp(3), Complex64::new(0.0, -(0.1f64.sqrt())), 1e-12);
    }

    #[test]
    fn uniform_state_matches_fourier_column() {
        let c = CoefficientVector::uniform(5).unwrap();
        let f = fourier_matrix(5).unwrap();
        for j in 0..5 {
            let psi = build_symmetric_state(&c, j).unwrap();
            let col = f.column(j).unwrap();
            assert_close(psi.overlap_magnitude(&col).unwrap(), 1.0, 1e-12);
        }
        assert!(build_symmetric_state(&c, 5).is_err());
    }

    #[test]
    fn fourier_small_entries() {
        let f2 = fourier_matrix(2).unwrap();
        let h = 1.0 / 2f64.sqrt();
        assert_cclose(f2.entry(0, 0), Complex64::new(h, 0.0), 1e-15);
        assert_cclose(f2.entry(1, 1), Complex64::new(-h, 0.0), 1e-15);
        let f4 = fourier_matrix(4).unwrap();
        assert_cclose(f4.entry(1, 1), Complex64::new(0.0, 0.5), 1e-15);
    }

    #[test]
    fn fourier_unitary_across_dims() {
        for d in [2usize, 3, 5, 9, 17, 64] {
            let f = fourier_matrix(d).unwrap();
            assert!(f.unitarity_deviation() < UNITARITY_TOL);
        }
    }

    #[test]
    fn fourier_adjoint_inverts_apply() {
        let f = fourier_matrix(6).unwrap();
        let c = CoefficientVector::from_squared_magnitudes(&[0.3, 0.1, 0.2, 0.15, 0.05, 0.2])
            .unwrap();
        let psi = build_symmetric_state(&c, 2).unwrap();
        let back = f.apply_adjoint(&f.apply(&psi).unwrap()).unwrap();
        assert_close(psi.overlap_magnitude(&back).unwrap(), 1.0, 1e-12);
    }

    #[test]
    fn gram_overlap_examples() {
        let c = CoefficientVector::from_squared_magnitudes(&[0.4, 0.3, 0.2, 0.1]).unwrap();
        assert_cclose(
            gram_overlap(&c, 0, 0).unwrap(),
            Complex64::new(1.0, 0.0),
            1e-12,
        );
        assert_cclose(
            gram_overlap(&c, 0, 1).unwrap(),
            Complex64::new(0.2, 0.2),
            1e-12,
        );
        let u = CoefficientVector::uniform(4).unwrap();
        assert!(gram_overlap(&u, 0, 2).unwrap().norm() < 1e-14);
    }

    #[test]
    fn gram_matches_direct_inner_product_and_is_circulant() {
        let mut rng = StdRng::seed_from_u64(11);
        for d in 2..=9usize {
            let csq: Vec<f64> = (0..d).map(|_| rng.random_range(0.05..1.0)).collect();
            let c = CoefficientVector::from_squared_magnitudes(&csq).unwrap();
            for j in 0..d {
                for k in 0..d {
                    let direct = build_symmetric_state(&c, j)
                        .unwrap()
                        .inner(&build_symmetric_state(&c, k).unwrap())
                        .unwrap();
                    let g = gram_overlap(&c, j, k).unwrap();
                    assert_cclose(g, direct, 1e-12);
                    // circulant: depends only on (k - j) mod d
                    let shifted = gram_overlap(&c, (j + 1) % d, (k + 1) % d).unwrap();
                    assert_cclose(g, shifted, 1e-12);
                }
            }
        }
    }

    // |det| of the Gram matrix via Gaussian elimination with partial
    // pivoting; independent linear-independence check.
    fn gram_det_magnitude(c: &CoefficientVector) -> f64 {
        let d = c.dim();
        let mut m: Vec<Vec<Complex64>> = (0..d)
            .map(|j| (0..d).map(|k| gram_overlap(c, j, k).unwrap()).collect())
            .collect();
        let mut det = 1.0f64;
        for col in 0..d {
            let (pivot, _) = (col..d)
                .map(|r| (r, m[r][col].norm()))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            if m[pivot][col].norm() == 0.0 {
                return 0.0;
            }
            m.swap(col, pivot);
            det *= m[col][col].norm();
            for r in col + 1..d {
                let f = m[r][col] / m[col][col];
                for k in col..d {
                    let sub = f * m[col][k];
                    m[r][k] -= sub;
                }
            }
        }
        det
    }

    #[test]
    fn states_linearly_independent_for_positive_coefficients() {
        let mut rng = StdRng::seed_from_u64(23);
        for d in 2..=9usize {
            for _ in 0..20 {
                let csq: Vec<f64> = (0..d).map(|_| rng.random_range(0.05..1.0)).collect();
                let c = CoefficientVector::from_squared_magnitudes(&csq).unwrap();
                assert!(
                    gram_det_magnitude(&c) > 1e-12,
                    "gram determinant collapsed for csq {csq:?}"
                );
            }
        }
    }

    #[test]
    fn state_vector_validation() {
        assert!(StateVector::new(vec![Complex64::new(0.8, 0.0); 2]).is_err());
        assert!(StateVector::normalized(vec![Complex64::new(0.0, 0.0); 3]).is_err());
        let s = StateVector::normalized(vec![
            Complex64::new(3.0, 0.0),
            Complex64::new(0.0, 4.0),
        ])
        .unwrap();
        assert_close(s.amp(0).re, 0.6, 1e-15);
        assert_close(s.amp(1).im, 0.8, 1e-15);
    }
}
