//! Spin-1/2 operators on the 2^N-dimensional product space and the Hermitian
//! eigendecomposition everything downstream is built on.
//!
//! Basis convention: site 1 is the most significant bit of a basis index and
//! spin-up maps to bit value 0, so `|↑↑…↑⟩` is index 0.

use nalgebra::{DMatrix, DVector, Matrix2, Matrix4};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest spin count for which many-body operators are materialized.
pub const DEFAULT_MAX_SPINS: usize = 12;

/// Tolerance on `max |M - M†|` for a matrix to count as Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const HALF: Complex64 = Complex64::new(0.5, 0.0);
const HALF_I: Complex64 = Complex64::new(0.0, 0.5);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
    Plus,
    Minus,
}

/// Single spin-1/2 operator `I_axis` in the `(|↑⟩, |↓⟩)` basis.
pub fn single_spin_operator(axis: Axis) -> Matrix2<Complex64> {
    match axis {
        Axis::X => Matrix2::new(ZERO, HALF, HALF, ZERO),
        Axis::Y => Matrix2::new(ZERO, -HALF_I, HALF_I, ZERO),
        Axis::Z => Matrix2::new(HALF, ZERO, ZERO, -HALF),
        Axis::Plus => Matrix2::new(ZERO, ONE, ZERO, ZERO),
        Axis::Minus => Matrix2::new(ZERO, ZERO, ONE, ZERO),
    }
}

/// Pauli matrix `σ_y = 2 I_y`.
pub fn pauli_y() -> Matrix2<Complex64> {
    single_spin_operator(Axis::Y) * Complex64::new(2.0, 0.0)
}

/// Dense operator on `n_spins` spin-1/2 sites.
#[derive(Debug, Clone, PartialEq)]
pub struct ManyBodyOperator {
    n_spins: usize,
    matrix: DMatrix<Complex64>,
}

impl ManyBodyOperator {
    pub fn zeros(n_spins: usize) -> Result<Self> {
        check_spin_count(n_spins, DEFAULT_MAX_SPINS)?;
        let dim = 1usize << n_spins;
        Ok(Self {
            n_spins,
            matrix: DMatrix::zeros(dim, dim),
        })
    }

    pub fn identity(n_spins: usize) -> Result<Self> {
        check_spin_count(n_spins, DEFAULT_MAX_SPINS)?;
        let dim = 1usize << n_spins;
        Ok(Self {
            n_spins,
            matrix: DMatrix::identity(dim, dim),
        })
    }

    /// Wraps an existing matrix, checking that its dimension is `2^n_spins`.
    pub fn from_matrix(n_spins: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        let dim = 1usize << n_spins;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        Ok(Self { n_spins, matrix })
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// `max_ij |M_ij - conj(M_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.matrix)
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Adds `coeff · op` acting on `site` (1-based) in place.
    pub fn add_single_site(&mut self, coeff: f64, op: &Matrix2<Complex64>, site: usize) -> Result<()> {
        check_site(site, self.n_spins)?;
        let shift = self.n_spins - site;
        let mask = 1usize << shift;
        let coeff = Complex64::new(coeff, 0.0);
        for col in 0..self.dim() {
            let b_in = (col >> shift) & 1;
            for b_out in 0..2 {
                let elem = op[(b_out, b_in)];
                if elem == ZERO {
                    continue;
                }
                let row = (col & !mask) | (b_out << shift);
                self.matrix[(row, col)] += coeff * elem;
            }
        }
        Ok(())
    }

    /// Adds `coeff · op` where `op` is a 4×4 operator on the ordered site pair
    /// `(site_a, site_b)`; `site_a` indexes the more significant local bit.
    pub fn add_two_site(&mut self, coeff: f64, op: &Matrix4<Complex64>, site_a: usize, site_b: usize) -> Result<()> {
        check_pair(site_a, site_b, self.n_spins)?;
        let sa = self.n_spins - site_a;
        let sb = self.n_spins - site_b;
        let clear = !((1usize << sa) | (1usize << sb));
        let coeff = Complex64::new(coeff, 0.0);
        for col in 0..self.dim() {
            let local_in = (((col >> sa) & 1) << 1) | ((col >> sb) & 1);
            for local_out in 0..4 {
                let elem = op[(local_out, local_in)];
                if elem == ZERO {
                    continue;
                }
                let row = (col & clear) | ((local_out >> 1) << sa) | ((local_out & 1) << sb);
                self.matrix[(row, col)] += coeff * elem;
            }
        }
        Ok(())
    }

    pub fn commutator_norm(&self, other: &ManyBodyOperator) -> f64 {
        let c = &self.matrix * &other.matrix - &other.matrix * &self.matrix;
        c.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl std::ops::Add for &ManyBodyOperator {
    type Output = ManyBodyOperator;

    fn add(self, rhs: &ManyBodyOperator) -> ManyBodyOperator {
        assert_eq!(self.n_spins, rhs.n_spins, "spin count mismatch");
        ManyBodyOperator {
            n_spins: self.n_spins,
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl std::ops::Mul for &ManyBodyOperator {
    type Output = ManyBodyOperator;

    fn mul(self, rhs: &ManyBodyOperator) -> ManyBodyOperator {
        assert_eq!(self.n_spins, rhs.n_spins, "spin count mismatch");
        ManyBodyOperator {
            n_spins: self.n_spins,
            matrix: &self.matrix * &rhs.matrix,
        }
    }
}

pub(crate) fn check_spin_count(n_spins: usize, cap: usize) -> Result<()> {
    if n_spins == 0 {
        return Err(Error::NoSpins);
    }
    if n_spins > cap {
        return Err(Error::TooManySpins { n_spins, cap });
    }
    Ok(())
}

pub(crate) fn check_site(site: usize, n_spins: usize) -> Result<()> {
    if site == 0 || site > n_spins {
        return Err(Error::SiteOutOfRange { site, n_spins });
    }
    Ok(())
}

pub(crate) fn check_pair(a: usize, b: usize, n_spins: usize) -> Result<()> {
    check_site(a, n_spins)?;
    check_site(b, n_spins)?;
    if a == b {
        return Err(Error::IdenticalSites(a));
    }
    Ok(())
}

pub(crate) fn hermiticity_defect(m: &DMatrix<Complex64>) -> f64 {
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `1 ⊗ … ⊗ op ⊗ … ⊗ 1` with `op` at `site` (1-based), capped at
/// [`DEFAULT_MAX_SPINS`].
pub fn embed(op: &Matrix2<Complex64>, site: usize, n_spins: usize) -> Result<ManyBodyOperator> {
    embed_with_cap(op, site, n_spins, DEFAULT_MAX_SPINS)
}

pub fn embed_with_cap(op: &Matrix2<Complex64>, site: usize, n_spins: usize, cap: usize) -> Result<ManyBodyOperator> {
    check_spin_count(n_spins, cap)?;
    check_site(site, n_spins)?;
    let dim = 1usize << n_spins;
    let mut out = ManyBodyOperator {
        n_spins,
        matrix: DMatrix::zeros(dim, dim),
    };
    out.add_single_site(1.0, op, site)?;
    Ok(out)
}

/// `Σ_k I_k^z`.
pub fn total_iz(n_spins: usize) -> Result<ManyBodyOperator> {
    let iz = single_spin_operator(Axis::Z);
    let mut out = ManyBodyOperator::zeros(n_spins)?;
    for site in 1..=n_spins {
        out.add_single_site(1.0, &iz, site)?;
    }
    Ok(out)
}

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors
/// stored column-wise.
#[derive(Debug, Clone)]
pub struct Spectrum {
    n_spins: usize,
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<Complex64>,
}

impl Spectrum {
    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<Complex64> {
        &self.eigenvectors
    }

    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn top_energy(&self) -> f64 {
        self.eigenvalues[self.dim() - 1]
    }

    /// `max |V diag(ε) V† - M|`.
    pub fn reconstruction_residual(&self, m: &ManyBodyOperator) -> f64 {
        let scaled = scale_columns(&self.eigenvectors, self.eigenvalues.iter().copied());
        let rebuilt = scaled * self.eigenvectors.adjoint();
        (rebuilt - m.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |V†V - 1|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let gram = self.eigenvectors.adjoint() * &self.eigenvectors;
        let dim = self.dim();
        (gram - DMatrix::<Complex64>::identity(dim, dim))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Returns `V · diag(weights)`.
pub(crate) fn scale_columns(v: &DMatrix<Complex64>, weights: impl Iterator<Item = f64>) -> DMatrix<Complex64> {
    let mut out = v.clone();
    for (mut col, w) in out.column_iter_mut().zip(weights) {
        col *= Complex64::new(w, 0.0);
    }
    out
}

const EIGEN_MAX_SWEEPS: usize = 100_000;

/// Hermitian eigendecomposition with eigenvalues sorted ascending.
pub fn hermitian_eigendecomposition(m: &ManyBodyOperator) -> Result<Spectrum> {
    let defect = m.hermiticity_defect();
    if !defect.is_finite() || defect > HERMITICITY_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let eig = nalgebra::SymmetricEigen::try_new(m.matrix.clone(), f64::EPSILON, EIGEN_MAX_SWEEPS)
        .ok_or(Error::EigenSolverFailed("symmetric QR iteration did not converge"))?;
    if eig.eigenvalues.iter().any(|e| !e.is_finite()) {
        return Err(Error::EigenSolverFailed("non-finite eigenvalue"));
    }

    let dim = m.dim();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = DVector::from_iterator(dim, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut eigenvectors = DMatrix::zeros(dim, dim);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }

    Ok(Spectrum {
        n_spins: m.n_spins,
        eigenvalues,
        eigenvectors,
    })
}
