//! Two-spin reduced states and the Wootters concurrence.

use nalgebra::{Matrix4, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonian::{build, DipolarForm, SpinSystem, ZeemanRatio};
use crate::spin_ops::{check_pair, hermitian_eigendecomposition, pauli_y, ManyBodyOperator, Spectrum};
use crate::thermo::thermal_state;

/// Validity tolerance for reduced two-spin density matrices.
pub const STATE_TOL: f64 = 1e-10;
/// Largest imaginary part tolerated in the eigenvalues of `ρ ρ̃`.
pub const IMAG_TOL: f64 = 1e-8;
/// Negative eigenvalues of `ρ ρ̃` down to `-CLAMP_TOL` are clamped to 0.
pub const CLAMP_TOL: f64 = 1e-10;

const SCHUR_MAX_ITER: usize = 10_000;

/// Density matrix of an ordered spin pair. `pair.0 < pair.1`, and the first
/// site is the more significant bit of the 4-dimensional basis.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSpinState {
    matrix: Matrix4<Complex64>,
    pair: (usize, usize),
}

impl TwoSpinState {
    /// Validates Hermiticity, unit trace and positivity to [`STATE_TOL`].
    pub fn new(matrix: Matrix4<Complex64>, pair: (usize, usize)) -> Result<Self> {
        let herm = (matrix - matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !(herm <= STATE_TOL) {
            return Err(Error::InvalidTwoSpinState(format!("Hermiticity defect {herm:e}")));
        }
        let trace = matrix.trace();
        if !((trace - Complex64::new(1.0, 0.0)).norm() <= STATE_TOL) {
            return Err(Error::InvalidTwoSpinState(format!("trace {trace}")));
        }
        let hermitian = (matrix + matrix.adjoint()) * Complex64::new(0.5, 0.0);
        let min_eig = hermitian
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -STATE_TOL {
            return Err(Error::InvalidTwoSpinState(format!("negative eigenvalue {min_eig:e}")));
        }
        Ok(Self { matrix, pair })
    }

    /// Pure state `|ψ⟩⟨ψ|` on sites (1, 2); `psi` is normalized here.
    pub fn pure(psi: [Complex64; 4]) -> Result<Self> {
        let v = nalgebra::Vector4::from(psi);
        let norm = v.norm();
        if !(norm > 0.0) {
            return Err(Error::InvalidTwoSpinState("zero state vector".into()));
        }
        let v = v / Complex64::new(norm, 0.0);
        Self::new(v * v.adjoint(), (1, 2))
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.matrix
    }

    pub fn pair(&self) -> (usize, usize) {
        self.pair
    }
}

fn ordered(pair: (usize, usize)) -> (usize, usize) {
    (pair.0.min(pair.1), pair.0.max(pair.1))
}

/// Maps a local pair index and a spectator index to a full basis index.
#[derive(Debug, Clone, Copy)]
struct PairIndexer {
    shift_a: usize,
    shift_b: usize,
}

impl PairIndexer {
    fn new(n_spins: usize, pair: (usize, usize)) -> Self {
        Self {
            shift_a: n_spins - pair.0,
            shift_b: n_spins - pair.1,
        }
    }

    /// Inserts the two local bits into `rest` at the kept positions.
    fn index(&self, local: usize, rest: usize) -> usize {
        // Spread `rest` around the two holes, lower hole first.
        let (lo, hi) = (self.shift_b, self.shift_a);
        let low_mask = (1usize << lo) - 1;
        let mut idx = (rest & low_mask) | ((rest & !low_mask) << 1);
        let mid_mask = (1usize << hi) - 1;
        idx = (idx & mid_mask) | ((idx & !mid_mask) << 1);
        idx | ((local >> 1) << self.shift_a) | ((local & 1) << self.shift_b)
    }
}

/// Reduced density matrix of `pair`, tracing out every other spin.
pub fn partial_trace(rho: &ManyBodyOperator, keep: (usize, usize)) -> Result<TwoSpinState> {
    let n = rho.n_spins();
    check_pair(keep.0, keep.1, n)?;
    let pair = ordered(keep);
    let idx = PairIndexer::new(n, pair);
    let m = rho.matrix();
    let mut out = Matrix4::zeros();
    for rest in 0..rho.dim() / 4 {
        for a in 0..4 {
            let row = idx.index(a, rest);
            for b in 0..4 {
                out[(a, b)] += m[(row, idx.index(b, rest))];
            }
        }
    }
    TwoSpinState::new(out, pair)
}

/// `σ_y ⊗ σ_y`.
pub fn sigma_yy() -> Matrix4<Complex64> {
    let y = pauli_y();
    y.kronecker(&y)
}

/// `ρ̃ = (σ_y ⊗ σ_y) ρ* (σ_y ⊗ σ_y)`.
pub fn spin_flip(state: &TwoSpinState) -> Matrix4<Complex64> {
    let yy = sigma_yy();
    yy * state.matrix.map(|z| z.conj()) * yy
}

/// Wootters decomposition of one two-spin state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Concurrence {
    /// Square roots of the eigenvalues of `ρ ρ̃`, descending.
    pub lambdas: [f64; 4],
    /// `λ₁ − λ₂ − λ₃ − λ₄`, may be negative.
    pub q: f64,
    /// `max(q, 0)`.
    pub value: f64,
}

/// Concurrence from the eigenvalues of the non-Hermitian `R = ρ ρ̃`.
pub fn concurrence(state: &TwoSpinState) -> Result<Concurrence> {
    let flipped = spin_flip(state);
    let r = state.matrix * flipped;
    let scale = r.camax();
    let eigs = if scale == 0.0 {
        nalgebra::Vector4::zeros()
    } else {
        let unit = Complex64::new(scale, 0.0);
        match Schur::try_new(r / unit, f64::EPSILON, SCHUR_MAX_ITER).and_then(|s| s.eigenvalues()) {
            Some(eigs) => eigs * unit,
            // Near-nilpotent R (almost pure product states) can stall the
            // iteration; √ρ ρ̃ √ρ is similar to R and Hermitian.
            None => similar_hermitian_eigenvalues(&state.matrix, &flipped),
        }
    };
    let mut lambdas = [0.0; 4];
    for (slot, mu) in lambdas.iter_mut().zip(eigs.iter()) {
        if !(mu.im.abs() <= IMAG_TOL) {
            return Err(Error::InvalidTwoSpinState(format!(
                "eigenvalue {mu} of R has a large imaginary part"
            )));
        }
        if mu.re < -CLAMP_TOL {
            return Err(Error::InvalidTwoSpinState(format!("eigenvalue {mu} of R is negative")));
        }
        *slot = mu.re.max(0.0).sqrt();
    }
    lambdas.sort_by(|a, b| b.total_cmp(a));
    let q = lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3];
    Ok(Concurrence {
        lambdas,
        q,
        value: q.max(0.0),
    })
}

fn similar_hermitian_eigenvalues(
    rho: &Matrix4<Complex64>,
    flipped: &Matrix4<Complex64>,
) -> nalgebra::Vector4<Complex64> {
    let half = Complex64::new(0.5, 0.0);
    let eig = ((rho + rho.adjoint()) * half).symmetric_eigen();
    let root = eig.eigenvalues.map(|x| Complex64::new(x.max(0.0).sqrt(), 0.0));
    let sqrt_rho = eig.eigenvectors * Matrix4::from_diagonal(&root) * eig.eigenvectors.adjoint();
    let m = sqrt_rho * flipped * sqrt_rho;
    ((m + m.adjoint()) * half)
        .symmetric_eigenvalues()
        .map(|x| Complex64::new(x, 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcurrencePoint {
    pub beta: f64,
    pub alpha: f64,
    pub q: f64,
    pub concurrence: f64,
}

/// Concurrence of `pair` in the thermal state of `sys` at `(α, β)`, built
/// through the full density matrix.
pub fn thermal_concurrence(
    sys: &SpinSystem,
    alpha: ZeemanRatio,
    form: DipolarForm,
    beta: f64,
    pair: (usize, usize),
) -> Result<ConcurrencePoint> {
    let h = build(sys, alpha, form)?;
    let spectrum = hermitian_eigendecomposition(&h)?;
    let rho = thermal_state(&spectrum, beta)?.density_matrix();
    let c = concurrence(&partial_trace(&rho, pair)?)?;
    Ok(ConcurrencePoint {
        beta,
        alpha: alpha.value(),
        q: c.q,
        concurrence: c.value,
    })
}

/// Per-eigenvector reduced projectors `Tr_rest |v_i⟩⟨v_i|` for one pair, so
/// the reduced thermal state at any β is a population-weighted sum of 4×4
/// matrices instead of a full density matrix followed by a partial trace.
#[derive(Debug, Clone)]
pub struct PairReduction {
    pair: (usize, usize),
    projectors: Vec<Matrix4<Complex64>>,
}

impl PairReduction {
    pub fn new(spectrum: &Spectrum, pair: (usize, usize)) -> Result<Self> {
        let n = spectrum.n_spins();
        check_pair(pair.0, pair.1, n)?;
        let pair = ordered(pair);
        let idx = PairIndexer::new(n, pair);
        let v = spectrum.eigenvectors();
        let projectors = v
            .column_iter()
            .map(|col| {
                let mut out = Matrix4::zeros();
                for rest in 0..spectrum.dim() / 4 {
                    let amps: [Complex64; 4] = std::array::from_fn(|a| col[idx.index(a, rest)]);
                    for a in 0..4 {
                        for b in 0..4 {
                            out[(a, b)] += amps[a] * amps[b].conj();
                        }
                    }
                }
                out
            })
            .collect();
        Ok(Self { pair, projectors })
    }

    pub fn pair(&self) -> (usize, usize) {
        self.pair
    }

    /// Reduced state for populations ordered like the spectrum.
    pub fn reduce(&self, populations: &[f64]) -> Result<TwoSpinState> {
        assert_eq!(populations.len(), self.projectors.len(), "population count mismatch");
        let mut out = Matrix4::zeros();
        for (p, proj) in populations.iter().zip(&self.projectors) {
            if *p != 0.0 {
                out += proj * Complex64::new(*p, 0.0);
            }
        }
        out = (out + out.adjoint()) * Complex64::new(0.5, 0.0);
        TwoSpinState::new(out, self.pair)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::build_secular;
    use approx::assert_abs_diff_eq;
    use nalgebra::{DMatrix, Matrix2};
    use rand::{Rng, SeedableRng};

    const O: Complex64 = Complex64::new(0.0, 0.0);

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn singlet() -> TwoSpinState {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        TwoSpinState::pure([O, re(r), re(-r), O]).unwrap()
    }

    fn mixed() -> TwoSpinState {
        TwoSpinState::new(Matrix4::identity() * re(0.25), (1, 2)).unwrap()
    }

    fn werner(p: f64) -> TwoSpinState {
        let m = singlet().matrix * re(p) + Matrix4::identity() * re((1.0 - p) / 4.0);
        TwoSpinState::new(m, (1, 2)).unwrap()
    }

    /// Reduced state by explicit bit decomposition of every index pair.
    fn brute_force_trace(rho: &DMatrix<Complex64>, n: usize, keep: (usize, usize)) -> Matrix4<Complex64> {
        let bit = |idx: usize, site: usize| (idx >> (n - site)) & 1;
        let mut out = Matrix4::zeros();
        for i in 0..rho.nrows() {
            for j in 0..rho.ncols() {
                let same_rest = (1..=n)
                    .filter(|&s| s != keep.0 && s != keep.1)
                    .all(|s| bit(i, s) == bit(j, s));
                if same_rest {
                    let a = 2 * bit(i, keep.0) + bit(i, keep.1);
                    let b = 2 * bit(j, keep.0) + bit(j, keep.1);
                    out[(a, b)] += rho[(i, j)];
                }
            }
        }
        out
    }

    fn random_density(rng: &mut impl Rng, dim: usize) -> DMatrix<Complex64> {
        let a = DMatrix::from_fn(dim, dim, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let m = &a * a.adjoint();
        let tr = m.trace();
        m / tr
    }

    #[test]
    fn product_state_reduction() {
        let mut m = DMatrix::zeros(8, 8);
        m[(0, 0)] = re(1.0);
        let rho = ManyBodyOperator::from_matrix(3, m).unwrap();
        let red = partial_trace(&rho, (1, 2)).unwrap();
        let mut want = Matrix4::zeros();
        want[(0, 0)] = re(1.0);
        assert_eq!(red.matrix(), &want);
    }

    #[test]
    fn ghz_reduction() {
        let mut m = DMatrix::zeros(8, 8);
        for (i, j) in [(0, 0), (0, 7), (7, 0), (7, 7)] {
            m[(i, j)] = re(0.5);
        }
        let rho = ManyBodyOperator::from_matrix(3, m).unwrap();
        for pair in [(1, 2), (2, 3), (3, 1)] {
            let red = partial_trace(&rho, pair).unwrap();
            let want = Matrix4::from_diagonal(&nalgebra::Vector4::new(re(0.5), O, O, re(0.5)));
            assert_abs_diff_eq!((red.matrix() - want).camax(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn maximally_mixed_reduction() {
        for n in 2..=5 {
            let dim = 1 << n;
            let m = DMatrix::identity(dim, dim) / re(dim as f64);
            let rho = ManyBodyOperator::from_matrix(n, m).unwrap();
            let red = partial_trace(&rho, (1, n)).unwrap();
            assert_abs_diff_eq!(
                (red.matrix() - Matrix4::identity() * re(0.25)).camax(),
                0.0,
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn partial_trace_errors() {
        let rho = ManyBodyOperator::from_matrix(3, DMatrix::identity(8, 8) / re(8.0)).unwrap();
        assert!(matches!(partial_trace(&rho, (2, 2)), Err(Error::IdenticalSites(2))));
        assert!(matches!(partial_trace(&rho, (1, 4)), Err(Error::SiteOutOfRange { .. })));
        let bad = ManyBodyOperator::from_matrix(3, DMatrix::identity(8, 8)).unwrap();
        assert!(matches!(
            partial_trace(&bad, (1, 2)),
            Err(Error::InvalidTwoSpinState(_))
        ));
    }

    #[test]
    fn partial_trace_matches_brute_force() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(17);
        for n in [3usize, 4] {
            for _ in 0..10 {
                let m = random_density(&mut rng, 1 << n);
                let rho = ManyBodyOperator::from_matrix(n, m.clone()).unwrap();
                for a in 1..=n {
                    for b in a + 1..=n {
                        let got = partial_trace(&rho, (a, b)).unwrap();
                        let want = brute_force_trace(&m, n, (a, b));
                        assert!((got.matrix() - want).camax() <= 1e-12);
                        assert_abs_diff_eq!(got.matrix().trace().re, 1.0, epsilon = 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn spin_flip_examples() {
        assert_eq!(spin_flip(&mixed()), Matrix4::identity() * re(0.25));
        let s = singlet();
        assert_abs_diff_eq!((spin_flip(&s) - s.matrix()).camax(), 0.0, epsilon = 1e-15);
        let up = TwoSpinState::pure([re(1.0), O, O, O]).unwrap();
        let mut want = Matrix4::zeros();
        want[(3, 3)] = re(1.0);
        assert_eq!(spin_flip(&up), want);
    }

    #[test]
    fn concurrence_examples() {
        assert_abs_diff_eq!(concurrence(&singlet()).unwrap().value, 1.0, epsilon = 1e-10);
        assert_eq!(concurrence(&mixed()).unwrap().value, 0.0);
        assert_abs_diff_eq!(concurrence(&werner(0.8)).unwrap().value, 0.7, epsilon = 1e-10);
        for p in [0.0, 1.0 / 3.0, 0.5, 0.8, 1.0] {
            let c = concurrence(&werner(p)).unwrap();
            assert_abs_diff_eq!(c.value, (1.5 * p - 0.5).max(0.0), epsilon = 1e-10);
            // q stays continuous below the threshold.
            assert_abs_diff_eq!(c.q, 1.5 * p - 0.5, epsilon = 1e-10);
        }
    }

    #[test]
    fn product_states_are_separable() {
        let up = TwoSpinState::pure([re(1.0), O, O, O]).unwrap();
        assert_eq!(concurrence(&up).unwrap().value, 0.0);
        let updown = TwoSpinState::pure([O, re(1.0), O, O]).unwrap();
        assert_eq!(concurrence(&updown).unwrap().value, 0.0);
    }

    /// Eigenvalues of the Hermitian `√ρ ρ̃ √ρ`, which share the spectrum of `ρ ρ̃`.
    fn hermitian_route(state: &TwoSpinState) -> f64 {
        let m = state.matrix;
        let eig = m.symmetric_eigen();
        let sqrt = eig.eigenvectors
            * Matrix4::from_diagonal(&eig.eigenvalues.map(|x| re(x.max(0.0).sqrt())))
            * eig.eigenvectors.adjoint();
        let h = sqrt * spin_flip(state) * sqrt;
        let h = (h + h.adjoint()) * re(0.5);
        let mut l: Vec<f64> = h.symmetric_eigenvalues().iter().map(|x| x.max(0.0).sqrt()).collect();
        l.sort_by(|a, b| b.total_cmp(a));
        (l[0] - l[1] - l[2] - l[3]).max(0.0)
    }

    fn random_unitary(rng: &mut impl Rng) -> Matrix2<Complex64> {
        let (t, a, b, g) = (
            rng.gen_range(0.0..std::f64::consts::PI),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-3.0..3.0),
        );
        let e = |x: f64| Complex64::from_polar(1.0, x);
        Matrix2::new(e(a) * t.cos(), e(b) * t.sin(), -e(-b) * t.sin(), e(-a) * t.cos()) * e(g)
    }

    #[test]
    fn random_states_agree_with_hermitian_route_and_local_unitaries() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(23);
        for _ in 0..200 {
            // Mix a random pure state with noise so both signs of q appear.
            let psi: Vec<Complex64> = (0..4)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let pure = TwoSpinState::pure([psi[0], psi[1], psi[2], psi[3]]).unwrap();
            let noise = random_density(&mut rng, 4);
            let w = rng.gen_range(0.0..1.0);
            let m = pure.matrix * re(w) + Matrix4::from_iterator(noise.iter().copied()) * re(1.0 - w);
            let st = TwoSpinState::new(m, (1, 2)).unwrap();
            let c = concurrence(&st).unwrap();
            assert!((0.0..=1.0 + 1e-10).contains(&c.value));
            assert_abs_diff_eq!(c.value, hermitian_route(&st), epsilon = 1e-8);

            let u = random_unitary(&mut rng).kronecker(&random_unitary(&mut rng));
            let rotated = TwoSpinState::new(u * st.matrix * u.adjoint(), (1, 2)).unwrap();
            assert_abs_diff_eq!(concurrence(&rotated).unwrap().value, c.value, epsilon = 1e-8);
        }
    }

    #[test]
    fn rejects_invalid_states() {
        assert!(TwoSpinState::new(Matrix4::identity(), (1, 2)).is_err());
        let mut m = Matrix4::identity() * re(0.25);
        m[(0, 1)] = re(0.1);
        assert!(TwoSpinState::new(m, (1, 2)).is_err());
        let neg = Matrix4::from_diagonal(&nalgebra::Vector4::new(re(1.5), re(-0.5), O, O));
        assert!(TwoSpinState::new(neg, (1, 2)).is_err());
    }

    #[test]
    fn two_spin_thermal_limits() {
        let sys = SpinSystem::chain(2).unwrap();
        let a = ZeemanRatio::new(1.0).unwrap();
        let hot = thermal_concurrence(&sys, a, DipolarForm::Secular, 200.0, (1, 2)).unwrap();
        assert_abs_diff_eq!(hot.concurrence, 1.0, epsilon = 1e-8);
        let cold = thermal_concurrence(&sys, a, DipolarForm::Secular, -200.0, (1, 2)).unwrap();
        assert_eq!(cold.concurrence, 0.0);
        let flat = thermal_concurrence(&sys, a, DipolarForm::Secular, 0.0, (1, 2)).unwrap();
        assert_eq!(flat.concurrence, 0.0);
        assert!(flat.q < 0.0);
    }

    #[test]
    fn pair_reduction_matches_direct_path() {
        let sys = SpinSystem::ring(4).unwrap();
        let h = build(&sys, ZeemanRatio::new(1.0).unwrap(), DipolarForm::Transverse).unwrap();
        let spec = hermitian_eigendecomposition(&h).unwrap();
        for pair in [(1, 2), (3, 1), (2, 4)] {
            let red = PairReduction::new(&spec, pair).unwrap();
            for beta in [-3.0, -0.5, 0.0, 0.9, 4.0] {
                let st = thermal_state(&spec, beta).unwrap();
                let fast = red.reduce(st.populations()).unwrap();
                let slow = partial_trace(&st.density_matrix(), pair).unwrap();
                assert!((fast.matrix() - slow.matrix()).camax() <= 1e-13);
                assert_eq!(fast.pair(), slow.pair());
            }
        }
    }

    #[test]
    fn secular_two_spin_ground_state_concurrence() {
        let h = build_secular(&SpinSystem::chain(2).unwrap(), ZeemanRatio::new(1.0).unwrap()).unwrap();
        let spec = hermitian_eigendecomposition(&h).unwrap();
        let red = PairReduction::new(&spec, (1, 2)).unwrap();
        let mut p = vec![0.0; 4];
        p[0] = 1.0;
        assert_abs_diff_eq!(
            concurrence(&red.reduce(&p).unwrap()).unwrap().value,
            1.0,
            epsilon = 1e-12
        );
    }
}
