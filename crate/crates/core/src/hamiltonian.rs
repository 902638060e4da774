//! Dimensionless Hamiltonians `h = α Σ_k I_k^z + h_dd` in units of the
//! nearest-neighbour dipolar constant `D = γ²ħ / r₁₂³`.
//!
//! Three dipolar forms are available:
//!
//! * [`DipolarForm::Secular`]: `Σ b_jk (2 I_j^z I_k^z − I_j^x I_k^x − I_j^y I_k^y)`,
//!   the part of the interaction that conserves total `I^z`.
//! * [`DipolarForm::Transverse`]: the complete dipolar tensor
//!   `−b_jk [3 (I_j·n)(I_k·n) − I_j·I_k]` with every bond direction `n`
//!   perpendicular to the field. This keeps the non-secular terms and is the
//!   form used for the thermal-entanglement sweeps.
//! * [`build_full_dipolar`]: the complete tensor for explicit 3D coordinates
//!   and an arbitrary field direction.
//!
//! Every pair is counted once (`j < k`).

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, Matrix3, Matrix4, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spin_ops::{check_pair, check_spin_count, single_spin_operator, Axis, ManyBodyOperator, DEFAULT_MAX_SPINS};

/// Relative distance below which two custom spins count as coincident.
const COINCIDENCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    /// Regular polygon of `n` spins.
    Ring(usize),
    /// Equally spaced collinear spins.
    Chain(usize),
    /// Explicit coordinates in units of the nearest-neighbour distance.
    Custom(Vec<Vector3<f64>>),
}

impl Geometry {
    pub fn n_spins(&self) -> usize {
        match self {
            Geometry::Ring(n) | Geometry::Chain(n) => *n,
            Geometry::Custom(points) => points.len(),
        }
    }
}

/// Normalized coupling `b_mn` between sites `m` and `n` (1-based).
///
/// Nearest neighbours couple with exactly 1 on rings and chains; custom
/// geometries use `(r_min / r_mn)³` with `r_min` the smallest pair distance.
pub fn coupling_constant(geometry: &Geometry, m: usize, n: usize) -> Result<f64> {
    let n_spins = geometry.n_spins();
    check_pair(m, n, n_spins)?;
    let sep = m.abs_diff(n) as f64;
    let value = match geometry {
        Geometry::Ring(size) => {
            let size = *size as f64;
            ((PI / size).sin() / (PI * sep / size).sin()).powi(3)
        }
        Geometry::Chain(_) => 1.0 / sep.powi(3),
        Geometry::Custom(points) => {
            let r_min = min_pair_distance(points)?;
            let r = (points[n - 1] - points[m - 1]).norm();
            (r_min / r).powi(3)
        }
    };
    Ok(value)
}

fn min_pair_distance(points: &[Vector3<f64>]) -> Result<f64> {
    let scale = points.iter().map(|p| p.norm()).fold(1.0, f64::max);
    let mut best = f64::INFINITY;
    for j in 0..points.len() {
        for k in j + 1..points.len() {
            let d = (points[k] - points[j]).norm();
            if !(d > COINCIDENCE_TOL * scale) {
                return Err(Error::CoincidentSpins(j + 1, k + 1));
            }
            best = best.min(d);
        }
    }
    Ok(best)
}

/// A cluster of spins with its symmetric coupling matrix `b_jk`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinSystem {
    geometry: Geometry,
    couplings: DMatrix<f64>,
}

impl SpinSystem {
    pub fn ring(n: usize) -> Result<Self> {
        Self::from_geometry(Geometry::Ring(n))
    }

    pub fn chain(n: usize) -> Result<Self> {
        Self::from_geometry(Geometry::Chain(n))
    }

    pub fn custom(points: Vec<Vector3<f64>>) -> Result<Self> {
        Self::from_geometry(Geometry::Custom(points))
    }

    pub fn from_geometry(geometry: Geometry) -> Result<Self> {
        let n = geometry.n_spins();
        check_spin_count(n, DEFAULT_MAX_SPINS)?;
        if let Geometry::Custom(points) = &geometry {
            if points.iter().any(|p| !p.iter().all(|x| x.is_finite())) {
                return Err(Error::param("coordinates", "non-finite coordinate"));
            }
            if n >= 2 {
                min_pair_distance(points)?;
            }
        }
        let mut couplings = DMatrix::zeros(n, n);
        for j in 1..=n {
            for k in j + 1..=n {
                let b = coupling_constant(&geometry, j, k)?;
                couplings[(j - 1, k - 1)] = b;
                couplings[(k - 1, j - 1)] = b;
            }
        }
        Ok(Self { geometry, couplings })
    }

    /// Same geometry with every coupling set to zero.
    pub fn without_couplings(&self) -> Self {
        let n = self.n_spins();
        Self {
            geometry: self.geometry.clone(),
            couplings: DMatrix::zeros(n, n),
        }
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn n_spins(&self) -> usize {
        self.geometry.n_spins()
    }

    pub fn couplings(&self) -> &DMatrix<f64> {
        &self.couplings
    }

    /// Coupling between 1-based sites.
    pub fn coupling(&self, j: usize, k: usize) -> f64 {
        self.couplings[(j - 1, k - 1)]
    }

    fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.n_spins();
        (1..=n).flat_map(move |j| (j + 1..=n).map(move |k| (j, k, self.coupling(j, k))))
    }
}

/// Named structures used for the figure sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    Chain6,
    Chain8,
    Ring4,
    Ring6,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::Chain6, Preset::Chain8, Preset::Ring4, Preset::Ring6];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Chain6 => "chain6",
            Preset::Chain8 => "chain8",
            Preset::Ring4 => "ring4",
            Preset::Ring6 => "ring6",
        }
    }

    pub fn geometry(self) -> Geometry {
        match self {
            Preset::Chain6 => Geometry::Chain(6),
            Preset::Chain8 => Geometry::Chain(8),
            Preset::Ring4 => Geometry::Ring(4),
            Preset::Ring6 => Geometry::Ring(6),
        }
    }

    pub fn system(self) -> SpinSystem {
        SpinSystem::from_geometry(self.geometry()).expect("presets are valid")
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::param("preset", format!("unknown preset `{s}`")))
    }
}

/// Parses whitespace-separated `x y z` lines. Blank lines and `#` comments
/// are skipped.
pub fn parse_coordinates(text: &str) -> Result<Vec<Vector3<f64>>> {
    let mut points = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let values: Vec<f64> = line
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|e| Error::param("coordinates", format!("line {}: {e}", lineno + 1)))?;
        if values.len() != 3 {
            return Err(Error::param(
                "coordinates",
                format!("line {}: expected 3 values, found {}", lineno + 1, values.len()),
            ));
        }
        points.push(Vector3::new(values[0], values[1], values[2]));
    }
    Ok(points)
}

/// Zeeman-to-dipolar energy ratio `α = ω₀ / D`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ZeemanRatio(f64);

impl ZeemanRatio {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::param("alpha", format!("{alpha} is not finite")));
        }
        Ok(Self(alpha))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DipolarForm {
    Secular,
    #[default]
    Transverse,
}

impl DipolarForm {
    pub fn name(self) -> &'static str {
        match self {
            DipolarForm::Secular => "secular",
            DipolarForm::Transverse => "transverse",
        }
    }

    /// Coupling tensor `J_ab` for a unit-strength bond, so the pair term is
    /// `b Σ_ab J_ab I_j^a I_k^b`.
    fn unit_tensor(self) -> Matrix3<f64> {
        match self {
            DipolarForm::Secular => Matrix3::from_diagonal(&Vector3::new(-1.0, -1.0, 2.0)),
            // −(3 x̂x̂ − 1) for bonds along x, field along z.
            DipolarForm::Transverse => Matrix3::from_diagonal(&Vector3::new(-2.0, 1.0, 1.0)),
        }
    }
}

impl fmt::Display for DipolarForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DipolarForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "secular" => Ok(DipolarForm::Secular),
            "transverse" => Ok(DipolarForm::Transverse),
            other => Err(Error::param("form", format!("unknown dipolar form `{other}`"))),
        }
    }
}

/// `Σ_ab J_ab I^a ⊗ I^b` as a 4×4 matrix.
pub fn pair_operator(tensor: &Matrix3<f64>) -> Matrix4<Complex64> {
    let ops = [
        single_spin_operator(Axis::X),
        single_spin_operator(Axis::Y),
        single_spin_operator(Axis::Z),
    ];
    let mut out = Matrix4::zeros();
    for a in 0..3 {
        for b in 0..3 {
            let w = tensor[(a, b)];
            if w != 0.0 {
                out += ops[a].kronecker(&ops[b]) * Complex64::new(w, 0.0);
            }
        }
    }
    out
}

fn zeeman(n_spins: usize, alpha: ZeemanRatio) -> Result<ManyBodyOperator> {
    let mut h = ManyBodyOperator::zeros(n_spins)?;
    if alpha.value() != 0.0 {
        let iz = single_spin_operator(Axis::Z);
        for site in 1..=n_spins {
            h.add_single_site(alpha.value(), &iz, site)?;
        }
    }
    Ok(h)
}

fn build_from_tensor(sys: &SpinSystem, alpha: ZeemanRatio, form: DipolarForm) -> Result<ManyBodyOperator> {
    let mut h = zeeman(sys.n_spins(), alpha)?;
    let pair = pair_operator(&form.unit_tensor());
    for (j, k, b) in sys.pairs() {
        if b != 0.0 {
            h.add_two_site(b, &pair, j, k)?;
        }
    }
    Ok(h)
}

/// `α Σ I_k^z + Σ_{j<k} b_jk (2 I_j^z I_k^z − I_j^x I_k^x − I_j^y I_k^y)`.
pub fn build_secular(sys: &SpinSystem, alpha: ZeemanRatio) -> Result<ManyBodyOperator> {
    build_from_tensor(sys, alpha, DipolarForm::Secular)
}

/// `α Σ I_k^z − Σ_{j<k} b_jk (3 I_j^x I_k^x − I_j·I_k)`.
pub fn build_transverse(sys: &SpinSystem, alpha: ZeemanRatio) -> Result<ManyBodyOperator> {
    build_from_tensor(sys, alpha, DipolarForm::Transverse)
}

pub fn build(sys: &SpinSystem, alpha: ZeemanRatio, form: DipolarForm) -> Result<ManyBodyOperator> {
    build_from_tensor(sys, alpha, form)
}

/// Orthonormal frame whose third vector is the field direction.
fn field_frame(field_axis: &Vector3<f64>) -> Result<Matrix3<f64>> {
    let norm = field_axis.norm();
    if !(norm.is_finite() && norm > 0.0) {
        return Err(Error::InvalidFieldAxis);
    }
    let ez = field_axis / norm;
    let helper = if ez.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let ex = (helper - ez * helper.dot(&ez)).normalize();
    let ey = ez.cross(&ex);
    Ok(Matrix3::from_rows(&[ex.transpose(), ey.transpose(), ez.transpose()]))
}

/// Complete dipolar Hamiltonian for explicit coordinates:
/// `α Σ I_k^z − Σ_{j<k} ρ_jk⁻³ [3 (I_j·r̂_jk)(I_k·r̂_jk) − I_j·I_k]`, with
/// distances `ρ_jk` in units of the smallest pair distance and the field
/// direction taken as the spin quantization axis.
pub fn build_full_dipolar(
    coords: &[Vector3<f64>],
    field_axis: &Vector3<f64>,
    alpha: ZeemanRatio,
) -> Result<ManyBodyOperator> {
    if coords.len() < 2 {
        return Err(Error::param("coordinates", "need at least two spins"));
    }
    check_spin_count(coords.len(), DEFAULT_MAX_SPINS)?;
    let frame = field_frame(field_axis)?;
    let r_min = min_pair_distance(coords)?;
    let mut h = zeeman(coords.len(), alpha)?;
    for j in 0..coords.len() {
        for k in j + 1..coords.len() {
            let r = frame * (coords[k] - coords[j]) / r_min;
            let rho = r.norm();
            let u = r / rho;
            let tensor = (Matrix3::identity() - u * u.transpose() * 3.0) / rho.powi(3);
            h.add_two_site(1.0, &pair_operator(&tensor), j + 1, k + 1)?;
        }
    }
    Ok(h)
}

/// Hilbert–Schmidt inner product `Tr(O† h)` with `O` a two-site operator
/// embedded at `(site_a, site_b)`.
fn hs_inner_two_site(h: &ManyBodyOperator, op: &Matrix4<Complex64>, site_a: usize, site_b: usize) -> Complex64 {
    let n = h.n_spins();
    let sa = n - site_a;
    let sb = n - site_b;
    let clear = !((1usize << sa) | (1usize << sb));
    let m = h.matrix();
    let mut acc = Complex64::new(0.0, 0.0);
    for col in 0..h.dim() {
        let local_in = (((col >> sa) & 1) << 1) | ((col >> sb) & 1);
        for local_out in 0..4 {
            let elem = op[(local_out, local_in)];
            if elem.norm_sqr() == 0.0 {
                continue;
            }
            let row = (col & clear) | ((local_out >> 1) << sa) | ((local_out & 1) << sb);
            acc += elem.conj() * m[(row, col)];
        }
    }
    acc
}

/// Coefficients of one pair's secular operators in a Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecularPair {
    pub site_a: usize,
    pub site_b: usize,
    /// Coefficient of `I_a^z I_b^z`.
    pub zz: f64,
    /// Coefficient of `I_a^+ I_b^- + I_a^- I_b^+`.
    pub flip_flop: f64,
}

fn zz_operator() -> Matrix4<Complex64> {
    let iz = single_spin_operator(Axis::Z);
    iz.kronecker(&iz)
}

fn flip_flop_operator() -> Matrix4<Complex64> {
    let p = single_spin_operator(Axis::Plus);
    let m = single_spin_operator(Axis::Minus);
    p.kronecker(&m) + m.kronecker(&p)
}

/// Orthogonal projection of `h` onto the span of `{I_j^z I_k^z, flip-flop}`
/// for every pair, returned as per-pair coefficients.
pub fn secular_coefficients(h: &ManyBodyOperator) -> Result<Vec<SecularPair>> {
    let n = h.n_spins();
    let zz = zz_operator();
    let ff = flip_flop_operator();
    // Tr(O†O) over the full space: local norm times the spectator dimension.
    let spectators = (h.dim() / 4) as f64;
    let zz_norm = spectators * zz.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let ff_norm = spectators * ff.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let mut out = Vec::new();
    for a in 1..=n {
        for b in a + 1..=n {
            check_pair(a, b, n)?;
            out.push(SecularPair {
                site_a: a,
                site_b: b,
                zz: hs_inner_two_site(h, &zz, a, b).re / zz_norm,
                flip_flop: hs_inner_two_site(h, &ff, a, b).re / ff_norm,
            });
        }
    }
    Ok(out)
}

/// Reassembles the secular projection as an operator.
pub fn secular_projection(h: &ManyBodyOperator) -> Result<ManyBodyOperator> {
    let zz = zz_operator();
    let ff = flip_flop_operator();
    let mut out = ManyBodyOperator::zeros(h.n_spins())?;
    for pair in secular_coefficients(h)? {
        out.add_two_site(pair.zz, &zz, pair.site_a, pair.site_b)?;
        out.add_two_site(pair.flip_flop, &ff, pair.site_a, pair.site_b)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin_ops::{embed, hermitian_eigendecomposition, total_iz};
    use approx::assert_abs_diff_eq;

    fn alpha(a: f64) -> ZeemanRatio {
        ZeemanRatio::new(a).unwrap()
    }

    fn max_diff(a: &ManyBodyOperator, b: &ManyBodyOperator) -> f64 {
        (a.matrix() - b.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn coupling_examples() {
        assert_abs_diff_eq!(
            coupling_constant(&Geometry::Ring(6), 1, 2).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            coupling_constant(&Geometry::Ring(4), 1, 3).unwrap(),
            0.3535533906,
            epsilon = 1e-10
        );
        assert_eq!(coupling_constant(&Geometry::Chain(8), 1, 3).unwrap(), 0.125);
        assert!(matches!(
            coupling_constant(&Geometry::Chain(4), 2, 2),
            Err(Error::IdenticalSites(2))
        ));
        assert!(coupling_constant(&Geometry::Chain(4), 1, 5).is_err());
    }

    #[test]
    fn ring_couplings_match_polygon_distances() {
        let n = 6;
        let radius = 1.0 / (2.0 * (PI / n as f64).sin());
        let points: Vec<_> = (0..n)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / n as f64;
                Vector3::new(radius * t.cos(), radius * t.sin(), 0.0)
            })
            .collect();
        let ring = SpinSystem::ring(n).unwrap();
        let custom = SpinSystem::custom(points).unwrap();
        assert_abs_diff_eq!((ring.couplings() - custom.couplings()).camax(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn coupling_matrix_invariants() {
        for preset in Preset::ALL {
            let sys = preset.system();
            let b = sys.couplings();
            assert_eq!(b, &b.transpose());
            for j in 0..sys.n_spins() {
                assert_eq!(b[(j, j)], 0.0);
            }
            assert_abs_diff_eq!(sys.coupling(1, 2), 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(sys.coupling(2, 3), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn custom_rejects_coincident_points() {
        let pts = vec![Vector3::zeros(), Vector3::x(), Vector3::zeros()];
        assert!(matches!(SpinSystem::custom(pts), Err(Error::CoincidentSpins(1, 3))));
    }

    #[test]
    fn preset_names_round_trip() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert!("chain99".parse::<Preset>().is_err());
    }

    #[test]
    fn parse_coordinate_file() {
        let pts = parse_coordinates("# square\n0 0 0\n1 0 0\n\n1 1 0 # third\n0 1 0\n").unwrap();
        assert_eq!(pts.len(), 4);
        assert_eq!(pts[2], Vector3::new(1.0, 1.0, 0.0));
        assert!(parse_coordinates("0 0\n").is_err());
        assert!(parse_coordinates("0 0 x\n").is_err());
    }

    #[test]
    fn single_spin_secular_is_zeeman() {
        let h = build_secular(&SpinSystem::chain(1).unwrap(), alpha(1.0)).unwrap();
        assert_eq!(h.matrix()[(0, 0)].re, 0.5);
        assert_eq!(h.matrix()[(1, 1)].re, -0.5);
        assert_eq!(h.matrix()[(0, 1)].norm(), 0.0);
    }

    #[test]
    fn two_spin_secular_spectrum() {
        let h = build_secular(&SpinSystem::chain(2).unwrap(), alpha(1.0)).unwrap();
        let s = hermitian_eigendecomposition(&h).unwrap();
        let expect = [-1.0, -0.5, 0.0, 1.5];
        for (got, want) in s.eigenvalues().iter().zip(expect) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
        // Ground state (|↑↓⟩ + |↓↑⟩)/√2 up to phase.
        let v = s.eigenvectors().column(0);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(v[1].norm(), r, epsilon = 1e-12);
        assert_abs_diff_eq!(v[2].norm(), r, epsilon = 1e-12);
        assert_abs_diff_eq!((v[1] - v[2]).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn hamiltonians_are_traceless_and_hermitian() {
        for preset in Preset::ALL {
            let sys = preset.system();
            for form in [DipolarForm::Secular, DipolarForm::Transverse] {
                let h = build(&sys, alpha(0.7), form).unwrap();
                assert!(h.hermiticity_defect() <= 1e-12);
                assert_abs_diff_eq!(h.trace().norm(), 0.0, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn secular_conserves_total_iz_transverse_does_not() {
        let sys = SpinSystem::ring(4).unwrap();
        let total = total_iz(4).unwrap();
        let secular = build_secular(&sys, alpha(1.3)).unwrap();
        assert!(secular.commutator_norm(&total) <= 1e-12);
        let transverse = build_transverse(&sys, alpha(1.3)).unwrap();
        assert!(transverse.commutator_norm(&total) > 1e-3);
    }

    #[test]
    fn zero_couplings_give_pure_zeeman() {
        let sys = SpinSystem::chain(4).unwrap().without_couplings();
        let iz = single_spin_operator(Axis::Z);
        let mut zeeman = ManyBodyOperator::zeros(4).unwrap();
        for k in 1..=4 {
            zeeman = &zeeman + &embed(&iz, k, 4).unwrap();
        }
        let zeeman_scaled = ManyBodyOperator::from_matrix(4, zeeman.matrix() * Complex64::new(0.8, 0.0)).unwrap();
        for form in [DipolarForm::Secular, DipolarForm::Transverse] {
            let h = build(&sys, alpha(0.8), form).unwrap();
            assert!(max_diff(&h, &zeeman_scaled) <= 1e-15);
        }
    }

    #[test]
    fn spin_flip_symmetry_of_alpha() {
        for form in [DipolarForm::Secular, DipolarForm::Transverse] {
            let sys = SpinSystem::ring(4).unwrap();
            let plus = hermitian_eigendecomposition(&build(&sys, alpha(1.1), form).unwrap()).unwrap();
            let minus = hermitian_eigendecomposition(&build(&sys, alpha(-1.1), form).unwrap()).unwrap();
            assert_abs_diff_eq!((plus.eigenvalues() - minus.eigenvalues()).camax(), 0.0, epsilon = 1e-10);
        }
    }

    /// Term-by-term assembly of the dipolar sum with explicit vector operators.
    fn brute_force_dipolar(coords: &[Vector3<f64>], alpha_value: f64) -> ManyBodyOperator {
        let n = coords.len();
        let axes = [Axis::X, Axis::Y, Axis::Z];
        let spin = |site: usize| -> Vec<ManyBodyOperator> {
            axes.iter()
                .map(|&a| embed(&single_spin_operator(a), site, n).unwrap())
                .collect()
        };
        let r_min = (0..n)
            .flat_map(|j| (j + 1..n).map(move |k| (j, k)))
            .map(|(j, k)| (coords[k] - coords[j]).norm())
            .fold(f64::INFINITY, f64::min);
        let scale = |op: &ManyBodyOperator, w: f64| {
            ManyBodyOperator::from_matrix(n, op.matrix() * Complex64::new(w, 0.0)).unwrap()
        };
        let mut h = ManyBodyOperator::zeros(n).unwrap();
        for j in 0..n {
            h = &h + &scale(&spin(j + 1)[2], alpha_value);
            for k in j + 1..n {
                let r = (coords[k] - coords[j]) / r_min;
                let rho = r.norm();
                let u = r / rho;
                let (sj, sk) = (spin(j + 1), spin(k + 1));
                let mut ij_u = ManyBodyOperator::zeros(n).unwrap();
                let mut ik_u = ManyBodyOperator::zeros(n).unwrap();
                let mut dot = ManyBodyOperator::zeros(n).unwrap();
                for a in 0..3 {
                    ij_u = &ij_u + &scale(&sj[a], u[a]);
                    ik_u = &ik_u + &scale(&sk[a], u[a]);
                    dot = &dot + &(&sj[a] * &sk[a]);
                }
                let term = &scale(&(&ij_u * &ik_u), 3.0) + &scale(&dot, -1.0);
                h = &h + &scale(&term, -1.0 / rho.powi(3));
            }
        }
        h
    }

    #[test]
    fn full_dipolar_matches_brute_force() {
        let coords = vec![
            Vector3::new(0.0, 0.0, 0.0),
            Vector3::new(0.3, 0.9, 0.4),
            Vector3::new(-0.7, 0.2, 1.1),
        ];
        let h = build_full_dipolar(&coords, &Vector3::z(), alpha(0.6)).unwrap();
        let oracle = brute_force_dipolar(&coords, 0.6);
        assert!(max_diff(&h, &oracle) <= 1e-14);
        assert!(h.hermiticity_defect() <= 1e-12);
        assert!(h.commutator_norm(&total_iz(3).unwrap()) > 1e-3);
    }

    #[test]
    fn full_dipolar_along_field_axis() {
        let coords = vec![Vector3::zeros(), Vector3::z()];
        let h = build_full_dipolar(&coords, &Vector3::z(), alpha(0.0)).unwrap();
        let oracle = brute_force_dipolar(&coords, 0.0);
        assert!(max_diff(&h, &oracle) <= 1e-15);
        let coeffs = secular_coefficients(&h).unwrap();
        // −(3 I_z I_z − I·I) = −2 I_z I_z + ½ flip-flop.
        assert_abs_diff_eq!(coeffs[0].zz, -2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(coeffs[0].flip_flop, 0.5, epsilon = 1e-14);
    }

    #[test]
    fn full_dipolar_rotated_field_axis() {
        // Rotating both the coordinates and the field leaves the operator unchanged.
        let coords = vec![
            Vector3::zeros(),
            Vector3::new(0.0, 0.0, 1.0),
            Vector3::new(1.0, 0.0, 1.0),
        ];
        let rot = nalgebra::Rotation3::from_euler_angles(0.4, -0.3, 1.2);
        let rotated: Vec<_> = coords.iter().map(|p| rot * p).collect();
        let a = build_full_dipolar(&coords, &Vector3::z(), alpha(0.9)).unwrap();
        let b = build_full_dipolar(&rotated, &(rot * Vector3::z()), alpha(0.9)).unwrap();
        let sa = hermitian_eigendecomposition(&a).unwrap();
        let sb = hermitian_eigendecomposition(&b).unwrap();
        assert_abs_diff_eq!((sa.eigenvalues() - sb.eigenvalues()).camax(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn magic_angle_kills_secular_part() {
        let theta = (1.0f64 / 3.0).sqrt().acos();
        let coords = vec![Vector3::zeros(), Vector3::new(theta.sin(), 0.0, theta.cos())];
        let h = build_full_dipolar(&coords, &Vector3::z(), alpha(0.0)).unwrap();
        let coeffs = secular_coefficients(&h).unwrap();
        assert_abs_diff_eq!(coeffs[0].zz, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(coeffs[0].flip_flop, 0.0, epsilon = 1e-14);
        assert!(secular_projection(&h).unwrap().max_abs() <= 1e-14);
        assert!(h.max_abs() > 0.1);
    }

    #[test]
    fn full_dipolar_scales_with_inverse_cube() {
        // Third spin far away fixes the unit distance so the pair distance can vary.
        let near = vec![Vector3::zeros(), Vector3::new(1.0, 0.3, 0.2)];
        let far: Vec<_> = near.iter().map(|p| p * 2.0).collect();
        let mut near3 = near.clone();
        let mut far3 = far.clone();
        let anchor = [Vector3::new(50.0, 0.0, 0.0), Vector3::new(50.0, 1.0, 0.0)];
        near3.extend(anchor);
        far3.extend(anchor);
        let hn = build_full_dipolar(&near3, &Vector3::z(), alpha(0.0)).unwrap();
        let hf = build_full_dipolar(&far3, &Vector3::z(), alpha(0.0)).unwrap();
        let pn = secular_coefficients(&hn).unwrap()[0];
        let pf = secular_coefficients(&hf).unwrap()[0];
        assert_abs_diff_eq!(pf.zz, pn.zz / 8.0, epsilon = 1e-14);
        assert_abs_diff_eq!(pf.flip_flop, pn.flip_flop / 8.0, epsilon = 1e-14);
    }

    #[test]
    fn full_dipolar_errors() {
        let z = Vector3::z();
        assert!(build_full_dipolar(&[Vector3::zeros()], &z, alpha(1.0)).is_err());
        assert!(matches!(
            build_full_dipolar(&[Vector3::zeros(), Vector3::zeros()], &z, alpha(1.0)),
            Err(Error::CoincidentSpins(1, 2))
        ));
        assert!(matches!(
            build_full_dipolar(&[Vector3::zeros(), Vector3::x()], &Vector3::zeros(), alpha(1.0)),
            Err(Error::InvalidFieldAxis)
        ));
        assert!(ZeemanRatio::new(f64::NAN).is_err());
    }

    #[test]
    fn transverse_matches_full_dipolar_for_perpendicular_chain() {
        let coords: Vec<_> = (0..4).map(|i| Vector3::new(i as f64, 0.0, 0.0)).collect();
        let full = build_full_dipolar(&coords, &Vector3::z(), alpha(1.2)).unwrap();
        let transverse = build_transverse(&SpinSystem::chain(4).unwrap(), alpha(1.2)).unwrap();
        let a = hermitian_eigendecomposition(&full).unwrap();
        let b = hermitian_eigendecomposition(&transverse).unwrap();
        assert_abs_diff_eq!((a.eigenvalues() - b.eigenvalues()).camax(), 0.0, epsilon = 1e-12);
    }
}
