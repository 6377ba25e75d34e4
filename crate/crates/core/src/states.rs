//! Two-qubit state families and density-matrix validation.
//!
//! Basis order is `|00>, |01>, |10>, |11>` with `|0>` the horizontal
//! polarization `|H>`.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;

use crate::eigen::hermitian_eigen;
use crate::error::{Error, Result};
use crate::linalg::{inner, kron, kron_vec, outer, pauli, ComplexScalar, Matrix4, ONE, ZERO};

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const MIN_EIGENVALUE_TOL: f64 = -1e-8;
const NORM_TOL: f64 = 1e-12;

/// Normalized pure state of two qubits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureTwoQubitState {
    amplitudes: [ComplexScalar; 4],
}

impl PureTwoQubitState {
    pub fn new(amplitudes: [ComplexScalar; 4]) -> Result<Self> {
        if amplitudes.iter().any(|z| !z.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm_sqr: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes `amplitudes` first.
    pub fn normalized(amplitudes: [ComplexScalar; 4]) -> Result<Self> {
        let n: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !n.is_finite() || n == 0.0 {
            return Err(Error::NotNormalized { norm_sqr: n * n });
        }
        Self::new(amplitudes.map(|z| z / n))
    }

    /// `|a> (x) |b>` for single-qubit states `a`, `b` (each normalized first).
    pub fn product(a: [ComplexScalar; 2], b: [ComplexScalar; 2]) -> Result<Self> {
        Self::normalized(kron_vec(&a, &b))
    }

    pub fn amplitudes(&self) -> &[ComplexScalar; 4] {
        &self.amplitudes
    }

    pub fn overlap(&self, other: &Self) -> ComplexScalar {
        inner(&self.amplitudes, &other.amplitudes)
    }
}

/// `cos(alpha)|00> + sin(alpha)|11>`.
pub fn bell_state(alpha: f64) -> PureTwoQubitState {
    let (s, c) = alpha.sin_cos();
    PureTwoQubitState {
        amplitudes: [Complex64::new(c, 0.0), ZERO, ZERO, Complex64::new(s, 0.0)],
    }
}

/// Validated two-qubit density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    matrix: Matrix4,
}

/// Defects measured by [`is_valid_density`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationReport {
    pub hermiticity_defect: f64,
    pub trace_defect: f64,
    pub min_eigenvalue: f64,
}

impl ValidationReport {
    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect <= HERMITIAN_TOL
    }

    pub fn has_unit_trace(&self) -> bool {
        self.trace_defect <= TRACE_TOL
    }

    pub fn is_psd(&self) -> bool {
        self.min_eigenvalue >= MIN_EIGENVALUE_TOL
    }

    pub fn is_valid(&self) -> bool {
        self.is_hermitian() && self.has_unit_trace() && self.is_psd()
    }
}

/// Measures how far `m` is from a density matrix.
///
/// The minimum eigenvalue is taken from the Hermitian part, so it is defined
/// even for badly non-Hermitian input. Non-finite input reports infinite defects.
pub fn is_valid_density(m: &Matrix4) -> ValidationReport {
    if !m.is_finite() {
        return ValidationReport {
            hermiticity_defect: f64::INFINITY,
            trace_defect: f64::INFINITY,
            min_eigenvalue: f64::NEG_INFINITY,
        };
    }
    let tr = m.trace();
    let min_eigenvalue = hermitian_eigen(&m.hermitian_part())
        .map(|e| e.values[3])
        .unwrap_or(f64::NEG_INFINITY);
    ValidationReport {
        hermiticity_defect: m.hermiticity_defect(),
        trace_defect: (tr - ONE).norm(),
        min_eigenvalue,
    }
}

impl DensityMatrix {
    pub fn new(matrix: Matrix4) -> Result<Self> {
        let report = is_valid_density(&matrix);
        if report.is_valid() {
            Ok(Self {
                matrix: matrix.hermitian_part(),
            })
        } else {
            Err(Error::InvalidDensity {
                hermiticity: report.hermiticity_defect,
                trace: report.trace_defect,
                min_eigenvalue: report.min_eigenvalue,
            })
        }
    }

    /// Skips validation; callers guarantee the invariants by construction.
    pub(crate) fn from_trusted(matrix: Matrix4) -> Self {
        Self { matrix }
    }

    pub fn maximally_mixed() -> Self {
        Self::from_trusted(Matrix4::identity().scale(0.25))
    }

    pub fn matrix(&self) -> &Matrix4 {
        &self.matrix
    }

    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).re
    }

    /// `U rho U^dagger` for a unitary `U`.
    pub fn transformed(&self, u: &Matrix4) -> Self {
        Self::from_trusted(self.matrix.conjugate_by(u).hermitian_part())
    }

    /// `<sigma_i (x) sigma_j>` with index 0 meaning the identity.
    pub fn pauli_expectation(&self, i: usize, j: usize) -> f64 {
        let p = [pauli::ID, pauli::X, pauli::Y, pauli::Z];
        self.matrix.trace_product(&kron(&p[i], &p[j])).re
    }

    /// The 15 non-trivial Pauli-product expectations, ordered `(i, j) != (0, 0)`
    /// row-major.
    pub fn pauli_vector(&self) -> [f64; 15] {
        let mut out = [0.0; 15];
        let mut n = 0;
        for i in 0..4 {
            for j in 0..4 {
                if i == 0 && j == 0 {
                    continue;
                }
                out[n] = self.pauli_expectation(i, j);
                n += 1;
            }
        }
        out
    }
}

pub fn density_from_pure(psi: &PureTwoQubitState) -> DensityMatrix {
    DensityMatrix::from_trusted(outer(psi.amplitudes()))
}

/// Generalized Werner state parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WernerParams {
    pub alpha: f64,
    pub eta: f64,
}

/// `eta |Psi(alpha)><Psi(alpha)| + (1 - eta)/4 I`.
pub fn werner_state(p: WernerParams) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p.eta) {
        return Err(Error::InvalidMixing { eta: p.eta });
    }
    if !p.alpha.is_finite() {
        return Err(Error::NonFinite);
    }
    let pure = *density_from_pure(&bell_state(p.alpha)).matrix();
    let m = pure.scale(p.eta) + Matrix4::identity().scale((1.0 - p.eta) / 4.0);
    Ok(DensityMatrix::from_trusted(m))
}

/// Bloch/correlation parameters of the symmetric family: equal Bloch
/// components `a` and `b` on each qubit and a symmetric correlation matrix
/// with diagonal `t1` and off-diagonals `T12 = t2`, `T13 = t3`, `T23 = t4`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SymmetricStateParams {
    pub a: f64,
    pub b: f64,
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub t4: f64,
}

impl SymmetricStateParams {
    /// The point `a = b = 1/sqrt(3)`, `t1..t4 = 1/3` where every tight relation
    /// holds with equality.
    pub fn equality_point() -> Self {
        let a = 1.0 / 3f64.sqrt();
        Self {
            a,
            b: a,
            t1: 1.0 / 3.0,
            t2: 1.0 / 3.0,
            t3: 1.0 / 3.0,
            t4: 1.0 / 3.0,
        }
    }

    pub fn as_array(&self) -> [f64; 6] {
        [self.a, self.b, self.t1, self.t2, self.t3, self.t4]
    }

    pub fn from_array(v: [f64; 6]) -> Self {
        Self {
            a: v[0],
            b: v[1],
            t1: v[2],
            t2: v[3],
            t3: v[4],
            t4: v[5],
        }
    }

    /// The full 3x3 correlation matrix `T`.
    pub fn correlation_matrix(&self) -> [[f64; 3]; 3] {
        [
            [self.t1, self.t2, self.t3],
            [self.t2, self.t1, self.t4],
            [self.t3, self.t4, self.t1],
        ]
    }

    /// The density matrix built from the parameters, without PSD validation.
    pub fn matrix(&self) -> Matrix4 {
        let t = self.correlation_matrix();
        let mut m = Matrix4::identity();
        for i in 0..3 {
            let s = pauli::XYZ[i];
            m += kron(&s, &pauli::ID).scale(self.a);
            m += kron(&pauli::ID, &s).scale(self.b);
            for j in 0..3 {
                m += kron(&s, &pauli::XYZ[j]).scale(t[i][j]);
            }
        }
        m.scale(0.25)
    }
}

pub fn symmetric_state(p: SymmetricStateParams) -> Result<DensityMatrix> {
    if p.as_array().iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let m = p.matrix();
    let min_eigenvalue = hermitian_eigen(&m)?.values[3];
    if min_eigenvalue < MIN_EIGENVALUE_TOL {
        return Err(Error::UnphysicalState { min_eigenvalue });
    }
    Ok(DensityMatrix::from_trusted(m))
}

/// Single-qubit factor of the equality state:
/// `sqrt((sqrt3 + 1)/(2 sqrt3)) |0> + (1 + i)/sqrt(2 (3 + sqrt3)) |1>`.
pub fn equality_qubit() -> [ComplexScalar; 2] {
    let r3 = 3f64.sqrt();
    let c0 = ((r3 + 1.0) / (2.0 * r3)).sqrt();
    let c1 = Complex64::new(1.0, 1.0) / (2.0 * (3.0 + r3)).sqrt();
    [Complex64::new(c0, 0.0), c1]
}

/// Product state `|psi1> (x) |psi2>` saturating the tight relations, with
/// `|psi2> = -i |psi1>`.
pub fn equality_pure_state() -> PureTwoQubitState {
    let psi1 = equality_qubit();
    let psi2 = psi1.map(|z| z * Complex64::new(0.0, -1.0));
    PureTwoQubitState {
        amplitudes: kron_vec(&psi1, &psi2),
    }
}

pub fn equality_state() -> DensityMatrix {
    density_from_pure(&equality_pure_state())
}

/// Maximum distance between the 15 Pauli-product expectations of two states;
/// insensitive to global phase.
pub fn pauli_distance(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    a.pauli_vector()
        .iter()
        .zip(b.pauli_vector().iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// `|0>` or `|1>` as a single-qubit vector.
pub fn basis_qubit(bit: u8) -> [ComplexScalar; 2] {
    if bit == 0 {
        [ONE, ZERO]
    } else {
        [ZERO, ONE]
    }
}

/// `(|00> + |11>)/sqrt(2)`.
pub fn phi_plus() -> PureTwoQubitState {
    let h = Complex64::new(1.0 / SQRT_2, 0.0);
    PureTwoQubitState {
        amplitudes: [h, ZERO, ZERO, h],
    }
}
