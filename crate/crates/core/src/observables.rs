//! The operator families `J = S1 x S2`, `K = S1 + S2` and `R = K / 4`, with
//! expectation and variance against a density matrix.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::{kron, pauli, Matrix2, Matrix4};
use crate::states::{DensityMatrix, SymmetricStateParams};

const IMAG_TOL: f64 = 1e-10;
const VARIANCE_REJECT: f64 = -1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl PauliAxis {
    pub const ALL: [PauliAxis; 3] = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z];

    pub fn index(self) -> usize {
        match self {
            PauliAxis::X => 0,
            PauliAxis::Y => 1,
            PauliAxis::Z => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn pauli(self) -> Matrix2 {
        pauli::XYZ[self.index()]
    }

    /// Spin-1/2 operator `sigma / 2`.
    pub fn spin(self) -> Matrix2 {
        self.pauli().scale(0.5)
    }

    pub fn symbol(self) -> char {
        match self {
            PauliAxis::X => 'x',
            PauliAxis::Y => 'y',
            PauliAxis::Z => 'z',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        match c.to_ascii_lowercase() {
            'x' => Some(PauliAxis::X),
            'y' => Some(PauliAxis::Y),
            'z' => Some(PauliAxis::Z),
            _ => None,
        }
    }
}

/// Levi-Civita symbol on axis indices.
pub fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// `S_1l = S_l (x) 1`.
pub fn spin_first(axis: PauliAxis) -> Matrix4 {
    kron(&axis.spin(), &pauli::ID)
}

/// `S_2l = 1 (x) S_l`.
pub fn spin_second(axis: PauliAxis) -> Matrix4 {
    kron(&pauli::ID, &axis.spin())
}

/// The nine operators `J_l`, `K_l`, `R_l` together with their squares.
#[derive(Debug, Clone)]
pub struct ObservableSet {
    pub j: [Matrix4; 3],
    pub k: [Matrix4; 3],
    pub r: [Matrix4; 3],
    pub j_sq: [Matrix4; 3],
    pub k_sq: [Matrix4; 3],
    pub r_sq: [Matrix4; 3],
}

pub fn build_observables() -> ObservableSet {
    let s1 = PauliAxis::ALL.map(spin_first);
    let s2 = PauliAxis::ALL.map(spin_second);
    // J_i = sum_{jk} eps_ijk S_1j S_2k
    let j = std::array::from_fn(|i| {
        let mut acc = Matrix4::zeros();
        for a in 0..3 {
            for b in 0..3 {
                let e = levi_civita(i, a, b);
                if e != 0.0 {
                    acc += (s1[a] * s2[b]).scale(e);
                }
            }
        }
        acc
    });
    let k: [Matrix4; 3] = std::array::from_fn(|l| s1[l] + s2[l]);
    let r = k.map(|m| m.scale(0.25));
    ObservableSet {
        j_sq: j.map(|m| m * m),
        k_sq: k.map(|m| m * m),
        r_sq: r.map(|m| m * m),
        j,
        k,
        r,
    }
}

/// Shared instance built on first use.
pub fn observables() -> &'static ObservableSet {
    static SET: OnceLock<ObservableSet> = OnceLock::new();
    SET.get_or_init(build_observables)
}

impl ObservableSet {
    pub fn j(&self, axis: PauliAxis) -> &Matrix4 {
        &self.j[axis.index()]
    }

    pub fn k(&self, axis: PauliAxis) -> &Matrix4 {
        &self.k[axis.index()]
    }

    pub fn r(&self, axis: PauliAxis) -> &Matrix4 {
        &self.r[axis.index()]
    }
}

/// `Tr(rho O)`.
pub fn expectation(o: &Matrix4, rho: &DensityMatrix) -> Result<f64> {
    expectation_raw(o, rho.matrix())
}

pub(crate) fn expectation_raw(o: &Matrix4, rho: &Matrix4) -> Result<f64> {
    let z = rho.trace_product(o);
    if z.im.abs() > IMAG_TOL {
        return Err(Error::NonHermitianObservable { imag: z.im });
    }
    Ok(z.re)
}

/// Clamps rounding-level negatives to zero; anything below `-1e-10` is an error.
pub(crate) fn clamp_variance(value: f64) -> Result<f64> {
    if value >= VARIANCE_REJECT {
        Ok(value.max(0.0))
    } else {
        Err(Error::NegativeVariance { value })
    }
}

/// `<O^2> - <O>^2`.
pub fn variance(o: &Matrix4, rho: &DensityMatrix) -> Result<f64> {
    let mean = expectation(o, rho)?;
    let second = expectation(&(*o * *o), rho)?;
    clamp_variance(second - mean * mean)
}

pub fn stddev(o: &Matrix4, rho: &DensityMatrix) -> Result<f64> {
    variance(o, rho).map(f64::sqrt)
}

/// Variance from a precomputed square, for hot loops.
pub(crate) fn variance_with_square(
    o: &Matrix4,
    o_sq: &Matrix4,
    rho: &Matrix4,
) -> Result<(f64, f64)> {
    let mean = expectation_raw(o, rho)?;
    let second = expectation_raw(o_sq, rho)?;
    Ok((mean, clamp_variance(second - mean * mean)?))
}

/// Closed-form `(Delta J_axis)^2` on the symmetric family,
/// `(2 - 2 T_ii - T_jk^2 + 2 T_jk T_kj - T_kj^2) / 16` with `(i, j, k)` cyclic.
pub fn variance_closed_form_j(p: &SymmetricStateParams, axis: PauliAxis) -> f64 {
    let t = p.correlation_matrix();
    let i = axis.index();
    let j = (i + 1) % 3;
    let k = (i + 2) % 3;
    let (tjk, tkj) = (t[j][k], t[k][j]);
    (2.0 - 2.0 * t[i][i] - tjk * tjk + 2.0 * tjk * tkj - tkj * tkj) / 16.0
}

/// `<K_l> = (a_l + b_l) / 2` on the symmetric family.
pub fn k_mean_closed_form(p: &SymmetricStateParams) -> f64 {
    (p.a + p.b) / 2.0
}

/// `<K_l^2> = (1 + T_ll) / 2` on the symmetric family.
pub fn k_second_moment_closed_form(p: &SymmetricStateParams) -> f64 {
    (1.0 + p.t1) / 2.0
}

/// `<R_l> = (a_l + b_l) / 8` on the symmetric family.
pub fn r_mean_closed_form(p: &SymmetricStateParams) -> f64 {
    (p.a + p.b) / 8.0
}
