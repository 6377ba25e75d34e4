//! Hermitian eigendecomposition by cyclic complex Jacobi rotations, and the
//! functions built on it (PSD square root, spectra).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Matrix4, ZERO};

/// Asymmetry tolerated before the input is rejected as non-Hermitian.
pub const HERMITIAN_REJECT_TOL: f64 = 1e-8;
/// Eigenvalues below this are a genuine PSD violation.
pub const PSD_REJECT_TOL: f64 = -1e-8;

const OFF_DIAGONAL_TOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 100;

/// Eigenvalues sorted descending with the matching eigenvectors as columns.
#[derive(Debug, Clone, Copy)]
pub struct HermitianEigenResult<const N: usize = 4> {
    pub values: [f64; N],
    pub vectors: Matrix<N>,
}

impl<const N: usize> HermitianEigenResult<N> {
    /// `V diag(g(values)) V^dagger`.
    pub fn reconstruct_with(&self, g: impl Fn(f64) -> f64) -> Matrix<N> {
        let v = &self.vectors;
        let mapped = self.values.map(g);
        Matrix::from_fn(|i, j| {
            (0..N)
                .map(|k| v[(i, k)] * mapped[k] * v[(j, k)].conj())
                .sum()
        })
    }

    pub fn reconstruct(&self) -> Matrix<N> {
        self.reconstruct_with(|x| x)
    }

    /// Column `k` of the eigenvector matrix.
    pub fn vector(&self, k: usize) -> [Complex64; N] {
        std::array::from_fn(|i| self.vectors[(i, k)])
    }
}

fn off_diagonal_norm<const N: usize>(a: &Matrix<N>) -> f64 {
    let mut s = 0.0;
    for i in 0..N {
        for j in 0..N {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Eigendecomposition of a Hermitian 4x4 matrix.
///
/// The input is symmetrized as `(H + H^dagger)/2` before rotating; an input whose
/// asymmetry exceeds [`HERMITIAN_REJECT_TOL`] is rejected.
pub fn hermitian_eigen(h: &Matrix4) -> Result<HermitianEigenResult> {
    hermitian_eigen_n(h)
}

/// [`hermitian_eigen`] for any fixed dimension.
pub fn hermitian_eigen_n<const N: usize>(h: &Matrix<N>) -> Result<HermitianEigenResult<N>> {
    if !h.is_finite() {
        return Err(Error::NonFinite);
    }
    let defect = h.hermiticity_defect();
    if defect > HERMITIAN_REJECT_TOL {
        return Err(Error::NonHermitianInput { defect });
    }
    let mut a = h.hermitian_part();
    for i in 0..N {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
    }
    let mut v = Matrix::<N>::identity();
    let threshold = OFF_DIAGONAL_TOL * a.frobenius_norm().max(1.0);

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) < threshold {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: [usize; N] = std::array::from_fn(|k| k);
    order.sort_by(|&x, &y| a[(y, y)].re.total_cmp(&a[(x, x)].re));
    let values = order.map(|k| a[(k, k)].re);
    let vectors = Matrix::from_fn(|i, j| v[(i, order[j])]);
    Ok(HermitianEigenResult { values, vectors })
}

/// Annihilates `a[p][q]` with the unitary `W = D G`, where `D` removes the phase
/// of the pivot and `G` is a real plane rotation. Updates `a <- W^dagger a W`
/// and `v <- v W`.
fn rotate<const N: usize>(a: &mut Matrix<N>, v: &mut Matrix<N>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r < f64::MIN_POSITIVE {
        return;
    }
    let phase = apq / r;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta >= 0.0 {
        1.0 / (theta + (theta * theta + 1.0).sqrt())
    } else {
        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let conj_phase = phase.conj();
    // W entries in the (p, q) block.
    let w_pp = Complex64::new(c, 0.0);
    let w_pq = Complex64::new(s, 0.0);
    let w_qp = conj_phase * (-s);
    let w_qq = conj_phase * c;

    for k in 0..N {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * w_pp + akq * w_qp;
        a[(k, q)] = akp * w_pq + akq * w_qq;
    }
    for k in 0..N {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = w_pp.conj() * apk + w_qp.conj() * aqk;
        a[(q, k)] = w_pq.conj() * apk + w_qq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    for k in 0..N {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * w_pp + vkq * w_qp;
        v[(k, q)] = vkp * w_pq + vkq * w_qq;
    }
}

/// Eigenvalues only, sorted descending.
pub fn hermitian_eigenvalues(h: &Matrix4) -> Result<[f64; 4]> {
    hermitian_eigen(h).map(|e| e.values)
}

/// Principal square root of a positive semidefinite Hermitian matrix.
///
/// Eigenvalues in `[-1e-8, 0)` are treated as rounding noise and clipped to zero.
pub fn sqrtm_psd(h: &Matrix4) -> Result<Matrix4> {
    let eig = hermitian_eigen(h)?;
    let min = eig.values[3];
    if min < PSD_REJECT_TOL {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
        });
    }
    let s = eig.reconstruct_with(|x| x.max(0.0).sqrt());
    Ok(s.hermitian_part())
}

/// Relative eigenvalue level below which [`sqrtm_psd_truncated`] treats a
/// direction as outside the support.
pub const RANK_CUTOFF: f64 = 1e-14;

/// [`sqrtm_psd`] with eigenvalues at or below `RANK_CUTOFF * max(1, l_max)`
/// set to zero.
///
/// Jacobi leaves null directions of a rank-deficient input at about 1e-17,
/// which a plain square root inflates to about 3e-9. Products built from the
/// truncated root keep rounding-level accuracy instead.
pub fn sqrtm_psd_truncated(h: &Matrix4) -> Result<Matrix4> {
    let eig = hermitian_eigen(h)?;
    let min = eig.values[3];
    if min < PSD_REJECT_TOL {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
        });
    }
    let cut = RANK_CUTOFF * eig.values[0].max(1.0);
    let s = eig.reconstruct_with(|x| if x > cut { x.sqrt() } else { 0.0 });
    Ok(s.hermitian_part())
}

/// Singular values of `a`, sorted descending.
///
/// Read off the Hermitian dilation `[[0, A], [A^dagger, 0]]`, whose spectrum
/// is `+-s_i`. The absolute error is of order `eps |A|`, where the route
/// through the eigenvalues of `A A^dagger` loses half the digits.
pub fn singular_values(a: &Matrix4) -> Result<[f64; 4]> {
    let dilation = Matrix::<8>::from_fn(|i, j| match (i < 4, j < 4) {
        (true, false) => a[(i, j - 4)],
        (false, true) => a[(j, i - 4)].conj(),
        _ => ZERO,
    });
    let values = hermitian_eigen_n(&dilation)?.values;
    Ok([0, 1, 2, 3].map(|k| values[k].max(0.0)))
}
