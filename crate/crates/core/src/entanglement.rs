//! Wootters concurrence and the closed-form maxima of f, g, k as functions of
//! entanglement.

use crate::eigen::{singular_values, sqrtm_psd_truncated};
use crate::error::{Error, Result};
use crate::linalg::{kron, pauli, Matrix4};
use crate::states::DensityMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcurrenceResult {
    /// `max(0, lambda_signed)`.
    pub concurrence: f64,
    /// `l1 - l2 - l3 - l4`, negative for sufficiently mixed states.
    pub lambda_signed: f64,
    /// `l1 >= l2 >= l3 >= l4`.
    pub spectrum: [f64; 4],
}

/// Spin-flipped state `(Y (x) Y) rho* (Y (x) Y)`.
pub fn spin_flip(rho: &Matrix4) -> Matrix4 {
    let yy = kron(&pauli::Y, &pauli::Y);
    yy * rho.conj() * yy
}

/// Concurrence from `l_i`, the square roots of the eigenvalues of the
/// Hermitian matrix `sqrt(rho) rho~ sqrt(rho)`.
///
/// That matrix is `A A^dagger` with `A = sqrt(rho) sqrt(rho~)`, and
/// `sqrt(rho~)` is the spin flip of `sqrt(rho)`, so the `l_i` are the singular
/// values of `A`.
pub fn concurrence(rho: &DensityMatrix) -> Result<ConcurrenceResult> {
    let root = sqrtm_psd_truncated(rho.matrix())?;
    let spectrum = singular_values(&(root * spin_flip(&root)))?;
    let lambda_signed = spectrum[0] - spectrum[1] - spectrum[2] - spectrum[3];
    Ok(ConcurrenceResult {
        concurrence: lambda_signed.max(0.0),
        lambda_signed,
        spectrum,
    })
}

fn check_unit(value: f64, domain: &'static str) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::DomainError { value, domain })
    }
}

/// Maximal f on a pure state of concurrence `c`:
/// `sqrt((1 + c)(3 + c)^2) / (32 sqrt2)`.
pub fn curve_f_of_c(c: f64) -> Result<f64> {
    check_unit(c, "C in [0, 1]")?;
    Ok(((1.0 + c) * (3.0 + c).powi(2)).sqrt() / (32.0 * 2f64.sqrt()))
}

/// `(2 + c) / 4`.
pub fn curve_g_of_c(c: f64) -> Result<f64> {
    check_unit(c, "C in [0, 1]")?;
    Ok((2.0 + c) / 4.0)
}

/// `1 + c`.
pub fn curve_k_of_c(c: f64) -> Result<f64> {
    check_unit(c, "C in [0, 1]")?;
    Ok(1.0 + c)
}

/// `|sin 2 alpha|`, the concurrence of `cos(alpha)|00> + sin(alpha)|11>`.
pub fn bell_concurrence(alpha: f64) -> f64 {
    (2.0 * alpha).sin().abs()
}

/// Concurrence of the generalized Werner state,
/// `max(0, eta |sin 2 alpha| - (1 - eta) / 2)`.
pub fn werner_concurrence(alpha: f64, eta: f64) -> Result<f64> {
    check_unit(eta, "eta in [0, 1]")?;
    Ok((eta * bell_concurrence(alpha) - (1.0 - eta) / 2.0).max(0.0))
}

/// Maximal f on the Werner state:
/// `sqrt(1 + eta s) [2 + eta (1 + s)] / (32 sqrt2)` with `s = |sin 2 alpha|`.
pub fn curve_f_werner(alpha: f64, eta: f64) -> Result<f64> {
    check_unit(eta, "eta in [0, 1]")?;
    let s = bell_concurrence(alpha);
    Ok((1.0 + eta * s).sqrt() * (2.0 + eta * (1.0 + s)) / (32.0 * 2f64.sqrt()))
}

/// Maximal g on the Werner state: `[3 + eta (1 + 2 s)] / 8`.
pub fn curve_g_werner(alpha: f64, eta: f64) -> Result<f64> {
    check_unit(eta, "eta in [0, 1]")?;
    let s = bell_concurrence(alpha);
    Ok((3.0 + eta * (1.0 + 2.0 * s)) / 8.0)
}

/// Lower edge `alpha* = asin(1/eta - 1) / 2` of the window where the linear
/// branch of the Werner k maximum applies; `None` for `eta <= 1/2`.
pub fn k_werner_branch_boundary(eta: f64) -> Option<f64> {
    (eta > 0.5).then(|| 0.5 * (1.0 / eta - 1.0).asin())
}

/// Maximal k on the Werner state, piecewise in `(alpha, eta)`:
///
/// * `[3 - eta (1 - 2 s)] / 2` when `eta > 1/2` and `alpha* <= alpha <= pi/2 - alpha*`,
/// * `[3 + eta - eta^2 (1 + cos 4 alpha)] / 2` otherwise.
///
/// The window is tested as `s >= 1/eta - 1`, the same set on `[0, pi/2]`
/// extended with period `pi/2`.
pub fn curve_k_werner(alpha: f64, eta: f64) -> Result<f64> {
    check_unit(eta, "eta in [0, 1]")?;
    let s = bell_concurrence(alpha);
    let linear = eta > 0.5 && s >= 1.0 / eta - 1.0;
    Ok(if linear {
        (3.0 - eta * (1.0 - 2.0 * s)) / 2.0
    } else {
        (3.0 + eta - eta * eta * (1.0 + (4.0 * alpha).cos())) / 2.0
    })
}
