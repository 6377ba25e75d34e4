//! The four triple uncertainty functionals and the ratio forms that define
//! the tight constant.
//!
//! With `O~ = U O U^dagger` for a local unitary `U = U1 (x) U2`:
//!
//! ```text
//! f = dJx dJy dJz - |lambda^3/8 <Rx><Ry><Rz>|^(1/2)
//! g = sum (dJ_l)^2 - lambda/2 sum |<R_l>|
//! h = dKx dKy dKz - |lambda^3/8 <Kx><Ky><Kz>|^(1/2)
//! k = sum (dK_l)^2 - lambda/2 sum |<K_l>|
//! ```
//!
//! all evaluated on the rotated operators, with `lambda = 2/sqrt(3)`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{kron, Matrix2, Matrix4};
use crate::observables::{expectation, observables, variance, variance_with_square, ObservableSet};
use crate::states::DensityMatrix;
use crate::LAMBDA;

/// Denominators below this make a ratio form undefined.
pub const DEGENERATE_TOL: f64 = 1e-12;

/// Wraps an angle into `[-pi, pi]`.
pub fn wrap_angle(x: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let w = x - two_pi * (x / two_pi).round();
    // round() ties away from zero, so w is already in [-pi, pi]
    w.clamp(-PI, PI)
}

/// Angles of the local rotation `U = U1 (x) U2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LocalUnitaryParams {
    pub theta1: f64,
    pub phi1: f64,
    pub theta2: f64,
    pub phi2: f64,
}

impl LocalUnitaryParams {
    pub fn new(theta1: f64, phi1: f64, theta2: f64, phi2: f64) -> Self {
        Self {
            theta1,
            phi1,
            theta2,
            phi2,
        }
    }

    pub fn identity() -> Self {
        Self::default()
    }

    /// Same rotation with every angle wrapped into `[-pi, pi]`.
    pub fn wrapped(&self) -> Self {
        Self::from_array(self.as_array().map(wrap_angle))
    }

    /// `[theta1, phi1, theta2, phi2]`.
    pub fn as_array(&self) -> [f64; 4] {
        [self.theta1, self.phi1, self.theta2, self.phi2]
    }

    pub fn from_array(v: [f64; 4]) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }

    pub fn from_degrees(theta1: f64, phi1: f64, theta2: f64, phi2: f64) -> Self {
        Self::new(
            theta1.to_radians(),
            phi1.to_radians(),
            theta2.to_radians(),
            phi2.to_radians(),
        )
    }
}

/// `[[cos t, sin t e^{-i p}], [-sin t e^{i p}, cos t]]`.
pub fn single_qubit_rotation(theta: f64, phi: f64) -> Matrix2 {
    let (s, c) = theta.sin_cos();
    let e = Complex64::from_polar(1.0, phi);
    Matrix2::from_rows([
        [Complex64::new(c, 0.0), e.conj() * s],
        [-e * s, Complex64::new(c, 0.0)],
    ])
}

pub fn local_unitary(p: &LocalUnitaryParams) -> Matrix4 {
    kron(
        &single_qubit_rotation(p.theta1, p.phi1),
        &single_qubit_rotation(p.theta2, p.phi2),
    )
}

/// Which functional to evaluate or maximize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UncertaintyFunction {
    F,
    G,
    H,
    K,
}

impl UncertaintyFunction {
    pub const ALL: [UncertaintyFunction; 4] = [Self::F, Self::G, Self::H, Self::K];

    pub fn name(self) -> &'static str {
        match self {
            Self::F => "f",
            Self::G => "g",
            Self::H => "h",
            Self::K => "k",
        }
    }
}

impl fmt::Display for UncertaintyFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for UncertaintyFunction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "f" | "F" => Ok(Self::F),
            "g" | "G" => Ok(Self::G),
            "h" | "H" => Ok(Self::H),
            "k" | "K" => Ok(Self::K),
            other => Err(Error::InvalidInput(format!("unknown function '{other}'"))),
        }
    }
}

/// Values of the four functionals and the moments they are built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyReport {
    pub f: f64,
    pub g: f64,
    pub h: f64,
    pub k: f64,
    /// `[dJx, dJy, dJz, dKx, dKy, dKz]` on the rotated operators.
    pub deltas: [f64; 6],
    /// `[<Rx>, <Ry>, <Rz>, <Kx>, <Ky>, <Kz>]` on the rotated operators.
    pub expectations: [f64; 6],
    pub lambda_used: f64,
}

impl UncertaintyReport {
    fn from_moments(var_j: [f64; 3], mean_r: [f64; 3], var_k: [f64; 3], mean_k: [f64; 3]) -> Self {
        let lam3 = LAMBDA * LAMBDA * LAMBDA;
        let dj = var_j.map(f64::sqrt);
        let dk = var_k.map(f64::sqrt);
        let f = dj[0] * dj[1] * dj[2]
            - (lam3 / 8.0 * mean_r[0] * mean_r[1] * mean_r[2])
                .abs()
                .sqrt();
        let g =
            var_j.iter().sum::<f64>() - LAMBDA / 2.0 * mean_r.iter().map(|x| x.abs()).sum::<f64>();
        let h = dk[0] * dk[1] * dk[2]
            - (lam3 / 8.0 * mean_k[0] * mean_k[1] * mean_k[2])
                .abs()
                .sqrt();
        let k =
            var_k.iter().sum::<f64>() - LAMBDA / 2.0 * mean_k.iter().map(|x| x.abs()).sum::<f64>();
        Self {
            f,
            g,
            h,
            k,
            deltas: [dj[0], dj[1], dj[2], dk[0], dk[1], dk[2]],
            expectations: [
                mean_r[0], mean_r[1], mean_r[2], mean_k[0], mean_k[1], mean_k[2],
            ],
            lambda_used: LAMBDA,
        }
    }

    pub fn value(&self, func: UncertaintyFunction) -> f64 {
        match func {
            UncertaintyFunction::F => self.f,
            UncertaintyFunction::G => self.g,
            UncertaintyFunction::H => self.h,
            UncertaintyFunction::K => self.k,
        }
    }

    /// Left side of the J product relation, `dJx dJy dJz`.
    pub fn j_product_lhs(&self) -> f64 {
        self.deltas[0] * self.deltas[1] * self.deltas[2]
    }

    /// Right side of the J product relation, `|lambda^3/8 <Rx><Ry><Rz>|^(1/2)`.
    pub fn j_product_rhs(&self) -> f64 {
        let e = &self.expectations;
        (LAMBDA.powi(3) / 8.0 * e[0] * e[1] * e[2]).abs().sqrt()
    }
}

/// Evaluates f, g, h, k with the operators conjugated as `U O U^dagger`.
pub fn eval_functions(rho: &DensityMatrix, u: &LocalUnitaryParams) -> Result<UncertaintyReport> {
    let set = observables();
    let uu = local_unitary(u);
    let mut var_j = [0.0; 3];
    let mut mean_r = [0.0; 3];
    let mut var_k = [0.0; 3];
    let mut mean_k = [0.0; 3];
    for l in 0..3 {
        var_j[l] = variance(&set.j[l].conjugate_by(&uu), rho)?;
        mean_r[l] = expectation(&set.r[l].conjugate_by(&uu), rho)?;
        let kt = set.k[l].conjugate_by(&uu);
        var_k[l] = variance(&kt, rho)?;
        mean_k[l] = expectation(&kt, rho)?;
    }
    Ok(UncertaintyReport::from_moments(
        var_j, mean_r, var_k, mean_k,
    ))
}

/// Same values as [`eval_functions`], computed by rotating the state to
/// `U^dagger rho U` once instead of conjugating nine operators.
pub fn eval_functions_fast(
    rho: &DensityMatrix,
    u: &LocalUnitaryParams,
) -> Result<UncertaintyReport> {
    let uu = local_unitary(u);
    let rotated = uu.dagger() * *rho.matrix() * uu;
    report_from_matrix(observables(), &rotated)
}

pub(crate) fn report_from_matrix(set: &ObservableSet, rho: &Matrix4) -> Result<UncertaintyReport> {
    let mut var_j = [0.0; 3];
    let mut mean_r = [0.0; 3];
    let mut var_k = [0.0; 3];
    let mut mean_k = [0.0; 3];
    for l in 0..3 {
        var_j[l] = variance_with_square(&set.j[l], &set.j_sq[l], rho)?.1;
        let (mk, vk) = variance_with_square(&set.k[l], &set.k_sq[l], rho)?;
        mean_k[l] = mk;
        var_k[l] = vk;
        mean_r[l] = mk / 4.0;
    }
    Ok(UncertaintyReport::from_moments(
        var_j, mean_r, var_k, mean_k,
    ))
}

/// The four ratio forms whose infimum over states is the tight constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RatioForm {
    JProduct,
    JAdditive,
    KProduct,
    KAdditive,
}

impl RatioForm {
    pub const ALL: [RatioForm; 4] = [
        Self::JProduct,
        Self::JAdditive,
        Self::KProduct,
        Self::KAdditive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::JProduct => "j-product",
            Self::JAdditive => "j-additive",
            Self::KProduct => "k-product",
            Self::KAdditive => "k-additive",
        }
    }

    /// Ratio from component variances of the numerator operator and
    /// expectations of the denominator operator.
    pub fn ratio_from_moments(self, variances: [f64; 3], means: [f64; 3]) -> Result<f64> {
        match self {
            Self::JProduct | Self::KProduct => {
                let smallest = means.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min);
                if smallest < DEGENERATE_TOL {
                    return Err(Error::DegenerateDenominator { value: smallest });
                }
                // (64 prod var^2 / prod mean^2)^(1/6) = 2 (prod var / prod |mean|)^(1/3)
                let num: f64 = variances.iter().product();
                let den: f64 = means.iter().map(|x| x.abs()).product();
                Ok(2.0 * (num / den).cbrt())
            }
            Self::JAdditive | Self::KAdditive => {
                let den: f64 = means.iter().map(|x| x.abs()).sum();
                if den < DEGENERATE_TOL {
                    return Err(Error::DegenerateDenominator { value: den });
                }
                Ok(2.0 * variances.iter().sum::<f64>() / den)
            }
        }
    }
}

impl fmt::Display for RatioForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RatioForm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s
            .trim()
            .to_ascii_lowercase()
            .chars()
            .map(|c| if c == '_' { '-' } else { c })
            .collect();
        match norm.as_str() {
            "j-product" => Ok(Self::JProduct),
            "j-additive" => Ok(Self::JAdditive),
            "k-product" => Ok(Self::KProduct),
            "k-additive" => Ok(Self::KAdditive),
            _ => Err(Error::InvalidInput(format!("unknown ratio form '{s}'"))),
        }
    }
}

/// Smallest constant the relation of the given form could carry on `rho`.
pub fn lambda_ratio(rho: &DensityMatrix, form: RatioForm) -> Result<f64> {
    lambda_ratio_matrix(observables(), rho.matrix(), form)
}

pub(crate) fn lambda_ratio_matrix(
    set: &ObservableSet,
    rho: &Matrix4,
    form: RatioForm,
) -> Result<f64> {
    let mut variances = [0.0; 3];
    let mut means = [0.0; 3];
    for l in 0..3 {
        match form {
            RatioForm::JProduct | RatioForm::JAdditive => {
                variances[l] = variance_with_square(&set.j[l], &set.j_sq[l], rho)?.1;
                means[l] = crate::observables::expectation_raw(&set.r[l], rho)?;
            }
            RatioForm::KProduct | RatioForm::KAdditive => {
                let (m, v) = variance_with_square(&set.k[l], &set.k_sq[l], rho)?;
                variances[l] = v;
                means[l] = m;
            }
        }
    }
    form.ratio_from_moments(variances, means)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{bell_state, density_from_pure, equality_state};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn identity_params_give_identity() {
        let u = local_unitary(&LocalUnitaryParams::identity());
        assert!(u.max_abs_diff(&Matrix4::identity()) < 1e-15);
    }

    #[test]
    fn quarter_turn_on_first_qubit() {
        let u = local_unitary(&LocalUnitaryParams::new(FRAC_PI_2, 0.0, 0.0, 0.0));
        let flip = Matrix2::from_real_rows([[0.0, 1.0], [-1.0, 0.0]]);
        let expected = kron(&flip, &crate::linalg::pauli::ID);
        assert!(u.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn wrapping() {
        assert!(
            (wrap_angle(3.0 * PI) - PI).abs() < 1e-12 || (wrap_angle(3.0 * PI) + PI).abs() < 1e-12
        );
        assert!((wrap_angle(0.5 + 4.0 * PI) - 0.5).abs() < 1e-12);
        assert!((wrap_angle(-0.5 - 2.0 * PI) + 0.5).abs() < 1e-12);
        for x in [-10.0, -3.2, 0.0, 3.2, 10.0, 1e3] {
            let w = wrap_angle(x);
            assert!((-PI..=PI).contains(&w));
            assert!(
                ((x - w) / (2.0 * PI)).fract().abs() < 1e-9
                    || ((x - w) / (2.0 * PI)).fract().abs() > 1.0 - 1e-9
            );
        }
    }

    #[test]
    fn maximally_entangled_quarter_turn_gives_one_eighth() {
        let rho = density_from_pure(&bell_state(FRAC_PI_4));
        let r = eval_functions(&rho, &LocalUnitaryParams::new(FRAC_PI_2, 0.0, 0.0, 0.0)).unwrap();
        assert!((r.f - 0.125).abs() < 1e-12);
    }

    #[test]
    fn fast_path_matches_direct_conjugation() {
        let rho = equality_state();
        let u = LocalUnitaryParams::new(0.3, -1.2, 2.1, 0.7);
        let a = eval_functions(&rho, &u).unwrap();
        let b = eval_functions_fast(&rho, &u).unwrap();
        for (x, y) in [(a.f, b.f), (a.g, b.g), (a.h, b.h), (a.k, b.k)] {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn ratio_forms_at_equality_state() {
        let rho = equality_state();
        for form in RatioForm::ALL {
            let r = lambda_ratio(&rho, form).unwrap();
            assert!((r - LAMBDA).abs() < 1e-9, "{form}: {r}");
        }
    }

    #[test]
    fn ratio_forms_degenerate_on_mixed_state() {
        let rho = DensityMatrix::maximally_mixed();
        for form in RatioForm::ALL {
            assert!(matches!(
                lambda_ratio(&rho, form),
                Err(Error::DegenerateDenominator { .. })
            ));
        }
    }

    #[test]
    fn parse_names() {
        assert_eq!(
            "J_product".parse::<RatioForm>().unwrap(),
            RatioForm::JProduct
        );
        assert_eq!(
            "k-additive".parse::<RatioForm>().unwrap(),
            RatioForm::KAdditive
        );
        assert!("l-product".parse::<RatioForm>().is_err());
        assert_eq!(
            "h".parse::<UncertaintyFunction>().unwrap(),
            UncertaintyFunction::H
        );
        assert!("q".parse::<UncertaintyFunction>().is_err());
    }
}
