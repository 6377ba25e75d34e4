//! Simulated two-qubit state tomography: projective counts on the 36 product
//! Pauli-eigenstate settings, linear-inversion reconstruction with projection
//! onto the density-matrix cone, Uhlmann fidelity and Monte Carlo error bars.

use std::fmt;
use std::str::FromStr;

use rand_distr::{Binomial, Distribution};

use crate::eigen::{hermitian_eigen, singular_values, sqrtm_psd_truncated};
use crate::entanglement::concurrence;
use crate::error::{Error, Result};
use crate::linalg::{kron, pauli, Matrix2, Matrix4};
use crate::observables::PauliAxis;
use crate::optimizer::{maximize, OptimizerConfig};
use crate::par;
use crate::rng::stream_rng;
use crate::states::DensityMatrix;
use crate::uncertainty::{eval_functions_fast, LocalUnitaryParams, UncertaintyFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const ALL: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// Joint projector onto `|axis1, sign1> (x) |axis2, sign2>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MeasurementSetting {
    pub axis1: PauliAxis,
    pub sign1: Sign,
    pub axis2: PauliAxis,
    pub sign2: Sign,
}

fn eigen_projector(axis: PauliAxis, sign: Sign) -> Matrix2 {
    (pauli::ID + axis.pauli().scale(sign.value())).scale(0.5)
}

impl MeasurementSetting {
    /// All 36 settings, ordered by first axis, first sign, second axis, second sign.
    pub fn all() -> Vec<MeasurementSetting> {
        let mut out = Vec::with_capacity(36);
        for axis1 in PauliAxis::ALL {
            for sign1 in Sign::ALL {
                for axis2 in PauliAxis::ALL {
                    for sign2 in Sign::ALL {
                        out.push(MeasurementSetting {
                            axis1,
                            sign1,
                            axis2,
                            sign2,
                        });
                    }
                }
            }
        }
        out
    }

    pub fn projector(&self) -> Matrix4 {
        kron(
            &eigen_projector(self.axis1, self.sign1),
            &eigen_projector(self.axis2, self.sign2),
        )
    }

    /// `Tr(rho P)` clipped into `[0, 1]`.
    pub fn probability(&self, rho: &DensityMatrix) -> f64 {
        rho.matrix()
            .trace_product(&self.projector())
            .re
            .clamp(0.0, 1.0)
    }

    /// Short id such as `x+z-`.
    pub fn id(&self) -> String {
        format!(
            "{}{}{}{}",
            self.axis1.symbol(),
            self.sign1.symbol(),
            self.axis2.symbol(),
            self.sign2.symbol()
        )
    }
}

impl fmt::Display for MeasurementSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl FromStr for MeasurementSetting {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("bad setting id '{s}'"));
        let c: Vec<char> = s.trim().chars().collect();
        if c.len() != 4 {
            return Err(bad());
        }
        let sign = |ch: char| match ch {
            '+' => Some(Sign::Plus),
            '-' => Some(Sign::Minus),
            _ => None,
        };
        Ok(MeasurementSetting {
            axis1: PauliAxis::from_symbol(c[0]).ok_or_else(bad)?,
            sign1: sign(c[1]).ok_or_else(bad)?,
            axis2: PauliAxis::from_symbol(c[2]).ok_or_else(bad)?,
            sign2: sign(c[3]).ok_or_else(bad)?,
        })
    }
}

/// Counts for one setting. `observed` may be fractional, which represents the
/// infinite-shot limit `p * shots`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountRecord {
    pub setting: MeasurementSetting,
    pub shots: u64,
    pub observed: f64,
}

/// Shot model for simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shots {
    Finite(u64),
    /// Exact probabilities fed as fractional counts.
    Exact,
}

/// Binomial counts with `p = Tr(rho P)` on every setting, drawn from stream 0.
pub fn simulate_counts(rho: &DensityMatrix, shots: u64, seed: u64) -> Result<Vec<CountRecord>> {
    simulate_counts_stream(rho, shots, seed, 0)
}

/// [`simulate_counts`] on an explicit random stream.
pub fn simulate_counts_stream(
    rho: &DensityMatrix,
    shots: u64,
    seed: u64,
    stream: u64,
) -> Result<Vec<CountRecord>> {
    if shots == 0 {
        return Err(Error::InvalidInput("shots must be at least 1".into()));
    }
    let mut rng = stream_rng(seed, stream);
    MeasurementSetting::all()
        .into_iter()
        .map(|setting| {
            let p = setting.probability(rho);
            let dist = Binomial::new(shots, p)
                .map_err(|e| Error::InvalidInput(format!("binomial p = {p}: {e}")))?;
            Ok(CountRecord {
                setting,
                shots,
                observed: dist.sample(&mut rng) as f64,
            })
        })
        .collect()
}

/// Infinite-shot counts `p * shots`.
pub fn exact_counts(rho: &DensityMatrix, shots: u64) -> Vec<CountRecord> {
    MeasurementSetting::all()
        .into_iter()
        .map(|setting| CountRecord {
            setting,
            shots,
            observed: setting.probability(rho) * shots as f64,
        })
        .collect()
}

fn counts_for(
    rho: &DensityMatrix,
    shots: Shots,
    seed: u64,
    stream: u64,
) -> Result<Vec<CountRecord>> {
    match shots {
        Shots::Finite(n) => simulate_counts_stream(rho, n, seed, stream),
        Shots::Exact => Ok(exact_counts(rho, 1)),
    }
}

fn axis_pair_name(a: PauliAxis, b: PauliAxis) -> String {
    format!("{}{}", a.symbol(), b.symbol())
}

/// Pauli-product expectations `E[i][j] = <sigma_i (x) sigma_j>`, index 0 being
/// the identity.
///
/// Correlations come from the four sign outcomes of each axis pair; local
/// terms average the marginals over the three partner axes. Repeated records
/// for one setting are pooled.
pub fn pauli_estimates(records: &[CountRecord]) -> Result<[[f64; 4]; 4]> {
    let mut observed = [[[[0.0f64; 2]; 2]; 3]; 3];
    let mut shots = [[[[0u64; 2]; 2]; 3]; 3];
    for r in records {
        if !r.observed.is_finite() || r.observed < 0.0 || r.observed > r.shots as f64 {
            return Err(Error::InvalidInput(format!(
                "setting {}: observed {} outside [0, {}]",
                r.setting, r.observed, r.shots
            )));
        }
        let s = r.setting;
        let (a, b) = (s.axis1.index(), s.axis2.index());
        let (u, v) = (s.sign1 as usize, s.sign2 as usize);
        observed[a][b][u][v] += r.observed;
        shots[a][b][u][v] += r.shots;
    }
    // freq[a][b][u][v] for each outcome, sign value +1 at u = 0
    let mut freq = [[[[0.0f64; 2]; 2]; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            for u in 0..2 {
                for v in 0..2 {
                    if shots[a][b][u][v] == 0 {
                        return Err(Error::IncompleteData {
                            pauli: axis_pair_name(PauliAxis::ALL[a], PauliAxis::ALL[b]),
                        });
                    }
                    freq[a][b][u][v] = observed[a][b][u][v] / shots[a][b][u][v] as f64;
                }
            }
        }
    }
    let sv = [1.0, -1.0];
    let mut e = [[0.0; 4]; 4];
    e[0][0] = 1.0;
    for a in 0..3 {
        for b in 0..3 {
            let mut corr = 0.0;
            let mut first = 0.0;
            let mut second = 0.0;
            for u in 0..2 {
                for v in 0..2 {
                    let f = freq[a][b][u][v];
                    corr += sv[u] * sv[v] * f;
                    first += sv[u] * f;
                    second += sv[v] * f;
                }
            }
            e[a + 1][b + 1] = corr;
            e[a + 1][0] += first / 3.0;
            e[0][b + 1] += second / 3.0;
        }
    }
    Ok(e)
}

/// Linear inversion `rho = (1/4) sum E_ij sigma_i (x) sigma_j`, followed by
/// clipping negative eigenvalues to zero and renormalizing the trace.
pub fn reconstruct(records: &[CountRecord]) -> Result<DensityMatrix> {
    let e = pauli_estimates(records)?;
    let p = [pauli::ID, pauli::X, pauli::Y, pauli::Z];
    let mut lin = Matrix4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            lin += kron(&p[i], &p[j]).scale(e[i][j] / 4.0);
        }
    }
    let eig = hermitian_eigen(&lin)?;
    let kept: f64 = eig.values.iter().map(|x| x.max(0.0)).sum();
    if kept <= 0.0 {
        return Err(Error::InvalidInput(
            "reconstruction has no positive weight".into(),
        ));
    }
    let projected = eig.reconstruct_with(|x| x.max(0.0) / kept);
    DensityMatrix::new(projected.hermitian_part())
}

/// Uhlmann fidelity `(Tr sqrt(sqrt(a) b sqrt(a)))^2`, evaluated as the squared
/// sum of singular values of `sqrt(a) sqrt(b)`.
pub fn fidelity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    let ra = sqrtm_psd_truncated(a.matrix())?;
    let rb = sqrtm_psd_truncated(b.matrix())?;
    let s: f64 = singular_values(&(ra * rb))?.iter().sum();
    Ok(s * s)
}

/// Quantities tracked through the Monte Carlo error analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quantity {
    Max(UncertaintyFunction),
    Concurrence,
    /// `dJx dJy dJz` at the identity rotation.
    JProductLhs,
    /// `|lambda^3/8 <Rx><Ry><Rz>|^(1/2)` at the identity rotation.
    JProductRhs,
}

impl Quantity {
    pub const ALL: [Quantity; 7] = [
        Quantity::Max(UncertaintyFunction::F),
        Quantity::Max(UncertaintyFunction::G),
        Quantity::Max(UncertaintyFunction::H),
        Quantity::Max(UncertaintyFunction::K),
        Quantity::Concurrence,
        Quantity::JProductLhs,
        Quantity::JProductRhs,
    ];

    pub fn name(self) -> String {
        match self {
            Quantity::Max(f) => format!("{f}_max"),
            Quantity::Concurrence => "concurrence".into(),
            Quantity::JProductLhs => "j_product_lhs".into(),
            Quantity::JProductRhs => "j_product_rhs".into(),
        }
    }

    pub fn evaluate(self, rho: &DensityMatrix, config: &OptimizerConfig) -> Result<f64> {
        match self {
            Quantity::Max(f) => maximize(rho, f, config).map(|r| r.best_value),
            Quantity::Concurrence => concurrence(rho).map(|c| c.concurrence),
            Quantity::JProductLhs => {
                eval_functions_fast(rho, &LocalUnitaryParams::identity()).map(|r| r.j_product_lhs())
            }
            Quantity::JProductRhs => {
                eval_functions_fast(rho, &LocalUnitaryParams::identity()).map(|r| r.j_product_rhs())
            }
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Quantity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        Quantity::ALL
            .into_iter()
            .find(|q| q.name() == norm)
            .ok_or_else(|| Error::InvalidInput(format!("unknown quantity '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorBar {
    pub mean: f64,
    /// Sample standard deviation (`n - 1` denominator).
    pub std: f64,
}

fn mean_std(xs: &[f64]) -> ErrorBar {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    ErrorBar {
        mean,
        std: var.sqrt(),
    }
}

/// Repeats simulate, reconstruct, evaluate `resamples` times, resample `r`
/// drawing from stream `r + 1`, and reports mean and sample std per quantity
/// in the order given.
pub fn monte_carlo_errors(
    rho: &DensityMatrix,
    quantities: &[Quantity],
    shots: Shots,
    resamples: usize,
    seed: u64,
    config: &OptimizerConfig,
) -> Result<Vec<(Quantity, ErrorBar)>> {
    if resamples < 2 {
        return Err(Error::InvalidInput("resamples must be at least 2".into()));
    }
    let runs = par::map_indexed(resamples, |r| -> Result<Vec<f64>> {
        let records = counts_for(rho, shots, seed, r as u64 + 1)?;
        let rho_hat = reconstruct(&records)?;
        quantities
            .iter()
            .map(|q| q.evaluate(&rho_hat, config))
            .collect()
    });
    let runs: Vec<Vec<f64>> = runs.into_iter().collect::<Result<_>>()?;
    Ok(quantities
        .iter()
        .enumerate()
        .map(|(k, &q)| {
            let xs: Vec<f64> = runs.iter().map(|run| run[k]).collect();
            (q, mean_std(&xs))
        })
        .collect())
}

#[derive(Debug, Clone)]
pub struct TomographyResult {
    pub rho_hat: DensityMatrix,
    pub fidelity_vs_truth: f64,
    pub error_bars: Vec<(Quantity, ErrorBar)>,
}

/// One reconstruction from stream 0 plus Monte Carlo error bars.
pub fn run_tomography(
    rho: &DensityMatrix,
    quantities: &[Quantity],
    shots: Shots,
    resamples: usize,
    seed: u64,
    config: &OptimizerConfig,
) -> Result<TomographyResult> {
    let rho_hat = reconstruct(&counts_for(rho, shots, seed, 0)?)?;
    let fidelity_vs_truth = fidelity(rho, &rho_hat)?;
    let error_bars = monte_carlo_errors(rho, quantities, shots, resamples, seed, config)?;
    Ok(TomographyResult {
        rho_hat,
        fidelity_vs_truth,
        error_bars,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{
        basis_qubit, density_from_pure, werner_state, PureTwoQubitState, WernerParams,
    };

    fn zero_zero() -> DensityMatrix {
        density_from_pure(&PureTwoQubitState::product(basis_qubit(0), basis_qubit(0)).unwrap())
    }

    #[test]
    fn projectors_are_rank_one_idempotent() {
        let all = MeasurementSetting::all();
        assert_eq!(all.len(), 36);
        for s in all {
            let p = s.projector();
            assert!(p.hermiticity_defect() < 1e-15);
            assert!((p * p).max_abs_diff(&p) < 1e-13);
            assert!((p.trace().re - 1.0).abs() < 1e-15);
            assert_eq!(s.id().parse::<MeasurementSetting>().unwrap(), s);
        }
    }

    #[test]
    fn deterministic_counts_on_basis_state() {
        let rho = zero_zero();
        let records = simulate_counts(&rho, 1000, 3).unwrap();
        let find = |id: &str| {
            records
                .iter()
                .find(|r| r.setting.id() == id)
                .unwrap()
                .observed
        };
        assert_eq!(find("z+z+"), 1000.0);
        assert_eq!(find("z-z+"), 0.0);
        assert_eq!(records, simulate_counts(&rho, 1000, 3).unwrap());
        assert!(simulate_counts(&rho, 0, 3).is_err());
    }

    #[test]
    fn exact_round_trip() {
        let rho = werner_state(WernerParams {
            alpha: std::f64::consts::FRAC_PI_4,
            eta: 0.5,
        })
        .unwrap();
        let back = reconstruct(&exact_counts(&rho, 1)).unwrap();
        assert!(back.matrix().max_abs_diff(rho.matrix()) < 1e-10);
    }

    #[test]
    fn missing_setting_is_incomplete() {
        let mut records = exact_counts(&zero_zero(), 10);
        records.retain(|r| r.setting.id() != "x-y+");
        assert!(matches!(
            reconstruct(&records),
            Err(Error::IncompleteData { pauli }) if pauli == "xy"
        ));
    }

    #[test]
    fn fidelity_examples() {
        let a = zero_zero();
        let b =
            density_from_pure(&PureTwoQubitState::product(basis_qubit(1), basis_qubit(1)).unwrap());
        assert!((fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        assert!(fidelity(&a, &b).unwrap().abs() < 1e-12);
    }

    #[test]
    fn quantity_names_round_trip() {
        for q in Quantity::ALL {
            assert_eq!(q.name().parse::<Quantity>().unwrap(), q);
        }
    }
}
