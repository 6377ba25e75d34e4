//! Monte Carlo scan of the four lambda ratios over the symmetric state family,
//! and the local-unitary map taking the equality state to `|00>`.

use std::sync::OnceLock;

use rand::Rng;

use crate::eigen::hermitian_eigen;
use crate::error::{Error, Result};
use crate::linalg::{kron, pauli, Matrix2, Matrix4};
use crate::observables::observables;
use crate::par;
use crate::rng::stream_rng;
use crate::states::{
    basis_qubit, density_from_pure, equality_pure_state, equality_qubit, equality_state,
    DensityMatrix, PureTwoQubitState, SymmetricStateParams, MIN_EIGENVALUE_TOL,
};
use crate::tomography::fidelity;
use crate::uncertainty::{lambda_ratio_matrix, RatioForm};
use crate::LAMBDA;

/// Draws per random stream.
const CHUNK: usize = 1 << 15;
pub const HISTOGRAM_BINS: usize = 100;
// Slack on the necessary conditions so that the prefilter never rejects a
// state the full eigenvalue test would accept.
const PREFILTER_SLACK: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    /// `HISTOGRAM_BINS + 1` edges.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    /// Uniform bins over `[lo, max(values)]`. Values below `lo` land in the
    /// first bin.
    pub fn build(values: &[f64], lo: f64) -> Histogram {
        let hi = values.iter().copied().fold(lo, f64::max);
        let width = (hi - lo) / HISTOGRAM_BINS as f64;
        let edges = (0..=HISTOGRAM_BINS)
            .map(|i| {
                if i == HISTOGRAM_BINS {
                    hi
                } else {
                    lo + width * i as f64
                }
            })
            .collect();
        let mut counts = vec![0u64; HISTOGRAM_BINS];
        for &v in values {
            let bin = if width > 0.0 {
                (((v - lo) / width).floor().max(0.0) as usize).min(HISTOGRAM_BINS - 1)
            } else {
                0
            };
            counts[bin] += 1;
        }
        Histogram { edges, counts }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub form: RatioForm,
    pub samples_accepted: u64,
    pub samples_rejected: u64,
    pub min_ratio: f64,
    pub argmin_params: SymmetricStateParams,
    pub histogram: Histogram,
    /// Accepted `(params, ratio)` pairs in draw order, forced point last;
    /// kept only when requested.
    pub samples: Option<Vec<(SymmetricStateParams, f64)>>,
}

/// `I`, `sum s(x)1`, `sum 1(x)s`, `sum s_i(x)s_i`, then the symmetrized
/// off-diagonal pairs xy, xz, yz.
fn symmetric_basis() -> &'static [Matrix4; 7] {
    static BASIS: OnceLock<[Matrix4; 7]> = OnceLock::new();
    BASIS.get_or_init(|| {
        let s = pauli::XYZ;
        let pair = |i: usize, j: usize| kron(&s[i], &s[j]) + kron(&s[j], &s[i]);
        let mut local1 = Matrix4::zeros();
        let mut local2 = Matrix4::zeros();
        let mut diag = Matrix4::zeros();
        for m in &s {
            local1 += kron(m, &pauli::ID);
            local2 += kron(&pauli::ID, m);
            diag += kron(m, m);
        }
        [
            Matrix4::identity(),
            local1,
            local2,
            diag,
            pair(0, 1),
            pair(0, 2),
            pair(1, 2),
        ]
    })
}

fn symmetric_matrix(v: &[f64; 6]) -> Matrix4 {
    let basis = symmetric_basis();
    let mut m = basis[0];
    for (k, &c) in v.iter().enumerate() {
        m += basis[k + 1].scale(c);
    }
    m.scale(0.25)
}

/// Cheap necessary conditions for positivity: non-negative diagonal of `rho`
/// and reduced Bloch vectors of length at most one.
fn passes_prefilter(v: &[f64; 6]) -> bool {
    let [a, b, t1, ..] = *v;
    let bloch = 3f64.sqrt();
    if bloch * a.abs() > 1.0 + PREFILTER_SLACK || bloch * b.abs() > 1.0 + PREFILTER_SLACK {
        return false;
    }
    let diag = [
        1.0 + a + b + t1,
        1.0 + a - b - t1,
        1.0 - a + b - t1,
        1.0 - a - b + t1,
    ];
    diag.iter().all(|&d| d >= -PREFILTER_SLACK)
}

/// Shift used by the characteristic-polynomial test: if the smallest
/// eigenvalue is at least `MIN_EIGENVALUE_TOL`, every eigenvalue of
/// `m + CHARPOLY_SHIFT I` is positive.
const CHARPOLY_SHIFT: f64 = -2.0 * MIN_EIGENVALUE_TOL;
// Rounding allowance on the symmetric functions, far below what the shift adds.
const CHARPOLY_SLACK: f64 = 1e-12;

/// Necessary condition for `min eig(m) >= MIN_EIGENVALUE_TOL`: the elementary
/// symmetric functions of the eigenvalues of the shifted matrix, obtained from
/// power traces by Newton's identities, are all non-negative.
fn passes_charpoly(m: &Matrix4) -> bool {
    let shifted = *m + Matrix4::identity().scale(CHARPOLY_SHIFT);
    let sq = shifted * shifted;
    let p1 = shifted.trace().re;
    let p2 = sq.trace().re;
    let p3 = sq.trace_product(&shifted).re;
    let p4 = sq.trace_product(&sq).re;
    let e1 = p1;
    let e2 = (e1 * p1 - p2) / 2.0;
    let e3 = (e2 * p1 - e1 * p2 + p3) / 3.0;
    let e4 = (e3 * p1 - e2 * p2 + e1 * p3 - p4) / 4.0;
    [e1, e2, e3, e4].iter().all(|&e| e >= -CHARPOLY_SLACK)
}

/// The physical state at the parameters, or `None`.
fn physical_matrix(v: &[f64; 6]) -> Option<Matrix4> {
    if !passes_prefilter(v) {
        return None;
    }
    let m = symmetric_matrix(v);
    if !passes_charpoly(&m) {
        return None;
    }
    let min = hermitian_eigen(&m).ok()?.values[3];
    (min >= MIN_EIGENVALUE_TOL).then_some(m)
}

/// Ratios of every form in `forms`, or `None` when the state is unphysical or
/// any denominator degenerates.
fn evaluate_all(v: &[f64; 6], forms: &[RatioForm]) -> Option<Vec<f64>> {
    let m = physical_matrix(v)?;
    forms
        .iter()
        .map(|&form| lambda_ratio_matrix(observables(), &m, form).ok())
        .collect()
}

struct Chunk {
    accepted: Vec<([f64; 6], Vec<f64>)>,
    rejected: u64,
}

fn scan_chunk(forms: &[RatioForm], seed: u64, index: usize, draws: usize) -> Chunk {
    let mut rng = stream_rng(seed, index as u64);
    let mut accepted = Vec::new();
    let mut rejected = 0;
    for _ in 0..draws {
        let v: [f64; 6] = std::array::from_fn(|_| rng.random_range(-1.0..=1.0));
        match evaluate_all(&v, forms) {
            Some(r) => accepted.push((v, r)),
            None => rejected += 1,
        }
    }
    Chunk { accepted, rejected }
}

/// Samples `n_samples` parameter vectors uniformly from `[-1, 1]^6`, keeps the
/// physical ones with a defined ratio, and always adds the equality point.
pub fn scan(form: RatioForm, n_samples: u64, seed: u64) -> Result<ScanResult> {
    scan_with(form, n_samples, seed, false)
}

/// [`scan`] that optionally returns every accepted sample.
pub fn scan_with(
    form: RatioForm,
    n_samples: u64,
    seed: u64,
    keep_samples: bool,
) -> Result<ScanResult> {
    let mut results = scan_forms(&[form], n_samples, seed, keep_samples)?;
    Ok(results.remove(0))
}

/// [`scan_with`] for several forms over one shared set of draws. A draw is
/// kept only if every requested ratio is defined; each result equals the
/// single-form scan whenever the forms reject the same draws, which they do
/// for physical states.
pub fn scan_forms(
    forms: &[RatioForm],
    n_samples: u64,
    seed: u64,
    keep_samples: bool,
) -> Result<Vec<ScanResult>> {
    if n_samples == 0 {
        return Err(Error::InvalidInput("n_samples must be at least 1".into()));
    }
    if forms.is_empty() {
        return Err(Error::InvalidInput("no ratio forms requested".into()));
    }
    let n = n_samples as usize;
    let chunks = n.div_ceil(CHUNK);
    let results = par::map_indexed(chunks, |c| {
        let draws = CHUNK.min(n - c * CHUNK);
        scan_chunk(forms, seed, c, draws)
    });

    let mut rejected = 0;
    let mut accepted: Vec<([f64; 6], Vec<f64>)> = Vec::new();
    for chunk in results {
        rejected += chunk.rejected;
        accepted.extend(chunk.accepted);
    }
    let eq = SymmetricStateParams::equality_point().as_array();
    match evaluate_all(&eq, forms) {
        Some(r) => accepted.push((eq, r)),
        None => rejected += 1,
    }
    if accepted.is_empty() {
        return Err(Error::NoValidSamples);
    }

    Ok(forms
        .iter()
        .enumerate()
        .map(|(k, &form)| {
            let (argmin, min_ratio) = accepted
                .iter()
                .map(|(v, r)| (*v, r[k]))
                .fold(None, |best: Option<([f64; 6], f64)>, (v, r)| match best {
                    Some((_, b)) if b <= r => best,
                    _ => Some((v, r)),
                })
                .expect("non-empty");
            let ratios: Vec<f64> = accepted.iter().map(|(_, r)| r[k]).collect();
            ScanResult {
                form,
                samples_accepted: accepted.len() as u64,
                samples_rejected: rejected,
                min_ratio,
                argmin_params: SymmetricStateParams::from_array(argmin),
                histogram: Histogram::build(&ratios, LAMBDA),
                samples: keep_samples.then(|| {
                    accepted
                        .iter()
                        .map(|(v, r)| (SymmetricStateParams::from_array(*v), r[k]))
                        .collect()
                }),
            }
        })
        .collect())
}

/// Unitary with first row `<psi|`, so that `V |psi> = |0>`.
pub fn basis_completion(psi: &[num_complex::Complex64; 2]) -> Matrix2 {
    Matrix2::from_rows([[psi[0].conj(), psi[1].conj()], [-psi[1], psi[0]]])
}

#[derive(Debug, Clone)]
pub struct EqualityTransformReport {
    /// `V1 (x) V2`.
    pub unitary: Matrix4,
    pub transformed: DensityMatrix,
    /// Largest entry-wise distance from `|00><00|`.
    pub deviation: f64,
    pub fidelity: f64,
}

/// Maps the equality state to `|00><00|` with `V_r |psi_r> = |0>`.
pub fn verify_equality_transform() -> Result<EqualityTransformReport> {
    let psi1 = equality_qubit();
    let psi = equality_pure_state();
    let amp = psi.amplitudes();
    // second factor: amplitudes of qubit 2 given qubit 1 coefficient psi1[0]
    let psi2 = [amp[0] / psi1[0], amp[1] / psi1[0]];
    let v = kron(&basis_completion(&psi1), &basis_completion(&psi2));
    let transformed = equality_state().transformed(&v);
    let target = density_from_pure(&PureTwoQubitState::product(basis_qubit(0), basis_qubit(0))?);
    Ok(EqualityTransformReport {
        unitary: v,
        deviation: transformed.matrix().max_abs_diff(target.matrix()),
        fidelity: fidelity(&transformed, &target)?,
        transformed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_builder_matches_params() {
        let v = [0.1, -0.2, 0.3, 0.05, -0.15, 0.2];
        let p = SymmetricStateParams::from_array(v);
        assert!(symmetric_matrix(&v).max_abs_diff(&p.matrix()) < 1e-15);
    }

    #[test]
    fn equality_point_alone() {
        for form in RatioForm::ALL {
            let r = scan(form, 1, 9).unwrap();
            assert!(r.samples_accepted >= 1);
            assert!(r.min_ratio >= LAMBDA - 1e-9);
        }
        let eq = SymmetricStateParams::equality_point().as_array();
        let r = evaluate_all(&eq, &[RatioForm::KAdditive]).unwrap();
        assert!((r[0] - LAMBDA).abs() < 1e-12);
    }

    #[test]
    fn scan_is_deterministic() {
        let a = scan_with(RatioForm::JAdditive, 20_000, 4, true).unwrap();
        let b = scan_with(RatioForm::JAdditive, 20_000, 4, true).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.samples_accepted + a.samples_rejected, 20_001);
        assert_eq!(a.histogram.counts.iter().sum::<u64>(), a.samples_accepted);
    }

    #[test]
    fn prefilter_never_rejects_physical_states() {
        let mut rng = stream_rng(11, 0);
        for _ in 0..50_000 {
            let v: [f64; 6] = std::array::from_fn(|_| rng.random_range(-1.0..=1.0));
            let m = symmetric_matrix(&v);
            let min = hermitian_eigen(&m).unwrap().values[3];
            if min >= MIN_EIGENVALUE_TOL {
                assert!(passes_prefilter(&v), "{v:?}");
            }
        }
    }

    #[test]
    fn charpoly_test_is_sound() {
        let mut rng = stream_rng(12, 0);
        let mut agreed = 0;
        for _ in 0..50_000 {
            let v: [f64; 6] = std::array::from_fn(|_| rng.random_range(-1.0..=1.0));
            let m = symmetric_matrix(&v);
            let physical = hermitian_eigen(&m).unwrap().values[3] >= MIN_EIGENVALUE_TOL;
            if physical {
                assert!(passes_charpoly(&m), "{v:?}");
            }
            if physical == passes_charpoly(&m) {
                agreed += 1;
            }
        }
        assert!(agreed > 49_900);
    }

    #[test]
    fn shared_draws_match_single_form_scans() {
        let all = scan_forms(&RatioForm::ALL, 40_000, 6, false).unwrap();
        for (form, joint) in RatioForm::ALL.into_iter().zip(&all) {
            assert_eq!(&scan(form, 40_000, 6).unwrap(), joint);
        }
    }

    #[test]
    fn equality_transform_reaches_zero_zero() {
        let r = verify_equality_transform().unwrap();
        assert!(r.deviation < 1e-12);
        assert!((r.fidelity - 1.0).abs() < 1e-12);
        let v1 = basis_completion(&equality_qubit());
        assert!((v1 * v1.dagger()).max_abs_diff(&Matrix2::identity()) < 1e-15);
    }
}
