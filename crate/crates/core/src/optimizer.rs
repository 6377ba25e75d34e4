//! Multi-start Nelder-Mead maximization of the uncertainty functionals over
//! local unitaries.
//!
//! Each start runs a simplex search in the four rotation angles, restarted
//! while it improves, followed by a coordinate-wise golden-section polish. The
//! product forms f and h additionally search the surface where their square
//! root term vanishes. Starts are independent, so they run in parallel; the merge picks the largest value and breaks exact ties by the
//! lexicographically smallest wrapped parameter vector, which makes the result
//! independent of completion order.

use std::cmp::Ordering;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::Matrix4;
use crate::observables::{observables, ObservableSet};
use crate::par;
use crate::rng::{halton, stream_rng};
use crate::states::DensityMatrix;
use crate::uncertainty::{
    local_unitary, report_from_matrix, wrap_angle, LocalUnitaryParams, UncertaintyFunction,
    UncertaintyReport,
};
use crate::LAMBDA;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    /// Number of starts; half (at most 16) come from the fixed lattice.
    pub starts: usize,
    /// Nelder-Mead iteration cap per start.
    pub max_iter: usize,
    /// Simplex diameter at which a start counts as converged.
    pub tol: f64,
    pub seed: u64,
    /// Quasi-random points evaluated once; the best of them replace the
    /// plain quasi-random starts. Zero disables screening.
    pub screen: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            starts: 32,
            max_iter: 2000,
            tol: 1e-10,
            seed: 0,
            screen: 4096,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizationResult {
    pub best_value: f64,
    pub best_params: LocalUnitaryParams,
    pub evaluations: usize,
    pub converged: bool,
}

/// Outcome of a single start.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StartOutcome {
    pub value: f64,
    pub params: [f64; 4],
    pub evaluations: usize,
    pub converged: bool,
}

const INITIAL_STEP: f64 = 0.6;
const RESTART_STEP: f64 = 0.15;
const MAX_RESTARTS: usize = 20;
const RESTART_GAIN: f64 = 1e-13;
const POLISH_PASSES: usize = 3;
const POLISH_GOLDEN_ITERS: usize = 60;

/// Starts on the coarse lattice `theta1 x theta2 x (phi1 = phi2)`, which
/// contains the identity and the quoted optima at `alpha = 0` and `pi/4`.
pub fn lattice_starts() -> Vec<[f64; 4]> {
    let theta1 = [0.0, FRAC_PI_2, (-65.9f64).to_radians(), FRAC_PI_4];
    let theta2 = [0.0, 24.1f64.to_radians()];
    let phi = [0.0, FRAC_PI_2];
    let mut out = Vec::with_capacity(16);
    for &t1 in &theta1 {
        for &t2 in &theta2 {
            for &p in &phi {
                out.push([t1, p, t2, p]);
            }
        }
    }
    out
}

/// Shifted Halton points in `[-pi, pi)^4`.
pub fn quasi_random_starts(count: usize, seed: u64) -> Vec<[f64; 4]> {
    let mut rng = stream_rng(seed, u64::MAX);
    let shift: [f64; 4] = std::array::from_fn(|_| rng.random::<f64>());
    (1..=count as u64)
        .map(|i| {
            let h = halton::<4>(i);
            std::array::from_fn(|d| ((h[d] + shift[d]).fract()) * 2.0 * PI - PI)
        })
        .collect()
}

/// All start points for a configuration.
pub fn start_points(config: &OptimizerConfig) -> Vec<[f64; 4]> {
    let lattice = lattice_starts();
    let n_lattice = (config.starts / 2).min(lattice.len());
    let mut starts: Vec<[f64; 4]> = lattice.into_iter().take(n_lattice).collect();
    starts.extend(quasi_random_starts(config.starts - n_lattice, config.seed));
    starts
}

/// Lattice starts plus the best screening points, or [`start_points`] when
/// screening is off.
pub fn screened_start_points<F>(objective: &F, config: &OptimizerConfig) -> Vec<[f64; 4]>
where
    F: Fn(&[f64; 4]) -> f64 + Sync + Send,
{
    let wanted = config.starts - (config.starts / 2).min(lattice_starts().len());
    if config.screen <= wanted {
        return start_points(config);
    }
    let pool = quasi_random_starts(config.screen, config.seed);
    let values = par::map_indexed(pool.len(), |i| objective(&pool[i]));
    let mut order: Vec<usize> = (0..pool.len()).filter(|&i| !values[i].is_nan()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let mut starts: Vec<[f64; 4]> = lattice_starts()
        .into_iter()
        .take(config.starts - wanted)
        .collect();
    starts.extend(order.into_iter().take(wanted).map(|i| pool[i]));
    starts
}

fn wrap4(x: [f64; 4]) -> [f64; 4] {
    x.map(wrap_angle)
}

fn lex_cmp(a: &[f64; 4], b: &[f64; 4]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// `Greater` when `a` beats `b`: higher value, then smaller parameters.
fn outcome_cmp(a: &StartOutcome, b: &StartOutcome) -> Ordering {
    a.value
        .total_cmp(&b.value)
        .then_with(|| lex_cmp(&b.params, &a.params))
}

/// Nelder-Mead maximization of a periodic objective from one start.
pub fn nelder_mead_max<F>(objective: &F, x0: [f64; 4], max_iter: usize, tol: f64) -> StartOutcome
where
    F: Fn(&[f64; 4]) -> f64,
{
    nelder_mead_with_step(objective, x0, INITIAL_STEP, max_iter, tol)
}

/// [`nelder_mead_max`] followed by restarts from the incumbent with a fresh,
/// smaller simplex for as long as they improve it. Restarts free a simplex
/// that has collapsed onto a ridge, where the functionals with absolute
/// values in them tend to have their maxima.
pub fn nelder_mead_restarted<F>(
    objective: &F,
    x0: [f64; 4],
    max_iter: usize,
    tol: f64,
) -> StartOutcome
where
    F: Fn(&[f64; 4]) -> f64,
{
    let mut best = nelder_mead_max(objective, x0, max_iter, tol);
    for _ in 0..MAX_RESTARTS {
        let next = nelder_mead_with_step(objective, best.params, RESTART_STEP, max_iter, tol);
        let evaluations = best.evaluations + next.evaluations;
        let improved = next.value > best.value + RESTART_GAIN;
        if next.value >= best.value {
            best = StartOutcome {
                evaluations,
                ..next
            };
        } else {
            best.evaluations = evaluations;
        }
        if !improved {
            break;
        }
    }
    best
}

fn nelder_mead_with_step<F>(
    objective: &F,
    x0: [f64; 4],
    step: f64,
    max_iter: usize,
    tol: f64,
) -> StartOutcome
where
    F: Fn(&[f64; 4]) -> f64,
{
    let mut evals = 0usize;
    let mut eval = |x: &[f64; 4]| {
        evals += 1;
        let v = objective(x);
        // minimize the negated objective; NaN goes to the back
        if v.is_nan() {
            f64::INFINITY
        } else {
            -v
        }
    };

    let mut simplex: Vec<([f64; 4], f64)> = Vec::with_capacity(5);
    simplex.push((x0, eval(&x0)));
    for i in 0..4 {
        let mut x = x0;
        x[i] += step;
        let fx = eval(&x);
        simplex.push((x, fx));
    }

    let mut converged = false;
    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].0;
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| {
                x.iter()
                    .zip(&best)
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max);
        if diameter < tol {
            converged = true;
            break;
        }
        // keep the simplex near the canonical cell by shifting it as a whole
        let shift: [f64; 4] = std::array::from_fn(|d| wrap_angle(best[d]) - best[d]);
        if shift.iter().any(|s| s.abs() > PI) {
            for (x, _) in simplex.iter_mut() {
                for d in 0..4 {
                    x[d] += shift[d];
                }
            }
        }

        let mut centroid = [0.0; 4];
        for (x, _) in &simplex[..4] {
            for d in 0..4 {
                centroid[d] += x[d] / 4.0;
            }
        }
        let worst = simplex[4];
        let along = |t: f64| -> [f64; 4] {
            std::array::from_fn(|d| centroid[d] + t * (worst.0[d] - centroid[d]))
        };
        let xr = along(-1.0);
        let fr = eval(&xr);
        if fr < simplex[0].1 {
            let xe = along(-2.0);
            let fe = eval(&xe);
            simplex[4] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[3].1 {
            simplex[4] = (xr, fr);
        } else {
            let (xc, fc) = if fr < worst.1 {
                let xc = along(-0.5);
                (xc, eval(&xc))
            } else {
                let xc = along(0.5);
                (xc, eval(&xc))
            };
            if fc < worst.1.min(fr) {
                simplex[4] = (xc, fc);
            } else {
                let x_best = simplex[0].0;
                for v in simplex.iter_mut().skip(1) {
                    let x: [f64; 4] =
                        std::array::from_fn(|d| x_best[d] + 0.5 * (v.0[d] - x_best[d]));
                    *v = (x, eval(&x));
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, fx) = simplex[0];
    StartOutcome {
        value: -fx,
        params: x,
        evaluations: evals,
        converged,
    }
}

/// Golden-section maximization along each coordinate in turn. Never returns
/// a worse point than it was given.
pub fn golden_polish<F>(objective: &F, start: StartOutcome, half_width: f64) -> StartOutcome
where
    F: Fn(&[f64; 4]) -> f64,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x = start.params;
    let mut fx = start.value;
    let mut evals = start.evaluations;
    for _ in 0..POLISH_PASSES {
        for d in 0..4 {
            let at = |t: f64| {
                let mut y = x;
                y[d] = t;
                y
            };
            let (mut lo, mut hi) = (x[d] - half_width, x[d] + half_width);
            let mut c = hi - inv_phi * (hi - lo);
            let mut e = lo + inv_phi * (hi - lo);
            let mut fc = objective(&at(c));
            let mut fe = objective(&at(e));
            evals += 2;
            for _ in 0..POLISH_GOLDEN_ITERS {
                if fc > fe {
                    hi = e;
                    e = c;
                    fe = fc;
                    c = hi - inv_phi * (hi - lo);
                    fc = objective(&at(c));
                } else {
                    lo = c;
                    c = e;
                    fc = fe;
                    e = lo + inv_phi * (hi - lo);
                    fe = objective(&at(e));
                }
                evals += 1;
            }
            let (t, ft) = if fc > fe { (c, fc) } else { (e, fe) };
            if ft > fx {
                x[d] = t;
                fx = ft;
            }
        }
    }
    StartOutcome {
        value: fx,
        params: x,
        evaluations: evals,
        converged: start.converged,
    }
}

/// Maximizes an arbitrary objective of the four rotation angles.
pub fn maximize_objective<F>(objective: F, config: &OptimizerConfig) -> Result<OptimizationResult>
where
    F: Fn(&[f64; 4]) -> f64 + Sync + Send,
{
    check_config(config)?;
    let starts = screened_start_points(&objective, config);
    let outcomes = par::map_indexed(starts.len(), |i| {
        let nm = nelder_mead_restarted(&objective, starts[i], config.max_iter, config.tol);
        let mut polished = golden_polish(&objective, nm, 1e-3);
        polished.params = wrap4(polished.params);
        polished
    });
    merge_outcomes(&outcomes)
}

/// Maximizes `smooth(x) - sqrt(|cusp(x)|)`.
///
/// Maxima of such objectives often sit on the surface `cusp = 0`, where the
/// square root has unbounded slope and a simplex cannot travel along it. The
/// best few Nelder-Mead results are therefore projected onto that surface
/// and the search continues there.
pub fn maximize_split<A, B>(
    smooth: A,
    cusp: B,
    config: &OptimizerConfig,
) -> Result<OptimizationResult>
where
    A: Fn(&[f64; 4]) -> f64 + Sync + Send,
    B: Fn(&[f64; 4]) -> f64 + Sync + Send,
{
    check_config(config)?;
    let full = |x: &[f64; 4]| smooth(x) - cusp(x).abs().sqrt();
    let starts = screened_start_points(&full, config);
    let free = par::map_indexed(starts.len(), |i| {
        let nm = nelder_mead_restarted(&full, starts[i], config.max_iter, config.tol);
        (nm, golden_polish(&full, nm, 1e-3))
    });
    let mut order: Vec<usize> = (0..free.len()).collect();
    order.sort_by(|&a, &b| outcome_cmp(&free[b].1, &free[a].1).then(a.cmp(&b)));
    order.truncate(RIDGE_STARTS);
    let ridge = par::map_indexed(order.len(), |i| {
        ridge_search(&full, &cusp, free[order[i]].0.params, config)
    });
    let outcomes: Vec<StartOutcome> = free
        .iter()
        .map(|&(_, polished)| polished)
        .chain(ridge.into_iter().flatten())
        .map(|o| StartOutcome {
            params: wrap4(o.params),
            ..o
        })
        .collect();
    merge_outcomes(&outcomes)
}

/// Best free outcomes that get a search on the surface `cusp = 0`.
const RIDGE_STARTS: usize = 6;
const PROJECT_ITERS: usize = 40;
const PROJECT_ACCEPT: f64 = 1e-15;
const FD_STEP: f64 = 1e-6;

/// Newton steps along the gradient of `cusp` until it vanishes.
fn project_to_zero<B>(cusp: &B, x0: [f64; 4]) -> Option<[f64; 4]>
where
    B: Fn(&[f64; 4]) -> f64,
{
    let mut x = x0;
    for _ in 0..PROJECT_ITERS {
        let b = cusp(&x);
        if !b.is_finite() {
            return None;
        }
        if b.abs() <= PROJECT_ACCEPT * 1e-2 {
            break;
        }
        let grad: [f64; 4] = std::array::from_fn(|d| {
            let (mut up, mut down) = (x, x);
            up[d] += FD_STEP;
            down[d] -= FD_STEP;
            (cusp(&up) - cusp(&down)) / (2.0 * FD_STEP)
        });
        let norm2: f64 = grad.iter().map(|g| g * g).sum();
        if norm2 < 1e-30 {
            return None;
        }
        for d in 0..4 {
            x[d] -= b / norm2 * grad[d];
        }
    }
    (cusp(&x).abs() <= PROJECT_ACCEPT).then_some(x)
}

/// Nelder-Mead over points projected onto `cusp = 0`, started from the
/// projection of `x0`.
fn ridge_search<F, B>(
    full: &F,
    cusp: &B,
    x0: [f64; 4],
    config: &OptimizerConfig,
) -> Option<StartOutcome>
where
    F: Fn(&[f64; 4]) -> f64,
    B: Fn(&[f64; 4]) -> f64,
{
    let start = project_to_zero(cusp, x0)?;
    let on_ridge = |y: &[f64; 4]| project_to_zero(cusp, *y).map_or(f64::NAN, |p| full(&p));
    let nm = nelder_mead_restarted(&on_ridge, start, config.max_iter, config.tol);
    let params = project_to_zero(cusp, nm.params)?;
    Some(StartOutcome {
        value: full(&params),
        params,
        ..nm
    })
}

fn check_config(config: &OptimizerConfig) -> Result<()> {
    if config.starts == 0 || config.max_iter == 0 {
        return Err(Error::InvalidInput(
            "optimizer needs at least one start and one iteration".into(),
        ));
    }
    Ok(())
}

/// Order-independent merge of start outcomes.
pub fn merge_outcomes(outcomes: &[StartOutcome]) -> Result<OptimizationResult> {
    let evaluations = outcomes.iter().map(|o| o.evaluations).sum();
    let converged: Vec<&StartOutcome> = outcomes.iter().filter(|o| o.converged).collect();
    let best = converged
        .into_iter()
        .max_by(|a, b| outcome_cmp(a, b))
        .ok_or(Error::NotConverged)?;
    Ok(OptimizationResult {
        best_value: best.value,
        best_params: LocalUnitaryParams::from_array(best.params),
        evaluations,
        converged: true,
    })
}

/// Value of one functional at the rotated state `U^dagger rho U`.
pub struct Objective<'a> {
    set: &'a ObservableSet,
    rho: Matrix4,
    func: UncertaintyFunction,
}

impl<'a> Objective<'a> {
    pub fn new(rho: &DensityMatrix, func: UncertaintyFunction) -> Self {
        Self {
            set: observables(),
            rho: *rho.matrix(),
            func,
        }
    }

    fn report(&self, x: &[f64; 4]) -> Option<UncertaintyReport> {
        let u = local_unitary(&LocalUnitaryParams::from_array(*x));
        let rotated = u.dagger() * self.rho * u;
        report_from_matrix(self.set, &rotated).ok()
    }

    pub fn value(&self, x: &[f64; 4]) -> f64 {
        self.report(x).map_or(f64::NAN, |r| r.value(self.func))
    }

    /// Product of the three deviations for the product forms `f` and `h`.
    fn deviation_product(&self, x: &[f64; 4]) -> f64 {
        let offset = if self.func == UncertaintyFunction::F {
            0
        } else {
            3
        };
        self.report(x)
            .map_or(f64::NAN, |r| r.deltas[offset..offset + 3].iter().product())
    }

    /// `lambda^3/8` times the product of the three means under the square root.
    fn mean_product(&self, x: &[f64; 4]) -> f64 {
        let offset = if self.func == UncertaintyFunction::F {
            0
        } else {
            3
        };
        self.report(x).map_or(f64::NAN, |r| {
            LAMBDA.powi(3) / 8.0 * r.expectations[offset..offset + 3].iter().product::<f64>()
        })
    }
}

/// Maximum of `func` over local unitaries for the state `rho`.
pub fn maximize(
    rho: &DensityMatrix,
    func: UncertaintyFunction,
    config: &OptimizerConfig,
) -> Result<OptimizationResult> {
    let objective = Objective::new(rho, func);
    match func {
        UncertaintyFunction::F | UncertaintyFunction::H => maximize_split(
            |x| objective.deviation_product(x),
            |x| objective.mean_product(x),
            config,
        ),
        UncertaintyFunction::G | UncertaintyFunction::K => {
            maximize_objective(|x| objective.value(x), config)
        }
    }
}

/// Closed-form `h` on `cos(alpha)|00> + sin(alpha)|11>` rotated by `u`:
/// `h = -sqrt(h1) / (2 sqrt2 3^(3/4)) + sqrt(h2) sqrt(h3) sqrt(h4) / 128`.
pub fn h_closed_form(alpha: f64, u: &LocalUnitaryParams) -> f64 {
    let (smooth, cusp) = h_closed_form_parts(alpha, u);
    smooth - cusp.abs().sqrt()
}

/// The two terms of [`h_closed_form`]: `sqrt(h2 h3 h4) / 128` and the signed
/// quantity whose absolute square root is subtracted from it.
pub fn h_closed_form_parts(alpha: f64, u: &LocalUnitaryParams) -> (f64, f64) {
    let (t1, p1, t2, p2) = (u.theta1, u.phi1, u.theta2, u.phi2);
    let (s2a, c2a) = (2.0 * alpha).sin_cos();
    let c4a = (4.0 * alpha).cos();
    let (s2t1, c2t1) = (2.0 * t1).sin_cos();
    let (s2t2, c2t2) = (2.0 * t2).sin_cos();
    let c4t1 = (4.0 * t1).cos();
    let c4t2 = (4.0 * t2).cos();
    let (st1, ct1) = t1.sin_cos();
    let (st2, ct2) = t2.sin_cos();
    let (sp1, cp1) = p1.sin_cos();
    let (sp2, cp2) = p2.sin_cos();
    let (s2p1, c2p1) = (2.0 * p1).sin_cos();
    let (s2p2, c2p2) = (2.0 * p2).sin_cos();
    let sq = |x: f64| x * x;

    let h1 = c2a.powi(3) * (c2t1 + c2t2) * (s2t1 * cp1 + s2t2 * cp2) * (s2t1 * sp1 + s2t2 * sp2);
    let h2 = 6.0 - c4t1 + 4.0 * c2t1 * c2t2 - 2.0 * c4a * sq(c2t1 + c2t2) - c4t2
        + 8.0 * s2a * s2t1 * s2t2 * (p1 + p2).cos();
    let h3 =
        14.0 + 2.0 * c4t1 * sq(cp1) + 16.0 * sq(ct1) * (sq(ct2) * s2a - c4a * sq(cp1) * sq(st1))
            - c2p2 * (1.0 + 16.0 * s2a * sq(ct1) * sq(st2))
            - 16.0 * s2a * sq(st1) * sq(st2) * s2p1 * s2p2
            + 2.0 * cp2 * (8.0 * cp1 * sq(s2a) * s2t1 * s2t2 + cp2 * (c4t2 - 2.0 * c4a * sq(s2t2)))
            - c2p1 * (1.0 + 16.0 * s2a * sq(st1) * (c2t2 * sq(cp2) + sq(sp2)));
    let h4 = c2p2 * (1.0 - 16.0 * s2a * sq(ct1) * sq(st2))
        + c2p1 * (1.0 - 16.0 * s2a * sq(st1) * (sq(cp2) + c2t2 * sq(sp2)))
        + 2.0
            * (7.0
                + (c4t1 - 2.0 * c4a * sq(s2t1)) * sq(sp1)
                + 8.0 * sq(s2a) * s2t1 * s2t2 * sp1 * sp2
                + (c4t2 - 2.0 * c4a * sq(s2t2)) * sq(sp2)
                + 8.0 * s2a * (-sq(ct1) * sq(ct2) + sq(st1) * sq(st2) * s2p1 * s2p2));

    let root = |x: f64| x.max(0.0).sqrt();
    (
        root(h2) * root(h3) * root(h4) / 128.0,
        h1 / (8.0 * 3f64.powf(1.5)),
    )
}
