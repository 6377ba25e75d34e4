//! Acceptance suite. Prints one PASS/FAIL line per criterion. Criteria listed
//! in `KNOWN_RED` are expected to fail and are reported with the reason; the
//! exit status is non-zero when any other criterion fails or a listed one
//! unexpectedly passes. Arguments select criteria by number.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use tur_core::entanglement::{
    concurrence, curve_f_werner, curve_g_werner, curve_k_werner, k_werner_branch_boundary,
};
use tur_core::linalg::{kron, pauli, Matrix4, I};
use tur_core::observables::{expectation, observables, variance, PauliAxis};
use tur_core::optimizer::{
    h_closed_form, h_closed_form_parts, maximize, maximize_split, nelder_mead_max, OptimizerConfig,
};
use tur_core::rng::stream_rng;
use tur_core::states::{
    bell_state, density_from_pure, equality_state, symmetric_state, werner_state, DensityMatrix,
    PureTwoQubitState, SymmetricStateParams, WernerParams,
};
use tur_core::tightness::scan_forms;
use tur_core::tomography::{
    exact_counts, fidelity, monte_carlo_errors, reconstruct, simulate_counts, Quantity, Shots,
};
use tur_core::uncertainty::{
    eval_functions, lambda_ratio, LocalUnitaryParams, RatioForm, UncertaintyFunction,
};
use tur_core::LAMBDA;

type Outcome = (bool, String);

fn alpha_grid() -> Vec<f64> {
    (0..19).map(|i| (5.0 * i as f64).to_radians()).collect()
}

fn random_complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// `G G^dagger / Tr` for a 4 x rank Ginibre matrix.
fn random_density(rng: &mut impl Rng, rank: usize) -> DensityMatrix {
    let g: Vec<[Complex64; 4]> = (0..rank)
        .map(|_| std::array::from_fn(|_| random_complex(rng)))
        .collect();
    let m = Matrix4::from_fn(|i, j| g.iter().map(|c| c[i] * c[j].conj()).sum());
    let tr = m.trace().re;
    DensityMatrix::new(m.scale(1.0 / tr)).expect("Ginibre state is valid")
}

fn random_angles(rng: &mut impl Rng) -> LocalUnitaryParams {
    let mut a = || rng.random_range(-PI..PI);
    LocalUnitaryParams::new(a(), a(), a(), a())
}

fn criterion_1() -> Outcome {
    let rho = equality_state();
    let mut worst: f64 = 0.0;
    for form in RatioForm::ALL {
        match lambda_ratio(&rho, form) {
            Ok(r) => worst = worst.max((r - LAMBDA).abs()),
            Err(e) => return (false, format!("{form}: {e}")),
        }
    }
    (
        worst <= 1e-9,
        format!("max |ratio - 2/sqrt3| = {worst:.2e} (tol 1e-9)"),
    )
}

/// Ratios of all four forms on the symmetric family from closed-form moments.
fn closed_form_ratios(p: &[f64; 6]) -> [f64; 4] {
    let [a, b, t1, t2, t3, t4] = *p;
    let t = [[t1, t2, t3], [t2, t1, t4], [t3, t4, t1]];
    let dj: Vec<f64> = (0..3)
        .map(|i| {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            (2.0 - 2.0 * t[i][i] - t[j][k] * t[j][k] + 2.0 * t[j][k] * t[k][j] - t[k][j] * t[k][j])
                / 16.0
        })
        .collect();
    let r = (a + b) / 8.0;
    let kmean = (a + b) / 2.0;
    let dk = (1.0 + t1) / 2.0 - kmean * kmean;
    [
        2.0 * (dj[0] * dj[1] * dj[2] / r.abs().powi(3)).cbrt(),
        2.0 * (dj[0] + dj[1] + dj[2]) / (3.0 * r.abs()),
        2.0 * (dk / kmean.abs()),
        2.0 * dk / kmean.abs(),
    ]
}

fn criterion_2() -> Outcome {
    const DRAWS: u64 = 60_000_000;
    let mut notes = Vec::new();
    let mut ok = true;
    match scan_forms(&RatioForm::ALL, DRAWS, 2024, false) {
        Ok(results) => {
            for r in results {
                ok &= r.samples_accepted >= 100_000 && r.min_ratio >= LAMBDA - 1e-9;
                notes.push(format!(
                    "{}: accepted {} min {:.10}",
                    r.form, r.samples_accepted, r.min_ratio
                ));
            }
        }
        Err(e) => {
            ok = false;
            notes.push(e.to_string());
        }
    }
    // Independent coarse grid over (a, b, t1..t4) with closed-form moments.
    let grid: Vec<f64> = (0..=12).map(|i| -1.0 + i as f64 / 6.0).collect();
    let mut grid_min = f64::INFINITY;
    let mut physical = 0usize;
    let n = grid.len();
    for idx in 0..n.pow(6) {
        let mut k = idx;
        let p: [f64; 6] = std::array::from_fn(|_| {
            let v = grid[k % n];
            k /= n;
            v
        });
        // reduced Bloch vectors a(1,1,1) and b(1,1,1) must fit in the unit ball
        if (p[0] + p[1]).abs() < 1e-9 || 3.0 * p[0] * p[0] > 1.0 || 3.0 * p[1] * p[1] > 1.0 {
            continue;
        }
        if symmetric_state(SymmetricStateParams::from_array(p)).is_err() {
            continue;
        }
        physical += 1;
        for r in closed_form_ratios(&p) {
            grid_min = grid_min.min(r);
        }
    }
    ok &= grid_min >= LAMBDA - 1e-6;
    notes.push(format!(
        "grid {physical} physical points, min {grid_min:.10}"
    ));
    (ok, notes.join("; "))
}

fn criterion_3() -> Outcome {
    let analytic = (1.0f64 / 12.0).powf(1.5);
    let report = match eval_functions(&equality_state(), &LocalUnitaryParams::identity()) {
        Ok(r) => r,
        Err(e) => return (false, e.to_string()),
    };
    let (lhs, rhs) = (report.j_product_lhs(), report.j_product_rhs());
    let exact = (lhs - analytic).abs() <= 1e-12 && (rhs - analytic).abs() <= 1e-12;
    // Measured values 0.026 +- 0.005 (left) and 0.025 +- 0.006 (right).
    let in_measured =
        (analytic - 0.026).abs() <= 2.0 * 0.005 && (analytic - 0.025).abs() <= 2.0 * 0.006;
    // Simulated run at a photon-counting scale: means inside the measured
    // 2-sigma intervals.
    let config = OptimizerConfig::default();
    let bars = monte_carlo_errors(
        &equality_state(),
        &[Quantity::JProductLhs, Quantity::JProductRhs],
        Shots::Finite(2_000),
        200,
        7,
        &config,
    );
    let (sim_ok, sim_note) = match bars {
        Ok(b) => {
            let inside = (b[0].1.mean - 0.026).abs() <= 2.0 * 0.005
                && (b[1].1.mean - 0.025).abs() <= 2.0 * 0.006;
            (
                inside,
                format!(
                    "simulated lhs {:.4}+-{:.4} rhs {:.4}+-{:.4}",
                    b[0].1.mean, b[0].1.std, b[1].1.mean, b[1].1.std
                ),
            )
        }
        Err(e) => (false, e.to_string()),
    };
    (
        exact && in_measured && sim_ok,
        format!(
            "lhs {lhs:.12} rhs {rhs:.12} analytic {analytic:.12}; inside measured 2-sigma: {in_measured}; {sim_note}"
        ),
    )
}

/// Maximum of f on `|00>` over real rotations only (`phi1 = phi2 = 0`).
fn f_max_real_rotations() -> f64 {
    let rho = density_from_pure(&bell_state(0.0));
    let objective = |x: &[f64; 4]| {
        let u = LocalUnitaryParams::new(x[0], 0.0, x[2], 0.0);
        // the quadratic term pins the unused phase coordinates
        eval_functions(&rho, &u).map(|r| r.f).unwrap_or(f64::NAN) - x[1] * x[1] - x[3] * x[3]
    };
    let mut best = f64::NEG_INFINITY;
    for i in 0..12 {
        for j in 0..12 {
            let x0 = [
                -FRAC_PI_2 + PI * i as f64 / 12.0,
                0.0,
                -FRAC_PI_2 + PI * j as f64 / 12.0,
                0.0,
            ];
            best = best.max(nelder_mead_max(&objective, x0, 4000, 1e-12).value);
        }
    }
    best
}

fn criterion_4() -> Outcome {
    let config = OptimizerConfig::default();
    let mut worst_gk: f64 = 0.0;
    let mut worst_f_entangled: f64 = 0.0;
    let mut f_at_product = Vec::new();
    for alpha in alpha_grid() {
        let s = (2.0 * alpha).sin();
        let rho = density_from_pure(&bell_state(alpha));
        let expected = [
            (
                UncertaintyFunction::F,
                (1.0 + s).sqrt() * (3.0 + s) / (32.0 * 2f64.sqrt()),
            ),
            (UncertaintyFunction::G, (2.0 + s) / 4.0),
            (UncertaintyFunction::K, 1.0 + s),
        ];
        for (func, want) in expected {
            let got = match maximize(&rho, func, &config) {
                Ok(r) => r.best_value,
                Err(e) => return (false, format!("{func} at {alpha}: {e}")),
            };
            let err = (got - want).abs();
            match func {
                UncertaintyFunction::F if s.abs() < 1e-12 => f_at_product.push(got),
                UncertaintyFunction::F => worst_f_entangled = worst_f_entangled.max(err),
                _ => worst_gk = worst_gk.max(err),
            }
        }
    }
    let f = |alpha: f64| {
        maximize(
            &density_from_pure(&bell_state(alpha)),
            UncertaintyFunction::F,
            &config,
        )
    };
    let (f45, f0) = match (f(FRAC_PI_4), f(0.0)) {
        (Ok(a), Ok(b)) => (a.best_value, b.best_value),
        _ => return (false, "spot optimization failed".into()),
    };
    let quoted_f0 = 3.0 * 2f64.sqrt() / 64.0;
    let worst_f0 = f_at_product
        .iter()
        .map(|v| (v - quoted_f0).abs())
        .fold(0.0, f64::max);
    let ok = worst_gk <= 1e-6
        && worst_f_entangled <= 1e-6
        && (f45 - 0.125).abs() <= 1e-6
        && worst_f0 <= 1e-6;
    (
        ok,
        format!(
            "g, k max err {worst_gk:.2e}; f at 5..85 deg max err {worst_f_entangled:.2e}; f(45) = {f45:.9}; \
             f(0) = {f0:.9} vs quoted {quoted_f0:.9} (err {worst_f0:.2e}, tol 1e-6); \
             f(0) over real rotations only = {:.9}",
            f_max_real_rotations()
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut rng = stream_rng(55, 0);
    let mut worst_direct: f64 = 0.0;
    for _ in 0..1000 {
        let alpha = rng.random_range(0.0..FRAC_PI_2);
        let u = random_angles(&mut rng);
        let direct = eval_functions(&density_from_pure(&bell_state(alpha)), &u).map(|r| r.h);
        match direct {
            Ok(h) => worst_direct = worst_direct.max((h - h_closed_form(alpha, &u)).abs()),
            Err(e) => return (false, e.to_string()),
        }
    }
    let config = OptimizerConfig::default();
    let mut worst_max: f64 = 0.0;
    let mut at_best: f64 = 0.0;
    for alpha in alpha_grid() {
        let direct = maximize(
            &density_from_pure(&bell_state(alpha)),
            UncertaintyFunction::H,
            &config,
        );
        let parts = |x: &[f64; 4]| h_closed_form_parts(alpha, &LocalUnitaryParams::from_array(*x));
        let closed = maximize_split(|x| parts(x).0, |x| parts(x).1, &config);
        match (direct, closed) {
            (Ok(d), Ok(c)) => {
                worst_max = worst_max.max((d.best_value - c.best_value).abs());
                at_best = at_best.max((h_closed_form(alpha, &d.best_params) - d.best_value).abs());
            }
            _ => return (false, format!("h maximization failed at {alpha}")),
        }
    }
    (
        worst_direct <= 1e-10 && worst_max <= 1e-5 && at_best <= 1e-8,
        format!(
            "closed vs direct {worst_direct:.2e} (tol 1e-10); maxima {worst_max:.2e} (tol 1e-5); \
             closed form at optimizer argmax {at_best:.2e} (tol 1e-8)"
        ),
    )
}

fn criterion_6() -> Outcome {
    let config = OptimizerConfig::default();
    let eta = 0.5;
    let mut worst = [0.0f64; 3];
    let mut worst_f_entangled: f64 = 0.0;
    for alpha in alpha_grid() {
        let rho = match werner_state(WernerParams { alpha, eta }) {
            Ok(r) => r,
            Err(e) => return (false, e.to_string()),
        };
        let curves = [
            (UncertaintyFunction::F, curve_f_werner(alpha, eta)),
            (UncertaintyFunction::G, curve_g_werner(alpha, eta)),
            (UncertaintyFunction::K, curve_k_werner(alpha, eta)),
        ];
        for (n, (func, want)) in curves.into_iter().enumerate() {
            match (maximize(&rho, func, &config), want) {
                (Ok(r), Ok(w)) => {
                    let err = (r.best_value - w).abs();
                    worst[n] = worst[n].max(err);
                    if n == 0 && (2.0 * alpha).sin().abs() > 1e-12 {
                        worst_f_entangled = worst_f_entangled.max(err);
                    }
                }
                _ => return (false, format!("{func} at {alpha} failed")),
            }
        }
    }
    // Continuity of the piecewise k across its branch boundary.
    let mut jump: f64 = 0.0;
    for eta in [0.55, 0.6, 0.7, 0.8, 0.9, 0.99] {
        let a = k_werner_branch_boundary(eta).expect("eta > 1/2");
        for edge in [a, FRAC_PI_2 - a] {
            let lo = curve_k_werner(edge * (1.0 - 1e-13), eta).unwrap();
            let hi = curve_k_werner(edge * (1.0 + 1e-13), eta).unwrap();
            jump = jump.max((hi - lo).abs());
        }
    }
    (
        worst.iter().all(|&w| w <= 1e-5) && jump <= 1e-9,
        format!(
            "max |opt - curve| f {:.2e} (5..85 deg {worst_f_entangled:.2e}), g {:.2e}, k {:.2e} (tol 1e-5); \
             k branch jump {jump:.2e} (tol 1e-9)",
            worst[0], worst[1], worst[2]
        ),
    )
}

/// Eigenvalues of a general complex 4x4 matrix by unshifted QR iteration
/// with Gram-Schmidt; adequate for the diagonalizable, real-spectrum
/// products `rho rho~`.
fn qr_eigenvalues(mut a: [[Complex64; 4]; 4]) -> [f64; 4] {
    for _ in 0..2000 {
        let mut q = [[Complex64::new(0.0, 0.0); 4]; 4];
        let mut r = [[Complex64::new(0.0, 0.0); 4]; 4];
        for j in 0..4 {
            let mut v: [Complex64; 4] = std::array::from_fn(|i| a[i][j]);
            for k in 0..j {
                let dot: Complex64 = (0..4).map(|i| q[i][k].conj() * v[i]).sum();
                r[k][j] = dot;
                for i in 0..4 {
                    v[i] -= dot * q[i][k];
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            r[j][j] = Complex64::new(norm, 0.0);
            for i in 0..4 {
                q[i][j] = if norm > 1e-300 {
                    v[i] / norm
                } else {
                    Complex64::new(0.0, 0.0)
                };
            }
        }
        let mut next = [[Complex64::new(0.0, 0.0); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                next[i][j] = (0..4).map(|k| r[i][k] * q[k][j]).sum();
            }
        }
        a = next;
    }
    let mut ev = [a[0][0].re, a[1][1].re, a[2][2].re, a[3][3].re];
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

/// Concurrence from the eigenvalues of the non-Hermitian `rho rho~`.
fn wootters_oracle(rho: &Matrix4) -> f64 {
    let sy = [
        [Complex64::new(0.0, 0.0), -I],
        [I, Complex64::new(0.0, 0.0)],
    ];
    let yy: [[Complex64; 4]; 4] =
        std::array::from_fn(|i| std::array::from_fn(|j| sy[i / 2][j / 2] * sy[i % 2][j % 2]));
    let mul = |x: &[[Complex64; 4]; 4], y: &[[Complex64; 4]; 4]| -> [[Complex64; 4]; 4] {
        std::array::from_fn(|i| std::array::from_fn(|j| (0..4).map(|k| x[i][k] * y[k][j]).sum()))
    };
    let r: [[Complex64; 4]; 4] = std::array::from_fn(|i| std::array::from_fn(|j| rho[(i, j)]));
    let rc: [[Complex64; 4]; 4] =
        std::array::from_fn(|i| std::array::from_fn(|j| rho[(i, j)].conj()));
    let flipped = mul(&mul(&yy, &rc), &yy);
    let ev = qr_eigenvalues(mul(&r, &flipped)).map(|x| x.max(0.0).sqrt());
    (ev[0] - ev[1] - ev[2] - ev[3]).max(0.0)
}

fn criterion_7() -> Outcome {
    let mut bell_err: f64 = 0.0;
    for i in 0..=36 {
        let alpha = (2.5 * i as f64).to_radians();
        match concurrence(&density_from_pure(&bell_state(alpha))) {
            Ok(c) => bell_err = bell_err.max((c.concurrence - (2.0 * alpha).sin().abs()).abs()),
            Err(e) => return (false, e.to_string()),
        }
    }
    let mut rng = stream_rng(77, 0);
    let mut product_max: f64 = 0.0;
    for _ in 0..200 {
        let a = [random_complex(&mut rng), random_complex(&mut rng)];
        let b = [random_complex(&mut rng), random_complex(&mut rng)];
        let na = (a[0].norm_sqr() + a[1].norm_sqr()).sqrt();
        let nb = (b[0].norm_sqr() + b[1].norm_sqr()).sqrt();
        let psi = PureTwoQubitState::product(a.map(|z| z / na), b.map(|z| z / nb)).unwrap();
        product_max = product_max.max(concurrence(&density_from_pure(&psi)).unwrap().concurrence);
    }
    let mut werner_err: f64 = 0.0;
    for i in 0..20 {
        let eta = 0.05 * i as f64;
        let rho = werner_state(WernerParams {
            alpha: FRAC_PI_4,
            eta,
        })
        .unwrap();
        let c = concurrence(&rho).unwrap().concurrence;
        let oracle = wootters_oracle(rho.matrix());
        let formula = ((3.0 * eta - 1.0) / 2.0).max(0.0);
        werner_err = werner_err.max((c - oracle).abs()).max((c - formula).abs());
    }
    (
        bell_err <= 1e-9 && product_max <= 1e-12 && werner_err <= 1e-9,
        format!("bell {bell_err:.2e}; product max C {product_max:.2e}; werner {werner_err:.2e}"),
    )
}

fn criterion_8() -> Outcome {
    let mut rng = stream_rng(88, 0);
    let mut lowest = f64::INFINITY;
    for n in 0..10_000 {
        let rho = random_density(&mut rng, 1 + n % 4);
        let u = random_angles(&mut rng);
        match eval_functions(&rho, &u) {
            Ok(r) => lowest = lowest.min(r.f).min(r.g).min(r.h).min(r.k),
            Err(e) => return (false, e.to_string()),
        }
    }
    (
        lowest >= -1e-9,
        format!("min over f, g, h, k = {lowest:.3e} (tol -1e-9)"),
    )
}

fn criterion_9() -> Outcome {
    let set = observables();
    let s1 = |l: usize| kron(&pauli::XYZ[l], &pauli::ID).scale(0.5);
    let s2 = |l: usize| kron(&pauli::ID, &pauli::XYZ[l]).scale(0.5);
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        // [J_i, J_j] = (i/4)(S_1k + S_2k)
        let want = (s1(k) + s2(k)).scale_complex(I * 0.25);
        worst = worst.max(set.j[i].commutator(&set.j[j]).max_abs_diff(&want));
        // [K_i, K_j] = i K_k
        worst = worst.max(
            set.k[i]
                .commutator(&set.k[j])
                .max_abs_diff(&set.k[k].scale_complex(I)),
        );
        // K_l^2 = (1 + s_l (x) s_l) / 2
        let want = (Matrix4::identity() + kron(&pauli::XYZ[i], &pauli::XYZ[i])).scale(0.5);
        worst = worst.max((set.k[i] * set.k[i]).max_abs_diff(&want));
    }
    let mut rng = stream_rng(99, 0);
    let mut checked = 0;
    while checked < 200 {
        let v: [f64; 6] = std::array::from_fn(|_| rng.random_range(-1.0..=1.0));
        let p = SymmetricStateParams::from_array(v);
        let Ok(rho) = symmetric_state(p) else {
            continue;
        };
        checked += 1;
        let [a, b, t1, t2, t3, t4] = v;
        let t = [[t1, t2, t3], [t2, t1, t4], [t3, t4, t1]];
        for axis in PauliAxis::ALL {
            let i = axis.index();
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            let dj = (2.0 - 2.0 * t[i][i] - t[j][k].powi(2) + 2.0 * t[j][k] * t[k][j]
                - t[k][j].powi(2))
                / 16.0;
            let kk = set.k(axis);
            worst = worst
                .max((variance(set.j(axis), &rho).unwrap() - dj).abs())
                .max((expectation(kk, &rho).unwrap() - (a + b) / 2.0).abs())
                .max((expectation(&(*kk * *kk), &rho).unwrap() - (1.0 + t1) / 2.0).abs())
                .max((expectation(set.r(axis), &rho).unwrap() - (a + b) / 8.0).abs());
        }
    }
    (
        worst <= 1e-12,
        format!("max residual {worst:.2e} over operators and {checked} symmetric states"),
    )
}

fn criterion_10() -> Outcome {
    let mut rng = stream_rng(1010, 0);
    let mut states = vec![
        density_from_pure(&bell_state(FRAC_PI_4)),
        werner_state(WernerParams {
            alpha: FRAC_PI_4,
            eta: 0.5,
        })
        .unwrap(),
        equality_state(),
    ];
    for rank in 1..=4 {
        states.push(random_density(&mut rng, rank));
    }
    let mut exact_err: f64 = 0.0;
    for rho in &states {
        let back = reconstruct(&exact_counts(rho, 1)).unwrap();
        exact_err = exact_err.max(back.matrix().max_abs_diff(rho.matrix()));
    }

    let targets = [
        ("bell", density_from_pure(&bell_state(FRAC_PI_4))),
        (
            "werner",
            werner_state(WernerParams {
                alpha: FRAC_PI_4,
                eta: 0.5,
            })
            .unwrap(),
        ),
    ];
    let mut min_fid = f64::INFINITY;
    for (_, rho) in &targets {
        for trial in 0..50 {
            let rec = simulate_counts(rho, 100_000, 5000 + trial).unwrap();
            let f = fidelity(rho, &reconstruct(&rec).unwrap()).unwrap();
            min_fid = min_fid.min(f);
        }
    }

    let config = OptimizerConfig::default();
    let probe = werner_state(WernerParams {
        alpha: FRAC_PI_4,
        eta: 0.8,
    })
    .unwrap();
    let quantities = [Quantity::Concurrence, Quantity::JProductLhs];
    let at = |shots| {
        monte_carlo_errors(&probe, &quantities, Shots::Finite(shots), 400, 31, &config).unwrap()
    };
    let (low, high) = (at(10_000), at(40_000));
    let mut worst_scaling: f64 = 0.0;
    let mut ratios = Vec::new();
    for k in 0..quantities.len() {
        let ratio = low[k].1.std / high[k].1.std;
        worst_scaling = worst_scaling.max((ratio / 2.0 - 1.0).abs());
        ratios.push(format!("{} {ratio:.3}", quantities[k]));
    }
    (
        exact_err <= 1e-10 && min_fid >= 0.99 && worst_scaling <= 0.3,
        format!(
            "exact round trip {exact_err:.2e}; min fidelity {min_fid:.5} over 100 trials; std ratio at 4x shots: {} (expect 2 within 30%)",
            ratios.join(", ")
        ),
    )
}

/// Criteria whose published closed forms are not the maxima over the full
/// local-unitary family; they are reported as FAIL and do not fail the run
/// unless they unexpectedly pass.
const KNOWN_RED: [(usize, &str); 2] = [
    (4, "at C = 0 the full (theta, phi) family reaches f = 1/(6 sqrt6) > 3 sqrt2/64; the quoted value is the phi = 0 maximum"),
    (
        6,
        "the Werner k closed form omits the -(lambda/2) sum |<K>| penalty, so attainable maxima are lower for \
         alpha != 45 deg; f exceeds its curve at alpha = 0, 90 deg for the same reason as criterion 4",
    ),
];

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("tight-constant attainment", criterion_1),
        ("tightness scan", criterion_2),
        ("equality of both sides", criterion_3),
        ("optimizer vs analytic maxima", criterion_4),
        ("h cross-validation", criterion_5),
        ("Werner curves", criterion_6),
        ("concurrence", criterion_7),
        ("non-negativity sweep", criterion_8),
        ("algebraic identities", criterion_9),
        ("tomography round trip", criterion_10),
    ];
    let filter: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut unexpected = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let id = n + 1;
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let (ok, detail) = run();
        let secs = start.elapsed().as_secs_f64();
        println!(
            "criterion {id:>2} {} {name}: {detail} [{secs:.1}s]",
            if ok { "PASS" } else { "FAIL" }
        );
        match (ok, KNOWN_RED.iter().find(|(k, _)| *k == id)) {
            (false, Some((_, why))) => println!("             known red: {why}"),
            (false, None) => unexpected += 1,
            (true, Some(_)) => {
                println!("             listed as known red but passed; update the list");
                unexpected += 1;
            }
            (true, None) => {}
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{unexpected} unexpected criterion outcomes");
        ExitCode::FAILURE
    }
}
