use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context as _, Result};
use serde_json::json;

use tur_core::entanglement::{
    bell_concurrence, concurrence as wootters, curve_f_of_c, curve_f_werner, curve_g_of_c,
    curve_g_werner, curve_k_of_c, curve_k_werner, werner_concurrence,
};
use tur_core::io::{format_sig, read_density, write_counts, write_density};
use tur_core::optimizer::maximize;
use tur_core::states::{
    bell_state, density_from_pure, equality_state, werner_state, DensityMatrix, WernerParams,
};
use tur_core::tightness::{scan_forms, verify_equality_transform};
use tur_core::tomography::{
    exact_counts, monte_carlo_errors, run_tomography, simulate_counts, Quantity, Shots,
};
use tur_core::uncertainty::{eval_functions, LocalUnitaryParams, RatioForm, UncertaintyFunction};
use tur_core::LAMBDA;

use crate::settings::Settings;
use crate::{ConcurrenceArgs, GridArgs, ScanArgs, SweepArgs, TomoArgs, VerifyArgs};

/// Messages for validations that did not hold; empty means success.
pub type Failures = Vec<String>;

pub struct Context {
    pub settings: Settings,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

const CONCURRENCE_TOL: f64 = 1e-9;
const EQUALITY_TOL: f64 = 1e-12;
const SCAN_TOL: f64 = 1e-9;
const EXACT_FIDELITY_TOL: f64 = 1e-9;

impl Context {
    fn seed(&self) -> Result<u64> {
        self.settings.get_or(self.seed, "seed", 0)
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => write_file(path, text),
            None => std::io::stdout()
                .write_all(text.as_bytes())
                .context("writing to stdout"),
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// CSV with a fixed header; numbers use [`format_sig`], `None` is left blank.
struct Table {
    text: String,
    width: usize,
}

impl Table {
    fn new(header: &[String]) -> Self {
        Self {
            text: format!("{}\n", header.join(",")),
            width: header.len(),
        }
    }

    fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.width);
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }
}

fn num(x: f64) -> String {
    format_sig(x)
}

fn opt(x: Option<f64>) -> String {
    x.map(format_sig).unwrap_or_default()
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Family {
    Bell,
    Werner(f64),
}

impl Family {
    fn state(self, alpha: f64) -> Result<DensityMatrix> {
        Ok(match self {
            Family::Bell => density_from_pure(&bell_state(alpha)),
            Family::Werner(eta) => werner_state(WernerParams { alpha, eta })?,
        })
    }

    fn concurrence(self, alpha: f64) -> Result<f64> {
        Ok(match self {
            Family::Bell => bell_concurrence(alpha),
            Family::Werner(eta) => werner_concurrence(alpha, eta)?,
        })
    }

    /// Closed-form maximum, `None` for `h`.
    fn curve(self, func: UncertaintyFunction, alpha: f64) -> Result<Option<f64>> {
        let c = bell_concurrence(alpha);
        let value = match (self, func) {
            (_, UncertaintyFunction::H) => return Ok(None),
            (Family::Bell, UncertaintyFunction::F) => curve_f_of_c(c)?,
            (Family::Bell, UncertaintyFunction::G) => curve_g_of_c(c)?,
            (Family::Bell, UncertaintyFunction::K) => curve_k_of_c(c)?,
            (Family::Werner(eta), UncertaintyFunction::F) => curve_f_werner(alpha, eta)?,
            (Family::Werner(eta), UncertaintyFunction::G) => curve_g_werner(alpha, eta)?,
            (Family::Werner(eta), UncertaintyFunction::K) => curve_k_werner(alpha, eta)?,
        };
        Ok(Some(value))
    }
}

fn family(settings: &Settings, name: Option<String>, eta: Option<f64>) -> Result<Family> {
    let name = settings.get_or(name, "family", "bell".to_string())?;
    match name.trim().to_ascii_lowercase().as_str() {
        "bell" => Ok(Family::Bell),
        "werner" => {
            let eta = settings
                .get(eta, "eta")?
                .ok_or_else(|| anyhow!("the werner family needs --eta"))?;
            if !(0.0..=1.0).contains(&eta) {
                bail!("eta must lie in [0, 1], got {eta}");
            }
            Ok(Family::Werner(eta))
        }
        other => bail!("unknown family '{other}' (expected bell or werner)"),
    }
}

/// Grid points in degrees, `start, start + step, ...` up to `stop`.
fn alpha_grid(settings: &Settings, grid: &GridArgs) -> Result<Vec<f64>> {
    let start = settings.get_or(grid.alpha_start, "alpha-start", 0.0)?;
    let stop = settings.get_or(grid.alpha_stop, "alpha-stop", 90.0)?;
    let step = settings.get_or(grid.alpha_step, "alpha-step", 5.0)?;
    if !(step > 0.0 && step.is_finite()) {
        bail!("alpha-step must be positive, got {step}");
    }
    if !(start.is_finite() && stop.is_finite()) || stop < start {
        bail!("empty alpha grid: start {start}, stop {stop}");
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| start + step * i as f64).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Column {
    Max(UncertaintyFunction),
    Concurrence,
}

fn sweep_columns(list: &str) -> Result<Vec<Column>> {
    let mut columns = Vec::new();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let column = match item {
            "C" | "c" => Column::Concurrence,
            other => Column::Max(other.parse()?),
        };
        if columns.contains(&column) {
            bail!("function '{item}' listed twice");
        }
        columns.push(column);
    }
    if columns.is_empty() {
        bail!("no functions requested");
    }
    Ok(columns)
}

pub fn sweep(ctx: &Context, args: &SweepArgs) -> Result<Failures> {
    let s = &ctx.settings;
    let family = family(s, args.grid.family.clone(), args.grid.eta)?;
    let grid = alpha_grid(s, &args.grid)?;
    let columns =
        sweep_columns(&s.get_or(args.functions.clone(), "functions", "f,g,h,k,C".into())?)?;
    let config = s.optimizer(ctx.seed)?;

    let mut header = vec!["alpha_deg".to_string()];
    for c in &columns {
        match c {
            Column::Max(f) => header.extend([
                format!("{f}_max"),
                format!("{f}_analytic"),
                format!("{f}_absdiff"),
            ]),
            Column::Concurrence => header.extend(
                [
                    "concurrence",
                    "concurrence_analytic",
                    "concurrence_absdiff",
                    "lambda_signed",
                ]
                .map(String::from),
            ),
        }
    }
    let mut table = Table::new(&header);
    let mut failures = Failures::new();
    for deg in grid {
        let alpha = deg.to_radians();
        let rho = family.state(alpha)?;
        let mut cells = vec![num(deg)];
        for c in &columns {
            match *c {
                Column::Max(f) => {
                    let best = maximize(&rho, f, &config)
                        .with_context(|| format!("maximizing {f} at alpha = {deg} deg"))?
                        .best_value;
                    let curve = family.curve(f, alpha)?;
                    cells.extend([num(best), opt(curve), opt(curve.map(|v| (best - v).abs()))]);
                }
                Column::Concurrence => {
                    let c = wootters(&rho)?;
                    let analytic = family.concurrence(alpha)?;
                    let diff = (c.concurrence - analytic).abs();
                    if diff > CONCURRENCE_TOL {
                        failures.push(format!("concurrence at {deg} deg off by {diff:e}"));
                    }
                    cells.extend([
                        num(c.concurrence),
                        num(analytic),
                        num(diff),
                        num(c.lambda_signed),
                    ]);
                }
            }
        }
        table.row(cells);
    }
    ctx.emit(&table.text)?;
    Ok(failures)
}

pub fn scan_lambda(ctx: &Context, args: &ScanArgs) -> Result<Failures> {
    let s = &ctx.settings;
    let form = s.get_or(args.form.clone(), "form", "all".into())?;
    let forms: Vec<RatioForm> = if form.trim().eq_ignore_ascii_case("all") {
        RatioForm::ALL.to_vec()
    } else {
        vec![form.parse()?]
    };
    let samples = s.get_or(args.samples, "samples", 100_000)?;
    let dump = s.switch(args.dump_samples, "dump-samples")?;
    let histogram = s.get(args.histogram.clone(), "histogram")?;
    let results = scan_forms(&forms, samples, ctx.seed()?, dump)?;

    let mut failures = Failures::new();
    for r in &results {
        if r.min_ratio < LAMBDA - SCAN_TOL {
            failures.push(format!("{} ratio {} below 2/sqrt3", r.form, r.min_ratio));
        }
    }

    let param_names = ["a", "b", "t1", "t2", "t3", "t4"];
    let text = if dump {
        let mut header = vec!["form".to_string()];
        header.extend(param_names.map(String::from));
        header.push("ratio".into());
        let mut table = Table::new(&header);
        for r in &results {
            for (p, ratio) in r.samples.as_deref().unwrap_or_default() {
                let mut cells = vec![r.form.to_string()];
                cells.extend(p.as_array().map(num));
                cells.push(num(*ratio));
                table.row(cells);
            }
        }
        table.text
    } else {
        let mut header: Vec<String> = [
            "form",
            "samples_drawn",
            "samples_accepted",
            "samples_rejected",
            "min_ratio",
            "min_ratio_minus_lambda",
        ]
        .map(String::from)
        .to_vec();
        header.extend(param_names.map(|p| format!("argmin_{p}")));
        let mut table = Table::new(&header);
        for r in &results {
            let mut cells = vec![
                r.form.to_string(),
                samples.to_string(),
                r.samples_accepted.to_string(),
                r.samples_rejected.to_string(),
                num(r.min_ratio),
                num(r.min_ratio - LAMBDA),
            ];
            cells.extend(r.argmin_params.as_array().map(num));
            table.row(cells);
        }
        table.text
    };
    ctx.emit(&text)?;

    if let Some(path) = histogram {
        let header = ["form", "bin_lo", "bin_hi", "count"].map(String::from);
        let mut table = Table::new(&header);
        for r in &results {
            let h = &r.histogram;
            for (i, count) in h.counts.iter().enumerate() {
                table.row(vec![
                    r.form.to_string(),
                    num(h.edges[i]),
                    num(h.edges[i + 1]),
                    count.to_string(),
                ]);
            }
        }
        write_file(&path, &table.text)?;
    }
    Ok(failures)
}

fn positive_shots(shots: u64) -> Result<u64> {
    if shots == 0 {
        bail!("shots must be at least 1");
    }
    Ok(shots)
}

pub fn verify_equality(ctx: &Context, args: &VerifyArgs) -> Result<Failures> {
    let s = &ctx.settings;
    let rho = equality_state();
    let report = eval_functions(&rho, &LocalUnitaryParams::identity())?;
    let (lhs, rhs) = (report.j_product_lhs(), report.j_product_rhs());
    let closed = (1.0f64 / 12.0).powf(1.5);
    let transform = verify_equality_transform()?;

    let mut rows: Vec<(&str, f64)> = vec![
        ("lhs", lhs),
        ("rhs", rhs),
        ("abs_diff", (lhs - rhs).abs()),
        ("closed_form", closed),
        ("transform_deviation", transform.deviation),
        ("transform_fidelity", transform.fidelity),
    ];
    if let Some(shots) = s.get(args.shots, "shots")? {
        let shots = positive_shots(shots)?;
        let resamples = s.get_or(args.resamples, "resamples", 100)?;
        let bars = monte_carlo_errors(
            &rho,
            &[Quantity::JProductLhs, Quantity::JProductRhs],
            Shots::Finite(shots),
            resamples,
            ctx.seed()?,
            &s.optimizer(ctx.seed)?,
        )?;
        rows.extend([
            ("lhs_mc_mean", bars[0].1.mean),
            ("lhs_mc_std", bars[0].1.std),
            ("rhs_mc_mean", bars[1].1.mean),
            ("rhs_mc_std", bars[1].1.std),
            ("shots", shots as f64),
            ("resamples", resamples as f64),
        ]);
    }

    let mut failures = Failures::new();
    if (lhs - rhs).abs() > EQUALITY_TOL {
        failures.push(format!("lhs and rhs differ by {:e}", (lhs - rhs).abs()));
    }
    if (lhs - closed).abs() > EQUALITY_TOL {
        failures.push(format!(
            "lhs differs from (1/12)^(3/2) by {:e}",
            (lhs - closed).abs()
        ));
    }
    if transform.deviation > EQUALITY_TOL || (transform.fidelity - 1.0).abs() > EQUALITY_TOL {
        failures.push(format!(
            "local transform misses |00>: deviation {:e}",
            transform.deviation
        ));
    }

    let text = if s.switch(args.json, "json")? {
        let mut map = serde_json::Map::new();
        for (k, v) in &rows {
            map.insert(k.to_string(), json!(v));
        }
        map.insert("valid".into(), json!(failures.is_empty()));
        format!("{}\n", serde_json::to_string_pretty(&map)?)
    } else {
        let mut table = Table::new(&["quantity".into(), "value".into()]);
        for (k, v) in rows {
            table.row(vec![k.to_string(), num(v)]);
        }
        table.text
    };
    ctx.emit(&text)?;
    Ok(failures)
}

fn tomo_quantities(list: &str) -> Result<Vec<Quantity>> {
    let mut out = Vec::new();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let q = match item {
            "C" | "c" => Quantity::Concurrence,
            "f" | "g" | "h" | "k" | "F" | "G" | "H" | "K" => Quantity::Max(item.parse()?),
            other => other.parse()?,
        };
        if out.contains(&q) {
            bail!("quantity '{item}' listed twice");
        }
        out.push(q);
    }
    if out.is_empty() {
        bail!("no quantities requested");
    }
    Ok(out)
}

pub fn tomo(ctx: &Context, args: &TomoArgs) -> Result<Failures> {
    let s = &ctx.settings;
    let family = family(s, args.family.clone(), args.eta)?;
    let deg = s.get_or(args.alpha, "alpha", 45.0)?;
    let rho = family.state(deg.to_radians())?;
    let exact = s.switch(args.exact, "exact")?;
    let shots = if exact {
        Shots::Exact
    } else {
        Shots::Finite(positive_shots(s.get_or(args.shots, "shots", 10_000)?)?)
    };
    let resamples = s.get_or(args.resamples, "resamples", 100)?;
    let quantities = tomo_quantities(&s.get_or(
        args.functions.clone(),
        "functions",
        "C,j_product_lhs,j_product_rhs".into(),
    )?)?;
    let seed = ctx.seed()?;
    let config = s.optimizer(ctx.seed)?;
    let result = run_tomography(&rho, &quantities, shots, resamples, seed, &config)?;

    let mut table =
        Table::new(&["quantity", "truth", "reconstructed", "mc_mean", "mc_std"].map(String::from));
    table.row(vec![
        "fidelity".into(),
        num(1.0),
        num(result.fidelity_vs_truth),
        String::new(),
        String::new(),
    ]);
    for (q, bar) in &result.error_bars {
        table.row(vec![
            q.name(),
            num(q.evaluate(&rho, &config)?),
            num(q.evaluate(&result.rho_hat, &config)?),
            num(bar.mean),
            num(bar.std),
        ]);
    }
    ctx.emit(&table.text)?;

    if let Some(path) = s.get(args.rho_out.clone(), "rho-out")? {
        write_file(&path, &write_density(result.rho_hat.matrix()))?;
    }
    if let Some(path) = s.get(args.counts_out.clone(), "counts-out")? {
        let records = match shots {
            Shots::Finite(n) => simulate_counts(&rho, n, seed)?,
            Shots::Exact => exact_counts(&rho, 1),
        };
        write_file(&path, &write_counts(&records))?;
    }

    let mut failures = Failures::new();
    if exact && (result.fidelity_vs_truth - 1.0).abs() > EXACT_FIDELITY_TOL {
        failures.push(format!(
            "exact reconstruction fidelity {}",
            result.fidelity_vs_truth
        ));
    }
    Ok(failures)
}

pub fn concurrence(ctx: &Context, args: &ConcurrenceArgs) -> Result<Failures> {
    let s = &ctx.settings;
    let header = [
        "alpha_deg",
        "concurrence",
        "lambda_signed",
        "sqrt_eig_1",
        "sqrt_eig_2",
        "sqrt_eig_3",
        "sqrt_eig_4",
        "concurrence_analytic",
        "concurrence_absdiff",
    ]
    .map(String::from);
    let mut table = Table::new(&header);
    let mut failures = Failures::new();

    if let Some(path) = s.get(args.rho.clone(), "rho")? {
        let text = std::fs::read_to_string(&path)
            .with_context(|| format!("reading {}", path.display()))?;
        let rho = read_density(&text).with_context(|| format!("parsing {}", path.display()))?;
        let c = wootters(&rho)?;
        let mut cells = vec![String::new(), num(c.concurrence), num(c.lambda_signed)];
        cells.extend(c.spectrum.map(num));
        cells.extend([String::new(), String::new()]);
        table.row(cells);
    } else {
        let family = family(s, args.grid.family.clone(), args.grid.eta)?;
        for deg in alpha_grid(s, &args.grid)? {
            let alpha = deg.to_radians();
            let c = wootters(&family.state(alpha)?)?;
            let analytic = family.concurrence(alpha)?;
            let diff = (c.concurrence - analytic).abs();
            if diff > CONCURRENCE_TOL {
                failures.push(format!("concurrence at {deg} deg off by {diff:e}"));
            }
            let mut cells = vec![num(deg), num(c.concurrence), num(c.lambda_signed)];
            cells.extend(c.spectrum.map(num));
            cells.extend([num(analytic), num(diff)]);
            table.row(cells);
        }
    }
    ctx.emit(&table.text)?;
    Ok(failures)
}
