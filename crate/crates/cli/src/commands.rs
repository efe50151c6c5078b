//! Subcommand implementations. Each returns the rendered output body.

use std::path::PathBuf;
use std::time::Instant;

use bdqw_core::ctqw::{factorized_transition_table, spectra_for, transition_row_1d};
use bdqw_core::{
    build_conditional_matrix, convolve_sum, clt_distance, detailed_balance_defect, moments,
    orthogonality_defect, position_distribution, propagator, stationarity_defect,
    stationary_distribution, transition_prob_dense, transition_prob_factorized, DenseOracle,
    MultiChainSpec, SpectralData,
};
use serde::Serialize;
use serde_json::json;

use crate::config::{resolve_cap, validate_times, ExperimentConfig, Format};
use crate::error::{CliError, CliResult};
use crate::output::{num, Csv};
use crate::CommonArgs;

/// Defect threshold for `verify`.
pub const VERIFY_TOLERANCE: f64 = 1e-10;

/// Minimum timing repetitions for `bench`.
pub const MIN_REPETITIONS: usize = 5;

const CLT_TIME_READING: &str =
    "T is the elapsed time of each of the d iid one-dimensional walks (no 1/d rescaling)";

/// A loaded config with command-line overrides applied.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub spec: MultiChainSpec,
    pub times: Vec<f64>,
    pub cap: usize,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub dense: bool,
}

impl Experiment {
    pub fn load(args: &CommonArgs) -> CliResult<Self> {
        Self::from_config(ExperimentConfig::load(&args.config)?, args)
    }

    pub fn from_config(config: ExperimentConfig, args: &CommonArgs) -> CliResult<Self> {
        let spec = config.to_spec()?;
        let times = match &args.time {
            Some(ts) => {
                validate_times(ts, "--time")?;
                ts.clone()
            }
            None => config.times()?,
        };
        let from_file = config.output.as_ref();
        Ok(Self {
            cap: resolve_cap(args.oracle_cap, &config),
            format: args.format.or(from_file.and_then(|o| o.format)),
            output: args.output.clone().or(from_file.and_then(|o| o.path.clone())),
            dense: args.dense,
            spec,
            times,
            config,
        })
    }

    fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

fn core_err(context: &'static str) -> impl Fn(bdqw_core::Error) -> CliError {
    move |e| CliError::from_core(context, e)
}

fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Runtime(format!("cannot serialize output: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn max_abs_diff(a: &bdqw_core::ndarray::Array2<f64>, b: &bdqw_core::ndarray::Array2<f64>) -> f64 {
    a.iter().zip(b.iter()).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

pub fn simulate(exp: &Experiment) -> CliResult<String> {
    let spec = &exp.spec;
    let spectra = spectra_for(spec).map_err(core_err("dims"))?;
    let initial = exp.config.initial(spec)?;
    let oracle = if exp.dense {
        Some(DenseOracle::new(spec, exp.cap).map_err(core_err("dense"))?)
    } else {
        None
    };
    let space = spec.space();

    let mut results = Vec::with_capacity(exp.times.len());
    for &t in &exp.times {
        let mut joint = position_distribution(spec, &spectra, t, &initial).map_err(core_err("simulate"))?;
        if let Some(oracle) = &oracle {
            let dense = oracle
                .position_distribution(t, &initial)
                .map_err(core_err("dense"))?;
            joint = joint.with_dense(dense).map_err(core_err("dense"))?;
        }
        results.push((t, joint));
    }

    match exp.format_or(Format::Csv) {
        Format::Csv => {
            let mut csv = Csv::with_header(&["time", "dimension", "position", "probability"]);
            for (t, joint) in &results {
                for (i, factor) in joint.factors().iter().enumerate() {
                    for (k, p) in factor.as_slice().iter().enumerate() {
                        csv.row([num(*t), (i + 1).to_string(), k.to_string(), num(*p)]);
                    }
                }
                if let Some(dense) = joint.dense() {
                    for (flat, p) in dense.as_slice().iter().enumerate() {
                        let pos: Vec<String> = space.decode(flat).iter().map(usize::to_string).collect();
                        csv.row([num(*t), "joint".into(), pos.join(":"), num(*p)]);
                    }
                }
            }
            Ok(csv.into_string())
        }
        Format::Json => {
            let entries: Vec<_> = results
                .iter()
                .map(|(t, joint)| {
                    let marginals: Vec<&[f64]> = joint.factors().iter().map(|f| f.as_slice()).collect();
                    let mut entry = json!({ "time": t, "marginals": marginals });
                    if let Some(dense) = joint.dense() {
                        entry["joint"] = json!(dense.as_slice());
                    }
                    entry
                })
                .collect();
            to_json(&json!({
                "initial": initial,
                "select_prob": spec.select_prob(),
                "joint_order": "mixed radix, dimension 1 most significant",
                "results": entries,
            }))
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    /// Max |factorized - dense| over all basis pairs and times.
    pub theorem1_max_abs_err: f64,
    pub orthogonality_defect: f64,
    pub unitarity_defect: f64,
    pub detailed_balance_defect: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub product_size: usize,
    pub times: Vec<f64>,
}

pub fn verification_report(exp: &Experiment) -> CliResult<VerifyReport> {
    let spec = &exp.spec;
    let size = spec.space().check_cap(exp.cap).map_err(core_err("verify"))?;
    let spectra = spectra_for(spec).map_err(core_err("dims"))?;
    let oracle = DenseOracle::new(spec, exp.cap).map_err(core_err("dense"))?;

    let mut factorization: f64 = 0.0;
    let mut unitarity = oracle.orthonormality_defect();
    for &t in &exp.times {
        let fact = factorized_transition_table(spec, &spectra, t, exp.cap).map_err(core_err("verify"))?;
        factorization = factorization.max(max_abs_diff(&fact, &oracle.transition_table(t)));
        unitarity = unitarity.max(oracle.propagator(t).unitarity_defect());
        for (s, &q) in spectra.iter().zip(spec.select_prob()) {
            unitarity = unitarity.max(propagator(s, q * t).unitarity_defect());
        }
    }

    let orthogonality = orthogonality_defect(&spectra, exp.cap).map_err(core_err("verify"))?;
    let balance = spec
        .dims()
        .iter()
        .map(|d| {
            let m = build_conditional_matrix(d);
            let pi = stationary_distribution(&m);
            detailed_balance_defect(&m, &pi).max(stationarity_defect(&m, &pi))
        })
        .fold(0.0, f64::max);

    let passed = [factorization, orthogonality, unitarity, balance]
        .iter()
        .all(|&x| x <= VERIFY_TOLERANCE);
    Ok(VerifyReport {
        theorem1_max_abs_err: factorization,
        orthogonality_defect: orthogonality,
        unitarity_defect: unitarity,
        detailed_balance_defect: balance,
        tolerance: VERIFY_TOLERANCE,
        passed,
        product_size: size,
        times: exp.times.clone(),
    })
}

/// Renders the report; the second value is the exit status to report.
pub fn verify(exp: &Experiment) -> CliResult<(String, CliResult<()>)> {
    let report = verification_report(exp)?;
    let body = match exp.format_or(Format::Json) {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let mut csv = Csv::with_header(&["metric", "value"]);
            for (name, value) in [
                ("theorem1_max_abs_err", report.theorem1_max_abs_err),
                ("orthogonality_defect", report.orthogonality_defect),
                ("unitarity_defect", report.unitarity_defect),
                ("detailed_balance_defect", report.detailed_balance_defect),
                ("tolerance", report.tolerance),
            ] {
                csv.row([name.to_string(), num(value)]);
            }
            csv.row(["passed".to_string(), report.passed.to_string()]);
            csv.into_string()
        }
    };
    let status = if report.passed {
        Ok(())
    } else {
        Err(CliError::VerificationFailed(format!(
            "at least one defect exceeds {VERIFY_TOLERANCE:e}"
        )))
    };
    Ok((body, status))
}

fn single_dimension<'a>(exp: &'a Experiment, command: &str) -> CliResult<&'a bdqw_core::DimensionSpec> {
    match exp.spec.dims() {
        [dim] => Ok(dim),
        dims => Err(CliError::Config(format!(
            "dims: {command} replicates a single dimension, got {}",
            dims.len()
        ))),
    }
}

fn d_sweep(exp: &Experiment) -> CliResult<Vec<usize>> {
    let sweep = exp
        .config
        .d_sweep
        .clone()
        .ok_or_else(|| CliError::Config("d_sweep: required for this command".into()))?;
    if sweep.is_empty() || sweep.contains(&0) {
        return Err(CliError::Config(
            "d_sweep: must be a non-empty list of positive integers".into(),
        ));
    }
    Ok(sweep)
}

#[derive(Debug, Clone, Serialize)]
pub struct CltRow {
    pub d: usize,
    pub kolmogorov_distance: f64,
}

pub fn clt_rows(exp: &Experiment) -> CliResult<(f64, Vec<CltRow>)> {
    let dim = single_dimension(exp, "clt")?;
    let sweep = d_sweep(exp)?;
    let horizon = match exp.times[..] {
        [t] => t,
        _ => return Err(CliError::Config("time: clt expects a single time T".into())),
    };
    let start = exp.config.initial(&exp.spec)?[0];
    let s = SpectralData::for_dimension(dim).map_err(core_err("dims[0]"))?;
    let law = transition_row_1d(&s, horizon, start).map_err(core_err("clt"))?;
    let (_, variance) = moments(&law);
    if variance.is_nan() || variance <= 1e-14 {
        return Err(CliError::Config(format!(
            "time: per-factor variance is zero at T = {horizon}; standardization is degenerate"
        )));
    }
    let rows = sweep
        .iter()
        .map(|&d| {
            let sum = convolve_sum(&vec![law.clone(); d]).map_err(core_err("clt"))?;
            let dist = clt_distance(&sum, d).map_err(core_err("clt"))?;
            Ok(CltRow { d, kolmogorov_distance: dist })
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok((horizon, rows))
}

pub fn strictly_decreasing(rows: &[CltRow]) -> bool {
    rows.windows(2)
        .all(|w| w[1].kolmogorov_distance < w[0].kolmogorov_distance)
}

pub fn clt(exp: &Experiment) -> CliResult<String> {
    let (horizon, rows) = clt_rows(exp)?;
    let monotone = strictly_decreasing(&rows);
    match exp.format_or(Format::Csv) {
        Format::Csv => {
            let mut csv = Csv::default();
            csv.comment(&format!("{CLT_TIME_READING}; T = {}", num(horizon)));
            csv.row(["d".to_string(), "kolmogorov_distance".to_string()]);
            for r in &rows {
                csv.row([r.d.to_string(), num(r.kolmogorov_distance)]);
            }
            csv.comment(&format!("monotone_decreasing,{monotone}"));
            Ok(csv.into_string())
        }
        Format::Json => to_json(&json!({
            "T": horizon,
            "time_reading": CLT_TIME_READING,
            "rows": rows,
            "monotone_decreasing": monotone,
        })),
    }
}

fn median_ms(reps: usize, mut f: impl FnMut() -> CliResult<()>) -> CliResult<f64> {
    let mut samples = Vec::with_capacity(reps);
    for _ in 0..reps {
        let start = Instant::now();
        f()?;
        samples.push(start.elapsed().as_secs_f64() * 1e3);
    }
    samples.sort_by(f64::total_cmp);
    let mid = samples.len() / 2;
    Ok(if samples.len() % 2 == 1 {
        samples[mid]
    } else {
        0.5 * (samples[mid - 1] + samples[mid])
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub d: usize,
    pub product_size: usize,
    /// `None` when the product space exceeds the oracle cap.
    pub dense_ms: Option<f64>,
    pub factorized_ms: f64,
}

impl BenchRow {
    pub fn speedup(&self) -> Option<f64> {
        self.dense_ms.map(|d| d / self.factorized_ms.max(1e-9))
    }
}

pub fn bench_rows(exp: &Experiment) -> CliResult<Vec<BenchRow>> {
    let dim = single_dimension(exp, "bench")?;
    let sweep = d_sweep(exp)?;
    let t = exp.times[0];
    let reps = exp.config.repetitions.unwrap_or(MIN_REPETITIONS).max(MIN_REPETITIONS);
    sweep
        .iter()
        .map(|&d| {
            let spec = MultiChainSpec::uniform(vec![dim.clone(); d]).map_err(core_err("bench"))?;
            let start = vec![0; d];
            let target = vec![dim.size(); d];
            let product_size = spec.space().len();
            let factorized_ms = median_ms(reps, || {
                let spectra = spectra_for(&spec).map_err(core_err("bench"))?;
                transition_prob_factorized(&spec, &spectra, t, &start, &target).map_err(core_err("bench"))?;
                Ok(())
            })?;
            let dense_ms = if product_size <= exp.cap {
                Some(median_ms(reps, || {
                    transition_prob_dense(&spec, t, &start, &target, exp.cap).map_err(core_err("bench"))?;
                    Ok(())
                })?)
            } else {
                None
            };
            Ok(BenchRow { d, product_size, dense_ms, factorized_ms })
        })
        .collect()
}

pub fn bench(exp: &Experiment) -> CliResult<String> {
    let rows = bench_rows(exp)?;
    let largest_dense = rows
        .iter()
        .filter(|r| r.dense_ms.is_some())
        .max_by_key(|r| r.product_size);
    let speedup = largest_dense.and_then(BenchRow::speedup);
    let flag = speedup.map(|s| s >= 10.0);
    match exp.format_or(Format::Csv) {
        Format::Csv => {
            let mut csv = Csv::with_header(&["d", "product_size", "dense_ms", "factorized_ms", "speedup"]);
            for r in &rows {
                csv.row([
                    r.d.to_string(),
                    r.product_size.to_string(),
                    r.dense_ms.map_or("skipped".into(), num),
                    num(r.factorized_ms),
                    r.speedup().map_or("skipped".into(), num),
                ]);
            }
            if let (Some(row), Some(s)) = (largest_dense, speedup) {
                csv.comment(&format!(
                    "speedup_at_largest_dense,{},{},speedup_at_least_10,{}",
                    row.product_size,
                    num(s),
                    s >= 10.0
                ));
            }
            Ok(csv.into_string())
        }
        Format::Json => to_json(&json!({
            "rows": rows,
            "speedup_at_largest_dense": speedup,
            "speedup_at_least_10": flag,
        })),
    }
}

pub fn dump_spectrum(exp: &Experiment) -> CliResult<String> {
    let spectra = spectra_for(&exp.spec).map_err(core_err("dims"))?;
    match exp.format_or(Format::Json) {
        Format::Json => {
            let entries: Vec<_> = spectra
                .iter()
                .zip(exp.spec.dims())
                .enumerate()
                .map(|(i, (s, d))| json!({ "dimension": i + 1, "size": d.size(), "spectrum": s }))
                .collect();
            to_json(&entries)
        }
        Format::Csv => {
            let mut csv = Csv::with_header(&["dimension", "index", "eigenvalue", "weight"]);
            for (i, s) in spectra.iter().enumerate() {
                for (l, (lam, w)) in s.eigenvalues().iter().zip(s.weights()).enumerate() {
                    csv.row([(i + 1).to_string(), l.to_string(), num(*lam), num(*w)]);
                }
            }
            Ok(csv.into_string())
        }
    }
}

pub fn dump_config(exp: &Experiment) -> CliResult<String> {
    if exp.format == Some(Format::Csv) {
        return Err(CliError::Config("format: dump-config only emits json".into()));
    }
    let mut normalized = exp.config.normalized()?;
    normalized.time = crate::config::Times::List(exp.times.clone());
    to_json(&normalized)
}
