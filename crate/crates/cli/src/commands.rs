use std::fs;
use std::path::Path;

use mdlvol_core::capacity::{capacity_limit, capacity_mc};
use mdlvol_core::experiments::{
    format_float, kfold_curve, mdl_lattice_curve, risk_chart, write_risk_csv, ExperimentConfig,
    LineChart, MdlCase, MdlCurveConfig, Series,
};
use mdlvol_core::lattice::{lattice_log_volume_mc, Lattice, LatticeSpec};
use mdlvol_core::perceptron::{self, perceptron_log_volume, PerceptronSpec};
use mdlvol_core::regression::{
    classical_regime_bound, log_volume, mdl_upper_bound, mean_regularized_log_volume,
    modern_regime_bound, regularized_log_volume, DesignMatrix, RegressionModelSpec,
};
use mdlvol_core::RngStream;
use serde::{Deserialize, Serialize};

use crate::args::{
    CapacityArgs, DoubleDescentArgs, LatticeArgs, MdlCurveArgs, PerceptronArgs, RegressionArgs,
};
use crate::report::{load_config, Failure, RunResult, Sink};

/// The effective config of a finished run, echoed into its manifest.
pub struct Echo {
    pub config: serde_json::Value,
    pub seed: u64,
}

impl Echo {
    fn of<T: Serialize>(config: &T, seed: u64) -> Self {
        Self {
            config: serde_json::to_value(config).expect("config serializes"),
            seed,
        }
    }
}

fn set<T>(slot: &mut T, flag: Option<T>) {
    if let Some(v) = flag {
        *slot = v;
    }
}

fn set_list<T>(slot: &mut Vec<T>, flag: Vec<T>) {
    if !flag.is_empty() {
        *slot = flag;
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

/// Stream for one grid cell, keyed by its coordinates rather than its
/// position so that adding cells leaves the others unchanged.
fn cell_stream(seed: u64, keys: &[u64]) -> RngStream {
    keys.iter().fold(RngStream::new(seed), |s, &k| s.child(k))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CapacityConfig {
    pub d: Vec<usize>,
    pub n: Vec<usize>,
    pub snr: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
}

impl Default for CapacityConfig {
    fn default() -> Self {
        Self {
            d: vec![1, 2, 5, 10, 20],
            n: vec![5],
            snr: vec![1.0, 10.0, 100.0],
            samples: 2000,
            seed: 0,
        }
    }
}

pub fn capacity(args: CapacityArgs, sink: &Sink) -> RunResult<Echo> {
    let mut cfg: CapacityConfig = load_config(args.common.config.as_deref())?;
    set_list(&mut cfg.d, args.d);
    set_list(&mut cfg.n, args.n);
    set_list(&mut cfg.snr, args.snr);
    set(&mut cfg.samples, args.samples);
    set(&mut cfg.seed, args.common.seed);

    let mut rows = Vec::new();
    let mut series = Vec::new();
    for &n in &cfg.n {
        for &snr in &cfg.snr {
            let mut points = Vec::new();
            for &d in &cfg.d {
                let rng = cell_stream(cfg.seed, &[d as u64, n as u64, snr.to_bits()]);
                let c = capacity_mc(d, n, snr, cfg.samples, &rng)?;
                rows.push(vec![
                    d.to_string(),
                    n.to_string(),
                    format_float(snr),
                    format_float(c.value),
                    format_float(c.stderr),
                    format_float(c.lower_bound),
                    format_float(c.upper_bound),
                    format_float(capacity_limit(n, snr)),
                ]);
                points.push((d as f64, c.value));
            }
            series.push(Series {
                label: format!("N={n} SNR={snr}"),
                points,
            });
        }
    }
    sink.csv(
        "capacity",
        &["d", "n", "snr", "estimate", "stderr", "lower", "upper", "limit"],
        rows,
    )?;
    if args.common.svg {
        sink.svg(
            "capacity",
            &LineChart {
                title: "Channel capacity".into(),
                x_label: "D".into(),
                y_label: "capacity (nats)".into(),
                log_y: false,
                series,
            },
        )?;
    }
    Ok(Echo::of(&cfg, cfg.seed))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegressionConfig {
    pub d: Vec<usize>,
    pub n: Vec<usize>,
    pub power: f64,
    pub noise_var: f64,
    pub samples: usize,
    pub regularize: bool,
    pub seed: u64,
}

impl Default for RegressionConfig {
    fn default() -> Self {
        Self {
            d: vec![5, 10, 20, 40, 80],
            n: vec![20],
            power: 1.0,
            noise_var: 1.0,
            samples: 500,
            regularize: true,
            seed: 0,
        }
    }
}

pub fn regression_volume(args: RegressionArgs, sink: &Sink) -> RunResult<Echo> {
    let mut cfg: RegressionConfig = load_config(args.common.config.as_deref())?;
    set_list(&mut cfg.d, args.d);
    set_list(&mut cfg.n, args.n);
    set(&mut cfg.power, args.power);
    set(&mut cfg.noise_var, args.noise_var);
    set(&mut cfg.samples, args.samples);
    set(&mut cfg.seed, args.common.seed);
    if args.no_regularize {
        cfg.regularize = false;
    }

    let mut rows = Vec::new();
    let mut series = Vec::new();
    for &n in &cfg.n {
        let mut points = Vec::new();
        for &d in &cfg.d {
            let spec = RegressionModelSpec::new(d, n, cfg.power, cfg.noise_var)?;
            let stream = cell_stream(cfg.seed, &[d as u64, n as u64]);
            let x = DesignMatrix::seeded_gaussian(n, d, &stream.child(0))?;
            let v = if cfg.regularize {
                regularized_log_volume(&x, &spec)?
            } else {
                log_volume(&x, &spec)?
            };
            let mean = mean_regularized_log_volume(&spec, cfg.samples, &stream.child(1))?;
            let classical = (d <= n)
                .then(|| classical_regime_bound(&spec).map(|b| b.value))
                .transpose()?;
            let (modern, mdl) = if d > n {
                (Some(modern_regime_bound(&spec)?), Some(mdl_upper_bound(&spec)?))
            } else {
                (None, None)
            };
            rows.push(vec![
                d.to_string(),
                n.to_string(),
                format_float(spec.snr()),
                format_float(spec.alpha()),
                format_float(v),
                format_float(mean.value),
                format_float(mean.stderr),
                opt(mean.lower),
                opt(mean.upper),
                opt(classical),
                opt(modern),
                opt(mdl),
            ]);
            points.push((d as f64, v));
        }
        series.push(Series {
            label: format!("N={n}"),
            points,
        });
    }
    sink.csv(
        "regression_volume",
        &[
            "d",
            "n",
            "snr",
            "alpha",
            "log_volume",
            "mean_log_volume",
            "mean_stderr",
            "mean_lower",
            "mean_upper",
            "classical_bound",
            "modern_bound",
            "mdl_bound",
        ],
        rows,
    )?;
    if args.common.svg {
        sink.svg(
            "regression_volume",
            &LineChart {
                title: "Regression log-volume".into(),
                x_label: "D".into(),
                y_label: "log V".into(),
                log_y: false,
                series,
            },
        )?;
    }
    Ok(Echo::of(&cfg, cfg.seed))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeConfig {
    /// `bool:n` shorthands or paths to JSON lattice specs.
    pub lattices: Vec<String>,
    pub samples: usize,
    pub seed: u64,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        Self {
            lattices: vec!["bool:1".into(), "bool:2".into(), "bool:3".into()],
            samples: 20_000,
            seed: 0,
        }
    }
}

fn load_lattice(source: &str) -> RunResult<Lattice> {
    if source.starts_with("bool:") {
        return Ok(Lattice::parse_shorthand(source)?);
    }
    let path = Path::new(source);
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))?;
    let spec: LatticeSpec = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    Ok(Lattice::from_spec(&spec)?)
}

pub fn lattice_volume(args: LatticeArgs, sink: &Sink) -> RunResult<Echo> {
    let mut cfg: LatticeConfig = load_config(args.common.config.as_deref())?;
    set_list(&mut cfg.lattices, args.lattice);
    set(&mut cfg.samples, args.samples);
    set(&mut cfg.seed, args.common.seed);

    let mut rows = Vec::new();
    for (i, source) in cfg.lattices.iter().enumerate() {
        let lat = load_lattice(source)?;
        let v = lattice_log_volume_mc(&lat, cfg.samples, &cell_stream(cfg.seed, &[i as u64]))?;
        let e = v.estimate;
        rows.push(vec![
            source.clone(),
            lat.size().to_string(),
            format_float(e.value),
            format_float(e.stderr),
            opt(e.lower),
            format_float(v.lower_stderr),
            opt(e.upper),
            format_float(v.upper_stderr),
            v.rejected.to_string(),
        ]);
    }
    sink.csv(
        "lattice_volume",
        &[
            "lattice",
            "size",
            "estimate",
            "stderr",
            "lower",
            "lower_stderr",
            "upper",
            "upper_stderr",
            "rejected",
        ],
        rows,
    )?;
    Ok(Echo::of(&cfg, cfg.seed))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PerceptronConfig {
    pub d: Vec<usize>,
    pub noise_var: f64,
    pub w_max: f64,
    pub grid_points: usize,
    pub samples: usize,
    pub radial_weight: bool,
    pub seed: u64,
}

impl Default for PerceptronConfig {
    fn default() -> Self {
        Self {
            d: vec![1, 2, 5, 10, 20, 50],
            noise_var: 1.0,
            w_max: perceptron::DEFAULT_W_MAX,
            grid_points: perceptron::DEFAULT_GRID_POINTS,
            samples: perceptron::DEFAULT_SAMPLES,
            radial_weight: false,
            seed: 0,
        }
    }
}

pub fn perceptron_volume(args: PerceptronArgs, sink: &Sink) -> RunResult<Echo> {
    let mut cfg: PerceptronConfig = load_config(args.common.config.as_deref())?;
    set_list(&mut cfg.d, args.d);
    set(&mut cfg.noise_var, args.noise_var);
    set(&mut cfg.w_max, args.w_max);
    set(&mut cfg.grid_points, args.grid_points);
    set(&mut cfg.samples, args.samples);
    set(&mut cfg.seed, args.common.seed);
    if args.radial_weight {
        cfg.radial_weight = true;
    }

    // one stream for every D: the coefficient draws are shared
    let rng = RngStream::new(cfg.seed);
    let mut rows = Vec::new();
    let mut points = Vec::new();
    for &d in &cfg.d {
        let spec = PerceptronSpec {
            d,
            noise_var: cfg.noise_var,
            w_max: cfg.w_max,
            activation: Default::default(),
            radial_weight: cfg.radial_weight,
        };
        let v = perceptron_log_volume(&spec, cfg.grid_points, cfg.samples, &rng)?;
        rows.push(vec![
            d.to_string(),
            format_float(cfg.noise_var),
            format_float(cfg.w_max),
            cfg.radial_weight.to_string(),
            format_float(v.estimate.value),
            format_float(v.estimate.stderr),
            format_float(v.log_tail),
        ]);
        points.push((d as f64, v.estimate.value));
    }
    sink.csv(
        "perceptron_volume",
        &["d", "noise_var", "w_max", "radial_weight", "log_volume", "stderr", "log_tail"],
        rows,
    )?;
    if args.common.svg {
        sink.svg(
            "perceptron_volume",
            &LineChart {
                title: "Perceptron log-volume".into(),
                x_label: "D".into(),
                y_label: "log V".into(),
                log_y: false,
                series: vec![Series {
                    label: format!("sigma2={}", cfg.noise_var),
                    points,
                }],
            },
        )?;
    }
    Ok(Echo::of(&cfg, cfg.seed))
}

pub fn double_descent(args: DoubleDescentArgs, sink: &Sink) -> RunResult<Echo> {
    let mut cfg: ExperimentConfig = if args.full {
        ExperimentConfig::full()
    } else {
        load_config(args.common.config.as_deref())?
    };
    set_list(&mut cfg.n_values, args.n);
    set_list(&mut cfg.alpha_values, args.alpha);
    set_list(&mut cfg.d_grid, args.d_grid);
    set(&mut cfg.d_true, args.d_true);
    set(&mut cfg.beta_var, args.beta_var);
    set(&mut cfg.noise_var, args.noise_var);
    set(&mut cfg.folds, args.folds);
    set(&mut cfg.seed, args.common.seed);
    cfg.validate()?;
    for w in cfg.warnings() {
        sink.note(format_args!("warning: {w}"));
    }

    let curve = kfold_curve(&cfg)?;
    let path = sink.path("double_descent.csv");
    write_risk_csv(&curve, &path)?;
    sink.note(format_args!("wrote {}", path.display()));
    for (n, alpha) in curve.series_keys() {
        if let Some(peak) = curve.argmax(n, alpha, 0, |r| r.test_mse) {
            sink.note(format_args!(
                "n={n} alpha={alpha}: test MSE peaks at d={} ({:.4})",
                peak.d, peak.test_mse
            ));
        }
    }
    if args.common.svg {
        sink.svg("double_descent", &risk_chart(&curve))?;
    }
    Ok(Echo::of(&cfg, cfg.seed))
}

pub fn mdl_curve(args: MdlCurveArgs, sink: &Sink) -> RunResult<Echo> {
    let mut cfg: MdlCurveConfig = load_config(args.common.config.as_deref())?;
    set_list(&mut cfg.orders, args.orders);
    if !args.sample_sizes.is_empty() {
        cfg.cases = args
            .sample_sizes
            .iter()
            .map(|&sample_size| MdlCase {
                sample_size,
                neg_log_lik: 0.0,
            })
            .collect();
    }
    if let Some(nll) = args.neg_log_lik {
        cfg.cases.iter_mut().for_each(|c| c.neg_log_lik = nll);
    }
    set(&mut cfg.samples, args.samples);
    set(&mut cfg.seed, args.common.seed);

    let curve = mdl_lattice_curve(&cfg)?;
    let rows = curve
        .points
        .iter()
        .map(|p| {
            vec![
                p.case.to_string(),
                format_float(p.sample_size),
                p.order.to_string(),
                p.atoms.to_string(),
                format_float(p.log_volume),
                format_float(p.log_volume_stderr),
                format_float(p.score),
            ]
        })
        .collect();
    sink.csv(
        "mdl_curve",
        &["case", "sample_size", "order", "atoms", "log_volume", "log_volume_stderr", "score"],
        rows,
    )?;
    for (i, case) in cfg.cases.iter().enumerate() {
        match curve.interior_peak(i) {
            Some(k) => sink.note(format_args!(
                "N={}: score peaks at order {} and falls after",
                case.sample_size, cfg.orders[k]
            )),
            None => sink.note(format_args!(
                "N={}: no interior peak followed by a monotone fall",
                case.sample_size
            )),
        }
    }
    if args.common.svg {
        let series = (0..cfg.cases.len())
            .map(|i| Series {
                label: format!("N={}", cfg.cases[i].sample_size),
                points: curve
                    .case(i)
                    .iter()
                    .map(|p| (p.atoms as f64, p.score))
                    .collect(),
            })
            .collect();
        sink.svg(
            "mdl_curve",
            &LineChart {
                title: "MDL score of Boolean lattice models".into(),
                x_label: "D".into(),
                y_label: "score (nats)".into(),
                log_y: false,
                series,
            },
        )?;
    }
    Ok(Echo::of(&cfg, cfg.seed))
}
