//! Experiment harness around the `loclet` library: graph sources,
//! frequency-sparse test signals, noise injection and the denoising,
//! noise-estimation and entropy experiments with CSV reports.

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, ensure, Context, Result};
use rayon::prelude::*;

use loclet::calculus::ChebyshevCalculus;
use loclet::chebyshev::Damping;
use loclet::denoise::{
    denoising_frame, detect_support, eigen_indices_in, interval_statistics, sigma_mean, sigma_med, snr_db,
    threshold_grid, DenoiseConfig, LocLetShrinkage, Method, ParsevalShrinkage, Side, SigmaSource,
};
use loclet::graph::{
    dense_eigendecomposition, laplacian, load_matrix_market, synthetic_swissroll, EigenSystem, LaplacianOperator,
    MtxMode, WeightedGraph, DEFAULT_DENSE_CAP,
};
use loclet::rng::{gaussian_vector, mix_seed, rng_from};
use loclet::spectrum::{
    elbow, exact_interval_counts, hutchinson_interval_counts, mean_relative_error, partition_entropy, select_partition,
    stochastic_moments, CountMode, Partition, DEFAULT_ELBOW_GAIN,
};

/// Default Hutchinson probe count for interval counts.
pub const DEFAULT_PROBES: usize = 100;
/// Default number of noise realisations per experiment cell.
pub const DEFAULT_REPS: usize = 10;
/// Entropy scan grid used when `K` is chosen automatically.
pub const DEFAULT_K_GRID: [usize; 12] = [1, 2, 5, 10, 15, 20, 25, 30, 35, 40, 45, 50];
/// `K` grid of the noise-estimation sweep.
pub const NOISE_K_GRID: [usize; 6] = [5, 10, 20, 30, 40, 50];

// stream tags keeping independent draws apart under one root seed
const SIGNAL_STREAM: u64 = 0x5349_474e;
const NOISE_STREAM: u64 = 0x4e4f_4953;
const PROBE_STREAM: u64 = 0x5052_4f42;

/// Where a graph comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum MatrixSource {
    File { path: PathBuf, mode: MtxMode },
    Swissroll { n: usize, k_nn: usize, seed: u64 },
}

impl FromStr for MatrixSource {
    type Err = anyhow::Error;

    /// `swissroll:n,k[,seed]`, `laplacian:<path>` or a Matrix Market path.
    fn from_str(s: &str) -> Result<Self> {
        if let Some(rest) = s.strip_prefix("swissroll:") {
            let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
            ensure!(
                parts.len() == 2 || parts.len() == 3,
                "expected swissroll:n,k[,seed], got {s:?}"
            );
            let n = parts[0].parse().context("swissroll vertex count")?;
            let k_nn = parts[1].parse().context("swissroll neighbour count")?;
            let seed = match parts.get(2) {
                Some(p) => p.parse().context("swissroll seed")?,
                None => 0,
            };
            return Ok(MatrixSource::Swissroll { n, k_nn, seed });
        }
        if let Some(path) = s.strip_prefix("laplacian:") {
            return Ok(MatrixSource::File {
                path: path.into(),
                mode: MtxMode::LaplacianDirect,
            });
        }
        ensure!(!s.is_empty(), "empty matrix source");
        Ok(MatrixSource::File {
            path: s.into(),
            mode: MtxMode::Abs,
        })
    }
}

impl fmt::Display for MatrixSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixSource::File { path, mode } => match mode {
                MtxMode::Abs => write!(f, "{}", path.display()),
                MtxMode::LaplacianDirect => write!(f, "laplacian:{}", path.display()),
            },
            MatrixSource::Swissroll { n, k_nn, seed } => write!(f, "swissroll:{n},{k_nn},{seed}"),
        }
    }
}

impl MatrixSource {
    pub fn load(&self) -> Result<WeightedGraph<f64>> {
        Ok(match self {
            MatrixSource::File { path, mode } => {
                load_matrix_market(path, *mode).with_context(|| format!("loading {}", path.display()))?
            }
            MatrixSource::Swissroll { n, k_nn, seed } => synthetic_swissroll(*n, *k_nn, *seed)?,
        })
    }
}

/// A loaded graph with its Laplacian and, under the cap, its eigenpairs.
pub struct Workspace {
    pub graph: WeightedGraph<f64>,
    pub op: LaplacianOperator<f64>,
    pub eig: Option<EigenSystem<f64>>,
}

impl Workspace {
    pub fn load(source: &MatrixSource, cap: usize) -> Result<Self> {
        let graph = source.load()?;
        let op = laplacian(&graph);
        let eig = if graph.n() <= cap {
            Some(dense_eigendecomposition(&op, cap)?)
        } else {
            None
        };
        Ok(Self { graph, op, eig })
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn oracle(&self) -> Result<&EigenSystem<f64>> {
        match &self.eig {
            Some(e) => Ok(e),
            None => bail!(
                "graph has {} vertices, above the dense eigendecomposition cap of {}",
                self.n(),
                DEFAULT_DENSE_CAP
            ),
        }
    }
}

/// Frequency-sparse signal `f_{i-j}`: spectral content on eigenvalue
/// positions `i..=j`, counted from the largest eigenvalue (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignalSpec {
    pub first: usize,
    pub last: usize,
    pub seed: u64,
    pub unit_norm: bool,
}

impl SignalSpec {
    pub fn new(first: usize, last: usize, seed: u64) -> Self {
        Self {
            first,
            last,
            seed,
            unit_norm: true,
        }
    }

    pub fn id(&self) -> String {
        format!("f_{}-{}", self.first, self.last)
    }
}

impl FromStr for SignalSpec {
    type Err = anyhow::Error;

    /// `i-j`, optionally prefixed with `f_`.
    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches("f_");
        let (a, b) = body
            .split_once('-')
            .with_context(|| format!("expected a range i-j, got {s:?}"))?;
        Ok(Self::new(a.trim().parse()?, b.trim().parse()?, 0))
    }
}

/// `f = sum_{l=i..j} g_l chi_l` with standard normal `g_l`, normalised when
/// the spec asks for it.
pub fn generate_signal(eig: &EigenSystem<f64>, spec: &SignalSpec) -> Result<Vec<f64>> {
    let n = eig.n();
    ensure!(
        spec.first >= 1 && spec.first <= spec.last && spec.last <= n,
        "signal range {}-{} must satisfy 1 <= i <= j <= {n}",
        spec.first,
        spec.last
    );
    let mut rng = rng_from(spec.seed, SIGNAL_STREAM);
    let weights: Vec<f64> = gaussian_vector(spec.last - spec.first + 1, 1.0, &mut rng);
    let mut f = vec![0.0; n];
    for (l, &w) in (spec.first - 1..spec.last).zip(&weights) {
        for (x, &c) in f.iter_mut().zip(eig.vector(l)) {
            *x += w * c;
        }
    }
    if spec.unit_norm {
        let norm = f.iter().map(|x| x * x).sum::<f64>().sqrt();
        ensure!(norm > 0.0, "generated signal vanishes");
        f.iter_mut().for_each(|x| *x /= norm);
    }
    Ok(f)
}

/// `f + xi` with i.i.d. `N(0, sigma^2)` entries, reproducible per seed.
pub fn add_noise(f: &[f64], sigma: f64, seed: u64) -> Result<Vec<f64>> {
    ensure!(sigma >= 0.0, "noise level must be nonnegative, got {sigma}");
    let mut rng = rng_from(seed, NOISE_STREAM);
    let noise: Vec<f64> = gaussian_vector(f.len(), sigma, &mut rng);
    Ok(f.iter().zip(&noise).map(|(a, b)| a + b).collect())
}

/// Seed of repetition `rep` of experiment cell `cell`.
pub fn rep_seed(root: u64, cell: u64, rep: usize) -> u64 {
    mix_seed(mix_seed(root, cell), rep as u64)
}

/// How interval counts (chi-square degrees of freedom) are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountSource {
    /// Hutchinson estimate with damped projectors.
    Hutchinson { probes: usize },
    /// Exact eigenvalue counts from the dense oracle.
    Oracle,
}

impl Default for CountSource {
    fn default() -> Self {
        CountSource::Hutchinson { probes: DEFAULT_PROBES }
    }
}

/// Number of intervals: fixed or chosen by the entropy rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KChoice {
    Fixed(usize),
    Auto,
}

impl FromStr for KChoice {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            Ok(KChoice::Auto)
        } else {
            let k: usize = s.parse().with_context(|| format!("bad K {s:?}"))?;
            ensure!(k >= 1, "K must be positive");
            Ok(KChoice::Fixed(k))
        }
    }
}

/// Regular partition of `[0, lambda_max]` with interval counts attached.
pub fn build_partition(
    ws: &Workspace,
    k: KChoice,
    degree: usize,
    counts: CountSource,
    seed: u64,
) -> Result<Partition<f64>> {
    let probe_seed = mix_seed(seed, PROBE_STREAM);
    let partition = match k {
        KChoice::Fixed(k) => Partition::regular(ws.op.lambda_max(), k)?,
        KChoice::Auto => {
            let probes = match counts {
                CountSource::Hutchinson { probes } => probes,
                CountSource::Oracle => DEFAULT_PROBES,
            };
            select_partition(&ws.op, &DEFAULT_K_GRID, degree, probes, probe_seed, DEFAULT_ELBOW_GAIN)?.partition
        }
    };
    Ok(match counts {
        CountSource::Hutchinson { probes } => {
            let c = hutchinson_interval_counts(&ws.op, &partition, degree, probes, probe_seed)?;
            partition.with_counts(c, CountMode::Estimated)?
        }
        CountSource::Oracle => {
            let c = exact_interval_counts(ws.oracle()?, &partition)
                .into_iter()
                .map(|c| c as f64)
                .collect();
            partition.with_counts(c, CountMode::Exact)?
        }
    })
}

/// Settings shared by the experiments.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub k: KChoice,
    pub sigmas: Vec<f64>,
    pub signals: Vec<SignalSpec>,
    pub reps: usize,
    pub methods: Vec<Method>,
    pub alpha: f64,
    pub degree: usize,
    pub seed: u64,
    pub counts: CountSource,
    /// Estimate sigma for the support test instead of using the true level.
    pub estimate_sigma: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            k: KChoice::Auto,
            sigmas: vec![0.01],
            signals: Vec::new(),
            reps: DEFAULT_REPS,
            methods: vec![Method::Noisy, Method::Pf, Method::LLet, Method::LLetPf],
            alpha: 1e-3,
            degree: 200,
            seed: 0,
            counts: CountSource::default(),
            estimate_sigma: false,
        }
    }
}

impl ExperimentConfig {
    fn validate(&self) -> Result<()> {
        ensure!(self.reps >= 1, "repetitions must be at least 1");
        ensure!(!self.sigmas.is_empty(), "no noise levels given");
        ensure!(!self.signals.is_empty(), "no signals given");
        ensure!(self.sigmas.iter().all(|&s| s > 0.0), "noise levels must be positive");
        Ok(())
    }
}

/// Best SNR of one noise realisation for one method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepOutcome {
    pub snr: f64,
    pub t_support: f64,
    pub t_complement: f64,
    pub support_size: usize,
}

/// Aggregate of one method over the repetitions of a cell.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub method: Method,
    pub signal: String,
    pub sigma: f64,
    pub snr_in: f64,
    /// Maximum over repetitions of the best grid SNR.
    pub best: f64,
    /// Mean over repetitions of the best grid SNR.
    pub mean: f64,
    /// Thresholds of the repetition reaching `best`.
    pub t_support: f64,
    pub t_complement: f64,
    pub mean_support: f64,
    pub reps: Vec<RepOutcome>,
}

fn best_pair(clean: &[f64], left: &[Vec<f64>], right: &[Vec<f64>], grid: &[f64]) -> Result<(f64, f64, f64)> {
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    let mut sum = vec![0.0; clean.len()];
    for (a, &t1) in left.iter().zip(grid) {
        for (b, &t2) in right.iter().zip(grid) {
            sum.iter_mut().zip(a.iter().zip(b)).for_each(|(s, (x, y))| *s = x + y);
            let snr = snr_db(clean, &sum)?;
            if snr > best.0 {
                best = (snr, t1, t2);
            }
        }
    }
    Ok(best)
}

/// Grid-searched outcomes of every requested method on one noisy signal.
pub fn denoise_once(
    ws: &Workspace,
    partition: &Partition<f64>,
    clean: &[f64],
    noisy: &[f64],
    sigma: f64,
    config: &ExperimentConfig,
) -> Result<Vec<(Method, RepOutcome)>> {
    let eig = ws.oracle()?;
    let calc = ChebyshevCalculus::new(&ws.op, config.degree, Damping::Jackson)?;
    let frame = denoising_frame(ws.op.lambda_max())?;
    let grid = threshold_grid(sigma)?;
    let source = if config.estimate_sigma {
        SigmaSource::Median
    } else {
        SigmaSource::Known(sigma)
    };
    let mut dc = DenoiseConfig::new(partition.clone()).with_sigma(source);
    dc.alpha = config.alpha;
    dc.degree = config.degree;

    let needs_support = config
        .methods
        .iter()
        .any(|m| matches!(m, Method::LLet | Method::LLetPf));
    let split = if needs_support {
        let (support, _) = detect_support(&calc, noisy, &dc)?;
        let shrink = LocLetShrinkage::new(&calc, frame, partition, &support, noisy)?;
        let off: Vec<Vec<f64>> = grid
            .iter()
            .map(|&t| shrink.reconstruct_side(Side::Complement, t))
            .collect::<loclet::Result<_>>()?;
        Some((support, shrink, off))
    } else {
        None
    };

    let mut out = Vec::new();
    for &method in &config.methods {
        let outcome = match method {
            Method::Noisy => RepOutcome {
                snr: snr_db(clean, noisy)?,
                t_support: 0.0,
                t_complement: 0.0,
                support_size: 0,
            },
            Method::Pf => {
                let pf = ParsevalShrinkage::new(eig, &frame, (0..eig.n()).collect(), noisy)?;
                let mut best = (f64::NEG_INFINITY, 0.0);
                for &t in &grid {
                    let snr = snr_db(clean, &pf.reconstruct(t)?)?;
                    if snr > best.0 {
                        best = (snr, t);
                    }
                }
                RepOutcome {
                    snr: best.0,
                    t_support: best.1,
                    t_complement: best.1,
                    support_size: 0,
                }
            }
            Method::LLet => {
                let (support, shrink, off) = split.as_ref().expect("support computed");
                let on: Vec<Vec<f64>> = grid
                    .iter()
                    .map(|&t| shrink.reconstruct_side(Side::Support, t))
                    .collect::<loclet::Result<_>>()?;
                let (snr, t1, t2) = best_pair(clean, &on, off, &grid)?;
                RepOutcome {
                    snr,
                    t_support: t1,
                    t_complement: t2,
                    support_size: support.selected.len(),
                }
            }
            Method::LLetPf => {
                let (support, _, off) = split.as_ref().expect("support computed");
                let indices = eigen_indices_in(eig, partition, &support.selected);
                let pf = ParsevalShrinkage::new(eig, &frame, indices, noisy)?;
                let on: Vec<Vec<f64>> = grid.iter().map(|&t| pf.reconstruct(t)).collect::<loclet::Result<_>>()?;
                let (snr, t1, t2) = best_pair(clean, &on, off, &grid)?;
                RepOutcome {
                    snr,
                    t_support: t1,
                    t_complement: t2,
                    support_size: support.selected.len(),
                }
            }
        };
        out.push((method, outcome));
    }
    Ok(out)
}

/// Denoising table: for every signal, noise level and method, the maximum
/// and mean over repetitions of the best grid SNR.
pub fn run_denoise_benchmark(ws: &Workspace, config: &ExperimentConfig) -> Result<Vec<BenchRow>> {
    config.validate()?;
    let eig = ws
        .oracle()
        .context("denoising benchmark needs the dense eigendecomposition")?;
    let partition = build_partition(ws, config.k, config.degree, config.counts, config.seed)?;
    let cells: Vec<(usize, usize)> = (0..config.signals.len())
        .flat_map(|s| (0..config.sigmas.len()).map(move |g| (s, g)))
        .collect();
    let signals: Vec<Vec<f64>> = config
        .signals
        .iter()
        .map(|spec| generate_signal(eig, spec))
        .collect::<Result<_>>()?;

    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..config.reps).map(move |r| (c, r)))
        .collect();
    let results: Vec<Vec<(Method, RepOutcome)>> = jobs
        .par_iter()
        .map(|&(c, r)| {
            let (s, g) = cells[c];
            let sigma = config.sigmas[g];
            let clean = &signals[s];
            let noisy = add_noise(clean, sigma, rep_seed(config.seed, c as u64, r))?;
            denoise_once(ws, &partition, clean, &noisy, sigma, config)
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    for (c, &(s, g)) in cells.iter().enumerate() {
        let cell = &results[c * config.reps..(c + 1) * config.reps];
        let snr_in = cell
            .iter()
            .map(|outcomes| {
                let noisy = outcomes.iter().find(|(m, _)| *m == Method::Noisy);
                noisy.map(|(_, o)| o.snr)
            })
            .collect::<Option<Vec<f64>>>()
            .map(|v| v.iter().sum::<f64>() / v.len() as f64)
            .unwrap_or(f64::NAN);
        for (mi, &method) in config.methods.iter().enumerate() {
            let reps: Vec<RepOutcome> = cell.iter().map(|o| o[mi].1).collect();
            let (argmax, best) =
                reps.iter().enumerate().fold(
                    (0, f64::NEG_INFINITY),
                    |acc, (i, o)| if o.snr > acc.1 { (i, o.snr) } else { acc },
                );
            let n = reps.len() as f64;
            rows.push(BenchRow {
                method,
                signal: config.signals[s].id(),
                sigma: config.sigmas[g],
                snr_in,
                best,
                mean: reps.iter().map(|o| o.snr).sum::<f64>() / n,
                t_support: reps[argmax].t_support,
                t_complement: reps[argmax].t_complement,
                mean_support: reps.iter().map(|o| o.support_size as f64).sum::<f64>() / n,
                reps,
            });
        }
    }
    Ok(rows)
}

pub fn write_bench_csv<W: Write>(rows: &[BenchRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "method",
        "signal",
        "sigma",
        "snr_in",
        "best_snr",
        "mean_snr",
        "t1",
        "t2",
        "support_size",
    ])?;
    for r in rows {
        w.write_record([
            r.method.tag().to_string(),
            r.signal.clone(),
            format!("{}", r.sigma),
            format!("{:.3}", r.snr_in),
            format!("{:.3}", r.best),
            format!("{:.3}", r.mean),
            format!("{:.6e}", r.t_support),
            format!("{:.6e}", r.t_complement),
            format!("{:.1}", r.mean_support),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One noise-level estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseRow {
    pub signal: String,
    pub sigma: f64,
    pub k: usize,
    pub r: usize,
    pub rep: usize,
    pub sigma_med: Option<f64>,
    /// `None` when `r` is out of range for this `K`.
    pub sigma_mean: Option<f64>,
}

/// Sweeps `K` and the trim parameter `r` and records both estimators for
/// every repetition.
pub fn run_noise_estimation(
    ws: &Workspace,
    config: &ExperimentConfig,
    k_grid: &[usize],
    r_grid: &[usize],
) -> Result<Vec<NoiseRow>> {
    config.validate()?;
    ensure!(!k_grid.is_empty() && !r_grid.is_empty(), "empty K or r grid");
    let eig = ws.oracle().context("signals need the dense eigendecomposition")?;
    let calc = ChebyshevCalculus::new(&ws.op, config.degree, Damping::Jackson)?;
    let signals: Vec<Vec<f64>> = config
        .signals
        .iter()
        .map(|spec| generate_signal(eig, spec))
        .collect::<Result<_>>()?;
    let partitions: Vec<Partition<f64>> = k_grid
        .iter()
        .map(|&k| build_partition(ws, KChoice::Fixed(k), config.degree, config.counts, config.seed))
        .collect::<Result<_>>()?;

    let mut jobs = Vec::new();
    for s in 0..signals.len() {
        for g in 0..config.sigmas.len() {
            for ki in 0..k_grid.len() {
                for rep in 0..config.reps {
                    jobs.push((s, g, ki, rep));
                }
            }
        }
    }
    let blocks: Vec<Vec<NoiseRow>> = jobs
        .par_iter()
        .map(|&(s, g, ki, rep)| {
            let sigma = config.sigmas[g];
            let cell = (s * config.sigmas.len() + g) as u64;
            let noisy = add_noise(&signals[s], sigma, rep_seed(config.seed, cell, rep))?;
            let stats = interval_statistics(&calc, &partitions[ki], &noisy)?;
            let med = sigma_med(&stats).ok();
            Ok(r_grid
                .iter()
                .map(|&r| NoiseRow {
                    signal: config.signals[s].id(),
                    sigma,
                    k: k_grid[ki],
                    r,
                    rep,
                    sigma_med: med,
                    sigma_mean: sigma_mean(&stats, r).ok(),
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(blocks.into_iter().flatten().collect())
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.8}")).unwrap_or_default()
}

pub fn write_noise_csv<W: Write>(rows: &[NoiseRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["signal", "sigma", "K", "r", "rep", "sigma_med", "sigma_mean"])?;
    for r in rows {
        w.write_record([
            r.signal.clone(),
            format!("{}", r.sigma),
            r.k.to_string(),
            r.r.to_string(),
            r.rep.to_string(),
            opt(r.sigma_med),
            opt(r.sigma_mean),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Entropy and count error of one partition size.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyRow {
    pub k: usize,
    pub entropy: f64,
    /// Relative count error against the dense oracle when available,
    /// otherwise the half-split spread of the probes.
    pub mre: Option<f64>,
    pub exact: bool,
    pub elbow: bool,
}

pub fn run_entropy_scan(
    ws: &Workspace,
    k_grid: &[usize],
    degree: usize,
    probes: usize,
    seed: u64,
    gain: f64,
) -> Result<Vec<EntropyRow>> {
    ensure!(!k_grid.is_empty(), "empty K grid");
    ensure!(k_grid.windows(2).all(|w| w[0] < w[1]), "K grid must be increasing");
    let moments = stochastic_moments(&ws.op, degree, probes, mix_seed(seed, PROBE_STREAM))?;
    let mut rows = Vec::with_capacity(k_grid.len());
    for &k in k_grid {
        let partition = Partition::regular(ws.op.lambda_max(), k)?;
        let counts = moments.interval_counts(&partition)?;
        let entropy = partition_entropy(&counts)?;
        let (mre, exact) = match &ws.eig {
            Some(eig) => {
                let truth: Vec<f64> = exact_interval_counts(eig, &partition)
                    .into_iter()
                    .map(|c| c as f64)
                    .collect();
                (Some(mean_relative_error(&counts, &truth)?), true)
            }
            None => (moments.count_spread(&partition)?, false),
        };
        rows.push(EntropyRow {
            k,
            entropy,
            mre,
            exact,
            elbow: false,
        });
    }
    let entropies: Vec<f64> = rows.iter().map(|r| r.entropy).collect();
    let chosen = elbow(k_grid, &entropies, gain);
    rows.iter_mut().for_each(|r| r.elbow = r.k == chosen);
    Ok(rows)
}

pub fn write_entropy_csv<W: Write>(rows: &[EntropyRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["K", "entropy", "mre", "mre_kind", "elbow"])?;
    for r in rows {
        w.write_record([
            r.k.to_string(),
            format!("{:.10}", r.entropy),
            opt(r.mre),
            if r.exact { "exact" } else { "proxy" }.to_string(),
            u8::from(r.elbow).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sources() {
        assert_eq!(
            "swissroll:1000,10".parse::<MatrixSource>().unwrap(),
            MatrixSource::Swissroll {
                n: 1000,
                k_nn: 10,
                seed: 0
            }
        );
        assert!("swissroll:1000".parse::<MatrixSource>().is_err());
        assert!(matches!(
            "laplacian:a.mtx".parse::<MatrixSource>().unwrap(),
            MatrixSource::File {
                mode: MtxMode::LaplacianDirect,
                ..
            }
        ));
    }

    #[test]
    fn parses_signals_and_k() {
        let s: SignalSpec = "f_951-1000".parse().unwrap();
        assert_eq!((s.first, s.last), (951, 1000));
        assert_eq!(s.id(), "f_951-1000");
        assert!("951".parse::<SignalSpec>().is_err());
        assert_eq!("auto".parse::<KChoice>().unwrap(), KChoice::Auto);
        assert_eq!("22".parse::<KChoice>().unwrap(), KChoice::Fixed(22));
        assert!("0".parse::<KChoice>().is_err());
    }

    #[test]
    fn zero_noise_is_identity() {
        let f = vec![1.0, -2.0, 0.5];
        assert_eq!(add_noise(&f, 0.0, 3).unwrap(), f);
        assert!(add_noise(&f, -1.0, 3).is_err());
    }
}
