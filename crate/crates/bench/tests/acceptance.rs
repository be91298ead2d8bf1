//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Always exits 0 so the workspace test run stays green; set
//! `LOCLET_ACCEPTANCE_STRICT=1` to exit nonzero when any criterion fails.
//! The Si2 spot-check reads `LOCLET_SI2_MTX` or `crates/bench/data/Si2.mtx`.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{ensure, Context, Result};
use rand::Rng;
use rayon::prelude::*;

use loclet::calculus::{ChebyshevCalculus, OracleCalculus};
use loclet::chebyshev::Damping;
use loclet::denoise::{
    chi2_difference_quantile, gaussian_tail_threshold, interval_statistics, mean_concentration_bound,
    median_concentration_bound, median_event_level, sigma_med, support_from_statistics, BlockStats, Method, Tail,
};
use loclet::frames::{loclet_forward, parseval_filters, warped_identity_deviation, Sgwt, WarpedKernel};
use loclet::graph::{dense_eigendecomposition, laplacian, EigenSystem, LaplacianOperator, WeightedGraph};
use loclet::rng::{gaussian_vector, mix_seed, rng_from};
use loclet::spectrum::{
    exact_interval_counts, hutchinson_interval_counts, kpm_cumulative_density, mean_relative_error, with_exact_counts,
    Partition,
};
use loclet::stats::{chi2_cdf, ks_critical_value, ks_statistic};
use loclet_bench::{
    add_noise, generate_signal, run_denoise_benchmark, run_entropy_scan, run_noise_estimation, ExperimentConfig,
    KChoice, MatrixSource, SignalSpec, Workspace,
};

const CAP: usize = 4000;

type Criterion = (&'static str, fn() -> Result<Outcome>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        pass,
        detail: detail.into(),
    })
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn swissroll(n: usize, seed: u64) -> Result<Workspace> {
    Workspace::load(&MatrixSource::Swissroll { n, k_nn: 10, seed }, CAP)
}

/// Sparse random graph: a weighted ring plus random chords.
fn random_graph(n: usize, p: f64, seed: u64) -> Result<WeightedGraph<f64>> {
    let mut rng = rng_from(seed, 0x4752_4150);
    let mut edges = Vec::new();
    for i in 0..n {
        edges.push((i, (i + 1) % n, rng.gen_range(0.5..1.5)));
        for j in i + 2..n {
            if rng.gen_bool(p) {
                edges.push((i, j, rng.gen_range(0.1..2.0)));
            }
        }
    }
    Ok(WeightedGraph::new(n, edges)?)
}

fn random_operator(n: usize, p: f64, seed: u64) -> Result<(LaplacianOperator<f64>, EigenSystem<f64>)> {
    let op = laplacian(&random_graph(n, p, seed)?);
    let eig = dense_eigendecomposition(&op, CAP)?;
    Ok((op, eig))
}

fn within(limit: Duration, start: Instant) -> (bool, f64) {
    let secs = start.elapsed().as_secs_f64();
    (secs <= limit.as_secs_f64(), secs)
}

fn parseval_unity() -> Result<Outcome> {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for lambda_1 in [1.0, 3.7, 100.0] {
        let frame = parseval_filters(lambda_1, 2.0)?;
        for i in 0..10_000 {
            let lambda = lambda_1 * i as f64 / 9_999.0;
            worst = worst.max(frame.unity_residual(lambda).abs());
        }
    }
    // the frame filters are continuous, so the plain truncation is used
    let ws = swissroll(1000, 0)?;
    let calc = ChebyshevCalculus::new(&ws.op, 200, Damping::None)?;
    let sgwt = Sgwt::new(&calc, parseval_filters(ws.op.lambda_max(), 2.0)?)?;
    let mut round_trip: f64 = 0.0;
    for s in 0..5 {
        let f = gaussian_vector(ws.n(), 1.0, &mut rng_from(11, s));
        let back = sgwt.adjoint(&sgwt.forward(&f)?)?;
        let diff: Vec<f64> = back.iter().zip(&f).map(|(a, b)| a - b).collect();
        round_trip = round_trip.max(norm(&diff) / norm(&f));
    }
    let (fast, secs) = within(Duration::from_secs(30), start);
    outcome(
        worst <= 1e-12 && round_trip <= 5e-3 && fast,
        format!("unity residual {worst:.2e} (<= 1e-12), W*W relative error {round_trip:.2e} (<= 5e-3), {secs:.1} s"),
    )
}

fn loclet_identity() -> Result<Outcome> {
    let ws = swissroll(1000, 0)?;
    let frame = parseval_filters(ws.op.lambda_max(), 2.0)?;
    let partition = Partition::regular(ws.op.lambda_max(), 22)?;
    let calc = ChebyshevCalculus::new(&ws.op, 200, Damping::Jackson)?;
    let f = gaussian_vector(ws.n(), 1.0, &mut rng_from(21, 0));
    let summed = loclet_forward(&calc, &frame, &partition, &f)?.summed_over_intervals();
    let whole = Sgwt::new(&calc, frame)?.forward(&f)?;
    let gap = |a: &[Vec<f64>], b: &[Vec<f64>]| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).powi(2)).sum::<f64>())
            .sum::<f64>()
            .sqrt()
    };
    let damped = gap(&summed, &whole) / norm(&f);

    let (op, eig) = random_operator(200, 0.05, 22)?;
    let frame = parseval_filters(op.lambda_max(), 2.0)?;
    let partition = Partition::regular(op.lambda_max(), 10)?;
    let oracle = OracleCalculus::new(&eig);
    let f = gaussian_vector(200, 1.0, &mut rng_from(21, 1));
    let coeffs = loclet_forward(&oracle, &frame, &partition, &f)?;
    let exact = gap(
        &coeffs.summed_over_intervals(),
        &Sgwt::new(&oracle, frame)?.forward(&f)?,
    ) / norm(&f);
    let mut cross: f64 = 0.0;
    for k in 0..coeffs.bands.len() {
        for l in k + 1..coeffs.bands.len() {
            for a in &coeffs.bands[k] {
                for b in &coeffs.bands[l] {
                    cross = cross.max(dot(a, b).abs());
                }
            }
        }
    }
    let cross = cross / dot(&f, &f);
    outcome(
        damped <= 2e-3 && exact <= 1e-10 && cross <= 1e-12,
        format!(
            "damped gap {damped:.2e} ||f|| (<= 2e-3), oracle gap {exact:.2e} ||f|| (<= 1e-10), cross-terms {cross:.2e} ||f||^2"
        ),
    )
}

fn hutchinson_counting() -> Result<Outcome> {
    let start = Instant::now();
    let errors: Vec<f64> = (0..20u64)
        .into_par_iter()
        .map(|g| {
            let n = 120 + (g as usize * 17) % 81;
            let (op, eig) = random_operator(n, 0.04 + 0.005 * (g % 5) as f64, 300 + g)?;
            let partition = Partition::regular(op.lambda_max(), 10)?;
            let est = hutchinson_interval_counts(&op, &partition, 400, 50, mix_seed(31, g))?;
            let exact: Vec<f64> = exact_interval_counts(&eig, &partition)
                .into_iter()
                .map(|c| c as f64)
                .collect();
            Ok(mean_relative_error(&est, &exact)?)
        })
        .collect::<Result<_>>()?;
    let good = errors.iter().filter(|&&e| e <= 0.10).count();
    let worst = errors.iter().copied().fold(0.0, f64::max);
    let (fast, secs) = within(Duration::from_secs(120), start);
    outcome(
        good >= 18 && fast,
        format!(
            "{good}/20 graphs with MRE <= 10% (need 18), worst {:.1}%, {secs:.1} s",
            100.0 * worst
        ),
    )
}

fn block_distribution() -> Result<Outcome> {
    let (_, eig) = random_operator(200, 0.05, 41)?;
    let partition = with_exact_counts(&eig, Partition::regular(eig.lambda_1() * 1.01, 8)?)?;
    let counts = partition.counts().context("counts")?.to_vec();
    let oracle = OracleCalculus::new(&eig);
    let draws = 10_000;
    let sigma = 0.3;
    let stats: Vec<BlockStats<f64>> = (0..draws as u64)
        .into_par_iter()
        .map(|d| {
            let xi = gaussian_vector(200, sigma, &mut rng_from(42, d));
            Ok(interval_statistics(&oracle, &partition, &xi)?)
        })
        .collect::<Result<_>>()?;
    let active: Vec<usize> = (0..counts.len()).filter(|&k| counts[k] >= 1.0).collect();
    let column = |k: usize| -> Vec<f64> { stats.iter().map(|s| s.values[k]).collect() };
    let columns: Vec<Vec<f64>> = active.iter().map(|&k| column(k)).collect();
    let corr = |a: &[f64], b: &[f64]| {
        let n = a.len() as f64;
        let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
        let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
        let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
        let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
        cov / (va * vb).sqrt()
    };
    let mut worst_corr: f64 = 0.0;
    for i in 0..columns.len() {
        for j in i + 1..columns.len() {
            worst_corr = worst_corr.max(corr(&columns[i], &columns[j]).abs());
        }
    }
    let critical = ks_critical_value(draws, 0.01)?;
    let mut worst_ks: f64 = 0.0;
    for (col, &k) in columns.iter().zip(&active) {
        let scaled: Vec<f64> = col.iter().map(|c| c * counts[k] / (sigma * sigma)).collect();
        worst_ks = worst_ks.max(ks_statistic(&scaled, |x| {
            chi2_cdf(x.max(0.0), counts[k]).unwrap_or(0.0)
        }));
    }
    outcome(
        worst_corr <= 0.05 && worst_ks <= critical,
        format!(
            "{} intervals: max |corr| {worst_corr:.4} (<= 0.05), max KS {worst_ks:.4} (<= {critical:.4})",
            active.len()
        ),
    )
}

fn concentration_bounds() -> Result<Outcome> {
    let (k, n_k, sigma, sims) = (20usize, 45usize, 1.0f64, 10_000u64);
    let counts = vec![n_k as f64; k];
    let sims_out: Vec<(f64, f64)> = (0..sims)
        .into_par_iter()
        .map(|s| {
            let mut rng = rng_from(51, s);
            let energies: Vec<f64> = (0..k)
                .map(|_| {
                    gaussian_vector::<f64, _>(n_k, sigma, &mut rng)
                        .iter()
                        .map(|x| x * x)
                        .sum()
                })
                .collect();
            let stats = BlockStats::from_energies(energies, counts.clone())?;
            let med = sigma_med(&stats)?.powi(2);
            let mean = stats.values.iter().sum::<f64>() / k as f64;
            Ok((med, mean))
        })
        .collect::<Result<_>>()?;
    let freq = |pred: &dyn Fn(&(f64, f64)) -> bool| sims_out.iter().filter(|s| pred(s)).count() as f64 / sims as f64;
    let mut pass = true;
    let mut worst_margin = f64::NEG_INFINITY;
    let var = sigma * sigma;
    for t in [0.2, 0.5, 1.0] {
        let up = median_event_level(t, &counts, sigma, Tail::Upper)?;
        let lo = median_event_level(t, &counts, sigma, Tail::Lower)?;
        let checks = [
            (
                freq(&|s| s.0 >= up),
                median_concentration_bound(t, &counts, Tail::Upper)?,
            ),
            (
                freq(&|s| s.0 <= lo),
                median_concentration_bound(t, &counts, Tail::Lower)?,
            ),
            (
                freq(&|s| s.1 - var >= t),
                mean_concentration_bound(t, &counts, sigma, Tail::Upper)?,
            ),
            (
                freq(&|s| s.1 - var <= -t),
                mean_concentration_bound(t, &counts, sigma, Tail::Lower)?,
            ),
        ];
        for (empirical, bound) in checks {
            pass &= empirical <= bound;
            worst_margin = worst_margin.max(empirical - bound);
        }
    }
    outcome(
        pass,
        format!("12 tail checks at t in {{0.2, 0.5, 1}}, largest frequency minus bound {worst_margin:.2e} (<= 0)"),
    )
}

fn noise_estimation() -> Result<Outcome> {
    let ws = swissroll(1000, 0)?;
    let grid: Vec<usize> = (1..=10).map(|i| 5 * i).collect();
    let scan = run_entropy_scan(&ws, &grid, 200, 100, 0, 0.05)?;
    let k_elbow = scan.iter().find(|r| r.elbow).map(|r| r.k).context("no elbow")?;
    let config = ExperimentConfig {
        sigmas: vec![0.01, 0.1],
        signals: vec![SignalSpec::new(951, 1000, 0), SignalSpec::new(501, 550, 0)],
        ..ExperimentConfig::default()
    };
    let below: Vec<usize> = grid.iter().copied().filter(|&k| k <= k_elbow).collect();
    let rows = run_noise_estimation(&ws, &config, &below, &[1])?;
    let mut cells = 0;
    let mut failed = Vec::new();
    for spec in &config.signals {
        for &sigma in &config.sigmas {
            for &k in &below {
                let hits = rows
                    .iter()
                    .filter(|r| r.signal == spec.id() && r.sigma == sigma && r.k == k)
                    .filter(|r| r.sigma_med.is_some_and(|s| (s / sigma - 1.0).abs() <= 0.5))
                    .count();
                cells += 1;
                if hits < 8 {
                    failed.push(format!("{} sigma={sigma} K={k}: {hits}/10", spec.id()));
                }
            }
        }
    }

    // K in {1, 2}: the ceil(K/2)-th largest block value is dominated by the signal
    let calc = ChebyshevCalculus::new(&ws.op, 200, Damping::Jackson)?;
    let eig = ws.oracle()?;
    let sigma = 0.01;
    let mut control_ok = true;
    let mut smallest_ratio = f64::INFINITY;
    for k in [1usize, 2] {
        let partition = Partition::regular(ws.op.lambda_max(), k)?;
        let c = hutchinson_interval_counts(&ws.op, &partition, 200, 100, 7)?;
        let partition = partition.with_counts(c, loclet::spectrum::CountMode::Estimated)?;
        for spec in &config.signals {
            let clean = generate_signal(eig, spec)?;
            let mut over = 0;
            for rep in 0..10u64 {
                let noisy = add_noise(&clean, sigma, mix_seed(61, rep))?;
                let stats = interval_statistics(&calc, &partition, &noisy)?;
                let sorted = stats.sorted_values();
                let estimate = sorted[k.div_ceil(2) - 1].sqrt();
                smallest_ratio = smallest_ratio.min(estimate / sigma);
                if estimate >= 2.0 * sigma {
                    over += 1;
                }
            }
            control_ok &= over >= 8;
        }
    }
    outcome(
        failed.is_empty() && control_ok,
        format!(
            "K_elbow {k_elbow}; {}/{cells} cells with >= 8/10 estimates within 50%{}; K in {{1, 2}} overestimate >= {smallest_ratio:.1}x (need 2x)",
            cells - failed.len(),
            if failed.is_empty() {
                String::new()
            } else {
                format!(" [missed: {}]", failed.join("; "))
            }
        ),
    )
}

struct ReferenceRow {
    signal: (usize, usize),
    sigma: f64,
    // PF, LLet, LLet+PF
    best: [f64; 3],
    mean: [f64; 3],
}

const TABLE_SWISSROLL: [ReferenceRow; 6] = [
    ReferenceRow {
        signal: (951, 1000),
        sigma: 0.005,
        best: [17.557, 20.580, 20.528],
        mean: [17.361, 20.035, 19.974],
    },
    ReferenceRow {
        signal: (501, 550),
        sigma: 0.005,
        best: [18.298, 8.244, 20.821],
        mean: [18.044, 8.140, 20.245],
    },
    ReferenceRow {
        signal: (951, 1000),
        sigma: 0.01,
        best: [12.183, 15.564, 15.701],
        mean: [10.433, 13.652, 13.760],
    },
    ReferenceRow {
        signal: (501, 550),
        sigma: 0.01,
        best: [13.121, 7.879, 16.204],
        mean: [11.165, 7.646, 14.518],
    },
    ReferenceRow {
        signal: (951, 1000),
        sigma: 0.015,
        best: [9.430, 12.661, 13.129],
        mean: [8.961, 12.127, 12.388],
    },
    ReferenceRow {
        signal: (501, 550),
        sigma: 0.015,
        best: [9.898, 7.611, 14.159],
        mean: [9.540, 7.481, 13.398],
    },
];

fn same_order(a: &[f64; 3], b: &[f64; 3]) -> bool {
    (0..3).all(|i| (0..3).all(|j| i == j || (a[i] < a[j]) == (b[i] < b[j])))
}

fn table_swissroll() -> Result<Outcome> {
    let start = Instant::now();
    let ws = swissroll(1000, 0)?;
    let config = ExperimentConfig {
        k: KChoice::Fixed(22),
        sigmas: vec![0.005, 0.01, 0.015],
        signals: vec![SignalSpec::new(951, 1000, 0), SignalSpec::new(501, 550, 0)],
        ..ExperimentConfig::default()
    };
    let rows = run_denoise_benchmark(&ws, &config)?;
    let methods = [Method::Pf, Method::LLet, Method::LLetPf];
    let mut within_tol = 0;
    let mut ordered = 0;
    let mut worst: f64 = 0.0;
    let mut lines = Vec::new();
    for reference in &TABLE_SWISSROLL {
        let id = SignalSpec::new(reference.signal.0, reference.signal.1, 0).id();
        let pick = |m: Method| {
            rows.iter()
                .find(|r| r.method == m && r.signal == id && r.sigma == reference.sigma)
        };
        let mut best = [0.0; 3];
        let mut mean = [0.0; 3];
        for (i, &m) in methods.iter().enumerate() {
            let row = pick(m).context("missing benchmark row")?;
            best[i] = row.best;
            mean[i] = row.mean;
        }
        let gap = (0..3)
            .map(|i| {
                (best[i] - reference.best[i])
                    .abs()
                    .max((mean[i] - reference.mean[i]).abs())
            })
            .fold(0.0, f64::max);
        worst = worst.max(gap);
        within_tol += usize::from(gap <= 1.5);
        ordered += usize::from(same_order(&best, &reference.best) && same_order(&mean, &reference.mean));
        lines.push(format!(
            "{id} s={}: mu {:.2}/{:.2}/{:.2}",
            reference.sigma, mean[0], mean[1], mean[2]
        ));
    }
    let (fast, secs) = within(Duration::from_secs(1800), start);
    outcome(
        within_tol == 6 && ordered == 6 && fast,
        format!(
            "{within_tol}/6 rows within 1.5 dB (largest gap {worst:.2} dB), {ordered}/6 orderings kept, {secs:.1} s; PF/LLet/LLet+PF {}",
            lines.join(", ")
        ),
    )
}

const TABLE_SI2: [((usize, usize), f64, f64, f64); 6] = [
    ((720, 769), 0.005, 21.849, 25.170),
    ((370, 419), 0.005, 17.813, 20.673),
    ((720, 769), 0.01, 16.572, 20.558),
    ((370, 419), 0.01, 12.151, 17.121),
    ((720, 769), 0.02, 11.104, 14.711),
    ((370, 419), 0.02, 6.925, 12.677),
];

fn si2_path() -> PathBuf {
    std::env::var_os("LOCLET_SI2_MTX")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/Si2.mtx"))
}

fn table_si2() -> Result<Outcome> {
    let path = si2_path();
    if !path.exists() {
        return outcome(false, format!("Si2 matrix not available at {}", path.display()));
    }
    let ws = Workspace::load(&path.display().to_string().parse()?, CAP)?;
    let n = ws.n();
    let signals: Vec<SignalSpec> = [(720, 769), (370, 419)]
        .iter()
        .map(|&(a, b)| SignalSpec::new(a.min(n), b.min(n), 0))
        .collect();
    ensure!(
        signals.iter().all(|s| s.first <= s.last),
        "Si2 graph too small: n = {n}"
    );
    let config = ExperimentConfig {
        k: KChoice::Fixed(22),
        sigmas: vec![0.005, 0.01, 0.02],
        signals,
        ..ExperimentConfig::default()
    };
    let rows = run_denoise_benchmark(&ws, &config)?;
    let mut good = 0;
    let mut better = 0;
    for &((a, b), sigma, _, reference_mu) in &TABLE_SI2 {
        let id = SignalSpec::new(a.min(n), b.min(n), 0).id();
        let mu = |m: Method| {
            rows.iter()
                .find(|r| r.method == m && r.signal == id && r.sigma == sigma)
                .map(|r| r.mean)
                .context("missing benchmark row")
        };
        let (pf, ours) = (mu(Method::Pf)?, mu(Method::LLetPf)?);
        good += usize::from((ours - reference_mu).abs() <= 1.5);
        better += usize::from(ours > pf);
    }
    outcome(
        good == 6 && better == 6,
        format!("n = {n}: {good}/6 cells within 1.5 dB, LLet+PF above PF in {better}/6"),
    )
}

fn support_approximation() -> Result<Outcome> {
    let alpha = 1e-3;
    let trials = 10_000u64;
    let ws = swissroll(200, 3)?;
    let eig = ws.oracle()?;
    let regular = Partition::regular(ws.op.lambda_max(), 10)?;

    let exact = with_exact_counts(eig, regular.clone())?;
    let oracle = OracleCalculus::new(eig);
    let damped_calc = ChebyshevCalculus::new(&ws.op, 200, Damping::Jackson)?;
    let counts = hutchinson_interval_counts(&ws.op, &regular, 200, 100, 91)?;
    let damped = regular
        .clone()
        .with_counts(counts, loclet::spectrum::CountMode::Estimated)?;

    let false_positive_rate = |calc: &(dyn Fn(&[f64]) -> Result<BlockStats<f64>> + Sync)| -> Result<f64> {
        let tallies: Vec<(usize, usize)> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let xi = gaussian_vector(ws.n(), 1.0, &mut rng_from(92, t));
                let stats = calc(&xi)?;
                let s = support_from_statistics(&stats, 1.0, alpha)?;
                Ok((s.selected.len(), stats.valid_count()))
            })
            .collect::<Result<_>>()?;
        let (hits, tests) = tallies.iter().fold((0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
        Ok(hits as f64 / tests as f64)
    };
    let oracle_rate = false_positive_rate(&|xi| Ok(interval_statistics(&oracle, &exact, xi)?))?;
    let damped_rate = false_positive_rate(&|xi| Ok(interval_statistics(&damped_calc, &damped, xi)?))?;

    // single-interval support just above the level that guarantees p_k <= alpha
    let counts = exact.counts().context("counts")?;
    let target = (0..exact.len())
        .max_by(|&a, &b| counts[a].total_cmp(&counts[b]))
        .context("empty partition")?;
    let n_k = counts[target];
    let tail = gaussian_tail_threshold(alpha / 2.0, 1.0)?;
    let q = chi2_difference_quantile(1.0 - alpha / 2.0, n_k, n_k, 1.0)?;
    let ratio = tail + (tail * tail + q.max(0.0)).sqrt();
    let members: Vec<usize> = (0..eig.n())
        .filter(|&l| exact.locate(eig.values()[l]) == Some(target))
        .collect();
    let sigma = 0.05;
    let recoveries = 2_000u64;
    let outcomes: Vec<(bool, bool)> = (0..recoveries)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_from(93, t);
            let w: Vec<f64> = gaussian_vector(members.len(), 1.0, &mut rng);
            let mut f = vec![0.0; eig.n()];
            for (&l, &c) in members.iter().zip(&w) {
                f.iter_mut().zip(eig.vector(l)).for_each(|(x, &v)| *x += c * v);
            }
            let scale = 1.001 * ratio * sigma / norm(&f);
            f.iter_mut().for_each(|x| *x *= scale);
            let noisy = add_noise(&f, sigma, mix_seed(94, t))?;
            let stats = interval_statistics(&oracle, &exact, &noisy)?;
            let s = support_from_statistics(&stats, sigma, alpha)?;
            Ok((s.selected.contains(&target), s.selected == [target]))
        })
        .collect::<Result<_>>()?;
    let found = outcomes.iter().filter(|o| o.0).count() as f64 / recoveries as f64;
    let exact_sets = outcomes.iter().filter(|o| o.1).count() as f64 / recoveries as f64;
    let allowed_spurious = 2.0 * alpha * (exact.len() - 1) as f64;
    outcome(
        oracle_rate <= 2.0 * alpha
            && damped_rate <= 2.0 * alpha
            && found >= 1.0 - alpha
            && exact_sets >= 1.0 - alpha - allowed_spurious,
        format!(
            "null rate {oracle_rate:.2e} exact / {damped_rate:.2e} damped (<= {:.0e}); interval {target} (n_k = {n_k}) at ||f_k||/sigma = {:.2}: found {:.2}%, exact set {:.2}%",
            2.0 * alpha,
            1.001 * ratio,
            100.0 * found,
            100.0 * exact_sets
        ),
    )
}

fn warped_identity() -> Result<Outcome> {
    let (op, eig) = random_operator(100, 0.08, 101)?;
    let density = kpm_cumulative_density(&op, 100, 30, 102)?;
    let kernel = WarpedKernel::new(vec![0.5, 0.5], 4.0, 8, 3)?;
    let deviation = warped_identity_deviation(&eig, &kernel, |l| density.cdf(l));
    outcome(
        deviation <= 1e-10,
        format!("max deviation {deviation:.2e} (<= 1e-10), n = 100, J = 8, R = 3"),
    )
}

fn trivial_denoising() -> Result<Outcome> {
    let ws = swissroll(200, 4)?;
    let eig = ws.oracle()?;
    let partition = Partition::regular(ws.op.lambda_max(), 10)?;
    let support: Vec<usize> = (0..eig.n())
        .filter(|&l| matches!(partition.locate(eig.values()[l]), Some(2) | Some(6)))
        .collect();
    let outside = eig.n() - support.len();
    let mut f = vec![0.0; eig.n()];
    let w: Vec<f64> = gaussian_vector(support.len(), 1.0, &mut rng_from(111, 0));
    for (&l, &c) in support.iter().zip(&w) {
        f.iter_mut().zip(eig.vector(l)).for_each(|(x, &v)| *x += c * v);
    }
    let sigma = 0.1;
    let draws = 10_000u64;
    let pairs: Vec<(f64, f64)> = (0..draws)
        .into_par_iter()
        .map(|d| {
            let noisy = add_noise(&f, sigma, mix_seed(112, d))?;
            let projected = eig.project_indices(&support, &noisy)?;
            let sq = |v: &[f64]| v.iter().zip(&f).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
            Ok((sq(&projected), sq(&noisy)))
        })
        .collect::<Result<_>>()?;
    let n = draws as f64;
    let lhs = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let rhs = pairs.iter().map(|p| p.1).sum::<f64>() / n - sigma * sigma * outside as f64;
    let diffs: Vec<f64> = pairs
        .iter()
        .map(|p| p.0 - p.1 + sigma * sigma * outside as f64)
        .collect();
    let mean = diffs.iter().sum::<f64>() / n;
    let se = (diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt();
    outcome(
        mean.abs() <= 3.0 * se,
        format!(
            "E||f - f_I||^2 = {lhs:.4}, E||f - noisy||^2 - sigma^2 |outside| = {rhs:.4}, gap {:.2} SE",
            mean.abs() / se
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("Parseval unity and reconstruction", parseval_unity),
        ("LocLet decomposition identity", loclet_identity),
        ("Hutchinson counting", hutchinson_counting),
        ("block statistics under pure noise", block_distribution),
        ("concentration bounds", concentration_bounds),
        ("noise-level estimation", noise_estimation),
        ("swissroll denoising table", table_swissroll),
        ("Si2 spot-check", table_si2),
        ("support approximation", support_approximation),
        ("warped-frame identity", warped_identity),
        ("trivial-denoising identity", trivial_denoising),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let result = run().unwrap_or_else(|e| Outcome {
            pass: false,
            detail: format!("error: {e:#}"),
        });
        failures += usize::from(!result.pass);
        println!(
            "criterion {:>2} {}: {name}: {}",
            i + 1,
            if result.pass { "PASS" } else { "FAIL" },
            result.detail
        );
    }
    println!(
        "acceptance: {}/{} criteria pass",
        criteria.len() - failures,
        criteria.len()
    );
    let strict = std::env::var("LOCLET_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if strict && failures > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
