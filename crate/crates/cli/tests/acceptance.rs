//! Acceptance suite. Each criterion prints one `PASS`/`FAIL` line and then
//! asserts, so `cargo test --test acceptance -- --nocapture` gives a report.

use std::path::Path;
use std::time::{Duration, Instant};

use drift_arbiter::arbiter::tree::Node;
use drift_arbiter::drift::DEFAULT_WEIGHT_FLOOR;
use drift_arbiter::{
    backtest, concentration_bounds, paired_t_test, softmax_weights, solve_reweighting, synthesize,
    PipelineConfig, RegressionTree, SolverOptions, SynthConfig, TreeRow,
};
use drift_arbiter_cli::config::Overrides;
use drift_arbiter_cli::{cmd_run, cmd_synth};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn report(id: &str, pass: bool, detail: String) {
    println!("{id} {} {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{id} failed: {detail}");
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn gaussian(rng: &mut ChaCha8Rng, n: usize, mu: f64, sd: f64) -> Vec<f64> {
    let d = Normal::new(mu, sd).unwrap();
    (0..n).map(|_| d.sample(rng)).collect()
}

fn objective(alpha: &[f64], source: &[f64], target: &[f64]) -> f64 {
    let wm = alpha.iter().zip(source).map(|(a, s)| a * s).sum::<f64>() / source.len() as f64;
    (wm - mean(target)).powi(2)
}

/// Range of `mean(alpha * source)` over the feasible set with
/// `mean(alpha) = 1`: a fractional knapsack filled greedily.
fn attainable_range(source: &[f64], floor: f64, bound: f64) -> (f64, f64) {
    let m = source.len() as f64;
    let mut sorted = source.to_vec();
    sorted.sort_by(f64::total_cmp);
    let fill = |order: &mut dyn Iterator<Item = &f64>| {
        let mut budget = m - m * floor;
        let mut total = floor * source.iter().sum::<f64>();
        for &v in order {
            let take = budget.min(bound - floor);
            total += take * v;
            budget -= take;
            if budget <= 0.0 {
                break;
            }
        }
        total / m
    };
    (fill(&mut sorted.iter()), fill(&mut sorted.iter().rev()))
}

#[test]
fn a1_reweighting_qp() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let opts = SolverOptions::default();
    let bound = 5.0;
    let start = Instant::now();
    let (mut attainable, mut worst, mut violations) = (0, 0.0_f64, 0);
    for i in 0..500 {
        let len = [8, 32, 128][i % 3];
        let mu_s = rng.random_range(-5.0..5.0);
        let sd_s = rng.random_range(0.2..3.0);
        let mu_t = mu_s + rng.random_range(-3.0..3.0);
        let source = gaussian(&mut rng, len, mu_s, sd_s);
        let target = gaussian(&mut rng, len, mu_t, sd_s);
        let r = solve_reweighting(&source, &target, bound, &opts).unwrap();
        let feasible = r
            .alpha
            .iter()
            .all(|a| (DEFAULT_WEIGHT_FLOOR..=bound).contains(a))
            && (mean(&r.alpha) - 1.0).abs() <= 1e-9;
        let not_worse = r.objective <= objective(&vec![1.0; len], &source, &target);
        if !(feasible && not_worse) {
            violations += 1;
        }
        let (lo, hi) = attainable_range(&source, DEFAULT_WEIGHT_FLOOR, bound);
        if (lo..=hi).contains(&mean(&target)) {
            attainable += 1;
            worst = worst.max(r.objective);
        }
    }
    let elapsed = start.elapsed();
    report(
        "A1",
        worst <= 1e-10 && violations == 0 && elapsed < Duration::from_secs(5) && attainable > 0,
        format!("attainable={attainable}/500 worst_objective={worst:.3e} violations={violations} time={elapsed:.2?}"),
    );
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64, depth: u32) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        eps: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * eps {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1)
            + rec(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    rec(
        f,
        a,
        b,
        fa,
        fm,
        fb,
        (b - a) / 6.0 * (fa + 4.0 * fm + fb),
        eps,
        depth,
    )
}

/// Mass of the unnormalised t density on `[a, inf)`, integrated over
/// `t = a + u / (1 - u)`.
fn t_tail_mass(a: f64, nu: f64) -> f64 {
    let density = |t: f64| (-(nu + 1.0) / 2.0 * (t * t / nu).ln_1p()).exp();
    let h = |u: f64| {
        if u >= 1.0 {
            return if nu == 1.0 { 1.0 } else { 0.0 };
        }
        let w = 1.0 - u;
        density(a + u / w) / (w * w)
    };
    adaptive_simpson(&h, 0.0, 1.0, 1e-14, 60)
}

fn oracle_two_sided_p(t: f64, nu: f64) -> f64 {
    t_tail_mass(t.abs(), nu) / t_tail_mass(0.0, nu)
}

#[test]
fn a2_paired_t_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let start = Instant::now();
    let mut worst = 0.0_f64;
    for _ in 0..200 {
        let m = rng.random_range(3..=60);
        let shift = rng.random_range(-1.0..1.0);
        let x = gaussian(&mut rng, m, 0.0, 1.0);
        let y: Vec<f64> = x
            .iter()
            .map(|v| v + shift + rng.random_range(-1.5..1.5))
            .collect();
        let r = paired_t_test(&x, &y).unwrap();
        let d: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
        let md = mean(&d);
        let s = (d.iter().map(|v| (v - md).powi(2)).sum::<f64>() / (m - 1) as f64).sqrt();
        let t = md / (s / (m as f64).sqrt());
        assert!((t - r.t_stat).abs() <= 1e-9 * (1.0 + t.abs()));
        worst = worst.max((oracle_two_sided_p(t, (m - 1) as f64) - r.p_value).abs());
    }
    let elapsed = start.elapsed();
    report(
        "A2",
        worst <= 1e-7 && elapsed < Duration::from_secs(5),
        format!("max_p_error={worst:.3e} time={elapsed:.2?}"),
    );
}

#[test]
fn a3_drift_adjustment_helps_backtest() {
    let config = PipelineConfig {
        slice_len: 20,
        slice_count: 6,
        quantiles: 4,
        ..PipelineConfig::default()
    };
    let start = Instant::now();
    let (mut wins, mut sum_adj, mut sum_plain) = (0, 0.0, 0.0);
    for seed in 0..25 {
        let series = synthesize(&SynthConfig {
            segment_means: vec![100.0, 112.0, 125.0],
            segment_length: 60,
            noise_std: 3.0,
            seed,
        })
        .unwrap();
        let r = backtest(&series, &config, 30).unwrap();
        if r.mean_mape_adjusted <= r.mean_mape_plain {
            wins += 1;
        }
        sum_adj += r.mean_mape_adjusted;
        sum_plain += r.mean_mape_plain;
    }
    let elapsed = start.elapsed();
    let (agg_adj, agg_plain) = (sum_adj / 25.0, sum_plain / 25.0);
    report(
        "A3",
        wins >= 15 && agg_adj < agg_plain && elapsed < Duration::from_secs(120),
        format!("wins={wins}/25 mean_mape_adjusted={agg_adj:.4} mean_mape_plain={agg_plain:.4} time={elapsed:.2?}"),
    );
}

/// Bounded slices: uniform on `[-R, R]` shifted by a random offset, then
/// clipped, so `|x| <= R` holds by construction.
fn bounded_pair(rng: &mut ChaCha8Rng, len: usize, r: f64) -> (Vec<f64>, Vec<f64>) {
    let offset = rng.random_range(-0.3..0.3) * r;
    let draw = |rng: &mut ChaCha8Rng, off: f64| -> Vec<f64> {
        (0..len)
            .map(|_| (rng.random_range(-r..r) * 0.6 + off).clamp(-r, r))
            .collect()
    };
    let s = draw(rng, 0.0);
    let t = draw(rng, offset);
    (s, t)
}

#[test]
fn a4_residual_bound() {
    let (len, r, bound, delta) = (32, 10.0, 5.0, 0.05);
    let limits = concentration_bounds(bound, r, len, delta).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let opts = SolverOptions::default();
    let start = Instant::now();
    let mut exceed = 0;
    for _ in 0..1000 {
        let (s, t) = bounded_pair(&mut rng, len, r);
        let a = solve_reweighting(&s, &t, bound, &opts).unwrap();
        if a.objective.sqrt() > limits.residual_bound {
            exceed += 1;
        }
    }
    let elapsed = start.elapsed();
    let rate = exceed as f64 / 1000.0;
    report(
        "A4",
        rate <= 0.07 && elapsed < Duration::from_secs(30),
        format!(
            "exceedances={exceed}/1000 bound={:.4} time={elapsed:.2?}",
            limits.residual_bound
        ),
    );
}

#[test]
fn a5_weight_mean_bound() {
    let (len, r, bound, delta) = (32, 10.0, 5.0, 0.05);
    let limits = concentration_bounds(bound, r, len, delta).unwrap();
    let eps = limits.weight_mean_bound;
    let opts = SolverOptions {
        epsilon: eps,
        ..SolverOptions::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let start = Instant::now();
    let mut exceed = 0;
    for _ in 0..1000 {
        let (s, t) = bounded_pair(&mut rng, len, r);
        let a = solve_reweighting(&s, &t, bound, &opts).unwrap();
        if (mean(&a.alpha) - 1.0).abs() > eps {
            exceed += 1;
        }
    }
    let elapsed = start.elapsed();
    report(
        "A5",
        exceed as f64 / 1000.0 <= 0.07,
        format!("epsilon={eps:.4} exceedances={exceed}/1000 time={elapsed:.2?}"),
    );
}

fn sse(targets: &[f64]) -> f64 {
    if targets.is_empty() {
        return 0.0;
    }
    let m = mean(targets);
    targets.iter().map(|t| (t - m).powi(2)).sum()
}

fn exhaustive_root(rows: &[TreeRow], min_leaf: usize) -> Option<(usize, f64)> {
    let parent = sse(&rows.iter().map(|r| r.target).collect::<Vec<_>>());
    let eps = 1e-12 * parent.max(1.0);
    let mut best: Option<(usize, f64, f64)> = None;
    for f in 0..rows[0].features.len() {
        let mut xs: Vec<f64> = rows.iter().map(|r| r.features[f]).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        for w in xs.windows(2) {
            let thr = w[0] + (w[1] - w[0]) / 2.0;
            let (l, r): (Vec<&TreeRow>, Vec<&TreeRow>) =
                rows.iter().partition(|row| row.features[f] <= thr);
            if l.len() < min_leaf || r.len() < min_leaf {
                continue;
            }
            let total = sse(&l.iter().map(|x| x.target).collect::<Vec<_>>())
                + sse(&r.iter().map(|x| x.target).collect::<Vec<_>>());
            if best.is_none_or(|b| total < b.2 - eps) {
                best = Some((f, thr, total));
            }
        }
    }
    best.filter(|b| b.2 < parent - eps).map(|b| (b.0, b.1))
}

#[test]
fn a6_tree_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let (mut root_mismatch, mut worst_leaf) = (0, 0.0_f64);
    for _ in 0..300 {
        let n = rng.random_range(1..=30);
        let dim = rng.random_range(1..=3);
        let discrete = rng.random_bool(0.3);
        let rows: Vec<TreeRow> = (0..n)
            .map(|_| TreeRow {
                features: (0..dim)
                    .map(|_| {
                        if discrete {
                            rng.random_range(0..4) as f64
                        } else {
                            rng.random_range(-5.0..5.0)
                        }
                    })
                    .collect(),
                target: rng.random_range(0.0..50.0),
            })
            .collect();
        let tree = RegressionTree::fit(&rows, 3, 1).unwrap();
        let chosen = match tree.root() {
            Node::Split {
                feature, threshold, ..
            } => Some((*feature, *threshold)),
            Node::Leaf { .. } => None,
        };
        if chosen != exhaustive_root(&rows, 1) {
            root_mismatch += 1;
        }
        let mut leaves: std::collections::BTreeMap<usize, Vec<f64>> = Default::default();
        for r in &rows {
            leaves
                .entry(tree.leaf_id(&r.features))
                .or_default()
                .push(r.target);
        }
        for (id, targets) in leaves {
            if let Node::Leaf { prediction, .. } = tree.nodes()[id] {
                worst_leaf = worst_leaf.max((prediction - mean(&targets)).abs());
            } else {
                worst_leaf = f64::INFINITY;
            }
        }
    }
    report(
        "A6",
        root_mismatch == 0 && worst_leaf <= 1e-12,
        format!("root_mismatches={root_mismatch}/300 max_leaf_error={worst_leaf:.3e}"),
    );
}

#[test]
fn a7_softmax_contract() {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut failures = Vec::new();
    for case in 0..1000 {
        let len = rng.random_range(1..=8);
        let mut errors: Vec<f64> = (0..len).map(|_| rng.random_range(0.0..100.0)).collect();
        if case % 4 == 0 {
            errors[rng.random_range(0..len)] = 1e4;
        }
        let w = softmax_weights(&errors).unwrap();
        if w.iter().any(|v| !v.is_finite()) || (w.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            failures.push(format!("case {case}: normalisation"));
        }
        for i in 0..len {
            for j in 0..len {
                // weights below the smallest double cannot be ordered
                if errors[i] < errors[j] && w[j] > 0.0 && w[i] <= w[j] {
                    failures.push(format!("case {case}: order"));
                }
            }
        }
        let shift = rng.random_range(-1e3..1e3);
        let shifted: Vec<f64> = errors.iter().map(|e| e + shift).collect();
        let ws = softmax_weights(&shifted).unwrap();
        if w.iter().zip(&ws).any(|(a, b)| (a - b).abs() > 1e-12) {
            failures.push(format!("case {case}: shift"));
        }
    }
    report(
        "A7",
        failures.is_empty(),
        format!("failures={} {:?}", failures.len(), failures.first()),
    );
}

#[test]
fn a8_run_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("config.json");
    std::fs::write(
        &cfg,
        r#"{
  "synth": {"segment_means": [100, 112, 125], "segment_length": 60, "noise_std": 3, "seed": 8},
  "pipeline": {"slice_len": 20, "slice_count": 6, "quantiles": 4, "horizon": 5}
}"#,
    )
    .unwrap();
    let series = dir.path().join("series.csv");
    cmd_synth(&cfg, &series, Overrides::default()).unwrap();
    let run = |out: &Path| cmd_run(&series, &cfg, out, Overrides::default()).unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run(&a);
    run(&b);
    let same = ["forecast.csv", "decision.json"]
        .iter()
        .all(|f| std::fs::read(a.join(f)).unwrap() == std::fs::read(b.join(f)).unwrap());
    report(
        "A8",
        same,
        "forecast.csv and decision.json compared byte for byte".into(),
    );
}
