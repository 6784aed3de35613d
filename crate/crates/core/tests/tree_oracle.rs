use drift_arbiter::arbiter::tree::Node;
use drift_arbiter::{RegressionTree, TreeRow};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sse(targets: &[f64]) -> f64 {
    if targets.is_empty() {
        return 0.0;
    }
    let m = targets.iter().sum::<f64>() / targets.len() as f64;
    targets.iter().map(|t| (t - m).powi(2)).sum()
}

/// Every feature, every midpoint between distinct values, partition by
/// `x <= threshold`. Returns (feature, threshold, sse) of the winner with
/// ties to the lowest feature, then lowest threshold.
fn brute_force_root(rows: &[TreeRow], min_leaf: usize) -> Option<(usize, f64, f64)> {
    let dim = rows[0].features.len();
    let parent = sse(&rows.iter().map(|r| r.target).collect::<Vec<_>>());
    let eps = 1e-12 * parent.max(1.0);
    let mut best: Option<(usize, f64, f64)> = None;
    for f in 0..dim {
        let mut xs: Vec<f64> = rows.iter().map(|r| r.features[f]).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        for w in xs.windows(2) {
            let thr = w[0] + (w[1] - w[0]) / 2.0;
            let left: Vec<f64> = rows
                .iter()
                .filter(|r| r.features[f] <= thr)
                .map(|r| r.target)
                .collect();
            let right: Vec<f64> = rows
                .iter()
                .filter(|r| r.features[f] > thr)
                .map(|r| r.target)
                .collect();
            if left.len() < min_leaf || right.len() < min_leaf {
                continue;
            }
            let total = sse(&left) + sse(&right);
            if best.is_none_or(|b| total < b.2 - eps) {
                best = Some((f, thr, total));
            }
        }
    }
    best.filter(|b| b.2 < parent - eps)
}

fn random_rows(rng: &mut ChaCha8Rng) -> Vec<TreeRow> {
    let n = rng.random_range(1..=30);
    let dim = rng.random_range(1..=3);
    let discrete = rng.random_bool(0.3);
    (0..n)
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
        .collect()
}

#[test]
fn root_split_matches_exhaustive_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for case in 0..300 {
        let rows = random_rows(&mut rng);
        let min_leaf = rng.random_range(1..=3);
        let tree = RegressionTree::fit(&rows, 3, min_leaf).unwrap();
        let oracle = if rows.len() < 2 * min_leaf {
            None
        } else {
            brute_force_root(&rows, min_leaf)
        };
        match (tree.root(), oracle) {
            (Node::Leaf { .. }, None) => {}
            (
                Node::Split {
                    feature, threshold, ..
                },
                Some((f, t, _)),
            ) => {
                assert_eq!((*feature, *threshold), (f, t), "case {case}");
            }
            (root, oracle) => panic!("case {case}: tree {root:?} vs oracle {oracle:?}"),
        }
    }
}

#[test]
fn leaves_hold_their_rows_mean() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..300 {
        let rows = random_rows(&mut rng);
        let min_leaf = rng.random_range(1..=2);
        let max_depth = rng.random_range(0..=4);
        let tree = RegressionTree::fit(&rows, max_depth, min_leaf).unwrap();
        assert!(tree.depth() <= max_depth);
        let mut by_leaf: std::collections::BTreeMap<usize, Vec<f64>> = Default::default();
        for r in &rows {
            by_leaf
                .entry(tree.leaf_id(&r.features))
                .or_default()
                .push(r.target);
        }
        for (id, targets) in by_leaf {
            let Node::Leaf { prediction, count } = tree.nodes()[id] else {
                panic!("routed to a split node");
            };
            assert_eq!(count, targets.len());
            // only an unsplit root may hold fewer rows than min_leaf
            assert!(count >= min_leaf || tree.nodes().len() == 1);
            let mean = targets.iter().sum::<f64>() / targets.len() as f64;
            assert!((prediction - mean).abs() <= 1e-12);
        }
    }
}
