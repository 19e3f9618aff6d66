mod common;

use aviary_sense::aggregate::{correlate_all, CorrelationEntry, CorrelationReport, WeeklyFeatureTable, FEATURE_NAMES};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use common::oracle;

const WEEKS: std::ops::RangeInclusive<u32> = 5..=20;

fn normal<R: Rng>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

fn table(columns: &[Vec<Option<f64>>]) -> WeeklyFeatureTable {
    let weeks: Vec<u32> = WEEKS.collect();
    WeeklyFeatureTable {
        values: (0..weeks.len())
            .map(|i| columns.iter().map(|c| c[i]).collect())
            .collect(),
        weeks,
        columns: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
        single_session_weeks: Vec::new(),
    }
}

/// Feature blocks sharing a weekly latent: flow, acoustic, thermal. The
/// two env columns stand alone.
const BLOCKS: [&[usize]; 3] = [&[0, 1, 2], &[3, 4, 5], &[6, 7]];

fn block_of(j: usize) -> Option<usize> {
    BLOCKS.iter().position(|b| b.contains(&j))
}

/// Each block member is its block latent plus 0.3 sd of own noise.
fn block_columns<R: Rng>(rng: &mut R, n: usize) -> Vec<Vec<f64>> {
    let latents: Vec<Vec<f64>> = BLOCKS.iter().map(|_| (0..n).map(|_| normal(rng)).collect()).collect();
    (0..10)
        .map(|j| match block_of(j) {
            Some(b) => latents[b].iter().map(|l| l + 0.3 * normal(rng)).collect(),
            None => (0..n).map(|_| normal(rng)).collect(),
        })
        .collect()
}

/// `y` with Pearson correlation exactly `r` to `x`: noise orthogonalised
/// against x, both standardised.
fn exactly_correlated<R: Rng>(x: &[f64], r: f64, rng: &mut R) -> Vec<f64> {
    let zx = oracle::zscore(x);
    let e: Vec<f64> = x.iter().map(|_| normal(rng)).collect();
    let ze = oracle::zscore(&e);
    let proj = ze.iter().zip(&zx).map(|(a, b)| a * b).sum::<f64>() / zx.iter().map(|v| v * v).sum::<f64>();
    let ortho = oracle::zscore(&ze.iter().zip(&zx).map(|(a, b)| a - proj * b).collect::<Vec<_>>());
    zx.iter()
        .zip(&ortho)
        .map(|(a, b)| r * a + (1.0 - r * r).sqrt() * b)
        .collect()
}

fn pairs() -> impl Iterator<Item = (usize, usize)> {
    (0..10).flat_map(|a| (a + 1..10).map(move |b| (a, b)))
}

fn wrap(c: Vec<f64>) -> Vec<Option<f64>> {
    c.into_iter().map(Some).collect()
}

fn key(e: &CorrelationEntry) -> (String, String) {
    if e.feature_a <= e.feature_b {
        (e.feature_a.clone(), e.feature_b.clone())
    } else {
        (e.feature_b.clone(), e.feature_a.clone())
    }
}

fn assert_same(a: &CorrelationReport, b: &CorrelationReport, tol: f64) {
    assert_eq!(a.entries.len(), b.entries.len());
    assert_eq!(a.family_size, b.family_size);
    let close = |x: Option<f64>, y: Option<f64>| match (x, y) {
        (Some(x), Some(y)) => (x - y).abs() <= tol * x.abs().max(1e-300) || x == y,
        (None, None) => true,
        _ => false,
    };
    for e in &a.entries {
        let f = b.get(&e.feature_a, &e.feature_b).expect("pair present");
        assert_eq!(key(e), key(f));
        assert!(close(e.r, f.r), "{key:?} r {:?} vs {:?}", e.r, f.r, key = key(e));
        assert!(close(e.p_raw, f.p_raw), "{:?} p", key(e));
        assert!(close(e.q, f.q), "{:?} q", key(e));
        assert_eq!(e.significant, f.significant, "{:?}", key(e));
        assert_eq!(e.n_pairs, f.n_pairs);
    }
}

/// Random table with a few missing cells.
fn holey_table(seed: u64) -> WeeklyFeatureTable {
    let mut rng = common::rng(seed);
    let cols = block_columns(&mut rng, 16)
        .into_iter()
        .map(|c| {
            c.into_iter()
                .map(|v| if rng.random_bool(0.1) { None } else { Some(v) })
                .collect()
        })
        .collect::<Vec<_>>();
    table(&cols)
}

#[test]
fn column_order_does_not_matter() {
    let mut rng = common::rng(1);
    for seed in 0..20 {
        let t = holey_table(seed);
        let base = correlate_all(&t, 0.05).unwrap();
        let mut order = FEATURE_NAMES.to_vec();
        order.shuffle(&mut rng);
        let shuffled = correlate_all(&t.with_column_order(&order).unwrap(), 0.05).unwrap();
        assert_same(&base, &shuffled, 0.0);
    }
}

#[test]
fn row_order_does_not_matter() {
    let mut rng = common::rng(2);
    for seed in 100..120 {
        let t = holey_table(seed);
        let base = correlate_all(&t, 0.05).unwrap();
        let mut idx: Vec<usize> = (0..t.weeks.len()).collect();
        idx.shuffle(&mut rng);
        let permuted = WeeklyFeatureTable {
            weeks: idx.iter().map(|&i| t.weeks[i]).collect(),
            values: idx.iter().map(|&i| t.values[i].clone()).collect(),
            ..t.clone()
        };
        // summation order changes, so agreement is to rounding
        assert_same(&base, &correlate_all(&permuted, 0.05).unwrap(), 1e-12);
    }
}

#[test]
fn family_is_the_defined_pairs() {
    for seed in 200..230 {
        let mut t = holey_table(seed);
        if seed % 3 == 0 {
            for row in &mut t.values {
                row[8] = Some(21.5);
            }
        }
        let rep = correlate_all(&t, 0.05).unwrap();
        assert_eq!(rep.entries.len(), 45);
        let defined = rep.entries.iter().filter(|e| e.r.is_some()).count();
        assert_eq!(rep.family_size, defined);
        if seed % 3 == 0 {
            assert_eq!(defined, 36);
        }
        for e in &rep.entries {
            match (e.r, e.p_raw, e.q) {
                (Some(r), Some(p), Some(q)) => {
                    assert!((-1.0..=1.0).contains(&r));
                    assert!(q >= p, "{:?}: q {q} < p {p}", key(e));
                }
                (None, None, None) => assert!(!e.significant),
                other => panic!("{:?}: partial entry {other:?}", key(e)),
            }
        }
    }
}

#[test]
fn pairwise_deletion_matches_the_complete_rows() {
    let t = holey_table(7);
    let rep = correlate_all(&t, 0.05).unwrap();
    for e in &rep.entries {
        let (a, b) = (
            t.column_index(&e.feature_a).unwrap(),
            t.column_index(&e.feature_b).unwrap(),
        );
        let (x, y): (Vec<f64>, Vec<f64>) = t.values.iter().filter_map(|r| Some((r[a]?, r[b]?))).unzip();
        assert_eq!(e.n_pairs, x.len());
        let (r, p) = oracle::pearson(&x, &y);
        approx::assert_relative_eq!(e.r.unwrap(), r, max_relative = 1e-12);
        approx::assert_relative_eq!(e.p_raw.unwrap(), p, max_relative = 1e-8, epsilon = 1e-12);
    }
}

fn planted_table(seed: u64) -> WeeklyFeatureTable {
    let mut rng = common::rng(seed);
    let mut cols = block_columns(&mut rng, 16);
    cols[9] = exactly_correlated(&cols[4], 0.7, &mut rng);
    table(&cols.into_iter().map(wrap).collect::<Vec<_>>())
}

/// Pairs carrying real dependence: within-block pairs, the planted
/// zcr~rel_humidity link, and humidity's induced links to zcr's block.
fn dependent(a: usize, b: usize) -> bool {
    let rh_block = |j: usize| j == 9 || block_of(j) == Some(1);
    (block_of(a).is_some() && block_of(a) == block_of(b)) || (rh_block(a) && rh_block(b))
}

#[test]
fn planted_humidity_coupling_is_found() {
    let (mut null, mut null_sig, mut planted_sig) = (0, 0, 0);
    let seeds = 100;
    for seed in 0..seeds {
        let t = planted_table(5000 + seed);
        let rep = correlate_all(&t, 0.05).unwrap();
        let e = rep.get("zcr", "rel_humidity").unwrap();
        approx::assert_relative_eq!(e.r.unwrap(), 0.7, epsilon = 1e-12);
        if e.significant {
            planted_sig += 1;
        }
        for (a, b) in pairs().filter(|&(a, b)| !dependent(a, b)) {
            null += 1;
            if rep.get(FEATURE_NAMES[a], FEATURE_NAMES[b]).unwrap().significant {
                null_sig += 1;
            }
        }
    }
    assert_eq!(
        planted_sig, seeds,
        "planted pair significant in {planted_sig} of {seeds} seeds"
    );
    assert!(null_sig * 10 <= null, "{null_sig} of {null} null pairs significant");
}

#[test]
fn within_modality_correlations_dominate() {
    let seeds = 200;
    let mut held = 0;
    for seed in 0..seeds {
        let mut rng = common::rng(9000 + seed);
        let cols = block_columns(&mut rng, 16);
        let rep = correlate_all(&table(&cols.into_iter().map(wrap).collect::<Vec<_>>()), 0.05).unwrap();
        let (mut within, mut across) = (f64::INFINITY, 0.0f64);
        for (a, b) in pairs() {
            let r = rep.get(FEATURE_NAMES[a], FEATURE_NAMES[b]).unwrap().r.unwrap().abs();
            match (block_of(a), block_of(b)) {
                (Some(x), Some(y)) if x == y => within = within.min(r),
                (Some(_), Some(_)) => across = across.max(r),
                _ => {}
            }
        }
        if within > across {
            held += 1;
        }
    }
    assert!(
        held * 100 >= seeds * 95,
        "weakest within-block |r| beat strongest cross-block |r| in {held} of {seeds}"
    );
}
