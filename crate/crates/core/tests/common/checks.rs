//! Acceptance checks shared by the acceptance runner and the statistics
//! integration tests. Each returns `Ok(detail)` or `Err(failures)`.

use aviary_sense::special;
use aviary_sense::stats::{
    anova_oneway, bh_fdr, kruskal_wallis, levene, paired_t, pearson, srange_sf, tukey_hsd, zscore, Df, LeveneCenter,
    StatsError,
};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::oracle;

pub type Check = Result<String, String>;

/// Collects failed comparisons and the worst deviation seen.
#[derive(Default)]
pub struct Tally {
    pub failures: Vec<String>,
    pub worst: f64,
    pub count: usize,
}

impl Tally {
    pub fn close(&mut self, what: &str, got: f64, want: f64, tol: f64) {
        self.count += 1;
        let err = (got - want).abs();
        if err.is_nan() || err > tol {
            self.failures
                .push(format!("{what}: got {got}, want {want} (tol {tol:e})"));
        } else {
            self.worst = self.worst.max(err);
        }
    }

    /// Relative comparison, falling back to absolute near zero.
    pub fn rel(&mut self, what: &str, got: f64, want: f64, tol: f64) {
        self.close(what, got / want.abs().max(1.0), want / want.abs().max(1.0), tol);
    }

    pub fn holds(&mut self, what: &str, ok: bool) {
        self.count += 1;
        if !ok {
            self.failures.push(what.to_string());
        }
    }

    pub fn finish(self, label: &str) -> Check {
        if self.failures.is_empty() {
            Ok(format!(
                "{} {label} checks, max deviation {:.2e}",
                self.count, self.worst
            ))
        } else {
            let n = self.failures.len();
            let shown: Vec<String> = self.failures.into_iter().take(5).collect();
            Err(format!(
                "{n} of {} {label} checks failed: {}",
                self.count,
                shown.join("; ")
            ))
        }
    }
}

fn normal_groups<R: Rng>(rng: &mut R, k: usize, lo: usize, hi: usize, spread: f64) -> Vec<Vec<f64>> {
    (0..k)
        .map(|_| {
            let n = rng.random_range(lo..=hi);
            let shift = spread * rng.random::<f64>();
            let scale = rng.random_range(0.5..3.0);
            (0..n)
                .map(|_| shift + scale * Distribution::<f64>::sample(&StandardNormal, rng))
                .collect()
        })
        .collect()
}

fn df_pair(df: &Df<f64>) -> (f64, f64) {
    match *df {
        Df::Two(a, b) => (a, b),
        Df::One(a) => (a, f64::NAN),
        Df::None => (f64::NAN, f64::NAN),
    }
}

/// Hand-derived worked examples: statistics to 1e-9, p-values to 1e-6.
pub fn worked_examples() -> Check {
    let mut t = Tally::default();
    let a = anova_oneway(&[[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]).unwrap();
    t.close("anova F", a.f_stat, 16.0, 1e-9);
    t.holds("anova df", a.df_between == 2 && a.df_within == 3);
    t.close("anova eta2", a.eta_squared, 16.0 / 17.5, 1e-9);
    // df1 = 2 closed form of the F upper tail
    t.close("anova p", a.p_value, (1.0 + 2.0 * 16.0 / 3.0f64).powf(-1.5), 1e-6);
    let a = anova_oneway(&[[1.0, 2.0, 3.0], [1.0, 2.0, 3.0]]).unwrap();
    t.close("identical F", a.f_stat, 0.0, 1e-9);
    t.close("identical p", a.p_value, 1.0, 1e-6);
    t.close("identical eta2", a.eta_squared, 0.0, 1e-9);
    let g = [vec![1.3, 2.9, 2.2], vec![3.1, 4.4, 3.8, 5.0], vec![0.2, 1.1]];
    let gt: Vec<Vec<f64>> = g.iter().map(|v| v.iter().map(|x| 3.0 * x + 7.0).collect()).collect();
    let (a, b) = (anova_oneway(&g).unwrap(), anova_oneway(&gt).unwrap());
    t.rel("affine F", b.f_stat, a.f_stat, 1e-12);
    t.close("affine p", b.p_value, a.p_value, 1e-12);
    t.close("affine eta2", b.eta_squared, a.eta_squared, 1e-12);

    let l = levene(&[[1.0, 2.0, 3.0], [1.0, 2.0, 3.0]], LeveneCenter::Mean).unwrap();
    t.close("levene equal W", l.statistic, 0.0, 1e-9);
    t.close("levene equal p", l.p_value, 1.0, 1e-6);
    let l = levene(
        &[vec![1.0, 2.0, 3.0, 4.0], vec![1.0, 3.0, 5.0, 7.0, 9.0]],
        LeveneCenter::Mean,
    )
    .unwrap();
    // z-ANOVA by hand: SSB = 1764/405, SSW = 61/5, df (1, 7)
    t.close("levene W", l.statistic, 12348.0 / 4941.0, 1e-9);
    t.holds("levene df", df_pair(&l.df) == (1.0, 7.0));
    t.holds(
        "levene all deviations zero",
        levene(&[[1.0, 1.0, 1.0], [2.0, 2.0, 2.0]], LeveneCenter::Mean).unwrap_err() == StatsError::AllDeviationsZero,
    );

    let k = kruskal_wallis(&[[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]).unwrap();
    t.close("kruskal H", k.statistic, 32.0 / 7.0, 1e-9);
    t.close("kruskal p", k.p_value, (-16.0f64 / 7.0).exp(), 1e-6);
    let cubed = kruskal_wallis(&[[1.0, 8.0], [27.0, 64.0], [125.0, 216.0]]).unwrap();
    t.holds("kruskal monotone", cubed.statistic == k.statistic);
    let k = kruskal_wallis(&[[1.0, 2.0, 3.0], [1.0, 2.0, 3.0]]).unwrap();
    t.close("kruskal identical H", k.statistic, 0.0, 1e-9);
    t.close("kruskal identical p", k.p_value, 1.0, 1e-6);
    t.holds("kruskal all equal", kruskal_wallis(&[[2.0, 2.0], [2.0, 2.0]]).is_err());

    let p = paired_t(&[1.0, 2.0, 3.0], &[3.0, 6.0, 9.0]).unwrap();
    t.close("paired t", p.statistic, -2.0 * 3f64.sqrt(), 1e-9);
    t.holds("paired df", p.df == Df::One(2.0));
    // t(2) CDF closed form ½(1 + t/√(t²+2))
    t.close("paired p", p.p_value, 1.0 - 12f64.sqrt() / 14f64.sqrt(), 1e-6);
    t.close("paired d_z", p.effect.unwrap(), -2.0, 1e-9);
    t.holds(
        "paired zero variance",
        paired_t(&[1.0, 2.0], &[1.0, 2.0]).unwrap_err() == StatsError::ZeroVarianceOfDifferences,
    );
    let q = paired_t(&[3.0, 6.0, 9.0], &[1.0, 2.0, 3.0]).unwrap();
    t.holds(
        "paired antisymmetric",
        q.statistic == -p.statistic && q.p_value == p.p_value,
    );

    let r = pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap();
    t.close("pearson perfect r", r.statistic, 1.0, 1e-9);
    t.close("pearson perfect p", r.p_value, 0.0, 1e-6);
    let r = pearson(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
    t.close("pearson r", r.statistic, 0.8, 1e-9);
    // t = 0.8·√(2/0.36) on 2 df, closed-form tail
    let tt = 0.8 * (2.0f64 / 0.36).sqrt();
    t.close("pearson p", r.p_value, 1.0 - tt / (tt * tt + 2.0).sqrt(), 1e-6);

    let qs = |ps: &[f64]| -> Vec<f64> {
        let e: Vec<(String, f64)> = ps.iter().map(|&p| (String::new(), p)).collect();
        bh_fdr(&e, 0.05).unwrap().iter().map(|x| x.q_value).collect()
    };
    for q in qs(&[0.01, 0.02, 0.03, 0.04]) {
        t.close("bh equal", q, 0.04, 1e-12);
    }
    t.close("bh single", qs(&[0.03])[0], 0.03, 1e-12);
    let q = qs(&[0.005, 0.1]);
    t.close("bh pair 0", q[0], 0.01, 1e-12);
    t.close("bh pair 1", q[1], 0.1, 1e-12);

    let z = zscore(&[1.0, 2.0, 3.0]).unwrap();
    for (g, w) in z.iter().zip([-1.0, 0.0, 1.0]) {
        t.close("zscore", *g, w, 1e-12);
    }
    t.holds(
        "zscore constant",
        zscore(&[4.0, 4.0, 4.0]).unwrap_err() == StatsError::ZeroVariance,
    );
    let x = [3.2, -1.0, 7.7, 0.4, 2.2];
    let z1 = zscore(&x).unwrap();
    for (a, b) in zscore(&z1).unwrap().iter().zip(&z1) {
        t.close("zscore idempotent", *a, *b, 1e-12);
    }
    t.finish("worked-example")
}

/// `n` random instances per test against the naive oracle formulas.
pub fn randomized_cross_checks(n: usize, seed: u64) -> Check {
    let mut rng = super::rng(seed);
    let mut t = Tally::default();
    for i in 0..n {
        let k = rng.random_range(2..=6);
        let groups = normal_groups(&mut rng, k, 2, 10, 2.0);
        let a = anova_oneway(&groups).unwrap();
        let (f, d1, d2, p, eta) = oracle::anova(&groups);
        t.rel(&format!("anova F #{i}"), a.f_stat, f, 1e-9);
        t.holds(
            &format!("anova df #{i}"),
            a.df_between as f64 == d1 && a.df_within as f64 == d2,
        );
        t.close(&format!("anova p #{i}"), a.p_value, p, 1e-6);
        t.close(&format!("anova eta2 #{i}"), a.eta_squared, eta, 1e-9);

        if groups.iter().all(|g| g.len() == 2) {
            t.holds(
                &format!("levene pairs rejected #{i}"),
                levene(&groups, LeveneCenter::Mean).is_err(),
            );
        } else {
            let l = levene(&groups, LeveneCenter::Mean).unwrap();
            let (w, p) = oracle::levene(&groups);
            t.rel(&format!("levene W #{i}"), l.statistic, w, 1e-9);
            t.close(&format!("levene p #{i}"), l.p_value, p, 1e-6);
        }

        // coarse rounding plants ties in about half the instances
        let tied: Vec<Vec<f64>> = if i % 2 == 0 {
            groups
                .iter()
                .map(|g| g.iter().map(|v| (v * 2.0).round() / 2.0).collect())
                .collect()
        } else {
            groups.clone()
        };
        if let Ok(kw) = kruskal_wallis(&tied) {
            let (h, p) = oracle::kruskal_wallis(&tied);
            t.rel(&format!("kruskal H #{i}"), kw.statistic, h, 1e-9);
            t.close(&format!("kruskal p #{i}"), kw.p_value, p, 1e-6);
        }

        let m = rng.random_range(2..=20);
        let x: Vec<f64> = (0..m).map(|_| StandardNormal.sample(&mut rng)).collect();
        let shift = rng.random_range(-1.0..1.0);
        let y: Vec<f64> = x
            .iter()
            .map(|v| 0.6 * v + shift + Distribution::<f64>::sample(&StandardNormal, &mut rng))
            .collect();
        let pt = paired_t(&x, &y).unwrap();
        let (tv, p, dz) = oracle::paired_t(&x, &y);
        t.rel(&format!("paired t #{i}"), pt.statistic, tv, 1e-9);
        t.close(&format!("paired p #{i}"), pt.p_value, p, 1e-6);
        t.rel(&format!("paired d_z #{i}"), pt.effect.unwrap(), dz, 1e-9);

        if m >= 3 {
            let pr = pearson(&x, &y).unwrap();
            let (r, p) = oracle::pearson(&x, &y);
            t.close(&format!("pearson r #{i}"), pr.statistic, r, 1e-9);
            t.close(&format!("pearson p #{i}"), pr.p_value, p, 1e-6);
        }

        let mm = rng.random_range(1..=60);
        let ps: Vec<f64> = (0..mm)
            .map(|_| {
                let p: f64 = rng.random::<f64>().powi(3);
                if rng.random::<f64>() < 0.2 {
                    (p * 20.0).round() / 20.0
                } else {
                    p
                }
            })
            .collect();
        let labelled: Vec<(String, f64)> = ps.iter().map(|&p| (String::new(), p)).collect();
        let got = bh_fdr(&labelled, 0.05).unwrap();
        let (q, sig) = oracle::bh(&ps, 0.05);
        for j in 0..mm {
            t.close(&format!("bh q #{i}.{j}"), got[j].q_value, q[j], 1e-12);
            t.holds(&format!("bh decision #{i}.{j}"), got[j].significant == sig[j]);
            t.holds(&format!("bh q >= p #{i}.{j}"), got[j].q_value >= ps[j]);
        }

        let z = zscore(&x).unwrap();
        if m >= 2 {
            for (a, b) in z.iter().zip(oracle::zscore(&x)) {
                t.close(&format!("zscore #{i}"), *a, b, 1e-12);
            }
        }
    }
    t.finish("randomized")
}

/// Library CDFs against numerically integrated densities at `n` points each.
pub fn kernel_oracles(n: usize, seed: u64) -> Check {
    let mut rng = super::rng(seed);
    let mut t = Tally::default();
    let dfs = [1.0, 2.0, 3.0, 4.5, 7.0, 10.0, 25.0, 60.0];
    for i in 0..n {
        let z = -6.0 + 12.0 * (i as f64 + rng.random::<f64>()) / n as f64;
        t.close(
            &format!("normal({z})"),
            special::normal_cdf(z),
            oracle::normal_cdf(z),
            1e-8,
        );

        let df = dfs[i % dfs.len()];
        let tv = rng.random_range(-8.0..8.0);
        t.close(
            &format!("t({tv}; {df})"),
            special::t_cdf(tv, df),
            oracle::t_cdf(tv, df),
            1e-8,
        );

        let (d1, d2) = (dfs[i % 5], dfs[(i / 5) % dfs.len()]);
        let x = rng.random_range(0.0..8.0f64).powi(2) / 4.0;
        t.close(
            &format!("F({x}; {d1}, {d2})"),
            special::f_cdf(x, d1, d2),
            oracle::f_cdf(x, d1, d2),
            1e-8,
        );

        let k = dfs[(i * 3) % dfs.len()];
        let x = rng.random_range(0.0..3.0) * k + rng.random_range(0.0..2.0);
        t.close(
            &format!("chi2({x}; {k})"),
            special::chi2_cdf(x, k),
            oracle::chi2_cdf(x, k),
            1e-8,
        );
    }
    t.finish("distribution-kernel")
}

/// Ten (q, k, df) points against a shared-sample Monte Carlo estimate.
pub fn srange_monte_carlo(draws: usize, seed: u64) -> Check {
    use rayon::prelude::*;
    let cases: [(usize, f64, [f64; 2]); 5] = [
        (2, 5.0, [2.0, 3.64]),
        (3, 10.0, [3.877, 2.5]),
        (4, 20.0, [3.96, 3.0]),
        (6, 12.0, [4.75, 3.5]),
        (10, 30.0, [4.82, 5.6]),
    ];
    let results: Vec<(usize, f64, [f64; 2], Vec<f64>)> = cases
        .par_iter()
        .enumerate()
        .map(|(i, &(k, df, qs))| {
            let mut rng = super::rng(seed + i as u64);
            (k, df, qs, oracle::srange_sf_mc(&qs, k, df, draws, &mut rng))
        })
        .collect();
    let mut t = Tally::default();
    for (k, df, qs, mc) in results {
        for (q, p) in qs.iter().zip(mc) {
            let got = srange_sf(*q, k, df).unwrap();
            t.close(&format!("srange_sf({q}, {k}, {df})"), got, p, 2e-3);
        }
    }
    t.finish("studentized-range")
}

/// Tukey-Kramer with two groups reproduces the ANOVA p-value.
pub fn tukey_two_groups(n: usize, seed: u64) -> Check {
    let mut rng = super::rng(seed);
    let mut t = Tally::default();
    for i in 0..n {
        let g = normal_groups(&mut rng, 2, 2, 15, 1.5);
        let a = anova_oneway(&g).unwrap();
        let c = tukey_hsd(&g, 0.05).unwrap();
        t.close(&format!("tukey k=2 #{i}"), c[0].p_adjusted, a.p_value, 1e-6);
    }
    t.finish("Tukey two-group")
}

/// Empirical type-I error at α = 0.05 under Gaussian nulls.
pub fn null_calibration(reps: usize, seed: u64) -> Check {
    let mut rng = super::rng(seed);
    let (mut anova_rej, mut t_rej, mut r_rej) = (0usize, 0usize, 0usize);
    let normal = |n: usize, rng: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
        (0..n).map(|_| StandardNormal.sample(rng)).collect()
    };
    for _ in 0..reps {
        let groups: Vec<Vec<f64>> = (0..4).map(|_| normal(8, &mut rng)).collect();
        if anova_oneway(&groups).unwrap().p_value < 0.05 {
            anova_rej += 1;
        }
        let (x, y) = (normal(10, &mut rng), normal(10, &mut rng));
        if paired_t(&x, &y).unwrap().p_value < 0.05 {
            t_rej += 1;
        }
        let (x, y) = (normal(12, &mut rng), normal(12, &mut rng));
        if pearson(&x, &y).unwrap().p_value < 0.05 {
            r_rej += 1;
        }
    }
    let rates = [
        ("anova", anova_rej as f64 / reps as f64),
        ("paired t", t_rej as f64 / reps as f64),
        ("pearson", r_rej as f64 / reps as f64),
    ];
    let detail: Vec<String> = rates.iter().map(|(n, r)| format!("{n} {r:.4}")).collect();
    if rates.iter().all(|(_, r)| (0.04..=0.06).contains(r)) {
        Ok(format!("rejection rates {}", detail.join(", ")))
    } else {
        Err(format!("rejection rates {} outside [0.04, 0.06]", detail.join(", ")))
    }
}
