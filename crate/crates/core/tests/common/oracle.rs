//! Independent reference implementations: textbook formulas evaluated the
//! slow way, and distribution functions by numerical integration of their
//! densities. Nothing here calls into the library's kernels.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};

/// ln Γ(x) for x > 0: upward recurrence to x ≥ 20, then the Stirling series.
pub fn ln_gamma(mut x: f64) -> f64 {
    let mut shift = 0.0;
    while x < 20.0 {
        shift -= x.ln();
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 * (1.0 / 1188.0)))));
    shift + (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + series
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (1..=n)
        .map(|i| {
            let mut x = (PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Composite 16-point Gauss-Legendre over 256 equal panels.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    thread_local! {
        static NODES: Vec<(f64, f64)> = gauss_legendre(16);
    }
    let panels = 256;
    let h = (b - a) / panels as f64;
    NODES.with(|nodes| {
        (0..panels)
            .map(|i| {
                let mid = a + (i as f64 + 0.5) * h;
                nodes.iter().map(|&(x, w)| w * f(mid + 0.5 * h * x)).sum::<f64>() * 0.5 * h
            })
            .sum()
    })
}

pub fn normal_cdf(z: f64) -> f64 {
    let phi = |x: f64| (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
    0.5 + integrate(&phi, 0.0, z.clamp(-40.0, 40.0))
}

pub fn t_cdf(t: f64, df: f64) -> f64 {
    let ln_c = ln_gamma((df + 1.0) / 2.0) - ln_gamma(df / 2.0) - 0.5 * (df * PI).ln();
    let dens = |x: f64| (ln_c - (df + 1.0) / 2.0 * (1.0 + x * x / df).ln()).exp();
    0.5 + integrate(&dens, 0.0, t)
}

/// F(d1, d2) CDF; x = u² removes the density's singularity at 0.
pub fn f_cdf(x: f64, d1: f64, d2: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let ln_c = 0.5 * d1 * (d1 / d2).ln() - (ln_gamma(d1 / 2.0) + ln_gamma(d2 / 2.0) - ln_gamma((d1 + d2) / 2.0));
    let g = |u: f64| {
        if u == 0.0 {
            return if d1 == 1.0 { 2.0 * ln_c.exp() } else { 0.0 };
        }
        let v = u * u;
        2.0 * (ln_c + (d1 - 1.0) * u.ln() - (d1 + d2) / 2.0 * (1.0 + d1 * v / d2).ln()).exp()
    };
    integrate(&g, 0.0, x.sqrt())
}

/// Chi-square(k) CDF with the same substitution.
pub fn chi2_cdf(x: f64, k: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let ln_c = -(k / 2.0) * 2f64.ln() - ln_gamma(k / 2.0);
    let g = |u: f64| {
        if u == 0.0 {
            return if k == 1.0 { 2.0 * ln_c.exp() } else { 0.0 };
        }
        2.0 * (ln_c + (k - 1.0) * u.ln() - u * u / 2.0).exp()
    };
    integrate(&g, 0.0, x.sqrt())
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn var(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (x.len() - 1) as f64
}

/// (F, df1, df2, p, η²)
pub fn anova(groups: &[Vec<f64>]) -> (f64, f64, f64, f64, f64) {
    let all: Vec<f64> = groups.iter().flatten().copied().collect();
    let grand = mean(&all);
    let ssb: f64 = groups.iter().map(|g| g.len() as f64 * (mean(g) - grand).powi(2)).sum();
    let ssw: f64 = groups
        .iter()
        .map(|g| {
            let m = mean(g);
            g.iter().map(|v| (v - m).powi(2)).sum::<f64>()
        })
        .sum();
    let (d1, d2) = ((groups.len() - 1) as f64, (all.len() - groups.len()) as f64);
    let f = (ssb / d1) / (ssw / d2);
    (f, d1, d2, 1.0 - f_cdf(f, d1, d2), ssb / (ssb + ssw))
}

/// Mean-centred Levene: ANOVA on absolute deviations.
pub fn levene(groups: &[Vec<f64>]) -> (f64, f64) {
    let z: Vec<Vec<f64>> = groups
        .iter()
        .map(|g| {
            let m = mean(g);
            g.iter().map(|v| (v - m).abs()).collect()
        })
        .collect();
    let (f, _, _, p, _) = anova(&z);
    (f, p)
}

/// (H, p) with average ranks by counting and the tie-corrected divisor.
pub fn kruskal_wallis(groups: &[Vec<f64>]) -> (f64, f64) {
    let all: Vec<f64> = groups.iter().flatten().copied().collect();
    let n = all.len() as f64;
    let rank = |x: f64| {
        let less = all.iter().filter(|&&v| v < x).count() as f64;
        let eq = all.iter().filter(|&&v| v == x).count() as f64;
        less + (eq + 1.0) / 2.0
    };
    let s: f64 = groups
        .iter()
        .map(|g| g.iter().map(|&v| rank(v)).sum::<f64>().powi(2) / g.len() as f64)
        .sum();
    let h = 12.0 / (n * (n + 1.0)) * s - 3.0 * (n + 1.0);
    let mut seen: Vec<f64> = Vec::new();
    let mut ties = 0.0;
    for &v in &all {
        if !seen.contains(&v) {
            seen.push(v);
            let t = all.iter().filter(|&&u| u == v).count() as f64;
            ties += t * t * t - t;
        }
    }
    let h = h / (1.0 - ties / (n * n * n - n));
    (h, 1.0 - chi2_cdf(h, (groups.len() - 1) as f64))
}

/// (t, p, d_z)
pub fn paired_t(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let n = d.len() as f64;
    let sd = var(&d).sqrt();
    let t = mean(&d) / (sd / n.sqrt());
    (t, 2.0 * (1.0 - t_cdf(t.abs(), n - 1.0)), mean(&d) / sd)
}

/// (r, p)
pub fn pearson(x: &[f64], y: &[f64]) -> (f64, f64) {
    let (mx, my) = (mean(x), mean(y));
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let r = sxy / (sxx * syy).sqrt();
    let df = x.len() as f64 - 2.0;
    let t = r * (df / (1.0 - r * r)).sqrt();
    (r, 2.0 * (1.0 - t_cdf(t.abs(), df)))
}

/// q-values by their definition min over j ≥ i of p_(j)·m/j, and the
/// step-up rejection set: every p_(i) with i ≤ the largest i where p_(i) ≤ iα/m.
pub fn bh(p: &[f64], alpha: f64) -> (Vec<f64>, Vec<bool>) {
    let m = p.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p[a].partial_cmp(&p[b]).unwrap().then(a.cmp(&b)));
    let mut q = vec![0.0; m];
    for i in 0..m {
        let best = (i..m)
            .map(|j| p[order[j]] * m as f64 / (j + 1) as f64)
            .fold(f64::INFINITY, f64::min);
        q[order[i]] = best.min(1.0);
    }
    let k = (0..m).rev().find(|&i| p[order[i]] <= (i + 1) as f64 * alpha / m as f64);
    let mut sig = vec![false; m];
    if let Some(k) = k {
        for &idx in &order[..=k] {
            sig[idx] = true;
        }
    }
    (q, sig)
}

pub fn zscore(x: &[f64]) -> Vec<f64> {
    let (m, s) = (mean(x), var(x).sqrt());
    x.iter().map(|v| (v - m) / s).collect()
}

/// Monte Carlo P(Q > q) for each q, sharing one set of `draws` samples of
/// the studentized range of `k` normals over a chi(df)/sqrt(df) scale.
pub fn srange_sf_mc<R: Rng>(qs: &[f64], k: usize, df: f64, draws: usize, rng: &mut R) -> Vec<f64> {
    let chi = ChiSquared::new(df).unwrap();
    let mut hits = vec![0usize; qs.len()];
    for _ in 0..draws {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for _ in 0..k {
            let z: f64 = StandardNormal.sample(rng);
            lo = lo.min(z);
            hi = hi.max(z);
        }
        let s = (chi.sample(rng) / df).sqrt();
        let q = (hi - lo) / s;
        for (h, &t) in hits.iter_mut().zip(qs) {
            if q > t {
                *h += 1;
            }
        }
    }
    hits.iter().map(|&h| h as f64 / draws as f64).collect()
}
