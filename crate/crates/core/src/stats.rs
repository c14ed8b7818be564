use alloc::vec;
use alloc::vec::Vec;

pub(crate) fn mean(x: &[f64]) -> f64 {
    if x.is_empty() {
        0.0
    } else {
        x.iter().sum::<f64>() / x.len() as f64
    }
}

/// Sample Pearson correlation; 0 when either side has zero variance.
pub(crate) fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return 0.0;
    }
    (sxy / libm::sqrt(sxx * syy)).clamp(-1.0, 1.0)
}

/// 1-based ranks with ties sharing their average rank.
pub(crate) fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && x[order[j]] == x[order[i]] {
            j += 1;
        }
        let avg = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = avg;
        }
        i = j;
    }
    ranks
}

/// `r[i] = Σ_j |x[i] − x[j]|` in O(n log n).
pub(crate) fn abs_diff_row_sums(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let total: f64 = x.iter().sum();
    let mut out = vec![0.0; n];
    let mut below = 0.0;
    for (k, &i) in order.iter().enumerate() {
        let v = x[i];
        let above = total - below - v;
        out[i] = v * k as f64 - below + above - v * (n - k - 1) as f64;
        below += v;
    }
    out
}

/// `Σ_{i∈a} Σ_{j∈b} |a_i − b_j|` in O((|a|+|b|) log |b|).
pub(crate) fn cross_abs_diff_sum(a: &[f64], b: &[f64]) -> f64 {
    let mut sorted = b.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut prefix = Vec::with_capacity(sorted.len() + 1);
    prefix.push(0.0);
    for v in &sorted {
        prefix.push(prefix.last().unwrap() + v);
    }
    let total = *prefix.last().unwrap();
    let m = sorted.len() as f64;
    a.iter()
        .map(|&v| {
            let k = sorted.partition_point(|&s| s < v);
            let below = prefix[k];
            v * k as f64 - below + (total - below) - v * (m - k as f64)
        })
        .sum()
}

/// Squared distance covariance/variance terms assembled into the distance
/// correlation. `sum_ab = Σ_ij a_ij b_ij`, `ra`/`rb` are row sums of the two
/// distance matrices and `sum_aa`/`sum_bb` the sums of squared entries.
pub(crate) fn dcor_from_parts(sum_ab: f64, ra: &[f64], rb: &[f64], sum_aa: f64, sum_bb: f64) -> f64 {
    let n = ra.len() as f64;
    if ra.len() < 2 {
        return 0.0;
    }
    let (sa, sb): (f64, f64) = (ra.iter().sum(), rb.iter().sum());
    let centered = |s: f64, dot: f64, t1: f64, t2: f64| (s - 2.0 / n * dot + t1 * t2 / (n * n)) / (n * n);
    let dot_ab: f64 = ra.iter().zip(rb).map(|(p, q)| p * q).sum();
    let dot_aa: f64 = ra.iter().map(|p| p * p).sum();
    let dot_bb: f64 = rb.iter().map(|q| q * q).sum();
    let dcov2 = centered(sum_ab, dot_ab, sa, sb);
    let dvar_x = centered(sum_aa, dot_aa, sa, sa);
    let dvar_y = centered(sum_bb, dot_bb, sb, sb);
    let denom = libm::sqrt(dvar_x * dvar_y);
    // relative guard: a constant input leaves only rounding noise
    let (scale_a, scale_b) = (sa / (n * n), sb / (n * n));
    if !(dvar_x > 1e-12 * scale_a * scale_a) || !(dvar_y > 1e-12 * scale_b * scale_b) || denom <= 0.0 {
        return 0.0;
    }
    libm::sqrt((dcov2 / denom).clamp(0.0, 1.0))
}

/// `Σ_ij (x_i − x_j)²` computed from centered values.
pub(crate) fn sum_sq_diffs(x: &[f64]) -> f64 {
    let m = mean(x);
    2.0 * x.len() as f64 * x.iter().map(|v| (v - m) * (v - m)).sum::<f64>()
}

/// Plug-in mutual information (nats) between two binary variables.
pub(crate) fn binary_mutual_information(x: &[bool], y: &[bool]) -> f64 {
    let n = x.len();
    if n == 0 {
        return 0.0;
    }
    let mut joint = [[0usize; 2]; 2];
    for (&a, &b) in x.iter().zip(y) {
        joint[usize::from(a)][usize::from(b)] += 1;
    }
    let nf = n as f64;
    let px = [joint[0][0] + joint[0][1], joint[1][0] + joint[1][1]];
    let py = [joint[0][0] + joint[1][0], joint[0][1] + joint[1][1]];
    let mut mi = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            let c = joint[a][b];
            if c == 0 {
                continue;
            }
            let pxy = c as f64 / nf;
            mi += pxy * libm::log(pxy * nf * nf / (px[a] as f64 * py[b] as f64));
        }
    }
    mi.max(0.0)
}
