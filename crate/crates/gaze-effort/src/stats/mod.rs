//! Correlation coefficients with two-sided significance tests, and the
//! measures-vs-ground-truth report builder.
//!
//! Pearson p-values come from the exact t transform; Spearman reuses the t
//! approximation on midranks; Kendall uses the asymptotic normal
//! approximation with tie-adjusted variance. Kendall's tau-b itself is
//! computed by Knight's O(n log n) algorithm so the O(n^2) pair count stays
//! available as an independent check.

pub mod special;

use crate::error::{Error, Result};
use crate::measures::{Metric, MetricsRow};

const MIN_N: usize = 3;

fn check_lengths(x: &[f64], y: &[f64]) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < MIN_N {
        return Err(Error::InsufficientData {
            needed: MIN_N,
            got: x.len(),
        });
    }
    Ok(x.len())
}

/// Sample Pearson correlation with a two-sided p-value from the t
/// distribution with n - 2 degrees of freedom.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    let n = check_lengths(x, y)?;
    // an exactly constant input has no correlation, whatever rounding does
    // to its accumulated variance
    if x.iter().all(|v| *v == x[0]) {
        return Err(Error::ZeroVariance("x"));
    }
    if y.iter().all(|v| *v == y[0]) {
        return Err(Error::ZeroVariance("y"));
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (mx, my) = (mean(x), mean(y));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx <= 0.0 {
        return Err(Error::ZeroVariance("x"));
    }
    if syy <= 0.0 {
        return Err(Error::ZeroVariance("y"));
    }
    let r = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    Ok((r, pearson_p_from_r(r, n)))
}

/// Two-sided p-value for a Pearson r at sample size n, via
/// t = r sqrt(n-2) / sqrt(1-r^2).
pub fn pearson_p_from_r(r: f64, n: usize) -> f64 {
    let df = (n - 2) as f64;
    if r.abs() >= 1.0 {
        return 0.0;
    }
    let t = r * (df / (1.0 - r * r)).sqrt();
    special::t_two_sided_p(t, df)
}

/// Midranks: average ranks for ties, 1-based.
pub fn midranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).expect("NaN in rank input"));
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation: Pearson on midranks, p via the same t
/// approximation.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    check_lengths(x, y)?;
    let (rho, _) = pearson(&midranks(x), &midranks(y))?;
    Ok((rho, spearman_p_from_rho(rho, x.len())))
}

/// Two-sided p-value for a Spearman rho at sample size n (t approximation).
pub fn spearman_p_from_rho(rho: f64, n: usize) -> f64 {
    pearson_p_from_r(rho, n)
}

/// Tie-group pair statistics for one variable: (sum t(t-1)/2,
/// sum t(t-1)(t-2), sum t(t-1)(2t+5)).
fn tie_stats(sorted: &[f64]) -> (i64, i64, i64) {
    let mut pairs = 0i64;
    let mut triple = 0i64;
    let mut var_term = 0i64;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as i64;
        pairs += t * (t - 1) / 2;
        triple += t * (t - 1) * (t - 2);
        var_term += t * (t - 1) * (2 * t + 5);
        i = j + 1;
    }
    (pairs, triple, var_term)
}

/// Counts discordant pairs of (x, y) sorted lexicographically by x then y,
/// by merge-sort inversion counting on y.
fn discordant_pairs(y: &mut [f64]) -> i64 {
    fn merge_count(v: &mut [f64], buf: &mut Vec<f64>) -> i64 {
        let n = v.len();
        if n < 2 {
            return 0;
        }
        let mid = n / 2;
        let mut count = merge_count(&mut v[..mid], buf) + merge_count(&mut v[mid..], buf);
        buf.clear();
        let (mut i, mut j) = (0, mid);
        while i < mid && j < n {
            if v[j] < v[i] {
                // v[j] jumps over the remaining left elements
                count += (mid - i) as i64;
                buf.push(v[j]);
                j += 1;
            } else {
                buf.push(v[i]);
                i += 1;
            }
        }
        buf.extend_from_slice(&v[i..mid]);
        buf.extend_from_slice(&v[j..n]);
        v.copy_from_slice(buf);
        count
    }
    let mut buf = Vec::with_capacity(y.len());
    merge_count(y, &mut buf)
}

/// Kendall's tau-b with tie correction (Knight's algorithm) and a two-sided
/// p-value from the tie-adjusted normal approximation.
pub fn kendall(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    let n = check_lengths(x, y)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        x[a].partial_cmp(&x[b])
            .expect("NaN in kendall input")
            .then(y[a].partial_cmp(&y[b]).expect("NaN in kendall input"))
    });
    let xs: Vec<f64> = order.iter().map(|&i| x[i]).collect();
    let mut ys: Vec<f64> = order.iter().map(|&i| y[i]).collect();

    // joint ties: pairs tied in both x and y
    let mut joint_pairs = 0i64;
    {
        let mut i = 0;
        while i < n {
            let mut j = i;
            while j + 1 < n && xs[j + 1] == xs[i] && ys[j + 1] == ys[i] {
                j += 1;
            }
            let t = (j - i + 1) as i64;
            joint_pairs += t * (t - 1) / 2;
            i = j + 1;
        }
    }
    let (x_pairs, x3, x_var) = tie_stats(&xs);
    let mut ys_sorted = ys.clone();
    ys_sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let (y_pairs, y3, y_var) = tie_stats(&ys_sorted);

    let total = (n as i64) * (n as i64 - 1) / 2;
    if x_pairs == total {
        return Err(Error::ZeroVariance("x"));
    }
    if y_pairs == total {
        return Err(Error::ZeroVariance("y"));
    }

    let dis = discordant_pairs(&mut ys);
    // concordant minus discordant over all pairs
    let s = total - x_pairs - y_pairs + joint_pairs - 2 * dis;
    let tau = s as f64 / (((total - x_pairs) as f64) * ((total - y_pairs) as f64)).sqrt();
    let tau = tau.clamp(-1.0, 1.0);

    // tie-adjusted variance of S (Kendall 1947)
    let nf = n as f64;
    let v0 = nf * (nf - 1.0) * (2.0 * nf + 5.0);
    let v1 = (2.0 * x_pairs as f64) * (2.0 * y_pairs as f64) / (2.0 * nf * (nf - 1.0));
    let v2 = (x3 as f64) * (y3 as f64) / (9.0 * nf * (nf - 1.0) * (nf - 2.0));
    let var_s = (v0 - x_var as f64 - y_var as f64) / 18.0 + v1 + v2;
    if var_s <= 0.0 {
        return Err(Error::ZeroVariance("kendall variance"));
    }
    let z = s as f64 / var_s.sqrt();
    Ok((tau, special::normal_two_sided_p(z)))
}

/// Two-sided p-value for a Kendall tau at sample size n assuming no ties
/// (used to recompute significance bands from reported coefficients).
pub fn kendall_p_from_tau(tau: f64, n: usize) -> f64 {
    let nf = n as f64;
    let s = tau * nf * (nf - 1.0) / 2.0;
    let var_s = nf * (nf - 1.0) * (2.0 * nf + 5.0) / 18.0;
    special::normal_two_sided_p(s / var_s.sqrt())
}

/// O(n^2) reference tau-b by direct pair counting. Test oracle for
/// [`kendall`]; kept in the library so external checks can call it.
pub fn kendall_bruteforce(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = check_lengths(x, y)?;
    let (mut con, mut dis, mut tx, mut ty) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = x[j] - x[i];
            let dy = y[j] - y[i];
            if dx == 0.0 && dy == 0.0 {
                // joint tie: counted in neither margin correction
            } else if dx == 0.0 {
                tx += 1;
            } else if dy == 0.0 {
                ty += 1;
            } else if dx.signum() == dy.signum() {
                con += 1;
            } else {
                dis += 1;
            }
        }
    }
    let d1 = (con + dis + tx) as f64;
    let d2 = (con + dis + ty) as f64;
    if d1 == 0.0 || d2 == 0.0 {
        return Err(Error::ZeroVariance("all values tied"));
    }
    Ok((con - dis) as f64 / (d1 * d2).sqrt())
}

/// One family of correlation coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Pearson,
    Kendall,
    Spearman,
}

pub const FAMILIES: [Family; 3] = [Family::Pearson, Family::Kendall, Family::Spearman];

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Family::Pearson => "Pearson",
            Family::Kendall => "Kendall",
            Family::Spearman => "Spearman",
        })
    }
}

/// One report cell: a coefficient with its p-value and pairwise sample
/// count, or the reason it could not be computed.
#[derive(Debug, Clone, PartialEq)]
pub enum CellResult {
    Stat { cc: f64, p: f64, n: usize },
    Unavailable(String),
}

/// Correlations of every measure against every ground-truth proxy, for all
/// three coefficient families.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    pub measures: Vec<String>,
    pub ground_truths: Vec<String>,
    /// Rows that entered the table (before pairwise dropping).
    pub n_rows: usize,
    /// Significance thresholds, descending; stars count thresholds beaten.
    pub alpha_levels: Vec<f64>,
    /// `cells[measure][ground_truth][family]`.
    pub cells: Vec<Vec<[CellResult; 3]>>,
}

impl CorrelationReport {
    /// Significance stars for a p-value under this report's alpha levels.
    pub fn stars(&self, p: f64) -> usize {
        self.alpha_levels.iter().filter(|&&a| p < a).count()
    }
}

/// Measure columns extracted from a metrics row, in report order.
fn measure_fields(row: &MetricsRow) -> [(&'static str, &Metric); 5] {
    [
        ("CEM_VI", &row.cem_vi),
        ("CEM_IQ", &row.cem_iq),
        ("Check Rate", &row.check_rate),
        ("SGE", &row.sge),
        ("Entropy Rate", &row.entropy_rate),
    ]
}

fn ground_truth_fields(row: &MetricsRow) -> [(&'static str, &Metric); 2] {
    [
        ("Pupil Size Change", &row.pupil_size_change),
        ("Fixation Rate", &row.fixation_rate),
    ]
}

/// Builds the full measures-vs-ground-truth correlation table. Rows with a
/// tagged-missing value in a pair are dropped pairwise per cell.
pub fn correlation_table(rows: &[MetricsRow], alpha_levels: &[f64]) -> Result<CorrelationReport> {
    if rows.len() < MIN_N {
        return Err(Error::InsufficientData {
            needed: MIN_N,
            got: rows.len(),
        });
    }
    let measures: Vec<String> = measure_fields(&rows[0])
        .iter()
        .map(|(n, _)| n.to_string())
        .collect();
    let ground_truths: Vec<String> = ground_truth_fields(&rows[0])
        .iter()
        .map(|(n, _)| n.to_string())
        .collect();

    let mut cells = Vec::with_capacity(measures.len());
    for mi in 0..measures.len() {
        let mut row_cells = Vec::with_capacity(ground_truths.len());
        for gi in 0..ground_truths.len() {
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for row in rows {
                let m = measure_fields(row)[mi].1;
                let g = ground_truth_fields(row)[gi].1;
                if let (Metric::Value(a), Metric::Value(b)) = (m, g) {
                    xs.push(*a);
                    ys.push(*b);
                }
            }
            let cell = |res: Result<(f64, f64)>| match res {
                Ok((cc, p)) => CellResult::Stat {
                    cc,
                    p,
                    n: xs.len(),
                },
                Err(e) => CellResult::Unavailable(e.to_string()),
            };
            row_cells.push([
                cell(pearson(&xs, &ys)),
                cell(kendall(&xs, &ys)),
                cell(spearman(&xs, &ys)),
            ]);
        }
        cells.push(row_cells);
    }
    Ok(CorrelationReport {
        measures,
        ground_truths,
        n_rows: rows.len(),
        alpha_levels: alpha_levels.to_vec(),
        cells,
    })
}
