//! Shannon entropy, Jensen-Shannon divergence, its square root, and the
//! plug-in entropy rate of an empirical location chain. Base-2 logs
//! throughout, so entropies are in bits and JSD lies in [0, 1].

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::Distribution;

/// Shannon entropy in bits, with 0 log 0 = 0.
pub fn shannon_entropy<L: Ord + Clone>(p: &Distribution<L>) -> f64 {
    let h = -p
        .mass()
        .iter()
        .filter(|&&m| m > 0.0)
        .map(|&m| m * m.log2())
        .sum::<f64>();
    h + 0.0 // a point mass would otherwise yield IEEE -0.0
}

/// Jensen-Shannon divergence with equal weights, base-2 logs: in [0, 1].
///
/// Both distributions must be defined over the same support. Terms with
/// p = 0 contribute 0; the mixture dominates both inputs, so no log of a
/// zero denominator can occur at p > 0. The per-element term is symmetric
/// in (p, q), which makes `jsd(p, q) == jsd(q, p)` bit-exact.
pub fn jsd<L: Ord + Clone>(p: &Distribution<L>, q: &Distribution<L>) -> Result<f64> {
    if !p.same_support(q) {
        return Err(Error::SupportMismatch);
    }
    let half_term = |a: f64, b: f64| -> f64 {
        if a > 0.0 {
            a * (2.0 * a / (a + b)).log2()
        } else {
            0.0
        }
    };
    let sum: f64 = p
        .mass()
        .iter()
        .zip(q.mass())
        .map(|(&pm, &qm)| half_term(pm, qm) + half_term(qm, pm))
        .sum();
    Ok((sum / 2.0).clamp(0.0, 1.0) + 0.0)
}

/// Square root of the Jensen-Shannon divergence: a true metric on
/// distributions, in [0, 1].
pub fn srjsd<L: Ord + Clone>(p: &Distribution<L>, q: &Distribution<L>) -> Result<f64> {
    Ok(jsd(p, q)?.sqrt())
}

/// Plug-in entropy rate of a location sequence, bits per transition.
///
/// Transition probabilities are row-normalized counts over consecutive
/// pairs; the row weights are the empirical visit frequencies of the full
/// sequence. A location with no outgoing transitions (the final visit of a
/// sequence) contributes nothing to the sum.
pub fn entropy_rate<L: Ord + Clone>(sequence: &[L]) -> Result<f64> {
    if sequence.len() < 2 {
        return Err(Error::FewerThanTwoFixations(sequence.len()));
    }
    let n = sequence.len() as f64;
    let mut visits: BTreeMap<&L, f64> = BTreeMap::new();
    for loc in sequence {
        *visits.entry(loc).or_insert(0.0) += 1.0;
    }
    let mut rows: BTreeMap<&L, BTreeMap<&L, f64>> = BTreeMap::new();
    for w in sequence.windows(2) {
        *rows
            .entry(&w[0])
            .or_default()
            .entry(&w[1])
            .or_insert(0.0) += 1.0;
    }
    let mut h = 0.0;
    for (loc, row) in &rows {
        let out: f64 = row.values().sum();
        let row_entropy: f64 = -row
            .values()
            .map(|&c| {
                let t = c / out;
                t * t.log2()
            })
            .sum::<f64>();
        h += visits[loc] / n * row_entropy;
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;
    use std::collections::BTreeMap;

    fn dist(masses: &[(u32, f64)]) -> Distribution<u32> {
        let w: BTreeMap<u32, f64> = masses.iter().cloned().collect();
        Distribution::from_weights(&w).unwrap()
    }

    fn random_dist(rng: &mut ChaCha12Rng, support: &[u32]) -> Distribution<u32> {
        let w: BTreeMap<u32, f64> = support
            .iter()
            .map(|&l| (l, rng.random_range(0.0..1.0f64)))
            .collect();
        Distribution::from_weights(&w).unwrap()
    }

    #[test]
    fn entropy_closed_forms() {
        assert_eq!(shannon_entropy(&dist(&[(0, 1.0)])), 0.0);
        let uniform25 = dist(&(0..25).map(|i| (i, 1.0)).collect::<Vec<_>>());
        assert_relative_eq!(
            shannon_entropy(&uniform25),
            4.643856189774724,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            shannon_entropy(&dist(&[(0, 0.75), (1, 0.25)])),
            0.8112781244591328,
            epsilon = 1e-12
        );
    }

    #[test]
    fn jsd_closed_forms() {
        let p = dist(&[(0, 1.0), (1, 0.0)]);
        let q = dist(&[(0, 0.0), (1, 1.0)]);
        let m = dist(&[(0, 0.5), (1, 0.5)]);
        assert_eq!(jsd(&p, &p).unwrap(), 0.0);
        assert_relative_eq!(jsd(&p, &q).unwrap(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(jsd(&p, &m).unwrap(), 0.31127812445913283, epsilon = 1e-6);
        assert_relative_eq!(srjsd(&p, &m).unwrap(), 0.5579230452841438, epsilon = 1e-6);
        assert_eq!(srjsd(&p, &p).unwrap(), 0.0);
        assert_relative_eq!(srjsd(&p, &q).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn jsd_rejects_mismatched_supports() {
        let p = dist(&[(0, 0.5), (1, 0.5)]);
        let q = dist(&[(0, 0.5), (2, 0.5)]);
        assert!(matches!(jsd(&p, &q), Err(Error::SupportMismatch)));
    }

    #[test]
    fn jsd_symmetry_is_exact_on_random_pairs() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let support: Vec<u32> = (0..12).collect();
        for _ in 0..200 {
            let p = random_dist(&mut rng, &support);
            let q = random_dist(&mut rng, &support);
            let a = jsd(&p, &q).unwrap();
            let b = jsd(&q, &p).unwrap();
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn srjsd_triangle_inequality() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let support: Vec<u32> = (0..8).collect();
        for _ in 0..1000 {
            let p = random_dist(&mut rng, &support);
            let q = random_dist(&mut rng, &support);
            let r = random_dist(&mut rng, &support);
            let pq = srjsd(&p, &q).unwrap();
            let qr = srjsd(&q, &r).unwrap();
            let pr = srjsd(&p, &r).unwrap();
            assert!(pr <= pq + qr + 1e-9);
        }
    }

    #[test]
    fn srjsd_zero_iff_equal() {
        let p = dist(&[(0, 0.3), (1, 0.7)]);
        let q = dist(&[(0, 0.3), (1, 0.7)]);
        assert_eq!(srjsd(&p, &q).unwrap(), 0.0);
        let r = dist(&[(0, 0.300001), (1, 0.699999)]);
        assert!(srjsd(&p, &r).unwrap() > 0.0);
    }

    #[test]
    fn entropy_rate_deterministic_cycle_is_zero() {
        let seq = vec!["A", "B", "A", "B", "A", "B"];
        assert_eq!(entropy_rate(&seq).unwrap(), 0.0);
    }

    #[test]
    fn entropy_rate_fair_two_state_chain_is_one_bit() {
        // transitions 0->0, 0->1, 1->1, 1->0 once each: both rows are
        // (0.5, 0.5), so the rate is 1 bit whatever the visit weights
        let seq = vec![0, 0, 1, 1, 0];
        assert_relative_eq!(entropy_rate(&seq).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn entropy_rate_matches_analytic_chain() {
        // Doubly stochastic 3-state chain: stationary distribution is
        // uniform, so the analytic rate is -(1/3) sum T_ij log2 T_ij.
        let t = [[0.6, 0.3, 0.1], [0.1, 0.6, 0.3], [0.3, 0.1, 0.6]];
        let analytic = 1.295461844238322;
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        let mut state = 0usize;
        let mut seq = vec![0usize];
        for _ in 0..10_000 {
            let u: f64 = rng.random_range(0.0..1.0);
            state = if u < t[state][0] {
                0
            } else if u < t[state][0] + t[state][1] {
                1
            } else {
                2
            };
            seq.push(state);
        }
        let h = entropy_rate(&seq).unwrap();
        assert!((h - analytic).abs() < 0.05, "h = {h}");
    }

    #[test]
    fn entropy_rate_needs_two_elements() {
        assert!(matches!(
            entropy_rate(&["A"]),
            Err(Error::FewerThanTwoFixations(1))
        ));
    }

    #[test]
    fn entropy_bounds_on_random_distributions() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for _ in 0..500 {
            let k = rng.random_range(1..40u32);
            let support: Vec<u32> = (0..k).collect();
            let p = random_dist(&mut rng, &support);
            let h = shannon_entropy(&p);
            assert!(h >= -1e-12);
            assert!(h <= (k as f64).log2() + 1e-12);
        }
    }
}
