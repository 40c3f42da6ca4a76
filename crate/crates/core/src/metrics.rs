//! Partition agreement scores. Both are invariant to relabelling.

use crate::data::Labels;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contingency {
    /// `counts[i][j]`: points in cluster `i` of the first partition and
    /// cluster `j` of the second.
    pub counts: Vec<Vec<u64>>,
    pub row_sums: Vec<u64>,
    pub col_sums: Vec<u64>,
    pub n: u64,
}

pub fn contingency(a: &Labels, b: &Labels) -> Result<Contingency> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let mut counts = vec![vec![0u64; b.k_count()]; a.k_count()];
    for (&i, &j) in a.as_slice().iter().zip(b.as_slice()) {
        counts[i][j] += 1;
    }
    let row_sums = counts.iter().map(|r| r.iter().sum()).collect();
    let col_sums = (0..b.k_count())
        .map(|j| counts.iter().map(|r| r[j]).sum())
        .collect();
    Ok(Contingency {
        counts,
        row_sums,
        col_sums,
        n: a.len() as u64,
    })
}

fn pairs(m: u64) -> f64 {
    (m as f64) * (m.saturating_sub(1) as f64) / 2.0
}

/// Hubert–Arabie adjusted Rand index. Identical partitions score 1,
/// including the trivial ones where the chance correction is undefined.
pub fn adjusted_rand_index(a: &Labels, b: &Labels) -> Result<f64> {
    let t = contingency(a, b)?;
    if t.n < 2 {
        return Ok(1.0);
    }
    let index: f64 = t.counts.iter().flatten().map(|&m| pairs(m)).sum();
    let sa: f64 = t.row_sums.iter().map(|&m| pairs(m)).sum();
    let sb: f64 = t.col_sums.iter().map(|&m| pairs(m)).sum();
    let expected = sa * sb / pairs(t.n);
    let max = 0.5 * (sa + sb);
    if max == expected {
        return Ok(1.0);
    }
    Ok((index - expected) / (max - expected))
}

/// Mutual information over the arithmetic mean of the two entropies
/// (natural log). Two single-cluster partitions score 1.
pub fn normalized_mutual_information(a: &Labels, b: &Labels) -> Result<f64> {
    let t = contingency(a, b)?;
    if t.n == 0 {
        return Ok(1.0);
    }
    let n = t.n as f64;
    let entropy = |sums: &[u64]| -> f64 {
        sums.iter()
            .filter(|&&m| m > 0)
            .map(|&m| {
                let p = m as f64 / n;
                -p * p.ln()
            })
            .sum()
    };
    let ha = entropy(&t.row_sums);
    let hb = entropy(&t.col_sums);
    if ha + hb == 0.0 {
        return Ok(1.0);
    }
    let mut mi = 0.0;
    for (i, row) in t.counts.iter().enumerate() {
        for (j, &m) in row.iter().enumerate() {
            if m > 0 {
                let m = m as f64;
                mi += m / n * (m * n / (t.row_sums[i] as f64 * t.col_sums[j] as f64)).ln();
            }
        }
    }
    Ok((mi / (0.5 * (ha + hb))).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn l(v: &[usize]) -> Labels {
        Labels::from_vec(v.to_vec())
    }

    #[test]
    fn identical_partitions_score_one() {
        let a = l(&[0, 0, 1, 1, 2]);
        assert_eq!(adjusted_rand_index(&a, &a).unwrap(), 1.0);
        assert_relative_eq!(
            normalized_mutual_information(&a, &a).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        let one = l(&[0, 0, 0]);
        assert_eq!(adjusted_rand_index(&one, &one).unwrap(), 1.0);
        assert_eq!(normalized_mutual_information(&one, &one).unwrap(), 1.0);
    }

    #[test]
    fn relabelling_does_not_matter() {
        let a = l(&[0, 0, 1, 1, 2, 2]);
        let b = l(&[2, 2, 0, 0, 1, 1]);
        assert_eq!(adjusted_rand_index(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn crossed_partitions() {
        let a = l(&[0, 0, 1, 1]);
        let b = l(&[0, 1, 0, 1]);
        assert_relative_eq!(adjusted_rand_index(&a, &b).unwrap(), -0.5, epsilon = 1e-15);
        assert_eq!(normalized_mutual_information(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn partial_agreement_hand_values() {
        let a = l(&[0, 0, 1, 1]);
        let b = l(&[0, 1, 1, 1]);
        assert_relative_eq!(adjusted_rand_index(&a, &b).unwrap(), 0.0, epsilon = 1e-15);
        assert_relative_eq!(
            normalized_mutual_information(&a, &b).unwrap(),
            0.3437110184854508,
            max_relative = 1e-12
        );
    }

    #[test]
    fn length_mismatch() {
        assert!(adjusted_rand_index(&l(&[0, 1]), &l(&[0])).is_err());
    }

    fn brute_ari(a: &[usize], b: &[usize]) -> f64 {
        let n = a.len();
        let (mut both, mut in_a, mut in_b) = (0.0, 0.0, 0.0);
        for i in 0..n {
            for j in i + 1..n {
                let sa = a[i] == a[j];
                let sb = b[i] == b[j];
                both += f64::from(u8::from(sa && sb));
                in_a += f64::from(u8::from(sa));
                in_b += f64::from(u8::from(sb));
            }
        }
        let total = (n * (n - 1) / 2) as f64;
        let expected = in_a * in_b / total;
        let max = 0.5 * (in_a + in_b);
        if max == expected {
            1.0
        } else {
            (both - expected) / (max - expected)
        }
    }

    proptest! {
        #[test]
        fn ari_matches_pair_counting(
            pairs in proptest::collection::vec((0usize..4, 0usize..5), 2..60)
        ) {
            let (a, b): (Vec<usize>, Vec<usize>) = pairs.into_iter().unzip();
            let got = adjusted_rand_index(&l(&a), &l(&b)).unwrap();
            prop_assert!((got - brute_ari(&a, &b)).abs() <= 1e-12);
            prop_assert!(got <= 1.0 + 1e-12);
        }

        #[test]
        fn scores_are_symmetric(
            pairs in proptest::collection::vec((0usize..4, 0usize..5), 1..60)
        ) {
            let (a, b): (Vec<usize>, Vec<usize>) = pairs.into_iter().unzip();
            let (a, b) = (l(&a), l(&b));
            prop_assert_eq!(adjusted_rand_index(&a, &b).unwrap(), adjusted_rand_index(&b, &a).unwrap());
            let n1 = normalized_mutual_information(&a, &b).unwrap();
            let n2 = normalized_mutual_information(&b, &a).unwrap();
            prop_assert!((n1 - n2).abs() <= 1e-12);
            prop_assert!((0.0..=1.0).contains(&n1));
        }
    }
}
