//! Rank-based fitness shaping.
//!
//! Raw returns are reduced to their ascending ranks (ties broken by input
//! index), which makes the weights invariant under any strictly increasing
//! transformation of the returns and insensitive to outliers.

use crate::error::{Error, Result};

/// Ascending rank of each input, ties broken by input index.
fn ranks(returns: &[f64]) -> Result<Vec<usize>> {
    if returns.len() < 2 {
        return Err(Error::invalid_argument(format!(
            "shaping needs at least 2 returns, got {}",
            returns.len()
        )));
    }
    if returns.iter().any(|r| r.is_nan()) {
        return Err(Error::invalid_argument("NaN return passed to shaping"));
    }
    let mut order: Vec<usize> = (0..returns.len()).collect();
    order.sort_by(|&a, &b| returns[a].partial_cmp(&returns[b]).unwrap().then(a.cmp(&b)));
    let mut rank = vec![0usize; returns.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    Ok(rank)
}

/// Centered ranks for ES: the item with ascending rank `r` gets weight
/// `r/(N-1) - 0.5`, so the weights span [-0.5, 0.5] and sum to zero.
pub fn rank_shape(returns: &[f64]) -> Result<Vec<f64>> {
    let n = returns.len() as f64;
    Ok(ranks(returns)?
        .into_iter()
        .map(|r| r as f64 / (n - 1.0) - 0.5)
        .collect())
}

/// Strictly positive ranks for GASS: `0.1 + r/(N-1)`, spanning [0.1, 1.1].
///
/// The lower bound is kept away from zero so the normalizer `sum(w)` of the
/// GASS update is always positive.
pub fn positive_rank_shape(returns: &[f64]) -> Result<Vec<f64>> {
    let n = returns.len() as f64;
    Ok(ranks(returns)?
        .into_iter()
        .map(|r| 0.1 + r as f64 / (n - 1.0))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn centered_ranks_basic() {
        assert_eq!(rank_shape(&[5.0, 1.0, 3.0]).unwrap(), vec![0.5, -0.5, 0.0]);
    }

    #[test]
    fn invariant_under_monotone_transform() {
        let x = [0.3, -2.0, 7.5, 7.4, 0.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 7.0).collect();
        assert_eq!(rank_shape(&x).unwrap(), rank_shape(&y).unwrap());
        assert_eq!(positive_rank_shape(&x).unwrap(), positive_rank_shape(&y).unwrap());
    }

    #[test]
    fn ties_break_by_index() {
        assert_eq!(rank_shape(&[1.0, 1.0]).unwrap(), vec![-0.5, 0.5]);
    }

    #[test]
    fn positive_ranks_basic() {
        let w = positive_rank_shape(&[5.0, 1.0, 3.0]).unwrap();
        for (got, want) in w.iter().zip([1.1, 0.1, 0.6]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        let eta: f64 = w.iter().sum();
        assert!((eta - 1.8).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(rank_shape(&[1.0]).is_err());
        assert!(rank_shape(&[1.0, f64::NAN]).is_err());
        assert!(positive_rank_shape(&[1.0]).is_err());
        assert!(positive_rank_shape(&[f64::NAN, 0.0]).is_err());
    }

    proptest! {
        #[test]
        fn centered_ranks_sum_to_zero(xs in proptest::collection::vec(-1e6..1e6f64, 2..40)) {
            let w = rank_shape(&xs).unwrap();
            prop_assert!(w.iter().sum::<f64>().abs() < 1e-9);
        }

        #[test]
        fn positive_ranks_bounded_and_monotone(xs in proptest::collection::vec(-1e6..1e6f64, 2..40)) {
            let w = positive_rank_shape(&xs).unwrap();
            prop_assert!(w.iter().all(|v| (0.1 - 1e-12..=1.1 + 1e-12).contains(v)));
            // Sorting inputs sorts the weights the same way.
            let mut pairs: Vec<(f64, f64)> = xs.iter().copied().zip(w).collect();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            for win in pairs.windows(2) {
                prop_assert!(win[0].1 <= win[1].1 + 1e-12);
            }
        }

        #[test]
        fn invariance_random_affine_transform(xs in proptest::collection::vec(-100.0..100.0f64, 2..20),
                                              a in 0.1..10.0f64, b in -5.0..5.0f64) {
            let ys: Vec<f64> = xs.iter().map(|v| a * v + b).collect();
            prop_assert_eq!(rank_shape(&xs).unwrap(), rank_shape(&ys).unwrap());
        }
    }
}
