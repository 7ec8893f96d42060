//! Log-space combinatorial primitives: `ln n!`, `ln C(n,j)` and the binomial
//! probability mass, shared by every analytic module.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::logreal::LogReal;
use crate::scalar::{real, Real};

/// Largest `n` answered from the precomputed table; larger arguments use the
/// Stirling series.
const TABLE_LIMIT: usize = 10_000;

fn ln_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = vec![0.0f64; TABLE_LIMIT + 1];
        let mut acc = 0.0f64;
        for i in 1..=TABLE_LIMIT {
            acc += (i as f64).ln();
            table[i] = acc;
        }
        table
    })
}

/// Stirling series for `ln n!`; with three correction terms the truncation
/// error at n = 10^4 is far below f64 resolution.
fn stirling(n: f64) -> f64 {
    const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_7;
    let n2 = n * n;
    let correction = (1.0 / 12.0 - (1.0 / 360.0 - 1.0 / (1260.0 * n2)) / n2) / n;
    (n + 0.5) * n.ln() - n + HALF_LN_TWO_PI + correction
}

fn ln_factorial_f64(n: u64) -> f64 {
    if n <= TABLE_LIMIT as u64 {
        ln_factorial_table()[n as usize]
    } else {
        stirling(n as f64)
    }
}

/// `ln(n!)`. O(1): table lookup up to 10^4, Stirling series above.
pub fn ln_factorial<F: Real>(n: u64) -> F {
    real(ln_factorial_f64(n))
}

/// `ln C(n, j)`. Rejects `j > n`.
pub fn ln_binomial<F: Real>(n: u64, j: u64) -> Result<F> {
    if j > n {
        return Err(Error::InvalidArgument(format!(
            "binomial coefficient requires j <= n, got n={n}, j={j}"
        )));
    }
    Ok(real(
        ln_factorial_f64(n) - ln_factorial_f64(j) - ln_factorial_f64(n - j),
    ))
}

/// Log of the binomial probability mass `C(n,j) q^j (1-q)^(n-j)`.
///
/// Degenerate success probabilities (`q <= 0` or `q >= 1`) are rejected;
/// callers handle the single-set cache (`m = 1`) separately.
pub fn ln_binomial_pmf<F: Real>(n: u64, j: u64, q: F) -> Result<LogReal<F>> {
    if q <= F::zero() || q >= F::one() {
        return Err(Error::InvalidArgument(format!(
            "binomial pmf requires 0 < q < 1, got q={q:?}"
        )));
    }
    let jf = real::<F>(j as f64);
    let rest = real::<F>((n - j) as f64);
    let ln = ln_binomial::<F>(n, j)? + jf * q.ln() + rest * (-q).ln_1p();
    Ok(LogReal::from_ln(ln))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn factorial_base_cases() {
        assert_eq!(ln_factorial::<f64>(0), 0.0);
        assert_eq!(ln_factorial::<f64>(1), 0.0);
    }

    #[test]
    fn factorial_five_vs_direct_product() {
        let product: u64 = (1..=5).product(); // 120
        assert!(rel_close(ln_factorial::<f64>(5), (product as f64).ln(), 1e-14));
    }

    #[test]
    fn factorial_twenty_vs_exact_integer() {
        let product: u128 = (1..=20u128).product();
        assert!(rel_close(ln_factorial::<f64>(20), (product as f64).ln(), 1e-13));
    }

    #[test]
    fn factorial_difference_is_ln_n() {
        // ln n! - ln (n-1)! = ln n across the table/Stirling boundary.
        for n in 1..=100_000u64 {
            let d = ln_factorial::<f64>(n) - ln_factorial::<f64>(n - 1);
            assert!(
                rel_close(d, (n as f64).ln(), 1e-10),
                "n={n}: diff {d} vs ln n {}",
                (n as f64).ln()
            );
        }
    }

    #[test]
    fn stirling_matches_table_extension() {
        // Extend the exact cumulative sum past the table cutoff and compare.
        let mut acc = ln_factorial::<f64>(TABLE_LIMIT as u64);
        for n in (TABLE_LIMIT as u64 + 1)..=(TABLE_LIMIT as u64 + 500) {
            acc += (n as f64).ln();
            assert!(rel_close(ln_factorial::<f64>(n), acc, 1e-13));
        }
    }

    #[test]
    fn binomial_4_choose_2_vs_subset_enumeration() {
        // Enumerate the two-element subsets of {0,1,2,3} directly.
        let mut count = 0u64;
        for a in 0..4 {
            for b in (a + 1)..4 {
                let _ = (a, b);
                count += 1;
            }
        }
        assert_eq!(count, 6);
        assert!(rel_close(ln_binomial::<f64>(4, 2).unwrap(), (count as f64).ln(), 1e-14));
    }

    #[test]
    fn binomial_edge_and_symmetry() {
        assert_eq!(ln_binomial::<f64>(7, 0).unwrap(), 0.0);
        // C(16,14) = C(16,2) = 120 by direct product.
        let direct = (16 * 15 / 2) as f64;
        assert!(rel_close(ln_binomial::<f64>(16, 14).unwrap(), direct.ln(), 1e-13));
    }

    #[test]
    fn binomial_rejects_j_above_n() {
        assert!(ln_binomial::<f64>(3, 4).is_err());
    }

    #[test]
    fn binomial_matches_pascal_recurrence_up_to_60() {
        // Exact integers via Pascal's triangle as the independent oracle.
        let mut row: Vec<u128> = vec![1];
        for n in 0..=60u64 {
            for (j, &exact) in row.iter().enumerate() {
                let ln = ln_binomial::<f64>(n, j as u64).unwrap();
                assert!(
                    rel_close(ln.exp(), exact as f64, 1e-9),
                    "C({n},{j}): {} vs {exact}",
                    ln.exp()
                );
            }
            let mut next = vec![1u128; row.len() + 1];
            for j in 1..row.len() {
                next[j] = row[j - 1] + row[j];
            }
            row = next;
        }
    }

    #[test]
    fn pmf_single_trial_cases() {
        let p = ln_binomial_pmf::<f64>(1, 0, 0.5).unwrap();
        assert!(rel_close(p.value(), 0.5, 1e-14));
        let p = ln_binomial_pmf::<f64>(2, 1, 0.5).unwrap();
        assert!(rel_close(p.value(), 0.5, 1e-14));
    }

    #[test]
    fn pmf_rare_event_closed_form() {
        let p = ln_binomial_pmf::<f64>(1000, 0, 0.001).unwrap();
        assert!(rel_close(p.ln().unwrap(), 1000.0 * 0.999f64.ln(), 1e-13));
        assert!(rel_close(p.value(), 0.36770, 1e-4));
    }

    #[test]
    fn pmf_rejects_degenerate_q() {
        assert!(ln_binomial_pmf::<f64>(4, 2, 0.0).is_err());
        assert!(ln_binomial_pmf::<f64>(4, 2, 1.0).is_err());
    }

    proptest::proptest! {
        #[test]
        fn pmf_normalizes(n in 1u64..200, q in 0.01f64..0.99) {
            let total: f64 = (0..=n)
                .map(|j| ln_binomial_pmf::<f64>(n, j, q).unwrap().value())
                .sum();
            proptest::prop_assert!((total - 1.0).abs() <= 1e-9);
        }
    }
}
