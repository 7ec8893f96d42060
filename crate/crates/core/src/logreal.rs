//! Nonnegative reals carried as natural logarithms.
//!
//! The exact probability sums multiply factorials far beyond what any float
//! holds directly, so every intermediate product lives in log space and is
//! materialized to a plain real only at API boundaries. Exact zero is a flag
//! rather than `-inf` so that sum/max logic never has to reason about
//! `-inf - -inf` NaNs.

use std::cmp::Ordering;
use std::ops::{Div, Mul, MulAssign};

use crate::scalar::Real;

/// A nonnegative real number stored as its natural logarithm, with an
/// explicit representation of exact zero.
#[derive(Clone, Copy, Debug)]
pub struct LogReal<F> {
    ln: F,
    zero: bool,
}

impl<F: Real> LogReal<F> {
    /// Exact zero (the additive identity).
    pub fn zero() -> Self {
        Self { ln: F::zero(), zero: true }
    }

    /// Exact one (the multiplicative identity, log 0).
    pub fn one() -> Self {
        Self { ln: F::zero(), zero: false }
    }

    /// Magnitude `exp(ln)`. `ln` must be finite.
    pub fn from_ln(ln: F) -> Self {
        debug_assert!(ln.is_finite(), "LogReal built from non-finite log");
        Self { ln, zero: false }
    }

    /// Magnitude from a plain nonnegative value; zero maps to exact zero.
    pub fn from_value(value: F) -> Self {
        assert!(value >= F::zero(), "LogReal magnitude must be nonnegative");
        if value == F::zero() {
            Self::zero()
        } else {
            Self::from_ln(value.ln())
        }
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    /// Natural log of the magnitude; `None` for exact zero.
    pub fn ln(&self) -> Option<F> {
        if self.zero {
            None
        } else {
            Some(self.ln)
        }
    }

    /// Materialize to a plain real. Underflows to 0 / overflows to `inf`
    /// when the magnitude leaves the scalar's range.
    pub fn value(&self) -> F {
        if self.zero {
            F::zero()
        } else {
            self.ln.exp()
        }
    }
}

impl<F: Real> Mul for LogReal<F> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        if self.zero || rhs.zero {
            Self::zero()
        } else {
            Self { ln: self.ln + rhs.ln, zero: false }
        }
    }
}

impl<F: Real> MulAssign for LogReal<F> {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl<F: Real> Div for LogReal<F> {
    type Output = Self;

    fn div(self, rhs: Self) -> Self {
        assert!(!rhs.zero, "division of LogReal by exact zero");
        if self.zero {
            Self::zero()
        } else {
            Self { ln: self.ln - rhs.ln, zero: false }
        }
    }
}

impl<F: Real> PartialEq for LogReal<F> {
    fn eq(&self, other: &Self) -> bool {
        match (self.zero, other.zero) {
            (true, true) => true,
            (false, false) => self.ln == other.ln,
            _ => false,
        }
    }
}

impl<F: Real> PartialOrd for LogReal<F> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self.zero, other.zero) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            (false, false) => self.ln.partial_cmp(&other.ln),
        }
    }
}

/// Log of the sum of magnitudes, evaluated shifted by the maximum term so no
/// intermediate overflows. Empty or all-zero input yields exact zero.
///
/// Summation order is the slice order, so results are reproducible
/// independent of how callers partition their work.
pub fn log_sum_exp<F: Real>(terms: &[LogReal<F>]) -> LogReal<F> {
    let mut max: Option<F> = None;
    for t in terms {
        if let Some(l) = t.ln() {
            max = Some(match max {
                Some(m) if m >= l => m,
                _ => l,
            });
        }
    }
    let Some(max) = max else {
        return LogReal::zero();
    };
    let mut sum = F::zero();
    for t in terms {
        if let Some(l) = t.ln() {
            sum = sum + (l - max).exp();
        }
    }
    LogReal::from_ln(max + sum.ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    type L = LogReal<f64>;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn zero_and_one_identities() {
        assert!(L::zero().is_zero());
        assert_eq!(L::one().value(), 1.0);
        assert!((L::one() * L::zero()).is_zero());
        assert!((L::zero() * L::zero()).is_zero());
        assert_eq!((L::one() * L::one()).value(), 1.0);
    }

    #[test]
    fn mul_adds_logs() {
        let a = L::from_value(3.0);
        let b = L::from_value(7.0);
        assert!(close((a * b).value(), 21.0, 1e-14));
        assert!(close((a / b).value(), 3.0 / 7.0, 1e-14));
    }

    #[test]
    fn lse_two_ones_is_two() {
        let r = log_sum_exp(&[L::one(), L::one()]);
        assert!(close(r.value(), 2.0, 1e-14));
    }

    #[test]
    fn lse_zero_is_additive_identity() {
        let r = log_sum_exp(&[L::from_value(0.5), L::zero()]);
        assert!(close(r.value(), 0.5, 1e-14));
    }

    #[test]
    fn lse_empty_and_all_zero() {
        assert!(log_sum_exp::<f64>(&[]).is_zero());
        assert!(log_sum_exp(&[L::zero(), L::zero()]).is_zero());
    }

    #[test]
    fn lse_huge_terms_shift_by_max() {
        // Two copies of 1e300: the naive sum would overflow, the shifted sum
        // is ln(1e300) + ln 2.
        let big = L::from_ln(300.0 * std::f64::consts::LN_10);
        let r = log_sum_exp(&[big, big]);
        let expect = 300.0 * std::f64::consts::LN_10 + 2.0f64.ln();
        assert!(close(r.ln().unwrap(), expect, 1e-15));
    }

    proptest::proptest! {
        #[test]
        fn lse_permutation_invariant(mut lns in proptest::collection::vec(-200.0f64..200.0, 1..20)) {
            let fwd: Vec<L> = lns.iter().map(|&l| L::from_ln(l)).collect();
            let a = log_sum_exp(&fwd);
            lns.reverse();
            let rev: Vec<L> = lns.iter().map(|&l| L::from_ln(l)).collect();
            let b = log_sum_exp(&rev);
            proptest::prop_assert!((a.ln().unwrap() - b.ln().unwrap()).abs()
                <= 1e-12 * a.ln().unwrap().abs().max(1.0));
        }

        #[test]
        fn lse_associative_consistent(lns in proptest::collection::vec(-100.0f64..100.0, 2..12)) {
            let all: Vec<L> = lns.iter().map(|&l| L::from_ln(l)).collect();
            let whole = log_sum_exp(&all);
            let (lo, hi) = all.split_at(all.len() / 2);
            let split = log_sum_exp(&[log_sum_exp(lo), log_sum_exp(hi)]);
            proptest::prop_assert!((whole.ln().unwrap() - split.ln().unwrap()).abs()
                <= 1e-12 * whole.ln().unwrap().abs().max(1.0));
        }
    }
}
