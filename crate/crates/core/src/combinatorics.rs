//! Closed-form counts of pair partitions.

use num_bigint::BigUint;
use num_traits::One;

/// `(2k-1)!! = (2k)! / (2^k k!)`, the number of pairings of `2k` points.
pub fn double_factorial_odd(k: usize) -> BigUint {
    (1..=k).fold(BigUint::one(), |acc, i| acc * BigUint::from(2 * i - 1))
}

/// Catalan number `(2k)! / (k! (k+1)!)`, the number of non-crossing pairings.
pub fn catalan(k: usize) -> BigUint {
    // C_{i} = C_{i-1} * 2(2i-1) / (i+1), exact at every step.
    (1..=k).fold(BigUint::one(), |acc, i| {
        acc * BigUint::from(2 * (2 * i - 1)) / BigUint::from(i + 1)
    })
}

pub fn checked_double_factorial_odd(k: usize) -> Option<u64> {
    (1..=k as u64).try_fold(1u64, |acc, i| acc.checked_mul(2 * i - 1))
}

pub fn checked_catalan(k: usize) -> Option<u64> {
    let mut acc: u128 = 1;
    for i in 1..=k as u128 {
        acc = acc.checked_mul(2 * (2 * i - 1))? / (i + 1);
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}
