//! q-integers and Gaussian binomial coefficients in exact integer arithmetic.
//!
//! Values are `u128`; arithmetic is checked and panics on overflow, which only
//! happens far beyond any geometry that fits in memory.

fn pow(q: u64, k: u32) -> u128 {
    (q as u128).checked_pow(k).expect("q-power overflows u128")
}

/// `[n]_q = (q^n - 1) / (q - 1) = 1 + q + ... + q^(n-1)`.
pub fn q_integer(n: u32, q: u64) -> u128 {
    assert!(q >= 2, "q must be at least 2");
    (pow(q, n) - 1) / (q as u128 - 1)
}

/// `[n]_q! = [n]_q [n-1]_q ... [1]_q`, with `[0]_q! = 1`.
pub fn q_factorial(n: u32, q: u64) -> u128 {
    (1..=n).fold(1u128, |acc, k| acc.checked_mul(q_integer(k, q)).expect("q-factorial overflows u128"))
}

/// The Gaussian binomial `binom(n, i)_q`; zero when `i` lies outside `[0, n]`.
///
/// Computed as a running product `prod_{k<i} [n-k]_q / [k+1]_q`; every partial
/// product is itself a Gaussian binomial, so each division is exact.
pub fn gaussian_binomial(n: u32, i: i64, q: u64) -> u128 {
    assert!(q >= 2, "q must be at least 2");
    if i < 0 || i > n as i64 {
        return 0;
    }
    let i = (i as u32).min(n - i as u32);
    let mut acc = 1u128;
    for k in 0..i {
        acc = acc.checked_mul(q_integer(n - k, q)).expect("Gaussian binomial overflows u128");
        acc /= q_integer(k + 1, q);
    }
    acc
}

/// Number of subspaces of GF(q)^n.
pub fn subspace_count(n: u32, q: u64) -> u128 {
    (0..=n as i64).map(|i| gaussian_binomial(n, i, q)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn q_integer_examples() {
        assert_eq!(q_integer(0, 2), 0);
        assert_eq!(q_integer(3, 2), 7);
        assert_eq!(q_integer(2, 3), 4);
    }

    #[test]
    fn gaussian_binomial_examples() {
        for n in 0..6 {
            for q in [2, 3, 4, 5] {
                assert_eq!(gaussian_binomial(n, 0, q), 1);
            }
        }
        assert_eq!(gaussian_binomial(4, 2, 2), 35);
        assert_eq!(gaussian_binomial(4, 1, 2), 15);
        assert_eq!(gaussian_binomial(4, 3, 2), 15);
        assert_eq!(gaussian_binomial(3, 2, 3), 13);
        assert_eq!(gaussian_binomial(4, 5, 2), 0);
        assert_eq!(gaussian_binomial(4, -1, 2), 0);
        assert_eq!(subspace_count(4, 2), 67);
        assert_eq!(subspace_count(5, 2), 374);
    }

    #[test]
    fn agrees_with_factorial_formula() {
        for q in 2..6u64 {
            for n in 0..8u32 {
                for i in 0..=n {
                    let direct = q_factorial(n, q) / (q_factorial(i, q) * q_factorial(n - i, q));
                    assert_eq!(gaussian_binomial(n, i as i64, q), direct, "n={n} i={i} q={q}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn q_integer_step(n in 1u32..20, q in 2u64..9) {
            prop_assert_eq!(q_integer(n, q) - q_integer(n - 1, q), pow(q, n - 1));
        }

        #[test]
        fn q_pascal(n in 2u32..14, q in 2u64..7, i_frac in 0.0f64..1.0) {
            let i = 1 + ((n - 1) as f64 * i_frac) as u32;
            prop_assume!(i > 0 && i < n);
            let lhs = gaussian_binomial(n, i as i64, q);
            let rhs = gaussian_binomial(n - 1, i as i64 - 1, q)
                + pow(q, i) * gaussian_binomial(n - 1, i as i64, q);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn symmetric(n in 0u32..14, q in 2u64..7, i in 0u32..14) {
            prop_assume!(i <= n);
            prop_assert_eq!(gaussian_binomial(n, i as i64, q), gaussian_binomial(n, (n - i) as i64, q));
        }
    }
}
