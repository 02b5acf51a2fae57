//! Integer kernels behind the rational matrix operations.
//!
//! A rational matrix is scaled by the lcm of its denominators; the product of
//! the integer numerators is formed in `i128` when a magnitude bound proves it
//! cannot overflow, and in `BigInt` otherwise.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use super::Scalar;

/// Numerators over a common denominator.
pub(crate) struct Scaled {
    pub denom: BigInt,
    pub nums: Vec<BigInt>,
}

pub(crate) fn scale_to_integers(data: &[Scalar]) -> Scaled {
    let denom = data.iter().fold(BigInt::one(), |acc, x| {
        if x.denom().is_one() {
            acc
        } else {
            acc.lcm(x.denom())
        }
    });
    let nums = if denom.is_one() {
        data.iter().map(|x| x.numer().clone()).collect()
    } else {
        data.iter().map(|x| x.numer() * (&denom / x.denom())).collect()
    };
    Scaled { denom, nums }
}

/// Converts integer numerators back to reduced rationals over `denom`.
pub(crate) fn unscale(nums: Vec<BigInt>, denom: &BigInt) -> Vec<Scalar> {
    if denom.is_one() {
        nums.into_par_iter().map(Scalar::from_integer).collect()
    } else {
        nums.into_par_iter().map(|n| Scalar::new(n, denom.clone())).collect()
    }
}

fn max_bits(v: &[BigInt]) -> u64 {
    v.iter().map(|x| x.bits()).max().unwrap_or(0)
}

fn to_i128(v: &[BigInt]) -> Vec<i128> {
    v.iter().map(|x| x.to_i128().expect("bounded by bit check")).collect()
}

fn bits_of(n: usize) -> u64 {
    (usize::BITS - n.leading_zeros()) as u64
}

/// `a (n x k) * b (k x m)`, row-major integer matrices.
pub(crate) fn mul_int(a: &[BigInt], b: &[BigInt], n: usize, k: usize, m: usize) -> Vec<BigInt> {
    if max_bits(a) + max_bits(b) + bits_of(k) <= 126 {
        let (a, b) = (to_i128(a), to_i128(b));
        let out: Vec<i128> = (0..n)
            .into_par_iter()
            .flat_map_iter(|i| {
                let mut row = vec![0i128; m];
                for (t, &x) in a[i * k..(i + 1) * k].iter().enumerate() {
                    if x == 0 {
                        continue;
                    }
                    for (r, &y) in row.iter_mut().zip(&b[t * m..(t + 1) * m]) {
                        *r += x * y;
                    }
                }
                row
            })
            .collect();
        return out.into_iter().map(BigInt::from).collect();
    }
    (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut row = vec![BigInt::zero(); m];
            for (t, x) in a[i * k..(i + 1) * k].iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (r, y) in row.iter_mut().zip(&b[t * m..(t + 1) * m]) {
                    if !y.is_zero() {
                        *r += x * y;
                    }
                }
            }
            row
        })
        .collect()
}

/// Divides out the gcd of all entries, making the first nonzero positive.
pub(crate) fn primitive(v: &mut [BigInt]) {
    let g = v.iter().fold(BigInt::zero(), |g, x| if x.is_zero() { g } else { g.gcd(x) });
    if g.is_zero() {
        return;
    }
    let negate = v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
    let g = if negate { -g } else { g };
    if !g.is_one() {
        for x in v.iter_mut() {
            *x = &*x / &g;
        }
    }
}

/// Scales a rational vector to a primitive integer vector spanning the same line.
pub(crate) fn primitive_integer_vector(v: &[Scalar]) -> Vec<BigInt> {
    let mut nums = scale_to_integers(v).nums;
    primitive(&mut nums);
    nums
}
