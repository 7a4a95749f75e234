//! Integer helpers for norm equations over `Z[i]`.

use num_bigint::{BigInt, BigUint};
use num_integer::Roots;
use num_traits::{One, Signed, ToPrimitive, Zero};

const TRIAL_LIMIT: u64 = 1 << 16;

/// Writes `n = u² + v²`, if possible within the factorization budget.
pub(crate) fn two_squares(mut n: u128) -> Option<(u128, u128)> {
    if n == 0 {
        return Some((0, 0));
    }
    // Accumulate a Gaussian integer z with |z|² = the part of n consumed so far.
    let mut z = (BigInt::one(), BigInt::zero());
    let mut p: u64 = 2;
    while p < TRIAL_LIMIT && (p as u128) * (p as u128) <= n {
        let mut e = 0u32;
        while n.is_multiple_of(p as u128) {
            n /= p as u128;
            e += 1;
        }
        if e > 0 {
            z = absorb_prime_power(z, p as u128, e)?;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        let s = n.sqrt();
        if s * s == n {
            z = gmul(&z, &(BigInt::from(s), BigInt::zero()));
        } else if is_prime(n) {
            z = absorb_prime_power(z, n, 1)?;
        } else {
            return None;
        }
    }
    Some((z.0.abs().to_u128()?, z.1.abs().to_u128()?))
}

fn absorb_prime_power(z: (BigInt, BigInt), p: u128, e: u32) -> Option<(BigInt, BigInt)> {
    let mut z = z;
    if p % 4 == 3 {
        if e % 2 == 1 {
            return None;
        }
        let f = BigInt::from(p).pow(e / 2);
        return Some((&z.0 * &f, &z.1 * &f));
    }
    let (a, b) = prime_two_squares(p);
    let g = (BigInt::from(a), BigInt::from(b));
    for _ in 0..e {
        z = gmul(&z, &g);
    }
    Some(z)
}

fn gmul(x: &(BigInt, BigInt), y: &(BigInt, BigInt)) -> (BigInt, BigInt) {
    (&x.0 * &y.0 - &x.1 * &y.1, &x.0 * &y.1 + &x.1 * &y.0)
}

fn modpow(b: u128, e: u128, m: u128) -> u128 {
    BigUint::from(b).modpow(&BigUint::from(e), &BigUint::from(m)).to_u128().expect("reduced mod m")
}

/// `p = a² + b²` for `p = 2` or a prime `p ≡ 1 (mod 4)`, by Hermite–Serret.
fn prime_two_squares(p: u128) -> (u128, u128) {
    if p == 2 {
        return (1, 1);
    }
    let mut c = 2u128;
    let x = loop {
        if modpow(c, (p - 1) / 2, p) == p - 1 {
            break modpow(c, (p - 1) / 4, p);
        }
        c += 1;
    };
    let (mut r0, mut r1) = (p, x);
    while r1 * r1 > p {
        (r0, r1) = (r1, r0 % r1);
    }
    let _ = r0;
    let b = (p - r1 * r1).sqrt();
    debug_assert_eq!(r1 * r1 + b * b, p);
    (r1, b)
}

/// Miller–Rabin with the first 13 prime bases, deterministic below `3.3·10²⁴`
/// and overwhelmingly reliable above.
fn is_prime(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u128; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let big_n = BigUint::from(n);
    let minus_one = &big_n - 1u32;
    'outer: for &b in &BASES {
        let mut x = BigUint::from(b).modpow(&BigUint::from(d), &big_n);
        if x.is_one() || x == minus_one {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % &big_n;
            if x == minus_one {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sums_of_two_squares() {
        for n in 0u128..2000 {
            let brute = (0..=n.sqrt()).any(|u| {
                let r = n - u * u;
                r.sqrt() * r.sqrt() == r
            });
            match two_squares(n) {
                Some((u, v)) => assert_eq!(u * u + v * v, n),
                None => assert!(!brute, "{n}"),
            }
        }
        let big = 1_000_000_007u128 * 998_244_353 * 5;
        assert!(two_squares(big).is_none());
        let p = 1_000_000_009u128; // ≡ 1 mod 4
        let (u, v) = two_squares(p * 13 * 13 * 2).unwrap();
        assert_eq!(u * u + v * v, p * 338);
    }

    #[test]
    fn primality() {
        let primes: [u128; 5] = [2, 97, 1_000_000_007, 998_244_353, 170_141_183_460_469_231_731_687_303_715_884_105_727];
        for p in primes {
            assert!(is_prime(p));
        }
        for c in [1u128, 561, 1_000_000_007 * 998_244_353] {
            assert!(!is_prime(c));
        }
    }
}
