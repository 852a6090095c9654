//! Integer helpers shared by the exact-arithmetic layers: square roots with
//! certified floors of quadratic surds, Kronecker symbols, square roots mod p,
//! deterministic primality, and trial-division factoring.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

/// Floor of sqrt(n) for n >= 0.
pub fn isqrt(n: &BigInt) -> BigInt {
    assert!(!n.is_negative(), "isqrt of negative value");
    n.sqrt()
}

/// Sign of u + q*sqrt(n) with n >= 0, computed exactly.
pub fn surd_sign(u: &BigInt, q: &BigInt, n: &BigInt) -> Ordering {
    let us = u.sign();
    let qs = (q * n).sign();
    match (us, qs) {
        (num_bigint::Sign::NoSign, num_bigint::Sign::NoSign) => Ordering::Equal,
        _ => {
            if !u.is_negative() && !(q * n).is_negative() {
                return Ordering::Greater;
            }
            if !u.is_positive() && !(q * n).is_positive() {
                return Ordering::Less;
            }
            // opposite signs: compare u^2 against q^2 n
            let lhs = u * u;
            let rhs = q * q * n;
            if u.is_positive() {
                lhs.cmp(&rhs)
            } else {
                rhs.cmp(&lhs)
            }
        }
    }
}

/// Floor of (p + q*sqrt(n)) / r computed exactly; n >= 0, r != 0.
pub fn floor_surd(p: &BigInt, q: &BigInt, n: &BigInt, r: &BigInt) -> BigInt {
    assert!(!r.is_zero());
    let (p, q, r) = if r.is_negative() {
        (-p, -q, -r)
    } else {
        (p.clone(), q.clone(), r.clone())
    };
    let s = isqrt(&(&q * &q * n));
    // bracket q*sqrt(n) in [lo, lo+1]
    let lo = if q.is_negative() { -&s - 1 } else { s };
    let mut k: BigInt = (&p + &lo).div_floor(&r);
    // adjust: find the unique k with k*r <= p + q*sqrt(n) < (k+1)*r
    loop {
        // compare (k+1)*r against p + q*sqrt(n): sign of (p - (k+1)r) + q sqrt(n)
        let u = &p - (&k + 1) * &r;
        if surd_sign(&u, &q, n) != Ordering::Less {
            k += 1;
        } else {
            break;
        }
    }
    loop {
        let u = &p - &k * &r;
        if surd_sign(&u, &q, n) == Ordering::Less {
            k -= 1;
        } else {
            break;
        }
    }
    k
}

/// Ceiling counterpart of [`floor_surd`].
pub fn ceil_surd(p: &BigInt, q: &BigInt, n: &BigInt, r: &BigInt) -> BigInt {
    -floor_surd(&-p, &-q, n, r)
}

pub fn is_squarefree(d: i64) -> bool {
    if d < 1 {
        return false;
    }
    let mut m = d;
    let mut p = 2i64;
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorization of n >= 1 by trial division, ascending primes.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0u32;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Kronecker symbol (a|n), fully general.
pub fn kronecker(a: i64, n: i64) -> i32 {
    fn kron_odd(mut a: i64, mut n: i64) -> i32 {
        // n odd positive
        let mut t = 1i32;
        a %= n;
        if a < 0 {
            a += n;
        }
        while a != 0 {
            while a % 2 == 0 {
                a /= 2;
                let r = n % 8;
                if r == 3 || r == 5 {
                    t = -t;
                }
            }
            std::mem::swap(&mut a, &mut n);
            if a % 4 == 3 && n % 4 == 3 {
                t = -t;
            }
            a %= n;
        }
        if n == 1 {
            t
        } else {
            0
        }
    }
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut result = 1i32;
    let mut n = n;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    let mut e = 0u32;
    while n % 2 == 0 {
        n /= 2;
        e += 1;
    }
    if e > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if e % 2 == 1 {
            let r = a.rem_euclid(8);
            if r == 3 || r == 5 {
                result = -result;
            }
        }
    }
    result * kron_odd(a, n)
}

/// Square root of a mod odd prime p via Tonelli-Shanks; also handles p = 2.
pub fn mod_sqrt(a: u64, p: u64) -> Option<u64> {
    if p == 2 {
        return Some(a % 2);
    }
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if powmod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(powmod(a, (p + 1) / 4, p));
    }
    // Tonelli-Shanks
    let mut q = p - 1;
    let mut s = 0u32;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2u64;
    while powmod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = powmod(z, q, p);
    let mut t = powmod(a, q, p);
    let mut r = powmod(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0u32;
        let mut tt = t;
        while tt != 1 {
            tt = mulmod(tt, tt, p);
            i += 1;
            if i == m {
                return None;
            }
        }
        let b = powmod(c, 1u64 << (m - i - 1), p);
        m = i;
        c = mulmod(b, b, p);
        t = mulmod(t, c, p);
        r = mulmod(r, b, p);
    }
    Some(r)
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

/// Squarefree D values in [2, max] ascending.
pub fn squarefree_up_to(max: i64) -> Vec<i64> {
    (2..=max).filter(|&d| is_squarefree(d)).collect()
}

pub fn bigint_to_u64(n: &BigInt) -> Option<u64> {
    n.to_u64()
}
