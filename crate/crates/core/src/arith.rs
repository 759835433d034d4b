//! Elementary integer arithmetic: gcd, factorization, divisors and the
//! Kronecker symbol.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factorization as ascending `(p, e)` pairs. `factorize(1)` is empty.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
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

pub fn prime_factors(n: u64) -> Vec<u64> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

/// All positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factorize(n) {
        let len = out.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

pub fn is_squarefree(n: u64) -> bool {
    n >= 1 && factorize(n).iter().all(|&(_, e)| e == 1)
}

pub fn sigma1(n: u64) -> u64 {
    divisors(n).iter().sum()
}

pub fn totient(n: u64) -> u64 {
    factorize(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

/// Kronecker symbol `(a/n)` for machine integers.
///
/// Conventions: `(a/2)` is 0, 1, -1 for `a` even, `a ≡ ±1 (mod 8)`,
/// `a ≡ ±3 (mod 8)`; `(a/-1)` is the sign of `a` (with `(0/-1) = 1`);
/// `(a/0)` is 1 when `a = ±1` and 0 otherwise.
pub fn kronecker(a: i64, n: i64) -> i8 {
    kronecker_i128(a as i128, n as i128)
}

fn kronecker_i128(mut a: i128, mut n: i128) -> i8 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut result: i8 = 1;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    // strip factors of two from n
    let twos = n.trailing_zeros();
    n >>= twos;
    if twos > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if twos % 2 == 1 {
            let r = a.rem_euclid(8);
            if r == 3 || r == 5 {
                result = -result;
            }
        }
    }
    // n is now odd and positive: Jacobi symbol
    a = a.rem_euclid(n);
    while a != 0 {
        let t = a.trailing_zeros();
        a >>= t;
        if t % 2 == 1 {
            let r = n % 8;
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Kronecker symbol `(a/n)` with an arbitrary-precision top argument.
///
/// As a function of `a` the symbol `(a/|n|)` has period dividing `4|n|`, so
/// `a` is reduced modulo `4|n|` after the sign factor `(a/-1)` is split off.
pub fn kronecker_big(a: &BigInt, n: i64) -> i8 {
    if n == 0 {
        return match a.to_i64() {
            Some(1) | Some(-1) => 1,
            _ => 0,
        };
    }
    let mut sign: i8 = 1;
    if n < 0 && a.is_negative() {
        sign = -1;
    }
    let m = n.unsigned_abs() as i128;
    let period = BigInt::from(4 * m);
    let reduced = a.mod_floor(&period).to_i128().expect("reduced below 4|n|");
    if reduced.is_zero() && !a.is_zero() {
        // 4|n| divides a: gcd(a, n) = |n|
        return if m == 1 { sign } else { 0 };
    }
    sign * kronecker_i128(reduced, m)
}
