//! Elliptic curves over `Q` in long Weierstrass form and their `L`-series
//! coefficients by point counting.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::arith::{self, is_prime, kronecker};
use crate::error::{Error, Result};

/// `y² + a1 xy + a3 y = x³ + a2 x² + a4 x + a6`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WeierstrassCurve {
    pub a1: i64,
    pub a2: i64,
    pub a3: i64,
    pub a4: i64,
    pub a6: i64,
}

/// Reduction type at a prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reduction {
    Good,
    SplitMultiplicative,
    NonSplitMultiplicative,
    Additive,
}

impl WeierstrassCurve {
    pub fn new(a1: i64, a2: i64, a3: i64, a4: i64, a6: i64) -> Result<Self> {
        let e = WeierstrassCurve { a1, a2, a3, a4, a6 };
        if e.discriminant().is_zero() {
            return Err(Error::Domain(format!("{e} is singular")));
        }
        Ok(e)
    }

    fn big(&self) -> [BigInt; 5] {
        [self.a1, self.a2, self.a3, self.a4, self.a6].map(BigInt::from)
    }

    /// `(b2, b4, b6, b8)`.
    pub fn b_invariants(&self) -> [BigInt; 4] {
        let [a1, a2, a3, a4, a6] = self.big();
        let b2 = &a1 * &a1 + 4 * &a2;
        let b4 = 2 * &a4 + &a1 * &a3;
        let b6 = &a3 * &a3 + 4 * &a6;
        let b8 = &a1 * &a1 * &a6 + 4 * &a2 * &a6 - &a1 * &a3 * &a4 + &a2 * &a3 * &a3 - &a4 * &a4;
        [b2, b4, b6, b8]
    }

    pub fn c4(&self) -> BigInt {
        let [b2, b4, ..] = self.b_invariants();
        &b2 * &b2 - 24 * b4
    }

    pub fn c6(&self) -> BigInt {
        let [b2, b4, b6, _] = self.b_invariants();
        -(&b2 * &b2 * &b2) + 36 * &b2 * &b4 - 216 * b6
    }

    pub fn discriminant(&self) -> BigInt {
        let [b2, b4, b6, b8] = self.b_invariants();
        -(&b2 * &b2 * &b8) - 8 * &b4 * &b4 * &b4 - 27 * &b6 * &b6 + 9 * &b2 * &b4 * &b6
    }

    fn residues(&self, p: u64) -> [i64; 5] {
        let p = p as i64;
        [self.a1, self.a2, self.a3, self.a4, self.a6].map(|a| a.rem_euclid(p))
    }

    /// `#E(F_p)` including the point at infinity (and the singular point, if any).
    pub fn count_points(&self, p: u64) -> u64 {
        let [a1, a2, a3, a4, a6] = self.residues(p);
        let pi = p as i64;
        let rhs = |x: i64| (((x * x % pi + a2 * x) % pi * x % pi + a4 * x) % pi + a6) % pi;
        let mut n = 1u64;
        if p == 2 {
            for x in 0..2 {
                for y in 0..2 {
                    if (y * y + a1 * x * y + a3 * y - rhs(x)).rem_euclid(2) == 0 {
                        n += 1;
                    }
                }
            }
            return n;
        }
        // (2y + a1 x + a3)² = (a1 x + a3)² + 4 rhs(x)
        for x in 0..pi {
            let l = (a1 * x + a3) % pi;
            let d = (l * l + 4 * rhs(x)) % pi;
            n = (n as i64 + 1 + kronecker(d, pi) as i64) as u64;
        }
        n
    }

    /// Reduction type at `p`; `p = 2, 3` with bad reduction is not classified.
    pub fn reduction(&self, p: u64) -> Result<Reduction> {
        let pb = BigInt::from(p);
        if !self.discriminant().is_multiple_of(&pb) {
            return Ok(Reduction::Good);
        }
        if p == 2 || p == 3 {
            return Err(Error::Unsupported(format!("bad reduction at {p}")));
        }
        if self.c4().is_multiple_of(&pb) {
            return Ok(Reduction::Additive);
        }
        let (x0, _) = self.singular_point(p)?;
        // tangent cone at the node: m² + a1 m − (3x0 + a2) = 0
        let [a1, a2, ..] = self.residues(p);
        let pi = p as i64;
        let disc = (a1 * a1 + 4 * (3 * x0 + a2)).rem_euclid(pi);
        Ok(if kronecker(disc, pi) == 1 {
            Reduction::SplitMultiplicative
        } else {
            Reduction::NonSplitMultiplicative
        })
    }

    fn singular_point(&self, p: u64) -> Result<(i64, i64)> {
        let [a1, a2, a3, a4, a6] = self.residues(p);
        let pi = p as i64;
        for x in 0..pi {
            for y in 0..pi {
                let f = y * y + a1 * x * y + a3 * y - (x * x * x + a2 * x * x + a4 * x + a6);
                let fx = a1 * y - (3 * x * x + 2 * a2 * x + a4);
                let fy = 2 * y + a1 * x + a3;
                if f.rem_euclid(pi) == 0 && fx.rem_euclid(pi) == 0 && fy.rem_euclid(pi) == 0 {
                    return Ok((x, y));
                }
            }
        }
        Err(Error::Internal(format!("no singular point mod {p} although p | Δ")))
    }

    /// Trace of Frobenius at a good prime, or `±1` / `0` at bad ones.
    pub fn ap(&self, p: u64) -> Result<i64> {
        Ok(match self.reduction(p)? {
            Reduction::Good => p as i64 + 1 - self.count_points(p) as i64,
            Reduction::SplitMultiplicative => 1,
            Reduction::NonSplitMultiplicative => -1,
            Reduction::Additive => 0,
        })
    }
}

impl fmt::Display for WeierstrassCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{},{},{}]", self.a1, self.a2, self.a3, self.a4, self.a6)
    }
}

impl FromStr for WeierstrassCurve {
    type Err = Error;

    /// `a1,a2,a3,a4,a6`, optionally in brackets.
    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches('[').trim_end_matches(']');
        let a: Vec<i64> = body
            .split(',')
            .map(|t| t.trim().parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::parse(1, format!("bad curve coefficients {s:?}")))?;
        let [a1, a2, a3, a4, a6] = a[..] else {
            return Err(Error::parse(1, format!("expected five coefficients, got {}", a.len())));
        };
        WeierstrassCurve::new(a1, a2, a3, a4, a6)
    }
}

/// `a(1), …, a(n_max)` of the weight-2 newform attached to `E` of conductor `N`.
pub fn curve_coefficients(e: &WeierstrassCurve, conductor: u64, n_max: usize) -> Result<Vec<BigInt>> {
    if conductor == 0 || !arith::is_squarefree(conductor) {
        return Err(Error::Domain(format!("conductor {conductor} is not squarefree")));
    }
    let disc = e.discriminant();
    for (p, _) in arith::factorize(conductor) {
        if p == 2 || p == 3 {
            return Err(Error::Unsupported(format!("conductor divisible by {p}")));
        }
        match e.reduction(p)? {
            Reduction::Good => {
                return Err(Error::Domain(format!("{e} has good reduction at {p} | {conductor}")))
            }
            Reduction::Additive => {
                return Err(Error::Unsupported(format!("additive reduction at {p}")))
            }
            _ => {}
        }
    }
    let mut a = vec![BigInt::zero(); n_max + 1];
    if n_max == 0 {
        return Ok(Vec::new());
    }
    a[1] = BigInt::from(1);
    for p in (2..=n_max as u64).filter(|&p| is_prime(p)) {
        if !conductor.is_multiple_of(p) && disc.is_multiple_of(&BigInt::from(p)) {
            return Err(Error::Domain(format!("{e} has bad reduction at {p}, which does not divide {conductor}")));
        }
        let ap = BigInt::from(e.ap(p)?);
        let pu = p as usize;
        let bad = conductor.is_multiple_of(p);
        // prime powers
        let mut prev = BigInt::from(1);
        let mut cur = ap.clone();
        let mut q = pu;
        loop {
            a[q] = cur.clone();
            let Some(next_q) = q.checked_mul(pu).filter(|&n| n <= n_max) else { break };
            let next = if bad { &ap * &cur } else { &ap * &cur - BigInt::from(p) * &prev };
            prev = std::mem::replace(&mut cur, next);
            q = next_q;
        }
    }
    // multiplicativity on coprime parts, increasing n so factors are ready
    for n in 2..=n_max {
        let (p, _) = arith::factorize(n as u64)[0];
        let mut pk = 1usize;
        let mut m = n;
        while m % p as usize == 0 {
            m /= p as usize;
            pk *= p as usize;
        }
        if m > 1 {
            a[n] = &a[pk] * &a[m];
        }
    }
    a.remove(0);
    Ok(a)
}

/// `|a_p| ≤ 2√p`, checked exactly as `a_p² ≤ 4p`.
pub fn hasse_holds(ap: i64, p: u64) -> bool {
    let ap = ap.unsigned_abs() as u128;
    ap * ap <= 4 * p as u128
}
