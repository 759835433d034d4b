//! Truncated formal series in `q` with exact rational coefficients.
//!
//! Exponents live on the lattice `(1/24)Z`: the stored key `e` stands for
//! `q^(e/24)`. A series also records its truncation `t`, meaning it is known
//! modulo `q^(t/24)`; every stored key satisfies `e < t` and no stored
//! coefficient is zero.
//!
//! Products follow the rule `trunc(a·b) = min(t_a + e_b, t_b + e_a)` where
//! `e_*` are leading exponents, so each emitted coefficient is fully
//! determined by the operands.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Denominator of the exponent lattice.
pub const LATTICE: i64 = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FracSeries {
    coeffs: BTreeMap<i64, BigRational>,
    trunc: i64,
}

impl FracSeries {
    pub fn zero(trunc: i64) -> Self {
        FracSeries { coeffs: BTreeMap::new(), trunc }
    }

    pub fn one(trunc: i64) -> Self {
        Self::monomial(0, BigRational::one(), trunc)
    }

    /// `c · q^(e/24) + O(q^(trunc/24))`.
    pub fn monomial(e: i64, c: BigRational, trunc: i64) -> Self {
        Self::from_terms([(e, c)], trunc)
    }

    /// Builds a series from `(exponent, coefficient)` pairs, summing repeated
    /// exponents and dropping zeros and terms at or past `trunc`.
    pub fn from_terms<I>(terms: I, trunc: i64) -> Self
    where
        I: IntoIterator<Item = (i64, BigRational)>,
    {
        let mut coeffs: BTreeMap<i64, BigRational> = BTreeMap::new();
        for (e, c) in terms {
            if e >= trunc {
                continue;
            }
            *coeffs.entry(e).or_insert_with(BigRational::zero) += c;
        }
        coeffs.retain(|_, c| !c.is_zero());
        FracSeries { coeffs, trunc }
    }

    /// Series with integral `q`-exponents: `Σ c_n q^n + O(q^q_trunc)`.
    pub fn from_q_integers<I>(terms: I, q_trunc: i64) -> Self
    where
        I: IntoIterator<Item = (i64, BigInt)>,
    {
        Self::from_terms(
            terms
                .into_iter()
                .map(|(n, c)| (n * LATTICE, BigRational::from_integer(c))),
            q_trunc * LATTICE,
        )
    }

    pub fn trunc(&self) -> i64 {
        self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `q^(e/24)`. Returns `None` past the truncation.
    pub fn coeff(&self, e: i64) -> Option<BigRational> {
        if e >= self.trunc {
            return None;
        }
        Some(self.coeffs.get(&e).cloned().unwrap_or_else(BigRational::zero))
    }

    /// Coefficient of `q^n` for integral `n`.
    pub fn q_coeff(&self, n: i64) -> Option<BigRational> {
        self.coeff(n * LATTICE)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigRational)> {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    pub fn lead_exponent(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn lead_coeff(&self) -> Option<&BigRational> {
        self.coeffs.values().next()
    }

    /// Leading exponent, or the truncation for a series with no known
    /// nonzero coefficient (it is then `O(q^(trunc/24))`).
    fn valuation(&self) -> i64 {
        self.lead_exponent().unwrap_or(self.trunc)
    }

    /// Lowers the truncation to `min(self.trunc, trunc)`.
    pub fn truncated(&self, trunc: i64) -> Self {
        let trunc = trunc.min(self.trunc);
        let coeffs = self.coeffs.range(..trunc).map(|(e, c)| (*e, c.clone())).collect();
        FracSeries { coeffs, trunc }
    }

    /// Multiplies by `q^(shift/24)`.
    pub fn shifted(&self, shift: i64) -> Self {
        FracSeries {
            coeffs: self.coeffs.iter().map(|(e, c)| (e + shift, c.clone())).collect(),
            trunc: self.trunc + shift,
        }
    }

    pub fn scaled(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.trunc);
        }
        FracSeries {
            coeffs: self.coeffs.iter().map(|(e, x)| (*e, x * c)).collect(),
            trunc: self.trunc,
        }
    }

    /// True when every stored exponent is a multiple of 24.
    pub fn has_integral_exponents(&self) -> bool {
        self.coeffs.keys().all(|e| e.rem_euclid(LATTICE) == 0)
    }

    pub fn add_series(&self, other: &Self) -> Self {
        let trunc = self.trunc.min(other.trunc);
        Self::from_terms(
            self.terms()
                .chain(other.terms())
                .map(|(e, c)| (e, c.clone())),
            trunc,
        )
    }

    /// Cauchy product.
    pub fn mul_series(&self, other: &Self) -> Self {
        let trunc = (self.trunc + other.valuation()).min(other.trunc + self.valuation());
        if self.is_zero() || other.is_zero() {
            return Self::zero(trunc);
        }
        let base = self.valuation() + other.valuation();
        if base >= trunc {
            return Self::zero(trunc);
        }
        // Dense accumulation on the sublattice spanned by the offsets.
        let stride = self
            .coeffs
            .keys()
            .map(|e| e - self.valuation())
            .chain(other.coeffs.keys().map(|e| e - other.valuation()))
            .fold(0i64, |g, x| g.gcd(&x));
        let stride = if stride == 0 { 1 } else { stride };
        let len = ((trunc - base + stride - 1) / stride) as usize;
        let mut acc: Vec<BigRational> = vec![BigRational::zero(); len];
        let rhs: Vec<(usize, &BigRational)> = other
            .coeffs
            .iter()
            .map(|(e, c)| (((e - other.valuation()) / stride) as usize, c))
            .collect();
        for (ea, ca) in &self.coeffs {
            let ia = ((ea - self.valuation()) / stride) as usize;
            if ia >= len {
                break;
            }
            for &(ib, cb) in &rhs {
                let idx = ia + ib;
                if idx >= len {
                    break;
                }
                acc[idx] += ca * cb;
            }
        }
        let coeffs = acc
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (base + i as i64 * stride, c))
            .collect();
        FracSeries { coeffs, trunc }
    }

    /// Multiplicative inverse. The result `b` satisfies `a·b = 1` to the
    /// relative precision of `a`.
    pub fn inverse(&self) -> Result<Self> {
        let lead = self
            .lead_exponent()
            .ok_or_else(|| Error::Domain("cannot invert a series with zero leading coefficient".into()))?;
        let lead_inv = self.coeffs[&lead].recip();
        let rel = self.trunc - lead;
        let trunc = self.trunc - 2 * lead;
        let stride = self
            .coeffs
            .keys()
            .map(|e| e - lead)
            .fold(0i64, |g, x| g.gcd(&x));
        let stride = if stride == 0 { rel.max(1) } else { stride };
        let len = ((rel + stride - 1) / stride) as usize;
        let unit: Vec<(usize, &BigRational)> = self
            .coeffs
            .iter()
            .skip(1)
            .map(|(e, c)| (((e - lead) / stride) as usize, c))
            .take_while(|(i, _)| *i < len)
            .collect();
        let mut out: Vec<BigRational> = Vec::with_capacity(len);
        for n in 0..len {
            if n == 0 {
                out.push(lead_inv.clone());
                continue;
            }
            let mut s = BigRational::zero();
            for &(i, c) in &unit {
                if i > n {
                    break;
                }
                s += c * &out[n - i];
            }
            out.push(-(s * &lead_inv));
        }
        Ok(Self::from_terms(
            out.into_iter()
                .enumerate()
                .map(|(i, c)| (-lead + i as i64 * stride, c)),
            trunc,
        ))
    }

    /// Integer power by binary powering; negative powers invert first.
    pub fn pow(&self, m: i64) -> Result<Self> {
        if m == 0 {
            return Ok(Self::one(self.trunc - self.valuation()));
        }
        let base = if m < 0 { self.inverse()? } else { self.clone() };
        let mut e = m.unsigned_abs();
        let mut sq = base;
        let mut acc: Option<Self> = None;
        loop {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => sq.clone(),
                    Some(a) => a.mul_series(&sq),
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            sq = sq.mul_series(&sq);
        }
        Ok(acc.expect("nonzero exponent"))
    }

    /// Human-readable polynomial in `q`, e.g. `q^3 - 2q^4 + (1/2)q^(25/24)`.
    pub fn to_q_string(&self) -> String {
        if self.coeffs.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (e, c)) in self.coeffs.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = monomial_str(*e);
            if mono.is_empty() {
                out.push_str(&mag.to_string());
            } else {
                if !mag.is_one() {
                    if mag.is_integer() {
                        out.push_str(&mag.to_string());
                    } else {
                        out.push_str(&format!("({mag})"));
                    }
                }
                out.push_str(&mono);
            }
        }
        out
    }
}

fn monomial_str(e: i64) -> String {
    if e == 0 {
        return String::new();
    }
    if e % LATTICE == 0 {
        let n = e / LATTICE;
        return if n == 1 { "q".into() } else { format!("q^{n}") };
    }
    let r = num_rational::Ratio::new(e, LATTICE);
    format!("q^({}/{})", r.numer(), r.denom())
}

impl<'a> Add<&'a FracSeries> for &'a FracSeries {
    type Output = FracSeries;
    fn add(self, rhs: &'a FracSeries) -> FracSeries {
        self.add_series(rhs)
    }
}

impl<'a> Sub<&'a FracSeries> for &'a FracSeries {
    type Output = FracSeries;
    fn sub(self, rhs: &'a FracSeries) -> FracSeries {
        self.add_series(&-rhs)
    }
}

impl<'a> Mul<&'a FracSeries> for &'a FracSeries {
    type Output = FracSeries;
    fn mul(self, rhs: &'a FracSeries) -> FracSeries {
        self.mul_series(rhs)
    }
}

impl Neg for &FracSeries {
    type Output = FracSeries;
    fn neg(self) -> FracSeries {
        FracSeries {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c)).collect(),
            trunc: self.trunc,
        }
    }
}

/// Fixture format: one `<e>/24 <coefficient>` line per term in increasing
/// exponent order, then `TRUNC <t>/24`.
impl fmt::Display for FracSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (e, c) in &self.coeffs {
            writeln!(f, "{e}/{LATTICE} {c}")?;
        }
        write!(f, "TRUNC {}/{LATTICE}", self.trunc)
    }
}

fn parse_lattice_exponent(s: &str, line: usize) -> Result<i64> {
    let (num, den) = s
        .split_once('/')
        .ok_or_else(|| Error::parse(line, format!("expected `<e>/24`, found `{s}`")))?;
    if den.trim() != "24" {
        return Err(Error::parse(line, format!("exponent denominator must be 24, found `{den}`")));
    }
    num.trim()
        .parse()
        .map_err(|_| Error::parse(line, format!("bad exponent numerator `{num}`")))
}

pub(crate) fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(BigRational::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

impl FromStr for FracSeries {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut terms: Vec<(i64, BigRational)> = Vec::new();
        let mut trunc = None;
        for (idx, raw) in s.lines().enumerate() {
            let line = idx + 1;
            let text = raw.trim();
            if text.is_empty() {
                continue;
            }
            if trunc.is_some() {
                return Err(Error::parse(line, "content after TRUNC line"));
            }
            let mut parts = text.split_whitespace();
            let head = parts.next().unwrap_or_default();
            let tail = parts.next().ok_or_else(|| Error::parse(line, "expected two fields"))?;
            if parts.next().is_some() {
                return Err(Error::parse(line, "expected two fields"));
            }
            if head == "TRUNC" {
                trunc = Some(parse_lattice_exponent(tail, line)?);
                continue;
            }
            let e = parse_lattice_exponent(head, line)?;
            if let Some((prev, _)) = terms.last() {
                if e <= *prev {
                    return Err(Error::parse(line, "exponents must be strictly increasing"));
                }
            }
            let c = parse_rational(tail)
                .ok_or_else(|| Error::parse(line, format!("bad coefficient `{tail}`")))?;
            if c.is_zero() {
                return Err(Error::parse(line, "zero coefficients are not stored"));
            }
            terms.push((e, c));
        }
        let trunc = trunc.ok_or_else(|| Error::parse(s.lines().count().max(1), "missing TRUNC line"))?;
        if terms.last().is_some_and(|(e, _)| *e >= trunc) {
            return Err(Error::parse(0, "term at or beyond truncation"));
        }
        Ok(FracSeries::from_terms(terms, trunc))
    }
}

/// Generalised pentagonal numbers `j(3j-1)/2` for `j = 1, -1, 2, -2, …`
/// with their signs `(-1)^j`, ascending, up to `limit` exclusive.
pub fn pentagonal_terms(limit: i64) -> Vec<(i64, i64)> {
    let mut out = vec![(0, 1)];
    let mut j: i64 = 1;
    loop {
        let sign = if j % 2 == 0 { 1 } else { -1 };
        let a = j * (3 * j - 1) / 2;
        let b = j * (3 * j + 1) / 2;
        if a >= limit {
            break;
        }
        out.push((a, sign));
        if b < limit {
            out.push((b, sign));
        }
        j += 1;
    }
    out
}

/// `∏_{n≥1} (1 - q^{δn}) + O(q^(trunc/24))`, from the pentagonal number
/// expansion.
pub fn euler_product(delta: u64, trunc: i64) -> FracSeries {
    assert!(delta >= 1, "euler_product needs delta >= 1");
    let step = delta as i64 * LATTICE;
    let limit = if trunc <= 0 { 0 } else { (trunc + step - 1) / step };
    FracSeries::from_terms(
        pentagonal_terms(limit)
            .into_iter()
            .map(|(k, s)| (k * step, BigRational::from_integer(BigInt::from(s)))),
        trunc,
    )
}

/// `η(δτ)^r = q^{δr/24} ∏(1 - q^{δn})^r + O(q^(trunc/24))`.
pub fn eta_power(delta: u64, r: i64, trunc: i64) -> FracSeries {
    let lead = delta as i64 * r;
    euler_unit_power(delta, r, trunc - lead).shifted(lead)
}

/// `∏(1 - q^{δn})^r` to relative precision `rel` (in 1/24 units).
pub(crate) fn euler_unit_power(delta: u64, r: i64, rel: i64) -> FracSeries {
    euler_product(delta, rel)
        .pow(r)
        .expect("euler product has unit constant term")
}
