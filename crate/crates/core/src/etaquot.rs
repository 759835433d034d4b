//! Eta-quotients `f(τ) = ∏_{δ|N} η(δτ)^{r_δ}` of level `N`.
//!
//! Modularity is decided by the two Newman congruences
//! `Σ δ r_δ ≡ 0` and `Σ (N/δ) r_δ ≡ 0 (mod 24)`; when both hold the quotient
//! transforms under `Γ₀(N)` with weight `k = ½ Σ r_δ` and character
//! `χ(d) = ((-1)^k s / d)`, `s = ∏ δ^{r_δ}`. Orders of vanishing at the
//! cusps come from Ligozat's formula, see [`EtaQuotient::cusp_order`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{self, gcd, kronecker, kronecker_big};
use crate::error::{Error, Result};
use crate::qseries::{euler_unit_power, pentagonal_terms, FracSeries, LATTICE};
use crate::spaces::{cusp_reps, Cusp};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EtaQuotient {
    level: u64,
    exponents: BTreeMap<u64, i64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Classification {
    NotModular,
    WeaklyHolomorphic,
    Holomorphic,
    CuspForm,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::NotModular => "not_modular",
            Classification::WeaklyHolomorphic => "weakly_holomorphic",
            Classification::Holomorphic => "holomorphic",
            Classification::CuspForm => "cusp_form",
        }
    }

    /// Holomorphic at every cusp (cusp forms included).
    pub fn is_holomorphic(&self) -> bool {
        matches!(self, Classification::Holomorphic | Classification::CuspForm)
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl EtaQuotient {
    /// Builds a quotient from `(δ, r_δ)` pairs. Every `δ` must divide
    /// `level`; repeated divisors accumulate and zero exponents are dropped.
    pub fn new<I>(level: u64, exponents: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u64, i64)>,
    {
        if level == 0 {
            return Err(Error::Domain("level must be positive".into()));
        }
        let mut map = BTreeMap::new();
        for (delta, r) in exponents {
            if delta == 0 || !level.is_multiple_of(delta) {
                return Err(Error::Domain(format!("{delta} does not divide level {level}")));
            }
            *map.entry(delta).or_insert(0) += r;
        }
        map.retain(|_, r| *r != 0);
        Ok(EtaQuotient { level, exponents: map })
    }

    /// The constant function 1 viewed at level `level`.
    pub fn one(level: u64) -> Self {
        EtaQuotient { level, exponents: BTreeMap::new() }
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    /// Nonzero exponents keyed by ascending divisor.
    pub fn exponents(&self) -> &BTreeMap<u64, i64> {
        &self.exponents
    }

    pub fn exponent(&self, delta: u64) -> i64 {
        self.exponents.get(&delta).copied().unwrap_or(0)
    }

    /// Exponent vector over all divisors of the level, ascending.
    pub fn exponent_vector(&self) -> Vec<i64> {
        arith::divisors(self.level)
            .into_iter()
            .map(|d| self.exponent(d))
            .collect()
    }

    /// `Σ r_δ`, twice the weight.
    pub fn double_weight(&self) -> i64 {
        self.exponents.values().sum()
    }

    pub fn weight(&self) -> BigRational {
        BigRational::new(self.double_weight().into(), 2.into())
    }

    /// `Σ |r_δ|`.
    pub fn abs_exponent_sum(&self) -> i64 {
        self.exponents.values().map(|r| r.abs()).sum()
    }

    /// `Σ δ r_δ`: the exponent of the leading `q^(1/24)` power.
    pub fn lead_exponent(&self) -> i64 {
        self.exponents.iter().map(|(d, r)| *d as i64 * r).sum()
    }

    pub fn newman_conditions(&self) -> (bool, bool) {
        let n = self.level as i64;
        let first: i64 = self.lead_exponent();
        let second: i64 = self.exponents.iter().map(|(d, r)| (n / *d as i64) * r).sum();
        (first.rem_euclid(24) == 0, second.rem_euclid(24) == 0)
    }

    pub fn is_modular(&self) -> bool {
        let (a, b) = self.newman_conditions();
        a && b
    }

    pub fn nebentypus(&self) -> Result<NebentypusChar> {
        if !self.is_modular() {
            return Err(Error::NotModular { level: self.level });
        }
        let two_k = self.double_weight();
        if two_k % 2 != 0 {
            return Err(Error::Domain("nebentypus needs integral weight".into()));
        }
        let k = two_k / 2;
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for (&d, &r) in &self.exponents {
            let p = BigInt::from(d).pow(r.unsigned_abs() as u32);
            if r > 0 {
                num *= p;
            } else {
                den *= p;
            }
        }
        let g = num.gcd(&den);
        num /= &g;
        den /= &g;
        // Squarefree kernel of (-1)^k s: only primes of the level occur in s.
        let mut kernel: i64 = if k % 2 == 0 { 1 } else { -1 };
        for p in arith::prime_factors(self.level) {
            let mut e = 0i64;
            for (&d, &r) in &self.exponents {
                let mut dd = d;
                while dd % p == 0 {
                    dd /= p;
                    e += r;
                }
            }
            if e.rem_euclid(2) == 1 {
                kernel *= p as i64;
            }
        }
        Ok(NebentypusChar {
            modulus: self.level,
            weight_parity_sign: if k % 2 == 0 { 1 } else { -1 },
            s_numerator: num,
            s_denominator: den,
            kernel,
        })
    }

    /// Order of vanishing relative to `Γ₀(N)` at the cusps `c/d`:
    /// `(N/24) Σ_δ gcd(d,δ)² r_δ / (gcd(d, N/d) d δ)`.
    pub fn cusp_order(&self, d: u64) -> Result<BigRational> {
        let n = self.level;
        if d == 0 || !n.is_multiple_of(d) {
            return Err(Error::Domain(format!("{d} does not divide level {n}")));
        }
        let g_dn = gcd(d, n / d);
        let mut acc = BigRational::zero();
        for (&delta, &r) in &self.exponents {
            let g = gcd(d, delta);
            let num = BigInt::from(g * g) * r;
            let den = BigInt::from(g_dn) * d * delta;
            acc += BigRational::new(num, den);
        }
        Ok(acc * BigRational::new(n.into(), 24.into()))
    }

    pub fn cusp_orders_all(&self) -> Result<CuspOrders> {
        if !self.is_modular() {
            return Err(Error::NotModular { level: self.level });
        }
        self.cusp_orders_unchecked()
    }

    /// Ligozat orders at every representative, without the modularity check.
    pub(crate) fn cusp_orders_unchecked(&self) -> Result<CuspOrders> {
        let orders = cusp_reps(self.level)
            .into_iter()
            .map(|c| self.cusp_order(c.denom).map(|v| (c, v)))
            .collect::<Result<Vec<_>>>()?;
        Ok(CuspOrders { level: self.level, orders })
    }

    pub fn classify(&self) -> Classification {
        if !self.is_modular() {
            return Classification::NotModular;
        }
        let orders = self.cusp_orders_unchecked().expect("divisors of the level");
        if orders.orders.iter().any(|(_, v)| v.is_negative()) {
            Classification::WeaklyHolomorphic
        } else if orders.orders.iter().all(|(_, v)| v.is_positive()) {
            Classification::CuspForm
        } else {
            Classification::Holomorphic
        }
    }

    /// `q`-expansion exposing `n_terms` integral powers of `q` past the
    /// leading exponent.
    pub fn q_expansion(&self, n_terms: i64) -> FracSeries {
        self.expand_to(self.lead_exponent() + LATTICE * n_terms)
    }

    /// Expansion known modulo `q^(trunc/24)`.
    pub fn expand_to(&self, trunc: i64) -> FracSeries {
        let lead = self.lead_exponent();
        let rel = trunc - lead;
        if rel <= 0 {
            return FracSeries::zero(trunc);
        }
        let mut acc = FracSeries::one(rel);
        for (&delta, &r) in &self.exponents {
            if (delta as i64) * LATTICE >= rel {
                // every non-constant term lies past the truncation
                continue;
            }
            acc = &acc * &euler_unit_power(delta, r, rel);
        }
        acc.shifted(lead)
    }

    /// Expansion through `q^max_q` inclusive (integral exponents).
    pub fn expand_through(&self, max_q: i64) -> FracSeries {
        self.expand_to((max_q + 1) * LATTICE)
    }

    /// Exponent-wise sum: the product of the two functions.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_level(other)?;
        Self::new(
            self.level,
            self.exponents.iter().chain(other.exponents.iter()).map(|(d, r)| (*d, *r)),
        )
    }

    /// Exponent-wise difference: the quotient of the two functions.
    pub fn div(&self, other: &Self) -> Result<Self> {
        self.same_level(other)?;
        Self::new(
            self.level,
            self.exponents
                .iter()
                .map(|(d, r)| (*d, *r))
                .chain(other.exponents.iter().map(|(d, r)| (*d, -r))),
        )
    }

    pub fn pow(&self, m: i64) -> Self {
        let exponents = if m == 0 {
            BTreeMap::new()
        } else {
            self.exponents.iter().map(|(d, r)| (*d, r * m)).collect()
        };
        EtaQuotient { level: self.level, exponents }
    }

    /// The same function viewed at a multiple of the level.
    pub fn at_level(&self, level: u64) -> Result<Self> {
        if level == 0 || !level.is_multiple_of(self.level) {
            return Err(Error::Domain(format!(
                "{level} is not a multiple of level {}",
                self.level
            )));
        }
        Ok(EtaQuotient { level, exponents: self.exponents.clone() })
    }

    fn same_level(&self, other: &Self) -> Result<()> {
        if self.level != other.level {
            return Err(Error::Domain(format!(
                "level mismatch: {} vs {}",
                self.level, other.level
            )));
        }
        Ok(())
    }

    /// Pretty form such as `η(τ)^2 η(35τ)^2`.
    pub fn to_eta_string(&self) -> String {
        if self.exponents.is_empty() {
            return "1".into();
        }
        self.exponents
            .iter()
            .map(|(d, r)| {
                let arg = if *d == 1 { "τ".to_string() } else { format!("{d}τ") };
                if *r == 1 {
                    format!("η({arg})")
                } else {
                    format!("η({arg})^{r}")
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Textual form `N; δ1:r1, δ2:r2, ...` with ascending divisors and zero
/// exponents omitted.
impl fmt::Display for EtaQuotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};", self.level)?;
        for (i, (d, r)) in self.exponents.iter().enumerate() {
            let sep = if i == 0 { " " } else { ", " };
            write!(f, "{sep}{d}:{r}")?;
        }
        Ok(())
    }
}

impl FromStr for EtaQuotient {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (level, rest) = s
            .split_once(';')
            .ok_or_else(|| Error::parse(1, format!("expected `N; d:r, ...`, found `{s}`")))?;
        let level: u64 = level
            .trim()
            .parse()
            .map_err(|_| Error::parse(1, format!("bad level `{}`", level.trim())))?;
        let mut pairs = Vec::new();
        for item in rest.split(',') {
            let item = item.trim();
            if item.is_empty() {
                continue;
            }
            let (d, r) = item
                .split_once(':')
                .ok_or_else(|| Error::parse(1, format!("expected `d:r`, found `{item}`")))?;
            let d: u64 = d
                .trim()
                .parse()
                .map_err(|_| Error::parse(1, format!("bad divisor `{}`", d.trim())))?;
            let r: i64 = r
                .trim()
                .parse()
                .map_err(|_| Error::parse(1, format!("bad exponent `{}`", r.trim())))?;
            pairs.push((d, r));
        }
        EtaQuotient::new(level, pairs).map_err(|e| match e {
            Error::Domain(msg) => Error::parse(1, msg),
            other => other,
        })
    }
}

/// Orders of vanishing at a full set of `Γ₀(N)` cusp representatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CuspOrders {
    pub level: u64,
    pub orders: Vec<(Cusp, BigRational)>,
}

impl CuspOrders {
    /// Order at the representative(s) with denominator `d`.
    pub fn at(&self, d: u64) -> Option<&BigRational> {
        self.orders.iter().find(|(c, _)| c.denom == d).map(|(_, v)| v)
    }

    pub fn values(&self) -> impl Iterator<Item = &BigRational> {
        self.orders.iter().map(|(_, v)| v)
    }

    pub fn total(&self) -> BigRational {
        self.values().fold(BigRational::zero(), |a, v| a + v)
    }
}

/// The character `χ(d) = ((-1)^k s / d)` attached to a modular eta-quotient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NebentypusChar {
    pub modulus: u64,
    /// `(-1)^k`.
    pub weight_parity_sign: i8,
    /// `s = s_numerator / s_denominator` in lowest terms.
    pub s_numerator: BigInt,
    pub s_denominator: BigInt,
    /// Squarefree kernel of `(-1)^k s`; `χ(d) = (kernel / d)` on units.
    pub kernel: i64,
}

impl NebentypusChar {
    /// `χ(d)`; zero when `d` shares a factor with the modulus.
    pub fn eval(&self, d: i64) -> i8 {
        if gcd(d.unsigned_abs(), self.modulus) != 1 {
            return 0;
        }
        let top = &self.s_numerator * &self.s_denominator * BigInt::from(self.weight_parity_sign);
        kronecker_big(&top, d)
    }

    pub fn is_trivial(&self) -> bool {
        self.kernel == 1
    }

    pub fn describe(&self) -> String {
        if self.is_trivial() {
            "trivial".into()
        } else {
            format!("kronecker({}, ·)", self.kernel)
        }
    }

    /// `χ(d)` via the squarefree kernel (small-integer route).
    pub fn eval_by_kernel(&self, d: i64) -> i8 {
        if gcd(d.unsigned_abs(), self.modulus) != 1 {
            return 0;
        }
        kronecker(self.kernel, d)
    }
}

/// Upper bound `2k ∏_{p|N} ((p+1)/(p-1))^{min(2, ord_p N)}` on `Σ|r_δ|` for
/// holomorphic eta-quotients of weight `k` and level `N`.
pub fn rouse_webb_bound(level: u64, k: &BigRational) -> BigRational {
    let mut acc = k * BigRational::from_integer(2.into());
    for (p, e) in arith::factorize(level) {
        let ratio = BigRational::new((p + 1).into(), (p - 1).into());
        for _ in 0..e.min(2) {
            acc *= &ratio;
        }
    }
    acc
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnimodularMatrix {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl UnimodularMatrix {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if a as i128 * d as i128 - b as i128 * c as i128 != 1 {
            return Err(Error::Domain(format!("det of ({a} {b}; {c} {d}) is not 1")));
        }
        Ok(UnimodularMatrix { a, b, c, d })
    }

    pub fn identity() -> Self {
        UnimodularMatrix { a: 1, b: 0, c: 0, d: 1 }
    }

    /// Möbius action `(aτ + b)/(cτ + d)`.
    pub fn apply(&self, tau: Complex64) -> Complex64 {
        (tau * self.a as f64 + self.b as f64) / (tau * self.c as f64 + self.d as f64)
    }

    pub fn in_gamma0(&self, level: u64) -> bool {
        self.c.rem_euclid(level as i64) == 0
    }
}

/// Eta multiplier `v(A) = sign · e^{iπ m/12}` with `m` reduced mod 24.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EtaMultiplier {
    pub sign: i8,
    pub exponent: i64,
}

impl EtaMultiplier {
    pub fn to_complex(&self) -> Complex64 {
        let theta = std::f64::consts::PI * self.exponent as f64 / 12.0;
        Complex64::from_polar(self.sign as f64, theta)
    }

    /// `v(A)^t` in the same normal form.
    pub fn pow(&self, t: i64) -> EtaMultiplier {
        let sign = if t.rem_euclid(2) == 1 { self.sign } else { 1 };
        EtaMultiplier { sign, exponent: (self.exponent * t).rem_euclid(24) }
    }
}

/// Multiplier of `η(Aτ) = v(A)(cτ+d)^{1/2} η(τ)`; the `c` odd branch is used
/// whenever it applies.
pub fn eta_multiplier(m: &UnimodularMatrix) -> Result<EtaMultiplier> {
    let UnimodularMatrix { a, b, c, d } = *m;
    if a as i128 * d as i128 - b as i128 * c as i128 != 1 {
        return Err(Error::Domain("matrix determinant must be 1".into()));
    }
    let (a, b, c, d) = (a as i128, b as i128, c as i128, d as i128);
    let base = (a + d) * c - b * d * (c * c - 1);
    let (sign, exponent) = if c.rem_euclid(2) == 1 {
        (kronecker(d as i64, c.abs() as i64), base - 3 * c)
    } else if d.rem_euclid(2) == 1 {
        (kronecker(c as i64, d as i64), base + 3 * d - 3 - 3 * c * d)
    } else {
        return Err(Error::Internal("c and d both even with determinant 1".into()));
    };
    Ok(EtaMultiplier { sign, exponent: exponent.rem_euclid(24) as i64 })
}

/// `η(τ)` from the pentagonal series summed over exponents below `trunc`.
pub fn eta_numeric(tau: Complex64, trunc: i64) -> Complex64 {
    let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
    let q = (two_pi_i * tau).exp();
    let mut sum = Complex64::zero();
    for (k, s) in pentagonal_terms(trunc.max(1)) {
        sum += q.powi(k as i32) * s as f64;
    }
    (two_pi_i * tau / LATTICE as f64).exp() * sum
}

/// Floating-point value of the truncated expansion at `τ`; each factor
/// `η(δτ)` is summed through `q^trunc` in its own variable `q^δ`.
pub fn numeric_eval(f: &EtaQuotient, tau: Complex64, trunc: i64) -> Result<Complex64> {
    if tau.im <= 0.0 {
        return Err(Error::Domain("tau must lie in the upper half-plane".into()));
    }
    let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
    let mut acc = Complex64::one();
    for (&delta, &r) in &f.exponents {
        let t = tau * delta as f64;
        let q = (two_pi_i * t).exp();
        let mut sum = Complex64::zero();
        let limit = (trunc / delta as i64).max(1);
        for (k, s) in pentagonal_terms(limit) {
            sum += q.powi(k as i32) * s as f64;
        }
        let prefactor = (two_pi_i * t * (r as f64 / LATTICE as f64)).exp();
        acc *= prefactor * sum.powi(r as i32);
    }
    Ok(acc)
}

/// Smallest truncation with `|q|^trunc < 1e-17`, per [`numeric_eval`]'s
/// precondition.
pub fn numeric_trunc_for(tau: Complex64) -> i64 {
    let per_power = 2.0 * std::f64::consts::PI * tau.im;
    ((17.0 * std::f64::consts::LN_10) / per_power).ceil().max(1.0) as i64 + 1
}

/// Integer exponent `k` when the weight is integral.
pub fn integral_weight(f: &EtaQuotient) -> Option<i64> {
    let two_k = f.double_weight();
    (two_k % 2 == 0).then_some(two_k / 2)
}

/// `(cτ+d)^k` for integral `k`.
pub fn automorphy_factor(m: &UnimodularMatrix, tau: Complex64, k: i64) -> Complex64 {
    (tau * m.c as f64 + m.d as f64).powi(k as i32)
}
