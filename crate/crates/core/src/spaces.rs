//! Invariants of `Γ₀(N)` and existence of holomorphic eta-quotients in
//! `M_k(Γ₁(N))` at prime and semiprime level.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::arith::{self, gcd, is_prime, kronecker};
use crate::error::{Error, Result};
use crate::etaquot::EtaQuotient;

/// A cusp `numer/denom` in lowest terms with `denom | N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cusp {
    pub numer: u64,
    pub denom: u64,
}

impl fmt::Display for Cusp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer, self.denom)
    }
}

/// Representatives `a_c/c` of the cusps of `Γ₀(N)`: for each `c | N`, one
/// `a_c ∈ [1, N]` coprime to `N` per unit class modulo `gcd(c, N/c)`.
/// For squarefree `N` this is exactly `{1/d : d | N}`.
pub fn cusp_reps(level: u64) -> Vec<Cusp> {
    let mut out = Vec::new();
    for c in arith::divisors(level) {
        let m = gcd(c, level / c);
        let mut seen = vec![false; m as usize];
        for a in 1..=level {
            if gcd(a, level) != 1 {
                continue;
            }
            let r = (a % m) as usize;
            if !seen[r] {
                seen[r] = true;
                out.push(Cusp { numer: a, denom: c });
            }
        }
    }
    out
}

/// `[SL₂(Z) : Γ₀(N)] = N ∏_{p|N} (1 + 1/p)`.
pub fn index_gamma0(level: u64) -> u64 {
    arith::prime_factors(level)
        .into_iter()
        .fold(level, |acc, p| acc / p * (p + 1))
}

/// `⌊k [SL₂(Z) : Γ₀(N)] / 12⌋`: forms in `M_k(Γ₀(N))` agreeing through this
/// power of `q` are equal.
pub fn sturm_bound(level: u64, k: i64) -> i64 {
    (k * index_gamma0(level) as i64).div_euclid(12)
}

/// Number of elliptic points of order 2.
pub fn eps2(level: u64) -> u64 {
    if level.is_multiple_of(4) {
        return 0;
    }
    arith::prime_factors(level)
        .into_iter()
        .map(|p| (1 + kronecker(-4, p as i64) as i64) as u64)
        .product()
}

/// Number of elliptic points of order 3.
pub fn eps3(level: u64) -> u64 {
    if level.is_multiple_of(9) {
        return 0;
    }
    arith::prime_factors(level)
        .into_iter()
        .map(|p| (1 + kronecker(-3, p as i64) as i64) as u64)
        .product()
}

/// Number of cusps: `Σ_{d|N} φ(gcd(d, N/d))`.
pub fn eps_inf(level: u64) -> u64 {
    arith::divisors(level)
        .into_iter()
        .map(|d| arith::totient(gcd(d, level / d)))
        .sum()
}

/// Genus of `X₀(N)`: `1 + μ/12 - ε₂/4 - ε₃/3 - ε∞/2`.
pub fn genus(level: u64) -> i64 {
    let twelve_g = 12 + index_gamma0(level) as i64
        - 3 * eps2(level) as i64
        - 4 * eps3(level) as i64
        - 6 * eps_inf(level) as i64;
    debug_assert_eq!(twelve_g % 12, 0);
    twelve_g / 12
}

fn require_even_weight(k: i64) -> Result<()> {
    if k % 2 != 0 {
        return Err(Error::Unsupported(format!("odd weight {k}")));
    }
    Ok(())
}

/// `dim S_k(Γ₀(N))` for even `k ≥ 2`.
pub fn dim_cusp_forms(level: u64, k: i64) -> Result<i64> {
    require_even_weight(k)?;
    if k < 2 {
        return Err(Error::Domain(format!("weight {k} below 2")));
    }
    let g = genus(level);
    if k == 2 {
        return Ok(g);
    }
    Ok((k - 1) * (g - 1)
        + (k / 2 - 1) * eps_inf(level) as i64
        + eps2(level) as i64 * (k / 4)
        + eps3(level) as i64 * (k / 3))
}

/// `dim M_k(Γ₀(N))` for even `k ≥ 0`.
pub fn dim_modular_forms(level: u64, k: i64) -> Result<i64> {
    require_even_weight(k)?;
    match k {
        k if k < 0 => Ok(0),
        0 => Ok(1),
        2 => Ok(genus(level) + eps_inf(level) as i64 - 1),
        _ => Ok(dim_cusp_forms(level, k)? + eps_inf(level) as i64),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelProfile {
    pub level: u64,
    pub factorization: Vec<(u64, u32)>,
    pub divisors: Vec<u64>,
    pub cusp_reps: Vec<Cusp>,
    pub index_mu: u64,
    pub eps2: u64,
    pub eps3: u64,
    pub eps_inf: u64,
    pub genus: i64,
}

impl LevelProfile {
    pub fn new(level: u64) -> Result<Self> {
        if level == 0 {
            return Err(Error::Domain("level must be positive".into()));
        }
        let cusp_reps = cusp_reps(level);
        let profile = LevelProfile {
            level,
            factorization: arith::factorize(level),
            divisors: arith::divisors(level),
            index_mu: index_gamma0(level),
            eps2: eps2(level),
            eps3: eps3(level),
            eps_inf: eps_inf(level),
            genus: genus(level),
            cusp_reps,
        };
        debug_assert_eq!(profile.eps_inf as usize, profile.cusp_reps.len());
        Ok(profile)
    }
}

/// `h = ½ gcd(p₁ - 1, …, p_t - 1, 24)` for distinct primes `p_i ≥ 5`.
pub fn h_invariant(primes: &[u64]) -> Result<u64> {
    validate_primes(primes)?;
    Ok(primes.iter().fold(24, |g, p| gcd(g, p - 1)) / 2)
}

fn validate_primes(primes: &[u64]) -> Result<()> {
    for (i, &p) in primes.iter().enumerate() {
        if p < 5 || !is_prime(p) {
            return Err(Error::Domain(format!("{p} is not a prime >= 5")));
        }
        if primes[..i].contains(&p) {
            return Err(Error::Domain(format!("prime {p} repeated")));
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerdictReason {
    /// `h ∤ k`.
    HDividesFails,
    /// The weight-2 exclusion for residues 5 (prime) or (1,5), (5,5) (semiprime).
    ExcludedCaseK2,
    /// A witness was built.
    Constructive,
    /// `k < 0`: no holomorphic form other than zero.
    NegativeWeight,
}

impl VerdictReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            VerdictReason::HDividesFails => "h_divides_fails",
            VerdictReason::ExcludedCaseK2 => "excluded_case_k2",
            VerdictReason::Constructive => "constructive",
            VerdictReason::NegativeWeight => "negative_weight",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExistenceVerdict {
    pub exists: bool,
    pub reason: VerdictReason,
    pub witness: Option<EtaQuotient>,
}

impl ExistenceVerdict {
    fn no(reason: VerdictReason) -> Self {
        ExistenceVerdict { exists: false, reason, witness: None }
    }

    fn yes(witness: EtaQuotient) -> Self {
        ExistenceVerdict { exists: true, reason: VerdictReason::Constructive, witness: Some(witness) }
    }
}

fn checked_witness(f: EtaQuotient, k: i64) -> Result<ExistenceVerdict> {
    if f.double_weight() != 2 * k || !f.classify().is_holomorphic() {
        return Err(Error::Internal(format!("witness {f} fails for weight {k}")));
    }
    Ok(ExistenceVerdict::yes(f))
}

fn quotient(level: u64, pairs: &[(u64, i64)]) -> EtaQuotient {
    EtaQuotient::new(level, pairs.iter().copied()).expect("divisors of the level")
}

/// Whether some `η(τ)^{r₁} η(pτ)^{r_p}` lies in `M_k(Γ₁(p))`, with a witness.
pub fn exists_prime_level(p: u64, k: i64) -> Result<ExistenceVerdict> {
    validate_primes(&[p])?;
    require_even_weight(k)?;
    if k < 0 {
        return Ok(ExistenceVerdict::no(VerdictReason::NegativeWeight));
    }
    if k == 0 {
        return Ok(ExistenceVerdict::yes(EtaQuotient::one(p)));
    }
    let h = h_invariant(&[p])? as i64;
    if k % h != 0 {
        return Ok(ExistenceVerdict::no(VerdictReason::HDividesFails));
    }
    if p != 5 && p % 24 == 5 && k == 2 {
        return Ok(ExistenceVerdict::no(VerdictReason::ExcludedCaseK2));
    }
    if let Ok(f) = balanced_construction(&[p], k) {
        return checked_witness(f, k);
    }
    let witness = if p % 24 == 13 {
        quotient(p, &[(1, 9), (p, 3)]).pow(k / 6)
    } else if p == 5 {
        quotient(p, &[(1, -1), (p, 5)]).pow(k / 2)
    } else if p % 24 == 5 {
        four_six_combination(quotient(p, &[(1, 4), (p, 4)]), quotient(p, &[(1, 9), (p, 3)]), k)?
    } else {
        return Err(Error::Internal(format!("no construction for p = {p}, k = {k}")));
    };
    checked_witness(witness, k)
}

/// `f4^{k/4}` when `4 | k`, else `f4^{(k-6)/4} f6`.
fn four_six_combination(f4: EtaQuotient, f6: EtaQuotient, k: i64) -> Result<EtaQuotient> {
    if k % 4 == 0 {
        Ok(f4.pow(k / 4))
    } else if k >= 6 {
        f4.pow((k - 6) / 4).mul(&f6)
    } else {
        Err(Error::Internal(format!("weight {k} is not a combination of 4 and 6")))
    }
}

/// Whether some eta-quotient of level `pq` lies in `M_k(Γ₁(pq))`, with a
/// witness.
pub fn exists_semiprime_level(p: u64, q: u64, k: i64) -> Result<ExistenceVerdict> {
    validate_primes(&[p, q])?;
    require_even_weight(k)?;
    // order so that p has the smaller residue mod 24
    let (p, q) = if p % 24 <= q % 24 { (p, q) } else { (q, p) };
    let n = p * q;
    if k < 0 {
        return Ok(ExistenceVerdict::no(VerdictReason::NegativeWeight));
    }
    if k == 0 {
        return Ok(ExistenceVerdict::yes(EtaQuotient::one(n)));
    }
    let h = h_invariant(&[p, q])? as i64;
    if k % h != 0 {
        return Ok(ExistenceVerdict::no(VerdictReason::HDividesFails));
    }
    let residues = (p % 24, q % 24);
    let excluded_residues = matches!(residues, (1, 5) | (5, 5));
    if excluded_residues && p != 5 && q != 5 && k == 2 {
        return Ok(ExistenceVerdict::no(VerdictReason::ExcludedCaseK2));
    }
    if let Ok(f) = balanced_construction(&[p, q], k) {
        return checked_witness(f, k);
    }
    let table = match residues {
        (1, 13) => Some(quotient(n, &[(1, 11), (q, 1)])),
        (5, 13) => Some(quotient(n, &[(p, 1), (q, 2), (n, 1)])),
        (5, 17) => Some(quotient(n, &[(p, 1), (q, 1), (n, 2)])),
        (13, 13) => Some(quotient(n, &[(q, 1), (n, 11)])),
        (13, 17) => Some(quotient(n, &[(p, 2), (q, 1), (n, 1)])),
        _ => None,
    };
    if let Some(f) = table {
        return checked_witness(f.pow(k / h), k);
    }
    if excluded_residues {
        let witness = if p == 5 || q == 5 {
            quotient(n, &[(1, -1), (5, 5)]).pow(k / 2)
        } else {
            let f4 = balanced_construction(&[p, q], 4)?;
            let f6 = if residues == (1, 5) {
                quotient(n, &[(1, 3), (n, 9)])
            } else {
                quotient(n, &[(q, 3), (n, 9)])
            };
            four_six_combination(f4, f6, k)?
        };
        return checked_witness(witness, k);
    }
    Err(Error::Internal(format!("no construction for (p, q, k) = ({p}, {q}, {k})")))
}

/// `∏_{δ|N} η(δτ)^{k/2^{t-1}}` for `N = p₁⋯p_t`, valid when `h | k`,
/// `2^{t-1} | k` and `2^t | kσ₁(N)/12`; every cusp order is then
/// `kσ₁(N)/(2^t·12)`.
pub fn balanced_construction(primes: &[u64], k: i64) -> Result<EtaQuotient> {
    validate_primes(primes)?;
    if primes.is_empty() {
        return Err(Error::Domain("need at least one prime".into()));
    }
    if k <= 0 {
        return Err(Error::Precondition(format!("weight {k} must be positive")));
    }
    let t = primes.len() as u32;
    let h = h_invariant(primes)? as i64;
    let level: u64 = primes.iter().product();
    let sigma = arith::sigma1(level) as i128;
    let two_t = 1i64 << t;
    let ksigma = k as i128 * sigma;
    let ok = k % h == 0
        && k % (two_t / 2) == 0
        && ksigma % 12 == 0
        && (ksigma / 12) % two_t as i128 == 0;
    if !ok {
        return Err(Error::Precondition(format!(
            "balanced construction needs h | k, 2^(t-1) | k and 2^t | k·σ₁(N)/12 (N = {level}, k = {k})"
        )));
    }
    let r = k / (two_t / 2);
    EtaQuotient::new(level, arith::divisors(level).into_iter().map(|d| (d, r)))
}

/// `kσ₁(N)/12`, the sum of the cusp orders of any weight-`k` eta-quotient
/// modular on `Γ₀(N)`, `N` squarefree with prime factors at least 5.
pub fn vanishing_sum_expected(level: u64, k: i64) -> Result<BigRational> {
    require_squarefree_coprime6(level)?;
    Ok(BigRational::new(
        BigInt::from(k) * arith::sigma1(level),
        BigInt::from(12),
    ))
}

pub(crate) fn require_squarefree_coprime6(level: u64) -> Result<()> {
    if !arith::is_squarefree(level) {
        return Err(Error::Domain(format!("level {level} is not squarefree")));
    }
    if gcd(level, 6) != 1 {
        return Err(Error::Domain(format!("level {level} has a prime factor below 5")));
    }
    Ok(())
}

/// `Σ_{d|N} N gcd(d,δ)²/(dδ)` for a fixed `δ | N`.
pub fn inner_vanishing_sum(level: u64, delta: u64) -> BigRational {
    arith::divisors(level)
        .into_iter()
        .map(|d| {
            let g = gcd(d, delta);
            BigRational::new(BigInt::from(level) * g * g, BigInt::from(d) * delta)
        })
        .fold(BigRational::zero(), |a, b| a + b)
}
