//! Enumeration of eta-quotients in `S_k` / `M_k` at squarefree level via
//! vanishing tuples, and exact basis extraction.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::{self, gcd};
use crate::error::{Error, Result};
use crate::etaquot::{Classification, EtaQuotient};
use crate::linalg::{self, Echelon, PivotRule};
use crate::qseries::FracSeries;
use crate::spaces::{self, require_squarefree_coprime6};

/// Tuple cap used when neither the caller nor `ETAQ_MAX_TUPLES` sets one.
pub const DEFAULT_MAX_TUPLES: u128 = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpaceKind {
    Cusp,
    Holomorphic,
}

impl SpaceKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SpaceKind::Cusp => "cusp",
            SpaceKind::Holomorphic => "holomorphic",
        }
    }

    fn lower_bound(&self) -> u64 {
        match self {
            SpaceKind::Cusp => 1,
            SpaceKind::Holomorphic => 0,
        }
    }

    fn accepts(&self, c: Classification) -> bool {
        match self {
            SpaceKind::Cusp => c == Classification::CuspForm,
            SpaceKind::Holomorphic => c.is_holomorphic(),
        }
    }
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Enumeration limits and parallelism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub max_tuples: u128,
    /// Worker threads; `None` uses the global rayon pool.
    pub jobs: Option<usize>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { max_tuples: DEFAULT_MAX_TUPLES, jobs: None }
    }
}

impl SearchConfig {
    /// Default config with the cap taken from `ETAQ_MAX_TUPLES` when set.
    pub fn from_env() -> Result<Self> {
        let mut cfg = SearchConfig::default();
        if let Ok(v) = std::env::var("ETAQ_MAX_TUPLES") {
            cfg.max_tuples = v
                .trim()
                .parse()
                .map_err(|_| Error::Domain(format!("ETAQ_MAX_TUPLES={v:?} is not a nonnegative integer")))?;
        }
        Ok(cfg)
    }

    fn run<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        match self.jobs {
            None => Ok(f()),
            Some(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n.max(1))
                    .build()
                    .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
                Ok(pool.install(f))
            }
        }
    }
}

/// Cusp orders `(v_{1/d})` indexed by the ascending divisors of a squarefree level.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VanishingTuple {
    pub level: u64,
    pub orders: Vec<u64>,
}

impl VanishingTuple {
    pub fn total(&self) -> u64 {
        self.orders.iter().sum()
    }
}

/// `M[d][δ] = N gcd(d,δ)²/(dδ)` over ascending divisors, integral for squarefree `N`.
pub fn system_matrix(level: u64) -> Vec<Vec<u64>> {
    let divs = arith::divisors(level);
    divs.iter()
        .map(|&d| {
            divs.iter()
                .map(|&delta| {
                    let g = gcd(d, delta);
                    // N g²/(dδ) = (N / lcm(d,δ)) · g
                    level / (d / g * delta) * g
                })
                .collect()
        })
        .collect()
}

/// Inverse of [`system_matrix`] scaled to integers: `M⁻¹ = adj / den`.
struct LevelSystem {
    divisors: Vec<u64>,
    adj: Vec<Vec<i128>>,
    den: i128,
}

impl LevelSystem {
    fn new(level: u64) -> Result<Self> {
        require_squarefree_coprime6(level)?;
        let m: Vec<Vec<BigRational>> = system_matrix(level)
            .into_iter()
            .map(|row| row.into_iter().map(|x| BigRational::from_integer(x.into())).collect())
            .collect();
        let inv = linalg::invert(&m)
            .ok_or_else(|| Error::Internal(format!("cusp-order system singular at level {level}")))?;
        let den = inv
            .iter()
            .flatten()
            .fold(BigInt::from(1), |acc, x| acc.lcm(x.denom()));
        let adj = inv
            .iter()
            .map(|row| {
                row.iter()
                    .map(|x| (x * &den).to_integer().to_i128())
                    .collect::<Option<Vec<_>>>()
            })
            .collect::<Option<Vec<_>>>();
        let (Some(adj), Some(den)) = (adj, den.to_i128()) else {
            return Err(Error::Unsupported(format!("level {level} too large for the cusp-order system")));
        };
        Ok(LevelSystem { divisors: arith::divisors(level), adj, den })
    }

    /// Integral exponents for a tuple, `None` if some `r_δ` is not an integer.
    fn integral_solution(&self, orders: &[u64]) -> Option<Vec<i64>> {
        self.adj
            .iter()
            .map(|row| {
                let s: i128 = row.iter().zip(orders).map(|(a, &v)| a * 24 * v as i128).sum();
                if s % self.den != 0 {
                    None
                } else {
                    i64::try_from(s / self.den).ok()
                }
            })
            .collect()
    }
}

/// Number of compositions of `total` into `parts` parts each `≥ lower`.
pub fn composition_count(total: u64, parts: usize, lower: u64) -> u128 {
    let need = lower as u128 * parts as u128;
    if parts == 0 || (total as u128) < need {
        return u128::from(parts == 0 && total == 0);
    }
    let free = total as u128 - need;
    // C(free + parts − 1, parts − 1)
    let mut c: u128 = 1;
    for i in 1..parts as u128 {
        c = c.saturating_mul(free + i) / i;
    }
    c
}

fn tuple_total(level: u64, k: i64) -> Result<u64> {
    require_squarefree_coprime6(level)?;
    if k % 2 != 0 {
        return Err(Error::Unsupported(format!("odd weight {k}")));
    }
    if k < 0 {
        return Err(Error::Domain(format!("negative weight {k}")));
    }
    let num = k as u128 * arith::sigma1(level) as u128;
    if !num.is_multiple_of(12) {
        return Err(Error::Domain(format!("k·σ₁(N)/12 = {num}/12 is not an integer for N={level}, k={k}")));
    }
    u64::try_from(num / 12).map_err(|_| Error::Domain("vanishing sum overflows".into()))
}

/// All vanishing tuples for `(N, k, kind)` in lexicographic order.
pub fn enumerate_vanishing_tuples(
    level: u64,
    k: i64,
    kind: SpaceKind,
    max_tuples: u128,
) -> Result<Vec<VanishingTuple>> {
    let total = tuple_total(level, k)?;
    let parts = arith::divisors(level).len();
    let lower = kind.lower_bound();
    let count = composition_count(total, parts, lower);
    if count > max_tuples {
        return Err(Error::TupleCap { count, cap: max_tuples });
    }
    let mut out = Vec::with_capacity(count as usize);
    if count == 0 {
        return Ok(out);
    }
    let mut cur = vec![lower; parts];
    compose(&mut cur, 0, total - lower * parts as u64, lower, &mut |c| {
        out.push(VanishingTuple { level, orders: c.to_vec() })
    });
    Ok(out)
}

fn compose(cur: &mut [u64], i: usize, left: u64, lower: u64, emit: &mut impl FnMut(&[u64])) {
    if i + 1 == cur.len() {
        cur[i] = lower + left;
        emit(cur);
        return;
    }
    for extra in 0..=left {
        cur[i] = lower + extra;
        compose(cur, i + 1, left - extra, lower, emit);
    }
}

/// Exact exponents `r_δ` (ascending `δ | N`) with the given cusp orders.
pub fn solve_exponents(t: &VanishingTuple) -> Result<Vec<BigRational>> {
    require_squarefree_coprime6(t.level)?;
    let divs = arith::divisors(t.level);
    if t.orders.len() != divs.len() {
        return Err(Error::Domain(format!(
            "tuple has {} entries, level {} has {} divisors",
            t.orders.len(),
            t.level,
            divs.len()
        )));
    }
    let m = system_matrix(t.level);
    // columns of M, so that Σ_δ r_δ · M[·][δ] = 24 v
    let columns: Vec<Vec<BigRational>> = (0..divs.len())
        .map(|j| m.iter().map(|row| BigRational::from_integer(row[j].into())).collect())
        .collect();
    let rhs: Vec<BigRational> = t
        .orders
        .iter()
        .map(|&v| BigRational::from_integer(BigInt::from(v) * 24))
        .collect();
    if linalg::rank(&columns) < divs.len() {
        return Err(Error::Internal(format!("cusp-order system singular at level {}", t.level)));
    }
    linalg::solve_combination(&columns, &rhs, PivotRule::default())
        .ok_or_else(|| Error::Internal("invertible system reported inconsistent".into()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchReport {
    pub level: u64,
    pub weight: i64,
    pub kind: SpaceKind,
    /// Quotients found, in lexicographic order of their vanishing tuples.
    pub found: Vec<EtaQuotient>,
    /// Vanishing tuple of each entry of `found`.
    pub tuples: Vec<VanishingTuple>,
    /// Indices into `found` of a maximal independent subset, chosen greedily.
    pub basis_indices: Vec<usize>,
    pub independent_count: usize,
    pub space_dim: i64,
    pub spans: bool,
}

impl SearchReport {
    pub fn basis(&self) -> Vec<EtaQuotient> {
        self.basis_indices.iter().map(|&i| self.found[i].clone()).collect()
    }
}

fn space_dimension(level: u64, k: i64, kind: SpaceKind) -> Result<i64> {
    match (kind, k) {
        (SpaceKind::Cusp, k) if k < 2 => Ok(0),
        (SpaceKind::Cusp, k) => spaces::dim_cusp_forms(level, k),
        (SpaceKind::Holomorphic, k) => spaces::dim_modular_forms(level, k),
    }
}

/// Every eta-quotient in `S_k(Γ₀(N))` (or `M_k(Γ₀(N))`), trivial character.
pub fn enumerate_eta_quotients(
    level: u64,
    k: i64,
    kind: SpaceKind,
    config: &SearchConfig,
) -> Result<SearchReport> {
    let tuples = enumerate_vanishing_tuples(level, k, kind, config.max_tuples)?;
    let system = LevelSystem::new(level)?;
    let space_dim = space_dimension(level, k, kind)?;

    let hits: Vec<Option<(VanishingTuple, EtaQuotient)>> = config.run(|| {
        tuples
            .into_par_iter()
            .map(|t| {
                let r = system.integral_solution(&t.orders)?;
                let f = EtaQuotient::new(level, system.divisors.iter().copied().zip(r)).ok()?;
                let trivial = f.nebentypus().ok()?.is_trivial();
                (trivial && kind.accepts(f.classify())).then_some((t, f))
            })
            .collect()
    })?;
    let (tuples, found): (Vec<_>, Vec<_>) = hits.into_iter().flatten().unzip();

    let basis_indices = extract_basis_indices(&found, level, k, config)?;
    let independent_count = basis_indices.len();
    Ok(SearchReport {
        level,
        weight: k,
        kind,
        found,
        tuples,
        basis_indices,
        independent_count,
        space_dim,
        spans: independent_count as i64 == space_dim,
    })
}

/// Exponents `0..=B+1` used for independence and equality, `B` the Sturm bound.
pub fn comparison_depth(level: u64, k: i64) -> i64 {
    spaces::sturm_bound(level, k) + 1
}

/// Coefficients of `q^0 … q^max_q` as a dense vector.
pub fn coefficient_vector(s: &FracSeries, max_q: i64) -> Result<Vec<BigRational>> {
    if !s.has_integral_exponents() {
        Err(Error::Domain("series has fractional exponents".into()))?;
    }
    (0..=max_q)
        .map(|n| {
            s.q_coeff(n).ok_or(Error::Precision {
                required: max_q as usize + 1,
                available: (s.trunc() / crate::qseries::LATTICE).max(0) as usize,
            })
        })
        .collect()
}

fn check_forms(forms: &[EtaQuotient], level: u64, k: i64) -> Result<()> {
    for f in forms {
        if f.level() != level {
            return Err(Error::Precondition(format!("{f} is not at level {level}")));
        }
        if f.double_weight() != 2 * k {
            return Err(Error::Precondition(format!("{f} does not have weight {k}")));
        }
        if !f.is_modular() {
            return Err(Error::NotModular { level });
        }
    }
    Ok(())
}

/// Expansion vectors through the comparison depth, computed in parallel.
pub fn expansion_matrix(
    forms: &[EtaQuotient],
    level: u64,
    k: i64,
    config: &SearchConfig,
) -> Result<Vec<Vec<BigRational>>> {
    check_forms(forms, level, k)?;
    let depth = comparison_depth(level, k);
    config.run(|| {
        forms
            .par_iter()
            .map(|f| coefficient_vector(&f.expand_through(depth), depth))
            .collect::<Result<Vec<_>>>()
    })?
}

fn extract_basis_indices(
    forms: &[EtaQuotient],
    level: u64,
    k: i64,
    config: &SearchConfig,
) -> Result<Vec<usize>> {
    let rows = expansion_matrix(forms, level, k, config)?;
    let mut e = Echelon::new(PivotRule::default());
    Ok((0..rows.len()).filter(|&i| e.insert(&rows[i])).collect())
}

/// Greedy left-to-right maximal independent subset, with the coefficient
/// rows (`q^0 … q^{B+1}`) of the selected forms.
pub fn extract_basis(
    forms: &[EtaQuotient],
    level: u64,
    k: i64,
) -> Result<(Vec<EtaQuotient>, Vec<Vec<BigRational>>)> {
    let rows = expansion_matrix(forms, level, k, &SearchConfig::default())?;
    let mut e = Echelon::new(PivotRule::default());
    let mut basis = Vec::new();
    let mut matrix = Vec::new();
    for (f, row) in forms.iter().zip(rows) {
        if e.insert(&row) {
            basis.push(f.clone());
            matrix.push(row);
        }
    }
    Ok((basis, matrix))
}

/// Brute-force list of eta-quotients of level `N`, weight `k` and trivial
/// character in the given space with `Σ|r_δ| ≤ bound`. Exponential in the number of divisors.
pub fn brute_force_quotients(level: u64, k: i64, kind: SpaceKind, bound: i64) -> Result<Vec<EtaQuotient>> {
    let divs = arith::divisors(level);
    let mut out = Vec::new();
    let mut r = vec![0i64; divs.len()];
    brute(&mut r, 0, bound, 2 * k, &mut |r| {
        let f = EtaQuotient::new(level, divs.iter().copied().zip(r.iter().copied()))
            .expect("divisors of the level");
        if kind.accepts(f.classify()) && f.nebentypus().is_ok_and(|c| c.is_trivial()) {
            out.push(f);
        }
    });
    Ok(out)
}

fn brute(r: &mut [i64], i: usize, left: i64, sum: i64, emit: &mut impl FnMut(&[i64])) {
    if i + 1 == r.len() {
        // the last exponent is forced by the weight
        if sum.abs() <= left {
            r[i] = sum;
            emit(r);
        }
        return;
    }
    for x in -left..=left {
        r[i] = x;
        brute(r, i + 1, left - x.abs(), sum - x, emit);
    }
}

/// `Σ_δ M[d][δ] r_δ / 24`, the forward map used as a check on `solve_exponents`.
pub fn forward_orders(level: u64, r: &[BigRational]) -> Vec<BigRational> {
    system_matrix(level)
        .iter()
        .map(|row| {
            row.iter()
                .zip(r)
                .map(|(&m, x)| x * BigRational::from_integer(m.into()))
                .fold(BigRational::zero(), |a, b| a + b)
                / BigRational::from_integer(24.into())
        })
        .collect()
}
