//! Writing a weight-2 newform as a rational combination of eta-quotients,
//! directly or after multiplying into a higher weight.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::curve::{self, WeierstrassCurve};
use crate::error::{Error, Result};
use crate::etaquot::{Classification, EtaQuotient};
use crate::linalg::{self, PivotRule};
use crate::qseries::{parse_rational, FracSeries, LATTICE};
use crate::search::{self, SearchConfig, SearchReport, SpaceKind};
use crate::spaces::{require_squarefree_coprime6, sturm_bound};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TargetSource {
    File,
    Curve(WeierstrassCurve),
}

/// `Σ_{n ≥ 1} a(n) qⁿ` known for `n ≤ n_max`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TargetForm {
    pub level: u64,
    pub weight: i64,
    /// `coeffs[n - 1] = a(n)`.
    pub coeffs: Vec<BigInt>,
    pub source: TargetSource,
}

impl TargetForm {
    pub fn n_max(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, n: usize) -> Option<&BigInt> {
        n.checked_sub(1).and_then(|i| self.coeffs.get(i))
    }

    /// The series `Σ a(n) qⁿ + O(q^{n_max + 1})`.
    pub fn series(&self) -> FracSeries {
        FracSeries::from_q_integers(
            self.coeffs.iter().enumerate().map(|(i, c)| (i as i64 + 1, c.clone())),
            self.n_max() as i64 + 1,
        )
    }

    /// Parses lines `n a_n` (n = 1, 2, … without gaps) with optional
    /// `level N` / `weight k` lines and `#` comments. `level` overrides or
    /// supplies the level directive.
    pub fn parse(text: &str, level: Option<u64>) -> Result<Self> {
        let mut file_level: Option<u64> = None;
        let mut weight: Option<i64> = None;
        let mut coeffs: Vec<BigInt> = Vec::new();
        let mut last_line = 0;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            last_line = line_no;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 2 {
                return Err(Error::parse(line_no, format!("expected `n a_n`, got {line:?}")));
            }
            match toks[0] {
                "level" => {
                    let v = toks[1]
                        .parse::<u64>()
                        .ok()
                        .filter(|&v| v > 0)
                        .ok_or_else(|| Error::parse(line_no, "level must be a positive integer"))?;
                    if file_level.replace(v).is_some() {
                        return Err(Error::parse(line_no, "repeated level line"));
                    }
                }
                "weight" => {
                    let v = toks[1]
                        .parse::<i64>()
                        .map_err(|_| Error::parse(line_no, "weight must be an integer"))?;
                    if weight.replace(v).is_some() {
                        return Err(Error::parse(line_no, "repeated weight line"));
                    }
                }
                idx => {
                    let n: usize = idx
                        .parse()
                        .ok()
                        .filter(|&n| n >= 1)
                        .ok_or_else(|| Error::parse(line_no, format!("index {idx:?} is not a positive integer")))?;
                    let a: BigInt = toks[1]
                        .parse()
                        .map_err(|_| Error::parse(line_no, format!("coefficient {:?} is not an integer", toks[1])))?;
                    let expected = coeffs.len() + 1;
                    if n < expected {
                        return Err(Error::parse(line_no, format!("duplicate or out-of-order index {n}")));
                    }
                    if n > expected {
                        return Err(Error::parse(line_no, format!("gap: index {n} follows {}", expected - 1)));
                    }
                    coeffs.push(a);
                }
            }
        }
        if coeffs.is_empty() {
            return Err(Error::parse(last_line.max(1), "no coefficients"));
        }
        let level = match (level, file_level) {
            (Some(a), Some(b)) if a != b => {
                return Err(Error::Precondition(format!("level {a} given but file declares {b}")))
            }
            (Some(a), _) | (None, Some(a)) => a,
            (None, None) => return Err(Error::parse(last_line, "no `level` line and no level supplied")),
        };
        Ok(TargetForm { level, weight: weight.unwrap_or(2), coeffs, source: TargetSource::File })
    }

    /// Coefficients of the newform attached to `e`, by point counting.
    pub fn from_curve(e: &WeierstrassCurve, conductor: u64, n_max: usize) -> Result<Self> {
        Ok(TargetForm {
            level: conductor,
            weight: 2,
            coeffs: curve::curve_coefficients(e, conductor, n_max)?,
            source: TargetSource::Curve(*e),
        })
    }
}

pub fn load_target(path: impl AsRef<Path>) -> Result<TargetForm> {
    TargetForm::parse(&read(path.as_ref())?, None)
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Domain(format!("{}: {e}", path.display())))
}

/// One eta-quotient per line in textual form; `#` starts a comment.
pub fn parse_quotient_list(text: &str) -> Result<Vec<EtaQuotient>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let f: EtaQuotient = line.parse().map_err(|e: Error| match e {
            Error::Parse { msg, .. } => Error::parse(i + 1, msg),
            other => Error::parse(i + 1, other.to_string()),
        })?;
        out.push(f);
    }
    if out.is_empty() {
        return Err(Error::parse(text.lines().count().max(1), "no quotients"));
    }
    Ok(out)
}

/// Lines `i c_i` with `i = 1, 2, …` and rational `c_i`; `#` starts a comment.
pub fn parse_coefficient_list(text: &str) -> Result<Vec<BigRational>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let [idx, c] = toks[..] else {
            return Err(Error::parse(i + 1, "expected `i c_i`"));
        };
        if idx.parse::<usize>().ok() != Some(out.len() + 1) {
            return Err(Error::parse(i + 1, format!("expected index {}", out.len() + 1)));
        }
        out.push(parse_rational(c).ok_or_else(|| Error::parse(i + 1, format!("bad rational {c:?}")))?);
    }
    Ok(out)
}

fn check_basis(basis: &[EtaQuotient], level: u64, k: i64) -> Result<()> {
    for g in basis {
        if g.level() != level || g.double_weight() != 2 * k {
            return Err(Error::Precondition(format!("{g} is not of level {level} and weight {k}")));
        }
        if g.classify() != Classification::CuspForm {
            return Err(Error::Precondition(format!("{g} is not a cusp form")));
        }
    }
    Ok(())
}

/// Solves `Σ c_i g_i = s` on `q^0 … q^{B+1}`, `B` the Sturm bound of weight `k`.
pub fn express_series_in_basis(
    s: &FracSeries,
    basis: &[EtaQuotient],
    level: u64,
    k: i64,
    rule: PivotRule,
) -> Result<Option<Vec<BigRational>>> {
    check_basis(basis, level, k)?;
    let depth = search::comparison_depth(level, k);
    let rhs = search::coefficient_vector(s, depth)?;
    let rows = search::expansion_matrix(basis, level, k, &SearchConfig::default())?;
    if linalg::rank(&rows) != rows.len() {
        return Err(Error::Precondition("basis is linearly dependent".into()));
    }
    Ok(linalg::solve_combination(&rows, &rhs, rule))
}

/// Coefficients of `target` in `basis`, `None` if it is not in the span.
pub fn express_in_basis(
    target: &TargetForm,
    basis: &[EtaQuotient],
    level: u64,
    k: i64,
) -> Result<Option<Vec<BigRational>>> {
    let depth = search::comparison_depth(level, k) as usize;
    if target.n_max() < depth {
        return Err(Error::Precision { required: depth, available: target.n_max() });
    }
    express_series_in_basis(&target.series(), basis, level, k, PivotRule::default())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecomposeOptions {
    /// Forces `a(τ)` and hence the stage weight `2 + weight(a)`.
    pub multiplier: Option<EtaQuotient>,
    /// Forces the basis (and its order) at the stage weight.
    pub basis: Option<Vec<EtaQuotient>>,
    /// Largest stage weight tried by the automatic search.
    pub max_weight: i64,
    pub search: SearchConfig,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions { multiplier: None, basis: None, max_weight: 24, search: SearchConfig::default() }
    }
}

/// `a(τ) f(τ) = Σ c_i g_i(τ)`, so `f = Σ c_i g_i / a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionResult {
    pub target: TargetForm,
    pub stage_weight: i64,
    pub multiplier: Option<EtaQuotient>,
    pub basis: Vec<EtaQuotient>,
    pub coefficients: Vec<BigRational>,
}

impl DecompositionResult {
    /// `g_i / a` by exponent subtraction (the `g_i` when there is no multiplier).
    pub fn reduced_basis(&self) -> Vec<EtaQuotient> {
        match &self.multiplier {
            None => self.basis.clone(),
            Some(a) => self
                .basis
                .iter()
                .map(|g| g.div(a).expect("basis and multiplier share the level"))
                .collect(),
        }
    }
}

impl fmt::Display for DecompositionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (c, g) in self.coefficients.iter().zip(self.reduced_basis()) {
            writeln!(f, "{c}  {g}")?;
        }
        Ok(())
    }
}

/// `target · a` known through `q^max_q`, or a precision error naming how
/// many target coefficients that needs.
fn multiplied_target(target: &TargetForm, a: Option<&EtaQuotient>, max_q: i64) -> Result<FracSeries> {
    let lead = a.map_or(0, |a| a.lead_exponent() / LATTICE);
    let need = (max_q - lead).max(0) as usize;
    if target.n_max() < need {
        return Err(Error::Precision { required: need, available: target.n_max() });
    }
    let t = target.series();
    Ok(match a {
        None => t.truncated((max_q + 1) * LATTICE),
        Some(a) => (&t * &a.expand_through(max_q)).truncated((max_q + 1) * LATTICE),
    })
}

struct Reports<'a> {
    level: u64,
    config: &'a SearchConfig,
    cache: HashMap<i64, SearchReport>,
}

impl Reports<'_> {
    fn get(&mut self, k: i64) -> Result<&SearchReport> {
        if !self.cache.contains_key(&k) {
            let r = search::enumerate_eta_quotients(self.level, k, SpaceKind::Cusp, self.config)?;
            self.cache.insert(k, r);
        }
        Ok(&self.cache[&k])
    }
}

fn solve_stage(
    target: &TargetForm,
    a: Option<&EtaQuotient>,
    basis: Vec<EtaQuotient>,
    k: i64,
) -> Result<Option<DecompositionResult>> {
    let level = target.level;
    let product = multiplied_target(target, a, search::comparison_depth(level, k))?;
    let c = express_series_in_basis(&product, &basis, level, k, PivotRule::default())?;
    Ok(c.map(|coefficients| DecompositionResult {
        target: target.clone(),
        stage_weight: k,
        multiplier: a.cloned(),
        basis,
        coefficients,
    }))
}

/// Expresses a weight-2 target through eta-quotients, raising the weight by
/// a cusp-form multiplier when weight 2 has too few quotients.
pub fn escalate_and_decompose(target: &TargetForm, options: &DecomposeOptions) -> Result<DecompositionResult> {
    let level = target.level;
    require_squarefree_coprime6(level)?;
    if target.weight != 2 {
        return Err(Error::Precondition(format!("target weight {} is not 2", target.weight)));
    }
    let mut reports = Reports { level, config: &options.search, cache: HashMap::new() };

    if let Some(a) = &options.multiplier {
        if a.level() != level {
            return Err(Error::Precondition(format!("multiplier {a} is not at level {level}")));
        }
        if !a.classify().is_holomorphic() || a.double_weight() % 4 != 0 {
            return Err(Error::Precondition(format!("multiplier {a} must be holomorphic of even weight")));
        }
    }
    let forced_weight = match (&options.multiplier, &options.basis) {
        (Some(a), _) => Some(2 + a.double_weight() / 2),
        (None, Some(b)) => Some(b.first().map_or(2, |g| g.double_weight() / 2)),
        (None, None) => None,
    };

    if let Some(k) = forced_weight {
        let basis = match &options.basis {
            Some(b) => {
                check_basis(b, level, k)?;
                let dim = crate::spaces::dim_cusp_forms(level, k)?;
                let rows = search::expansion_matrix(b, level, k, &options.search)?;
                if linalg::rank(&rows) as i64 != dim || b.len() as i64 != dim {
                    return Err(Error::Precondition(format!(
                        "supplied basis does not form a basis of S_{k}(Gamma0({level})) (dimension {dim})"
                    )));
                }
                b.clone()
            }
            None => {
                let r = reports.get(k)?;
                if !r.spans && k != 2 {
                    return Err(Error::NoSpanningWeight {
                        max_weight: k,
                        detail: format!(
                            "eta-quotients span {} of {} dimensions at weight {k}",
                            r.independent_count, r.space_dim
                        ),
                    });
                }
                r.basis()
            }
        };
        let a = match (&options.multiplier, k) {
            (Some(a), _) => Some(a.clone()),
            (None, 2) => None,
            (None, _) => Some(default_multiplier(&mut reports, k)?.ok_or_else(|| {
                Error::NoSpanningWeight { max_weight: k, detail: format!("no eta-quotient in S_{}", k - 2) }
            })?),
        };
        return solve_stage(target, a.as_ref(), basis, k)?.ok_or_else(|| {
            Error::Precondition(format!("target is not in the span of the weight-{k} basis"))
        });
    }

    let weight_two = reports.get(2)?.basis();
    if let Some(r) = solve_stage(target, None, weight_two, 2)? {
        return Ok(r);
    }
    let mut notes = Vec::new();
    for k in (4..=options.max_weight).step_by(2) {
        let r = reports.get(k)?;
        if !r.spans {
            notes.push(format!("k={k}: {}/{}", r.independent_count, r.space_dim));
            continue;
        }
        let basis = r.basis();
        let Some(a) = default_multiplier(&mut reports, k)? else {
            notes.push(format!("k={k}: S_{} has no eta-quotient", k - 2));
            continue;
        };
        return solve_stage(target, Some(&a), basis, k)?
            .ok_or_else(|| Error::Internal(format!("spanning weight-{k} basis does not reach target·a")));
    }
    Err(Error::NoSpanningWeight { max_weight: options.max_weight, detail: notes.join(", ") })
}

fn default_multiplier(reports: &mut Reports<'_>, k: i64) -> Result<Option<EtaQuotient>> {
    Ok(reports.get(k - 2)?.found.first().cloned())
}

/// Recomputes `Σ c_i g_i` and `a · target` through `q^{B+margin}` and
/// compares them exactly.
pub fn verify_decomposition(result: &DecompositionResult, margin: i64) -> Result<bool> {
    if result.coefficients.len() != result.basis.len() {
        return Ok(false);
    }
    let level = result.target.level;
    let max_q = sturm_bound(level, result.stage_weight) + margin.max(0);
    let rhs = multiplied_target(&result.target, result.multiplier.as_ref(), max_q)?;
    let trunc = (max_q + 1) * LATTICE;
    let mut lhs = FracSeries::zero(trunc);
    for (c, g) in result.coefficients.iter().zip(&result.basis) {
        if c.is_zero() {
            continue;
        }
        lhs = &lhs + &g.expand_through(max_q).scaled(c);
    }
    Ok(lhs.truncated(trunc) == rhs)
}

/// `a(n)` as `i64`, for display.
pub fn small_coefficients(t: &TargetForm) -> Option<Vec<i64>> {
    t.coeffs.iter().map(|c| c.to_i64()).collect()
}
