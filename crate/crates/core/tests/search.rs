mod common;

use std::collections::BTreeSet;

use etaq_core::arith::{divisors, gcd, is_prime};
use etaq_core::etaquot::rouse_webb_bound;
use etaq_core::search::{self, enumerate_eta_quotients, extract_basis, SearchConfig, SpaceKind};
use etaq_core::spaces::dim_cusp_forms;
use etaq_core::{Classification, EtaQuotient};
use num_rational::BigRational;
use num_traits::ToPrimitive;

#[test]
fn prime_level_existence_agrees_with_bounded_search() {
    common::prime_level_existence_agrees_with_bounded_search();
}

/// All holomorphic quotients of weight `k` and trivial character with
/// `Σ|r_δ|` at most the bound, by direct search.
fn bounded_holomorphic(level: u64, k: i64) -> BTreeSet<Vec<i64>> {
    let divs = divisors(level);
    let bound = rouse_webb_bound(level, &BigRational::from_integer(k.into())).floor().to_integer().to_i64().unwrap();
    let mut out = BTreeSet::new();
    let mut r = vec![0i64; divs.len()];
    fill(&divs, level, k, bound, 0, &mut r, &mut out);
    out
}

fn fill(divs: &[u64], level: u64, k: i64, left: i64, i: usize, r: &mut Vec<i64>, out: &mut BTreeSet<Vec<i64>>) {
    if i == divs.len() {
        if r.iter().sum::<i64>() == 2 * k && admissible(divs, level, r) {
            out.insert(r.clone());
        }
        return;
    }
    for x in -left..=left {
        r[i] = x;
        fill(divs, level, k, left - x.abs(), i + 1, r, out);
    }
    r[i] = 0;
}

fn admissible(divs: &[u64], level: u64, r: &[i64]) -> bool {
    let n = level as i64;
    let a: i64 = divs.iter().zip(r).map(|(&d, &x)| d as i64 * x).sum();
    let b: i64 = divs.iter().zip(r).map(|(&d, &x)| (n / d as i64) * x).sum();
    if a % 24 != 0 || b % 24 != 0 {
        return false;
    }
    // trivial character: every prime of the level occurs to an even power in ∏ δ^{r_δ}
    let primes: Vec<u64> = divs.iter().copied().filter(|&d| d > 1 && is_prime(d)).collect();
    for p in primes {
        let e: i64 = divs.iter().zip(r).filter(|(&d, _)| d % p == 0).map(|(_, &x)| x).sum();
        if e % 2 != 0 {
            return false;
        }
    }
    // 24·v_{1/d} up to a positive factor, squarefree level
    divs.iter().all(|&d| {
        let s: i64 = divs
            .iter()
            .zip(r)
            .map(|(&delta, &x)| {
                let g = gcd(d, delta) as i64;
                n * g * g * x / (d as i64 * delta as i64)
            })
            .sum();
        s >= 0
    })
}

#[test]
fn tuple_enumeration_is_complete_against_bounded_search() {
    for level in [35u64, 55] {
        let k = 2;
        let report = enumerate_eta_quotients(level, k, SpaceKind::Holomorphic, &SearchConfig::default()).unwrap();
        let found: BTreeSet<Vec<i64>> = report.found.iter().map(EtaQuotient::exponent_vector).collect();
        let brute = bounded_holomorphic(level, k);
        assert!(brute.is_subset(&found), "level {level}: missing {:?}", brute.difference(&found).collect::<Vec<_>>());
        // nothing holomorphic lies outside the bound either
        assert_eq!(brute, found);
        let lib: BTreeSet<Vec<i64>> = search::brute_force_quotients(level, k, SpaceKind::Holomorphic, {
            rouse_webb_bound(level, &BigRational::from_integer(k.into())).floor().to_integer().to_i64().unwrap()
        })
        .unwrap()
        .iter()
        .map(EtaQuotient::exponent_vector)
        .collect();
        assert_eq!(lib, brute);
    }
}

#[test]
fn emitted_forms_have_the_requested_orders() {
    for (level, k) in [(35, 2), (35, 4), (55, 4), (77, 2)] {
        for kind in [SpaceKind::Cusp, SpaceKind::Holomorphic] {
            let report = enumerate_eta_quotients(level, k, kind, &SearchConfig::default()).unwrap();
            for (f, t) in report.found.iter().zip(&report.tuples) {
                let orders = f.cusp_orders_all().unwrap();
                for (d, &v) in divisors(level).into_iter().zip(&t.orders) {
                    assert_eq!(orders.at(d).unwrap(), &BigRational::from_integer(v.into()));
                }
                let c = f.classify();
                match kind {
                    SpaceKind::Cusp => assert_eq!(c, Classification::CuspForm),
                    SpaceKind::Holomorphic => assert!(c.is_holomorphic()),
                }
                assert!(f.nebentypus().unwrap().is_trivial());
            }
        }
    }
}

#[test]
fn basis_extraction_keeps_the_span() {
    let level = 77;
    let k = 4;
    let report = enumerate_eta_quotients(level, k, SpaceKind::Cusp, &SearchConfig::default()).unwrap();
    let all = search::expansion_matrix(&report.found, level, k, &SearchConfig::default()).unwrap();
    let (basis, rows) = extract_basis(&report.found, level, k).unwrap();
    assert_eq!(basis.len(), rows.len());
    assert_eq!(etaq_core::linalg::rank(&rows), rows.len());
    assert_eq!(etaq_core::linalg::rank(&all), rows.len());
    let mut both = all.clone();
    both.extend(rows);
    assert_eq!(etaq_core::linalg::rank(&both), basis.len());
    assert!(basis.len() as i64 <= dim_cusp_forms(level, k).unwrap());
}

#[test]
fn output_does_not_depend_on_parallelism() {
    let serial = SearchConfig { jobs: Some(1), ..SearchConfig::default() };
    let wide = SearchConfig { jobs: Some(8), ..SearchConfig::default() };
    for (level, k) in [(35, 4), (55, 4), (85, 2)] {
        let a = enumerate_eta_quotients(level, k, SpaceKind::Cusp, &serial).unwrap();
        let b = enumerate_eta_quotients(level, k, SpaceKind::Cusp, &wide).unwrap();
        assert_eq!(a, b);
    }
}
