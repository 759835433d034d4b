//! Checks shared by the property tests and the acceptance run.
#![allow(dead_code)]

use etaq_core::arith::{divisors, gcd, is_prime, kronecker, sigma1};
use etaq_core::etaquot::{eta_multiplier, numeric_eval, numeric_trunc_for, rouse_webb_bound};
use etaq_core::qseries::{euler_product, LATTICE};
use etaq_core::search::{self, VanishingTuple};
use etaq_core::spaces::{exists_prime_level, h_invariant, inner_vanishing_sum, vanishing_sum_expected};
use etaq_core::{EtaQuotient, UnimodularMatrix};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub const LEVELS: [u64; 4] = [35, 55, 77, 85];

/// Random modular quotient of even weight, by rejection on the two
/// congruences computed here from scratch.
pub fn random_modular(rng: &mut StdRng, level: u64, spread: i64) -> EtaQuotient {
    let divs = divisors(level);
    loop {
        let r: Vec<i64> = divs.iter().map(|_| rng.random_range(-spread..=spread)).collect();
        let a: i64 = divs.iter().zip(&r).map(|(&d, &x)| d as i64 * x).sum();
        let b: i64 = divs.iter().zip(&r).map(|(&d, &x)| (level / d) as i64 * x).sum();
        let s: i64 = r.iter().sum();
        if a.rem_euclid(24) == 0 && b.rem_euclid(24) == 0 && s.rem_euclid(4) == 0 {
            return EtaQuotient::new(level, divs.iter().copied().zip(r)).unwrap();
        }
    }
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

pub fn vanishing_sum_on_random_quotients() {
    let mut rng = StdRng::seed_from_u64(7);
    for level in LEVELS {
        for _ in 0..100 {
            let f = random_modular(&mut rng, level, 20);
            assert!(f.is_modular());
            let k = f.double_weight() / 2;
            let total = f.cusp_orders_all().unwrap().total();
            assert_eq!(total, vanishing_sum_expected(level, k).unwrap(), "{f}");
            // independent form of the right-hand side
            assert_eq!(total, BigRational::new(BigInt::from(k) * sigma1(level), 12.into()));
        }
    }
}

pub fn inner_sum_identity() {
    for level in [35, 55, 77, 85, 91, 385] {
        let sigma = sigma1(level);
        for delta in divisors(level) {
            let mut acc = BigRational::zero();
            for d in divisors(level) {
                let g = gcd(d, delta);
                acc += BigRational::new(BigInt::from(level * g * g), BigInt::from(d * delta));
            }
            assert_eq!(acc, int(sigma as i64));
            assert_eq!(inner_vanishing_sum(level, delta), acc);
        }
    }
}

pub fn solve_exponents_inverts_cusp_orders() {
    let mut rng = StdRng::seed_from_u64(11);
    for level in LEVELS {
        // multiplying by a power of the all-24 quotient makes every order positive
        let lift = EtaQuotient::new(level, divisors(level).into_iter().map(|d| (d, 24))).unwrap();
        for _ in 0..100 {
            let mut f = random_modular(&mut rng, level, 12);
            while f.cusp_orders_all().unwrap().values().any(|v| v.is_negative()) {
                f = f.mul(&lift).unwrap();
            }
            let orders = f.cusp_orders_all().unwrap();
            let tuple = VanishingTuple {
                level,
                orders: divisors(level)
                    .into_iter()
                    .map(|d| {
                        let v = orders.at(d).unwrap();
                        assert!(v.is_integer(), "{f} at 1/{d}");
                        v.to_integer().to_u64().unwrap()
                    })
                    .collect(),
            };
            let r = search::solve_exponents(&tuple).unwrap();
            let expected: Vec<BigRational> = f.exponent_vector().into_iter().map(int).collect();
            assert_eq!(r, expected, "{f}");
        }
    }
}

pub fn leading_exponent_is_order_at_infinity() {
    let mut rng = StdRng::seed_from_u64(13);
    for level in LEVELS {
        for _ in 0..50 {
            let f = random_modular(&mut rng, level, 10);
            let s = f.q_expansion(3);
            let lead = s.lead_exponent().unwrap();
            assert_eq!(lead % LATTICE, 0);
            assert_eq!(int(lead / LATTICE), f.cusp_order(level).unwrap(), "{f}");
        }
    }
}

/// Modular quotients of integral weight at small levels, some with
/// nontrivial character.
fn transformation_samples() -> Vec<EtaQuotient> {
    [
        "5; 1:-1, 5:5",
        "5; 1:4, 5:4",
        "7; 1:3, 7:3",
        "11; 1:2, 11:2",
        "13; 1:2, 13:-2",
        "13; 1:9, 13:3",
        "35; 1:2, 35:2",
        "35; 5:2, 7:2",
        "35; 1:1, 5:1, 7:1, 35:1",
        "23; 1:1, 23:1",
    ]
    .iter()
    .map(|s| s.parse().unwrap())
    .collect()
}

pub fn numeric_transformation_law() {
    let forms = transformation_samples();
    let mut rng = StdRng::seed_from_u64(17);
    let mut checked = 0;
    while checked < 50 {
        let f = &forms[checked % forms.len()];
        let n = f.level() as i64;
        let k = f.double_weight() / 2;
        assert!(f.is_modular());
        let c = n * if rng.random_bool(0.5) { 1 } else { -1 };
        let d: i64 = rng.random_range(-60..=60);
        if gcd(d.unsigned_abs(), c.unsigned_abs()) != 1 {
            continue;
        }
        // a d - b c = 1 with a = d⁻¹ mod c
        let a = (1..c.abs()).find(|a| (a * d - 1).rem_euclid(c) == 0).unwrap_or(1);
        let b = (a * d - 1) / c;
        let m = UnimodularMatrix::new(a, b, c, d).unwrap();
        // cτ + d on the unit circle keeps both Im τ and Im Mτ at 1/|c| scale
        let phi: f64 = rng.random_range(-0.5..0.5);
        let z = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_2 + phi);
        let z = if c < 0 { z.conj() } else { z };
        let tau = (z - d as f64) / c as f64;
        let image = m.apply(tau);
        let lhs = numeric_eval(f, image, numeric_trunc_for(image)).unwrap();
        let chi = kronecker(character_top(f), d);
        assert_eq!(f.nebentypus().unwrap().eval(d), chi, "{f} at d = {d}");
        let chi = chi as f64;
        let rhs = numeric_eval(f, tau, numeric_trunc_for(tau)).unwrap() * chi * (tau * c as f64 + d as f64).powi(k as i32);
        let err = (lhs - rhs).norm() / lhs.norm();
        assert!(err < 1e-9, "{f} under {m:?}: relative error {err}");
        checked += 1;
    }
}

/// `(-1)^k ∏ δ^{r_δ}` reduced to its squarefree part.
fn character_top(f: &EtaQuotient) -> i64 {
    let k = f.double_weight() / 2;
    let mut top: i64 = if k % 2 == 0 { 1 } else { -1 };
    let mut n = f.level();
    let mut p = 2;
    while n > 1 {
        if n.is_multiple_of(p) {
            let e: i64 = f
                .exponents()
                .iter()
                .map(|(&d, &r)| if d % p == 0 { r } else { 0 })
                .sum();
            if e.rem_euclid(2) == 1 {
                top *= p as i64;
            }
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    top
}

pub fn eta_multiplier_matches_the_eta_transformation() {
    let mut rng = StdRng::seed_from_u64(19);
    let mut checked = 0;
    while checked < 30 {
        let c: i64 = rng.random_range(-12..=12);
        let d: i64 = rng.random_range(-20..=20);
        if c == 0 || gcd(d.unsigned_abs(), c.unsigned_abs()) != 1 {
            continue;
        }
        let a = (1..=c.abs()).find(|a| (a * d - 1).rem_euclid(c) == 0).unwrap();
        let b = (a * d - 1) / c;
        let m = UnimodularMatrix::new(a, b, c, d).unwrap();
        let z = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_2 + rng.random_range(-0.4..0.4));
        let z = if c < 0 { z.conj() } else { z };
        let tau = (z - d as f64) / c as f64;
        let one: EtaQuotient = "1; 1:1".parse().unwrap();
        let lhs = numeric_eval(&one, m.apply(tau), numeric_trunc_for(m.apply(tau))).unwrap();
        let rhs = numeric_eval(&one, tau, numeric_trunc_for(tau)).unwrap()
            * eta_multiplier(&m).unwrap().to_complex()
            * (tau * c as f64 + d as f64).sqrt();
        assert!((lhs - rhs).norm() / lhs.norm() < 1e-9, "{m:?}");
        checked += 1;
    }
}

pub fn euler_product_matches_naive_product() {
    const N: usize = 200;
    for delta in [1u64, 2, 5] {
        let mut poly = vec![BigInt::zero(); N + 1];
        poly[0] = BigInt::from(1);
        for n in 1..=N {
            let step = n * delta as usize;
            if step > N {
                break;
            }
            for i in (step..=N).rev() {
                let t = poly[i - step].clone();
                poly[i] -= t;
            }
        }
        let s = euler_product(delta, (N as i64 + 1) * LATTICE);
        for (i, c) in poly.iter().enumerate() {
            assert_eq!(s.q_coeff(i as i64).unwrap(), BigRational::from_integer(c.clone()), "δ = {delta}, q^{i}");
        }
    }
}

pub fn odd_quotient_when_weight_forces_it() {
    for p in (5..500).filter(|&p| is_prime(p)) {
        let h = h_invariant(&[p]).unwrap() as i64;
        for k in (2..=24).step_by(2) {
            let kp = k * (p as i64 + 1);
            if k % h != 0 || kp % 12 != 0 || (kp / 12) % 2 == 0 {
                continue;
            }
            let m = (p as i64 - 1) / (2 * h);
            assert_eq!(m % 2, 1, "p = {p}, k = {k}");
        }
    }
}

pub fn system_matrix_is_invertible_with_row_sums_sigma() {
    for level in (5..=1001u64).filter(|&n| etaq_core::arith::is_squarefree(n) && gcd(n, 6) == 1) {
        let m = search::system_matrix(level);
        for row in &m {
            assert_eq!(row.iter().sum::<u64>(), sigma1(level));
        }
        let rows: Vec<Vec<BigRational>> =
            m.iter().map(|r| r.iter().map(|&x| int(x as i64)).collect()).collect();
        assert_eq!(etaq_core::linalg::rank(&rows), rows.len(), "level {level}");
    }
}

/// Exponent pairs `(r₁, r_p)` of weight `k` with `|r₁| + |r_p|` inside the
/// bound that satisfy both congruences and vanish to nonnegative order at
/// the two cusps.
pub fn prime_level_pairs(p: i64, k: i64) -> Vec<(i64, i64)> {
    let bound = rouse_webb_bound(p as u64, &BigRational::from_integer(k.into())).floor().to_integer().to_i64().unwrap();
    let mut out = Vec::new();
    for r1 in -bound..=bound {
        let rp = 2 * k - r1;
        if r1.abs() + rp.abs() > bound {
            continue;
        }
        let infinity = r1 + p * rp;
        let zero = p * r1 + rp;
        if infinity % 24 == 0 && zero % 24 == 0 && infinity >= 0 && zero >= 0 {
            out.push((r1, rp));
        }
    }
    out
}

/// Existence at prime level agrees with the bounded pair search for
/// `5 ≤ p ≤ 100`, `k ∈ {2, 4, 6}`, and every witness is valid.
pub fn prime_level_existence_agrees_with_bounded_search() {
    for p in (5..=100).filter(|&p| is_prime(p)) {
        for k in [2, 4, 6] {
            let verdict = exists_prime_level(p, k).unwrap();
            let pairs = prime_level_pairs(p as i64, k);
            assert_eq!(verdict.exists, !pairs.is_empty(), "p = {p}, k = {k}: {pairs:?}");
            if let Some(w) = verdict.witness {
                assert_eq!(w.level(), p);
                assert_eq!(w.double_weight(), 2 * k);
                assert!(w.is_modular());
                assert!(w.classify().is_holomorphic(), "{w}");
            }
        }
    }
    assert!(!exists_prime_level(29, 2).unwrap().exists);
    assert!(!exists_prime_level(53, 2).unwrap().exists);
}
