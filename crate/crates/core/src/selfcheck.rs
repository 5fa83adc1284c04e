//! Quick oracle-equivalence checks: every fast path against brute-force
//! enumeration or closed forms, at sizes that finish in a few seconds.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::combinatorics::{catalan, double_factorial_odd};
use crate::pairings::{enumerate, weighted_sum_poly, weighted_sum_poly_where, EnumerationCaps, PairingClass};
use crate::polynomial::WeightPoly;
use crate::qcatalan::{bk_phi_consistency, bk_recurrence, phi_degree, phi_recurrence};
use crate::scalar_moments::{log_moment, moment_exact, moment_poly, ExactOptions};

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

/// Rational weights used by the exact comparisons.
pub fn sample_weights() -> Vec<BigRational> {
    [(1, 2), (2, 3), (3, 7), (5, 11), (9, 10)]
        .iter()
        .map(|&(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
        .collect()
}

fn check(name: &'static str, failures: Vec<String>, ok: String) -> CheckResult {
    CheckResult {
        name,
        pass: failures.is_empty(),
        detail: if failures.is_empty() { ok } else { failures.join("; ") },
    }
}

pub fn run() -> Vec<CheckResult> {
    let caps = EnumerationCaps::default();
    let opts = ExactOptions::default();
    let mut out = Vec::new();

    let mut fails = Vec::new();
    for k in 0..=6 {
        let all = enumerate(k, PairingClass::All).count();
        let nc = enumerate(k, PairingClass::NonCrossing).count();
        if BigInt::from(all) != BigInt::from(double_factorial_odd(k)) {
            fails.push(format!("k={k}: {all} pairings"));
        }
        if BigInt::from(nc) != BigInt::from(catalan(k)) {
            fails.push(format!("k={k}: {nc} non-crossing pairings"));
        }
    }
    out.push(check("pairing counts", fails, "k <= 6".into()));

    let mut fails = Vec::new();
    let bk = bk_recurrence(8);
    for k in 1..=8 {
        let oracle = weighted_sum_poly(k, PairingClass::NonCrossing, &caps).expect("within cap");
        if oracle != bk.entries[k] {
            fails.push(format!("k={k}: recurrence differs from enumeration"));
        }
        if moment_poly(k, PairingClass::NonCrossing) != oracle {
            fails.push(format!("k={k}: arc sweep differs from enumeration"));
        }
        for p in sample_weights() {
            let dp = moment_exact(k, PairingClass::NonCrossing, &p, &opts).expect("valid weight");
            if dp != oracle.eval_rational(&p) {
                fails.push(format!("k={k}, p={p}: DP value differs"));
            }
        }
    }
    out.push(check("B_k: enumeration = recurrence = DP", fails, "k <= 8".into()));

    let mut fails = Vec::new();
    let phi = phi_recurrence(20);
    for k in 0..=20 {
        if phi.entries[k].eval_at_one() != BigInt::from(catalan(k)) {
            fails.push(format!("k={k}: phi_k(1) is not Catalan"));
        }
        if phi.entries[k].degree() != Some(phi_degree(k)) {
            fails.push(format!("k={k}: wrong degree"));
        }
    }
    for row in bk_phi_consistency(20).rows.iter().filter(|r| !r.pass) {
        fails.push(format!(
            "k={}: B_k != p^k phi_k(p^2) at exponent {:?}",
            row.k, row.first_mismatch
        ));
    }
    out.push(check("phi_k consistency", fails, "k <= 20".into()));

    let mut fails = Vec::new();
    for k in 2..=7 {
        let last = 2 * k as u32;
        let split = weighted_sum_poly_where(k, PairingClass::NonCrossing, &caps, |pairs| pairs[0] == (1, last))
            .expect("within cap");
        if split != bk.entries[k - 1].shift(2 * k as u32 - 1) {
            fails.push(format!("k={k}"));
        }
    }
    out.push(check("first point paired with last", fails, "k <= 7".into()));

    let mut fails = Vec::new();
    for k in 1..=6 {
        let oracle = weighted_sum_poly(k, PairingClass::All, &caps).expect("within cap");
        for p in sample_weights() {
            let dp = moment_exact(k, PairingClass::All, &p, &opts).expect("valid weight");
            if dp != oracle.eval_rational(&p) {
                fails.push(format!("k={k}, p={p}"));
            }
        }
    }
    out.push(check("scalar DP = enumeration", fails, "k <= 6".into()));

    let mut fails = Vec::new();
    for k in [1usize, 5, 10, 20] {
        for class in [PairingClass::All, PairingClass::NonCrossing] {
            for p in sample_weights() {
                let exact = moment_exact(k, class, &p, &opts).expect("valid weight");
                let pf = num_traits::ToPrimitive::to_f64(&p).expect("small rational");
                let log = log_moment(k, class, pf).expect("valid weight");
                let diff = (crate::scalar_moments::ln_rational(&exact) - log).abs();
                if diff > 1e-9 {
                    fails.push(format!("k={k}, {class}, p={p}: |diff| = {diff:e}"));
                }
            }
        }
    }
    out.push(check("log-space = exact", fails, "k <= 20, |ln diff| <= 1e-9".into()));

    let mut fails = Vec::new();
    let moment = moment_poly(5, PairingClass::All);
    if moment != weighted_sum_poly(5, PairingClass::All, &caps).expect("within cap") {
        fails.push("k=5 symbolic sweep".into());
    }
    if moment.eval_at_one() != BigInt::from(double_factorial_odd(5)) || moment == WeightPoly::zero() {
        fails.push("k=5 total".into());
    }
    out.push(check("scalar polynomial", fails, "k = 5".into()));

    out
}
