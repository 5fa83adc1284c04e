//! Non-crossing moment polynomials `B_k(p)` and the `phi_k(x)` family.
//!
//! Both tables come from first-arc decompositions: in a non-crossing pairing
//! the point 1 is paired with some even point `2i`, splitting the rest into
//! an inner block of `i - 1` pairs and an outer block of `k - i` pairs.
//!
//! * `B_k = sum_{i=1..k} p^(2i-1) B_{i-1} B_{k-i}`, `B_0 = 1`
//! * `phi_k = sum_{i=1..k} x^(i-1) phi_{i-1} phi_{k-i}`, `phi_0 = 1`
//!
//! and they are tied together by `B_k(p) = p^k phi_k(p^2)`.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polynomial::WeightPoly;

/// `entries[k] = B_k(p)` for `k = 0..=k_max`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BkTable {
    pub entries: Vec<WeightPoly>,
}

/// `entries[k] = phi_k(x)` for `k = 0..=k_max`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiTable {
    pub entries: Vec<WeightPoly>,
}

fn first_arc_recurrence(k_max: usize, arc_weight: impl Fn(usize) -> u32) -> Vec<WeightPoly> {
    let mut entries: Vec<WeightPoly> = Vec::with_capacity(k_max + 1);
    entries.push(WeightPoly::one());
    for k in 1..=k_max {
        let mut next = WeightPoly::zero();
        for i in 1..=k {
            let term = (&entries[i - 1] * &entries[k - i]).shift(arc_weight(i));
            next = &next + &term;
        }
        entries.push(next);
    }
    entries
}

pub fn bk_recurrence(k_max: usize) -> BkTable {
    BkTable {
        entries: first_arc_recurrence(k_max, |i| (2 * i - 1) as u32),
    }
}

pub fn phi_recurrence(k_max: usize) -> PhiTable {
    PhiTable {
        entries: first_arc_recurrence(k_max, |i| (i - 1) as u32),
    }
}

/// `k (k - 1) / 2`, the degree of `phi_k`.
pub fn phi_degree(k: usize) -> u32 {
    (k * k.saturating_sub(1) / 2) as u32
}

impl BkTable {
    pub fn k_max(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn get(&self, k: usize) -> Option<&WeightPoly> {
        self.entries.get(k)
    }
}

impl PhiTable {
    pub fn k_max(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn get(&self, k: usize) -> Option<&WeightPoly> {
        self.entries.get(k)
    }

    /// Coefficient-reversed `phi_k`, using its true degree `k(k-1)/2` as the
    /// reversal bound. This realises the `q = 1/p` relation between
    /// `phi_k` and the Carlitz-type q-Catalan polynomial.
    pub fn reversed(&self, k: usize) -> Result<WeightPoly> {
        if k == 0 {
            return Err(Error::InvalidArgument("q-Catalan reversal needs k >= 1".into()));
        }
        let phi = self
            .get(k)
            .ok_or_else(|| Error::InvalidArgument(format!("k = {k} beyond table (k_max = {})", self.k_max())))?;
        phi.reverse(phi_degree(k))
    }
}

pub fn q_catalan_reversal(k: usize) -> Result<WeightPoly> {
    phi_recurrence(k).reversed(k)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsistencyRow {
    pub k: usize,
    pub pass: bool,
    /// Smallest exponent at which `B_k` and `p^k phi_k(p^2)` differ.
    pub first_mismatch: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub rows: Vec<ConsistencyRow>,
}

impl ConsistencyReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

fn first_mismatch(a: &WeightPoly, b: &WeightPoly) -> Option<u32> {
    let mut exps: Vec<u32> = a.terms().map(|(e, _)| e).chain(b.terms().map(|(e, _)| e)).collect();
    exps.sort_unstable();
    exps.dedup();
    exps.into_iter().find(|&e| a.coeff(e) != b.coeff(e))
}

/// Compares each `B_k` with `p^k phi_k(p^2)` for the overlapping range of the
/// two tables.
pub fn consistency_report(bk: &BkTable, phi: &PhiTable) -> ConsistencyReport {
    let rows = bk
        .entries
        .iter()
        .zip(&phi.entries)
        .enumerate()
        .map(|(k, (b, f))| {
            let mapped = f.substitute_square().shift(k as u32);
            let first_mismatch = first_mismatch(b, &mapped);
            ConsistencyRow {
                k,
                pass: first_mismatch.is_none(),
                first_mismatch,
            }
        })
        .collect();
    ConsistencyReport { rows }
}

pub fn bk_phi_consistency(k_max: usize) -> ConsistencyReport {
    consistency_report(&bk_recurrence(k_max), &phi_recurrence(k_max))
}

/// Writes `k,exponent,coefficient` rows for every table entry.
pub fn write_table_csv<W: Write>(entries: &[WeightPoly], mut out: W) -> io::Result<()> {
    writeln!(out, "k,exponent,coefficient")?;
    for (k, poly) in entries.iter().enumerate() {
        for (e, c) in poly.terms() {
            writeln!(out, "{k},{e},{c}")?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::catalan;
    use num_bigint::BigInt;

    fn dense(c: &[i64]) -> WeightPoly {
        WeightPoly::from_coeffs(c.iter().copied())
    }

    #[test]
    fn bk_small_entries() {
        let t = bk_recurrence(4);
        assert_eq!(t.entries[0], WeightPoly::one());
        assert_eq!(t.entries[1], WeightPoly::monomial(1, 1));
        assert_eq!(t.entries[2], WeightPoly::from_terms([(2u32, 1), (4, 1)]));
        assert_eq!(
            t.entries[3],
            WeightPoly::from_terms([(3u32, 1), (5, 2), (7, 1), (9, 1)])
        );
        assert_eq!(t.entries[4].eval_at_one(), BigInt::from(14));
        assert_eq!(bk_recurrence(0).entries, vec![WeightPoly::one()]);
    }

    #[test]
    fn phi_small_entries() {
        let t = phi_recurrence(3);
        assert_eq!(t.entries[0], WeightPoly::one());
        assert_eq!(t.entries[1], WeightPoly::one());
        assert_eq!(t.entries[2], dense(&[1, 1]));
        assert_eq!(t.entries[3], dense(&[1, 2, 1, 1]));
    }

    #[test]
    fn reversal() {
        assert_eq!(q_catalan_reversal(1).unwrap(), WeightPoly::one());
        assert_eq!(q_catalan_reversal(2).unwrap(), dense(&[1, 1]));
        assert_eq!(q_catalan_reversal(3).unwrap(), dense(&[1, 1, 2, 1]));
        assert!(q_catalan_reversal(0).is_err());
        assert!(phi_recurrence(2).reversed(3).is_err());
    }

    #[test]
    fn table_invariants() {
        let bk = bk_recurrence(20);
        let phi = phi_recurrence(20);
        for k in 0..=20 {
            let c = BigInt::from(catalan(k));
            assert_eq!(bk.entries[k].eval_at_one(), c);
            assert_eq!(phi.entries[k].eval_at_one(), c);
            assert_eq!(phi.entries[k].degree(), Some(phi_degree(k)));
            assert_eq!(bk.entries[k].min_exponent(), Some(k as u32));
            assert_eq!(bk.entries[k].degree(), Some((k * k) as u32));
        }
    }

    #[test]
    fn consistency_passes_and_detects_mismatch() {
        let report = bk_phi_consistency(12);
        assert_eq!(report.rows.len(), 13);
        assert!(report.all_pass());

        // The literal p * phi_k(p^2) form fails from k = 2 on.
        let bk = bk_recurrence(3);
        let phi = phi_recurrence(3);
        let literal = phi.entries[2].substitute_square().shift(1);
        assert_eq!(first_mismatch(&bk.entries[2], &literal), Some(1));

        let mut broken = bk.clone();
        broken.entries[3].add_term(7, BigInt::from(1));
        let report = consistency_report(&broken, &phi);
        assert!(!report.all_pass());
        assert_eq!(report.rows[3].first_mismatch, Some(7));
    }

    #[test]
    fn csv_rows() {
        let mut buf = Vec::new();
        write_table_csv(&bk_recurrence(2).entries, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "k,exponent,coefficient\n0,0,1\n1,1,1\n2,2,1\n2,4,1\n"
        );
    }
}
