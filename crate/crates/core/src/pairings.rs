//! Pair partitions of `{1, ..., 2k}`.
//!
//! Enumeration pairs the smallest unmatched point with each admissible larger
//! unmatched point in ascending order, which yields pairings in lexicographic
//! order of their sorted pair lists. The stream is lazy; nothing factorial in
//! size is ever materialised. These brute-force sums are the reference every
//! faster method in the crate is checked against.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{checked_catalan, checked_double_factorial_odd};
use crate::error::{Error, Result};
use crate::kernel::KernelSpec;
use crate::polynomial::WeightPoly;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairingClass {
    All,
    NonCrossing,
}

impl PairingClass {
    pub fn as_str(self) -> &'static str {
        match self {
            PairingClass::All => "all",
            PairingClass::NonCrossing => "nc",
        }
    }
}

impl fmt::Display for PairingClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PairingClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(PairingClass::All),
            "nc" | "non-crossing" | "noncrossing" => Ok(PairingClass::NonCrossing),
            other => Err(Error::InvalidArgument(format!("unknown pairing class {other:?}"))),
        }
    }
}

/// A perfect matching of `{1, ..., 2k}`: pairs `(l, m)` with `l < m`, sorted
/// by strictly increasing first element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pairing {
    pairs: Vec<(u32, u32)>,
}

impl Pairing {
    pub fn empty() -> Self {
        Self { pairs: Vec::new() }
    }

    /// Validates and normalises a list of pairs (order and orientation of the
    /// input pairs do not matter).
    pub fn new(pairs: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        let mut pairs: Vec<(u32, u32)> = pairs
            .into_iter()
            .map(|(a, b)| if a < b { (a, b) } else { (b, a) })
            .collect();
        pairs.sort_unstable();
        let n = 2 * pairs.len();
        let mut seen = vec![false; n + 1];
        for &(a, b) in &pairs {
            if a == b {
                return Err(Error::InvalidPairing(format!("point {a} paired with itself")));
            }
            for x in [a, b] {
                let idx = x as usize;
                if idx == 0 || idx > n {
                    return Err(Error::InvalidPairing(format!("point {x} outside 1..={n}")));
                }
                if std::mem::replace(&mut seen[idx], true) {
                    return Err(Error::InvalidPairing(format!("point {x} used twice")));
                }
            }
        }
        Ok(Self { pairs })
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    pub fn k(&self) -> usize {
        self.pairs.len()
    }

    /// False iff two pairs `(a, b)`, `(c, d)` interleave as `a < c < b < d`.
    pub fn is_non_crossing(&self) -> bool {
        self.pairs
            .iter()
            .enumerate()
            .all(|(i, &(a, b))| self.pairs[i + 1..].iter().all(|&(c, d)| !(a < c && c < b && b < d)))
    }

    /// `sum (m - l)` over all pairs: the exponent of `p` in the weight
    /// `prod p^|l - m|`.
    pub fn weight_exponent(&self) -> u64 {
        self.pairs.iter().map(|&(a, b)| u64::from(b - a)).sum()
    }

    pub fn weight_with(&self, kernel: &KernelSpec) -> Result<f64> {
        let mut w = 1.0;
        for &(a, b) in &self.pairs {
            w *= kernel.value_or_err((b - a) as usize)?;
        }
        Ok(w)
    }
}

impl fmt::Display for Pairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (a, b)) in self.pairs.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "({a},{b})")?;
        }
        f.write_str("}")
    }
}

/// Lazy, single-consumer stream of all pairings of a class.
pub struct PairingIter {
    class: PairingClass,
    n: u32,
    // mate[x] for x in 1..=n, 0 when unmatched
    mate: Vec<u32>,
    stack: Vec<(u32, u32)>,
    state: IterState,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum IterState {
    Fresh,
    Running,
    Done,
}

impl PairingIter {
    fn new(k: usize, class: PairingClass) -> Self {
        let n = (2 * k) as u32;
        Self {
            class,
            n,
            mate: vec![0; n as usize + 1],
            stack: Vec::with_capacity(k),
            state: IterState::Fresh,
        }
    }

    fn smallest_unmatched(&self) -> Option<u32> {
        let start = self.stack.last().map_or(1, |&(a, _)| a + 1);
        (start..=self.n).find(|&x| self.mate[x as usize] == 0)
    }

    /// Next admissible partner `b >= from` for the smallest unmatched `a`.
    fn next_partner(&self, a: u32, from: u32) -> Option<u32> {
        match self.class {
            PairingClass::All => (from..=self.n).find(|&b| self.mate[b as usize] == 0),
            PairingClass::NonCrossing => {
                // The partner must leave an even, untouched gap and must not
                // reach past an already matched point to the right of `a`.
                let mut b = from.max(a + 1);
                if (b - a).is_multiple_of(2) {
                    b += 1;
                }
                let mut x = a + 1;
                while x <= b.min(self.n) {
                    if self.mate[x as usize] != 0 {
                        return None;
                    }
                    x += 1;
                }
                (b <= self.n).then_some(b)
            }
        }
    }

    fn link(&mut self, a: u32, b: u32) {
        self.mate[a as usize] = b;
        self.mate[b as usize] = a;
        self.stack.push((a, b));
    }

    /// Extends the current partial pairing greedily; true if it completed.
    fn descend(&mut self) -> bool {
        loop {
            let Some(a) = self.smallest_unmatched() else {
                return true;
            };
            match self.next_partner(a, a + 1) {
                Some(b) => self.link(a, b),
                None => return false,
            }
        }
    }

    /// Moves to the next partial pairing in lexicographic order; false when
    /// the stream is exhausted.
    fn backtrack(&mut self) -> bool {
        while let Some((a, b)) = self.stack.pop() {
            self.mate[a as usize] = 0;
            self.mate[b as usize] = 0;
            if let Some(nb) = self.next_partner(a, b + 1) {
                self.link(a, nb);
                return true;
            }
        }
        false
    }

    fn current(&self) -> Pairing {
        Pairing {
            pairs: self.stack.clone(),
        }
    }

    /// Callback form of the stream, avoiding a clone per pairing.
    pub fn for_each_pairs(mut self, mut f: impl FnMut(&[(u32, u32)])) {
        while self.advance() {
            f(&self.stack);
        }
    }

    fn advance(&mut self) -> bool {
        let mut moved = match self.state {
            IterState::Done => return false,
            IterState::Fresh => {
                self.state = IterState::Running;
                true
            }
            IterState::Running => self.backtrack(),
        };
        while moved {
            if self.descend() {
                return true;
            }
            moved = self.backtrack();
        }
        self.state = IterState::Done;
        false
    }
}

impl Iterator for PairingIter {
    type Item = Pairing;

    fn next(&mut self) -> Option<Pairing> {
        self.advance().then(|| self.current())
    }
}

/// Streams every pairing of `2k` points in the class, in lexicographic order.
/// `k = 0` yields the single empty pairing.
pub fn enumerate(k: usize, class: PairingClass) -> PairingIter {
    PairingIter::new(k, class)
}

/// Closed-form count of the class, failing only when it exceeds `u64`.
pub fn pairing_count(k: usize, class: PairingClass) -> Result<u64> {
    match class {
        PairingClass::All => checked_double_factorial_odd(k),
        PairingClass::NonCrossing => checked_catalan(k),
    }
    .ok_or(Error::CountOverflow { k })
}

/// Upper limits on `k` for the brute-force sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationCaps {
    pub all: usize,
    pub non_crossing: usize,
}

impl Default for EnumerationCaps {
    fn default() -> Self {
        Self {
            all: 9,
            non_crossing: 14,
        }
    }
}

impl EnumerationCaps {
    pub fn cap(&self, class: PairingClass) -> usize {
        match class {
            PairingClass::All => self.all,
            PairingClass::NonCrossing => self.non_crossing,
        }
    }

    pub fn check(&self, k: usize, class: PairingClass) -> Result<()> {
        let cap = self.cap(class);
        if k > cap {
            return Err(Error::CapExceeded { class, k, cap });
        }
        Ok(())
    }
}

/// `sum_omega p^{weight_exponent(omega)}` over the class, exactly.
pub fn weighted_sum_poly(k: usize, class: PairingClass, caps: &EnumerationCaps) -> Result<WeightPoly> {
    weighted_sum_poly_where(k, class, caps, |_| true)
}

/// As [`weighted_sum_poly`], restricted to the pairings accepted by `keep`.
pub fn weighted_sum_poly_where(
    k: usize,
    class: PairingClass,
    caps: &EnumerationCaps,
    mut keep: impl FnMut(&[(u32, u32)]) -> bool,
) -> Result<WeightPoly> {
    caps.check(k, class)?;
    let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
    enumerate(k, class).for_each_pairs(|pairs| {
        if keep(pairs) {
            let e: u32 = pairs.iter().map(|&(a, b)| b - a).sum();
            *counts.entry(e).or_default() += 1;
        }
    });
    Ok(WeightPoly::from_terms(
        counts.into_iter().map(|(e, c)| (e, BigInt::from(c))),
    ))
}

/// `sum_omega prod_{(l,m)} V(m - l)` for a general kernel, in floating point.
/// Pairings are summed in stream order.
pub fn weighted_sum_general(k: usize, class: PairingClass, kernel: &KernelSpec, caps: &EnumerationCaps) -> Result<f64> {
    caps.check(k, class)?;
    let lags: Vec<f64> = (0..2 * k.max(1))
        .map(|lag| kernel.value_or_err(lag))
        .collect::<Result<_>>()?;
    let mut total = 0.0;
    enumerate(k, class).for_each_pairs(|pairs| {
        total += pairs.iter().map(|&(a, b)| lags[(b - a) as usize]).product::<f64>();
    });
    Ok(total)
}
