//! Sparse univariate polynomials with arbitrary-precision integer coefficients.
//!
//! A [`WeightPoly`] stores only its non-zero terms, keyed by exponent. This is
//! the exact carrier for every moment polynomial in the crate: the weighted
//! pairing sums, the non-crossing table `B_k(p)` and the `phi_k(x)` family.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sparse polynomial `sum_e c_e x^e`. No stored coefficient is ever zero, so
/// the zero polynomial is the empty map.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct WeightPoly {
    terms: BTreeMap<u32, BigInt>,
}

impl WeightPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, BigInt::one())
    }

    /// `coeff * x^exponent`; a zero coefficient yields the zero polynomial.
    pub fn monomial(exponent: u32, coeff: impl Into<BigInt>) -> Self {
        let coeff = coeff.into();
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exponent, coeff);
        }
        Self { terms }
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs, collecting
    /// like terms and dropping zeros.
    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (u32, C)>,
        C: Into<BigInt>,
    {
        let mut poly = Self::zero();
        for (e, c) in terms {
            poly.add_term(e, c.into());
        }
        poly
    }

    /// Dense constructor: `coeffs[i]` is the coefficient of `x^i`.
    pub fn from_coeffs<C: Into<BigInt>>(coeffs: impl IntoIterator<Item = C>) -> Self {
        Self::from_terms(coeffs.into_iter().enumerate().map(|(i, c)| (i as u32, c)))
    }

    pub fn add_term(&mut self, exponent: u32, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(exponent).or_insert_with(BigInt::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&exponent);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().copied()
    }

    pub fn min_exponent(&self) -> Option<u32> {
        self.terms.keys().next().copied()
    }

    pub fn coeff(&self, exponent: u32) -> BigInt {
        self.terms.get(&exponent).cloned().unwrap_or_default()
    }

    /// Non-zero terms in ascending exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (u32, &BigInt)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Multiplies by `x^d`.
    pub fn shift(&self, d: u32) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (e + d, c.clone())).collect(),
        }
    }

    /// Substitutes `x -> x^2`.
    pub fn substitute_square(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (2 * e, c.clone())).collect(),
        }
    }

    /// Maps exponent `e` to `degree_bound - e`, i.e. `x^bound * a(1/x)`.
    pub fn reverse(&self, degree_bound: u32) -> Result<Self> {
        if let Some(degree) = self.degree() {
            if degree > degree_bound {
                return Err(Error::DegreeBoundTooSmall {
                    bound: degree_bound,
                    degree,
                });
            }
        }
        Ok(Self {
            terms: self.terms.iter().map(|(e, c)| (degree_bound - e, c.clone())).collect(),
        })
    }

    /// Sum of all coefficients, i.e. the value at `x = 1`.
    pub fn eval_at_one(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// Floating-point evaluation. Terms are accumulated in ascending exponent
    /// order, with each power obtained from the previous one by `powi` of the
    /// exponent gap, so the result is reproducible bit for bit.
    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut sum = 0.0;
        let mut power = 1.0;
        let mut last = 0u32;
        for (&e, c) in &self.terms {
            power *= x.powi((e - last) as i32);
            last = e;
            sum += c.to_f64().unwrap_or(f64::NAN) * power;
        }
        sum
    }

    /// Exact evaluation at `num / den`, returned as a reduced rational.
    pub fn eval_exact(&self, num: &BigInt, den: &BigInt) -> Result<BigRational> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(self.eval_rational(&BigRational::new(num.clone(), den.clone())))
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        let Some(degree) = self.degree() else {
            return BigRational::zero();
        };
        // sum c_e n^e d^(D-e) / d^D keeps the accumulation in integers.
        let (n, d) = (x.numer(), x.denom());
        let mut acc = BigInt::zero();
        for (&e, c) in &self.terms {
            acc += c * num_traits::pow(n.clone(), e as usize) * num_traits::pow(d.clone(), (degree - e) as usize);
        }
        BigRational::new(acc, num_traits::pow(d.clone(), degree as usize))
    }

    pub fn has_nonnegative_coeffs(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }
}

impl Add<&WeightPoly> for &WeightPoly {
    type Output = WeightPoly;

    fn add(self, rhs: &WeightPoly) -> WeightPoly {
        let mut out = self.clone();
        for (&e, c) in &rhs.terms {
            out.add_term(e, c.clone());
        }
        out
    }
}

impl Add for WeightPoly {
    type Output = WeightPoly;

    fn add(self, rhs: WeightPoly) -> WeightPoly {
        &self + &rhs
    }
}

impl Mul<&WeightPoly> for &WeightPoly {
    type Output = WeightPoly;

    fn mul(self, rhs: &WeightPoly) -> WeightPoly {
        let mut out = WeightPoly::zero();
        for (&ea, ca) in &self.terms {
            for (&eb, cb) in &rhs.terms {
                out.add_term(ea + eb, ca * cb);
            }
        }
        out
    }
}

impl Mul for WeightPoly {
    type Output = WeightPoly;

    fn mul(self, rhs: WeightPoly) -> WeightPoly {
        &self * &rhs
    }
}

impl fmt::Display for WeightPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (&e, c)) in self.terms.iter().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if i == 0 {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let mag = c.abs();
            match (e, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => f.write_str("x")?,
                (1, false) => write!(f, "{mag}x")?,
                (_, true) => write!(f, "x^{e}")?,
                (_, false) => write!(f, "{mag}x^{e}")?,
            }
        }
        Ok(())
    }
}

// JSON form: {"terms": [[exponent, "coefficient"], ...]} sorted by exponent.
// Coefficients are decimal strings because they outgrow JSON numbers.

impl Serialize for WeightPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        struct Terms<'a>(&'a BTreeMap<u32, BigInt>);

        impl Serialize for Terms<'_> {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
                for (e, c) in self.0 {
                    seq.serialize_element(&(e, c.to_string()))?;
                }
                seq.end()
            }
        }

        #[derive(Serialize)]
        struct Wire<'a> {
            terms: Terms<'a>,
        }

        Wire {
            terms: Terms(&self.terms),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for WeightPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Wire {
            terms: Vec<(u32, String)>,
        }

        let wire = Wire::deserialize(deserializer)?;
        let mut terms = BTreeMap::new();
        for (e, c) in wire.terms {
            let coeff: BigInt = c
                .parse()
                .map_err(|_| de::Error::custom(format!("bad coefficient {c:?}")))?;
            if coeff.is_zero() {
                continue;
            }
            if terms.insert(e, coeff).is_some() {
                return Err(de::Error::custom(format!("duplicate exponent {e}")));
            }
        }
        Ok(Self { terms })
    }
}
