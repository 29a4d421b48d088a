//! Entropies of rational distributions, exact where possible and otherwise
//! bracketed rigorously and floored to a dyadic grid.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::rational::{floor_to_dyadic, is_dyadic, Rational};

/// `rational + Σ coeff[p] · log2(p)` over odd primes `p`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LogLinear {
    pub rational: Rational,
    pub logs: BTreeMap<u64, Rational>,
}

impl LogLinear {
    pub fn zero() -> Self {
        LogLinear {
            rational: Rational::zero(),
            logs: BTreeMap::new(),
        }
    }

    /// Adds `weight · log2(n)`.
    pub fn add_log2(&mut self, n: u64, weight: &Rational) {
        for (p, e) in factor(n) {
            let w = weight * Rational::from_integer(BigInt::from(e));
            if p == 2 {
                self.rational += w;
            } else {
                let slot = self.logs.entry(p).or_insert_with(Rational::zero);
                *slot += w;
            }
        }
        self.logs.retain(|_, v| !v.is_zero());
    }

    pub fn add_scaled(&mut self, other: &LogLinear, scale: &Rational) {
        self.rational += &other.rational * scale;
        for (p, c) in &other.logs {
            let slot = self.logs.entry(*p).or_insert_with(Rational::zero);
            *slot += c * scale;
        }
        self.logs.retain(|_, v| !v.is_zero());
    }

    /// Exact value when no irrational logarithm survives.
    pub fn exact(&self) -> Option<&Rational> {
        self.logs.is_empty().then_some(&self.rational)
    }

    /// Largest multiple of `2^-bits` not above the value; the exact value
    /// itself when that is already dyadic.
    pub fn floor_dyadic(&self, bits: u32) -> Rational {
        if let Some(v) = self.exact() {
            return if is_dyadic(v) {
                v.clone()
            } else {
                floor_to_dyadic(v, bits)
            };
        }
        // log2 of distinct primes and 1 are rationally independent, so the
        // value is irrational and never sits on a grid point; refinement ends.
        let mut terms = bits as usize / 3 + 8;
        loop {
            let (lo, hi) = self.bounds(terms);
            let (flo, fhi) = (floor_to_dyadic(&lo, bits), floor_to_dyadic(&hi, bits));
            if flo == fhi {
                return flo;
            }
            terms *= 2;
        }
    }

    /// Rigorous enclosure using `terms` series terms per logarithm.
    pub fn bounds(&self, terms: usize) -> (Rational, Rational) {
        let ln2 = ln_interval_mantissa(&Rational::from_integer(BigInt::from(2)), terms);
        let mut lo = self.rational.clone();
        let mut hi = self.rational.clone();
        for (p, c) in &self.logs {
            let (l, h) = log2_interval(*p, &ln2, terms);
            if c.is_positive() {
                lo += c * &l;
                hi += c * &h;
            } else {
                lo += c * &h;
                hi += c * &l;
            }
        }
        (lo, hi)
    }
}

fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Bounds on `ln(m)` for `m` in `[1, 2]` via `2·atanh((m-1)/(m+1))`.
fn ln_interval_mantissa(m: &Rational, terms: usize) -> (Rational, Rational) {
    let one = Rational::one();
    let t = (m - &one) / (m + &one);
    let t2 = &t * &t;
    let mut power = t.clone();
    let mut sum = Rational::zero();
    for k in 0..terms {
        sum += &power / Rational::from_integer(BigInt::from(2 * k + 1));
        power *= &t2;
    }
    // tail ≤ t^(2n+1) / ((2n+1)(1 - t²))
    let tail = &power / (Rational::from_integer(BigInt::from(2 * terms + 1)) * (&one - &t2));
    let two = Rational::from_integer(BigInt::from(2));
    (&sum * &two, (sum + tail) * two)
}

fn log2_interval(n: u64, ln2: &(Rational, Rational), terms: usize) -> (Rational, Rational) {
    let e = 63 - n.leading_zeros();
    let mantissa = Rational::new(BigInt::from(n), BigInt::one() << e);
    let (lm, hm) = ln_interval_mantissa(&mantissa, terms);
    let base = Rational::from_integer(BigInt::from(e));
    (&base + lm / &ln2.1, base + hm / &ln2.0)
}

/// Entropy in bits of a distribution whose probabilities have small
/// numerators and denominators.
pub fn entropy(probabilities: impl IntoIterator<Item = Rational>) -> LogLinear {
    let mut h = LogLinear::zero();
    for p in probabilities {
        if p.is_zero() {
            continue;
        }
        let num = p.numer().to_u64().expect("probability numerator fits u64");
        let den = p.denom().to_u64().expect("probability denominator fits u64");
        // -p log p = p log den - p log num
        h.add_log2(den, &p);
        h.add_log2(num, &-p.clone());
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{ratio, to_f64};

    #[test]
    fn dyadic_entropies_are_exact() {
        let h = entropy([ratio(1, 4), ratio(1, 2), ratio(1, 4)]);
        assert_eq!(h.exact(), Some(&ratio(3, 2)));
        assert_eq!(h.floor_dyadic(24), ratio(3, 2));
    }

    #[test]
    fn binomial3_entropy_brackets_float_value() {
        let h = entropy([ratio(1, 8), ratio(3, 8), ratio(3, 8), ratio(1, 8)]);
        assert!(h.exact().is_none());
        let truth = 3.0 - 0.75 * 3f64.log2();
        let (lo, hi) = h.bounds(20);
        assert!(to_f64(&lo) <= truth + 1e-15 && truth - 1e-15 <= to_f64(&hi));
        assert!(to_f64(&(hi - lo)) < 1e-15);
        let f = h.floor_dyadic(24);
        assert!(to_f64(&f) <= truth);
        assert!(truth - to_f64(&f) < 2f64.powi(-24));
    }

    #[test]
    fn uniform_ternary_is_log2_3() {
        let third = ratio(1, 3);
        let h = entropy([third.clone(), third.clone(), third]);
        assert_eq!(h.logs.get(&3), Some(&ratio(1, 1)));
        let v = to_f64(&h.floor_dyadic(30));
        assert!((v - 3f64.log2()).abs() < 1e-9);
    }

    #[test]
    fn factoring() {
        assert_eq!(factor(12), vec![(2, 2), (3, 1)]);
        assert_eq!(factor(1), vec![]);
        assert_eq!(factor(97), vec![(97, 1)]);
    }
}
