//! Truncated Laurent series over `Z`: the Novikov ring `Z((t))`.
//!
//! A series stores the window of coefficients for the exponents
//! `min_degree .. min_degree + precision`. Two flavours share the type:
//!
//! * exact series are Laurent polynomials; every coefficient outside the
//!   window is zero;
//! * truncated series are known only below their horizon
//!   `min_degree + precision`; everything at or above it is unknown.
//!
//! Arithmetic follows relative-precision rules: products keep the smaller
//! relative precision, sums keep the smaller horizon. Equality "to
//! precision" compares only the coefficients both operands know.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Euclid, One, Signed, Zero};

use crate::error::{Error, Result};

/// Retained exponents when nothing else is configured.
pub const DEFAULT_PRECISION: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NovikovSeries {
    min_degree: i64,
    coeffs: Vec<BigInt>,
    exact: bool,
}

/// Result of collapsing `t` to `1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Augmentation {
    pub value: BigInt,
    /// `false` when the input was truncated, so the sum covers only the
    /// retained coefficients.
    pub exact: bool,
}

fn strip_leading(min_degree: i64, coeffs: &[BigInt]) -> Option<(i64, &[BigInt])> {
    let first = coeffs.iter().position(|c| !c.is_zero())?;
    Some((min_degree + first as i64, &coeffs[first..]))
}

impl NovikovSeries {
    /// Exact zero.
    pub fn zero(precision: usize) -> Self {
        let precision = precision.max(1);
        NovikovSeries { min_degree: 0, coeffs: vec![BigInt::zero(); precision], exact: true }
    }

    pub fn one(precision: usize) -> Self {
        Self::monomial(BigInt::one(), 0, precision)
    }

    pub fn monomial(coeff: BigInt, exponent: i64, precision: usize) -> Self {
        Self::laurent(exponent, vec![coeff], precision)
    }

    /// The exact Laurent polynomial `sum coeffs[i] t^(min_degree + i)`.
    /// The retained window is widened to cover every nonzero term.
    pub fn laurent(min_degree: i64, coeffs: Vec<BigInt>, precision: usize) -> Self {
        let precision = precision.max(1);
        match strip_leading(min_degree, &coeffs) {
            None => Self::zero(precision),
            Some((lead, rest)) => {
                let last = rest.iter().rposition(|c| !c.is_zero()).unwrap();
                let mut window = rest[..=last].to_vec();
                if window.len() < precision {
                    window.resize(precision, BigInt::zero());
                }
                NovikovSeries { min_degree: lead, coeffs: window, exact: true }
            }
        }
    }

    /// Exact polynomial from `(exponent, coefficient)` pairs.
    pub fn from_terms<I>(terms: I, precision: usize) -> Self
    where
        I: IntoIterator<Item = (i64, BigInt)>,
    {
        let terms: Vec<(i64, BigInt)> = terms.into_iter().collect();
        if terms.is_empty() {
            return Self::zero(precision);
        }
        let lo = terms.iter().map(|(e, _)| *e).min().unwrap();
        let hi = terms.iter().map(|(e, _)| *e).max().unwrap();
        let mut coeffs = vec![BigInt::zero(); (hi - lo + 1) as usize];
        for (e, c) in terms {
            coeffs[(e - lo) as usize] += c;
        }
        Self::laurent(lo, coeffs, precision)
    }

    /// A series known only on the window `min_degree .. min_degree + coeffs.len()`.
    /// Leading zeros are absorbed into `min_degree`, shrinking the window.
    pub fn truncated(min_degree: i64, coeffs: Vec<BigInt>) -> Self {
        assert!(!coeffs.is_empty(), "a truncated series needs at least one known coefficient");
        match strip_leading(min_degree, &coeffs) {
            None => NovikovSeries { min_degree, coeffs, exact: false },
            Some((lead, rest)) => NovikovSeries { min_degree: lead, coeffs: rest.to_vec(), exact: false },
        }
    }

    pub fn min_degree(&self) -> i64 {
        self.min_degree
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Number of retained exponents.
    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// First unknown exponent, `None` for exact series.
    pub fn horizon(&self) -> Option<i64> {
        if self.exact {
            None
        } else {
            Some(self.min_degree + self.coeffs.len() as i64)
        }
    }

    /// Zero to precision: every retained coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_exact_zero(&self) -> bool {
        self.exact && self.is_zero()
    }

    /// Leading coefficient `a_{n(λ)}`, zero for zero.
    pub fn leading_coeff(&self) -> BigInt {
        if self.is_zero() {
            BigInt::zero()
        } else {
            self.coeffs[0].clone()
        }
    }

    /// Euclidean function `ν(λ) = |a_{n(λ)}|`.
    pub fn norm(&self) -> BigInt {
        self.leading_coeff().abs()
    }

    /// Lower bound for the true valuation.
    fn valuation_bound(&self) -> i64 {
        if self.is_zero() {
            self.horizon().unwrap_or(i64::MAX / 4)
        } else {
            self.min_degree
        }
    }

    /// The coefficient at `k`, or `None` when `k` lies at or above the horizon.
    pub fn coeff(&self, k: i64) -> Option<BigInt> {
        if let Some(h) = self.horizon() {
            if k >= h {
                return None;
            }
        }
        if k < self.min_degree {
            return Some(BigInt::zero());
        }
        Some(self.coeffs.get((k - self.min_degree) as usize).cloned().unwrap_or_default())
    }

    fn known(&self, k: i64) -> BigInt {
        self.coeff(k).expect("coefficient requested above the horizon")
    }

    /// Exponent one past the last nonzero coefficient (exact series only).
    fn span_end(&self) -> i64 {
        match self.coeffs.iter().rposition(|c| !c.is_zero()) {
            Some(i) => self.min_degree + i as i64 + 1,
            None => self.min_degree,
        }
    }

    /// Keeps at most `precision` exponents from `min_degree` on.
    pub fn with_precision(&self, precision: usize) -> Self {
        let precision = precision.max(1);
        if self.exact {
            if self.is_zero() {
                return Self::zero(precision);
            }
            let span = (self.span_end() - self.min_degree) as usize;
            if span <= precision {
                let mut coeffs = self.coeffs[..span].to_vec();
                coeffs.resize(precision, BigInt::zero());
                return NovikovSeries { min_degree: self.min_degree, coeffs, exact: true };
            }
            return NovikovSeries {
                min_degree: self.min_degree,
                coeffs: self.coeffs[..precision].to_vec(),
                exact: false,
            };
        }
        if precision >= self.coeffs.len() {
            return self.clone();
        }
        NovikovSeries {
            min_degree: self.min_degree,
            coeffs: self.coeffs[..precision].to_vec(),
            exact: false,
        }
    }

    pub fn neg(&self) -> Self {
        NovikovSeries {
            min_degree: self.min_degree,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            exact: self.exact,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_exact_zero() {
            return other.clone();
        }
        if other.is_exact_zero() {
            return self.clone();
        }
        if self.exact && other.exact {
            let lo = self.min_degree.min(other.min_degree);
            let hi = self.span_end().max(other.span_end());
            let coeffs = (lo..hi).map(|k| self.known(k) + other.known(k)).collect();
            return Self::laurent(lo, coeffs, self.precision().min(other.precision()));
        }
        let horizon = match (self.horizon(), other.horizon()) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => unreachable!(),
        };
        let lo = self.min_degree.min(other.min_degree);
        let coeffs = (lo..horizon).map(|k| self.known(k) + other.known(k)).collect();
        Self::truncated(lo, coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let precision = self.precision().min(other.precision());
        if self.is_exact_zero() || other.is_exact_zero() {
            return Self::zero(precision);
        }
        if self.exact && other.exact {
            let (a, b) = (self.nonzero_span(), other.nonzero_span());
            let mut coeffs = vec![BigInt::zero(); a.len() + b.len() - 1];
            for (i, x) in a.iter().enumerate() {
                for (j, y) in b.iter().enumerate() {
                    coeffs[i + j] += x * y;
                }
            }
            return Self::laurent(self.min_degree + other.min_degree, coeffs, precision);
        }
        let relative = match (self.exact, other.exact) {
            (false, false) => precision,
            (false, true) => self.precision(),
            (true, false) => other.precision(),
            (true, true) => unreachable!(),
        };
        if self.is_zero() || other.is_zero() {
            // O(t^h) times something of valuation >= v is O(t^(h + v))
            let horizon = self.valuation_bound() + other.valuation_bound();
            return Self::truncated(horizon - relative as i64, vec![BigInt::zero(); relative]);
        }
        let coeffs = (0..relative)
            .map(|k| {
                let mut acc = BigInt::zero();
                for i in 0..=k {
                    let x = self.coeffs.get(i);
                    let y = other.coeffs.get(k - i);
                    if let (Some(x), Some(y)) = (x, y) {
                        acc += x * y;
                    }
                }
                acc
            })
            .collect();
        Self::truncated(self.min_degree + other.min_degree, coeffs)
    }

    fn nonzero_span(&self) -> &[BigInt] {
        let len = (self.span_end() - self.min_degree) as usize;
        &self.coeffs[..len.max(1)]
    }

    /// Multiplication by `t^n`.
    pub fn shift(&self, n: i64) -> Self {
        if self.is_exact_zero() {
            return self.clone();
        }
        NovikovSeries { min_degree: self.min_degree + n, coeffs: self.coeffs.clone(), exact: self.exact }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        self.mul(&Self::monomial(k.clone(), 0, self.precision()))
    }

    /// `self == other` on every coefficient both operands know.
    pub fn eq_to_precision(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }

    /// Units of `Z((t))` are exactly the series with leading coefficient ±1.
    pub fn is_unit(&self) -> bool {
        !self.is_zero() && self.coeffs[0].abs().is_one()
    }

    /// Inverse of a unit, carried to this series' precision.
    pub fn unit_inverse(&self) -> Option<Self> {
        if !self.is_unit() {
            return None;
        }
        let c0 = self.coeffs[0].clone();
        if self.exact && self.span_end() == self.min_degree + 1 {
            return Some(Self::monomial(c0, -self.min_degree, self.precision()));
        }
        let p = self.precision();
        let mut inv: Vec<BigInt> = Vec::with_capacity(p);
        inv.push(c0.clone());
        for k in 1..p {
            let mut acc = BigInt::zero();
            for i in 1..=k {
                if let Some(c) = self.coeffs.get(i) {
                    acc += c * &inv[k - i];
                }
            }
            inv.push(-(&c0 * acc));
        }
        Some(Self::truncated(-self.min_degree, inv))
    }

    /// Euclidean division `num = q·den + r` with `r = 0` or `ν(r) < ν(den)`.
    ///
    /// The quotient is built one monomial at a time; each leading remainder
    /// coefficient is divided by the leading coefficient of `den` with the
    /// non-negative remainder. The loop stops at the first non-divisible
    /// head, when the remainder vanishes exactly, or when the working
    /// precision is used up (in which case `r` is zero to precision).
    pub fn divmod(&self, den: &Self) -> Result<(Self, Self)> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let precision = self.precision().min(den.precision());
        if self.is_zero() {
            return Ok((Self::zero(precision), self.clone()));
        }
        let both_exact = self.exact && den.exact;
        let n = den.min_degree;
        let c = den.coeffs[0].clone();
        let m = self.min_degree;
        let bound = if both_exact {
            m + precision as i64
        } else {
            let mut h = self.horizon().unwrap_or(i64::MAX);
            if !den.exact {
                h = h.min(m + den.precision() as i64);
            }
            h
        };
        let den_window: Vec<BigInt> = if den.exact {
            den.nonzero_span().to_vec()
        } else {
            den.coeffs.clone()
        };
        // remainder over exponents m .. m + rem.len()
        let mut rem: Vec<BigInt> = if both_exact {
            let len = (self.span_end() - m).max(bound - m + den_window.len() as i64) as usize;
            (0..len as i64).map(|i| self.known(m + i)).collect()
        } else {
            (m..bound).map(|k| self.known(k)).collect()
        };
        let mut quotient: Vec<BigInt> = Vec::new();
        let mut k = m;
        let mut stopped_early = false;
        while k < bound {
            let idx = (k - m) as usize;
            if both_exact && rem[idx..].iter().all(Zero::is_zero) {
                stopped_early = true;
                break;
            }
            let a = rem[idx].clone();
            let (qk, r0) = (a.div_euclid(&c), a.rem_euclid(&c));
            if !qk.is_zero() {
                for (j, d) in den_window.iter().enumerate() {
                    if let Some(slot) = rem.get_mut(idx + j) {
                        *slot -= &qk * d;
                    }
                }
            }
            quotient.push(qk);
            if !r0.is_zero() {
                stopped_early = true;
                break;
            }
            k += 1;
        }
        let q_min = m - n;
        if both_exact {
            if stopped_early {
                return Ok((Self::laurent(q_min, quotient, precision), Self::laurent(m, rem, precision)));
            }
            let r = Self::truncated(bound - precision as i64, vec![BigInt::zero(); precision]);
            return Ok((Self::truncated(q_min, padded(quotient)), r));
        }
        let r = Self::truncated(m, rem);
        if stopped_early {
            Ok((Self::laurent(q_min, quotient, precision), r))
        } else {
            Ok((Self::truncated(q_min, padded(quotient)), r))
        }
    }

    /// Collapses `t` to `1`.
    pub fn augment(&self) -> Augmentation {
        Augmentation { value: self.coeffs.iter().sum(), exact: self.exact }
    }

    /// Associate normal form: shifted to `min_degree = 0` with positive
    /// leading coefficient `c`, and every later coefficient reduced into
    /// `0..c`. Units normalize to `1`.
    pub fn canonical_associate(&self) -> Self {
        self.associate_form().0
    }

    /// The normal form together with a unit `u` such that `self * u` equals
    /// it to precision.
    pub fn associate_form(&self) -> (Self, Self) {
        let p = self.precision();
        if self.is_zero() {
            return (self.clone(), Self::one(p));
        }
        if let Some(inv) = self.unit_inverse() {
            return (Self::one(p), inv);
        }
        let sign = if self.coeffs[0].is_negative() { -BigInt::one() } else { BigInt::one() };
        let mut unit = Self::monomial(sign, -self.min_degree, p);
        let mut s = self.mul(&unit);
        let c0 = s.coeffs[0].clone();
        if s.exact && s.coeffs.iter().all(|c| (c % &c0).is_zero()) {
            // c0 times a unit polynomial
            let w = Self::laurent(0, s.coeffs.iter().map(|c| c / &c0).collect(), p);
            let inv = w.unit_inverse().expect("leading coefficient is 1");
            return (Self::monomial(c0, 0, p), unit.mul(&inv));
        }
        for k in 1..p.min(s.coeffs.len()) {
            let q = s.coeffs[k].div_euclid(&c0);
            if q.is_zero() {
                continue;
            }
            let mut step = vec![BigInt::zero(); k + 1];
            step[0] = BigInt::one();
            step[k] = -q;
            let f = Self::laurent(0, step, p);
            s = s.mul(&f).with_precision(p);
            unit = unit.mul(&f).with_precision(p);
        }
        (s, unit)
    }

    /// The substitution `t -> t^-1`; defined on Laurent polynomials only.
    pub fn reflect(&self) -> Result<Self> {
        if !self.exact {
            return Err(Error::InsufficientPrecision(
                "t -> t^-1 does not map a truncated series into Z((t))".into(),
            ));
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        let span = self.nonzero_span();
        let coeffs: Vec<BigInt> = span.iter().rev().cloned().collect();
        let lo = -(self.span_end() - 1);
        Ok(Self::laurent(lo, coeffs, self.precision()))
    }

    pub fn display_with(&self, var: &str) -> String {
        let mut out = String::new();
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let k = self.min_degree + i as i64;
            let negative = c.is_negative();
            let mag = c.abs();
            if first {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            first = false;
            let power = match k {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{k}"),
            };
            if power.is_empty() {
                out.push_str(&mag.to_string());
            } else if mag.is_one() {
                out.push_str(&power);
            } else {
                out.push_str(&format!("{mag}{power}"));
            }
        }
        if first {
            out.push('0');
        }
        if let Some(h) = self.horizon() {
            out.push_str(&format!(" + O({var}^{h})"));
        }
        out
    }
}

fn padded(mut v: Vec<BigInt>) -> Vec<BigInt> {
    if v.is_empty() {
        v.push(BigInt::zero());
    }
    v
}

impl fmt::Display for NovikovSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with("t"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(min: i64, c: &[i64]) -> NovikovSeries {
        NovikovSeries::laurent(min, c.iter().map(|&x| BigInt::from(x)).collect(), DEFAULT_PRECISION)
    }

    fn series(min: i64, c: &[i64]) -> NovikovSeries {
        NovikovSeries::truncated(min, c.iter().map(|&x| BigInt::from(x)).collect())
    }

    #[test]
    fn one_minus_t_times_geometric_series() {
        let geometric = series(0, &[1; 32]);
        let prod = poly(0, &[1, -1]).mul(&geometric);
        assert!(prod.eq_to_precision(&NovikovSeries::one(32)));
        assert_eq!(prod.precision(), 32);
        assert_eq!(prod.horizon(), Some(32));
    }

    #[test]
    fn unit_inverse_of_one_minus_t_squared() {
        let x = poly(0, &[1, 0, -1]);
        assert!(x.is_unit());
        let inv = x.unit_inverse().unwrap();
        for k in 0..32 {
            let expected = if k % 2 == 0 { 1 } else { 0 };
            assert_eq!(inv.coeff(k), Some(BigInt::from(expected)), "k = {k}");
        }
        assert!(x.mul(&inv).eq_to_precision(&NovikovSeries::one(32)));
        assert!(!poly(0, &[2]).is_unit());
    }

    #[test]
    fn monomial_units_invert_exactly() {
        let x = poly(3, &[-1]);
        let inv = x.unit_inverse().unwrap();
        assert!(inv.is_exact());
        assert_eq!(x.mul(&inv), NovikovSeries::one(32));
    }

    #[test]
    fn display_forms() {
        assert_eq!(poly(0, &[1, 0, -1]).to_string(), "1 - t^2");
        assert_eq!(poly(-2, &[-1, 0, 1]).to_string(), "-t^-2 + 1");
        assert_eq!(poly(0, &[2, 1]).to_string(), "2 + t");
        assert_eq!(NovikovSeries::zero(4).to_string(), "0");
        assert_eq!(series(0, &[1, 1]).to_string(), "1 + t + O(t^2)");
    }

    #[test]
    fn augmentation() {
        let a = poly(0, &[1, 0, -1]).augment();
        assert_eq!(a, Augmentation { value: BigInt::zero(), exact: true });
        assert_eq!(NovikovSeries::zero(8).augment().value, BigInt::zero());
        assert!(!series(0, &[1, 1, 1]).augment().exact);
    }

    #[test]
    fn divmod_by_unit() {
        let (q, r) = NovikovSeries::one(8).divmod(&poly(0, &[1, -1]).with_precision(8)).unwrap();
        assert_eq!(q.precision(), 8);
        for k in 0..8 {
            assert_eq!(q.coeff(k), Some(BigInt::one()));
        }
        assert!(r.is_zero());
        assert!(!q.is_exact());
    }

    #[test]
    fn divmod_stops_at_non_divisible_head() {
        let num = poly(0, &[2, 1]);
        let den = poly(0, &[3]);
        let (q, r) = num.divmod(&den).unwrap();
        assert!(q.is_exact_zero());
        assert_eq!(r, num);
        assert!(r.norm() < den.norm());
    }

    #[test]
    fn divmod_self() {
        let x = poly(-1, &[3, 5, -7]);
        let (q, r) = x.divmod(&x).unwrap();
        assert_eq!(q, NovikovSeries::one(32));
        assert!(r.is_exact_zero());
    }

    #[test]
    fn divmod_by_zero() {
        assert_eq!(poly(0, &[1]).divmod(&NovikovSeries::zero(4)), Err(Error::DivisionByZero));
    }

    #[test]
    fn cancellation_loses_relative_precision() {
        let x = series(0, &[1, 1, 1, 1]);
        let y = series(0, &[1, 0, 0, 0]);
        let d = x.sub(&y);
        assert_eq!(d.min_degree(), 1);
        assert_eq!(d.precision(), 3);
        assert_eq!(d.horizon(), Some(4));
    }

    #[test]
    fn truncated_zero_times_series() {
        let z = NovikovSeries::truncated(0, vec![BigInt::zero(); 4]);
        let p = z.mul(&poly(2, &[5]));
        assert!(p.is_zero());
        assert_eq!(p.horizon(), Some(6));
    }

    #[test]
    fn reflection() {
        assert_eq!(poly(0, &[1, 0, -1]).reflect().unwrap(), poly(-2, &[-1, 0, 1]));
        assert!(series(0, &[1, 1]).reflect().is_err());
    }

    #[test]
    fn canonical_associates() {
        // 2 - t = (2 + t + t^2 + ...)(1 - t)
        let c = poly(3, &[-2, 1]).canonical_associate();
        assert!(!c.is_exact() && c.eq_to_precision(&NovikovSeries::truncated(0, [2, 1, 1, 1].map(BigInt::from).to_vec())));
        assert_eq!(poly(0, &[4, 4]).canonical_associate(), poly(0, &[4]));
        assert_eq!(poly(-1, &[-1, 5]).canonical_associate(), poly(0, &[1]));
        let x = poly(2, &[-3, 7, 1]);
        let (c, u) = x.associate_form();
        assert!(u.is_unit());
        assert!(x.mul(&u).eq_to_precision(&c));
        assert!(c.coeffs()[1..].iter().all(|k| !k.is_negative() && k < &BigInt::from(3)));
    }

    #[test]
    fn with_precision_truncates_exact_series() {
        let x = poly(0, &[1, 2, 3, 4]);
        let t = x.with_precision(2);
        assert!(!t.is_exact());
        assert_eq!(t.horizon(), Some(2));
        assert!(x.with_precision(4).is_exact());
    }
}
