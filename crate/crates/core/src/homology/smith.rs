//! Smith normal form over a Euclidean ring.
//!
//! The same elimination runs over `Z` and over the Novikov ring. Pivots are
//! chosen with the smallest Euclidean norm, ties broken by (row, col); rows
//! are cleared before columns; a divisibility pass enforces `d_i | d_{i+1}`.

use num_bigint::BigInt;
use num_traits::{Euclid, One, Signed, Zero};

use crate::algebra::novikov::NovikovSeries;
use crate::error::{Error, Result};

pub trait Euclidean: Clone {
    fn is_zero(&self) -> bool;
    fn norm(&self) -> BigInt;
    fn divmod(&self, den: &Self) -> Result<(Self, Self)>;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn is_unit(&self) -> bool;
    /// `(c, u)` with `u` a unit and `c = u·self` the canonical associate.
    fn canonical(&self) -> (Self, Self);
}

impl Euclidean for BigInt {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn norm(&self) -> BigInt {
        self.abs()
    }

    fn divmod(&self, den: &Self) -> Result<(Self, Self)> {
        if Zero::is_zero(den) {
            return Err(Error::DivisionByZero);
        }
        Ok((self.div_euclid(den), self.rem_euclid(den)))
    }

    fn add(&self, other: &Self) -> Self {
        self + other
    }

    fn sub(&self, other: &Self) -> Self {
        self - other
    }

    fn mul(&self, other: &Self) -> Self {
        self * other
    }

    fn is_unit(&self) -> bool {
        self.abs().is_one()
    }

    fn canonical(&self) -> (Self, Self) {
        if self.is_negative() {
            (-self, -BigInt::one())
        } else {
            (self.clone(), BigInt::one())
        }
    }
}

impl Euclidean for NovikovSeries {
    fn is_zero(&self) -> bool {
        NovikovSeries::is_zero(self)
    }

    fn norm(&self) -> BigInt {
        NovikovSeries::norm(self)
    }

    fn divmod(&self, den: &Self) -> Result<(Self, Self)> {
        NovikovSeries::divmod(self, den)
    }

    fn add(&self, other: &Self) -> Self {
        NovikovSeries::add(self, other)
    }

    fn sub(&self, other: &Self) -> Self {
        NovikovSeries::sub(self, other)
    }

    fn mul(&self, other: &Self) -> Self {
        NovikovSeries::mul(self, other)
    }

    fn is_unit(&self) -> bool {
        NovikovSeries::is_unit(self)
    }

    fn canonical(&self) -> (Self, Self) {
        self.associate_form()
    }
}


/// `d = u · a · v`, `d` diagonal with `d_i | d_{i+1}`.
#[derive(Debug, Clone)]
pub struct Smith<T> {
    pub u: Vec<Vec<T>>,
    pub d: Vec<Vec<T>>,
    pub v: Vec<Vec<T>>,
    /// The nonzero diagonal entries, canonical up to units.
    pub divisors: Vec<T>,
}

impl<T> Smith<T> {
    pub fn rank(&self) -> usize {
        self.divisors.len()
    }
}

struct Work<T> {
    d: Vec<Vec<T>>,
    u: Vec<Vec<T>>,
    v: Vec<Vec<T>>,
    track: bool,
}

impl<T: Euclidean> Work<T> {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.d.swap(i, j);
        if self.track {
            self.u.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for row in &mut self.d {
            row.swap(i, j);
        }
        if self.track {
            for row in &mut self.v {
                row.swap(i, j);
            }
        }
    }

    /// row_i -= q · row_t
    fn row_sub(&mut self, i: usize, t: usize, q: &T) {
        let src = self.d[t].clone();
        for (x, y) in self.d[i].iter_mut().zip(&src) {
            *x = x.sub(&q.mul(y));
        }
        if self.track {
            let src = self.u[t].clone();
            for (x, y) in self.u[i].iter_mut().zip(&src) {
                *x = x.sub(&q.mul(y));
            }
        }
    }

    /// col_j -= q · col_t
    fn col_sub(&mut self, j: usize, t: usize, q: &T) {
        for row in &mut self.d {
            row[j] = row[j].sub(&row[t].mul(q));
        }
        if self.track {
            for row in &mut self.v {
                row[j] = row[j].sub(&row[t].mul(q));
            }
        }
    }

    fn row_add(&mut self, t: usize, i: usize) {
        let src = self.d[i].clone();
        for (x, y) in self.d[t].iter_mut().zip(&src) {
            *x = x.add(y);
        }
        if self.track {
            let src = self.u[i].clone();
            for (x, y) in self.u[t].iter_mut().zip(&src) {
                *x = x.add(y);
            }
        }
    }

    fn row_scale(&mut self, i: usize, s: &T) {
        for x in &mut self.d[i] {
            *x = s.mul(x);
        }
        if self.track {
            for x in &mut self.u[i] {
                *x = s.mul(x);
            }
        }
    }
}

fn smallest(cands: impl Iterator<Item = (usize, usize, BigInt)>) -> Option<(usize, usize)> {
    cands.min_by(|a, b| a.2.cmp(&b.2).then((a.0, a.1).cmp(&(b.0, b.1)))).map(|(i, j, _)| (i, j))
}

fn identity<T: Clone>(n: usize, zero: &T, one: &T) -> Vec<Vec<T>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { one.clone() } else { zero.clone() }).collect()).collect()
}

/// Smith reduction of an `m × n` matrix. `zero` and `one` fix the ring
/// (and, for series, the working precision). With `track = false` the
/// transforms are left empty.
pub fn smith_reduce<T: Euclidean>(
    a: &[Vec<T>],
    m: usize,
    n: usize,
    zero: &T,
    one: &T,
    track: bool,
) -> Result<Smith<T>> {
    if a.len() != m || a.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch(format!("expected a {m}x{n} matrix")));
    }
    let mut w = Work {
        d: a.to_vec(),
        u: if track { identity(m, zero, one) } else { Vec::new() },
        v: if track { identity(n, zero, one) } else { Vec::new() },
        track,
    };
    let mut t = 0;
    while t < m.min(n) {
        let Some((pi, pj)) = smallest(
            (t..m).flat_map(|i| (t..n).map(move |j| (i, j))).filter_map(|(i, j)| {
                let x = &w.d[i][j];
                (!x.is_zero()).then(|| (i, j, x.norm()))
            }),
        ) else {
            break;
        };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        loop {
            let pivot = w.d[t][t].clone();
            for i in t + 1..m {
                if !w.d[i][t].is_zero() {
                    let (q, _) = w.d[i][t].divmod(&pivot)?;
                    w.row_sub(i, t, &q);
                }
            }
            for j in t + 1..n {
                if !w.d[t][j].is_zero() {
                    let (q, _) = w.d[t][j].divmod(&pivot)?;
                    w.col_sub(j, t, &q);
                }
            }
            let leftover = smallest(
                (t + 1..m)
                    .map(|i| (i, t))
                    .chain((t + 1..n).map(|j| (t, j)))
                    .filter(|&(i, j)| !w.d[i][j].is_zero()).map(|(i, j)| (i, j, w.d[i][j].norm())),
            );
            if let Some((i, j)) = leftover {
                if j == t {
                    w.swap_rows(t, i);
                } else {
                    w.swap_cols(t, j);
                }
                continue;
            }
            let mut offender = None;
            'scan: for i in t + 1..m {
                for j in t + 1..n {
                    if !w.d[i][j].is_zero() && !w.d[i][j].divmod(&pivot)?.1.is_zero() {
                        offender = Some(i);
                        break 'scan;
                    }
                }
            }
            match offender {
                Some(i) => w.row_add(t, i),
                None => break,
            }
        }
        t += 1;
    }
    let mut divisors = Vec::new();
    for i in 0..m.min(n) {
        if w.d[i][i].is_zero() {
            break;
        }
        let (c, unit) = w.d[i][i].canonical();
        w.row_scale(i, &unit);
        divisors.push(c);
    }
    Ok(Smith { u: w.u, d: w.d, v: w.v, divisors })
}

/// `(U, D, V)` for an integer matrix.
pub fn smith_normal_form(a: &[Vec<BigInt>], m: usize, n: usize) -> Smith<BigInt> {
    smith_reduce(a, m, n, &BigInt::zero(), &BigInt::one(), true).expect("integer reduction cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    fn mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>], inner: usize, cols: usize) -> Vec<Vec<BigInt>> {
        a.iter()
            .map(|row| (0..cols).map(|j| (0..inner).map(|k| &row[k] * &b[k][j]).sum()).collect())
            .collect()
    }

    fn check(a: Vec<Vec<BigInt>>, m: usize, n: usize, expect: &[i64]) {
        let s = smith_normal_form(&a, m, n);
        let left = mul(&s.u, &a, m, n);
        assert_eq!(mul(&left, &s.v, n, n), s.d);
        let diag: Vec<BigInt> = expect.iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(s.divisors, diag);
    }

    #[test]
    fn diag_two_three() {
        check(mat(&[&[2, 0], &[0, 3]]), 2, 2, &[1, 6]);
    }

    #[test]
    fn two_by_two() {
        check(mat(&[&[2, 4], &[6, 8]]), 2, 2, &[2, 4]);
    }

    #[test]
    fn zero_matrix() {
        check(mat(&[&[0, 0, 0], &[0, 0, 0]]), 2, 3, &[]);
    }

    #[test]
    fn negative_pivots_are_normalized() {
        check(mat(&[&[-4, 0], &[0, -6]]), 2, 2, &[2, 12]);
    }

    #[test]
    fn series_unit_divisor() {
        let p = 32;
        let x = NovikovSeries::laurent(0, vec![BigInt::one(), BigInt::zero(), -BigInt::one()], p);
        let s = smith_reduce(&[vec![x.clone()], vec![NovikovSeries::zero(p)]], 2, 1, &NovikovSeries::zero(p), &NovikovSeries::one(p), false)
            .unwrap();
        assert_eq!(s.rank(), 1);
        assert!(s.divisors[0].is_unit());
    }

    #[test]
    fn series_pair_reduces_to_gcd() {
        let p = 16;
        let two = NovikovSeries::monomial(BigInt::from(2), 3, p);
        let three = NovikovSeries::monomial(BigInt::from(3), 0, p);
        let s = smith_reduce(&[vec![two, three]], 1, 2, &NovikovSeries::zero(p), &NovikovSeries::one(p), false).unwrap();
        assert_eq!(s.rank(), 1);
        assert!(s.divisors[0].is_unit());
    }
}
