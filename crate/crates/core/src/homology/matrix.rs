//! Sparse matrices over a coefficient ring, rows and columns indexed by
//! generator ids.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::algebra::novikov::NovikovSeries;
use crate::algebra::ring::{Ring, RingElem};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RingMatrix {
    ring: Ring,
    rows: Vec<String>,
    cols: Vec<String>,
    entries: BTreeMap<(usize, usize), RingElem>,
}

impl RingMatrix {
    pub fn zero(ring: &Ring, rows: Vec<String>, cols: Vec<String>) -> Self {
        RingMatrix { ring: ring.clone(), rows, cols, entries: BTreeMap::new() }
    }

    pub fn identity(ring: &Ring, ids: Vec<String>) -> Self {
        let mut m = Self::zero(ring, ids.clone(), ids);
        for i in 0..m.rows.len() {
            m.entries.insert((i, i), ring.one());
        }
        m
    }

    pub fn from_entries<I>(ring: &Ring, rows: Vec<String>, cols: Vec<String>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, RingElem)>,
    {
        let mut m = Self::zero(ring, rows, cols);
        for (r, c, v) in entries {
            m.add_to(r, c, &v)?;
        }
        Ok(m)
    }

    /// Integer matrix from dense rows.
    pub fn from_int_rows(rows: Vec<String>, cols: Vec<String>, data: &[Vec<BigInt>]) -> Result<Self> {
        let mut m = Self::zero(&Ring::Integer, rows, cols);
        if data.len() != m.rows.len() || data.iter().any(|r| r.len() != m.cols.len()) {
            return Err(Error::DimensionMismatch("dense data does not match the index lists".into()));
        }
        for (i, row) in data.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                m.set(i, j, RingElem::Int(x.clone()))?;
            }
        }
        Ok(m)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn rows(&self) -> &[String] {
        &self.rows
    }

    pub fn cols(&self) -> &[String] {
        &self.cols
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn row_index(&self, id: &str) -> Option<usize> {
        self.rows.iter().position(|r| r == id)
    }

    pub fn col_index(&self, id: &str) -> Option<usize> {
        self.cols.iter().position(|c| c == id)
    }

    fn check_index(&self, r: usize, c: usize) -> Result<()> {
        if r >= self.rows.len() || c >= self.cols.len() {
            return Err(Error::DimensionMismatch(format!(
                "entry ({r}, {c}) outside a {}x{} matrix",
                self.rows.len(),
                self.cols.len()
            )));
        }
        Ok(())
    }

    pub fn set(&mut self, r: usize, c: usize, v: RingElem) -> Result<()> {
        self.check_index(r, c)?;
        if !self.ring.contains(&v) {
            return Err(Error::RingMismatch(format!("entry does not belong to {}", self.ring.name())));
        }
        if v.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), v);
        }
        Ok(())
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: &RingElem) -> Result<()> {
        let sum = match self.entries.get(&(r, c)) {
            Some(old) => old.add(v)?,
            None => v.clone(),
        };
        self.set(r, c, sum)
    }

    pub fn get(&self, r: usize, c: usize) -> Option<&RingElem> {
        self.entries.get(&(r, c))
    }

    pub fn entry(&self, r: usize, c: usize) -> RingElem {
        self.get(r, c).cloned().unwrap_or_else(|| self.ring.zero())
    }

    pub fn get_by_id(&self, row: &str, col: &str) -> Option<&RingElem> {
        self.get(self.row_index(row)?, self.col_index(col)?)
    }

    /// Nonzero entries in (row, col) order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &RingElem)> {
        self.entries.iter().map(|(&(r, c), v)| (r, c, v))
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// `self · other`.
    pub fn compose(&self, other: &RingMatrix) -> Result<RingMatrix> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(format!("{} vs {}", self.ring.name(), other.ring.name())));
        }
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "inner index lists differ ({} columns vs {} rows)",
                self.cols.len(),
                other.rows.len()
            )));
        }
        let mut by_row: BTreeMap<usize, Vec<(usize, &RingElem)>> = BTreeMap::new();
        for (&(k, j), v) in &other.entries {
            by_row.entry(k).or_default().push((j, v));
        }
        let mut out = RingMatrix::zero(&self.ring, self.rows.clone(), other.cols.clone());
        for (&(i, k), a) in &self.entries {
            if let Some(row) = by_row.get(&k) {
                for &(j, b) in row {
                    out.add_to(i, j, &a.mul(b)?)?;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &RingMatrix) -> Result<RingMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch("matrices are indexed differently".into()));
        }
        let mut out = self.clone();
        for (&(r, c), v) in &other.entries {
            out.add_to(r, c, v)?;
        }
        Ok(out)
    }

    /// Applies `f` to every stored entry, landing in `ring`.
    pub fn map_entries<F>(&self, ring: &Ring, mut f: F) -> Result<RingMatrix>
    where
        F: FnMut(&RingElem) -> Result<RingElem>,
    {
        let mut out = RingMatrix::zero(ring, self.rows.clone(), self.cols.clone());
        for (&(r, c), v) in &self.entries {
            out.set(r, c, f(v)?)?;
        }
        Ok(out)
    }

    /// Entrywise augmentation into `Z`.
    pub fn augment(&self) -> RingMatrix {
        self.map_entries(&Ring::Integer, |v| Ok(RingElem::Int(v.augment().0)))
            .expect("augmentation lands in Z")
    }

    /// Same index lists and entries agreeing to precision.
    pub fn eq_to_precision(&self, other: &RingMatrix) -> bool {
        if self.rows != other.rows || self.cols != other.cols || self.ring != other.ring {
            return false;
        }
        let keys: std::collections::BTreeSet<_> = self.entries.keys().chain(other.entries.keys()).collect();
        keys.into_iter().all(|&(r, c)| self.entry(r, c).eq_to_precision(&other.entry(r, c)))
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> RingMatrix {
        let mut out = RingMatrix::zero(
            &self.ring,
            rows.iter().map(|&r| self.rows[r].clone()).collect(),
            cols.iter().map(|&c| self.cols[c].clone()).collect(),
        );
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                if let Some(v) = self.entries.get(&(r, c)) {
                    out.entries.insert((i, j), v.clone());
                }
            }
        }
        out
    }

    pub fn to_dense_int(&self) -> Result<Vec<Vec<BigInt>>> {
        let mut out = vec![vec![BigInt::default(); self.cols.len()]; self.rows.len()];
        for (&(r, c), v) in &self.entries {
            out[r][c] = v
                .as_int()
                .cloned()
                .ok_or_else(|| Error::RingMismatch("integer matrix expected".into()))?;
        }
        Ok(out)
    }

    pub fn to_dense_series(&self) -> Result<Vec<Vec<NovikovSeries>>> {
        let precision = match &self.ring {
            Ring::Novikov { precision, .. } => *precision,
            _ => return Err(Error::RingMismatch("Novikov matrix expected".into())),
        };
        let mut out = vec![vec![NovikovSeries::zero(precision); self.cols.len()]; self.rows.len()];
        for (&(r, c), v) in &self.entries {
            out[r][c] = v.as_series().cloned().expect("Novikov ring holds series");
        }
        Ok(out)
    }

    /// One line per nonzero entry, `row, col: value`.
    pub fn render(&self) -> String {
        if self.entries.is_empty() {
            return "0".into();
        }
        self.entries
            .iter()
            .map(|(&(r, c), v)| format!("{}, {}: {}", self.rows[r], self.cols[c], self.ring.display(v)))
            .collect::<Vec<_>>()
            .join("\n")
    }
}
