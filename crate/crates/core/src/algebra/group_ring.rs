//! The integral group ring `Z[G]`: finitely supported integer combinations of
//! group elements.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::group::{same_group, DeckGroup, GroupElement, NormalForm};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct GroupRingElem {
    group: Arc<DeckGroup>,
    terms: BTreeMap<NormalForm, BigInt>,
}

impl PartialEq for GroupRingElem {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms && same_group(&self.group, &other.group)
    }
}

impl Eq for GroupRingElem {}

impl GroupRingElem {
    pub fn zero(group: &Arc<DeckGroup>) -> Self {
        GroupRingElem { group: Arc::clone(group), terms: BTreeMap::new() }
    }

    pub fn one(group: &Arc<DeckGroup>) -> Self {
        Self::monomial(&GroupElement::identity(group), BigInt::one())
    }

    pub fn monomial(g: &GroupElement, coeff: BigInt) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(g.normal_form().clone(), coeff);
        }
        GroupRingElem { group: Arc::clone(g.group()), terms }
    }

    /// Builds an element from `(element, coefficient)` pairs; repeated
    /// elements are summed and zero coefficients dropped.
    pub fn from_terms<I>(group: &Arc<DeckGroup>, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (GroupElement, BigInt)>,
    {
        let mut out = Self::zero(group);
        for (g, c) in terms {
            if !same_group(g.group(), group) {
                return Err(Error::GroupMismatch);
            }
            out.add_term(g.into_normal_form(), c);
        }
        Ok(out)
    }

    fn add_term(&mut self, nf: NormalForm, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(nf) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn group(&self) -> &Arc<DeckGroup> {
        &self.group
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn support_len(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, g: &GroupElement) -> BigInt {
        self.terms.get(g.normal_form()).cloned().unwrap_or_default()
    }

    /// Terms in normal-form order.
    pub fn terms(&self) -> impl Iterator<Item = (GroupElement, &BigInt)> + '_ {
        self.terms
            .iter()
            .map(|(nf, c)| (GroupElement::new(&self.group, nf.clone()).expect("stored normal form"), c))
    }

    fn check(&self, other: &Self) -> Result<()> {
        if same_group(&self.group, &other.group) {
            Ok(())
        } else {
            Err(Error::RingMismatch("group rings over different groups".into()))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (nf, c) in &other.terms {
            out.add_term(nf.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        GroupRingElem {
            group: Arc::clone(&self.group),
            terms: self.terms.iter().map(|(k, v)| (k.clone(), -v)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Convolution product `(sum a_g g)(sum b_h h) = sum a_g b_h gh`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = Self::zero(&self.group);
        for (g, a) in &self.terms {
            for (h, b) in &other.terms {
                out.add_term(self.group.mul_nf(g, h), a * b);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::zero(&self.group);
        }
        GroupRingElem {
            group: Arc::clone(&self.group),
            terms: self.terms.iter().map(|(g, c)| (g.clone(), c * k)).collect(),
        }
    }

    /// Left multiplication by a group element.
    pub fn left_translate(&self, h: &GroupElement) -> Result<Self> {
        if !same_group(h.group(), &self.group) {
            return Err(Error::GroupMismatch);
        }
        let mut out = Self::zero(&self.group);
        for (g, c) in &self.terms {
            out.add_term(self.group.mul_nf(h.normal_form(), g), c.clone());
        }
        Ok(out)
    }

    /// Coefficient sum; the ring map induced by `G -> 1`.
    pub fn augment(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// Only trivial units `±g` are detected.
    pub fn is_unit(&self) -> bool {
        self.terms.len() == 1 && self.terms.values().all(|c| c.abs().is_one())
    }

    pub fn unit_inverse(&self) -> Option<Self> {
        if !self.is_unit() {
            return None;
        }
        let (g, c) = self.terms.iter().next().unwrap();
        let mut terms = BTreeMap::new();
        terms.insert(self.group.inverse_nf(g), c.clone());
        Some(GroupRingElem { group: Arc::clone(&self.group), terms })
    }

    /// Pushes the element forward along a map on group elements.
    pub fn map_group<F>(&self, target: &Arc<DeckGroup>, mut f: F) -> Self
    where
        F: FnMut(&GroupElement) -> GroupElement,
    {
        let mut out = Self::zero(target);
        for (g, c) in self.terms() {
            out.add_term(f(&g).into_normal_form(), c.clone());
        }
        out
    }
}

impl fmt::Display for GroupRingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let identity = self.group.identity_nf();
        // identity first, then normal-form order
        let ordered = self
            .terms
            .iter()
            .filter(|(g, _)| **g == identity)
            .chain(self.terms.iter().filter(|(g, _)| **g != identity));
        for (i, (g, c)) in ordered.enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if negative {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if negative { " - " } else { " + " })?;
            }
            if *g == identity {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                f.write_str(&self.group.format_nf(g))?;
            } else {
                write!(f, "{mag} {}", self.group.format_nf(g))?;
            }
        }
        Ok(())
    }
}
