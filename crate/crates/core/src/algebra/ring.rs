//! Coefficient rings: `Z`, `Z[G]` and `Z((t))`, behind one element type.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::group::{same_group, DeckGroup, GroupElement, GroupKind, NormalForm};
use super::group_ring::GroupRingElem;
use super::novikov::NovikovSeries;
use crate::error::{Error, Result};

/// How `Z((G))` is realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Regime {
    /// Finite `G`: the group ring.
    H1,
    /// Ordered `G` with well-ordered label sets: formal series.
    H2,
    /// General `G` with finitely many labels per pair: the group ring.
    H3,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::H1 => "H1",
            Regime::H2 => "H2",
            Regime::H3 => "H3",
        }
    }

    pub fn parse(s: &str) -> Option<Regime> {
        match s.trim().to_ascii_uppercase().replace('-', "").as_str() {
            "H1" => Some(Regime::H1),
            "H2" => Some(Regime::H2),
            "H3" => Some(Regime::H3),
            _ => None,
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub enum Ring {
    Integer,
    GroupRing(Arc<DeckGroup>),
    Novikov { variable: String, precision: usize },
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Ring::Integer, Ring::Integer) => true,
            (Ring::GroupRing(a), Ring::GroupRing(b)) => same_group(a, b),
            (Ring::Novikov { variable: a, .. }, Ring::Novikov { variable: b, .. }) => a == b,
            _ => false,
        }
    }
}

impl Ring {
    /// `Z((G))` for the given group and regime. The Novikov ring is used
    /// exactly for the infinite cyclic group under H2; every other accepted
    /// combination is a group ring.
    pub fn for_group(group: &Arc<DeckGroup>, regime: Regime, precision: usize) -> Self {
        match (group.kind(), regime) {
            (GroupKind::InfiniteCyclic, Regime::H2) => {
                Ring::Novikov { variable: group.generators()[0].clone(), precision }
            }
            _ => Ring::GroupRing(Arc::clone(group)),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Ring::Integer => "Z".into(),
            Ring::GroupRing(g) => match g.kind() {
                GroupKind::Finite(t) => format!("Z[finite group of order {}]", t.order()),
                kind => format!("Z[{}]", kind.name()),
            },
            Ring::Novikov { variable, .. } => format!("Z(({variable}))"),
        }
    }

    pub fn zero(&self) -> RingElem {
        match self {
            Ring::Integer => RingElem::Int(BigInt::zero()),
            Ring::GroupRing(g) => RingElem::Group(GroupRingElem::zero(g)),
            Ring::Novikov { precision, .. } => RingElem::Series(NovikovSeries::zero(*precision)),
        }
    }

    pub fn one(&self) -> RingElem {
        match self {
            Ring::Integer => RingElem::Int(BigInt::one()),
            Ring::GroupRing(g) => RingElem::Group(GroupRingElem::one(g)),
            Ring::Novikov { precision, .. } => RingElem::Series(NovikovSeries::one(*precision)),
        }
    }

    pub fn integer(&self, c: BigInt) -> RingElem {
        match self {
            Ring::Integer => RingElem::Int(c),
            Ring::GroupRing(g) => RingElem::Group(GroupRingElem::monomial(&GroupElement::identity(g), c)),
            Ring::Novikov { precision, .. } => RingElem::Series(NovikovSeries::monomial(c, 0, *precision)),
        }
    }

    /// `coeff · g` as a ring element.
    pub fn embed(&self, g: &GroupElement, coeff: BigInt) -> Result<RingElem> {
        match self {
            Ring::Integer => Ok(RingElem::Int(coeff)),
            Ring::GroupRing(group) => {
                if !same_group(group, g.group()) {
                    return Err(Error::GroupMismatch);
                }
                Ok(RingElem::Group(GroupRingElem::monomial(g, coeff)))
            }
            Ring::Novikov { precision, .. } => match g.normal_form() {
                NormalForm::Cyclic(n) => Ok(RingElem::Series(NovikovSeries::monomial(coeff, *n, *precision))),
                _ => Err(Error::RingMismatch("Novikov coefficients need infinite cyclic labels".into())),
            },
        }
    }

    /// Checks that `x` lives in this ring.
    pub fn contains(&self, x: &RingElem) -> bool {
        match (self, x) {
            (Ring::Integer, RingElem::Int(_)) => true,
            (Ring::GroupRing(g), RingElem::Group(y)) => same_group(g, y.group()),
            (Ring::Novikov { .. }, RingElem::Series(_)) => true,
            _ => false,
        }
    }

    pub fn display(&self, x: &RingElem) -> String {
        match (self, x) {
            (Ring::Novikov { variable, .. }, RingElem::Series(s)) => s.display_with(variable),
            _ => x.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RingElem {
    Int(BigInt),
    Group(GroupRingElem),
    Series(NovikovSeries),
}

fn mismatch() -> Error {
    Error::RingMismatch("operands live in different coefficient rings".into())
}

impl RingElem {
    pub fn add(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (RingElem::Int(a), RingElem::Int(b)) => Ok(RingElem::Int(a + b)),
            (RingElem::Group(a), RingElem::Group(b)) => Ok(RingElem::Group(a.add(b)?)),
            (RingElem::Series(a), RingElem::Series(b)) => Ok(RingElem::Series(a.add(b))),
            _ => Err(mismatch()),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        match self {
            RingElem::Int(a) => RingElem::Int(-a),
            RingElem::Group(a) => RingElem::Group(a.neg()),
            RingElem::Series(a) => RingElem::Series(a.neg()),
        }
    }

    /// Ring product: convolution in `Z[G]`, relative-precision product in `Z((t))`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (RingElem::Int(a), RingElem::Int(b)) => Ok(RingElem::Int(a * b)),
            (RingElem::Group(a), RingElem::Group(b)) => Ok(RingElem::Group(a.mul(b)?)),
            (RingElem::Series(a), RingElem::Series(b)) => Ok(RingElem::Series(a.mul(b))),
            _ => Err(mismatch()),
        }
    }

    /// Zero, or zero to precision for series.
    pub fn is_zero(&self) -> bool {
        match self {
            RingElem::Int(a) => a.is_zero(),
            RingElem::Group(a) => a.is_zero(),
            RingElem::Series(a) => a.is_zero(),
        }
    }

    /// Coefficient sum, with an exactness flag (always `true` off the
    /// Novikov ring).
    pub fn augment(&self) -> (BigInt, bool) {
        match self {
            RingElem::Int(a) => (a.clone(), true),
            RingElem::Group(a) => (a.augment(), true),
            RingElem::Series(a) => {
                let aug = a.augment();
                (aug.value, aug.exact)
            }
        }
    }

    pub fn is_unit(&self) -> bool {
        match self {
            RingElem::Int(a) => a.abs().is_one(),
            RingElem::Group(a) => a.is_unit(),
            RingElem::Series(a) => a.is_unit(),
        }
    }

    pub fn unit_inverse(&self) -> Option<Self> {
        match self {
            RingElem::Int(a) if a.abs().is_one() => Some(RingElem::Int(a.clone())),
            RingElem::Int(_) => None,
            RingElem::Group(a) => a.unit_inverse().map(RingElem::Group),
            RingElem::Series(a) => a.unit_inverse().map(RingElem::Series),
        }
    }

    /// Equality, to precision for series.
    pub fn eq_to_precision(&self, other: &Self) -> bool {
        match (self, other) {
            (RingElem::Series(a), RingElem::Series(b)) => a.eq_to_precision(b),
            _ => self == other,
        }
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            RingElem::Int(a) => Some(a),
            _ => None,
        }
    }

    pub fn as_series(&self) -> Option<&NovikovSeries> {
        match self {
            RingElem::Series(a) => Some(a),
            _ => None,
        }
    }

    pub fn as_group_ring(&self) -> Option<&GroupRingElem> {
        match self {
            RingElem::Group(a) => Some(a),
            _ => None,
        }
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingElem::Int(a) => write!(f, "{a}"),
            RingElem::Group(a) => write!(f, "{a}"),
            RingElem::Series(a) => write!(f, "{a}"),
        }
    }
}

/// `ring_mul` with the ring check spelled out.
pub fn ring_mul(x: &RingElem, y: &RingElem) -> Result<RingElem> {
    x.mul(y)
}

/// `augment` as a free function: the coefficient sum.
pub fn augment(x: &RingElem) -> BigInt {
    x.augment().0
}
