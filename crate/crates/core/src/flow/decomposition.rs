//! Morse decompositions on the base, their lifted connecting-orbit data,
//! and the checks that make the data usable.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use super::poset::Poset;
use crate::algebra::group::{same_group, DeckGroup, GroupElement, GroupKind};
use crate::algebra::ring::Regime;
use crate::error::{Error, Result};
use crate::homology::complex::GradedModule;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub id: String,
    pub degree: i32,
}

/// A Morse set with the generators of its homology Conley index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorseSet {
    pub id: String,
    pub generators: Vec<Generator>,
    pub evenly_covered: bool,
    pub index_trivial: bool,
}

impl MorseSet {
    pub fn new(id: &str, generators: &[(&str, i32)]) -> Self {
        MorseSet {
            id: id.to_string(),
            generators: generators.iter().map(|&(g, k)| Generator { id: g.to_string(), degree: k }).collect(),
            evenly_covered: true,
            index_trivial: false,
        }
    }

    pub fn generator(&self, id: &str) -> Option<&Generator> {
        self.generators.iter().find(|g| g.id == id)
    }
}

/// One signed lifted connecting orbit: from generator `from_gen` of the
/// repeller's base lift to generator `to_gen` of the attractor lift
/// translated by `label`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitRecord {
    pub from_set: String,
    pub from_gen: String,
    pub to_set: String,
    pub to_gen: String,
    pub label: GroupElement,
    pub coeff: BigInt,
}

impl OrbitRecord {
    pub fn new(from: (&str, &str), to: (&str, &str), label: GroupElement, coeff: i64) -> Self {
        OrbitRecord {
            from_set: from.0.to_string(),
            from_gen: from.1.to_string(),
            to_set: to.0.to_string(),
            to_gen: to.1.to_string(),
            label,
            coeff: BigInt::from(coeff),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MorseDecomposition {
    group: Arc<DeckGroup>,
    regime: Regime,
    sets: Vec<MorseSet>,
    orbits: Vec<OrbitRecord>,
    poset: Poset,
    base_lift: GroupElement,
}

/// The order generated by the orbits: `π < π′` whenever some orbit runs
/// from `π′` down to `π`, closed transitively.
pub fn flow_order(set_ids: &[String], orbits: &[OrbitRecord]) -> Result<Poset> {
    let idx = |s: &str| {
        set_ids
            .iter()
            .position(|x| x == s)
            .ok_or_else(|| Error::InvalidDecomposition(format!("orbit refers to unknown Morse set '{s}'")))
    };
    let mut rel = Vec::new();
    for o in orbits {
        rel.push((idx(&o.to_set)?, idx(&o.from_set)?));
    }
    Poset::new(set_ids.to_vec(), &rel)
}

impl MorseDecomposition {
    /// Validates sets and records and derives the flow order. With `order`
    /// given (pairs `(lower, upper)`), that order is used instead, provided
    /// every orbit runs downward in it.
    pub fn new(
        group: &Arc<DeckGroup>,
        regime: Regime,
        sets: Vec<MorseSet>,
        orbits: Vec<OrbitRecord>,
        order: Option<&[(String, String)]>,
    ) -> Result<Self> {
        let mut ids = BTreeSet::new();
        let mut owner: BTreeMap<&str, (&str, i32)> = BTreeMap::new();
        for s in &sets {
            if !ids.insert(s.id.as_str()) {
                return Err(Error::InvalidDecomposition(format!("Morse set '{}' is declared twice", s.id)));
            }
            if !s.evenly_covered {
                return Err(Error::InvalidDecomposition(format!("Morse set '{}' is not evenly covered", s.id)));
            }
            if s.generators.is_empty() && !s.index_trivial {
                return Err(Error::InvalidDecomposition(format!(
                    "Morse set '{}' has no index generators and is not declared index-trivial",
                    s.id
                )));
            }
            for g in &s.generators {
                if owner.insert(g.id.as_str(), (s.id.as_str(), g.degree)).is_some() {
                    return Err(Error::InvalidDecomposition(format!("generator id '{}' is used twice", g.id)));
                }
            }
        }
        for (n, o) in orbits.iter().enumerate() {
            let at = |side: &str, set: &str, gen: &str| -> Result<i32> {
                match owner.get(gen) {
                    Some(&(s, k)) if s == set => Ok(k),
                    Some(&(s, _)) => Err(Error::InvalidDecomposition(format!(
                        "orbit {n}: {side} generator '{gen}' belongs to '{s}', not '{set}'"
                    ))),
                    None => Err(Error::InvalidDecomposition(format!("orbit {n}: unknown {side} generator '{gen}'"))),
                }
            };
            let k = at("source", &o.from_set, &o.from_gen)?;
            let j = at("target", &o.to_set, &o.to_gen)?;
            if o.from_set == o.to_set {
                return Err(Error::InvalidDecomposition(format!("orbit {n} starts and ends in '{}'", o.from_set)));
            }
            if j != k - 1 {
                return Err(Error::InvalidDecomposition(format!(
                    "orbit {n}: degree drop must be exactly 1 (found {k} to {j})"
                )));
            }
            if o.coeff.is_zero() {
                return Err(Error::InvalidDecomposition(format!("orbit {n} has coefficient 0")));
            }
            if !same_group(o.label.group(), group) {
                return Err(Error::GroupMismatch);
            }
        }
        let set_ids: Vec<String> = sets.iter().map(|s| s.id.clone()).collect();
        let flow = flow_order(&set_ids, &orbits)?;
        let poset = match order {
            None => flow,
            Some(pairs) => {
                let idx = |s: &str| {
                    set_ids
                        .iter()
                        .position(|x| x == s)
                        .ok_or_else(|| Error::InvalidDecomposition(format!("order refers to unknown Morse set '{s}'")))
                };
                let rel = pairs.iter().map(|(a, b)| Ok((idx(a)?, idx(b)?))).collect::<Result<Vec<_>>>()?;
                let given = Poset::new(set_ids.clone(), &rel)?;
                if let Some((a, b)) = flow.relations().into_iter().find(|&(a, b)| !given.less(a, b)) {
                    return Err(Error::NotAdmissible(format!(
                        "orbits run from '{}' to '{}' but the supplied order does not put '{}' below '{}'",
                        set_ids[b], set_ids[a], set_ids[a], set_ids[b]
                    )));
                }
                given
            }
        };
        Ok(MorseDecomposition {
            group: Arc::clone(group),
            regime,
            sets,
            orbits,
            poset,
            base_lift: GroupElement::identity(group),
        })
    }

    pub fn group(&self) -> &Arc<DeckGroup> {
        &self.group
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn sets(&self) -> &[MorseSet] {
        &self.sets
    }

    pub fn set(&self, id: &str) -> Option<&MorseSet> {
        self.sets.iter().find(|s| s.id == id)
    }

    pub fn orbits(&self) -> &[OrbitRecord] {
        &self.orbits
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    /// The lift `h R̃` the labels are measured from.
    pub fn base_lift(&self) -> &GroupElement {
        &self.base_lift
    }

    pub fn with_base_lift(mut self, h: GroupElement) -> Result<Self> {
        if !same_group(h.group(), &self.group) {
            return Err(Error::GroupMismatch);
        }
        self.base_lift = h;
        Ok(self)
    }

    /// Morse set owning a generator.
    pub fn owner(&self, gen: &str) -> Option<&MorseSet> {
        self.sets.iter().find(|s| s.generator(gen).is_some())
    }

    /// Every generator, graded; ids sorted within each degree.
    pub fn module(&self) -> GradedModule {
        let mut map: BTreeMap<i32, Vec<String>> = BTreeMap::new();
        for s in &self.sets {
            for g in &s.generators {
                map.entry(g.degree).or_default().push(g.id.clone());
            }
        }
        for v in map.values_mut() {
            v.sort();
        }
        GradedModule::new(map).expect("generator ids were checked on construction")
    }

    /// Whether the two Morse sets are adjacent in the order.
    pub fn adjacent(&self, a: &str, b: &str) -> bool {
        match (self.poset.index_of(a), self.poset.index_of(b)) {
            (Some(a), Some(b)) => self.poset.adjacent(a, b),
            _ => false,
        }
    }

    /// Records running from `repeller` to `attractor`, in input order.
    pub fn records(&self, repeller: &str, attractor: &str) -> Vec<&OrbitRecord> {
        self.orbits.iter().filter(|o| o.from_set == repeller && o.to_set == attractor).collect()
    }

    /// Pairs `(repeller, attractor)` that carry records, in order of first
    /// appearance.
    pub fn connected_pairs(&self) -> Vec<(String, String)> {
        let mut seen = Vec::new();
        for o in &self.orbits {
            let p = (o.from_set.clone(), o.to_set.clone());
            if !seen.contains(&p) {
                seen.push(p);
            }
        }
        seen
    }
}

/// The records `C_g(R, A)` sharing one label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bucket {
    pub label: GroupElement,
    pub records: Vec<OrbitRecord>,
}

/// Splits the records of a pair by label, buckets in normal-form order.
pub fn classify_orbits(d: &MorseDecomposition, pair: (&str, &str)) -> Vec<Bucket> {
    let mut map: BTreeMap<_, Bucket> = BTreeMap::new();
    for o in d.records(pair.0, pair.1) {
        map.entry(o.label.normal_form().clone())
            .or_insert_with(|| Bucket { label: o.label.clone(), records: Vec::new() })
            .records
            .push(o.clone());
    }
    map.into_values().collect()
}

/// Left translation by `h`: every label `g` becomes `hg` and the base lift
/// moves from `b` to `hb`.
pub fn translate_decomposition(d: &MorseDecomposition, h: &GroupElement) -> Result<MorseDecomposition> {
    if !same_group(h.group(), &d.group) {
        return Err(Error::GroupMismatch);
    }
    let mut out = d.clone();
    for o in &mut out.orbits {
        o.label = h.mul(&o.label)?;
    }
    out.base_lift = h.mul(&d.base_lift)?;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BucketSummary {
    pub label: String,
    pub records: usize,
    pub signed_count: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairReport {
    pub pair: (String, String),
    pub adjacent: bool,
    pub buckets: Vec<BucketSummary>,
    /// Smallest label in the group order (ordered groups only).
    pub min_label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegimeReport {
    pub regime: String,
    pub group: String,
    pub pairs: Vec<PairReport>,
    pub advisories: Vec<String>,
    pub violations: Vec<String>,
}

impl RegimeReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the group kind against the regime and summarizes every pair
/// carrying records. Records between non-adjacent sets are violations.
pub fn validate_regime(d: &MorseDecomposition) -> Result<RegimeReport> {
    let kind = d.group.kind();
    let ordered = matches!(kind, GroupKind::InfiniteCyclic | GroupKind::FreeAbelian { .. });
    match d.regime {
        Regime::H1 if !matches!(kind, GroupKind::Finite(_)) => {
            return Err(Error::UnsupportedRegime(format!("H1 needs a finite group, got {}", kind.name())));
        }
        Regime::H2 if !ordered => {
            return Err(Error::UnsupportedRegime(format!(
                "H2 needs an ordered group (infinite_cyclic or free_abelian), got {}",
                kind.name()
            )));
        }
        _ => {}
    }
    let mut advisories = Vec::new();
    if d.regime == Regime::H3 {
        advisories.push(
            "H3: coefficients are taken in Z[G]; finitely many labels per pair is assumed of the input".to_string(),
        );
    }
    let mut violations = Vec::new();
    let mut pairs = Vec::new();
    for (r, a) in d.connected_pairs() {
        let adjacent = d.adjacent(&r, &a);
        if !adjacent {
            violations.push(format!("records run from '{r}' to '{a}', which are not adjacent"));
        }
        let buckets = classify_orbits(d, (&r, &a));
        let min_label = if d.regime == Regime::H2 { buckets.first().map(|b| b.label.to_string()) } else { None };
        let buckets = buckets
            .iter()
            .map(|b| BucketSummary {
                label: b.label.to_string(),
                records: b.records.len(),
                signed_count: b.records.iter().map(|o| &o.coeff).sum::<BigInt>().to_string(),
            })
            .collect();
        pairs.push(PairReport { pair: (r, a), adjacent, buckets, min_label });
    }
    Ok(RegimeReport {
        regime: d.regime.to_string(),
        group: kind.name().to_string(),
        pairs,
        advisories,
        violations,
    })
}
