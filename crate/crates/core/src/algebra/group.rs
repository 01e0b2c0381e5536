//! Deck-transformation groups with decidable normal forms.
//!
//! Five kinds are supported: finite groups given by a multiplication table,
//! free abelian groups `Z^n`, free groups `F_n`, the infinite cyclic group
//! and the Klein-bottle group `<a, b | ab = b^-1 a>`. Every element is stored
//! in a canonical [`NormalForm`], so equality of elements is equality of
//! normal forms.

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Multiplication table of a finite group over named elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteTable {
    names: Vec<String>,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
}

impl FiniteTable {
    /// Validates closure, identity, inverses and associativity.
    pub fn new(names: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::InvalidGroup("finite group has no elements".into()));
        }
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                return Err(Error::InvalidGroup(format!("duplicate element name `{name}`")));
            }
        }
        if table.len() != n || table.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidGroup(format!("multiplication table must be {n}x{n}")));
        }
        if table.iter().flatten().any(|&v| v >= n) {
            return Err(Error::InvalidGroup("table entry outside the element set".into()));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        let mut inverses = Vec::with_capacity(n);
        for x in 0..n {
            let inv = (0..n)
                .find(|&y| table[x][y] == identity && table[y][x] == identity)
                .ok_or_else(|| Error::InvalidGroup(format!("`{}` has no inverse", names[x])))?;
            inverses.push(inv);
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if table[table[x][y]][z] != table[x][table[y][z]] {
                        return Err(Error::InvalidGroup(format!(
                            "table is not associative at ({}, {}, {})",
                            names[x], names[y], names[z]
                        )));
                    }
                }
            }
        }
        Ok(FiniteTable { names, table, identity, inverses })
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn product(&self, x: usize, y: usize) -> usize {
        self.table[x][y]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupKind {
    Finite(FiniteTable),
    FreeAbelian { rank: usize },
    Free { rank: usize },
    InfiniteCyclic,
    KleinBottle,
}

impl GroupKind {
    pub fn name(&self) -> &'static str {
        match self {
            GroupKind::Finite(_) => "finite",
            GroupKind::FreeAbelian { .. } => "free_abelian",
            GroupKind::Free { .. } => "free",
            GroupKind::InfiniteCyclic => "infinite_cyclic",
            GroupKind::KleinBottle => "klein_bottle",
        }
    }
}

/// Canonical encoding of a group element.
///
/// * `Finite(i)`: index into the multiplication table.
/// * `FreeAbelian(v)`: exponent vector.
/// * `Free(w)`: reduced word as syllables `(generator, exponent)` with
///   nonzero exponents and no two adjacent syllables on the same generator.
/// * `Cyclic(n)`: `t^n`.
/// * `Klein { b, a }`: `b^b a^a`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NormalForm {
    Finite(usize),
    FreeAbelian(Vec<i64>),
    Free(Vec<(usize, i64)>),
    Cyclic(i64),
    Klein { b: i64, a: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeckGroup {
    kind: GroupKind,
    generators: Vec<String>,
    // finite only: table index of each generator and a word for every element
    generator_elements: Vec<usize>,
    element_words: Vec<Vec<(usize, i64)>>,
}

fn default_names(prefix: &[&str], rank: usize) -> Vec<String> {
    if rank <= prefix.len() {
        prefix[..rank].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=rank).map(|i| format!("x{i}")).collect()
    }
}

impl DeckGroup {
    pub fn finite(table: FiniteTable, generators: Vec<String>) -> Result<Self> {
        let mut generator_elements = Vec::with_capacity(generators.len());
        for g in &generators {
            let idx = table
                .index_of(g)
                .ok_or_else(|| Error::InvalidGroup(format!("generator `{g}` is not an element")))?;
            generator_elements.push(idx);
        }
        // breadth-first words; generators get their one-letter word first
        let n = table.order();
        let mut words: Vec<Option<Vec<(usize, i64)>>> = vec![None; n];
        words[table.identity] = Some(Vec::new());
        let mut queue = VecDeque::new();
        for (gi, &el) in generator_elements.iter().enumerate() {
            if words[el].is_none() {
                words[el] = Some(vec![(gi, 1)]);
                queue.push_back(el);
            }
        }
        queue.push_front(table.identity);
        while let Some(x) = queue.pop_front() {
            for (gi, &el) in generator_elements.iter().enumerate() {
                let y = table.product(x, el);
                if words[y].is_none() {
                    let mut w = words[x].clone().unwrap();
                    push_syllable(&mut w, gi, 1);
                    words[y] = Some(w);
                    queue.push_back(y);
                }
            }
        }
        if let Some(missing) = words.iter().position(|w| w.is_none()) {
            return Err(Error::InvalidGroup(format!(
                "generators do not generate element `{}`",
                table.names[missing]
            )));
        }
        Ok(DeckGroup {
            kind: GroupKind::Finite(table),
            generators,
            generator_elements,
            element_words: words.into_iter().map(Option::unwrap).collect(),
        })
    }

    pub fn free_abelian(rank: usize, generators: Option<Vec<String>>) -> Result<Self> {
        Self::infinite(GroupKind::FreeAbelian { rank }, rank, generators, &["x", "y", "z", "w"])
    }

    pub fn free(rank: usize, generators: Option<Vec<String>>) -> Result<Self> {
        Self::infinite(GroupKind::Free { rank }, rank, generators, &["a", "b", "c", "d"])
    }

    pub fn infinite_cyclic(generator: Option<String>) -> Result<Self> {
        Self::infinite(GroupKind::InfiniteCyclic, 1, generator.map(|g| vec![g]), &["t"])
    }

    /// `<a, b | ab = b^-1 a>`; generator order is `[a, b]`.
    pub fn klein_bottle(generators: Option<Vec<String>>) -> Result<Self> {
        Self::infinite(GroupKind::KleinBottle, 2, generators, &["a", "b"])
    }

    fn infinite(
        kind: GroupKind,
        rank: usize,
        generators: Option<Vec<String>>,
        defaults: &[&str],
    ) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidGroup("rank must be positive".into()));
        }
        let generators = generators.unwrap_or_else(|| default_names(defaults, rank));
        if generators.len() != rank {
            return Err(Error::InvalidGroup(format!(
                "expected {rank} generator names, got {}",
                generators.len()
            )));
        }
        for (i, g) in generators.iter().enumerate() {
            if generators[..i].contains(g) || g.is_empty() || g == "e" || g == "1" {
                return Err(Error::InvalidGroup(format!("bad generator name `{g}`")));
            }
        }
        Ok(DeckGroup { kind, generators, generator_elements: Vec::new(), element_words: Vec::new() })
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn order(&self) -> Option<usize> {
        match &self.kind {
            GroupKind::Finite(t) => Some(t.order()),
            _ => None,
        }
    }

    pub fn is_abelian(&self) -> bool {
        match &self.kind {
            GroupKind::Finite(t) => {
                (0..t.order()).all(|x| (0..t.order()).all(|y| t.product(x, y) == t.product(y, x)))
            }
            GroupKind::FreeAbelian { .. } | GroupKind::InfiniteCyclic => true,
            GroupKind::Free { rank } => *rank == 1,
            GroupKind::KleinBottle => false,
        }
    }

    pub fn identity_nf(&self) -> NormalForm {
        match &self.kind {
            GroupKind::Finite(t) => NormalForm::Finite(t.identity),
            GroupKind::FreeAbelian { rank } => NormalForm::FreeAbelian(vec![0; *rank]),
            GroupKind::Free { .. } => NormalForm::Free(Vec::new()),
            GroupKind::InfiniteCyclic => NormalForm::Cyclic(0),
            GroupKind::KleinBottle => NormalForm::Klein { b: 0, a: 0 },
        }
    }

    pub fn generator_nf(&self, index: usize) -> NormalForm {
        assert!(index < self.generators.len(), "generator index out of range");
        match &self.kind {
            GroupKind::Finite(_) => NormalForm::Finite(self.generator_elements[index]),
            GroupKind::FreeAbelian { rank } => {
                let mut v = vec![0; *rank];
                v[index] = 1;
                NormalForm::FreeAbelian(v)
            }
            GroupKind::Free { .. } => NormalForm::Free(vec![(index, 1)]),
            GroupKind::InfiniteCyclic => NormalForm::Cyclic(1),
            GroupKind::KleinBottle => {
                if index == 0 {
                    NormalForm::Klein { b: 0, a: 1 }
                } else {
                    NormalForm::Klein { b: 1, a: 0 }
                }
            }
        }
    }

    /// Checks that `nf` has the shape of this group and returns its
    /// canonical version (free words get reduced).
    pub fn normalize(&self, nf: NormalForm) -> Result<NormalForm> {
        match (&self.kind, nf) {
            (GroupKind::Finite(t), NormalForm::Finite(i)) if i < t.order() => Ok(NormalForm::Finite(i)),
            (GroupKind::FreeAbelian { rank }, NormalForm::FreeAbelian(v)) if v.len() == *rank => {
                Ok(NormalForm::FreeAbelian(v))
            }
            (GroupKind::Free { rank }, NormalForm::Free(w)) => {
                if w.iter().any(|&(g, _)| g >= *rank) {
                    return Err(Error::InvalidElement("generator index out of range".into()));
                }
                Ok(NormalForm::Free(reduce_word(w)))
            }
            (GroupKind::InfiniteCyclic, nf @ NormalForm::Cyclic(_)) => Ok(nf),
            (GroupKind::KleinBottle, nf @ NormalForm::Klein { .. }) => Ok(nf),
            (kind, nf) => Err(Error::InvalidElement(format!(
                "{nf:?} is not an element of a {} group",
                kind.name()
            ))),
        }
    }

    pub fn mul_nf(&self, x: &NormalForm, y: &NormalForm) -> NormalForm {
        match (&self.kind, x, y) {
            (GroupKind::Finite(t), NormalForm::Finite(i), NormalForm::Finite(j)) => {
                NormalForm::Finite(t.product(*i, *j))
            }
            (GroupKind::FreeAbelian { .. }, NormalForm::FreeAbelian(u), NormalForm::FreeAbelian(v)) => {
                NormalForm::FreeAbelian(u.iter().zip(v).map(|(a, b)| a + b).collect())
            }
            (GroupKind::Free { .. }, NormalForm::Free(u), NormalForm::Free(v)) => {
                let mut w = u.clone();
                for &(g, e) in v {
                    push_syllable(&mut w, g, e);
                }
                NormalForm::Free(w)
            }
            (GroupKind::InfiniteCyclic, NormalForm::Cyclic(m), NormalForm::Cyclic(n)) => {
                NormalForm::Cyclic(m + n)
            }
            // (b^n a^m)(b^q a^p) = b^(n + (-1)^m q) a^(m + p)
            (GroupKind::KleinBottle, NormalForm::Klein { b: n, a: m }, NormalForm::Klein { b: q, a: p }) => {
                NormalForm::Klein { b: n + parity_sign(*m) * q, a: m + p }
            }
            _ => panic!("normal form does not belong to this group"),
        }
    }

    pub fn inverse_nf(&self, x: &NormalForm) -> NormalForm {
        match (&self.kind, x) {
            (GroupKind::Finite(t), NormalForm::Finite(i)) => NormalForm::Finite(t.inverses[*i]),
            (_, NormalForm::FreeAbelian(v)) => NormalForm::FreeAbelian(v.iter().map(|a| -a).collect()),
            (_, NormalForm::Free(w)) => NormalForm::Free(w.iter().rev().map(|&(g, e)| (g, -e)).collect()),
            (_, NormalForm::Cyclic(n)) => NormalForm::Cyclic(-n),
            (_, NormalForm::Klein { b, a }) => NormalForm::Klein { b: -parity_sign(*a) * b, a: -a },
            _ => panic!("normal form does not belong to this group"),
        }
    }

    pub fn pow_nf(&self, x: &NormalForm, exp: i64) -> NormalForm {
        let base = if exp < 0 { self.inverse_nf(x) } else { x.clone() };
        let mut acc = self.identity_nf();
        let mut sq = base;
        let mut e = exp.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_nf(&acc, &sq);
            }
            sq = self.mul_nf(&sq, &sq);
            e >>= 1;
        }
        acc
    }

    /// Expresses `x` as a word in the generators (for finite groups, the
    /// breadth-first word chosen at construction).
    pub fn word_of(&self, x: &NormalForm) -> Vec<(usize, i64)> {
        match x {
            NormalForm::Finite(i) => self.element_words[*i].clone(),
            NormalForm::FreeAbelian(v) => {
                v.iter().enumerate().filter(|(_, &e)| e != 0).map(|(g, &e)| (g, e)).collect()
            }
            NormalForm::Free(w) => w.clone(),
            NormalForm::Cyclic(n) if *n == 0 => Vec::new(),
            NormalForm::Cyclic(n) => vec![(0, *n)],
            NormalForm::Klein { b, a } => {
                let mut w = Vec::new();
                if *b != 0 {
                    w.push((1, *b));
                }
                if *a != 0 {
                    w.push((0, *a));
                }
                w
            }
        }
    }

    /// Every element, for finite groups.
    pub fn elements(&self) -> Option<Vec<NormalForm>> {
        match &self.kind {
            GroupKind::Finite(t) => Some((0..t.order()).map(NormalForm::Finite).collect()),
            _ => None,
        }
    }

    /// Parses a word such as `"a b^-1"`, `"b a b"` or `"t^2"`. Tokens are
    /// generator names with optional integer exponents; for finite groups any
    /// element name is accepted. `e` and `1` denote the identity.
    pub fn parse_word(&self, text: &str) -> Result<NormalForm> {
        let mut acc = self.identity_nf();
        for token in text.split(|c: char| c.is_whitespace() || c == '*' || c == '.' || c == '·') {
            if token.is_empty() {
                continue;
            }
            let (name, exp) = match token.split_once('^') {
                Some((n, e)) => {
                    let e = e.trim_start_matches('{').trim_end_matches('}');
                    let e: i64 = e
                        .parse()
                        .map_err(|_| Error::InvalidElement(format!("bad exponent in `{token}`")))?;
                    (n, e)
                }
                None => (token, 1),
            };
            let base = if let Some(i) = self.generators.iter().position(|g| g == name) {
                self.generator_nf(i)
            } else if let GroupKind::Finite(t) = &self.kind {
                match t.index_of(name) {
                    Some(i) => NormalForm::Finite(i),
                    None => return Err(Error::InvalidElement(format!("unknown element `{name}`"))),
                }
            } else if name == "e" || name == "1" {
                self.identity_nf()
            } else {
                return Err(Error::InvalidElement(format!("unknown generator `{name}`")));
            };
            acc = self.mul_nf(&acc, &self.pow_nf(&base, exp));
        }
        Ok(acc)
    }

    pub fn format_nf(&self, x: &NormalForm) -> String {
        if let (GroupKind::Finite(t), NormalForm::Finite(i)) = (&self.kind, x) {
            return t.names[*i].clone();
        }
        let word = self.word_of(x);
        if word.is_empty() {
            return "e".to_string();
        }
        word.iter()
            .map(|&(g, e)| {
                if e == 1 {
                    self.generators[g].clone()
                } else {
                    format!("{}^{}", self.generators[g], e)
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn parity_sign(m: i64) -> i64 {
    if m.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

fn push_syllable(w: &mut Vec<(usize, i64)>, g: usize, e: i64) {
    if e == 0 {
        return;
    }
    match w.last_mut() {
        Some((last_g, last_e)) if *last_g == g => {
            *last_e += e;
            if *last_e == 0 {
                w.pop();
            }
        }
        _ => w.push((g, e)),
    }
}

fn reduce_word(w: Vec<(usize, i64)>) -> Vec<(usize, i64)> {
    let mut out = Vec::with_capacity(w.len());
    for (g, e) in w {
        push_syllable(&mut out, g, e);
    }
    out
}

/// An element of a specific deck group.
#[derive(Debug, Clone)]
pub struct GroupElement {
    group: Arc<DeckGroup>,
    nf: NormalForm,
}

impl PartialEq for GroupElement {
    fn eq(&self, other: &Self) -> bool {
        self.nf == other.nf && same_group(&self.group, &other.group)
    }
}

impl Eq for GroupElement {}

pub fn same_group(a: &Arc<DeckGroup>, b: &Arc<DeckGroup>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl GroupElement {
    pub fn new(group: &Arc<DeckGroup>, nf: NormalForm) -> Result<Self> {
        let nf = group.normalize(nf)?;
        Ok(GroupElement { group: Arc::clone(group), nf })
    }

    pub fn identity(group: &Arc<DeckGroup>) -> Self {
        GroupElement { group: Arc::clone(group), nf: group.identity_nf() }
    }

    pub fn generator(group: &Arc<DeckGroup>, index: usize) -> Self {
        GroupElement { group: Arc::clone(group), nf: group.generator_nf(index) }
    }

    pub fn parse(group: &Arc<DeckGroup>, word: &str) -> Result<Self> {
        Ok(GroupElement { group: Arc::clone(group), nf: group.parse_word(word)? })
    }

    pub fn group(&self) -> &Arc<DeckGroup> {
        &self.group
    }

    pub fn normal_form(&self) -> &NormalForm {
        &self.nf
    }

    pub fn into_normal_form(self) -> NormalForm {
        self.nf
    }

    pub fn is_identity(&self) -> bool {
        self.nf == self.group.identity_nf()
    }

    pub fn inverse(&self) -> Self {
        GroupElement { group: Arc::clone(&self.group), nf: self.group.inverse_nf(&self.nf) }
    }

    pub fn pow(&self, exp: i64) -> Self {
        GroupElement { group: Arc::clone(&self.group), nf: self.group.pow_nf(&self.nf, exp) }
    }

    pub fn mul(&self, other: &GroupElement) -> Result<Self> {
        group_mul(self, other)
    }
}

/// The group law on normal forms.
pub fn group_mul(x: &GroupElement, y: &GroupElement) -> Result<GroupElement> {
    if !same_group(&x.group, &y.group) {
        return Err(Error::GroupMismatch);
    }
    Ok(GroupElement { group: Arc::clone(&x.group), nf: x.group.mul_nf(&x.nf, &y.nf) })
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.group.format_nf(&self.nf))
    }
}

/// `Z_2 + Z_2` with elements `e, a, b, ab`.
pub fn klein_four() -> DeckGroup {
    let names: Vec<String> = ["e", "a", "b", "ab"].iter().map(|s| s.to_string()).collect();
    // xor on the bit encoding e=0, a=1, b=2, ab=3
    let table = (0..4).map(|x| (0..4).map(|y| x ^ y).collect()).collect();
    let table = FiniteTable::new(names, table).expect("Z2+Z2 table is valid");
    DeckGroup::finite(table, vec!["a".into(), "b".into()]).expect("a, b generate Z2+Z2")
}
