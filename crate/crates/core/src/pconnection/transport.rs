//! Group isomorphisms and the ring isomorphisms they induce on `N∆`.

use std::sync::Arc;

use crate::algebra::group::{same_group, DeckGroup, GroupElement, GroupKind, NormalForm};
use crate::algebra::ring::{Ring, RingElem};
use crate::error::{Error, Result};
use crate::flow::decomposition::MorseDecomposition;

use super::assembly::PConnectionMatrix;

/// An isomorphism `G₁ → G₂` given by the images of the generators of `G₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupIso {
    source: Arc<DeckGroup>,
    target: Arc<DeckGroup>,
    images: Vec<GroupElement>,
    inverse_images: Vec<GroupElement>,
}

/// Evaluates the homomorphism fixed by `images` on `g`.
fn evaluate(images: &[GroupElement], target: &Arc<DeckGroup>, g: &GroupElement) -> Result<GroupElement> {
    let mut acc = GroupElement::identity(target);
    for (i, e) in g.group().word_of(g.normal_form()) {
        acc = acc.mul(&images[i].pow(e))?;
    }
    Ok(acc)
}

fn check_homomorphism(source: &Arc<DeckGroup>, target: &Arc<DeckGroup>, images: &[GroupElement]) -> Result<()> {
    if images.len() != source.generators().len() {
        return Err(Error::NotHomomorphism(format!(
            "{} generator images given for {} generators",
            images.len(),
            source.generators().len()
        )));
    }
    if images.iter().any(|g| !same_group(g.group(), target)) {
        return Err(Error::GroupMismatch);
    }
    let fail = |what: String| Err(Error::NotHomomorphism(what));
    match source.kind() {
        GroupKind::Finite(_) => {
            let elements: Vec<GroupElement> = source
                .elements()
                .unwrap()
                .into_iter()
                .map(|nf| GroupElement::new(source, nf))
                .collect::<Result<_>>()?;
            for x in &elements {
                for y in &elements {
                    let lhs = evaluate(images, target, &x.mul(y)?)?;
                    let rhs = evaluate(images, target, x)?.mul(&evaluate(images, target, y)?)?;
                    if lhs != rhs {
                        return fail(format!("the images of {x} and {y} do not multiply like {x}·{y}"));
                    }
                }
            }
        }
        GroupKind::FreeAbelian { rank } => {
            for i in 0..*rank {
                for j in i + 1..*rank {
                    if images[i].mul(&images[j])? != images[j].mul(&images[i])? {
                        return fail(format!(
                            "images of {} and {} do not commute",
                            source.generators()[i],
                            source.generators()[j]
                        ));
                    }
                }
            }
        }
        GroupKind::KleinBottle => {
            let (a, b) = (&images[0], &images[1]);
            if a.mul(b)? != b.inverse().mul(a)? {
                return fail("the images of a and b violate ab = b^-1 a".into());
            }
        }
        GroupKind::Free { .. } | GroupKind::InfiniteCyclic => {}
    }
    Ok(())
}

fn not_bijective(what: &str) -> Error {
    Error::NotBijective(what.to_string())
}

/// Determinant and adjugate of a small integer matrix (cofactor expansion).
fn det(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    if n == 1 {
        return m[0][0] as i128;
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<i64>> =
                m[1..].iter().map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect()).collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * m[0][j] as i128 * det(&minor)
        })
        .sum()
}

fn unimodular_inverse(m: &[Vec<i64>]) -> Option<Vec<Vec<i64>>> {
    let n = m.len();
    let d = det(m);
    if d != 1 && d != -1 {
        return None;
    }
    let mut inv = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<i64>> = m
                .iter()
                .enumerate()
                .filter(|&(r, _)| r != j)
                .map(|(_, row)| row.iter().enumerate().filter(|&(c, _)| c != i).map(|(_, &x)| x).collect())
                .collect();
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            inv[i][j] = i64::try_from(sign * det(&minor) * d).ok()?;
        }
    }
    Some(inv)
}

/// Stallings folding of the petals spelled by `images` (words in the
/// target free group). Every edge carries a word in the source generators
/// so that along any closed path at the base the carried word maps to the
/// path label. If the graph folds to the rose, the loop words are the
/// images of an inverse.
fn fold_free(source: &Arc<DeckGroup>, rank: usize, images: &[GroupElement]) -> Option<Vec<NormalForm>> {
    #[derive(Clone)]
    struct Edge {
        from: usize,
        to: usize,
        letter: usize,
        carried: NormalForm,
    }
    let mut edges: Vec<Option<Edge>> = Vec::new();
    let mut vertices = 1usize;
    for (i, img) in images.iter().enumerate() {
        let letters: Vec<(usize, bool)> = match img.normal_form() {
            NormalForm::Free(w) => w
                .iter()
                .flat_map(|&(g, e)| std::iter::repeat_n((g, e > 0), e.unsigned_abs() as usize))
                .collect(),
            _ => return None,
        };
        if letters.is_empty() {
            continue;
        }
        let mut at = 0;
        for (k, &(g, positive)) in letters.iter().enumerate() {
            let next = if k + 1 == letters.len() {
                0
            } else {
                vertices += 1;
                vertices - 1
            };
            let carried = if k == 0 { source.generator_nf(i) } else { source.identity_nf() };
            let edge = if positive {
                Edge { from: at, to: next, letter: g, carried }
            } else {
                Edge { from: next, to: at, letter: g, carried: source.inverse_nf(&carried) }
            };
            edges.push(Some(edge));
            at = next;
        }
    }
    // half-edge at a vertex: (edge index, forward?, far end, letter with sign, carried as traversed)
    let half_edges = |edges: &[Option<Edge>], v: usize| {
        let mut out = Vec::new();
        for (idx, e) in edges.iter().enumerate() {
            let Some(e) = e else { continue };
            if e.from == v {
                out.push((idx, e.letter as i64 + 1, e.to, e.carried.clone()));
            }
            if e.to == v {
                out.push((idx, -(e.letter as i64 + 1), e.from, source.inverse_nf(&e.carried)));
            }
        }
        out
    };
    loop {
        let mut fold = None;
        'search: for v in 0..vertices {
            let hs = half_edges(&edges, v);
            for x in 0..hs.len() {
                for y in x + 1..hs.len() {
                    if hs[x].1 == hs[y].1 && hs[x].0 != hs[y].0 {
                        fold = Some((hs[x].clone(), hs[y].clone()));
                        break 'search;
                    }
                }
            }
        }
        let Some((h1, h2)) = fold else { break };
        let (w1, w2) = (h1.2, h2.2);
        if w1 != w2 {
            // gauge the non-base end so both half-edges carry the same word, then merge
            let (keep, gone, delta) = if w2 != 0 {
                (w1, w2, source.mul_nf(&source.inverse_nf(&h1.3), &h2.3))
            } else {
                (w2, w1, source.mul_nf(&source.inverse_nf(&h2.3), &h1.3))
            };
            let delta_inv = source.inverse_nf(&delta);
            for e in edges.iter_mut().flatten() {
                if e.from == gone {
                    e.carried = source.mul_nf(&delta, &e.carried);
                }
                if e.to == gone {
                    e.carried = source.mul_nf(&e.carried, &delta_inv);
                }
            }
            for e in edges.iter_mut().flatten() {
                if e.from == gone {
                    e.from = keep;
                }
                if e.to == gone {
                    e.to = keep;
                }
            }
        }
        edges[h2.0] = None;
    }
    let live: Vec<&Edge> = edges.iter().flatten().collect();
    let used: std::collections::BTreeSet<usize> = live.iter().flat_map(|e| [e.from, e.to]).collect();
    if live.len() != rank || used.len() != 1 || !used.contains(&0) {
        return None;
    }
    let mut inverse = vec![source.identity_nf(); rank];
    for e in live {
        inverse[e.letter] = e.carried.clone();
    }
    Some(inverse)
}

/// Images of the target generators under a candidate inverse.
fn candidate_inverse(source: &Arc<DeckGroup>, target: &Arc<DeckGroup>, images: &[GroupElement]) -> Result<Vec<GroupElement>> {
    let el = |nf: NormalForm| GroupElement::new(source, nf);
    match (source.kind(), target.kind()) {
        (GroupKind::Finite(s), GroupKind::Finite(t)) => {
            if s.order() != t.order() {
                return Err(not_bijective("finite groups of different orders"));
            }
            let mut preimage = vec![None; t.order()];
            for nf in source.elements().unwrap() {
                let x = el(nf.clone())?;
                let NormalForm::Finite(j) = *evaluate(images, target, &x)?.normal_form() else { unreachable!() };
                if preimage[j].replace(x).is_some() {
                    return Err(not_bijective("two elements have the same image"));
                }
            }
            (0..target.generators().len())
                .map(|k| {
                    let NormalForm::Finite(j) = target.generator_nf(k) else { unreachable!() };
                    preimage[j].clone().ok_or_else(|| not_bijective("the map is not onto"))
                })
                .collect()
        }
        (GroupKind::InfiniteCyclic, GroupKind::InfiniteCyclic) => match images[0].normal_form() {
            NormalForm::Cyclic(e @ (1 | -1)) => Ok(vec![el(NormalForm::Cyclic(*e))?]),
            _ => Err(not_bijective("the generator must map to t or t^-1")),
        },
        (GroupKind::FreeAbelian { rank: n }, GroupKind::FreeAbelian { rank: m }) if n == m => {
            // column i holds the exponents of the image of generator i
            let mut mat = vec![vec![0i64; *n]; *n];
            for (i, img) in images.iter().enumerate() {
                let NormalForm::FreeAbelian(v) = img.normal_form() else { unreachable!() };
                for (r, &x) in v.iter().enumerate() {
                    mat[r][i] = x;
                }
            }
            let inv = unimodular_inverse(&mat).ok_or_else(|| not_bijective("the exponent matrix is not unimodular"))?;
            (0..*n).map(|j| el(NormalForm::FreeAbelian((0..*n).map(|r| inv[r][j]).collect()))).collect()
        }
        (GroupKind::KleinBottle, GroupKind::KleinBottle) => {
            // automorphisms send b to b^±1 and a to b^n a^±1
            let (NormalForm::Klein { b: bn, a: am }, NormalForm::Klein { b: eps, a: 0 }) =
                (images[0].normal_form(), images[1].normal_form())
            else {
                return Err(not_bijective("b must map to b or b^-1"));
            };
            if eps.abs() != 1 || am.abs() != 1 {
                return Err(not_bijective("a must map to b^n a^±1 and b to b^±1"));
            }
            Ok(vec![el(NormalForm::Klein { b: -eps * bn, a: *am })?, el(NormalForm::Klein { b: *eps, a: 0 })?])
        }
        (GroupKind::Free { rank: n }, GroupKind::Free { rank: m }) if n == m => fold_free(source, *n, images)
            .ok_or_else(|| not_bijective("the images do not generate the free group"))?
            .into_iter()
            .map(el)
            .collect(),
        (s, t) => Err(not_bijective(&format!("no isomorphism between {} and {} groups", s.name(), t.name()))),
    }
}

impl GroupIso {
    /// Checks the relations of `source` on the images, then finds and
    /// verifies a two-sided inverse.
    pub fn new(source: &Arc<DeckGroup>, target: &Arc<DeckGroup>, images: Vec<GroupElement>) -> Result<Self> {
        check_homomorphism(source, target, &images)?;
        let inverse_images = candidate_inverse(source, target, &images)?;
        Self::verified(source, target, images, inverse_images)
    }

    /// Like `new`, with the inverse supplied.
    pub fn with_inverse(
        source: &Arc<DeckGroup>,
        target: &Arc<DeckGroup>,
        images: Vec<GroupElement>,
        inverse_images: Vec<GroupElement>,
    ) -> Result<Self> {
        check_homomorphism(source, target, &images)?;
        Self::verified(source, target, images, inverse_images)
    }

    fn verified(
        source: &Arc<DeckGroup>,
        target: &Arc<DeckGroup>,
        images: Vec<GroupElement>,
        inverse_images: Vec<GroupElement>,
    ) -> Result<Self> {
        check_homomorphism(target, source, &inverse_images)?;
        for i in 0..source.generators().len() {
            let x = GroupElement::generator(source, i);
            if evaluate(&inverse_images, source, &evaluate(&images, target, &x)?)? != x {
                return Err(not_bijective("the inverse does not undo the map"));
            }
        }
        for j in 0..target.generators().len() {
            let y = GroupElement::generator(target, j);
            if evaluate(&images, target, &evaluate(&inverse_images, source, &y)?)? != y {
                return Err(not_bijective("the map does not undo the inverse"));
            }
        }
        Ok(GroupIso { source: Arc::clone(source), target: Arc::clone(target), images, inverse_images })
    }

    pub fn identity(group: &Arc<DeckGroup>) -> Self {
        let images: Vec<GroupElement> = (0..group.generators().len()).map(|i| GroupElement::generator(group, i)).collect();
        GroupIso { source: Arc::clone(group), target: Arc::clone(group), images: images.clone(), inverse_images: images }
    }

    pub fn source(&self) -> &Arc<DeckGroup> {
        &self.source
    }

    pub fn target(&self) -> &Arc<DeckGroup> {
        &self.target
    }

    pub fn images(&self) -> &[GroupElement] {
        &self.images
    }

    pub fn apply(&self, g: &GroupElement) -> Result<GroupElement> {
        if !same_group(g.group(), &self.source) {
            return Err(Error::GroupMismatch);
        }
        evaluate(&self.images, &self.target, g)
    }

    pub fn inverse(&self) -> GroupIso {
        GroupIso {
            source: Arc::clone(&self.target),
            target: Arc::clone(&self.source),
            images: self.inverse_images.clone(),
            inverse_images: self.images.clone(),
        }
    }

    /// The induced ring map on one coefficient.
    pub fn apply_ring(&self, from: &Ring, to: &Ring, x: &RingElem) -> Result<RingElem> {
        match (from, x) {
            (Ring::GroupRing(_), RingElem::Group(v)) => {
                let mut out = to.zero();
                for (g, c) in v.terms() {
                    out = out.add(&to.embed(&self.apply(&g)?, c.clone())?)?;
                }
                Ok(out)
            }
            (Ring::Novikov { .. }, RingElem::Series(s)) => {
                let t = GroupElement::generator(&self.source, 0);
                match self.apply(&t)?.normal_form() {
                    NormalForm::Cyclic(1) => Ok(RingElem::Series(s.clone())),
                    NormalForm::Cyclic(-1) => Ok(RingElem::Series(s.reflect()?)),
                    _ => Err(not_bijective("t must map to t or t^-1")),
                }
            }
            (Ring::Integer, RingElem::Int(_)) => Ok(x.clone()),
            _ => Err(Error::RingMismatch(format!("coefficient not in {}", from.name()))),
        }
    }

    /// The ring `Z((G₂))` matching `ring` over `G₁`.
    pub fn target_ring(&self, ring: &Ring) -> Result<Ring> {
        match ring {
            Ring::Integer => Ok(Ring::Integer),
            Ring::GroupRing(g) if same_group(g, &self.source) => Ok(Ring::GroupRing(Arc::clone(&self.target))),
            Ring::Novikov { precision, .. } if matches!(self.source.kind(), GroupKind::InfiniteCyclic) => {
                Ok(Ring::Novikov { variable: self.target.generators()[0].clone(), precision: *precision })
            }
            _ => Err(Error::RingMismatch(format!("{} is not a ring over the source group", ring.name()))),
        }
    }
}

/// `H(N∆)`: every coefficient pushed through the induced ring isomorphism.
pub fn transport_by_isomorphism(m: &PConnectionMatrix, iso: &GroupIso) -> Result<PConnectionMatrix> {
    let from = m.ring().clone();
    let to = iso.target_ring(&from)?;
    m.map_entries(&to, |x| iso.apply_ring(&from, &to, x))
}

/// The same decomposition seen through `iso`: labels and base lift mapped.
pub fn transport_decomposition(d: &MorseDecomposition, iso: &GroupIso) -> Result<MorseDecomposition> {
    if !same_group(d.group(), iso.source()) {
        return Err(Error::GroupMismatch);
    }
    let orbits = d
        .orbits()
        .iter()
        .map(|o| {
            let mut o = o.clone();
            o.label = iso.apply(&o.label)?;
            Ok(o)
        })
        .collect::<Result<Vec<_>>>()?;
    let order: Vec<(String, String)> = d
        .poset()
        .relations()
        .into_iter()
        .map(|(a, b)| (d.poset().elements()[a].clone(), d.poset().elements()[b].clone()))
        .collect();
    MorseDecomposition::new(iso.target(), d.regime(), d.sets().to_vec(), orbits, Some(&order))?
        .with_base_lift(iso.apply(d.base_lift())?)
}
