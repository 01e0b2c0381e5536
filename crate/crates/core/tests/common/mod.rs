//! Random generators and independent oracles shared by the integration
//! tests and the acceptance run.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use conley_core::algebra::group::{klein_four, DeckGroup, GroupElement, GroupKind, NormalForm};
use conley_core::algebra::group_ring::GroupRingElem;
use conley_core::algebra::novikov::NovikovSeries;
use conley_core::algebra::ring::RingElem;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::Rng;

pub fn groups() -> Vec<Arc<DeckGroup>> {
    vec![
        Arc::new(klein_four()),
        Arc::new(DeckGroup::free_abelian(2, None).unwrap()),
        Arc::new(DeckGroup::free(2, None).unwrap()),
        Arc::new(DeckGroup::infinite_cyclic(None).unwrap()),
        Arc::new(DeckGroup::klein_bottle(None).unwrap()),
    ]
}

pub fn int<R: Rng>(rng: &mut R, lo: i64, hi: i64) -> BigInt {
    BigInt::from(rng.gen_range(lo..=hi))
}

/// A random element given by a random word, so that normalization is
/// exercised as well.
pub fn element<R: Rng>(rng: &mut R, g: &Arc<DeckGroup>) -> GroupElement {
    let nf = match g.kind() {
        GroupKind::Finite(t) => NormalForm::Finite(rng.gen_range(0..t.order())),
        _ => {
            let len = rng.gen_range(0..=4);
            let mut acc = GroupElement::identity(g);
            for _ in 0..len {
                let i = rng.gen_range(0..g.generators().len());
                let e = [-2, -1, 1, 2][rng.gen_range(0..4)];
                acc = acc.mul(&GroupElement::generator(g, i).pow(e)).unwrap();
            }
            return acc;
        }
    };
    GroupElement::new(g, nf).unwrap()
}

pub fn group_ring<R: Rng>(rng: &mut R, g: &Arc<DeckGroup>) -> GroupRingElem {
    let n = rng.gen_range(0..=4);
    let terms: Vec<_> = (0..n).map(|_| (element(rng, g), int(rng, -4, 4))).collect();
    GroupRingElem::from_terms(g, terms).unwrap()
}

pub fn coeffs<R: Rng>(rng: &mut R, len: usize) -> Vec<BigInt> {
    (0..len).map(|_| int(rng, -4, 4)).collect()
}

/// Exact series most of the time, truncated ones now and then.
pub fn series<R: Rng>(rng: &mut R, precision: usize) -> NovikovSeries {
    let min = rng.gen_range(-3..=3);
    if rng.gen_bool(0.25) {
        let len = rng.gen_range(2..=precision.max(2));
        let mut c = coeffs(rng, len);
        c[0] = int(rng, 1, 3);
        NovikovSeries::truncated(min, c)
    } else {
        let len = rng.gen_range(0..=5);
        NovikovSeries::laurent(min, coeffs(rng, len), precision)
    }
}

pub fn unit_series<R: Rng>(rng: &mut R, precision: usize) -> NovikovSeries {
    let len = rng.gen_range(1..=6);
    let mut c = coeffs(rng, len);
    c[0] = BigInt::from(if rng.gen_bool(0.5) { 1 } else { -1 });
    NovikovSeries::laurent(rng.gen_range(-4..=4), c, precision)
}

pub fn ring_elem<R: Rng>(rng: &mut R, kind: &RingKind) -> RingElem {
    match kind {
        RingKind::Integer => RingElem::Int(int(rng, -50, 50)),
        RingKind::Group(g) => RingElem::Group(group_ring(rng, g)),
        RingKind::Novikov(p) => RingElem::Series(series(rng, *p)),
    }
}

pub enum RingKind {
    Integer,
    Group(Arc<DeckGroup>),
    Novikov(usize),
}

impl RingKind {
    pub fn all() -> Vec<(String, RingKind)> {
        let mut out = vec![("Z".to_string(), RingKind::Integer)];
        for g in groups() {
            out.push((format!("Z[{}]", g.kind().name()), RingKind::Group(g)));
        }
        out.push(("Z((t))".to_string(), RingKind::Novikov(32)));
        out
    }

    pub fn equal(&self, x: &RingElem, y: &RingElem) -> bool {
        match self {
            RingKind::Novikov(_) => x.eq_to_precision(y),
            _ => x == y,
        }
    }
}

/// `(xy)z = x(yz)`, `x + y = y + x`, `x(y + z) = xy + xz`, `(x + y)z = xz + yz`.
pub fn ring_axioms(kind: &RingKind, x: &RingElem, y: &RingElem, z: &RingElem) -> Result<(), String> {
    let ok = |a: &RingElem, b: &RingElem, what: &str| {
        if kind.equal(a, b) {
            Ok(())
        } else {
            Err(format!("{what} fails for x={x} y={y} z={z}: {a} vs {b}"))
        }
    };
    let m = |a: &RingElem, b: &RingElem| a.mul(b).unwrap();
    let s = |a: &RingElem, b: &RingElem| a.add(b).unwrap();
    ok(&m(&m(x, y), z), &m(x, &m(y, z)), "associativity")?;
    ok(&s(x, y), &s(y, x), "commutativity of +")?;
    ok(&m(x, &s(y, z)), &s(&m(x, y), &m(x, z)), "left distributivity")?;
    ok(&m(&s(x, y), z), &s(&m(x, z), &m(y, z)), "right distributivity")
}

// integer linear algebra oracles

/// Exact determinant by cofactor expansion.
pub fn det(m: &[Vec<BigInt>]) -> BigInt {
    match m.len() {
        0 => BigInt::from(1),
        1 => m[0][0].clone(),
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<BigInt>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, x)| x.clone()).collect())
                    .collect();
                let term = &m[0][j] * det(&minor);
                if j % 2 == 0 {
                    term
                } else {
                    -term
                }
            })
            .sum(),
    }
}

pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = combinations(n - 1, k);
    for mut c in combinations(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}

/// gcd of all `k × k` minors; zero when they all vanish.
pub fn minor_gcd(a: &[Vec<BigInt>], k: usize) -> BigInt {
    let (m, n) = (a.len(), a.first().map_or(0, Vec::len));
    let mut g = BigInt::zero();
    for rows in combinations(m, k) {
        for cols in combinations(n, k) {
            let sub: Vec<Vec<BigInt>> = rows.iter().map(|&i| cols.iter().map(|&j| a[i][j].clone()).collect()).collect();
            g = g.gcd(&det(&sub));
        }
    }
    g
}

pub fn matmul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| (0..cols).map(|j| (0..inner).map(|k| &row[k] * &b[k][j]).sum()).collect())
        .collect()
}

/// Checks a claimed Smith form against the determinantal divisors of `a`.
pub fn smith_oracle(a: &[Vec<BigInt>], divisors: &[BigInt]) -> Result<(), String> {
    let (m, n) = (a.len(), a.first().map_or(0, Vec::len));
    let mut prod = BigInt::from(1);
    for k in 1..=m.min(n) {
        let g = minor_gcd(a, k);
        match divisors.get(k - 1) {
            Some(d) => {
                if !d.is_positive() {
                    return Err(format!("divisor {d} is not positive"));
                }
                prod *= d;
                if prod != g {
                    return Err(format!("d1..d{k} = {prod} but the gcd of {k}-minors is {g}"));
                }
            }
            None if g.is_zero() => {}
            None => return Err(format!("rank too small: {k}-minors have gcd {g}")),
        }
    }
    for w in divisors.windows(2) {
        if !(&w[1] % &w[0]).is_zero() {
            return Err(format!("{} does not divide {}", w[0], w[1]));
        }
    }
    Ok(())
}

// poset oracles

/// Reachability closure of `relations` by depth-first search.
pub fn closure(n: usize, relations: &[(usize, usize)]) -> BTreeSet<(usize, usize)> {
    let mut out = BTreeSet::new();
    for s in 0..n {
        let mut stack = vec![s];
        let mut seen = vec![false; n];
        while let Some(v) = stack.pop() {
            for &(a, b) in relations {
                if a == v && !seen[b] {
                    seen[b] = true;
                    out.insert((s, b));
                    stack.push(b);
                }
            }
        }
    }
    out
}

pub fn oracle_is_interval(less: &BTreeSet<(usize, usize)>, n: usize, set: &BTreeSet<usize>) -> bool {
    set.iter().all(|&p| {
        set.iter().all(|&q| (0..n).all(|r| !(less.contains(&(p, r)) && less.contains(&(r, q))) || set.contains(&r)))
    })
}

/// Every naturally labeled poset on `n` points: each subset of the pairs
/// `i < j` that is already transitively closed. Every finite poset is
/// isomorphic to one of these.
pub fn natural_posets(n: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    (0u32..1 << pairs.len())
        .filter_map(|mask| {
            let rel: Vec<(usize, usize)> =
                pairs.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &p)| p).collect();
            let set: BTreeSet<_> = rel.iter().copied().collect();
            (closure(n, &rel) == set).then_some(rel)
        })
        .collect()
}

/// Checks `intervals()` and `adjacent_pairs()` of one poset against the
/// definitions, enumerated from scratch.
pub fn poset_oracle(n: usize, relations: &[(usize, usize)]) -> Result<(), String> {
    use conley_core::flow::poset::Poset;
    let names: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    let p = Poset::new(names, relations).map_err(|e| e.to_string())?;
    let less = closure(n, relations);
    let subsets: Vec<BTreeSet<usize>> =
        (0u32..1 << n).map(|m| (0..n).filter(|&i| m >> i & 1 == 1).collect()).collect();
    let expected: BTreeSet<BTreeSet<usize>> =
        subsets.iter().filter(|s| oracle_is_interval(&less, n, s)).cloned().collect();
    let got: BTreeSet<BTreeSet<usize>> = p.intervals().into_iter().map(|v| v.into_iter().collect()).collect();
    if got != expected {
        return Err(format!("intervals differ for {relations:?}"));
    }
    let mut pairs = BTreeSet::new();
    for i in expected.iter().filter(|s| !s.is_empty()) {
        for j in expected.iter().filter(|s| !s.is_empty()) {
            let disjoint = i.is_disjoint(j);
            let union: BTreeSet<usize> = i.union(j).copied().collect();
            let no_back = i.iter().all(|&a| j.iter().all(|&b| !less.contains(&(b, a))));
            if disjoint && no_back && oracle_is_interval(&less, n, &union) {
                pairs.insert((i.clone(), j.clone()));
            }
        }
    }
    let got: BTreeSet<(BTreeSet<usize>, BTreeSet<usize>)> = p
        .adjacent_pairs()
        .into_iter()
        .map(|(a, b)| (a.into_iter().collect(), b.into_iter().collect()))
        .collect();
    if got != pairs {
        return Err(format!("adjacent pairs differ for {relations:?}"));
    }
    for a in 0..n {
        for b in 0..n {
            let between = (0..n).any(|c| {
                (less.contains(&(a, c)) && less.contains(&(c, b))) || (less.contains(&(b, c)) && less.contains(&(c, a)))
            });
            if p.adjacent(a, b) != (a != b && !between) {
                return Err(format!("adjacency of {a}, {b} differs for {relations:?}"));
            }
        }
    }
    Ok(())
}

// random decompositions

/// Sets `s0 .. s{n-1}`, each with one or two generators of a common degree,
/// and orbits running from `si` to `sj` only for `i > j` with a degree drop
/// of one. Records therefore always join adjacent sets.
pub fn random_decomposition<R: Rng>(
    rng: &mut R,
    g: &Arc<DeckGroup>,
    regime: conley_core::algebra::ring::Regime,
) -> conley_core::flow::decomposition::MorseDecomposition {
    use conley_core::flow::decomposition::{MorseDecomposition, MorseSet, OrbitRecord};
    let n = rng.gen_range(2..=5);
    let mut sets = Vec::new();
    let mut degree = Vec::new();
    for i in 0..n {
        let k = rng.gen_range(0..=2);
        let ids: Vec<String> = (0..rng.gen_range(1..=2)).map(|j| format!("s{i}.{j}")).collect();
        let gens: Vec<(&str, i32)> = ids.iter().map(|id| (id.as_str(), k)).collect();
        sets.push(MorseSet::new(&format!("s{i}"), &gens));
        degree.push(k);
    }
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (0..i).map(move |j| (i, j))).filter(|&(i, j)| degree[i] == degree[j] + 1).collect();
    let mut orbits = Vec::new();
    if !pairs.is_empty() {
        for _ in 0..rng.gen_range(0..=8) {
            let (i, j) = pairs[rng.gen_range(0..pairs.len())];
            let from = &sets[i].generators[rng.gen_range(0..sets[i].generators.len())].id;
            let to = &sets[j].generators[rng.gen_range(0..sets[j].generators.len())].id;
            let coeff = [-2, -1, 1, 2][rng.gen_range(0..4)];
            orbits.push(OrbitRecord::new((&sets[i].id, from), (&sets[j].id, to), element(rng, g), coeff));
        }
    }
    MorseDecomposition::new(g, regime, sets, orbits, None).unwrap()
}
