//! Circle-valued Morse data: Novikov incidences, the Novikov complex, the
//! real-valued Morse complex, and the tower of truncations over
//! `Z[t]/(t^(ℓ+1))`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::algebra::group::{DeckGroup, GroupElement, GroupKind, NormalForm};
use crate::algebra::novikov::NovikovSeries;
use crate::algebra::ring::{Regime, Ring, RingElem};
use crate::error::{Error, Result};
use crate::flow::decomposition::{MorseDecomposition, MorseSet, OrbitRecord};
use crate::homology::complex::{GradedModule, PChainComplex};
use crate::homology::matrix::RingMatrix;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriticalPoint {
    pub id: String,
    pub index: i32,
}

/// `n(p̄, t^level q̄; F)` for lifts fixed in the fundamental cobordism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Incidence {
    pub from: String,
    pub to: String,
    pub level: i64,
    pub count: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CircleMorseData {
    points: Vec<CriticalPoint>,
    incidences: Vec<Incidence>,
}

fn check_points(points: &[CriticalPoint]) -> Result<BTreeMap<&str, i32>> {
    let mut index = BTreeMap::new();
    for p in points {
        if index.insert(p.id.as_str(), p.index).is_some() {
            return Err(Error::InvalidDecomposition(format!("critical point '{}' is declared twice", p.id)));
        }
    }
    Ok(index)
}

fn index_drop(index: &BTreeMap<&str, i32>, from: &str, to: &str) -> Result<()> {
    let look = |id: &str| {
        index.get(id).copied().ok_or_else(|| Error::InvalidDecomposition(format!("unknown critical point '{id}'")))
    };
    let (k, j) = (look(from)?, look(to)?);
    if k != j + 1 {
        return Err(Error::IndexMismatch(format!("'{from}' has index {k} and '{to}' has index {j}")));
    }
    Ok(())
}

fn module_of(points: &[CriticalPoint]) -> GradedModule {
    let mut map: BTreeMap<i32, Vec<String>> = BTreeMap::new();
    for p in points {
        map.entry(p.index).or_default().push(p.id.clone());
    }
    for v in map.values_mut() {
        v.sort();
    }
    GradedModule::new(map).expect("ids checked")
}

impl CircleMorseData {
    pub fn new(points: Vec<CriticalPoint>, incidences: Vec<Incidence>) -> Result<Self> {
        let index = check_points(&points)?;
        for r in &incidences {
            index_drop(&index, &r.from, &r.to)?;
            if r.level < 0 {
                return Err(Error::InvalidDecomposition(format!(
                    "incidence {} -> {} has level {}; lifts must be chosen so that levels are non-negative",
                    r.from, r.to, r.level
                )));
            }
        }
        Ok(CircleMorseData { points, incidences })
    }

    pub fn points(&self) -> &[CriticalPoint] {
        &self.points
    }

    pub fn incidences(&self) -> &[Incidence] {
        &self.incidences
    }

    pub fn index_of(&self, id: &str) -> Option<i32> {
        self.points.iter().find(|p| p.id == id).map(|p| p.index)
    }

    pub fn max_level(&self) -> Option<i64> {
        self.incidences.iter().map(|r| r.level).max()
    }

    pub fn module(&self) -> GradedModule {
        module_of(&self.points)
    }

    /// Reads an infinite cyclic decomposition back as circle-valued data:
    /// every generator becomes a critical point and a record labeled `g`
    /// sits at the level of `base⁻¹ g`.
    pub fn from_decomposition(d: &MorseDecomposition) -> Result<Self> {
        if !matches!(d.group().kind(), GroupKind::InfiniteCyclic) {
            return Err(Error::UnsupportedRegime(format!(
                "truncation towers need the infinite cyclic group, not {}",
                d.group().kind().name()
            )));
        }
        let points = d
            .sets()
            .iter()
            .flat_map(|s| s.generators.iter().map(|g| CriticalPoint { id: g.id.clone(), index: g.degree }))
            .collect();
        let base = d.base_lift().inverse();
        let incidences = d
            .orbits()
            .iter()
            .map(|o| {
                let level = match base.mul(&o.label)?.normal_form() {
                    NormalForm::Cyclic(n) => *n,
                    _ => unreachable!("infinite cyclic normal form"),
                };
                Ok(Incidence { from: o.from_gen.clone(), to: o.to_gen.clone(), level, count: o.coeff.clone() })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(points, incidences)
    }
}

/// `N(p, q) = Σ_ℓ n(p, t^ℓ q) t^ℓ`.
pub fn novikov_incidence(data: &CircleMorseData, p: &str, q: &str, precision: usize) -> Result<NovikovSeries> {
    let index = check_points(&data.points)?;
    index_drop(&index, p, q)?;
    let terms = data
        .incidences
        .iter()
        .filter(|r| r.from == p && r.to == q)
        .map(|r| (r.level, r.count.clone()));
    Ok(NovikovSeries::from_terms(terms, precision))
}

fn boundary_maps<F>(ring: &Ring, module: &GradedModule, mut entry: F) -> Result<BTreeMap<i32, RingMatrix>>
where
    F: FnMut(&str, &str) -> Result<RingElem>,
{
    let mut boundary = BTreeMap::new();
    for k in module.degrees() {
        let cols = module.generators(k).to_vec();
        let rows = module.generators(k - 1).to_vec();
        if rows.is_empty() {
            continue;
        }
        let mut m = RingMatrix::zero(ring, rows.clone(), cols.clone());
        for (i, q) in rows.iter().enumerate() {
            for (j, p) in cols.iter().enumerate() {
                m.set(i, j, entry(p, q)?)?;
            }
        }
        boundary.insert(k, m);
    }
    Ok(boundary)
}

/// The Novikov complex over `Z((t))`; `∂² = 0` is enforced.
pub fn build_novikov_complex(data: &CircleMorseData, precision: usize) -> Result<PChainComplex> {
    let ring = Ring::Novikov { variable: "t".into(), precision };
    let module = data.module();
    let boundary =
        boundary_maps(&ring, &module, |p, q| Ok(RingElem::Series(novikov_incidence(data, p, q, precision)?)))?;
    let c = PChainComplex::new(module, ring, boundary)?;
    let report = c.verify_boundary_squared();
    if let Some((k, o)) = report.offenders().next() {
        return Err(Error::InconsistentIncidence(format!(
            "∂_{k} ∘ ∂_{} is {} at ({}, {})",
            k + 1,
            o.value,
            o.row,
            o.col
        )));
    }
    Ok(c)
}

/// The same data as a p-Morse decomposition over the infinite cyclic group:
/// one Morse set per critical point, one record per incidence labeled `t^ℓ`.
pub fn to_decomposition(data: &CircleMorseData) -> Result<MorseDecomposition> {
    let group = Arc::new(DeckGroup::infinite_cyclic(None)?);
    let sets = data
        .points
        .iter()
        .map(|p| MorseSet::new(&p.id, &[(&p.id, p.index)]))
        .collect();
    let orbits = data
        .incidences
        .iter()
        .filter(|r| !r.count.is_zero())
        .map(|r| {
            let label = GroupElement::new(&group, NormalForm::Cyclic(r.level))?;
            Ok(OrbitRecord {
                from_set: r.from.clone(),
                from_gen: r.from.clone(),
                to_set: r.to.clone(),
                to_gen: r.to.clone(),
                label,
                coeff: r.count.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    MorseDecomposition::new(&group, Regime::H2, sets, orbits, None)
}

/// Real-valued Morse data: signed counts `n(p, q; f)` between critical
/// points of consecutive index.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MorseData {
    pub points: Vec<CriticalPoint>,
    /// `(from, to, count)`.
    pub counts: Vec<(String, String, BigInt)>,
}

/// The Morse complex over `Z`; `∂² = 0` is enforced.
pub fn build_morse_complex(data: &MorseData) -> Result<PChainComplex> {
    let index = check_points(&data.points)?;
    let mut sums: BTreeMap<(&str, &str), BigInt> = BTreeMap::new();
    for (p, q, c) in &data.counts {
        index_drop(&index, p, q)?;
        *sums.entry((p.as_str(), q.as_str())).or_default() += c;
    }
    let module = module_of(&data.points);
    let boundary = boundary_maps(&Ring::Integer, &module, |p, q| {
        Ok(RingElem::Int(sums.get(&(p, q)).cloned().unwrap_or_default()))
    })?;
    let c = PChainComplex::new(module, Ring::Integer, boundary)?;
    let report = c.verify_boundary_squared();
    if let Some((k, o)) = report.offenders().next() {
        return Err(Error::InconsistentMorse(format!(
            "∂_{k} ∘ ∂_{} is {} at ({}, {})",
            k + 1,
            o.value,
            o.row,
            o.col
        )));
    }
    Ok(c)
}

/// A matrix over `Z[t]/(t^(ℓ+1))`; each entry keeps the coefficients of
/// `t^0 .. t^ℓ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedMatrix {
    pub level: usize,
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    entries: BTreeMap<(usize, usize), Vec<BigInt>>,
}

impl TruncatedMatrix {
    pub fn zero(level: usize, rows: Vec<String>, cols: Vec<String>) -> Self {
        TruncatedMatrix { level, rows, cols, entries: BTreeMap::new() }
    }

    /// Stores the coefficients up to `t^level`, dropping the rest.
    pub fn set(&mut self, r: usize, c: usize, coeffs: &[BigInt]) {
        let mut v: Vec<BigInt> = coeffs.iter().take(self.level + 1).cloned().collect();
        v.resize(self.level + 1, BigInt::zero());
        if v.iter().all(Zero::is_zero) {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), v);
        }
    }

    pub fn get(&self, r: usize, c: usize) -> Option<&[BigInt]> {
        self.entries.get(&(r, c)).map(Vec::as_slice)
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &[BigInt])> {
        self.entries.iter().map(|(&(r, c), v)| (r, c, v.as_slice()))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// `π^ℓ_j` applied entrywise.
    pub fn project(&self, j: usize) -> TruncatedMatrix {
        let mut out = TruncatedMatrix::zero(j.min(self.level), self.rows.clone(), self.cols.clone());
        for (&(r, c), v) in &self.entries {
            out.set(r, c, v);
        }
        out
    }

    /// Entries as polynomials, so levels can be compared.
    fn pattern(&self) -> BTreeMap<(usize, usize), Vec<BigInt>> {
        self.entries
            .iter()
            .map(|(k, v)| {
                let last = v.iter().rposition(|c| !c.is_zero()).unwrap();
                (*k, v[..=last].to_vec())
            })
            .collect()
    }

    pub fn render_entry(&self, r: usize, c: usize, var: &str) -> String {
        match self.get(r, c) {
            None => "0".into(),
            Some(v) => NovikovSeries::laurent(0, v.to_vec(), v.len()).display_with(var),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerLevel {
    pub level: usize,
    pub boundary: BTreeMap<i32, TruncatedMatrix>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncationTower {
    pub module: GradedModule,
    pub levels: Vec<TowerLevel>,
    /// `Some(ℓ*)` when the top level lies beyond every record level.
    pub stabilization: Option<usize>,
}

/// Levels `0..=top` of the truncated Novikov boundary.
pub fn truncation_tower(data: &CircleMorseData, top: usize) -> TruncationTower {
    let module = data.module();
    let mut sums: BTreeMap<(&str, &str), BTreeMap<i64, BigInt>> = BTreeMap::new();
    for r in &data.incidences {
        *sums.entry((r.from.as_str(), r.to.as_str())).or_default().entry(r.level).or_default() += &r.count;
    }
    let levels: Vec<TowerLevel> = (0..=top)
        .map(|level| {
            let mut boundary = BTreeMap::new();
            for k in module.degrees() {
                let cols = module.generators(k).to_vec();
                let rows = module.generators(k - 1).to_vec();
                if rows.is_empty() {
                    continue;
                }
                let mut m = TruncatedMatrix::zero(level, rows.clone(), cols.clone());
                for (i, q) in rows.iter().enumerate() {
                    for (j, p) in cols.iter().enumerate() {
                        if let Some(terms) = sums.get(&(p.as_str(), q.as_str())) {
                            let mut coeffs = vec![BigInt::zero(); level + 1];
                            for (&l, c) in terms {
                                if (l as usize) <= level {
                                    coeffs[l as usize] += c;
                                }
                            }
                            m.set(i, j, &coeffs);
                        }
                    }
                }
                boundary.insert(k, m);
            }
            TowerLevel { level, boundary }
        })
        .collect();
    let beyond = data.max_level().is_none_or(|m| (top as i64) > m);
    let stabilization = beyond.then(|| {
        let pattern = |l: &TowerLevel| -> Vec<_> { l.boundary.values().map(TruncatedMatrix::pattern).collect() };
        let last = pattern(&levels[top]);
        let mut star = top;
        while star > 0 && pattern(&levels[star - 1]) == last {
            star -= 1;
        }
        star
    });
    let tower = TruncationTower { module, levels, stabilization };
    debug_assert!(tower.coherent().is_none());
    tower
}

impl TruncationTower {
    pub fn top(&self) -> usize {
        self.levels.len().saturating_sub(1)
    }

    /// First `(ℓ, j, degree)` where projecting level `ℓ` to `j` disagrees
    /// with level `j`.
    pub fn coherent(&self) -> Option<(usize, usize, i32)> {
        for hi in &self.levels {
            for lo in &self.levels[..=hi.level] {
                for (k, m) in &hi.boundary {
                    if lo.boundary.get(k) != Some(&m.project(lo.level)) {
                        return Some((hi.level, lo.level, *k));
                    }
                }
            }
        }
        None
    }

    /// Overwrites one entry of one level.
    pub fn set_entry(&mut self, level: usize, degree: i32, row: usize, col: usize, coeffs: &[BigInt]) {
        if let Some(m) = self.levels.get_mut(level).and_then(|l| l.boundary.get_mut(&degree)) {
            m.set(row, col, coeffs);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelMismatch {
    pub level: usize,
    pub degree: i32,
    pub row: String,
    pub col: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TowerComparison {
    pub levels_checked: usize,
    pub mismatches: Vec<LevelMismatch>,
}

impl TowerComparison {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Checks every level against the Novikov boundary truncated at `t^ℓ`.
pub fn compare_tower_limit(tower: &TruncationTower, complex: &PChainComplex) -> Result<TowerComparison> {
    let mut mismatches = Vec::new();
    for lvl in &tower.levels {
        let degrees: BTreeSet<i32> = lvl.boundary.keys().copied().chain(complex.boundary_degrees()).collect();
        for k in degrees {
            let full = complex.boundary(k);
            let level_m = lvl.boundary.get(&k).cloned().unwrap_or_else(|| {
                TruncatedMatrix::zero(lvl.level, full.rows().to_vec(), full.cols().to_vec())
            });
            for (i, row) in full.rows().iter().enumerate() {
                for (j, col) in full.cols().iter().enumerate() {
                    let expected = truncate_entry(&full.entry(i, j), lvl.level)?;
                    let got = match (level_m.rows.iter().position(|r| r == row), level_m.cols.iter().position(|c| c == col)) {
                        (Some(r), Some(c)) => level_m.get(r, c).map(<[BigInt]>::to_vec),
                        _ => None,
                    };
                    let got = got.unwrap_or_else(|| vec![BigInt::zero(); lvl.level + 1]);
                    if got != expected {
                        mismatches.push(LevelMismatch { level: lvl.level, degree: k, row: row.clone(), col: col.clone() });
                    }
                }
            }
        }
    }
    Ok(TowerComparison { levels_checked: tower.levels.len(), mismatches })
}

/// Coefficients of `t^0 .. t^level`; negative exponents have no image in
/// `Z[t]/(t^(level+1))` and are reported as a mismatch by the caller.
fn truncate_entry(x: &RingElem, level: usize) -> Result<Vec<BigInt>> {
    let s = match x {
        RingElem::Series(s) => s,
        _ => return Err(Error::RingMismatch("Novikov complex expected".into())),
    };
    if !s.is_zero() && s.min_degree() < 0 {
        // marks the entry as different from every truncation
        let mut v = vec![BigInt::zero(); level + 2];
        v[level + 1] = BigInt::from(1);
        return Ok(v);
    }
    (0..=level as i64)
        .map(|k| {
            s.coeff(k).ok_or_else(|| {
                Error::InsufficientPrecision(format!("coefficient of t^{k} is beyond the series precision"))
            })
        })
        .collect()
}

/// Morse data of `W(ℓ) = ∪_{j ≤ ℓ} t^j W`, one point `p@j` for every lift.
/// Every lifted orbit `t^j p̄ → t^(j+m) q̄` inside the window is listed
/// explicitly.
pub fn unroll(data: &CircleMorseData, level: usize) -> MorseData {
    let lift = |id: &str, j: usize| format!("{id}@{j}");
    let points = data
        .points
        .iter()
        .flat_map(|p| (0..=level).map(move |j| CriticalPoint { id: lift(&p.id, j), index: p.index }))
        .collect();
    let mut counts = Vec::new();
    for r in &data.incidences {
        for j in 0..=level {
            let target = j + r.level as usize;
            if target <= level {
                counts.push((lift(&r.from, j), lift(&r.to, target), r.count.clone()));
            }
        }
    }
    MorseData { points, counts }
}

/// Level `ℓ` written over `Z` in the basis `{t^j p}`.
pub fn expand_level(tower: &TruncationTower, level: usize) -> BTreeMap<i32, RingMatrix> {
    let lift = |id: &str, j: usize| format!("{id}@{j}");
    let mut out = BTreeMap::new();
    let Some(lvl) = tower.levels.get(level) else {
        return out;
    };
    for (&k, m) in &lvl.boundary {
        let rows: Vec<String> = m.rows.iter().flat_map(|q| (0..=level).map(move |i| lift(q, i))).collect();
        let cols: Vec<String> = m.cols.iter().flat_map(|p| (0..=level).map(move |j| lift(p, j))).collect();
        let mut z = RingMatrix::zero(&Ring::Integer, rows, cols);
        for (r, c, coeffs) in m.entries() {
            for j in 0..=level {
                for i in j..=level {
                    let x = &coeffs[i - j];
                    if !x.is_zero() {
                        z.set(r * (level + 1) + i, c * (level + 1) + j, RingElem::Int(x.clone())).unwrap();
                    }
                }
            }
        }
        out.insert(k, z);
    }
    out
}

/// Builds the `W(ℓ)` Morse complex from explicitly unrolled data and
/// compares it with the expanded tower level.
pub fn check_unrolled(data: &CircleMorseData, tower: &TruncationTower, level: usize) -> Result<bool> {
    let morse = build_morse_complex(&unroll(data, level))?;
    let expanded = expand_level(tower, level);
    let degrees: BTreeSet<i32> = expanded.keys().copied().chain(morse.boundary_degrees()).collect();
    Ok(degrees.into_iter().all(|k| {
        let a = morse.boundary(k);
        match expanded.get(&k) {
            Some(b) => crate::pconnection::assembly::same_by_ids(&a, b),
            None => a.is_zero(),
        }
    }))
}
