//! Graded free modules, chain complexes, and their homology over `Z` and
//! `Z((t))`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use super::matrix::RingMatrix;
use super::smith::{smith_normal_form, smith_reduce};
use crate::algebra::novikov::NovikovSeries;
use crate::algebra::ring::{Ring, RingElem};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GradedModule {
    generators: BTreeMap<i32, Vec<String>>,
}

impl GradedModule {
    pub fn new(generators: BTreeMap<i32, Vec<String>>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for ids in generators.values() {
            for id in ids {
                if !seen.insert(id.as_str()) {
                    return Err(Error::InvalidDecomposition(format!("generator id '{id}' is used twice")));
                }
            }
        }
        let generators = generators.into_iter().filter(|(_, v)| !v.is_empty()).collect();
        Ok(GradedModule { generators })
    }

    pub fn from_pairs<'a, I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, i32)>,
    {
        let mut map: BTreeMap<i32, Vec<String>> = BTreeMap::new();
        for (id, k) in pairs {
            map.entry(k).or_default().push(id.to_string());
        }
        Self::new(map)
    }

    /// Generators of degree `k`, possibly none.
    pub fn generators(&self, k: i32) -> &[String] {
        self.generators.get(&k).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Degrees with at least one generator, ascending.
    pub fn degrees(&self) -> impl Iterator<Item = i32> + '_ {
        self.generators.keys().copied()
    }

    pub fn degree_of(&self, id: &str) -> Option<i32> {
        self.generators.iter().find(|(_, v)| v.iter().any(|g| g == id)).map(|(k, _)| *k)
    }

    pub fn rank(&self) -> usize {
        self.generators.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }
}

/// A free chain complex; `boundary[k]` maps degree `k` to degree `k - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PChainComplex {
    module: GradedModule,
    ring: Ring,
    boundary: BTreeMap<i32, RingMatrix>,
}

impl PChainComplex {
    pub fn new(module: GradedModule, ring: Ring, boundary: BTreeMap<i32, RingMatrix>) -> Result<Self> {
        for (&k, m) in &boundary {
            if m.ring() != &ring {
                return Err(Error::RingMismatch(format!("boundary in degree {k} is over {}", m.ring().name())));
            }
            if m.cols() != module.generators(k) || m.rows() != module.generators(k - 1) {
                return Err(Error::DimensionMismatch(format!(
                    "boundary in degree {k} is not indexed by the degree {k} and {} generators",
                    k - 1
                )));
            }
        }
        let boundary = boundary.into_iter().filter(|(_, m)| !m.is_zero()).collect();
        Ok(PChainComplex { module, ring, boundary })
    }

    pub fn zero(module: GradedModule, ring: Ring) -> Self {
        PChainComplex { module, ring, boundary: BTreeMap::new() }
    }

    pub fn module(&self) -> &GradedModule {
        &self.module
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    /// `∂_k`, the zero matrix if nothing was stored.
    pub fn boundary(&self, k: i32) -> RingMatrix {
        self.boundary.get(&k).cloned().unwrap_or_else(|| {
            RingMatrix::zero(&self.ring, self.module.generators(k - 1).to_vec(), self.module.generators(k).to_vec())
        })
    }

    /// Degrees with a nonzero boundary.
    pub fn boundary_degrees(&self) -> impl Iterator<Item = i32> + '_ {
        self.boundary.keys().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.boundary.is_empty()
    }

    /// Checks `∂_k ∘ ∂_{k+1} = 0` in every degree where both maps are nonzero.
    pub fn verify_boundary_squared(&self) -> BoundaryReport {
        let mut degrees = Vec::new();
        for (&k, outer) in &self.boundary {
            let Some(inner) = self.boundary.get(&(k + 1)) else {
                continue;
            };
            let offending = match outer.compose(inner) {
                Ok(sq) => sq
                    .entries()
                    .map(|(r, c, v)| Offender {
                        row: sq.rows()[r].clone(),
                        col: sq.cols()[c].clone(),
                        value: self.ring.display(v),
                    })
                    .collect(),
                Err(e) => vec![Offender { row: String::new(), col: String::new(), value: e.to_string() }],
            };
            degrees.push(SquareCheck { degree: k, passed: offending.is_empty(), offending });
        }
        BoundaryReport { degrees }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Offender {
    pub row: String,
    pub col: String,
    pub value: String,
}

/// `∂_k ∘ ∂_{k+1}` for one `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SquareCheck {
    pub degree: i32,
    pub passed: bool,
    pub offending: Vec<Offender>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundaryReport {
    pub degrees: Vec<SquareCheck>,
}

impl BoundaryReport {
    pub fn passed(&self) -> bool {
        self.degrees.iter().all(|d| d.passed)
    }

    pub fn offenders(&self) -> impl Iterator<Item = (i32, &Offender)> {
        self.degrees.iter().flat_map(|d| d.offending.iter().map(move |o| (d.degree, o)))
    }
}

fn require_complex(c: &PChainComplex) -> Result<()> {
    let report = c.verify_boundary_squared();
    if let Some((k, o)) = report.offenders().next() {
        return Err(Error::NotAComplex(format!(
            "∂_{k} ∘ ∂_{} has entry {} at ({}, {})",
            k + 1,
            o.value,
            o.row,
            o.col
        )));
    }
    Ok(())
}

/// Range of degrees that can carry homology.
fn degree_span(c: &PChainComplex) -> Vec<i32> {
    c.module.degrees().collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerHomology {
    pub betti: usize,
    pub torsion: Vec<BigInt>,
}

impl IntegerHomology {
    pub fn is_zero(&self) -> bool {
        self.betti == 0 && self.torsion.is_empty()
    }
}

/// `H_k` over `Z` for every degree with generators.
pub fn homology_z(c: &PChainComplex) -> Result<BTreeMap<i32, IntegerHomology>> {
    if c.ring != Ring::Integer {
        return Err(Error::RingMismatch(format!("integer homology of a complex over {}", c.ring.name())));
    }
    require_complex(c)?;
    let mut divisors: BTreeMap<i32, Vec<BigInt>> = BTreeMap::new();
    for (&k, m) in &c.boundary {
        let dense = m.to_dense_int()?;
        divisors.insert(k, smith_normal_form(&dense, m.nrows(), m.ncols()).divisors);
    }
    let rank = |k: i32| divisors.get(&k).map_or(0, Vec::len);
    let mut out = BTreeMap::new();
    for k in degree_span(c) {
        let n = c.module.generators(k).len();
        let torsion = divisors
            .get(&(k + 1))
            .map(|d| d.iter().filter(|x| !x.is_one()).cloned().collect())
            .unwrap_or_default();
        out.insert(k, IntegerHomology { betti: n - rank(k) - rank(k + 1), torsion });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NovikovGroup {
    pub rank: usize,
    /// Non-unit elementary divisors in canonical associate form.
    pub divisors: Vec<NovikovSeries>,
}

impl NovikovGroup {
    pub fn is_zero(&self) -> bool {
        self.rank == 0 && self.divisors.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NovikovHomology {
    pub precision: usize,
    pub degrees: BTreeMap<i32, NovikovGroup>,
}

impl NovikovHomology {
    pub fn is_zero(&self) -> bool {
        self.degrees.values().all(NovikovGroup::is_zero)
    }
}

/// `H_k` over `Z((t))` at the complex's working precision.
///
/// Fails with `InsufficientPrecision` when elimination leaves an entry that
/// is zero only to a precision below the one requested, so the rank cannot
/// be certified.
pub fn homology_novikov(c: &PChainComplex) -> Result<NovikovHomology> {
    let precision = match &c.ring {
        Ring::Novikov { precision, .. } => *precision,
        other => return Err(Error::RingMismatch(format!("Novikov homology of a complex over {}", other.name()))),
    };
    require_complex(c)?;
    let zero = NovikovSeries::zero(precision);
    let one = NovikovSeries::one(precision);
    let mut divisors: BTreeMap<i32, Vec<NovikovSeries>> = BTreeMap::new();
    for (&k, m) in &c.boundary {
        let dense = m.to_dense_series()?;
        let base = dense.iter().flatten().filter(|x| !x.is_zero()).map(NovikovSeries::min_degree).min().unwrap_or(0);
        let s = smith_reduce(&dense, m.nrows(), m.ncols(), &zero, &one, false)?;
        let floor = base + precision as i64;
        for (i, row) in s.d.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                let certified = !x.is_zero() || x.horizon().is_none_or(|h| h >= floor);
                if !certified {
                    return Err(Error::InsufficientPrecision(format!(
                        "∂_{k}: after pivoting, entry ({i}, {j}) is only known to vanish below t^{}",
                        x.horizon().unwrap()
                    )));
                }
            }
        }
        divisors.insert(k, s.divisors);
    }
    let rank = |k: i32| divisors.get(&k).map_or(0, Vec::len);
    let mut degrees = BTreeMap::new();
    for k in degree_span(c) {
        let n = c.module.generators(k).len();
        let divs = divisors
            .get(&(k + 1))
            .map(|d| d.iter().filter(|x| !x.is_unit()).cloned().collect())
            .unwrap_or_default();
        degrees.insert(k, NovikovGroup { rank: n - rank(k) - rank(k + 1), divisors: divs });
    }
    Ok(NovikovHomology { precision, degrees })
}

/// `Z ⊂ Z((t))` applied to every entry.
pub fn embed_in_novikov(c: &PChainComplex, variable: &str, precision: usize) -> Result<PChainComplex> {
    let ring = Ring::Novikov { variable: variable.to_string(), precision };
    let mut boundary = BTreeMap::new();
    for (&k, m) in &c.boundary {
        let mapped = m.map_entries(&ring, |v| match v {
            RingElem::Int(x) => Ok(ring.integer(x.clone())),
            _ => Err(Error::RingMismatch("integer complex expected".into())),
        })?;
        boundary.insert(k, mapped);
    }
    PChainComplex::new(c.module.clone(), ring, boundary)
}
