//! Assembling the p-connection matrix from labeled orbit records.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::algebra::group::GroupElement;
use crate::algebra::ring::{Ring, RingElem};
use crate::error::{Error, Result};
use crate::flow::decomposition::{classify_orbits, validate_regime, MorseDecomposition, OrbitRecord};
use crate::homology::complex::{GradedModule, PChainComplex};
use crate::homology::matrix::RingMatrix;

/// Nonzero `(row, col) -> count` entries of one lift.
pub type LiftCounts = BTreeMap<(usize, usize), BigInt>;

/// The per-lift integer matrices of one pair: for every label `g`, the
/// map from the repeller's generators to those of the attractor lift `gA`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionBundle {
    pub repeller: String,
    pub attractor: String,
    /// Attractor generator ids (rows).
    pub rows: Vec<String>,
    /// Repeller generator ids (columns).
    pub cols: Vec<String>,
    pub base_lift: GroupElement,
    /// Label and its nonzero entries `(row, col) -> count`.
    pub lifts: Vec<(GroupElement, LiftCounts)>,
}

impl ConnectionBundle {
    pub fn from_decomposition(d: &MorseDecomposition, repeller: &str, attractor: &str) -> Result<Self> {
        let r = d
            .set(repeller)
            .ok_or_else(|| Error::InvalidDecomposition(format!("unknown Morse set '{repeller}'")))?;
        let a = d
            .set(attractor)
            .ok_or_else(|| Error::InvalidDecomposition(format!("unknown Morse set '{attractor}'")))?;
        let rows: Vec<String> = a.generators.iter().map(|g| g.id.clone()).collect();
        let cols: Vec<String> = r.generators.iter().map(|g| g.id.clone()).collect();
        let mut lifts = Vec::new();
        for bucket in classify_orbits(d, (repeller, attractor)) {
            let mut m: BTreeMap<(usize, usize), BigInt> = BTreeMap::new();
            for o in &bucket.records {
                let i = rows.iter().position(|x| *x == o.to_gen).expect("validated record");
                let j = cols.iter().position(|x| *x == o.from_gen).expect("validated record");
                *m.entry((i, j)).or_default() += &o.coeff;
            }
            m.retain(|_, v| !v.is_zero());
            if !m.is_empty() {
                lifts.push((bucket.label, m));
            }
        }
        Ok(ConnectionBundle {
            repeller: repeller.to_string(),
            attractor: attractor.to_string(),
            rows,
            cols,
            base_lift: d.base_lift().clone(),
            lifts,
        })
    }
}

/// `δ^N(R, A)`: entry `(a, r)` is `Σ_g m_g[a, r] · b⁻¹g`, with `b` the base
/// lift, so the result does not depend on which lift of `R` was used.
pub fn assemble_delta(bundle: &ConnectionBundle, ring: &Ring) -> Result<RingMatrix> {
    let mut out = RingMatrix::zero(ring, bundle.rows.clone(), bundle.cols.clone());
    let back = bundle.base_lift.inverse();
    for (g, m) in &bundle.lifts {
        let label = back.mul(g)?;
        for (&(i, j), c) in m {
            out.add_to(i, j, &ring.embed(&label, c.clone())?)?;
        }
    }
    Ok(out)
}

/// `N∆` over `Z((G))`, block by block.
#[derive(Debug, Clone, PartialEq)]
pub struct PConnectionMatrix {
    ring: Ring,
    module: GradedModule,
    owner: BTreeMap<String, String>,
    /// Nonzero blocks keyed by `(repeller, attractor)`.
    blocks: BTreeMap<(String, String), RingMatrix>,
}

impl PConnectionMatrix {
    pub fn from_blocks(
        ring: Ring,
        module: GradedModule,
        owner: BTreeMap<String, String>,
        blocks: BTreeMap<(String, String), RingMatrix>,
    ) -> Result<Self> {
        for ((r, a), m) in &blocks {
            if m.ring() != &ring {
                return Err(Error::RingMismatch(format!("block ({r}, {a}) is over {}", m.ring().name())));
            }
            for id in m.rows() {
                if owner.get(id) != Some(a) {
                    return Err(Error::DimensionMismatch(format!("row '{id}' of block ({r}, {a}) is not in '{a}'")));
                }
            }
            for id in m.cols() {
                if owner.get(id) != Some(r) {
                    return Err(Error::DimensionMismatch(format!("column '{id}' of block ({r}, {a}) is not in '{r}'")));
                }
            }
        }
        let blocks = blocks.into_iter().filter(|(_, m)| !m.is_zero()).collect();
        Ok(PConnectionMatrix { ring, module, owner, blocks })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn module(&self) -> &GradedModule {
        &self.module
    }

    /// Morse set of each generator.
    pub fn owners(&self) -> &BTreeMap<String, String> {
        &self.owner
    }

    pub fn blocks(&self) -> &BTreeMap<(String, String), RingMatrix> {
        &self.blocks
    }

    pub fn block(&self, repeller: &str, attractor: &str) -> Option<&RingMatrix> {
        self.blocks.get(&(repeller.to_string(), attractor.to_string()))
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Value at `(row generator, column generator)`.
    pub fn entry(&self, row: &str, col: &str) -> RingElem {
        let (Some(a), Some(r)) = (self.owner.get(row), self.owner.get(col)) else {
            return self.ring.zero();
        };
        self.blocks
            .get(&(r.clone(), a.clone()))
            .and_then(|m| m.get_by_id(row, col))
            .cloned()
            .unwrap_or_else(|| self.ring.zero())
    }

    /// Nonzero entries as `(repeller, attractor, row gen, col gen, value)`,
    /// ordered by the degree of the column generator, then generator ids.
    pub fn nonzero_entries(&self) -> Vec<(String, String, String, String, RingElem)> {
        let mut out = Vec::new();
        for ((r, a), m) in &self.blocks {
            for (i, j, v) in m.entries() {
                out.push((r.clone(), a.clone(), m.rows()[i].clone(), m.cols()[j].clone(), v.clone()));
            }
        }
        let deg = |g: &str| self.module.degree_of(g).unwrap_or(0);
        out.sort_by(|x, y| (deg(&x.3), &x.3, &x.2).cmp(&(deg(&y.3), &y.3, &y.2)));
        out
    }

    /// The boundary map on `NC(S) = ⊕ NCH_*(M_π)`.
    pub fn complex(&self) -> PChainComplex {
        let mut boundary: BTreeMap<i32, RingMatrix> = BTreeMap::new();
        for k in self.module.degrees() {
            let cols = self.module.generators(k).to_vec();
            let rows = self.module.generators(k - 1).to_vec();
            let mut m = RingMatrix::zero(&self.ring, rows.clone(), cols.clone());
            for (i, row) in rows.iter().enumerate() {
                for (j, col) in cols.iter().enumerate() {
                    let v = self.entry(row, col);
                    if !v.is_zero() {
                        m.set(i, j, v).expect("entries live in the matrix ring");
                    }
                }
            }
            boundary.insert(k, m);
        }
        PChainComplex::new(self.module.clone(), self.ring.clone(), boundary).expect("indexed by the module")
    }

    /// The whole map as one square matrix on all generators, ordered by
    /// degree and then id.
    pub fn full_matrix(&self) -> RingMatrix {
        let ids: Vec<String> = self.module.degrees().flat_map(|k| self.module.generators(k).to_vec()).collect();
        let mut m = RingMatrix::zero(&self.ring, ids.clone(), ids.clone());
        for (_, _, row, col, v) in self.nonzero_entries() {
            let i = ids.iter().position(|x| *x == row).unwrap();
            let j = ids.iter().position(|x| *x == col).unwrap();
            m.set(i, j, v).expect("entries live in the matrix ring");
        }
        m
    }

    /// Applies `f` to every entry, landing in `ring`.
    pub fn map_entries<F>(&self, ring: &Ring, mut f: F) -> Result<PConnectionMatrix>
    where
        F: FnMut(&RingElem) -> Result<RingElem>,
    {
        let mut blocks = BTreeMap::new();
        for (k, m) in &self.blocks {
            blocks.insert(k.clone(), m.map_entries(ring, &mut f)?);
        }
        PConnectionMatrix::from_blocks(ring.clone(), self.module.clone(), self.owner.clone(), blocks)
    }

    pub fn eq_to_precision(&self, other: &PConnectionMatrix) -> bool {
        if self.ring != other.ring || self.module != other.module {
            return false;
        }
        let keys: std::collections::BTreeSet<_> = self.blocks.keys().chain(other.blocks.keys()).collect();
        keys.into_iter().all(|k| match (self.blocks.get(k), other.blocks.get(k)) {
            (Some(a), Some(b)) => a.eq_to_precision(b),
            (Some(m), None) | (None, Some(m)) => m.entries().all(|(_, _, v)| v.is_zero()),
            (None, None) => true,
        })
    }
}

/// Assembles `N∆` for a decomposition whose regime checks pass. Records
/// between non-adjacent sets are refused.
pub fn assemble_ndelta(d: &MorseDecomposition, precision: usize) -> Result<PConnectionMatrix> {
    let report = validate_regime(d)?;
    if let Some(v) = report.violations.first() {
        return Err(Error::InvalidDecomposition(v.clone()));
    }
    let ring = Ring::for_group(d.group(), d.regime(), precision);
    let mut owner = BTreeMap::new();
    for s in d.sets() {
        for g in &s.generators {
            owner.insert(g.id.clone(), s.id.clone());
        }
    }
    let mut blocks = BTreeMap::new();
    for (r, a) in d.connected_pairs() {
        let bundle = ConnectionBundle::from_decomposition(d, &r, &a)?;
        blocks.insert((r, a), assemble_delta(&bundle, &ring)?);
    }
    PConnectionMatrix::from_blocks(ring, d.module(), owner, blocks)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    /// `Π N∆` on all generators.
    pub delta: RingMatrix,
    /// Whether `Π(N∆²) = (Π N∆)²`.
    pub square_commutes: bool,
    /// Equality with a supplied reference, compared by generator ids.
    pub matches_reference: Option<bool>,
}

/// Entrywise augmentation `g ↦ 1`.
pub fn project_classical(m: &PConnectionMatrix, reference: Option<&RingMatrix>) -> Result<Projection> {
    let full = m.full_matrix();
    let delta = full.augment();
    let lhs = full.compose(&full)?.augment();
    let rhs = delta.compose(&delta)?;
    let matches_reference = reference.map(|r| same_by_ids(&delta, r));
    Ok(Projection { delta, square_commutes: lhs == rhs, matches_reference })
}

/// Integer matrices equal entry by entry, looked up by row and column id;
/// ids missing from one side read as zero.
pub fn same_by_ids(a: &RingMatrix, b: &RingMatrix) -> bool {
    let value = |m: &RingMatrix, r: &str, c: &str| {
        m.get_by_id(r, c).map(|v| v.augment().0).unwrap_or_default()
    };
    let cells = |m: &RingMatrix| -> Vec<(String, String)> {
        m.entries().map(|(i, j, _)| (m.rows()[i].clone(), m.cols()[j].clone())).collect()
    };
    cells(a).into_iter().chain(cells(b)).all(|(r, c)| value(a, &r, &c) == value(b, &r, &c))
}

/// One nonzero entry and the records behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub row: String,
    pub col: String,
    pub value: RingElem,
    pub records: Vec<OrbitRecord>,
}

/// The orbit records witnessing each nonzero entry of a block.
pub fn nonzero_entry_certificate(m: &PConnectionMatrix, d: &MorseDecomposition, pair: (&str, &str)) -> Vec<Witness> {
    let Some(block) = m.block(pair.0, pair.1) else {
        return Vec::new();
    };
    let records = d.records(pair.0, pair.1);
    block
        .entries()
        .map(|(i, j, v)| {
            let (row, col) = (&block.rows()[i], &block.cols()[j]);
            let found: Vec<OrbitRecord> =
                records.iter().filter(|o| &o.to_gen == row && &o.from_gen == col).map(|o| (*o).clone()).collect();
            assert!(!found.is_empty(), "nonzero entry ({row}, {col}) without a witnessing record");
            Witness { row: row.clone(), col: col.clone(), value: v.clone(), records: found }
        })
        .collect()
}
