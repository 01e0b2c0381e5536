//! Graphs with group-labeled edges. Lifting a path to the cover multiplies
//! the labels along it.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebra::group::{same_group, DeckGroup, GroupElement};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GainEdge {
    pub id: String,
    pub from: String,
    pub to: String,
    pub label: GroupElement,
}

/// One traversed edge; `reverse` walks it against its direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathStep {
    pub edge: String,
    pub reverse: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GainGraph {
    group: Arc<DeckGroup>,
    vertices: Vec<String>,
    edges: Vec<GainEdge>,
    /// Vertex standing for each Morse set, when designated.
    morse_vertices: BTreeMap<String, String>,
}

impl GainGraph {
    pub fn new(
        group: &Arc<DeckGroup>,
        vertices: Vec<String>,
        edges: Vec<GainEdge>,
        morse_vertices: BTreeMap<String, String>,
    ) -> Result<Self> {
        for e in &edges {
            for v in [&e.from, &e.to] {
                if !vertices.contains(v) {
                    return Err(Error::InvalidDecomposition(format!("edge '{}' uses unknown vertex '{v}'", e.id)));
                }
            }
            if !same_group(e.label.group(), group) {
                return Err(Error::GroupMismatch);
            }
        }
        for (i, e) in edges.iter().enumerate() {
            if edges[..i].iter().any(|f| f.id == e.id) {
                return Err(Error::InvalidDecomposition(format!("edge id '{}' is used twice", e.id)));
            }
        }
        for v in morse_vertices.values() {
            if !vertices.contains(v) {
                return Err(Error::InvalidDecomposition(format!("Morse set vertex '{v}' is not in the graph")));
            }
        }
        Ok(GainGraph { group: Arc::clone(group), vertices, edges, morse_vertices })
    }

    pub fn group(&self) -> &Arc<DeckGroup> {
        &self.group
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[GainEdge] {
        &self.edges
    }

    pub fn edge(&self, id: &str) -> Option<&GainEdge> {
        self.edges.iter().find(|e| e.id == id)
    }

    pub fn morse_vertex(&self, set: &str) -> Option<&str> {
        self.morse_vertices.get(set).map(String::as_str)
    }

    /// Start and end vertex of a nonempty path.
    pub fn endpoints(&self, path: &[PathStep]) -> Result<Option<(String, String)>> {
        let mut ends = None;
        for step in path {
            let e = self.lookup(step)?;
            let (a, b) = if step.reverse { (&e.to, &e.from) } else { (&e.from, &e.to) };
            ends = match ends {
                None => Some((a.clone(), b.clone())),
                Some((start, _)) => Some((start, b.clone())),
            };
        }
        Ok(ends)
    }

    fn lookup(&self, step: &PathStep) -> Result<&GainEdge> {
        self.edge(&step.edge)
            .ok_or_else(|| Error::NonConsecutivePath(format!("unknown edge '{}'", step.edge)))
    }

    /// Product of the labels along `path`, inverted on reversed steps.
    pub fn lift_path(&self, path: &[PathStep]) -> Result<GroupElement> {
        let mut acc = GroupElement::identity(&self.group);
        let mut at: Option<&str> = None;
        for (i, step) in path.iter().enumerate() {
            let e = self.lookup(step)?;
            let (start, end, label) = if step.reverse {
                (e.to.as_str(), e.from.as_str(), e.label.inverse())
            } else {
                (e.from.as_str(), e.to.as_str(), e.label.clone())
            };
            if let Some(v) = at {
                if v != start {
                    return Err(Error::NonConsecutivePath(format!(
                        "step {i} starts at '{start}' but the path is at '{v}'"
                    )));
                }
            }
            acc = acc.mul(&label)?;
            at = Some(end);
        }
        Ok(acc)
    }
}
