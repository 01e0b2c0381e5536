//! Finite strict partial orders, their intervals and adjacent pairs.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// A strict partial order on named elements, stored as its transitive
/// closure. `less(a, b)` means `a < b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poset {
    elements: Vec<String>,
    below: Vec<Vec<bool>>,
}

impl Poset {
    /// Closes `relations` transitively. Each pair `(a, b)` asserts `a < b`.
    pub fn new(elements: Vec<String>, relations: &[(usize, usize)]) -> Result<Self> {
        let n = elements.len();
        let mut below = vec![vec![false; n]; n];
        for &(a, b) in relations {
            if a >= n || b >= n {
                return Err(Error::InvalidDecomposition(format!("relation ({a}, {b}) outside the poset")));
            }
            below[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if below[i][k] {
                    for j in 0..n {
                        if below[k][j] {
                            below[i][j] = true;
                        }
                    }
                }
            }
        }
        if let Some(i) = (0..n).find(|&i| below[i][i]) {
            return Err(Error::NotAdmissible(format!("the order relation has a cycle through '{}'", elements[i])));
        }
        Ok(Poset { elements, below })
    }

    pub fn from_names(elements: &[&str], relations: &[(&str, &str)]) -> Result<Self> {
        let elements: Vec<String> = elements.iter().map(|s| s.to_string()).collect();
        let idx = |s: &str| {
            elements
                .iter()
                .position(|e| e == s)
                .ok_or_else(|| Error::InvalidDecomposition(format!("unknown poset element '{s}'")))
        };
        let rel = relations.iter().map(|(a, b)| Ok((idx(a)?, idx(b)?))).collect::<Result<Vec<_>>>()?;
        Self::new(elements, &rel)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == id)
    }

    pub fn less(&self, a: usize, b: usize) -> bool {
        self.below[a][b]
    }

    pub fn less_by_id(&self, a: &str, b: &str) -> bool {
        match (self.index_of(a), self.index_of(b)) {
            (Some(a), Some(b)) => self.less(a, b),
            _ => false,
        }
    }

    /// All strict relations `(a, b)` with `a < b`, in index order.
    pub fn relations(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|&(a, b)| self.below[a][b]).collect()
    }

    /// Whether `set` is convex: `a, b ∈ set` and `a < c < b` force `c ∈ set`.
    pub fn is_interval(&self, set: &[usize]) -> bool {
        let members: BTreeSet<usize> = set.iter().copied().collect();
        for &a in &members {
            for &b in &members {
                if !self.below[a][b] {
                    continue;
                }
                if (0..self.len()).any(|c| self.below[a][c] && self.below[c][b] && !members.contains(&c)) {
                    return false;
                }
            }
        }
        true
    }

    /// Every interval, the empty set included, in order of the bitmask of
    /// members. Exponential in the size of the poset.
    pub fn intervals(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        assert!(n < 32, "interval enumeration is limited to posets with fewer than 32 elements");
        (0u32..1 << n)
            .map(|mask| (0..n).filter(|&i| mask >> i & 1 == 1).collect::<Vec<_>>())
            .filter(|s| self.is_interval(s))
            .collect()
    }

    /// Ordered pairs `(I, J)` of disjoint nonempty intervals whose union is
    /// an interval and with no element of `J` below an element of `I`.
    pub fn adjacent_pairs(&self) -> Vec<(Vec<usize>, Vec<usize>)> {
        let intervals: Vec<Vec<usize>> = self.intervals().into_iter().filter(|s| !s.is_empty()).collect();
        let mut out = Vec::new();
        for i in &intervals {
            for j in &intervals {
                if i.iter().any(|x| j.contains(x)) {
                    continue;
                }
                if j.iter().any(|&b| i.iter().any(|&a| self.below[b][a])) {
                    continue;
                }
                let union: Vec<usize> = i.iter().chain(j).copied().collect();
                if self.is_interval(&union) {
                    out.push((i.clone(), j.clone()));
                }
            }
        }
        out
    }

    /// Two elements are adjacent when they are distinct and nothing lies
    /// strictly between them. Incomparable elements are adjacent.
    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        if a == b {
            return false;
        }
        !(0..self.len()).any(|c| {
            (self.below[a][c] && self.below[c][b]) || (self.below[b][c] && self.below[c][a])
        })
    }

    /// Whether `order` (lowest first) is a linear extension.
    pub fn is_linear_extension(&self, order: &[usize]) -> bool {
        if order.len() != self.len() || order.iter().collect::<BTreeSet<_>>().len() != self.len() {
            return false;
        }
        let pos: Vec<usize> = {
            let mut p = vec![0; self.len()];
            for (i, &x) in order.iter().enumerate() {
                p[x] = i;
            }
            p
        };
        self.relations().into_iter().all(|(a, b)| pos[a] < pos[b])
    }

    /// A deterministic linear extension: repeatedly take the minimal
    /// element with the smallest index.
    pub fn linear_extension(&self) -> Vec<usize> {
        let n = self.len();
        let mut placed = vec![false; n];
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let next = (0..n)
                .find(|&i| !placed[i] && (0..n).all(|j| placed[j] || !self.below[j][i]))
                .expect("a finite poset has a minimal element");
            placed[next] = true;
            out.push(next);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain3() -> Poset {
        Poset::from_names(&["1", "2", "3"], &[("1", "2"), ("2", "3")]).unwrap()
    }

    #[test]
    fn transitive_closure() {
        let p = chain3();
        assert!(p.less(0, 2));
        assert!(!p.less(2, 0));
    }

    #[test]
    fn cycle_is_rejected() {
        let err = Poset::from_names(&["a", "b"], &[("a", "b"), ("b", "a")]).unwrap_err();
        assert!(err.to_string().contains("not an admissible decomposition"));
    }

    #[test]
    fn chain_intervals() {
        let p = chain3();
        let iv = p.intervals();
        for s in [vec![0], vec![0, 1], vec![1, 2], vec![0, 1, 2]] {
            assert!(iv.contains(&s));
        }
        assert!(!iv.contains(&vec![0, 2]));
    }

    #[test]
    fn antichain_intervals() {
        let p = Poset::from_names(&["1", "2"], &[]).unwrap();
        assert_eq!(p.intervals().len(), 4);
    }

    #[test]
    fn chain_adjacency() {
        let p = chain3();
        let pairs = p.adjacent_pairs();
        assert!(pairs.contains(&(vec![0], vec![1])));
        assert!(!pairs.contains(&(vec![1], vec![0])));
        assert!(p.adjacent(0, 1));
        assert!(!p.adjacent(0, 2));
    }

    #[test]
    fn linear_extension_respects_order() {
        let p = Poset::from_names(&["x", "y", "z"], &[("z", "y"), ("y", "x")]).unwrap();
        let ext = p.linear_extension();
        assert_eq!(ext, vec![2, 1, 0]);
        assert!(p.is_linear_extension(&ext));
        assert!(!p.is_linear_extension(&[0, 1, 2]));
    }
}
