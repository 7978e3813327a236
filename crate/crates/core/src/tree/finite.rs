use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::address::Address;
use crate::error::{Error, Result};

/// An explicit finite tree on vertices `0..n`, optionally labelled by the
/// addresses they came from. Vertex `0` is the root when the tree is used as
/// a presentation; children are ordered by vertex id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteTree {
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    labels: Option<Vec<Address>>,
    children: Vec<Vec<usize>>,
    parent: Vec<Option<usize>>,
}

impl FiniteTree {
    /// Builds a tree on `n` vertices, rejecting anything that is not connected
    /// and acyclic.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::MalformedTree("a tree needs at least one vertex".into()));
        }
        let mut adj = vec![Vec::new(); n];
        let mut seen = BTreeSet::new();
        let mut list = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::MalformedTree(format!("edge {u}-{v} leaves 0..{n}")));
            }
            if u == v {
                return Err(Error::MalformedTree(format!("loop at {u}")));
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(Error::MalformedTree(format!("repeated edge {u}-{v}")));
            }
            adj[u].push(v);
            adj[v].push(u);
            list.push(key);
        }
        if list.len() != n - 1 {
            return Err(Error::MalformedTree(format!(
                "{} edges on {n} vertices",
                list.len()
            )));
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        let mut parent = vec![None; n];
        let mut children = vec![Vec::new(); n];
        let mut visited = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        visited[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &w in &adj[u] {
                if !visited[w] {
                    visited[w] = true;
                    count += 1;
                    parent[w] = Some(u);
                    children[u].push(w);
                    queue.push_back(w);
                }
            }
        }
        if count != n {
            return Err(Error::MalformedTree("graph is disconnected".into()));
        }
        Ok(FiniteTree {
            adj,
            edges: list,
            labels: None,
            children,
            parent,
        })
    }

    /// Builds a tree from edges between labelled vertices. Vertices are
    /// numbered in label order.
    pub fn from_labelled_edges(
        vertices: impl IntoIterator<Item = Address>,
        edges: impl IntoIterator<Item = (Address, Address)>,
    ) -> Result<Self> {
        let mut set: BTreeSet<Address> = vertices.into_iter().collect();
        let edges: Vec<_> = edges.into_iter().collect();
        for (a, b) in &edges {
            set.insert(a.clone());
            set.insert(b.clone());
        }
        let labels: Vec<Address> = set.into_iter().collect();
        let index: BTreeMap<&Address, usize> =
            labels.iter().enumerate().map(|(i, a)| (a, i)).collect();
        let numbered: Vec<_> = edges.iter().map(|(a, b)| (index[a], index[b])).collect();
        let mut t = FiniteTree::new(labels.len(), numbered)?;
        t.labels = Some(labels);
        Ok(t)
    }

    pub(crate) fn with_labels(mut self, labels: Vec<Address>) -> Self {
        debug_assert_eq!(labels.len(), self.adj.len());
        self.labels = Some(labels);
        self
    }

    pub fn single_vertex() -> Self {
        FiniteTree::new(1, []).expect("one vertex is a tree")
    }

    /// The path on `n` vertices `0-1-…-(n-1)`.
    pub fn path(n: usize) -> Result<Self> {
        FiniteTree::new(n, (1..n).map(|i| (i - 1, i)))
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn labels(&self) -> Option<&[Address]> {
        self.labels.as_deref()
    }

    pub fn label(&self, v: usize) -> Option<&Address> {
        self.labels.as_ref().map(|l| &l[v])
    }

    /// Children of `v` in the rooted-at-0 orientation, by increasing id.
    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    /// The address of `v` when the tree is presented rooted at vertex 0.
    pub fn address_of(&self, mut v: usize) -> Address {
        let mut idx = Vec::new();
        while let Some(p) = self.parent[v] {
            let pos = self.children[p].iter().position(|&c| c == v).expect("child");
            idx.push(pos as u32);
            v = p;
        }
        idx.reverse();
        Address::from_indices(idx)
    }

    pub fn vertex_of(&self, a: &Address) -> Option<usize> {
        let mut v = 0;
        for &i in a.indices() {
            v = *self.children[v].get(i as usize)?;
        }
        Some(v)
    }

    /// Number of vertices of each degree.
    pub fn degree_histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for a in &self.adj {
            *h.entry(a.len()).or_insert(0) += 1;
        }
        h
    }

    /// Contracts every maximal path through degree-2 vertices to a single
    /// edge. A bare path collapses to one edge between its endpoints.
    pub fn suppress_degree_two(&self) -> FiniteTree {
        let n = self.vertex_count();
        let keep: Vec<usize> = (0..n).filter(|&v| self.degree(v) != 2).collect();
        if keep.is_empty() {
            // Unreachable for trees on ≥ 1 vertex, which always have a leaf
            // or are a single vertex.
            return self.clone();
        }
        let new_id: BTreeMap<usize, usize> =
            keep.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut edges = Vec::new();
        for &u in &keep {
            for &first in &self.adj[u] {
                let (mut prev, mut cur) = (u, first);
                while self.degree(cur) == 2 {
                    let next = if self.adj[cur][0] == prev {
                        self.adj[cur][1]
                    } else {
                        self.adj[cur][0]
                    };
                    prev = cur;
                    cur = next;
                }
                if u < cur {
                    edges.push((new_id[&u], new_id[&cur]));
                }
            }
        }
        let t = FiniteTree::new(keep.len(), edges).expect("contraction of a tree is a tree");
        match &self.labels {
            Some(l) => t.with_labels(keep.iter().map(|&v| l[v].clone()).collect()),
            None => t,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_cycles_and_forests() {
        assert!(FiniteTree::new(3, [(0, 1), (1, 2), (2, 0)]).is_err());
        assert!(FiniteTree::new(4, [(0, 1), (2, 3)]).is_err());
        assert!(FiniteTree::new(2, [(0, 0)]).is_err());
        assert!(FiniteTree::new(0, []).is_err());
    }

    #[test]
    fn addresses_follow_bfs_children() {
        let t = FiniteTree::new(5, [(0, 3), (0, 1), (1, 4), (1, 2)]).unwrap();
        assert_eq!(t.children(0), &[1, 3]);
        assert_eq!(t.address_of(4).to_string(), "01");
        assert_eq!(t.vertex_of(&"01".parse().unwrap()), Some(4));
        assert_eq!(t.vertex_of(&"2".parse().unwrap()), None);
    }

    #[test]
    fn suppression_of_subdivided_star() {
        // K_{1,3} with every edge subdivided once.
        let t = FiniteTree::new(7, [(0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6)]).unwrap();
        let s = t.suppress_degree_two();
        assert_eq!(s.vertex_count(), 4);
        assert_eq!(s.degree_histogram(), BTreeMap::from([(1, 3), (3, 1)]));
        let p = FiniteTree::path(5).unwrap().suppress_degree_two();
        assert_eq!(p.vertex_count(), 2);
        assert_eq!(p.edges().len(), 1);
    }
}
