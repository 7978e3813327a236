//! Locally finite trees presented by a deterministic children-count rule.
//!
//! A presentation fixes a root so vertices can be named by [`Address`]es, but
//! everything exported here (distances, cones, ends) is root-independent.

mod ends;
mod finite;

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

pub use ends::{end_prefix_of_walk, Cone, EndApprox, RaySpec};
pub use finite::FiniteTree;

use crate::address::Address;
use crate::error::{Error, Result};

/// Default bound on the number of leaves one decoration may add per vertex.
pub const DEFAULT_DECORATION_CAP: usize = 16;

/// A tree term: a base family or a combinator applied to a smaller term.
///
/// Index layout used by the combinators:
/// * `double_ray`: the root is `x₀`, child `0` starts the positive side
///   (`x₁ = 0`, `x₂ = 00`, …) and child `1` the negative side (`x₋₁ = 1`,
///   `x₋₂ = 10`, …).
/// * `cubic`: the root has children `0, 1, 2`, every other vertex `0, 1`.
/// * `attach_path`/`attach_ray` add one new child at `at`, with index equal
///   to the old children count; the new vertices continue through child `0`.
/// * `decorate` appends `add` leaf children after the existing ones.
/// * `reroot` orders the neighbours of each vertex as (old parent, old
///   children in order), skipping the vertex it was reached from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeTerm {
    Ray,
    DoubleRay,
    Binary,
    Cubic,
    Finite(Arc<FiniteTree>),
    AttachPath {
        inner: Box<TreeTerm>,
        at: Address,
        len: usize,
    },
    AttachRay {
        inner: Box<TreeTerm>,
        at: Address,
    },
    Decorate {
        inner: Box<TreeTerm>,
        modulus: usize,
        residue: usize,
        add: usize,
    },
    Reroot {
        inner: Box<TreeTerm>,
        at: Address,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct VertexInfo {
    children: usize,
    decoration_leaf: bool,
}

impl VertexInfo {
    fn plain(children: usize) -> Self {
        VertexInfo {
            children,
            decoration_leaf: false,
        }
    }
}

impl TreeTerm {
    fn info(&self, a: &[u32]) -> Option<VertexInfo> {
        match self {
            TreeTerm::Ray => a.iter().all(|&i| i == 0).then(|| VertexInfo::plain(1)),
            TreeTerm::DoubleRay => match a.split_first() {
                None => Some(VertexInfo::plain(2)),
                Some((&h, rest)) => {
                    (h < 2 && rest.iter().all(|&i| i == 0)).then(|| VertexInfo::plain(1))
                }
            },
            TreeTerm::Binary => a.iter().all(|&i| i < 2).then(|| VertexInfo::plain(2)),
            TreeTerm::Cubic => match a.split_first() {
                None => Some(VertexInfo::plain(3)),
                Some((&h, rest)) => {
                    (h < 3 && rest.iter().all(|&i| i < 2)).then(|| VertexInfo::plain(2))
                }
            },
            TreeTerm::Finite(t) => {
                let mut v = 0;
                for &i in a {
                    v = *t.children(v).get(i as usize)?;
                }
                Some(VertexInfo::plain(t.children(v).len()))
            }
            TreeTerm::AttachPath { inner, at, len } => attach_info(inner, at, Some(*len), a),
            TreeTerm::AttachRay { inner, at } => attach_info(inner, at, None, a),
            TreeTerm::Decorate {
                inner,
                modulus,
                residue,
                add,
            } => {
                let qualifies = |depth: usize, i: &VertexInfo| {
                    depth % modulus == *residue && !i.decoration_leaf
                };
                if let Some(mut i) = inner.info(a) {
                    if qualifies(a.len(), &i) {
                        i.children += add;
                    }
                    return Some(i);
                }
                let (&last, parent) = a.split_last()?;
                let p = inner.info(parent)?;
                let last = last as usize;
                (qualifies(parent.len(), &p) && last >= p.children && last < p.children + add)
                    .then_some(VertexInfo {
                        children: 0,
                        decoration_leaf: true,
                    })
            }
            TreeTerm::Reroot { inner, at } => {
                let x = reroot_to_inner(inner, at, a)?;
                let i = inner.info(x.indices())?;
                let degree = i.children + usize::from(!x.is_root());
                Some(VertexInfo {
                    children: degree - usize::from(!a.is_empty()),
                    decoration_leaf: i.decoration_leaf,
                })
            }
        }
    }

    fn children_count(&self, a: &[u32]) -> Option<usize> {
        self.info(a).map(|i| i.children)
    }

    fn is_finite(&self) -> bool {
        match self {
            TreeTerm::Ray | TreeTerm::DoubleRay | TreeTerm::Binary | TreeTerm::Cubic => false,
            TreeTerm::AttachRay { .. } => false,
            TreeTerm::Finite(_) => true,
            TreeTerm::AttachPath { inner, .. }
            | TreeTerm::Decorate { inner, .. }
            | TreeTerm::Reroot { inner, .. } => inner.is_finite(),
        }
    }
}

fn attach_info(inner: &TreeTerm, at: &Address, len: Option<usize>, a: &[u32]) -> Option<VertexInfo> {
    let k = at.depth();
    if a.len() > k && a.starts_with(at.indices()) {
        let base = inner.children_count(at.indices())?;
        if a[k] as usize == base {
            let rest = &a[k + 1..];
            if !rest.iter().all(|&i| i == 0) {
                return None;
            }
            let j = rest.len() + 1;
            return match len {
                None => Some(VertexInfo::plain(1)),
                Some(l) if j < l => Some(VertexInfo::plain(1)),
                Some(l) if j == l => Some(VertexInfo::plain(0)),
                Some(_) => None,
            };
        }
    }
    let mut i = inner.info(a)?;
    if a == at.indices() {
        i.children += 1;
    }
    Some(i)
}

/// Neighbours of `x` in `term`, ordered (parent, children…).
fn ordered_neighbors(term: &TreeTerm, x: &Address) -> Option<Vec<Address>> {
    let cc = term.children_count(x.indices())?;
    let mut out = Vec::with_capacity(cc + 1);
    if let Some(p) = x.parent() {
        out.push(p);
    }
    out.extend((0..cc as u32).map(|i| x.child(i)));
    Some(out)
}

fn reroot_to_inner(inner: &TreeTerm, at: &Address, a: &[u32]) -> Option<Address> {
    let mut cur = at.clone();
    let mut prev: Option<Address> = None;
    for &idx in a {
        let next = ordered_neighbors(inner, &cur)?
            .into_iter()
            .filter(|n| Some(n) != prev.as_ref())
            .nth(idx as usize)?;
        prev = Some(std::mem::replace(&mut cur, next));
    }
    Some(cur)
}

fn reroot_from_inner(inner: &TreeTerm, at: &Address, y: &Address) -> Option<Address> {
    inner.info(y.indices())?;
    let path = address_path(at, y);
    let mut idx = Vec::with_capacity(path.len().saturating_sub(1));
    for w in 1..path.len() {
        let cur = &path[w - 1];
        let next = &path[w];
        let prev = (w >= 2).then(|| &path[w - 2]);
        let has_parent_slot = !cur.is_root() && prev != cur.parent().as_ref();
        let i = if Some(next) == cur.parent().as_ref() {
            0
        } else {
            let c = next.last().expect("child");
            let skipped = prev
                .filter(|p| p.parent().as_ref() == Some(cur))
                .is_some_and(|p| p.last().expect("child") < c);
            c + u32::from(has_parent_slot) - u32::from(skipped)
        };
        idx.push(i);
    }
    Some(Address::from_indices(idx))
}

/// The unique path between two addresses, by address arithmetic alone.
fn address_path(u: &Address, v: &Address) -> Vec<Address> {
    let k = u.common_prefix_len(v);
    let mut out = Vec::with_capacity(u.depth() + v.depth() - 2 * k + 1);
    for d in (k..=u.depth()).rev() {
        out.push(u.truncated(d));
    }
    for d in k + 1..=v.depth() {
        out.push(v.truncated(d));
    }
    out
}

/// An immutable tree presentation. Cloning is cheap.
#[derive(Clone)]
pub struct Tree {
    term: Arc<TreeTerm>,
    gallery_name: Option<Arc<str>>,
}

impl PartialEq for Tree {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.term, &other.term) || self.term == other.term
    }
}

impl Eq for Tree {}

impl fmt::Debug for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tree({self})")
    }
}

impl Tree {
    /// Builds a presentation, checking combinator arguments. Decorations may
    /// add at most `DEFAULT_DECORATION_CAP` children per vertex.
    pub fn build(term: TreeTerm) -> Result<Tree> {
        Tree::build_with_cap(term, DEFAULT_DECORATION_CAP)
    }

    pub fn build_with_cap(term: TreeTerm, cap: usize) -> Result<Tree> {
        check_term(&term, cap)?;
        Ok(Tree {
            term: Arc::new(term),
            gallery_name: None,
        })
    }

    pub fn ray() -> Tree {
        Tree::build(TreeTerm::Ray).expect("base term")
    }

    pub fn double_ray() -> Tree {
        Tree::build(TreeTerm::DoubleRay).expect("base term")
    }

    pub fn binary() -> Tree {
        Tree::build(TreeTerm::Binary).expect("base term")
    }

    pub fn cubic() -> Tree {
        Tree::build(TreeTerm::Cubic).expect("base term")
    }

    pub fn finite(t: FiniteTree) -> Tree {
        Tree::build(TreeTerm::Finite(Arc::new(t))).expect("finite trees are valid terms")
    }

    pub fn with_gallery_name(mut self, name: impl Into<Arc<str>>) -> Tree {
        self.gallery_name = Some(name.into());
        self
    }

    pub fn gallery_name(&self) -> Option<&str> {
        self.gallery_name.as_deref()
    }

    pub fn term(&self) -> &TreeTerm {
        &self.term
    }

    pub fn attach_path(&self, at: Address, len: usize) -> Result<Tree> {
        Tree::build(TreeTerm::AttachPath {
            inner: Box::new((*self.term).clone()),
            at,
            len,
        })
    }

    pub fn attach_ray(&self, at: Address) -> Result<Tree> {
        Tree::build(TreeTerm::AttachRay {
            inner: Box::new((*self.term).clone()),
            at,
        })
    }

    pub fn decorate(&self, modulus: usize, residue: usize, add: usize) -> Result<Tree> {
        Tree::build(TreeTerm::Decorate {
            inner: Box::new((*self.term).clone()),
            modulus,
            residue,
            add,
        })
    }

    /// The same tree presented with `at` as its root.
    pub fn reroot(&self, at: Address) -> Result<Tree> {
        Tree::build(TreeTerm::Reroot {
            inner: Box::new((*self.term).clone()),
            at,
        })
    }

    /// For a tree built by [`Tree::reroot`]: the presentation it was built from.
    pub fn reroot_inner(&self) -> Option<Tree> {
        match &*self.term {
            TreeTerm::Reroot { inner, .. } => Some(Tree {
                term: Arc::new((**inner).clone()),
                gallery_name: None,
            }),
            _ => None,
        }
    }

    /// Translates an address of this rerooted tree to the inner presentation.
    pub fn reroot_to_inner(&self, a: &Address) -> Option<Address> {
        match &*self.term {
            TreeTerm::Reroot { inner, at } => reroot_to_inner(inner, at, a.indices()),
            _ => None,
        }
    }

    /// Translates an inner address to this rerooted tree.
    pub fn reroot_from_inner(&self, y: &Address) -> Option<Address> {
        match &*self.term {
            TreeTerm::Reroot { inner, at } => reroot_from_inner(inner, at, y),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.term.is_finite()
    }

    /// Number of children of `a`, or `None` if `a` is not a vertex.
    pub fn children_count(&self, a: &Address) -> Option<usize> {
        self.term.children_count(a.indices())
    }

    pub fn is_valid(&self, a: &Address) -> bool {
        self.children_count(a).is_some()
    }

    pub fn check(&self, a: &Address) -> Result<()> {
        if self.is_valid(a) {
            Ok(())
        } else {
            Err(Error::InvalidAddress(a.clone()))
        }
    }

    /// True if `a` is a leaf added by a decoration combinator.
    pub fn is_decoration_leaf(&self, a: &Address) -> bool {
        self.term
            .info(a.indices())
            .is_some_and(|i| i.decoration_leaf)
    }

    /// Neighbours of `a`: its parent first (if any), then its children.
    pub fn neighbors(&self, a: &Address) -> Result<Vec<Address>> {
        ordered_neighbors(&self.term, a).ok_or_else(|| Error::InvalidAddress(a.clone()))
    }

    pub fn degree(&self, a: &Address) -> Result<usize> {
        let cc = self
            .children_count(a)
            .ok_or_else(|| Error::InvalidAddress(a.clone()))?;
        Ok(cc + usize::from(!a.is_root()))
    }

    /// The unique `u`–`v` path, endpoints included.
    pub fn path(&self, u: &Address, v: &Address) -> Result<Vec<Address>> {
        self.check(u)?;
        self.check(v)?;
        Ok(address_path(u, v))
    }

    pub fn distance(&self, u: &Address, v: &Address) -> Result<usize> {
        self.check(u)?;
        self.check(v)?;
        Ok(distance(u, v))
    }

    pub fn cone(&self, apex: Address, branch: Address) -> Result<Cone> {
        self.check(&apex)?;
        self.check(&branch)?;
        Cone::new(apex, branch)
    }

    /// Whether `v` lies in the component of `T − apex` containing the branch.
    pub fn cone_contains(&self, c: &Cone, v: &Address) -> Result<bool> {
        self.check(c.apex())?;
        self.check(c.branch())?;
        self.check(v)?;
        if v == c.apex() {
            return Err(Error::InvalidArgument(format!(
                "{v} is the apex of the cone and lies in no component"
            )));
        }
        Ok(&step_toward(c.apex(), v) == c.branch())
    }

    /// Vertices of depth ≤ `depth`, lazily, in breadth-first order.
    pub fn bfs(&self, depth: usize) -> Bfs<'_> {
        Bfs {
            tree: self,
            depth,
            queue: VecDeque::from([Address::root()]),
        }
    }

    /// The induced subtree on all vertices of depth ≤ `depth`, labelled by
    /// address in breadth-first order.
    pub fn truncate(&self, depth: usize) -> FiniteTree {
        self.truncate_with_budget(depth, usize::MAX)
            .expect("unbounded budget")
    }

    /// As [`Tree::truncate`], failing once more than `max_vertices` vertices
    /// would be produced.
    pub fn truncate_with_budget(&self, depth: usize, max_vertices: usize) -> Result<FiniteTree> {
        let mut labels = Vec::new();
        let mut edges = Vec::new();
        let mut index = std::collections::HashMap::new();
        for a in self.bfs(depth) {
            if labels.len() >= max_vertices {
                return Err(Error::Budget(format!(
                    "truncation at depth {depth} exceeds {max_vertices} vertices"
                )));
            }
            let id = labels.len();
            if let Some(p) = a.parent() {
                edges.push((index[&p], id));
            }
            index.insert(a.clone(), id);
            labels.push(a);
        }
        Ok(FiniteTree::new(labels.len(), edges)
            .expect("truncation is a tree")
            .with_labels(labels))
    }

    /// The depth-`depth` prefix of the end containing the ray `r`.
    pub fn end_prefix(&self, r: &RaySpec, depth: usize) -> Result<EndApprox> {
        let budget = 2 * (r.start().depth() + depth) + 4;
        end_prefix_of_walk(self, r.walk(self).take(budget), depth)
    }
}

/// Distance between two addresses of the same presentation.
pub(crate) fn distance(u: &Address, v: &Address) -> usize {
    let k = u.common_prefix_len(v);
    u.depth() + v.depth() - 2 * k
}

/// The vertex after `u` on the path from `u` to `v` (`u ≠ v`).
pub(crate) fn step_toward(u: &Address, v: &Address) -> Address {
    debug_assert_ne!(u, v);
    if u.is_prefix_of(v) {
        u.child(v.indices()[u.depth()])
    } else {
        u.parent().expect("non-root when v is not below u")
    }
}

pub struct Bfs<'a> {
    tree: &'a Tree,
    depth: usize,
    queue: VecDeque<Address>,
}

impl Iterator for Bfs<'_> {
    type Item = Address;

    fn next(&mut self) -> Option<Address> {
        let a = self.queue.pop_front()?;
        if a.depth() < self.depth {
            let cc = self.tree.children_count(&a).unwrap_or(0);
            self.queue.extend((0..cc as u32).map(|i| a.child(i)));
        }
        Some(a)
    }
}

fn check_term(term: &TreeTerm, cap: usize) -> Result<()> {
    match term {
        TreeTerm::Ray | TreeTerm::DoubleRay | TreeTerm::Binary | TreeTerm::Cubic => Ok(()),
        TreeTerm::Finite(_) => Ok(()),
        TreeTerm::AttachPath { inner, at, len } => {
            check_term(inner, cap)?;
            if *len == 0 {
                return Err(Error::MalformedTree("attach_path needs len ≥ 1".into()));
            }
            check_at(inner, at)
        }
        TreeTerm::AttachRay { inner, at } | TreeTerm::Reroot { inner, at } => {
            check_term(inner, cap)?;
            check_at(inner, at)
        }
        TreeTerm::Decorate {
            inner,
            modulus,
            residue,
            add,
        } => {
            check_term(inner, cap)?;
            if *modulus == 0 || residue >= modulus {
                return Err(Error::MalformedTree(format!(
                    "decorate needs 0 ≤ residue < mod, got residue={residue} mod={modulus}"
                )));
            }
            if *add > cap {
                return Err(Error::DecorationCap {
                    requested: *add,
                    cap,
                });
            }
            Ok(())
        }
    }
}

fn check_at(inner: &TreeTerm, at: &Address) -> Result<()> {
    if inner.info(at.indices()).is_some() {
        Ok(())
    } else {
        Err(Error::InvalidAddress(at.clone()))
    }
}

impl fmt::Display for TreeTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeTerm::Ray => f.write_str("ray"),
            TreeTerm::DoubleRay => f.write_str("double_ray"),
            TreeTerm::Binary => f.write_str("binary"),
            TreeTerm::Cubic => f.write_str("cubic"),
            TreeTerm::Finite(t) => {
                f.write_str("finite{")?;
                if t.edges().is_empty() {
                    f.write_str("0")?;
                }
                for (k, (u, v)) in t.edges().iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{u}-{v}")?;
                }
                f.write_str("}")
            }
            TreeTerm::AttachPath { inner, at, len } => {
                write!(f, "{inner}.attach_path(at={at}, len={len})")
            }
            TreeTerm::AttachRay { inner, at } => write!(f, "{inner}.attach_ray(at={at})"),
            TreeTerm::Decorate {
                inner,
                modulus,
                residue,
                add,
            } => write!(f, "{inner}.decorate(mod={modulus}, residue={residue}, add={add})"),
            TreeTerm::Reroot { inner, at } => write!(f, "{inner}.reroot(at={at})"),
        }
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.gallery_name {
            Some(n) => f.write_str(n),
            None => write!(f, "{}", self.term),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::address::addr;

    #[test]
    fn base_children_counts() {
        assert_eq!(Tree::ray().children_count(&addr("0000")), Some(1));
        assert_eq!(Tree::ray().children_count(&addr("01")), None);
        let d = Tree::double_ray();
        assert_eq!(d.children_count(&Address::root()), Some(2));
        assert_eq!(d.children_count(&addr("100")), Some(1));
        assert!(!d.is_valid(&addr("11")));
        let c = Tree::cubic();
        assert_eq!(c.degree(&Address::root()).unwrap(), 3);
        assert_eq!(c.degree(&addr("210")).unwrap(), 3);
        assert!(!c.is_valid(&addr("22")));
    }

    #[test]
    fn path_examples() {
        let r = Tree::ray();
        assert_eq!(r.path(&Address::root(), &Address::root()).unwrap(), vec![Address::root()]);
        assert_eq!(
            r.path(&addr("ε"), &addr("000")).unwrap(),
            vec![addr("ε"), addr("0"), addr("00"), addr("000")]
        );
        let b = Tree::binary();
        assert_eq!(
            b.path(&addr("00"), &addr("11")).unwrap(),
            vec![addr("00"), addr("0"), addr("ε"), addr("1"), addr("11")]
        );
        assert!(matches!(b.path(&addr("2"), &addr("1")), Err(Error::InvalidAddress(_))));
    }

    #[test]
    fn cone_examples() {
        let b = Tree::binary();
        let c = b.cone(Address::root(), addr("0")).unwrap();
        assert!(b.cone_contains(&c, &addr("01")).unwrap());
        assert!(!b.cone_contains(&c, &addr("1")).unwrap());
        assert!(b.cone_contains(&c, &Address::root()).is_err());
        let r = Tree::ray();
        let c = r.cone(addr("00000"), addr("000000")).unwrap();
        assert!(r.cone_contains(&c, &addr("000000000")).unwrap());
        assert!(!r.cone_contains(&c, &addr("0")).unwrap());
        // Upward cone.
        let c = b.cone(addr("01"), addr("0")).unwrap();
        assert!(b.cone_contains(&c, &addr("1")).unwrap());
        assert!(!b.cone_contains(&c, &addr("010")).unwrap());
    }

    #[test]
    fn truncation_sizes() {
        assert_eq!(Tree::binary().truncate(0).vertex_count(), 1);
        assert_eq!(Tree::binary().truncate(2).vertex_count(), 7);
        assert_eq!(Tree::cubic().truncate(3).vertex_count(), 1 + 3 + 6 + 12);
        assert!(Tree::cubic().truncate_with_budget(10, 100).is_err());
    }

    #[test]
    fn attach_and_decorate_layout() {
        let t = Tree::binary().attach_path(Address::root(), 3).unwrap();
        assert_eq!(t.children_count(&Address::root()), Some(3));
        assert_eq!(t.children_count(&addr("2")), Some(1));
        assert_eq!(t.children_count(&addr("200")), Some(0));
        assert!(!t.is_valid(&addr("2000")));
        assert!(!t.is_valid(&addr("21")));

        let d = Tree::binary()
            .attach_ray(Address::root())
            .unwrap()
            .decorate(3, 1, 4)
            .unwrap()
            .decorate(3, 2, 8)
            .unwrap();
        assert_eq!(d.degree(&Address::root()).unwrap(), 3);
        assert_eq!(d.degree(&addr("0")).unwrap(), 7);
        assert_eq!(d.degree(&addr("2")).unwrap(), 6);
        assert_eq!(d.degree(&addr("01")).unwrap(), 11);
        assert_eq!(d.degree(&addr("20")).unwrap(), 10);
        assert_eq!(d.degree(&addr("011")).unwrap(), 3);
        // Leaves added at depth 1 sit at depth 2 but are not decorated again.
        assert!(d.is_decoration_leaf(&addr("05")));
        assert_eq!(d.degree(&addr("05")).unwrap(), 1);
        assert!(!d.is_valid(&addr("06")));

        assert!(matches!(
            Tree::binary().decorate(2, 0, 17),
            Err(Error::DecorationCap { requested: 17, cap: 16 })
        ));
        assert!(Tree::binary().decorate(2, 2, 1).is_err());
        assert!(Tree::binary().attach_path(addr("2"), 1).is_err());
    }

    #[test]
    fn reroot_round_trip() {
        let t = Tree::binary().attach_path(Address::root(), 2).unwrap();
        let r = t.reroot(addr("0")).unwrap();
        // New root had parent ε and children 00, 01.
        assert_eq!(r.children_count(&Address::root()), Some(3));
        assert_eq!(r.reroot_to_inner(&addr("0")), Some(Address::root()));
        // ε's remaining neighbours: 1, 2 (path start).
        assert_eq!(r.children_count(&addr("0")), Some(2));
        assert_eq!(r.reroot_to_inner(&addr("01")), Some(addr("2")));
        for a in t.bfs(4) {
            let b = r.reroot_from_inner(&a).unwrap();
            assert_eq!(r.reroot_to_inner(&b), Some(a.clone()), "at {a}");
            assert_eq!(t.degree(&a).unwrap(), r.degree(&b).unwrap());
        }
    }

    #[test]
    fn finiteness() {
        assert!(!Tree::binary().is_finite());
        assert!(Tree::finite(FiniteTree::path(3).unwrap()).is_finite());
        assert!(!Tree::finite(FiniteTree::path(3).unwrap())
            .attach_ray(Address::root())
            .unwrap()
            .is_finite());
    }
}
