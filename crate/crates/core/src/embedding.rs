//! Self-embeddings: injective, adjacency-preserving vertex maps of a tree into
//! itself.
//!
//! Every built-in rule documents the index layout it relies on; see
//! [`TreeTerm`] for the layouts of the trees themselves. An embedding may
//! carry an inverse hint, a partial rule that proposes preimages; a proposed
//! preimage is always re-checked against the map.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::address::Address;
use crate::error::{Error, Result};
use crate::tree::{end_prefix_of_walk, EndApprox, RaySpec, Tree, TreeTerm};

/// Generator indices; words act outer-first, so `[i, j]` is `g_i ∘ g_j`.
pub type Word = Vec<usize>;

type MapFn = dyn Fn(&Address) -> Address + Send + Sync;
type InverseFn = dyn Fn(&Address) -> Option<Address> + Send + Sync;

/// An eventually periodic index sequence `prefix (period)*`, used to name
/// ends of the cubic tree by their root rays.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PeriodicEnd {
    prefix: Vec<u32>,
    period: Vec<u32>,
}

impl PeriodicEnd {
    pub fn new(prefix: Vec<u32>, period: Vec<u32>) -> Result<PeriodicEnd> {
        if period.is_empty() {
            return Err(Error::InvalidArgument("periodic end needs a nonempty period".into()));
        }
        Ok(PeriodicEnd { prefix, period })
    }

    pub fn symbol(&self, n: usize) -> u32 {
        match self.prefix.get(n) {
            Some(&s) => s,
            None => self.period[(n - self.prefix.len()) % self.period.len()],
        }
    }

    /// The vertex at depth `n` on the root ray.
    pub fn vertex(&self, n: usize) -> Address {
        Address::from_indices((0..n).map(|k| self.symbol(k)).collect::<Vec<_>>())
    }

    /// Length of the common prefix with `other`, or `None` if they agree
    /// forever.
    pub fn divergence(&self, other: &PeriodicEnd) -> Option<usize> {
        let lcm = lcm(self.period.len(), other.period.len());
        let bound = self.prefix.len().max(other.prefix.len()) + lcm;
        (0..bound).find(|&n| self.symbol(n) != other.symbol(n))
    }

    pub fn as_end(&self, depth: usize) -> EndApprox {
        EndApprox::new(self.vertex(depth))
    }

    /// Length of the common prefix of `a` with this ray.
    fn common_len(&self, a: &Address) -> usize {
        a.indices()
            .iter()
            .enumerate()
            .take_while(|&(n, &i)| self.symbol(n) == i)
            .count()
    }
}

fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

fn digits(f: &mut fmt::Formatter<'_>, s: &[u32]) -> fmt::Result {
    if s.iter().all(|&i| i < 36) {
        for &i in s {
            write!(f, "{}", char::from_digit(i, 36).expect("digit"))?;
        }
        Ok(())
    } else {
        let parts: Vec<String> = s.iter().map(u32::to_string).collect();
        write!(f, "[{}]", parts.join("."))
    }
}

impl fmt::Display for PeriodicEnd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        digits(f, &self.prefix)?;
        f.write_str("(")?;
        digits(f, &self.period)?;
        f.write_str(")*")
    }
}

impl FromStr for PeriodicEnd {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("cannot parse periodic end `{s}`"));
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let body = t.strip_suffix(")*").ok_or_else(bad)?;
        let (pre, per) = body.split_once('(').ok_or_else(bad)?;
        let parse = |p: &str| -> Result<Vec<u32>> {
            if p.starts_with('[') {
                let a: Address = p.parse().map_err(|_| bad())?;
                return Ok(a.indices().to_vec());
            }
            p.chars().map(|c| c.to_digit(36).ok_or_else(bad)).collect()
        };
        PeriodicEnd::new(parse(pre)?, parse(per)?)
    }
}

/// Translation of the cubic tree along the double ray joining two ends.
///
/// With `a_0` the vertex where the two root rays part, `a_i` the axis vertex
/// `i` steps towards `plus` (negative `i` towards `minus`), every vertex is
/// `(i, s)`: its nearest axis vertex `a_i` and the route `s` from the
/// off-axis neighbour of `a_i`, as a sequence of binary choices among the
/// neighbours other than the one just left (in the order parent, children).
/// The translation sends `(i, s)` to `(i + step, s)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubicTranslation {
    minus: PeriodicEnd,
    plus: PeriodicEnd,
    step: i64,
    split: usize,
}

impl CubicTranslation {
    pub fn new(minus: PeriodicEnd, plus: PeriodicEnd, step: i64) -> Result<CubicTranslation> {
        let cubic = Tree::cubic();
        for e in [&minus, &plus] {
            let probe = e.vertex(e.prefix.len() + e.period.len() + 1);
            if !cubic.is_valid(&probe) {
                return Err(Error::InvalidArgument(format!("{e} is not an end of the cubic tree")));
            }
        }
        let split = minus
            .divergence(&plus)
            .ok_or_else(|| Error::InvalidArgument(format!("{minus} and {plus} are the same end")))?;
        Ok(CubicTranslation {
            minus,
            plus,
            step,
            split,
        })
    }

    pub fn minus(&self) -> &PeriodicEnd {
        &self.minus
    }

    pub fn plus(&self) -> &PeriodicEnd {
        &self.plus
    }

    pub fn step(&self) -> i64 {
        self.step
    }

    pub fn axis_vertex(&self, i: i64) -> Address {
        if i >= 0 {
            self.plus.vertex(self.split + i as usize)
        } else {
            self.minus.vertex(self.split + i.unsigned_abs() as usize)
        }
    }

    fn off_axis_neighbor(&self, tree: &Tree, i: i64) -> Address {
        let (l, r) = (self.axis_vertex(i - 1), self.axis_vertex(i + 1));
        tree.neighbors(&self.axis_vertex(i))
            .expect("axis vertex")
            .into_iter()
            .find(|n| n != &l && n != &r)
            .expect("cubic vertices have degree 3")
    }

    fn coordinates(&self, tree: &Tree, v: &Address) -> (i64, Option<Vec<u8>>) {
        let p = self.plus.common_len(v);
        let q = self.minus.common_len(v);
        let i = if p > self.split {
            (p - self.split) as i64
        } else if q > self.split {
            -((q - self.split) as i64)
        } else {
            0
        };
        let a = self.axis_vertex(i);
        if &a == v {
            return (i, None);
        }
        let path = tree.path(&a, v).expect("valid vertex");
        let bits = path
            .windows(3)
            .map(|w| {
                let away: Vec<Address> = tree
                    .neighbors(&w[1])
                    .expect("valid vertex")
                    .into_iter()
                    .filter(|n| n != &w[0])
                    .collect();
                away.iter().position(|n| n == &w[2]).expect("path step") as u8
            })
            .collect();
        (i, Some(bits))
    }

    fn vertex_at(&self, tree: &Tree, i: i64, s: &Option<Vec<u8>>) -> Address {
        let a = self.axis_vertex(i);
        let Some(bits) = s else { return a };
        let mut prev = a;
        let mut cur = self.off_axis_neighbor(tree, i);
        for &b in bits {
            let next = tree
                .neighbors(&cur)
                .expect("valid vertex")
                .into_iter()
                .filter(|n| n != &prev)
                .nth(b as usize)
                .expect("binary choice");
            prev = std::mem::replace(&mut cur, next);
        }
        cur
    }

    fn translate(&self, tree: &Tree, v: &Address, by: i64) -> Address {
        let (i, s) = self.coordinates(tree, v);
        self.vertex_at(tree, i + by, &s)
    }
}

#[derive(Clone)]
enum Rule {
    Identity,
    Shift { step: usize },
    Translate { step: i64 },
    ChildDescent { prefix: Address },
    TranslateCubic(CubicTranslation),
    Table {
        forward: BTreeMap<Address, Address>,
        backward: BTreeMap<Address, Address>,
    },
    SwapRootSubtrees,
    PathDescent { c: u32 },
    RayDescent { c: u32 },
    RotateLeaves { at: Address, leaves: Vec<u32> },
    Compose(Vec<Embedding>),
    Rerooted(Embedding),
    Custom {
        label: String,
        map: Arc<MapFn>,
        inverse: Option<Arc<InverseFn>>,
    },
}

/// A self-embedding of a fixed tree. Cloning is cheap.
#[derive(Clone)]
pub struct Embedding {
    tree: Tree,
    rule: Arc<Rule>,
    name: Option<Arc<str>>,
    word: Option<Word>,
}

impl fmt::Debug for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Embedding({})", self.label())
    }
}

fn incompatible(name: &str, reason: impl Into<String>) -> Error {
    Error::IncompatibleEmbedding {
        name: name.into(),
        reason: reason.into(),
    }
}

/// Position on the double ray: root 0, `0·0ᵏ` is `k+1`, `1·0ᵏ` is `-(k+1)`.
fn double_ray_position(a: &Address) -> i64 {
    match a.indices().first() {
        None => 0,
        Some(0) => a.depth() as i64,
        Some(_) => -(a.depth() as i64),
    }
}

fn double_ray_vertex(p: i64) -> Address {
    let n = p.unsigned_abs() as usize;
    let mut idx = vec![0u32; n];
    if p < 0 {
        idx[0] = 1;
    }
    Address::from_indices(idx)
}

/// True if every combinator in `term` sits on top of the binary tree and
/// treats the subtrees below `0` and `1` alike.
fn is_symmetric_over_binary(term: &TreeTerm) -> bool {
    match term {
        TreeTerm::Binary => true,
        TreeTerm::AttachPath { inner, at, .. } | TreeTerm::AttachRay { inner, at } => {
            at.is_root() && is_symmetric_over_binary(inner)
        }
        TreeTerm::Decorate { inner, .. } => is_symmetric_over_binary(inner),
        _ => false,
    }
}

impl Embedding {
    fn build(tree: &Tree, rule: Rule) -> Embedding {
        Embedding {
            tree: tree.clone(),
            rule: Arc::new(rule),
            name: None,
            word: None,
        }
    }

    pub fn identity(tree: &Tree) -> Embedding {
        Embedding::build(tree, Rule::Identity)
    }

    /// `x_i ↦ x_{i+step}` on the ray.
    pub fn shift(tree: &Tree, step: usize) -> Result<Embedding> {
        if tree.term() != &TreeTerm::Ray {
            return Err(incompatible("shift", "defined on `ray` only"));
        }
        Ok(Embedding::build(tree, Rule::Shift { step }))
    }

    /// `x_i ↦ x_{i+step}` on the double ray.
    pub fn translate(tree: &Tree, step: i64) -> Result<Embedding> {
        if tree.term() != &TreeTerm::DoubleRay {
            return Err(incompatible("translate", "defined on `double_ray` only"));
        }
        Ok(Embedding::build(tree, Rule::Translate { step }))
    }

    /// `a ↦ prefix·a` on the binary tree.
    pub fn child_descent(tree: &Tree, prefix: Address) -> Result<Embedding> {
        if tree.term() != &TreeTerm::Binary {
            return Err(incompatible("child_descent", "defined on `binary` only"));
        }
        if !tree.is_valid(&prefix) {
            return Err(Error::InvalidAddress(prefix));
        }
        Ok(Embedding::build(tree, Rule::ChildDescent { prefix }))
    }

    pub fn translate_cubic(tree: &Tree, t: CubicTranslation) -> Result<Embedding> {
        if tree.term() != &TreeTerm::Cubic {
            return Err(incompatible("translate_cubic", "defined on `cubic` only"));
        }
        Ok(Embedding::build(tree, Rule::TranslateCubic(t)))
    }

    /// An explicit map on a finite tree; it must list every vertex.
    pub fn table(tree: &Tree, pairs: impl IntoIterator<Item = (Address, Address)>) -> Result<Embedding> {
        let TreeTerm::Finite(ft) = tree.term() else {
            return Err(incompatible("table", "defined on finite trees only"));
        };
        let mut forward = BTreeMap::new();
        let mut backward = BTreeMap::new();
        for (a, b) in pairs {
            tree.check(&a)?;
            if !tree.is_valid(&b) {
                return Err(Error::InvalidImage { input: a, output: b });
            }
            if forward.insert(a.clone(), b.clone()).is_some() {
                return Err(incompatible("table", format!("{a} is listed twice")));
            }
            backward.insert(b, a);
        }
        for v in 0..ft.vertex_count() {
            let a = ft.address_of(v);
            if !forward.contains_key(&a) {
                return Err(incompatible("table", format!("no image given for {a}")));
            }
        }
        Ok(Embedding::build(tree, Rule::Table { forward, backward }))
    }

    /// Exchanges the subtrees below `0` and `1`, fixing everything else.
    pub fn swap_root_subtrees(tree: &Tree) -> Result<Embedding> {
        if !is_symmetric_over_binary(tree.term()) {
            return Err(incompatible(
                "swap",
                "needs the binary tree with combinators attached at the root",
            ));
        }
        Ok(Embedding::build(tree, Rule::SwapRootSubtrees))
    }

    /// On binary plus a path at the root (child `2`): the binary part moves
    /// into the subtree of `c`, the path's first vertex goes to the root and
    /// the rest of the path folds into the subtree of `1 - c`.
    pub fn path_descent(tree: &Tree, c: u32) -> Result<Embedding> {
        match tree.term() {
            TreeTerm::AttachPath { inner, at, .. } if **inner == TreeTerm::Binary && at.is_root() => {}
            _ => {
                return Err(incompatible(
                    "path_descent",
                    "defined on binary.attach_path(at=ε, …) only",
                ))
            }
        }
        if c > 1 {
            return Err(Error::InvalidArgument("path_descent needs c ∈ {0, 1}".into()));
        }
        Ok(Embedding::build(tree, Rule::PathDescent { c }))
    }

    /// On binary plus a ray at the root (child `2`): translation by one along
    /// the double ray formed by the attached ray and `c^∞`, towards `c^∞`.
    pub fn ray_descent(tree: &Tree, c: u32) -> Result<Embedding> {
        match tree.term() {
            TreeTerm::AttachRay { inner, at } if **inner == TreeTerm::Binary && at.is_root() => {}
            _ => {
                return Err(incompatible(
                    "ray_descent",
                    "defined on binary.attach_ray(at=ε) only",
                ))
            }
        }
        if c > 1 {
            return Err(Error::InvalidArgument("ray_descent needs c ∈ {0, 1}".into()));
        }
        Ok(Embedding::build(tree, Rule::RayDescent { c }))
    }

    /// Cyclically permutes the decoration leaves hanging at `at`.
    pub fn rotate_leaves(tree: &Tree, at: Address) -> Result<Embedding> {
        let cc = tree
            .children_count(&at)
            .ok_or_else(|| Error::InvalidAddress(at.clone()))?;
        let leaves: Vec<u32> = (0..cc as u32)
            .filter(|&j| tree.is_decoration_leaf(&at.child(j)))
            .collect();
        Ok(Embedding::build(tree, Rule::RotateLeaves { at, leaves }))
    }

    /// An arbitrary rule. Nothing is checked beyond what [`Embedding::apply`]
    /// and [`Embedding::validate`] check.
    pub fn custom(
        tree: &Tree,
        label: impl Into<String>,
        map: impl Fn(&Address) -> Address + Send + Sync + 'static,
        inverse: Option<Arc<InverseFn>>,
    ) -> Embedding {
        Embedding::build(
            tree,
            Rule::Custom {
                label: label.into(),
                map: Arc::new(map),
                inverse,
            },
        )
    }

    /// Transports this embedding to `target`, which must be a rerooting of
    /// this embedding's tree.
    pub fn transport_to_reroot(&self, target: &Tree) -> Result<Embedding> {
        match target.reroot_inner() {
            Some(inner) if inner == self.tree => {}
            _ => return Err(Error::TreeMismatch),
        }
        Ok(Embedding::build(target, Rule::Rerooted(self.clone())))
    }

    /// `outer ∘ inner`.
    pub fn compose(outer: &Embedding, inner: &Embedding) -> Result<Embedding> {
        Embedding::compose_all([outer, inner])
    }

    /// `e₁ ∘ e₂ ∘ … ∘ eₖ` for `k ≥ 1`. Generator words are concatenated when
    /// every factor carries one.
    pub fn compose_all<'a>(parts: impl IntoIterator<Item = &'a Embedding>) -> Result<Embedding> {
        let mut tree: Option<&Tree> = None;
        let mut flat: Vec<Embedding> = Vec::new();
        let mut word: Option<Word> = Some(Vec::new());
        for p in parts {
            match tree {
                Some(t) if t != &p.tree => return Err(Error::TreeMismatch),
                Some(_) => {}
                None => tree = Some(&p.tree),
            }
            match (&mut word, &p.word) {
                (Some(w), Some(pw)) => w.extend_from_slice(pw),
                _ => word = None,
            }
            match &*p.rule {
                Rule::Compose(inner) => flat.extend(inner.iter().cloned()),
                Rule::Identity => {}
                _ => flat.push(p.clone()),
            }
        }
        let tree = tree.ok_or_else(|| Error::InvalidArgument("empty composition".into()))?;
        let mut e = match flat.len() {
            0 => Embedding::identity(tree),
            1 => {
                let mut only = flat.pop().expect("one factor");
                only.name = None;
                only
            }
            _ => Embedding::build(tree, Rule::Compose(flat)),
        };
        e.word = word;
        Ok(e)
    }

    /// The `n`-fold composite; `n = 0` gives the identity.
    pub fn power(&self, n: usize) -> Embedding {
        let mut e = if n == 0 {
            Embedding::identity(&self.tree)
        } else {
            Embedding::compose_all(std::iter::repeat_n(self, n)).expect("same tree")
        };
        e.word = self.word.as_ref().map(|w| w.repeat(n));
        e
    }

    pub fn with_name(mut self, name: impl Into<Arc<str>>) -> Embedding {
        self.name = Some(name.into());
        self
    }

    pub fn with_word(mut self, word: Word) -> Embedding {
        self.word = Some(word);
        self
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn word(&self) -> Option<&[usize]> {
        self.word.as_deref()
    }

    /// The name if one was given, otherwise the term.
    pub fn label(&self) -> String {
        match &self.name {
            Some(n) => n.to_string(),
            None => self.to_string(),
        }
    }

    pub fn is_identity_rule(&self) -> bool {
        matches!(&*self.rule, Rule::Identity)
    }

    /// The image of `v`, which must be a vertex; the image is checked too.
    pub fn apply(&self, v: &Address) -> Result<Address> {
        self.tree.check(v)?;
        self.apply_unchecked(v)
    }

    fn apply_unchecked(&self, v: &Address) -> Result<Address> {
        let out = self.raw(v)?;
        if self.tree.is_valid(&out) {
            Ok(out)
        } else {
            Err(Error::InvalidImage {
                input: v.clone(),
                output: out,
            })
        }
    }

    fn raw(&self, v: &Address) -> Result<Address> {
        Ok(match &*self.rule {
            Rule::Identity => v.clone(),
            Rule::Shift { step } => Address::from_indices(vec![0; v.depth() + step]),
            Rule::Translate { step } => double_ray_vertex(double_ray_position(v) + step),
            Rule::ChildDescent { prefix } => prefix.concat(v.indices()),
            Rule::TranslateCubic(t) => t.translate(&self.tree, v, t.step),
            Rule::Table { forward, .. } => forward[v].clone(),
            Rule::SwapRootSubtrees => match v.indices().split_first() {
                Some((&h, rest)) if h < 2 => Address::from_indices([1 - h]).concat(rest),
                _ => v.clone(),
            },
            Rule::PathDescent { c } => match v.indices().split_first() {
                Some((2, [])) => Address::root(),
                Some((2, rest)) => Address::from_indices([1 - c]).concat(&rest[1..]),
                _ => Address::from_indices([*c]).concat(v.indices()),
            },
            Rule::RayDescent { c } => match v.indices().split_first() {
                Some((2, [])) => Address::root(),
                Some((2, rest)) => Address::from_indices([2]).concat(&rest[1..]),
                _ => Address::from_indices([*c]).concat(v.indices()),
            },
            Rule::RotateLeaves { at, leaves } => match v.parent() {
                Some(p) if &p == at => {
                    let j = v.last().expect("child");
                    match leaves.iter().position(|&l| l == j) {
                        Some(k) => at.child(leaves[(k + 1) % leaves.len()]),
                        None => v.clone(),
                    }
                }
                _ => v.clone(),
            },
            Rule::Compose(parts) => {
                let mut cur = v.clone();
                for p in parts.iter().rev() {
                    cur = p.apply_unchecked(&cur)?;
                }
                cur
            }
            Rule::Rerooted(inner) => {
                let x = self
                    .tree
                    .reroot_to_inner(v)
                    .ok_or_else(|| Error::InvalidAddress(v.clone()))?;
                let y = inner.apply(&x)?;
                self.tree
                    .reroot_from_inner(&y)
                    .ok_or(Error::InvalidImage { input: v.clone(), output: y })?
            }
            Rule::Custom { map, .. } => map(v),
        })
    }

    /// A proposed preimage of `v`, if the rule knows one. Not checked.
    pub fn inverse_hint(&self, v: &Address) -> Option<Address> {
        match &*self.rule {
            Rule::Identity => Some(v.clone()),
            Rule::Shift { step } => (v.depth() >= *step).then(|| Address::from_indices(vec![0; v.depth() - step])),
            Rule::Translate { step } => Some(double_ray_vertex(double_ray_position(v) - step)),
            Rule::ChildDescent { prefix } => prefix
                .is_prefix_of(v)
                .then(|| Address::from_indices(&v.indices()[prefix.depth()..])),
            Rule::TranslateCubic(t) => Some(t.translate(&self.tree, v, -t.step)),
            Rule::Table { backward, .. } => backward.get(v).cloned(),
            Rule::SwapRootSubtrees => self.raw(v).ok(),
            Rule::PathDescent { c } => match v.indices().split_first() {
                None => Some(Address::from_indices([2])),
                Some((&h, rest)) if h == *c => Some(Address::from_indices(rest)),
                Some((_, rest)) if rest.iter().all(|&i| i == 0) => {
                    let w = Address::from_indices(vec![0; rest.len() + 1]);
                    let w = Address::from_indices([2]).concat(w.indices());
                    self.tree.is_valid(&w).then_some(w)
                }
                _ => None,
            },
            Rule::RayDescent { c } => match v.indices().split_first() {
                None => Some(Address::from_indices([2])),
                Some((&h, rest)) if h == *c => Some(Address::from_indices(rest)),
                Some((2, _)) => Some(v.child(0)),
                _ => None,
            },
            Rule::RotateLeaves { at, leaves } => match v.parent() {
                Some(p) if &p == at => {
                    let j = v.last().expect("child");
                    Some(match leaves.iter().position(|&l| l == j) {
                        Some(k) => at.child(leaves[(k + leaves.len() - 1) % leaves.len()]),
                        None => v.clone(),
                    })
                }
                _ => Some(v.clone()),
            },
            Rule::Compose(parts) => {
                let mut cur = v.clone();
                for p in parts {
                    cur = p.inverse_hint(&cur)?;
                    if !self.tree.is_valid(&cur) {
                        return None;
                    }
                }
                Some(cur)
            }
            Rule::Rerooted(inner) => {
                let x = self.tree.reroot_to_inner(v)?;
                let y = inner.inverse_hint(&x)?;
                self.tree.reroot_from_inner(&y)
            }
            Rule::Custom { inverse, .. } => inverse.as_ref().and_then(|f| f(v)),
        }
    }

    /// Whether a missing hint proves that no preimage exists.
    fn hint_is_exact(&self) -> bool {
        match &*self.rule {
            Rule::Custom { .. } => false,
            Rule::Compose(parts) => parts.iter().all(Embedding::hint_is_exact),
            Rule::Rerooted(inner) => inner.hint_is_exact(),
            _ => true,
        }
    }

    /// The preimage of `v`. The inverse hint is consulted first; otherwise the
    /// ball of the given radius around `v` is searched. `None` means no
    /// preimage within the radius, unless the rule's hint is exact, in which
    /// case there is none at all.
    pub fn preimage(&self, v: &Address, radius: usize) -> Result<Option<Address>> {
        self.tree.check(v)?;
        if let Some(w) = self.inverse_hint(v) {
            if self.tree.is_valid(&w) {
                let image = self.apply(&w)?;
                if &image == v {
                    return Ok(Some(w));
                }
                return Err(Error::InconsistentInverse {
                    target: v.clone(),
                    hint: w,
                    image,
                });
            }
        }
        if self.hint_is_exact() {
            return Ok(None);
        }
        let mut seen = HashSet::from([v.clone()]);
        let mut queue = VecDeque::from([(v.clone(), 0usize)]);
        while let Some((u, d)) = queue.pop_front() {
            if &self.apply(&u)? == v {
                return Ok(Some(u));
            }
            if d < radius {
                for n in self.tree.neighbors(&u)? {
                    if seen.insert(n.clone()) {
                        queue.push_back((n, d + 1));
                    }
                }
            }
        }
        Ok(None)
    }

    /// Preimage search with the default radius `2·displacement(v) + 2`.
    pub fn preimage_default(&self, v: &Address) -> Result<Option<Address>> {
        let d = self.tree.distance(v, &self.apply(v)?)?;
        self.preimage(v, 2 * d + 2)
    }

    /// Checks adjacency preservation on every edge of the depth-`horizon`
    /// truncation and injectivity on its vertices.
    pub fn validate(&self, horizon: usize) -> ValidityReport {
        let mut report = ValidityReport {
            horizon,
            adjacency_ok: true,
            injective_ok: true,
            first_violation: None,
        };
        let mut image_of: HashMap<Address, Address> = HashMap::new();
        let mut source_of: HashMap<Address, Address> = HashMap::new();
        for v in self.tree.bfs(horizon) {
            let image = match self.apply(&v) {
                Ok(x) => x,
                Err(e) => {
                    report.adjacency_ok = false;
                    report.first_violation = Some(Violation {
                        pair: (v.clone(), v),
                        reason: e.to_string(),
                    });
                    return report;
                }
            };
            // Breadth-first order visits parents before children.
            if let Some(p) = v.parent() {
                let pi = &image_of[&p];
                if !pi.is_adjacent(&image) {
                    report.adjacency_ok = false;
                    report.first_violation = Some(Violation {
                        reason: format!("edge {p}–{v} maps to {pi}, {image}, which are not adjacent"),
                        pair: (p, v),
                    });
                    return report;
                }
            }
            if let Some(u) = source_of.insert(image.clone(), v.clone()) {
                report.injective_ok = false;
                report.first_violation = Some(Violation {
                    reason: format!("{u} and {v} both map to {image}"),
                    pair: (u, v),
                });
                return report;
            }
            image_of.insert(v, image);
        }
        report
    }

    /// Agreement on all vertices of depth ≤ `horizon`, visiting at most
    /// `max_vertices` of them.
    pub fn agrees_with(&self, other: &Embedding, horizon: usize, max_vertices: usize) -> Result<bool> {
        if self.tree != other.tree {
            return Err(Error::TreeMismatch);
        }
        for (k, v) in self.tree.bfs(horizon).enumerate() {
            if k >= max_vertices {
                return Err(Error::Budget(format!(
                    "comparison at horizon {horizon} exceeds {max_vertices} vertices"
                )));
            }
            if self.apply(&v)? != other.apply(&v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The depth-`depth` prefix of the image of the end `omega`, obtained by
    /// pushing its root ray through the map.
    pub fn end_image(&self, omega: &EndApprox, depth: usize) -> Result<EndApprox> {
        let p = omega.prefix();
        self.tree.check(p)?;
        let images = (0..=p.depth()).map(|d| self.apply(&p.truncated(d)));
        end_prefix_of_walk(&self.tree, images, depth).map_err(|e| match e {
            Error::HorizonInsufficient(_) => Error::HorizonInsufficient(format!(
                "image of {omega} (depth {}) does not determine a depth-{depth} prefix",
                omega.depth()
            )),
            other => other,
        })
    }

    /// As [`Embedding::end_image`] for the end of an explicit ray, following
    /// at most `budget` ray vertices.
    pub fn end_image_of_ray(&self, ray: &RaySpec, depth: usize, budget: usize) -> Result<EndApprox> {
        let images = ray
            .walk(&self.tree)
            .take(budget)
            .map(|v| v.and_then(|v| self.apply(&v)));
        end_prefix_of_walk(&self.tree, images, depth)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub pair: (Address, Address),
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidityReport {
    pub horizon: usize,
    pub adjacency_ok: bool,
    pub injective_ok: bool,
    pub first_violation: Option<Violation>,
}

impl ValidityReport {
    pub fn ok(&self) -> bool {
        self.adjacency_ok && self.injective_ok
    }
}

impl fmt::Display for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.rule {
            Rule::Identity => f.write_str("identity"),
            Rule::Shift { step: 1 } => f.write_str("shift(ray)"),
            Rule::Shift { step } => write!(f, "shift(ray, step={step})"),
            Rule::Translate { step } => write!(f, "translate(double_ray, step={step})"),
            Rule::ChildDescent { prefix } => write!(f, "child_descent(c={prefix})"),
            Rule::TranslateCubic(t) => write!(
                f,
                "translate_cubic(minus={}, plus={}, step={})",
                t.minus, t.plus, t.step
            ),
            Rule::Table { forward, .. } => {
                f.write_str("table{")?;
                for (k, (a, b)) in forward.iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}->{b}")?;
                }
                f.write_str("}")
            }
            Rule::SwapRootSubtrees => f.write_str("swap"),
            Rule::PathDescent { c } => write!(f, "path_descent(c={c})"),
            Rule::RayDescent { c } => write!(f, "ray_descent(c={c})"),
            Rule::RotateLeaves { at, .. } => write!(f, "rotate_leaves(at={at})"),
            Rule::Compose(parts) => {
                f.write_str("compose(")?;
                for (k, p) in parts.iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{p}")?;
                }
                f.write_str(")")
            }
            Rule::Rerooted(inner) => write!(f, "rerooted({inner})"),
            Rule::Custom { label, .. } => f.write_str(label),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::address::addr;

    fn spine(n: usize) -> Address {
        Address::from_indices(vec![0; n])
    }

    fn cubic_pair(step: i64) -> (Embedding, Embedding) {
        let t = Tree::cubic();
        let g = CubicTranslation::new("(0)*".parse().unwrap(), "(1)*".parse().unwrap(), step).unwrap();
        let h = CubicTranslation::new("(0)*".parse().unwrap(), "2(0)*".parse().unwrap(), step).unwrap();
        (
            Embedding::translate_cubic(&t, g).unwrap(),
            Embedding::translate_cubic(&t, h).unwrap(),
        )
    }

    #[test]
    fn apply_examples() {
        let s = Embedding::shift(&Tree::ray(), 1).unwrap();
        assert_eq!(s.apply(&spine(3)).unwrap(), spine(4));
        let b = Tree::binary();
        let g = Embedding::child_descent(&b, addr("0")).unwrap();
        assert_eq!(g.apply(&Address::root()).unwrap(), addr("0"));
        assert_eq!(g.apply(&addr("11")).unwrap(), addr("011"));
        assert!(matches!(g.apply(&addr("2")), Err(Error::InvalidAddress(_))));
    }

    #[test]
    fn composition_examples() {
        let b = Tree::binary();
        let g0 = Embedding::child_descent(&b, addr("0")).unwrap();
        let g1 = Embedding::child_descent(&b, addr("1")).unwrap();
        let id = Embedding::identity(&b);
        assert!(Embedding::compose(&g0, &id).unwrap().agrees_with(&g0, 12, 1 << 14).unwrap());
        let c = Embedding::compose(&g0, &g1).unwrap();
        // Oracle: evaluate the inner rule, then the outer.
        let expected = g0.apply(&g1.apply(&Address::root()).unwrap()).unwrap();
        assert_eq!(expected, addr("01"));
        assert_eq!(c.apply(&Address::root()).unwrap(), expected);

        let r = Tree::ray();
        let s = Embedding::shift(&r, 1).unwrap();
        let s2 = Embedding::compose(&s, &s).unwrap();
        for i in 0..10 {
            assert_eq!(s2.apply(&spine(i)).unwrap(), spine(i + 2));
        }
        assert!(s2.agrees_with(&Embedding::shift(&r, 2).unwrap(), 16, 100).unwrap());
        assert!(matches!(Embedding::compose(&s, &g0), Err(Error::TreeMismatch)));

        let w = Embedding::compose(&s.clone().with_word(vec![0]), &s.clone().with_word(vec![1])).unwrap();
        assert_eq!(w.word(), Some(&[0, 1][..]));
    }

    #[test]
    fn validation_examples() {
        let r = Tree::ray();
        assert!(Embedding::shift(&r, 1).unwrap().validate(20).ok());
        let b = Tree::binary();
        let constant = Embedding::custom(&b, "constant", |_| Address::root(), None);
        let rep = constant.validate(2);
        assert!(!rep.ok());
        assert!(rep.first_violation.is_some());
        let rep_inj = Embedding::custom(&b, "fold", |a| a.truncated(1), None).validate(2);
        // ε ↦ ε and 0 ↦ 0 are fine, 00 ↦ 0 breaks adjacency before injectivity.
        assert!(!rep_inj.adjacency_ok);
        let swap_levels = Embedding::custom(
            &b,
            "merge",
            |a| Address::from_indices(vec![0; a.depth()]),
            None,
        );
        let rep = swap_levels.validate(2);
        assert!(rep.adjacency_ok && !rep.injective_ok);
        assert_eq!(rep.first_violation.unwrap().pair, (addr("0"), addr("1")));
    }

    #[test]
    fn preimage_examples() {
        let s = Embedding::shift(&Tree::ray(), 1).unwrap();
        assert_eq!(s.preimage(&spine(5), 2).unwrap(), Some(spine(4)));
        assert_eq!(s.preimage(&spine(0), 10).unwrap(), None);
        let t = Embedding::translate(&Tree::double_ray(), 1).unwrap();
        assert_eq!(t.preimage(&Address::root(), 2).unwrap(), Some(addr("1")));
        // Without a hint the ball search finds the same answer.
        let tree = Tree::ray();
        let blind = Embedding::custom(&tree, "blind shift", |a| a.child(0), None);
        assert_eq!(blind.preimage(&spine(5), 2).unwrap(), Some(spine(4)));
        assert_eq!(blind.preimage(&spine(0), 10).unwrap(), None);
        let liar = Embedding::custom(&tree, "liar", |a| a.child(0), Some(Arc::new(|a: &Address| Some(a.clone()))));
        assert!(matches!(liar.preimage(&spine(3), 2), Err(Error::InconsistentInverse { .. })));
    }

    #[test]
    fn end_image_examples() {
        let r = Tree::ray();
        let s = Embedding::shift(&r, 1).unwrap();
        let end = EndApprox::new(spine(8));
        assert_eq!(s.end_image(&end, 8).unwrap(), end);
        let b = Tree::binary();
        let g = Embedding::child_descent(&b, addr("0")).unwrap();
        assert_eq!(g.end_image(&EndApprox::new(addr("1111")), 4).unwrap().prefix(), &addr("0111"));
        let d = Tree::double_ray();
        let t = Embedding::translate(&d, 1).unwrap();
        let minus = EndApprox::new(addr("100000"));
        assert_eq!(t.end_image(&minus, 4).unwrap(), minus.truncated(4));
        assert!(matches!(
            t.end_image(&EndApprox::new(addr("1")), 4),
            Err(Error::HorizonInsufficient(_))
        ));
    }

    #[test]
    fn cubic_translations_are_automorphisms() {
        for step in [1, 2, -1, 3] {
            let (g, h) = cubic_pair(step);
            for e in [&g, &h] {
                assert!(e.validate(7).ok(), "{e}");
                for v in e.tree().bfs(6) {
                    let w = e.inverse_hint(&v).unwrap();
                    assert_eq!(e.apply(&w).unwrap(), v);
                }
            }
        }
        let (g, h) = cubic_pair(1);
        // g moves the axis 0^∞ ← ε → 1^∞ one step towards 1^∞.
        assert_eq!(g.apply(&Address::root()).unwrap(), addr("1"));
        assert_eq!(g.apply(&addr("00")).unwrap(), addr("0"));
        assert_eq!(g.apply(&addr("0")).unwrap(), Address::root());
        assert_eq!(h.apply(&Address::root()).unwrap(), addr("2"));
        assert_eq!(h.apply(&addr("2")).unwrap(), addr("20"));
        assert!(CubicTranslation::new("(0)*".parse().unwrap(), "0(0)*".parse().unwrap(), 1).is_err());
        assert!(CubicTranslation::new("(0)*".parse().unwrap(), "(2)*".parse().unwrap(), 1).is_err());
    }

    #[test]
    fn periodic_end_text() {
        let e: PeriodicEnd = "2(01)*".parse().unwrap();
        assert_eq!(e.vertex(5), addr("20101"));
        assert_eq!(e.to_string(), "2(01)*");
        assert!("2(01)".parse::<PeriodicEnd>().is_err());
        assert!("()*".parse::<PeriodicEnd>().is_err());
    }

    #[test]
    fn reroot_transport() {
        let b = Tree::binary();
        let g = Embedding::child_descent(&b, addr("0")).unwrap();
        let r = b.reroot(addr("01")).unwrap();
        let gr = g.transport_to_reroot(&r).unwrap();
        assert!(gr.validate(6).ok());
        for v in r.bfs(5) {
            let x = r.reroot_to_inner(&v).unwrap();
            assert_eq!(r.reroot_to_inner(&gr.apply(&v).unwrap()).unwrap(), g.apply(&x).unwrap());
        }
        assert!(g.transport_to_reroot(&b).is_err());
    }
}
