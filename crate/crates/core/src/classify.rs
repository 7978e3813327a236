//! Classification of a single self-embedding.
//!
//! The descent starts at the root and keeps stepping towards the image while
//! the displacement drops. Where it stops, the displacement `ℓ` is minimal:
//! `0` means a fixed vertex, `1` with `g²(v) = v` an inverted edge, and
//! otherwise the orbit segments `[gⁱv, gⁱ⁺¹v]` concatenate to a ray `R` with
//! `g(R) ⊊ R`.
//!
//! An embedding of a tree preserves distances, so the preimage of
//! `x_{i+ℓ-1}`, if there is one, is a neighbour of `x_i`. The backward
//! extension therefore inspects one neighbourhood per step, and a missing
//! preimage is a proof rather than a timeout.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::address::Address;
use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::tree::{end_prefix_of_walk, step_toward, Cone, EndApprox, RaySpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Tag {
    EllipticVertex,
    EllipticEdge,
    Hyperbolic,
    Parabolic,
    HorizonExceeded,
}

impl Tag {
    pub fn is_elliptic(self) -> bool {
        matches!(self, Tag::EllipticVertex | Tag::EllipticEdge)
    }

    pub fn is_non_elliptic(self) -> bool {
        matches!(self, Tag::Hyperbolic | Tag::Parabolic)
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// The invariant line of a non-elliptic embedding, indexed so that
/// `g(x_i) = x_{i+ℓ}`. The forward half is generated on demand; the backward
/// half is whatever the preimage chain produced.
#[derive(Clone)]
pub struct Axis {
    embedding: Embedding,
    /// `x_0 … x_ℓ`.
    seed: Vec<Address>,
    /// `x_{-1}, x_{-2}, …`.
    backward: Vec<Address>,
    backward_closed: bool,
}

impl Axis {
    fn new(embedding: &Embedding, origin: Address) -> Result<Axis> {
        let image = embedding.apply(&origin)?;
        let seed = embedding.tree().path(&origin, &image)?;
        Ok(Axis {
            embedding: embedding.clone(),
            seed,
            backward: Vec::new(),
            backward_closed: false,
        })
    }

    pub fn origin(&self) -> &Address {
        &self.seed[0]
    }

    pub fn translation_length(&self) -> usize {
        self.seed.len() - 1
    }

    /// True when the preimage chain provably ends, so the axis is a ray.
    pub fn backward_closed(&self) -> bool {
        self.backward_closed
    }

    pub fn backward(&self) -> &[Address] {
        &self.backward
    }

    /// Extends the backward half by up to `steps` vertices.
    fn extend_backward(&mut self, steps: usize) -> Result<()> {
        let l = self.translation_length();
        for _ in 0..steps {
            if self.backward_closed {
                break;
            }
            let j = self.backward.len() + 1;
            let target = if j <= l {
                self.seed[l - j].clone()
            } else {
                self.backward[j - l - 1].clone()
            };
            let prev = if j == 1 {
                self.seed[0].clone()
            } else {
                self.backward[j - 2].clone()
            };
            let mut found = None;
            for n in self.embedding.tree().neighbors(&prev)? {
                if self.embedding.apply(&n)? == target {
                    found = Some(n);
                    break;
                }
            }
            match found {
                Some(y) => self.backward.push(y),
                None => self.backward_closed = true,
            }
        }
        Ok(())
    }

    /// `x_0, …, x_{n-1}`.
    pub fn forward(&self, n: usize) -> Result<Vec<Address>> {
        let l = self.translation_length();
        let mut out: Vec<Address> = self.seed.iter().take(n).cloned().collect();
        while out.len() < n {
            let k = out.len();
            out.push(self.embedding.apply(&out[k - l])?);
        }
        Ok(out)
    }

    /// The forward ray from `x_0`.
    pub fn forward_ray(&self) -> RaySpec {
        let e = self.embedding.clone();
        let seed = self.seed.clone();
        RaySpec::from_history(seed[0].clone(), move |h| {
            let k = h.len();
            let l = seed.len() - 1;
            if k <= l {
                Ok(seed[k].clone())
            } else {
                e.apply(&h[k - l])
            }
        })
    }

    /// The maximal known ray `R` with `g(R) ⊊ R`: for a closed backward
    /// half it starts at the last vertex with no further preimage.
    pub fn halin_ray(&self) -> RaySpec {
        if !self.backward_closed {
            return self.forward_ray();
        }
        let e = self.embedding.clone();
        let l = self.translation_length();
        let mut known: Vec<Address> = self.backward.iter().rev().cloned().collect();
        known.extend(self.seed.iter().cloned());
        RaySpec::from_history(known[0].clone(), move |h| {
            let k = h.len();
            if k < known.len() {
                Ok(known[k].clone())
            } else {
                e.apply(&h[k - l])
            }
        })
    }

    /// The backward ray `x_0, x_{-1}, …` of a hyperbolic axis, continued
    /// through preimages.
    pub fn backward_ray(&self) -> Option<RaySpec> {
        if self.backward_closed {
            return None;
        }
        let e = self.embedding.clone();
        let seed = self.seed.clone();
        Some(RaySpec::from_history(seed[0].clone(), move |h| {
            let l = seed.len() - 1;
            let j = h.len();
            let target = if j <= l { &seed[l - j] } else { &h[j - l] };
            let prev = &h[j - 1];
            for n in e.tree().neighbors(prev)? {
                if &e.apply(&n)? == target {
                    return Ok(n);
                }
            }
            Err(Error::BadRay {
                step: j,
                reason: format!("{target} has no preimage next to {prev}"),
            })
        }))
    }

    /// The depth-`depth` prefix of the forward end.
    pub fn forward_end(&self, depth: usize) -> Result<EndApprox> {
        let budget = 2 * (self.origin().depth() + depth) + 2 * self.translation_length() + 4;
        let ray = self.forward_ray();
        end_prefix_of_walk(self.embedding.tree(), ray.walk(self.embedding.tree()).take(budget), depth)
    }

    /// The depth-`depth` prefix of the backward end, if the axis is a
    /// double ray.
    pub fn backward_end(&self, depth: usize) -> Result<Option<EndApprox>> {
        let Some(ray) = self.backward_ray() else {
            return Ok(None);
        };
        let budget = 2 * (self.origin().depth() + depth) + 2 * self.translation_length() + 4;
        end_prefix_of_walk(self.embedding.tree(), ray.walk(self.embedding.tree()).take(budget), depth)
            .map(Some)
    }

    /// Membership among the known backward vertices and the first
    /// `horizon` forward ones.
    pub fn contains(&self, v: &Address, horizon: usize) -> Result<bool> {
        Ok(self.backward.contains(v) || self.forward(horizon)?.contains(v))
    }
}

impl fmt::Debug for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Axis")
            .field("origin", self.origin())
            .field("translation_length", &self.translation_length())
            .field("backward", &self.backward.len())
            .field("backward_closed", &self.backward_closed)
            .finish()
    }
}

impl Serialize for Axis {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Axis", 5)?;
        st.serialize_field("origin", self.origin())?;
        st.serialize_field("translation_length", &self.translation_length())?;
        st.serialize_field("backward_closed", &self.backward_closed)?;
        let back: Vec<&Address> = self.backward.iter().take(8).collect();
        st.serialize_field("backward_prefix", &back)?;
        let fwd = self.forward(2 * self.translation_length() + 1).unwrap_or_default();
        st.serialize_field("forward_prefix", &fwd)?;
        st.end()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub tag: Tag,
    pub fixed_vertex: Option<Address>,
    pub inverted_edge: Option<(Address, Address)>,
    pub axis: Option<Axis>,
    pub translation_length: Option<usize>,
    pub g_plus: Option<EndApprox>,
    pub g_minus: Option<EndApprox>,
    pub horizon_used: usize,
    pub descent_steps: usize,
    /// Displacement where the descent stopped (for every tag).
    pub displacement: usize,
}

impl Classification {
    fn elliptic(tag: Tag, horizon: usize, steps: usize, d: usize) -> Classification {
        Classification {
            tag,
            fixed_vertex: None,
            inverted_edge: None,
            axis: None,
            translation_length: None,
            g_plus: None,
            g_minus: None,
            horizon_used: horizon,
            descent_steps: steps,
            displacement: d,
        }
    }

    pub fn is_elliptic(&self) -> bool {
        self.tag.is_elliptic()
    }
}

/// `d(v, e(v))`.
pub fn displacement(e: &Embedding, v: &Address) -> Result<usize> {
    e.tree().distance(v, &e.apply(v)?)
}

/// Classifies `e`, spending at most `horizon` descent steps and `horizon`
/// backward-extension steps.
///
/// A backward chain that survives `horizon` steps is reported as
/// `Hyperbolic`; a chain that breaks is a proof of `Parabolic`.
/// `HorizonExceeded` is returned when the descent itself does not settle.
pub fn classify(e: &Embedding, horizon: usize) -> Result<Classification> {
    let mut v = Address::root();
    let mut steps = 0;
    let (origin, l) = loop {
        let gv = e.apply(&v)?;
        let d = e.tree().distance(&v, &gv)?;
        if d == 0 {
            let mut c = Classification::elliptic(Tag::EllipticVertex, horizon, steps, 0);
            c.fixed_vertex = Some(v);
            return Ok(c);
        }
        if d == 1 && e.apply(&gv)? == v {
            let mut c = Classification::elliptic(Tag::EllipticEdge, horizon, steps, 1);
            c.inverted_edge = Some((v, gv));
            return Ok(c);
        }
        if steps >= horizon {
            return Ok(Classification::elliptic(Tag::HorizonExceeded, horizon, steps, d));
        }
        let w = step_toward(&v, &gv);
        if displacement(e, &w)? < d {
            v = w;
            steps += 1;
        } else {
            break (v, d);
        }
    };
    let mut axis = Axis::new(e, origin)?;
    axis.extend_backward(horizon)?;
    if !axis.backward_closed {
        // Walk back far enough for the backward end to be readable; this may
        // still uncover the end of the chain.
        let extra = axis.origin().depth() + 2;
        axis.extend_backward(extra)?;
    }
    let end_depth = horizon / 2;
    let g_plus = Some(axis.forward_end(end_depth)?);
    let (tag, g_minus) = if axis.backward_closed {
        (Tag::Parabolic, None)
    } else {
        (Tag::Hyperbolic, axis.backward_end(end_depth)?)
    };
    Ok(Classification {
        tag,
        fixed_vertex: None,
        inverted_edge: None,
        translation_length: Some(l),
        axis: Some(axis),
        g_plus,
        g_minus,
        horizon_used: horizon,
        descent_steps: steps,
        displacement: l,
    })
}

fn require_axis(c: &Classification) -> Result<&Axis> {
    match (&c.axis, c.tag) {
        (Some(a), Tag::Hyperbolic | Tag::Parabolic) => Ok(a),
        _ => Err(Error::Elliptic(format!("classified {}", c.tag))),
    }
}

/// The depth-`depth` prefix of `g⁺`.
pub fn direction(e: &Embedding, depth: usize, horizon: usize) -> Result<EndApprox> {
    let c = classify(e, horizon)?;
    require_axis(&c)?.forward_end(depth)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparationCertificate {
    pub x: Address,
    pub y: Address,
    pub gx: Address,
    pub gy: Address,
    /// `path(x, g(y))`, with `y` and `g(x)` strictly inside.
    pub path: Vec<Address>,
}

/// A certificate that `y` and `g(x)` separate `x` from `g(y)`, if they do:
/// both must lie on `path(x, g(y))` and differ from its endpoints.
pub fn separation_certificate(e: &Embedding, x: &Address, y: &Address) -> Result<Option<SeparationCertificate>> {
    if !x.is_adjacent(y) {
        return Err(Error::NotAdjacent(x.clone(), y.clone()));
    }
    let gx = e.apply(x)?;
    let gy = e.apply(y)?;
    let path = e.tree().path(x, &gy)?;
    let interior = &path[1..path.len().saturating_sub(1).max(1)];
    if interior.contains(y) && interior.contains(&gx) {
        Ok(Some(SeparationCertificate {
            x: x.clone(),
            y: y.clone(),
            gx,
            gy,
            path,
        }))
    } else {
        Ok(None)
    }
}

/// Sampling plan for verifying convergence bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SampleParams {
    pub seed: u64,
    /// Random walks from the root; every vertex they visit is sampled.
    pub walks: usize,
    /// The bound is checked for `n ∈ [N, N + extra]`.
    pub extra: usize,
    /// Vertices taken from the top of the truncation, breadth first.
    pub ball: usize,
}

impl Default for SampleParams {
    fn default() -> Self {
        SampleParams {
            seed: 0,
            walks: 64,
            extra: 8,
            ball: 512,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceBound {
    pub n: usize,
    /// Axis vertex whose cone towards `g⁺` lies in `U`.
    pub x: Address,
    /// `y` as in the recipe: the axis vertex bounding `V`, or the first
    /// vertex of the maximal ray.
    pub y: Address,
    pub samples: usize,
    pub checked_up_to: usize,
}

/// Random descending walks plus the top of the truncation.
pub fn sample_vertices(e: &Embedding, horizon: usize, params: &SampleParams) -> Vec<Address> {
    let t = e.tree();
    let mut out: Vec<Address> = t.bfs(horizon).take(params.ball).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    for _ in 0..params.walks {
        let mut v = Address::root();
        while v.depth() < horizon {
            let cc = t.children_count(&v).unwrap_or(0);
            if cc == 0 {
                break;
            }
            v = v.child(rng.gen_range(0..cc as u32));
            out.push(v.clone());
        }
    }
    out.sort();
    out.dedup();
    out
}

/// The bound `N` with `gⁿ(T − V) ⊆ U` for all `n ≥ N`, following the
/// proof's recipe, then checked on sampled vertices for `n ∈ [N, N+extra]`.
/// For parabolic `e` the cone `V` is ignored and `T − V` is all of `T`.
pub fn convergence_bound(
    e: &Embedding,
    u: &Cone,
    v: Option<&Cone>,
    horizon: usize,
    params: &SampleParams,
) -> Result<ConvergenceBound> {
    let t = e.tree();
    t.check(u.apex())?;
    t.check(u.branch())?;
    let c = classify(e, horizon)?;
    let axis = require_axis(&c)?;
    let need = |cone: &Cone| cone.apex().depth().max(cone.branch().depth()) + 1;
    let plus = axis.forward_end(need(u))?;
    if u.contains_end(&plus) != Some(true) {
        return Err(Error::HypothesisViolated(format!("{u} does not contain g+ = {plus}")));
    }
    let hyperbolic = c.tag == Tag::Hyperbolic;
    let v = if hyperbolic {
        let v = v.ok_or_else(|| Error::InvalidArgument("hyperbolic input needs a cone V".into()))?;
        let minus = axis.backward_end(need(v))?.expect("hyperbolic axis");
        if v.contains_end(&minus) != Some(true) {
            return Err(Error::HypothesisViolated(format!("{v} does not contain g- = {minus}")));
        }
        if !u.is_disjoint_from(v) {
            return Err(Error::HypothesisViolated(format!("{u} and {v} intersect")));
        }
        Some(v)
    } else {
        None
    };

    // x: first forward axis vertex whose cone towards g⁺ sits inside U.
    let limit = 4 * (need(u) + axis.origin().depth() + axis.translation_length()) + 8;
    let fwd = axis.forward(limit + 1)?;
    let k = (0..limit)
        .find(|&k| Cone::new(fwd[k].clone(), fwd[k + 1].clone()).is_ok_and(|c| c.is_subset_of(u)))
        .ok_or_else(|| Error::HorizonInsufficient(format!("no axis cone inside {u}")))?;
    let x_cone = Cone::new(fwd[k].clone(), fwd[k + 1].clone())?;

    let y = match v {
        Some(v) => {
            let ray = axis.backward_ray().expect("hyperbolic axis");
            let back = ray.take_in(t, limit + 1)?;
            let j = (0..limit)
                .find(|&j| Cone::new(back[j].clone(), back[j + 1].clone()).is_ok_and(|c| c.is_subset_of(v)))
                .ok_or_else(|| Error::HorizonInsufficient(format!("no axis cone inside {v}")))?;
            back[j].clone()
        }
        None => axis.halin_ray().take_in(t, 1)?.remove(0),
    };

    let mut n = 0;
    let mut cur = y.clone();
    while !x_cone.contains(&cur) {
        n += 1;
        if n > 64 * limit {
            return Err(Error::HorizonInsufficient("orbit of y never entered U".into()));
        }
        cur = e.apply(&cur)?;
    }

    let samples: Vec<Address> = sample_vertices(e, horizon, params)
        .into_iter()
        .filter(|s| v.is_none_or(|v| !v.contains(s)))
        .collect();
    for s in &samples {
        let mut img = s.clone();
        for _ in 0..n {
            img = e.apply(&img)?;
        }
        for m in n..=n + params.extra {
            if !u.contains(&img) {
                return Err(Error::VerificationFailed(format!(
                    "g^{m}({s}) = {img} lies outside {u} although N = {n}"
                )));
            }
            img = e.apply(&img)?;
        }
    }
    Ok(ConvergenceBound {
        n,
        x: x_cone.apex().clone(),
        y,
        samples: samples.len(),
        checked_up_to: n + params.extra,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PreserveMode {
    Forwards,
    Backwards,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Preserves {
    Yes,
    No,
    HorizonExceeded,
}

/// Whether `e` preserves the end `omega` forwards (`g(R) ⊆ R`) or backwards
/// (`R ⊆ g(R)`) for some ray `R` in it, looking no deeper than
/// `min(horizon, omega.depth())`.
pub fn preserves_end(e: &Embedding, omega: &EndApprox, mode: PreserveMode, horizon: usize) -> Result<Preserves> {
    e.tree().check(omega.prefix())?;
    let c = classify(e, horizon)?;
    match mode {
        PreserveMode::Forwards => forwards(e, &c, omega),
        PreserveMode::Backwards => backwards(e, &c, omega, horizon),
    }
}

fn forwards(e: &Embedding, c: &Classification, omega: &EndApprox) -> Result<Preserves> {
    Ok(match c.tag {
        Tag::HorizonExceeded => Preserves::HorizonExceeded,
        // Swapping an edge exchanges the two sides, so no end is fixed.
        Tag::EllipticEdge => Preserves::No,
        Tag::Hyperbolic | Tag::Parabolic => {
            let plus = require_axis(c)?.forward_end(omega.depth())?;
            if &plus == omega {
                Preserves::Yes
            } else {
                Preserves::No
            }
        }
        Tag::EllipticVertex => {
            let p = c.fixed_vertex.as_ref().expect("fixed vertex");
            match ray_into(p, omega) {
                None => Preserves::HorizonExceeded,
                Some(path) => {
                    for q in &path {
                        if &e.apply(q)? != q {
                            return Ok(Preserves::No);
                        }
                    }
                    Preserves::Yes
                }
            }
        }
    })
}

/// The start of the ray from `p` into `omega`, up to the deepest known
/// vertex; `None` if `p` lies below that vertex.
fn ray_into(p: &Address, omega: &EndApprox) -> Option<Vec<Address>> {
    let tip = omega.prefix();
    if tip.is_prefix_of(p) {
        return None;
    }
    let k = p.common_prefix_len(tip);
    let mut path: Vec<Address> = (k..=p.depth()).rev().map(|d| p.truncated(d)).collect();
    path.extend((k + 1..=tip.depth()).map(|d| tip.truncated(d)));
    Some(path)
}

fn backwards(e: &Embedding, c: &Classification, omega: &EndApprox, horizon: usize) -> Result<Preserves> {
    let depth = omega.depth().min(horizon);
    let ray: Vec<Address> = (0..=depth).map(|d| omega.prefix().truncated(d)).collect();
    let images: Vec<Address> = ray.iter().map(|v| e.apply(v)).collect::<Result<_>>()?;
    // R = c_m, c_{m+1}, … with g(c_{m+k+j}) = c_{m+j}: walk the preimage
    // chain of c_m along the ray and confirm it on everything visible.
    for m in 0..=depth / 2 {
        let Some(i) = (m..=depth).find(|&i| images[i] == ray[m]) else {
            continue;
        };
        let k = i - m;
        if k > depth / 2 {
            continue;
        }
        if (0..=depth - i).all(|j| images[i + j] == ray[m + j]) {
            return Ok(Preserves::Yes);
        }
    }
    // No witness. Decide from the classification whether a witness could
    // exist deeper.
    let predicted = match c.tag {
        Tag::HorizonExceeded => return Ok(Preserves::HorizonExceeded),
        Tag::EllipticEdge | Tag::Parabolic => false,
        Tag::EllipticVertex => forwards(e, c, omega)? != Preserves::No,
        Tag::Hyperbolic => {
            let minus = require_axis(c)?.backward_end(omega.depth())?.expect("double ray");
            &minus == omega
        }
    };
    Ok(if predicted {
        Preserves::HorizonExceeded
    } else {
        Preserves::No
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::address::addr;
    use crate::embedding::CubicTranslation;
    use crate::tree::{FiniteTree, Tree};

    fn spine(n: usize) -> Address {
        Address::from_indices(vec![0; n])
    }

    #[test]
    fn displacement_examples() {
        let b = Tree::binary();
        assert_eq!(displacement(&Embedding::identity(&b), &addr("0101")).unwrap(), 0);
        let s = Embedding::shift(&Tree::ray(), 1).unwrap();
        assert_eq!(displacement(&s, &spine(7)).unwrap(), 1);
        let g = Embedding::child_descent(&b, addr("0")).unwrap();
        // Oracle: breadth-first distance on the depth-3 truncation.
        let t = b.truncate(3);
        let (from, to) = (t.vertex_of(&addr("11")).unwrap(), t.vertex_of(&addr("011")).unwrap());
        let mut dist = vec![usize::MAX; t.vertex_count()];
        dist[from] = 0;
        let mut q = std::collections::VecDeque::from([from]);
        while let Some(x) = q.pop_front() {
            for &y in t.neighbors(x) {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    q.push_back(y);
                }
            }
        }
        assert_eq!(displacement(&g, &addr("11")).unwrap(), dist[to]);
        assert_eq!(dist[to], 5);
    }

    #[test]
    fn classify_examples() {
        let two = Tree::finite(FiniteTree::path(2).unwrap());
        let swap = Embedding::table(&two, [(addr("ε"), addr("0")), (addr("0"), addr("ε"))]).unwrap();
        let c = classify(&swap, 8).unwrap();
        assert_eq!(c.tag, Tag::EllipticEdge);

        let s = Embedding::shift(&Tree::ray(), 1).unwrap();
        let c = classify(&s, 32).unwrap();
        assert_eq!(c.tag, Tag::Parabolic);
        assert_eq!(c.translation_length, Some(1));
        assert_eq!(c.g_plus.unwrap().prefix(), &spine(16));
        assert!(c.g_minus.is_none());

        let t = Embedding::translate(&Tree::double_ray(), 1).unwrap();
        let c = classify(&t, 32).unwrap();
        assert_eq!(c.tag, Tag::Hyperbolic);
        assert_eq!(c.translation_length, Some(1));
        assert_eq!(c.g_plus.unwrap().prefix().indices()[0], 0);
        assert_eq!(c.g_minus.unwrap().prefix().indices()[0], 1);
    }

    #[test]
    fn direction_examples() {
        let s = Embedding::shift(&Tree::ray(), 1).unwrap();
        assert_eq!(direction(&s, 5, 32).unwrap().prefix(), &spine(5));
        let b = Tree::binary();
        let g = Embedding::child_descent(&b, addr("0")).unwrap();
        assert_eq!(direction(&g, 6, 32).unwrap().prefix(), &spine(6));
        let c = Tree::cubic();
        let t = CubicTranslation::new("(0)*".parse().unwrap(), "(1)*".parse().unwrap(), 1).unwrap();
        let g = Embedding::translate_cubic(&c, t).unwrap();
        assert_eq!(direction(&g, 4, 32).unwrap().prefix(), &addr("1111"));
        assert!(matches!(direction(&Embedding::identity(&b), 3, 8), Err(Error::Elliptic(_))));
    }

    #[test]
    fn separation_examples() {
        let s = Embedding::shift(&Tree::ray(), 1).unwrap();
        assert!(separation_certificate(&s, &spine(0), &spine(1)).unwrap().is_some());
        let b = Tree::binary();
        assert!(separation_certificate(&Embedding::identity(&b), &addr("0"), &addr("01"))
            .unwrap()
            .is_none());
        let g = Embedding::child_descent(&b, addr("0")).unwrap();
        let cert = separation_certificate(&g, &Address::root(), &addr("0")).unwrap();
        assert!(cert.is_some());
        let c = classify(&g, 32).unwrap();
        assert!(c.tag.is_non_elliptic());
        let axis = c.axis.unwrap();
        assert!(axis.contains(&Address::root(), 32).unwrap());
        assert!(axis.contains(&addr("0"), 32).unwrap());
        assert!(separation_certificate(&g, &addr("0"), &addr("1")).is_err());
    }

    #[test]
    fn convergence_examples() {
        let p = SampleParams::default();
        let s = Embedding::shift(&Tree::ray(), 1).unwrap();
        let u = Cone::new(spine(5), spine(6)).unwrap();
        assert_eq!(convergence_bound(&s, &u, None, 48, &p).unwrap().n, 6);

        let d = Tree::double_ray();
        let x = |i: i64| {
            let mut v = vec![0u32; i.unsigned_abs() as usize];
            if i < 0 {
                v[0] = 1;
            }
            Address::from_indices(v)
        };
        let u = Cone::new(x(3), x(4)).unwrap();
        let v = Cone::new(x(-2), x(-3)).unwrap();
        let t1 = Embedding::translate(&d, 1).unwrap();
        let t2 = Embedding::translate(&d, 2).unwrap();
        let n1 = convergence_bound(&t1, &u, Some(&v), 48, &p).unwrap().n;
        let n2 = convergence_bound(&t2, &u, Some(&v), 48, &p).unwrap().n;
        assert!(n2 <= n1);
        assert!(matches!(
            convergence_bound(&t1, &u, None, 48, &p),
            Err(Error::InvalidArgument(_))
        ));
        let wrong = Cone::new(x(3), x(2)).unwrap();
        assert!(matches!(
            convergence_bound(&t1, &wrong, Some(&v), 48, &p),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn preserves_examples() {
        let s = Embedding::shift(&Tree::ray(), 1).unwrap();
        let end = EndApprox::new(spine(32));
        assert_eq!(preserves_end(&s, &end, PreserveMode::Forwards, 32).unwrap(), Preserves::Yes);
        assert_eq!(preserves_end(&s, &end, PreserveMode::Backwards, 32).unwrap(), Preserves::No);
        let t = Embedding::translate(&Tree::double_ray(), 1).unwrap();
        let minus = EndApprox::new(addr("1").concat(&[0; 31]));
        assert_eq!(preserves_end(&t, &minus, PreserveMode::Backwards, 32).unwrap(), Preserves::Yes);
        assert_eq!(preserves_end(&t, &minus, PreserveMode::Forwards, 32).unwrap(), Preserves::No);
    }
}
