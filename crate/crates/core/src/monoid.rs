//! Finitely generated monoids of self-embeddings.
//!
//! Words list generator indices outer-first: `[i₁, …, iₖ]` acts as
//! `g_{i₁} ∘ … ∘ g_{iₖ}`. Enumeration is shortlex and includes the empty word.
//! Every finite approximation states the depth, word length and horizon it
//! was computed with.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::address::Address;
use crate::classify::{classify, sample_vertices, Classification, SampleParams, Tag};
use crate::embedding::{Embedding, ValidityReport, Word};
use crate::error::{Error, Result};
use crate::oracle::{self, enumerate_self_embeddings};
use crate::tree::{Cone, EndApprox, FiniteTree, Tree};

/// At most this many witness words are kept per limit prefix.
const WITNESSES_PER_PREFIX: usize = 4;

#[derive(Clone, Debug)]
pub struct MonoidPresentation {
    tree: Tree,
    generators: Vec<Embedding>,
    labels: Vec<String>,
}

impl MonoidPresentation {
    pub fn new(generators: impl IntoIterator<Item = (String, Embedding)>) -> Result<MonoidPresentation> {
        let mut labels = Vec::new();
        let mut gens: Vec<Embedding> = Vec::new();
        for (i, (label, e)) in generators.into_iter().enumerate() {
            if let Some(first) = gens.first() {
                if first.tree() != e.tree() {
                    return Err(Error::TreeMismatch);
                }
            }
            labels.push(label);
            gens.push(e.with_word(vec![i]));
        }
        let Some(first) = gens.first() else {
            return Err(Error::InvalidArgument("a monoid needs at least one generator".into()));
        };
        Ok(MonoidPresentation {
            tree: first.tree().clone(),
            generators: gens,
            labels,
        })
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn generators(&self) -> &[Embedding] {
        &self.generators
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// The embedding a word stands for.
    pub fn word(&self, w: &[usize]) -> Result<Embedding> {
        if let Some(&bad) = w.iter().find(|&&i| i >= self.rank()) {
            return Err(Error::InvalidArgument(format!("no generator with index {bad}")));
        }
        if w.is_empty() {
            return Ok(Embedding::identity(&self.tree).with_word(Vec::new()));
        }
        Embedding::compose_all(w.iter().map(|&i| &self.generators[i]))
    }

    /// `g·h·g` style text; `ε` for the empty word.
    pub fn word_label(&self, w: &[usize]) -> String {
        if w.is_empty() {
            return "ε".into();
        }
        w.iter()
            .map(|&i| self.labels.get(i).map_or("?", String::as_str))
            .collect::<Vec<_>>()
            .join("·")
    }

    /// Parses a word written with generator labels separated by `·`, `.`,
    /// `*` or whitespace; `ε` or the empty string is the empty word.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let t = text.trim();
        if t.is_empty() || t == "ε" || t == "e" {
            return Ok(Vec::new());
        }
        t.split(|c: char| c == '·' || c == '.' || c == '*' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| {
                self.labels
                    .iter()
                    .position(|l| l == s)
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown generator `{s}`")))
            })
            .collect()
    }

    pub fn validate(&self, horizon: usize) -> Vec<(String, ValidityReport)> {
        self.labels
            .iter()
            .cloned()
            .zip(self.generators.iter().map(|g| g.validate(horizon)))
            .collect()
    }
}

/// All words of length ≤ `max_len` over `k` letters in shortlex order,
/// starting with the empty word.
pub fn shortlex_words(k: usize, max_len: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    out.extend(oracle::nonempty_words(k, max_len));
    out
}

/// Words with their embeddings, shortlex, empty word first.
pub fn enumerate_words(m: &MonoidPresentation, max_len: usize) -> impl Iterator<Item = (Word, Embedding)> + '_ {
    shortlex_words(m.rank(), max_len).into_iter().map(move |w| {
        let e = m.word(&w).expect("indices in range");
        (w, e)
    })
}

/// As [`enumerate_words`], keeping only the first word of each class of
/// words that agree on the depth-`horizon` truncation.
pub fn enumerate_words_dedup(
    m: &MonoidPresentation,
    max_len: usize,
    horizon: usize,
    max_vertices: usize,
) -> Result<Vec<(Word, Embedding)>> {
    let vertices: Vec<Address> = m.tree().bfs(horizon).take(max_vertices + 1).collect();
    if vertices.len() > max_vertices {
        return Err(Error::Budget(format!(
            "truncation at horizon {horizon} exceeds {max_vertices} vertices"
        )));
    }
    let mut seen: HashMap<Vec<Address>, ()> = HashMap::new();
    let mut out = Vec::new();
    for (w, e) in enumerate_words(m, max_len) {
        let sig = vertices.iter().map(|v| e.apply(v)).collect::<Result<Vec<_>>>()?;
        if seen.insert(sig, ()).is_none() {
            out.push((w, e));
        }
    }
    Ok(out)
}

/// `w(v)` for every word of length ≤ `max_len`, shortlex.
fn orbit(m: &MonoidPresentation, v: &Address, max_len: usize) -> Result<Vec<(Word, Address)>> {
    m.tree().check(v)?;
    let words = shortlex_words(m.rank(), max_len);
    let mut memo: HashMap<&[usize], Address> = HashMap::with_capacity(words.len());
    let mut out = Vec::with_capacity(words.len());
    for w in &words {
        let img = match w.split_first() {
            None => v.clone(),
            Some((&g, _)) => m.generators[g].apply(&memo[&w[1..]])?,
        };
        memo.insert(w.as_slice(), img.clone());
        out.push((w.clone(), img));
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct LimitSetApprox {
    pub basepoint: Address,
    pub depth: usize,
    pub max_word_length: usize,
    pub prefixes: BTreeSet<EndApprox>,
    /// Largest distance from the root among the orbit points.
    pub orbit_radius: usize,
    /// The first few words (shortlex) witnessing each prefix.
    pub provenance: BTreeMap<EndApprox, Vec<Word>>,
}

/// Depth-`depth` prefixes of the orbit points `w(v)` at distance at least
/// `depth` from the root.
pub fn limit_set(m: &MonoidPresentation, v: &Address, depth: usize, max_len: usize) -> Result<LimitSetApprox> {
    let mut provenance: BTreeMap<EndApprox, Vec<Word>> = BTreeMap::new();
    let mut orbit_radius = 0;
    for (w, img) in orbit(m, v, max_len)? {
        orbit_radius = orbit_radius.max(img.depth());
        if img.depth() >= depth {
            let list = provenance.entry(EndApprox::new(img.truncated(depth))).or_default();
            if list.len() < WITNESSES_PER_PREFIX {
                list.push(w);
            }
        }
    }
    Ok(LimitSetApprox {
        basepoint: v.clone(),
        depth,
        max_word_length: max_len,
        prefixes: provenance.keys().cloned().collect(),
        orbit_radius,
        provenance,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DirectionSet {
    pub depth: usize,
    pub max_word_length: usize,
    pub horizon: usize,
    pub prefixes: BTreeSet<EndApprox>,
    /// First non-elliptic word (shortlex) with each direction.
    pub provenance: BTreeMap<EndApprox, Word>,
}

/// Classifies every nonempty word of length ≤ `max_len` (in parallel,
/// merged in shortlex order).
pub fn classify_words(m: &MonoidPresentation, max_len: usize, horizon: usize) -> Result<Vec<(Word, Classification)>> {
    let words = oracle::nonempty_words(m.rank(), max_len);
    words
        .into_par_iter()
        .map(|w| {
            let e = m.word(&w)?;
            Ok((w, classify(&e, horizon)?))
        })
        .collect()
}

/// Direction prefixes of the non-elliptic words of length ≤ `max_len`.
pub fn directions(m: &MonoidPresentation, depth: usize, max_len: usize, horizon: usize) -> Result<DirectionSet> {
    let classified = classify_words(m, max_len, horizon)?;
    let found: Vec<Option<(EndApprox, Word)>> = classified
        .into_par_iter()
        .map(|(w, c)| match (&c.axis, c.tag.is_non_elliptic()) {
            (Some(axis), true) => Ok(Some((axis.forward_end(depth)?, w))),
            _ => Ok(None),
        })
        .collect::<Result<_>>()?;
    let mut provenance = BTreeMap::new();
    for (p, w) in found.into_iter().flatten() {
        provenance.entry(p).or_insert(w);
    }
    Ok(DirectionSet {
        depth,
        max_word_length: max_len,
        horizon,
        prefixes: provenance.keys().cloned().collect(),
        provenance,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum CardinalityClass {
    Empty,
    One,
    Two,
    Many,
    /// The two approximations disagree in a way that settles nothing.
    Unresolved,
}

#[derive(Debug, Clone, Serialize)]
pub struct LimitDiagnostics {
    pub cardinality_class: CardinalityClass,
    pub density_ok: bool,
    pub perfect_ok: bool,
    pub prefix_count: usize,
    pub deeper_prefix_count: usize,
    /// Limit prefixes with no matching direction.
    pub unmatched: Vec<EndApprox>,
}

fn extensions<'a>(p: &EndApprox, deeper: &'a LimitSetApprox) -> Vec<&'a EndApprox> {
    deeper.prefixes.iter().filter(|q| p.is_coarsening_of(q)).collect()
}

/// Cardinality class, density and perfectness evidence.
///
/// The class is `Many` when there are more than two prefixes and each has
/// at least two extensions in `deeper`; `Empty`, `One` or `Two` when the
/// count is at most two and unchanged in `deeper`; `Unresolved` otherwise.
pub fn limit_diagnostics(l: &LimitSetApprox, d: &DirectionSet, deeper: &LimitSetApprox) -> Result<LimitDiagnostics> {
    if deeper.depth <= l.depth || deeper.max_word_length < l.max_word_length {
        return Err(Error::InvalidArgument(format!(
            "deeper approximation (depth {}, length {}) must be strictly deeper than (depth {}, length {})",
            deeper.depth, deeper.max_word_length, l.depth, l.max_word_length
        )));
    }
    if d.depth != l.depth {
        return Err(Error::InvalidArgument(format!(
            "direction depth {} differs from limit depth {}",
            d.depth, l.depth
        )));
    }
    let n = l.prefixes.len();
    let splits = l.prefixes.iter().all(|p| extensions(p, deeper).len() >= 2);
    // An empty approximation only counts when longer words did not push the
    // orbit any farther out.
    let bounded = deeper.orbit_radius == l.orbit_radius;
    let class = if n > 2 && splits {
        CardinalityClass::Many
    } else if n <= 2 && deeper.prefixes.len() == n && (n > 0 || bounded) {
        [CardinalityClass::Empty, CardinalityClass::One, CardinalityClass::Two][n]
    } else {
        CardinalityClass::Unresolved
    };
    let unmatched: Vec<EndApprox> = l
        .prefixes
        .iter()
        .filter(|p| !d.prefixes.iter().any(|q| q.compatible(p)))
        .cloned()
        .collect();
    Ok(LimitDiagnostics {
        cardinality_class: class,
        density_ok: n < 2 || unmatched.is_empty(),
        perfect_ok: class != CardinalityClass::Many || splits,
        prefix_count: n,
        deeper_prefix_count: deeper.prefixes.len(),
        unmatched,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct HyperbolicWitness {
    pub word: Word,
    pub label: String,
    pub classification: Classification,
}

/// The first word (shortlex, length 1..=max_len) classifying `Hyperbolic`.
/// `None` only means none up to `max_len` at this horizon.
pub fn find_hyperbolic(m: &MonoidPresentation, max_len: usize, horizon: usize) -> Result<Option<HyperbolicWitness>> {
    for len in 1..=max_len {
        let words: Vec<Word> = oracle::nonempty_words(m.rank(), len)
            .into_iter()
            .filter(|w| w.len() == len)
            .collect();
        let hit = words
            .into_par_iter()
            .map(|w| {
                let c = classify(&m.word(&w)?, horizon)?;
                Ok((w, c))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .find(|(_, c)| c.tag == Tag::Hyperbolic);
        if let Some((word, classification)) = hit {
            return Ok(Some(HyperbolicWitness {
                label: m.word_label(&word),
                word,
                classification,
            }));
        }
    }
    Ok(None)
}

/// Parameters shared by the monoid analyses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AnalysisParams {
    pub depth: usize,
    pub max_len: usize,
    pub horizon: usize,
    pub deeper_depth: usize,
    pub deeper_max_len: usize,
}

impl AnalysisParams {
    /// The deeper approximation adds 4 to the depth and 2 to the length.
    pub fn new(depth: usize, max_len: usize, horizon: usize) -> AnalysisParams {
        AnalysisParams {
            depth,
            max_len,
            horizon,
            deeper_depth: depth + 4,
            deeper_max_len: max_len + 2,
        }
    }
}

impl Default for AnalysisParams {
    fn default() -> Self {
        AnalysisParams::new(8, 4, 32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AlternativeCase {
    FixedVertexOrEdge,
    UniqueFixedLimitEnd,
    TwoLimitEnds,
    TwoIndependentNonElliptics,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum AlternativeCertificate {
    FixedVertex {
        vertex: Address,
    },
    FixedEdge {
        edge: (Address, Address),
    },
    /// `ends` at the analysis depth; `deep` are finer prefixes whose images
    /// under every generator land back in `ends`.
    FixedEnds {
        ends: Vec<EndApprox>,
        deep: Vec<EndApprox>,
    },
    Independent {
        g_word: Word,
        h_word: Word,
        g_plus: EndApprox,
        h_plus: EndApprox,
        g_plus_deep: EndApprox,
        h_plus_deep: EndApprox,
        /// `g(h⁺)` and `h(g⁺)` at the analysis depth.
        g_of_h_plus: EndApprox,
        h_of_g_plus: EndApprox,
    },
    None {
        diagnostics: String,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct AlternativeVerdict {
    pub case: AlternativeCase,
    pub certificate: AlternativeCertificate,
    pub params: AnalysisParams,
}

fn common_fixed_structure(m: &MonoidPresentation, depth: usize) -> Result<Option<AlternativeCertificate>> {
    let vertices: Vec<Address> = m.tree().bfs(depth).collect();
    for v in &vertices {
        if m.generators.iter().try_fold(true, |ok, g| Ok::<_, Error>(ok && &g.apply(v)? == v))? {
            return Ok(Some(AlternativeCertificate::FixedVertex { vertex: v.clone() }));
        }
    }
    for v in &vertices {
        let Some(p) = v.parent() else { continue };
        let mut ok = true;
        for g in &m.generators {
            let (gp, gv) = (g.apply(&p)?, g.apply(v)?);
            if !((gp == p && &gv == v) || (&gp == v && gv == p)) {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(Some(AlternativeCertificate::FixedEdge { edge: (p, v.clone()) }));
        }
    }
    Ok(None)
}

/// Whether every generator maps each of `deep` into `ends` at `depth`.
fn generators_preserve(m: &MonoidPresentation, deep: &[EndApprox], ends: &[EndApprox], depth: usize) -> bool {
    m.generators.iter().all(|g| {
        deep.iter().all(|q| {
            g.end_image(q, depth)
                .is_ok_and(|img| ends.contains(&img))
        })
    })
}

/// Depth at which a prefix must be known for its image under `g` to be
/// readable at `depth`.
fn preimage_depth(g: &Embedding, depth: usize) -> Result<usize> {
    Ok(depth + 2 * g.apply(&Address::root())?.depth() + 2)
}

/// The fixed-point alternative, trying the four cases in order.
pub fn fixed_point_alternative(m: &MonoidPresentation, params: &AnalysisParams) -> Result<AlternativeVerdict> {
    let verdict = |case, certificate| AlternativeVerdict {
        case,
        certificate,
        params: *params,
    };
    if let Some(cert) = common_fixed_structure(m, params.depth)? {
        return Ok(verdict(AlternativeCase::FixedVertexOrEdge, cert));
    }
    let root = Address::root();
    let l = limit_set(m, &root, params.depth, params.max_len)?;
    let deeper = limit_set(m, &root, params.deeper_depth, params.deeper_max_len)?;
    let d = directions(m, params.depth, params.max_len, params.horizon)?;
    let diag = limit_diagnostics(&l, &d, &deeper)?;
    let ends: Vec<EndApprox> = l.prefixes.iter().cloned().collect();
    let deep: Vec<EndApprox> = deeper.prefixes.iter().cloned().collect();
    match diag.cardinality_class {
        CardinalityClass::One if generators_preserve(m, &deep, &ends, params.depth) => {
            return Ok(verdict(
                AlternativeCase::UniqueFixedLimitEnd,
                AlternativeCertificate::FixedEnds { ends, deep },
            ));
        }
        CardinalityClass::Two if generators_preserve(m, &deep, &ends, params.depth) => {
            return Ok(verdict(
                AlternativeCase::TwoLimitEnds,
                AlternativeCertificate::FixedEnds { ends, deep },
            ));
        }
        _ => {}
    }
    if let Some(cert) = independent_pair(m, params)? {
        return Ok(verdict(AlternativeCase::TwoIndependentNonElliptics, cert));
    }
    Ok(verdict(
        AlternativeCase::Inconclusive,
        AlternativeCertificate::None {
            diagnostics: format!(
                "no common fixed vertex or edge at depth {}; limit class {:?} ({} prefixes at depth {}, {} at depth {}); no independent pair among words of length ≤ {}",
                params.depth,
                diag.cardinality_class,
                diag.prefix_count,
                params.depth,
                diag.deeper_prefix_count,
                params.deeper_depth,
                params.max_len
            ),
        },
    ))
}

fn independent_pair(m: &MonoidPresentation, params: &AnalysisParams) -> Result<Option<AlternativeCertificate>> {
    let classified = classify_words(m, params.max_len, params.horizon)?;
    let non_elliptic: Vec<(Word, Embedding, Classification)> = classified
        .into_iter()
        .filter(|(_, c)| c.tag.is_non_elliptic())
        .map(|(w, c)| Ok((w.clone(), m.word(&w)?, c)))
        .collect::<Result<_>>()?;
    for (i, (gw, g, gc)) in non_elliptic.iter().enumerate() {
        let g_axis = gc.axis.as_ref().expect("non-elliptic");
        for (hw, h, hc) in &non_elliptic[i + 1..] {
            let h_axis = hc.axis.as_ref().expect("non-elliptic");
            let h_plus_deep = h_axis.forward_end(preimage_depth(g, params.depth)?)?;
            let g_plus_deep = g_axis.forward_end(preimage_depth(h, params.depth)?)?;
            let (Ok(g_of_h), Ok(h_of_g)) = (g.end_image(&h_plus_deep, params.depth), h.end_image(&g_plus_deep, params.depth)) else {
                continue;
            };
            let h_plus = h_plus_deep.truncated(params.depth);
            let g_plus = g_plus_deep.truncated(params.depth);
            if g_of_h != h_plus && h_of_g != g_plus {
                return Ok(Some(AlternativeCertificate::Independent {
                    g_word: gw.clone(),
                    h_word: hw.clone(),
                    g_plus,
                    h_plus,
                    g_plus_deep,
                    h_plus_deep,
                    g_of_h_plus: g_of_h,
                    h_of_g_plus: h_of_g,
                }));
            }
        }
    }
    Ok(None)
}

impl AlternativeVerdict {
    /// Re-checks the certificate against the monoid from scratch.
    pub fn check(&self, m: &MonoidPresentation) -> Result<bool> {
        let depth = self.params.depth;
        Ok(match &self.certificate {
            AlternativeCertificate::FixedVertex { vertex } => {
                m.generators.iter().all(|g| g.apply(vertex).is_ok_and(|x| &x == vertex))
            }
            AlternativeCertificate::FixedEdge { edge: (u, v) } => m.generators.iter().all(|g| {
                match (g.apply(u), g.apply(v)) {
                    (Ok(a), Ok(b)) => (&a == u && &b == v) || (&a == v && &b == u),
                    _ => false,
                }
            }),
            AlternativeCertificate::FixedEnds { ends, deep } => {
                deep.iter().all(|q| ends.iter().any(|e| e.is_coarsening_of(q)))
                    && ends.iter().all(|e| deep.iter().any(|q| e.is_coarsening_of(q)))
                    && generators_preserve(m, deep, ends, depth)
            }
            AlternativeCertificate::Independent {
                g_word,
                h_word,
                g_plus,
                h_plus,
                g_plus_deep,
                h_plus_deep,
                ..
            } => {
                let g = m.word(g_word)?;
                let h = m.word(h_word)?;
                let gc = classify(&g, self.params.horizon)?;
                let hc = classify(&h, self.params.horizon)?;
                let (Some(ga), Some(ha)) = (&gc.axis, &hc.axis) else {
                    return Ok(false);
                };
                gc.tag.is_non_elliptic()
                    && hc.tag.is_non_elliptic()
                    && &ga.forward_end(g_plus_deep.depth())? == g_plus_deep
                    && &ha.forward_end(h_plus_deep.depth())? == h_plus_deep
                    && &g_plus_deep.truncated(depth) == g_plus
                    && &h_plus_deep.truncated(depth) == h_plus
                    && &g.end_image(h_plus_deep, depth)? != h_plus
                    && &h.end_image(g_plus_deep, depth)? != g_plus
            }
            AlternativeCertificate::None { .. } => false,
        })
    }
}

/// Parameters for the ping-pong search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FreeParams {
    pub horizon: usize,
    /// Words over `{a, b}` up to this length are checked to act distinctly.
    pub word_length: usize,
    pub sample: SampleParams,
}

impl FreeParams {
    pub fn new(horizon: usize) -> FreeParams {
        FreeParams {
            horizon,
            word_length: 6,
            sample: SampleParams::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InclusionCheck {
    pub statement: String,
    pub structural: bool,
    pub sampled: usize,
}

/// A ping-pong certificate: `a = g^m`, `b = hⁿ` with
/// `a({x} ∪ U_h ∪ U_g) ⊆ U_g` and `b({x} ∪ U_g ∪ U_h) ⊆ U_h`.
#[derive(Debug, Clone, Serialize)]
pub struct FreeCertificate {
    pub g_word: Word,
    pub h_word: Word,
    pub m: usize,
    pub n: usize,
    pub x: Address,
    pub u_g: Cone,
    pub u_h: Cone,
    pub verified_horizon: usize,
    pub word_length_checked: usize,
    pub inclusions: Vec<InclusionCheck>,
    #[serde(skip)]
    pub a: Embedding,
    #[serde(skip)]
    pub b: Embedding,
    /// Windows of the two invariant lines, from the backward side to the
    /// forward side.
    pub g_line: Vec<Address>,
    pub h_line: Vec<Address>,
}

/// Up to `n` vertices on each side of `x_0`, ordered towards the forward end.
fn line_window(c: &Classification, e: &Embedding, n: usize) -> Result<Vec<Address>> {
    let axis = c.axis.as_ref().ok_or_else(|| Error::Elliptic(format!("classified {}", c.tag)))?;
    let mut back: Vec<Address> = match axis.backward_ray() {
        Some(r) => r.take_in(e.tree(), n + 1)?.into_iter().skip(1).collect(),
        None => axis.backward().to_vec(),
    };
    back.reverse();
    back.extend(axis.forward(n)?);
    Ok(back)
}

fn distance_to(line: &[Address], v: &Address) -> usize {
    line.iter()
        .map(|w| crate::tree::distance(v, w))
        .min()
        .unwrap_or(usize::MAX)
}

/// Whether the cone meets the line window or contains one of its ends.
fn cone_avoids(cone: &Cone, line: &[Address], ends: &[EndApprox]) -> bool {
    !line.iter().any(|v| cone.contains(v)) && ends.iter().all(|e| cone.contains_end(e) == Some(false))
}

fn line_ends(c: &Classification, depth: usize) -> Result<Vec<EndApprox>> {
    let axis = c.axis.as_ref().expect("non-elliptic");
    let mut out = vec![axis.forward_end(depth)?];
    if let Some(m) = axis.backward_end(depth)? {
        out.push(m);
    }
    Ok(out)
}

/// Searches a ping-pong certificate for the words `g_word`, `h_word`.
pub fn free_monoid_certificate(
    m: &MonoidPresentation,
    g_word: &[usize],
    h_word: &[usize],
    params: &FreeParams,
) -> Result<FreeCertificate> {
    let horizon = params.horizon;
    let g = m.word(g_word)?;
    let h = m.word(h_word)?;
    let gc = classify(&g, horizon)?;
    let hc = classify(&h, horizon)?;
    for (w, c) in [(g_word, &gc), (h_word, &hc)] {
        if !c.tag.is_non_elliptic() {
            return Err(Error::HypothesisViolated(format!(
                "{} classifies {}",
                m.word_label(w),
                c.tag
            )));
        }
    }
    let d = horizon / 2;
    let gp = gc.axis.as_ref().expect("axis").forward_end(preimage_depth(&h, d)?)?;
    let hp = hc.axis.as_ref().expect("axis").forward_end(preimage_depth(&g, d)?)?;
    if g.end_image(&hp, d)? == hp.truncated(d) {
        return Err(Error::HypothesisViolated(format!(
            "{} fixes the direction of {}",
            m.word_label(g_word),
            m.word_label(h_word)
        )));
    }
    if h.end_image(&gp, d)? == gp.truncated(d) {
        return Err(Error::HypothesisViolated(format!(
            "{} fixes the direction of {}",
            m.word_label(h_word),
            m.word_label(g_word)
        )));
    }

    let g_line = line_window(&gc, &g, horizon)?;
    let h_line = line_window(&hc, &h, horizon)?;

    // Pivot: x on R_g closest to R_h; on a tie inside R_h, the one where the
    // forward part of R_h leaves R_g.
    let dist: Vec<usize> = g_line.iter().map(|v| distance_to(&h_line, v)).collect();
    let best = *dist.iter().min().expect("nonempty line");
    let x_pos = (0..g_line.len())
        .filter(|&i| dist[i] == best)
        .find(|&i| {
            if best > 0 {
                return true;
            }
            let j = h_line.iter().position(|v| v == &g_line[i]).expect("on both lines");
            h_line.get(j + 1).is_some_and(|next| !g_line.contains(next))
        })
        .ok_or_else(|| Error::HorizonInsufficient("no pivot found in the line windows".into()))?;
    let x = g_line[x_pos].clone();
    let xh_pos = (0..h_line.len())
        .min_by_key(|&j| crate::tree::distance(&x, &h_line[j]))
        .expect("nonempty line");

    let need = |c: &Cone| c.apex().depth().max(c.branch().depth()) + 1;
    let u_g = (x_pos..g_line.len() - 1)
        .map(|k| Cone::new(g_line[k].clone(), g_line[k + 1].clone()))
        .filter_map(Result::ok)
        .find(|c| {
            !c.contains(&x)
                && line_ends(&hc, need(c)).is_ok_and(|ends| cone_avoids(c, &h_line, &ends))
        })
        .ok_or_else(|| Error::HorizonInsufficient("no cone around g+ avoids the line of h".into()))?;
    let u_h = (xh_pos..h_line.len() - 1)
        .map(|k| Cone::new(h_line[k].clone(), h_line[k + 1].clone()))
        .filter_map(Result::ok)
        .find(|c| {
            !c.contains(&x)
                && c.is_disjoint_from(&u_g)
                && line_ends(&gc, need(c)).is_ok_and(|ends| cone_avoids(c, &g_line, &ends))
        })
        .ok_or_else(|| Error::HorizonInsufficient("no cone around h+ avoids the line of g".into()))?;

    let structural = |e: &Embedding, target: &Cone| -> Result<bool> {
        let x_in = target.contains(&e.apply(&x)?);
        let mut ok = x_in;
        for c in [&u_g, &u_h] {
            let img = Cone::new(e.apply(c.apex())?, e.apply(c.branch())?)?;
            ok = ok && img.is_subset_of(target);
        }
        Ok(ok)
    };
    let mut a_pows = vec![Embedding::identity(m.tree())];
    let mut b_pows = vec![Embedding::identity(m.tree())];
    let mut a_ok = vec![false];
    let mut b_ok = vec![false];
    for s in 1..=horizon {
        let a = Embedding::compose(&g, &a_pows[s - 1])?;
        let b = Embedding::compose(&h, &b_pows[s - 1])?;
        a_ok.push(structural(&a, &u_g)?);
        b_ok.push(structural(&b, &u_h)?);
        a_pows.push(a);
        b_pows.push(b);
    }
    let (mm, nn) = match (1..=horizon).find(|&s| a_ok[s] && b_ok[s]) {
        Some(s) => (s, s),
        None => {
            let mm = (1..=horizon).find(|&s| a_ok[s]);
            let nn = (1..=horizon).find(|&s| b_ok[s]);
            match (mm, nn) {
                (Some(mm), Some(nn)) => (mm, nn),
                _ => {
                    return Err(Error::HorizonInsufficient(format!(
                        "no exponents up to {horizon}: {} fails",
                        if mm.is_none() { "a({x} ∪ U_g ∪ U_h) ⊆ U_g" } else { "b({x} ∪ U_g ∪ U_h) ⊆ U_h" }
                    )))
                }
            }
        }
    };
    let a = a_pows.swap_remove(mm);
    let b = b_pows.swap_remove(nn);

    // Sampled re-check on the truncation.
    let samples: Vec<Address> = sample_vertices(&g, horizon, &params.sample)
        .into_iter()
        .filter(|v| v == &x || u_g.contains(v) || u_h.contains(v))
        .collect();
    for (e, target, label) in [(&a, &u_g, "a"), (&b, &u_h, "b")] {
        for v in &samples {
            let img = e.apply(v)?;
            if !target.contains(&img) {
                return Err(Error::VerificationFailed(format!(
                    "{label}({v}) = {img} lies outside {target}"
                )));
            }
        }
    }
    let inclusions = vec![
        InclusionCheck {
            statement: format!("a({{x}} ∪ U_h ∪ U_g) ⊆ U_g with a = g^{mm}"),
            structural: true,
            sampled: samples.len(),
        },
        InclusionCheck {
            statement: format!("b({{x}} ∪ U_g ∪ U_h) ⊆ U_h with b = h^{nn}"),
            structural: true,
            sampled: samples.len(),
        },
    ];
    if !oracle::free_words_distinct(&a, &b, params.word_length, horizon, oracle::DEFAULT_WORD_BUDGET)? {
        return Err(Error::VerificationFailed(format!(
            "two words of length ≤ {} over {{a, b}} agree at horizon {horizon}",
            params.word_length
        )));
    }
    Ok(FreeCertificate {
        g_word: g_word.to_vec(),
        h_word: h_word.to_vec(),
        m: mm,
        n: nn,
        x,
        u_g,
        u_h,
        verified_horizon: horizon,
        word_length_checked: params.word_length,
        inclusions,
        a,
        b,
        g_line,
        h_line,
    })
}

fn minimal_subtree(t: &Tree, points: &[Address]) -> Result<BTreeSet<(Address, Address)>> {
    let mut edges = BTreeSet::new();
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            for w in t.path(p, q)?.windows(2) {
                edges.insert(ordered(&w[0], &w[1]));
            }
        }
    }
    Ok(edges)
}

fn ordered(a: &Address, b: &Address) -> (Address, Address) {
    if a <= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

/// The subdivided 3-regular tree `P ∪ ⋃ w(T_a) ∪ ⋃ w(T_b)` over the words
/// `w` in `{a, b}` of length ≤ `word_len`.
pub fn extract_subdivided_cubic(cert: &FreeCertificate, word_len: usize) -> Result<FiniteTree> {
    if word_len > cert.word_length_checked {
        return Err(Error::HorizonInsufficient(format!(
            "word length {word_len} exceeds the certified {}",
            cert.word_length_checked
        )));
    }
    let t = cert.a.tree();
    let closest = |line: &[Address], cone: &Cone| -> Result<Address> {
        line.iter()
            .filter(|v| cone.contains(v))
            .min_by_key(|v| crate::tree::distance(v, &cert.x))
            .cloned()
            .ok_or_else(|| Error::HorizonInsufficient(format!("line window misses {cone}")))
    };
    let u = closest(&cert.g_line, &cert.u_g)?;
    let v = closest(&cert.h_line, &cert.u_h)?;
    let (a, b) = (&cert.a, &cert.b);
    let mut edges = minimal_subtree(t, &[u.clone(), v.clone()])?;
    let t_a = minimal_subtree(t, &[u.clone(), a.apply(&u)?, a.apply(&v)?])?;
    let t_b = minimal_subtree(t, &[v.clone(), b.apply(&u)?, b.apply(&v)?])?;
    let gens = [a, b];
    for w in shortlex_words(2, word_len) {
        let image = |x: &Address| -> Result<Address> {
            let mut cur = x.clone();
            for &i in w.iter().rev() {
                cur = gens[i].apply(&cur)?;
            }
            Ok(cur)
        };
        for (p, q) in t_a.iter().chain(t_b.iter()) {
            edges.insert(ordered(&image(p)?, &image(q)?));
        }
    }
    if let Some((p, q)) = edges
        .iter()
        .find(|(p, q)| p.depth().max(q.depth()) > cert.verified_horizon)
    {
        return Err(Error::HorizonInsufficient(format!(
            "edge {p}–{q} lies beyond the certified horizon {}",
            cert.verified_horizon
        )));
    }
    FiniteTree::from_labelled_edges([], edges)
}

/// What the LPS-style alternative is run on.
pub enum LpsInput<'a> {
    /// Every self-embedding of a finite tree (its automorphisms).
    AllEmbeddingsOf(&'a Tree),
    Monoid(&'a MonoidPresentation),
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind")]
pub enum LpsVerdict {
    FixedVertex { vertex: Address },
    FixedEdge { edge: (Address, Address) },
    FixedEnds { ends: Vec<EndApprox> },
    SubdividedCubic {
        certificate: Box<FreeCertificate>,
        /// Vertex count and degree histogram of the extracted tree.
        vertices: usize,
        degree_histogram: BTreeMap<usize, usize>,
        #[serde(skip)]
        tree: FiniteTree,
    },
    Inconclusive { reason: String },
}

/// Either a fixed vertex, edge or set of at most two ends, or a subdivided
/// 3-regular tree built from a ping-pong pair.
pub fn lps_alternative(input: LpsInput<'_>, params: &AnalysisParams, free: &FreeParams) -> Result<LpsVerdict> {
    let owned;
    let m = match input {
        LpsInput::Monoid(m) => m,
        LpsInput::AllEmbeddingsOf(t) => {
            if !t.is_finite() {
                return Err(Error::InvalidArgument(
                    "all-embeddings mode needs a finite tree".into(),
                ));
            }
            let all = enumerate_self_embeddings(t)?;
            owned = MonoidPresentation::new(
                all.into_iter().enumerate().map(|(i, e)| (format!("e{i}"), e)),
            )?;
            &owned
        }
    };
    let mut params = *params;
    if m.tree().is_finite() {
        // Look at every vertex of a finite tree.
        let n = m.tree().truncate(usize::MAX).vertex_count();
        if n > params.depth {
            params = AnalysisParams { horizon: params.horizon, ..AnalysisParams::new(n, params.max_len, params.horizon) };
        }
    }
    let verdict = fixed_point_alternative(m, &params)?;
    Ok(match verdict.certificate {
        AlternativeCertificate::FixedVertex { vertex } => LpsVerdict::FixedVertex { vertex },
        AlternativeCertificate::FixedEdge { edge } => LpsVerdict::FixedEdge { edge },
        AlternativeCertificate::FixedEnds { ends, .. } => LpsVerdict::FixedEnds { ends },
        AlternativeCertificate::Independent { g_word, h_word, .. } => {
            let cert = free_monoid_certificate(m, &g_word, &h_word, free)?;
            let tree = extract_subdivided_cubic(&cert, 3.min(cert.word_length_checked))?;
            LpsVerdict::SubdividedCubic {
                vertices: tree.vertex_count(),
                degree_histogram: tree.degree_histogram(),
                certificate: Box::new(cert),
                tree,
            }
        }
        AlternativeCertificate::None { diagnostics } => LpsVerdict::Inconclusive { reason: diagnostics },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::address::addr;

    fn shift_monoid() -> MonoidPresentation {
        let r = Tree::ray();
        MonoidPresentation::new([("s".to_string(), Embedding::shift(&r, 1).unwrap())]).unwrap()
    }

    #[test]
    fn word_counts() {
        assert_eq!(enumerate_words(&shift_monoid(), 3).count(), 4);
        let d = Tree::double_ray();
        let m = MonoidPresentation::new([
            ("p".to_string(), Embedding::translate(&d, 1).unwrap()),
            ("q".to_string(), Embedding::translate(&d, -1).unwrap()),
        ])
        .unwrap();
        let words: Vec<Word> = enumerate_words(&m, 2).map(|(w, _)| w).collect();
        assert_eq!(words, vec![vec![], vec![0], vec![1], vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        // p·q and q·p are both the identity.
        assert_eq!(enumerate_words_dedup(&m, 2, 8, 1000).unwrap().len(), 5);
        assert_eq!(m.parse_word("p·q").unwrap(), vec![0, 1]);
        assert_eq!(m.word_label(&[1, 0]), "q·p");
    }

    #[test]
    fn dedup_identifies_powers() {
        let r = Tree::ray();
        let m = MonoidPresentation::new([
            ("s".to_string(), Embedding::shift(&r, 1).unwrap()),
            ("t".to_string(), Embedding::shift(&r, 2).unwrap()),
        ])
        .unwrap();
        let kept = enumerate_words_dedup(&m, 2, 16, 100).unwrap();
        assert!(kept.iter().any(|(w, _)| w == &vec![1]));
        assert!(!kept.iter().any(|(w, _)| w == &vec![0, 0]));
    }

    #[test]
    fn shift_limit_set() {
        let m = shift_monoid();
        let l = limit_set(&m, &Address::root(), 8, 12).unwrap();
        assert_eq!(l.prefixes.len(), 1);
        let d = directions(&m, 8, 12, 32).unwrap();
        let deeper = limit_set(&m, &Address::root(), 12, 14).unwrap();
        let diag = limit_diagnostics(&l, &d, &deeper).unwrap();
        assert_eq!(diag.cardinality_class, CardinalityClass::One);
        assert!(diag.density_ok && diag.perfect_ok);
        assert!(limit_diagnostics(&deeper, &d, &l).is_err());
        let v = fixed_point_alternative(&m, &AnalysisParams::new(8, 12, 32)).unwrap();
        assert_eq!(v.case, AlternativeCase::UniqueFixedLimitEnd);
        assert!(v.check(&m).unwrap());
    }

    #[test]
    fn identity_has_no_directions() {
        let b = Tree::binary();
        let m = MonoidPresentation::new([("id".to_string(), Embedding::identity(&b))]).unwrap();
        assert!(directions(&m, 4, 3, 16).unwrap().prefixes.is_empty());
        assert!(find_hyperbolic(&m, 3, 16).unwrap().is_none());
    }

    #[test]
    fn finite_reflection_alternative() {
        let p3 = Tree::finite(FiniteTree::path(3).unwrap());
        let refl = Embedding::table(
            &p3,
            [(addr("ε"), addr("00")), (addr("0"), addr("0")), (addr("00"), addr("ε"))],
        )
        .unwrap();
        let m = MonoidPresentation::new([
            ("id".to_string(), Embedding::identity(&p3)),
            ("r".to_string(), refl),
        ])
        .unwrap();
        let v = fixed_point_alternative(&m, &AnalysisParams::default()).unwrap();
        assert_eq!(v.case, AlternativeCase::FixedVertexOrEdge);
        assert_eq!(v.certificate, AlternativeCertificate::FixedVertex { vertex: addr("0") });
        assert!(v.check(&m).unwrap());
    }

    #[test]
    fn lps_on_p4() {
        let p4 = Tree::finite(FiniteTree::path(4).unwrap());
        let v = lps_alternative(LpsInput::AllEmbeddingsOf(&p4), &AnalysisParams::default(), &FreeParams::new(24)).unwrap();
        match v {
            LpsVerdict::FixedEdge { edge } => assert_eq!(edge, (addr("0"), addr("00"))),
            other => panic!("{other:?}"),
        }
        assert!(lps_alternative(LpsInput::AllEmbeddingsOf(&Tree::ray()), &AnalysisParams::default(), &FreeParams::new(24)).is_err());
    }
}
