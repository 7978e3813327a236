//! Brute-force ground truth for small finite trees.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::address::Address;
use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::tree::{FiniteTree, Tree};

/// Largest tree the enumerator accepts.
pub const MAX_ENUMERATION_VERTICES: usize = 12;

/// All injective adjacency-preserving self-maps of a finite tree, as table
/// embeddings, found by backtracking over a breadth-first vertex order.
pub fn enumerate_self_embeddings(t: &Tree) -> Result<Vec<Embedding>> {
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("{t} is infinite")));
    }
    let ft = t
        .truncate_with_budget(usize::MAX, MAX_ENUMERATION_VERTICES)
        .map_err(|_| Error::Budget(format!("enumeration is limited to {MAX_ENUMERATION_VERTICES} vertices")))?;
    let n = ft.vertex_count();
    // Truncation numbers vertices breadth first, so every non-root vertex has
    // its parent earlier in the order.
    let mut maps = Vec::new();
    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn extend(
        ft: &FiniteTree,
        k: usize,
        image: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let n = ft.vertex_count();
        if k == n {
            out.push(image.clone());
            return;
        }
        let candidates: Vec<usize> = match ft.parent(k) {
            None => (0..n).collect(),
            Some(p) => ft.neighbors(image[p]).to_vec(),
        };
        for c in candidates {
            if !used[c] {
                used[c] = true;
                image[k] = c;
                extend(ft, k + 1, image, used, out);
                used[c] = false;
            }
        }
        image[k] = usize::MAX;
    }
    extend(&ft, 0, &mut image, &mut used, &mut maps);
    let label = |v: usize| ft.label(v).expect("truncations are labelled").clone();
    maps.into_iter()
        .map(|m| Embedding::table(t, (0..n).map(|v| (label(v), label(m[v])))))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleVerdict {
    pub elliptic: bool,
    pub fixed_vertices: BTreeSet<Address>,
    /// Edges `(u, v)` with `u < v` that the map swaps.
    pub inverted_edges: BTreeSet<(Address, Address)>,
    /// The full vertex table.
    pub evidence: BTreeMap<Address, Address>,
}

/// Scans every vertex and edge of a finite tree for fixes and swaps.
pub fn brute_classify(t: &Tree, e: &Embedding) -> Result<OracleVerdict> {
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("{t} is infinite")));
    }
    let mut evidence = BTreeMap::new();
    for v in t.bfs(usize::MAX) {
        let w = e.apply(&v)?;
        evidence.insert(v, w);
    }
    let fixed_vertices: BTreeSet<Address> = evidence
        .iter()
        .filter(|(v, w)| v == w)
        .map(|(v, _)| v.clone())
        .collect();
    let inverted_edges: BTreeSet<(Address, Address)> = evidence
        .iter()
        .filter_map(|(v, w)| {
            let p = v.parent()?;
            (w == &p && evidence[&p] == *v).then(|| (p.clone().min(v.clone()), p.max(v.clone())))
        })
        .collect();
    Ok(OracleVerdict {
        elliptic: !fixed_vertices.is_empty() || !inverted_edges.is_empty(),
        fixed_vertices,
        inverted_edges,
        evidence,
    })
}

/// Default vertex budget for [`free_words_distinct`].
pub const DEFAULT_WORD_BUDGET: usize = 1 << 20;

/// Whether the nonempty words of length ≤ `max_len` over `{a, b}` act
/// pairwise differently on the depth-`horizon` truncation.
///
/// Words are split by their images at successive truncation vertices; the
/// answer is `true` as soon as every class is a singleton, and `false` if the
/// truncation runs out first. At most `max_vertices` vertices are visited.
pub fn free_words_distinct(
    a: &Embedding,
    b: &Embedding,
    max_len: usize,
    horizon: usize,
    max_vertices: usize,
) -> Result<bool> {
    if a.tree() != b.tree() {
        return Err(Error::TreeMismatch);
    }
    let gens = [a, b];
    let words = nonempty_words(2, max_len);
    let mut classes: Vec<Vec<usize>> = vec![(0..words.len()).collect()];
    classes.retain(|c| c.len() > 1);
    for (count, v) in a.tree().bfs(horizon).enumerate() {
        if classes.is_empty() {
            return Ok(true);
        }
        if count >= max_vertices {
            return Err(Error::Budget(format!(
                "word comparison at horizon {horizon} exceeds {max_vertices} vertices"
            )));
        }
        let images = word_images(&gens, &words, &v)?;
        let mut next = Vec::new();
        for class in classes {
            let mut split: BTreeMap<&Address, Vec<usize>> = BTreeMap::new();
            for i in class {
                split.entry(&images[i]).or_default().push(i);
            }
            next.extend(split.into_values().filter(|c| c.len() > 1));
        }
        classes = next;
    }
    Ok(classes.is_empty())
}

/// Nonempty words of length ≤ `max_len` over `k` letters, shortlex.
pub(crate) fn nonempty_words(k: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut level: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..max_len {
        level = level
            .iter()
            .flat_map(|w| {
                (0..k).map(move |c| {
                    let mut x = w.clone();
                    x.push(c);
                    x
                })
            })
            .collect();
        out.extend(level.iter().cloned());
    }
    out
}

/// `w(v)` for every word, outer letter first, sharing suffix work.
fn word_images(gens: &[&Embedding], words: &[Vec<usize>], v: &Address) -> Result<Vec<Address>> {
    let mut memo: HashMap<&[usize], Address> = HashMap::new();
    memo.insert(&[][..], v.clone());
    // Shortlex order lists every proper suffix of a word before the word.
    let mut out = Vec::with_capacity(words.len());
    for w in words {
        let inner = &memo[&w[1..]];
        let img = gens[w[0]].apply(inner)?;
        memo.insert(w.as_slice(), img.clone());
        out.push(img);
    }
    Ok(out)
}

/// A uniformly random labelled tree on `n` vertices, decoded from a Prüfer
/// sequence drawn with a seeded generator.
pub fn random_finite_tree(seed: u64, n: usize) -> Result<FiniteTree> {
    if n == 0 {
        return Err(Error::InvalidArgument("a tree needs at least one vertex".into()));
    }
    if n <= 2 {
        return FiniteTree::path(n);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let code: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    decode_prufer(n, &code)
}

/// All `n^(n-2)` labelled trees on `n` vertices, one per Prüfer sequence.
/// Intended for `n ≤ 7`.
pub fn all_labelled_trees(n: usize) -> Result<Vec<FiniteTree>> {
    if n <= 2 {
        return Ok(vec![FiniteTree::path(n.max(1))?]);
    }
    let total = n.pow((n - 2) as u32);
    let mut out = Vec::with_capacity(total);
    for mut k in 0..total {
        let mut code = Vec::with_capacity(n - 2);
        for _ in 0..n - 2 {
            code.push(k % n);
            k /= n;
        }
        out.push(decode_prufer(n, &code)?);
    }
    Ok(out)
}

fn decode_prufer(n: usize, code: &[usize]) -> Result<FiniteTree> {
    let mut degree = vec![1usize; n];
    for &c in code {
        degree[c] += 1;
    }
    let mut leaves: BTreeSet<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &c in code {
        let leaf = leaves.pop_first().expect("leaf");
        edges.push((leaf, c));
        degree[c] -= 1;
        if degree[c] == 1 {
            leaves.insert(c);
        }
    }
    let rest: Vec<usize> = leaves.into_iter().collect();
    edges.push((rest[0], rest[1]));
    FiniteTree::new(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::address::addr;

    fn finite(t: FiniteTree) -> Tree {
        Tree::finite(t)
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_self_embeddings(&finite(FiniteTree::single_vertex())).unwrap().len(), 1);
        assert_eq!(enumerate_self_embeddings(&finite(FiniteTree::path(3).unwrap())).unwrap().len(), 2);
        let star = FiniteTree::new(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        // Oracle: a star's automorphisms are the 3! leaf permutations.
        assert_eq!(enumerate_self_embeddings(&finite(star)).unwrap().len(), 6);
        assert!(matches!(
            enumerate_self_embeddings(&finite(FiniteTree::path(13).unwrap())),
            Err(Error::Budget(_))
        ));
        assert!(enumerate_self_embeddings(&Tree::ray()).is_err());
    }

    #[test]
    fn brute_examples() {
        let p3 = finite(FiniteTree::path(3).unwrap());
        let id = Embedding::identity(&p3);
        assert_eq!(brute_classify(&p3, &id).unwrap().fixed_vertices.len(), 3);
        let p4 = finite(FiniteTree::path(4).unwrap());
        let maps = enumerate_self_embeddings(&p4).unwrap();
        let reflection = maps.iter().find(|m| m.apply(&Address::root()).unwrap() != Address::root()).unwrap();
        let v = brute_classify(&p4, reflection).unwrap();
        assert!(v.fixed_vertices.is_empty());
        assert_eq!(v.inverted_edges, BTreeSet::from([(addr("0"), addr("00"))]));
    }

    #[test]
    fn every_seven_vertex_automorphism_is_elliptic() {
        for t in all_labelled_trees(7).unwrap().into_iter().step_by(97) {
            let tree = finite(t);
            for e in enumerate_self_embeddings(&tree).unwrap() {
                assert!(brute_classify(&tree, &e).unwrap().elliptic);
            }
        }
    }

    #[test]
    fn word_distinctness() {
        let r = Tree::ray();
        let s = Embedding::shift(&r, 1).unwrap();
        assert!(!free_words_distinct(&s, &s, 3, 16, DEFAULT_WORD_BUDGET).unwrap());
        let s2 = Embedding::shift(&r, 2).unwrap();
        // a∘b = b∘a already at length 2.
        assert!(!free_words_distinct(&s, &s2, 2, 16, DEFAULT_WORD_BUDGET).unwrap());
        assert_eq!(nonempty_words(2, 6).len(), 126);
    }

    #[test]
    fn random_trees() {
        assert_eq!(random_finite_tree(3, 1).unwrap().vertex_count(), 1);
        assert_eq!(random_finite_tree(3, 2).unwrap().edges(), &[(0, 1)]);
        assert_eq!(random_finite_tree(11, 8).unwrap(), random_finite_tree(11, 8).unwrap());
        assert_eq!(all_labelled_trees(4).unwrap().len(), 16);
    }
}
