//! Named example trees, embeddings and monoids.

use crate::address::{addr, Address};
use crate::embedding::{CubicTranslation, Embedding, PeriodicEnd};
use crate::error::{Error, Result};
use crate::monoid::MonoidPresentation;
use crate::tree::{FiniteTree, Tree};

/// Gallery tree names accepted by [`tree`]; `N` is a positive length.
pub const TREE_NAMES: [&str; 3] = ["binary_plus_path(N)", "binary_plus_ray", "decorated_binary_ray"];

/// The binary tree with a path of `len` new vertices attached at the root.
pub fn binary_plus_path(len: usize) -> Result<Tree> {
    Ok(Tree::binary()
        .attach_path(Address::root(), len)?
        .with_gallery_name(format!("binary_plus_path({len})")))
}

/// The binary tree with a ray attached at the root (as child `2`).
pub fn binary_plus_ray() -> Tree {
    Tree::binary()
        .attach_ray(Address::root())
        .expect("root is a vertex")
        .with_gallery_name("binary_plus_ray")
}

/// `binary_plus_ray` where every vertex at depth `1 mod 3` gains 4 leaves
/// and every vertex at depth `2 mod 3` gains 8.
pub fn decorated_binary_ray() -> Tree {
    Tree::binary()
        .attach_ray(Address::root())
        .and_then(|t| t.decorate(3, 1, 4))
        .and_then(|t| t.decorate(3, 2, 8))
        .expect("within the decoration cap")
        .with_gallery_name("decorated_binary_ray")
}

/// Resolves a gallery tree name such as `binary_plus_path(3)`.
pub fn tree(name: &str) -> Result<Tree> {
    let name = name.trim();
    match name {
        "binary_plus_ray" => return Ok(binary_plus_ray()),
        "decorated_binary_ray" => return Ok(decorated_binary_ray()),
        _ => {}
    }
    let arg = name
        .strip_prefix("binary_plus_path(")
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| Error::InvalidArgument(format!("unknown gallery tree `{name}`")))?;
    let len: usize = arg
        .trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("bad path length `{arg}`")))?;
    if len == 0 {
        return Err(Error::InvalidArgument("binary_plus_path needs N ≥ 1".into()));
    }
    binary_plus_path(len)
}

fn named(pairs: Vec<(&str, Embedding)>) -> Result<MonoidPresentation> {
    MonoidPresentation::new(pairs.into_iter().map(|(l, e)| (l.to_string(), e.with_name(l))))
}

/// `{swap, path_descent(0), path_descent(1)}`. No element is hyperbolic.
pub fn binary_plus_path_monoid(len: usize) -> Result<MonoidPresentation> {
    let t = binary_plus_path(len)?;
    named(vec![
        ("swap", Embedding::swap_root_subtrees(&t)?),
        ("d0", Embedding::path_descent(&t, 0)?),
        ("d1", Embedding::path_descent(&t, 1)?),
    ])
}

/// `{swap, ray_descent(0), ray_descent(1)}`; the descents are hyperbolic
/// with backward end along the attached ray.
pub fn binary_plus_ray_monoid() -> Result<MonoidPresentation> {
    let t = binary_plus_ray();
    named(vec![
        ("swap", Embedding::swap_root_subtrees(&t)?),
        ("r0", Embedding::ray_descent(&t, 0)?),
        ("r1", Embedding::ray_descent(&t, 1)?),
    ])
}

/// `{identity, swap, rotate_leaves(at=2)}`, all fixing the end of the
/// attached ray.
pub fn decorated_monoid() -> Result<MonoidPresentation> {
    let t = decorated_binary_ray();
    named(vec![
        ("id", Embedding::identity(&t)),
        ("swap", Embedding::swap_root_subtrees(&t)?),
        ("rot", Embedding::rotate_leaves(&t, addr("2"))?),
    ])
}

/// The end of the ray attached to the gallery trees, at `depth ≥ 1`.
pub fn attached_ray_end(depth: usize) -> Address {
    let mut idx = vec![0u32; depth];
    if let Some(first) = idx.first_mut() {
        *first = 2;
    }
    Address::from_indices(idx)
}

/// `{identity, reflection}` on the path with three vertices.
pub fn reflection_monoid() -> Result<MonoidPresentation> {
    let p3 = Tree::finite(FiniteTree::path(3)?);
    let r = Embedding::table(&p3, [(addr("ε"), addr("00")), (addr("0"), addr("0")), (addr("00"), addr("ε"))])?;
    named(vec![("id", Embedding::identity(&p3)), ("r", r)])
}

pub fn shift_monoid() -> Result<MonoidPresentation> {
    named(vec![("s", Embedding::shift(&Tree::ray(), 1)?)])
}

pub fn translation_monoid() -> Result<MonoidPresentation> {
    let d = Tree::double_ray();
    named(vec![("p", Embedding::translate(&d, 1)?), ("q", Embedding::translate(&d, -1)?)])
}

/// Translations of the 3-regular tree along `(0)* ↔ (1)*` and
/// `(0)* ↔ 2(0)*`, both by `step` towards the second end.
pub fn ping_pong_pair(step: i64) -> Result<(Embedding, Embedding)> {
    let c = Tree::cubic();
    let zero = || PeriodicEnd::new(vec![], vec![0]);
    let g = CubicTranslation::new(zero()?, PeriodicEnd::new(vec![], vec![1])?, step)?;
    let h = CubicTranslation::new(zero()?, PeriodicEnd::new(vec![2], vec![0])?, step)?;
    Ok((Embedding::translate_cubic(&c, g)?, Embedding::translate_cubic(&c, h)?))
}

pub fn ping_pong_monoid(step: i64) -> Result<MonoidPresentation> {
    let (g, h) = ping_pong_pair(step)?;
    named(vec![("g", g), ("h", h)])
}

/// The non-elliptic gallery embeddings, labelled.
pub fn non_elliptic_embeddings() -> Result<Vec<(String, Embedding)>> {
    let r = Tree::ray();
    let d = Tree::double_ray();
    let b = Tree::binary();
    let (g, h) = ping_pong_pair(1)?;
    let (g2, h2) = ping_pong_pair(2)?;
    let ray_m = binary_plus_ray_monoid()?;
    let mut out = vec![
        ("shift".to_string(), Embedding::shift(&r, 1)?),
        ("shift2".to_string(), Embedding::shift(&r, 2)?),
        ("child_descent(0)".to_string(), Embedding::child_descent(&b, addr("0"))?),
        ("child_descent(10)".to_string(), Embedding::child_descent(&b, addr("10"))?),
        ("translate(+1)".to_string(), Embedding::translate(&d, 1)?),
        ("translate(-2)".to_string(), Embedding::translate(&d, -2)?),
        ("cubic g".to_string(), g),
        ("cubic h".to_string(), h),
        ("cubic g step 2".to_string(), g2),
        ("cubic h step 2".to_string(), h2),
    ];
    for (l, e) in ray_m.labels().iter().zip(ray_m.generators()).skip(1) {
        out.push((format!("binary_plus_ray {l}"), e.clone()));
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct GalleryExample {
    pub name: &'static str,
    pub description: &'static str,
    pub monoid: MonoidPresentation,
}

/// Every named monoid in the gallery.
pub fn examples() -> Result<Vec<GalleryExample>> {
    Ok(vec![
        GalleryExample {
            name: "binary_plus_path",
            description: "binary tree plus a path of length 3 at the root; no hyperbolic element",
            monoid: binary_plus_path_monoid(3)?,
        },
        GalleryExample {
            name: "binary_plus_ray",
            description: "binary tree plus a ray at the root; hyperbolic elements exist",
            monoid: binary_plus_ray_monoid()?,
        },
        GalleryExample {
            name: "decorated_binary_ray",
            description: "binary tree plus a ray, decorated with 4 and 8 leaves by depth mod 3; all fix the ray's end",
            monoid: decorated_monoid()?,
        },
        GalleryExample {
            name: "reflection",
            description: "identity and reflection of the path on 3 vertices",
            monoid: reflection_monoid()?,
        },
        GalleryExample {
            name: "shift",
            description: "the shift of the ray",
            monoid: shift_monoid()?,
        },
        GalleryExample {
            name: "translations",
            description: "translations by +1 and -1 of the double ray",
            monoid: translation_monoid()?,
        },
        GalleryExample {
            name: "ping_pong",
            description: "two translations by 2 of the 3-regular tree with different axes",
            monoid: ping_pong_monoid(2)?,
        },
        GalleryExample {
            name: "ping_pong_unit",
            description: "two translations by 1 of the 3-regular tree with different axes",
            monoid: ping_pong_monoid(1)?,
        },
    ])
}

pub fn example(name: &str) -> Result<GalleryExample> {
    examples()?
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown gallery example `{name}`")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{classify, Tag};

    #[test]
    fn names_resolve() {
        assert_eq!(tree("binary_plus_path(3)").unwrap(), binary_plus_path(3).unwrap());
        assert_eq!(tree("binary_plus_ray").unwrap().gallery_name(), Some("binary_plus_ray"));
        assert!(tree("binary_plus_path(0)").is_err());
        assert!(tree("ternary").is_err());
        assert_eq!(attached_ray_end(4), addr("2000"));
    }

    #[test]
    fn gallery_embeddings_validate() {
        for ex in examples().unwrap() {
            for (label, report) in ex.monoid.validate(6) {
                assert!(report.ok(), "{} {label}: {report:?}", ex.name);
            }
        }
    }

    #[test]
    fn gallery_non_elliptics() {
        for (label, e) in non_elliptic_embeddings().unwrap() {
            let c = classify(&e, 32).unwrap();
            assert!(c.tag.is_non_elliptic(), "{label}: {}", c.tag);
        }
        let m = binary_plus_path_monoid(3).unwrap();
        for g in m.generators() {
            assert_ne!(classify(g, 32).unwrap().tag, Tag::Hyperbolic);
        }
    }
}
