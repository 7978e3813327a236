use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::{step_toward, Tree};
use crate::address::Address;
use crate::error::{Error, Result};

/// The component of `T − apex` that contains `branch`, a neighbour of `apex`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Cone {
    apex: Address,
    branch: Address,
}

impl Cone {
    pub fn new(apex: Address, branch: Address) -> Result<Cone> {
        if !apex.is_adjacent(&branch) {
            return Err(Error::NotAdjacent(apex, branch));
        }
        Ok(Cone { apex, branch })
    }

    pub fn apex(&self) -> &Address {
        &self.apex
    }

    pub fn branch(&self) -> &Address {
        &self.branch
    }

    /// Membership by address arithmetic; `v` is assumed to be a vertex.
    /// The apex itself belongs to no cone at that apex.
    pub fn contains(&self, v: &Address) -> bool {
        v != &self.apex && step_toward(&self.apex, v) == self.branch
    }

    /// Whether the end with root ray prefix `end` lies in the cone, or `None`
    /// if the prefix is too short to tell.
    pub fn contains_end(&self, end: &EndApprox) -> Option<bool> {
        if self.branch.depth() > self.apex.depth() {
            (end.depth() >= self.branch.depth()).then(|| self.branch.is_prefix_of(end.prefix()))
        } else {
            (end.depth() >= self.apex.depth()).then(|| !self.apex.is_prefix_of(end.prefix()))
        }
    }

    pub fn is_disjoint_from(&self, other: &Cone) -> bool {
        if self.apex == other.apex {
            return self.branch != other.branch;
        }
        let a = step_toward(&self.apex, &other.apex);
        let b = step_toward(&other.apex, &self.apex);
        let away1 = self.branch != a;
        let away2 = other.branch != b;
        (away1 && away2) || (!away1 && !away2 && self.apex.is_adjacent(&other.apex))
    }

    pub fn is_subset_of(&self, other: &Cone) -> bool {
        if self.apex == other.apex {
            return self.branch == other.branch;
        }
        other.contains(&self.branch) && !self.contains(&other.apex)
    }
}

impl fmt::Display for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C({} → {})", self.apex, self.branch)
    }
}

/// A finite-resolution end: the first `depth` steps of the ray from the root
/// into the end. Serializes as the prefix address.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EndApprox {
    depth: usize,
    prefix: Address,
}

impl EndApprox {
    pub fn new(prefix: Address) -> EndApprox {
        EndApprox {
            depth: prefix.depth(),
            prefix,
        }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn prefix(&self) -> &Address {
        &self.prefix
    }

    /// The coarser approximation at depth `d ≤ self.depth()`.
    pub fn truncated(&self, d: usize) -> EndApprox {
        EndApprox::new(self.prefix.truncated(d))
    }

    /// True if `self` is a coarsening of `finer`.
    pub fn is_coarsening_of(&self, finer: &EndApprox) -> bool {
        self.prefix.is_prefix_of(&finer.prefix)
    }

    /// Whether the two approximations can describe the same end.
    pub fn compatible(&self, other: &EndApprox) -> bool {
        self.is_coarsening_of(other) || other.is_coarsening_of(self)
    }
}

impl Serialize for EndApprox {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.prefix.serialize(serializer)
    }
}

impl fmt::Display for EndApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}…", self.prefix)
    }
}

type History = dyn Fn(&[Address]) -> Result<Address> + Send + Sync;

/// A ray given by a start vertex and a deterministic successor rule. The rule
/// sees the whole history so far, which is enough for rays defined by orbits.
#[derive(Clone)]
pub struct RaySpec {
    start: Address,
    next: Arc<History>,
}

impl fmt::Debug for RaySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RaySpec(start={})", self.start)
    }
}

impl RaySpec {
    pub fn from_successor(
        start: Address,
        next: impl Fn(&Address) -> Address + Send + Sync + 'static,
    ) -> RaySpec {
        RaySpec {
            start,
            next: Arc::new(move |h: &[Address]| Ok(next(h.last().expect("nonempty history")))),
        }
    }

    pub fn from_history(
        start: Address,
        next: impl Fn(&[Address]) -> Result<Address> + Send + Sync + 'static,
    ) -> RaySpec {
        RaySpec {
            start,
            next: Arc::new(next),
        }
    }

    /// The ray `start·p·p·p…` repeating the nonempty index block `period`.
    pub fn periodic(start: Address, period: Vec<u32>) -> RaySpec {
        assert!(!period.is_empty(), "period must be nonempty");
        RaySpec::from_history(start, move |h| {
            let k = h.len() - 1;
            Ok(h.last().expect("nonempty").child(period[k % period.len()]))
        })
    }

    /// The descending ray from `prefix` that always takes child `0`.
    pub fn leftmost(prefix: Address) -> RaySpec {
        RaySpec::periodic(prefix, vec![0])
    }

    pub fn start(&self) -> &Address {
        &self.start
    }

    /// The vertices of the ray, each checked for validity, adjacency to its
    /// predecessor, and against immediate backtracking. In a tree this is
    /// enough for the walk to be a path.
    pub fn walk<'a>(&'a self, tree: &'a Tree) -> RayWalk<'a> {
        RayWalk {
            ray: self,
            tree,
            history: Vec::new(),
            failed: false,
        }
    }

    /// The first `n` vertices, or the first violation.
    pub fn take_in(&self, tree: &Tree, n: usize) -> Result<Vec<Address>> {
        self.walk(tree).take(n).collect()
    }
}

pub struct RayWalk<'a> {
    ray: &'a RaySpec,
    tree: &'a Tree,
    history: Vec<Address>,
    failed: bool,
}

impl Iterator for RayWalk<'_> {
    type Item = Result<Address>;

    fn next(&mut self) -> Option<Result<Address>> {
        if self.failed {
            return None;
        }
        let step = self.history.len();
        let candidate = if step == 0 {
            Ok(self.ray.start.clone())
        } else {
            (self.ray.next)(&self.history)
        };
        let checked = candidate.and_then(|v| {
            if !self.tree.is_valid(&v) {
                return Err(Error::BadRay {
                    step,
                    reason: format!("{v} is not a vertex"),
                });
            }
            if let Some(prev) = self.history.last() {
                if !prev.is_adjacent(&v) {
                    return Err(Error::BadRay {
                        step,
                        reason: format!("{prev} and {v} are not adjacent"),
                    });
                }
            }
            if step >= 2 && self.history[step - 2] == v {
                return Err(Error::BadRay {
                    step,
                    reason: format!("walk returns to {v}"),
                });
            }
            Ok(v)
        });
        match checked {
            Ok(v) => {
                self.history.push(v.clone());
                Some(Ok(v))
            }
            Err(e) => {
                self.failed = true;
                Some(Err(e))
            }
        }
    }
}

/// The depth-`depth` end prefix determined by a path walk.
///
/// Along a path the depth first strictly decreases, then strictly increases;
/// once it has increased, the rest of the path stays below the current vertex.
/// So the prefix is known as soon as an increasing step reaches `depth`.
pub fn end_prefix_of_walk(
    tree: &Tree,
    walk: impl IntoIterator<Item = Result<Address>>,
    depth: usize,
) -> Result<EndApprox> {
    let mut prev: Option<Address> = None;
    let mut rising = false;
    for v in walk {
        let v = v?;
        tree.check(&v)?;
        if let Some(p) = &prev {
            rising = v.depth() > p.depth();
        }
        if rising && v.depth() >= depth {
            return Ok(EndApprox::new(v.truncated(depth)));
        }
        prev = Some(v);
    }
    Err(Error::HorizonInsufficient(format!(
        "walk did not settle into an end at depth {depth}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::address::addr;

    #[test]
    fn cone_disjointness_rule() {
        let c = |a: &str, b: &str| Cone::new(addr(a), addr(b)).unwrap();
        assert!(c("ε", "0").is_disjoint_from(&c("ε", "1")));
        assert!(!c("ε", "0").is_disjoint_from(&c("ε", "0")));
        // Edge split.
        assert!(c("ε", "0").is_disjoint_from(&c("0", "ε")));
        // Facing cones across a longer path overlap.
        assert!(!c("ε", "0").is_disjoint_from(&c("00", "0")));
        assert!(c("00", "000").is_disjoint_from(&c("1", "10")));
        assert!(!c("ε", "0").is_disjoint_from(&c("00", "000")));
        assert!(Cone::new(addr("0"), addr("1")).is_err());
    }

    #[test]
    fn cone_subsets_and_ends() {
        let c = |a: &str, b: &str| Cone::new(addr(a), addr(b)).unwrap();
        assert!(c("00", "000").is_subset_of(&c("ε", "0")));
        assert!(!c("ε", "0").is_subset_of(&c("00", "000")));
        assert!(c("ε", "1").is_subset_of(&c("00", "0")));
        assert_eq!(c("ε", "0").contains_end(&EndApprox::new(addr("0101"))), Some(true));
        assert_eq!(c("01", "0").contains_end(&EndApprox::new(addr("0101"))), Some(false));
        assert_eq!(c("01", "0").contains_end(&EndApprox::new(addr("1"))), None);
    }

    #[test]
    fn end_prefix_examples() {
        let r = Tree::ray();
        let spine = RaySpec::leftmost(Address::root());
        assert_eq!(r.end_prefix(&spine, 4).unwrap().prefix(), &addr("0000"));
        let b = Tree::binary();
        assert_eq!(b.end_prefix(&spine, 3).unwrap().prefix(), &addr("000"));
        // A ray that first climbs to the root and then descends.
        let climb = RaySpec::from_history(addr("11"), |h| {
            let last = h.last().unwrap();
            Ok(if h.len() <= 2 { last.parent().unwrap() } else { last.child(0) })
        });
        assert_eq!(b.end_prefix(&climb, 3).unwrap().prefix(), &addr("000"));
        let bad = RaySpec::from_successor(addr("ε"), |a| a.child(2));
        assert!(matches!(b.end_prefix(&bad, 3), Err(Error::BadRay { .. })));
    }
}
