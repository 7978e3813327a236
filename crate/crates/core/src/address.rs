//! Vertices of a rooted presentation, written as child-index paths.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

const DIGITS: &[u8; 36] = b"0123456789abcdefghijklmnopqrstuvwxyz";

/// A vertex, given as the sequence of child indices on the path from the
/// root. The empty sequence is the root.
///
/// Textual form: `ε` (or `root`) for the root, otherwise one base-36 digit
/// per index (`011`, `2a0`). Indices of 36 or more fall back to the bracketed
/// form `[0.40.1]`, which is also accepted on input.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Address(Vec<u32>);

impl Address {
    pub fn root() -> Self {
        Address(Vec::new())
    }

    pub fn from_indices(indices: impl Into<Vec<u32>>) -> Self {
        Address(indices.into())
    }

    pub fn indices(&self) -> &[u32] {
        &self.0
    }

    /// Number of edges between this vertex and the root.
    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn parent(&self) -> Option<Address> {
        if self.0.is_empty() {
            None
        } else {
            Some(Address(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn child(&self, index: u32) -> Address {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.extend_from_slice(&self.0);
        v.push(index);
        Address(v)
    }

    pub fn concat(&self, suffix: &[u32]) -> Address {
        let mut v = Vec::with_capacity(self.0.len() + suffix.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(suffix);
        Address(v)
    }

    /// The ancestor at the given depth; `self` if `depth >= self.depth()`.
    pub fn truncated(&self, depth: usize) -> Address {
        Address(self.0[..depth.min(self.0.len())].to_vec())
    }

    pub fn last(&self) -> Option<u32> {
        self.0.last().copied()
    }

    pub fn is_prefix_of(&self, other: &Address) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn common_prefix_len(&self, other: &Address) -> usize {
        self.0
            .iter()
            .zip(other.0.iter())
            .take_while(|(a, b)| a == b)
            .count()
    }

    /// Two addresses are adjacent iff one extends the other by exactly one index.
    pub fn is_adjacent(&self, other: &Address) -> bool {
        let (short, long) = if self.0.len() < other.0.len() {
            (self, other)
        } else {
            (other, self)
        };
        long.0.len() == short.0.len() + 1 && short.is_prefix_of(long)
    }
}

impl From<Vec<u32>> for Address {
    fn from(v: Vec<u32>) -> Self {
        Address(v)
    }
}

impl From<&[u32]> for Address {
    fn from(v: &[u32]) -> Self {
        Address(v.to_vec())
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        if self.0.iter().all(|&i| (i as usize) < DIGITS.len()) {
            for &i in &self.0 {
                write!(f, "{}", DIGITS[i as usize] as char)?;
            }
            Ok(())
        } else {
            f.write_str("[")?;
            for (k, i) in self.0.iter().enumerate() {
                if k > 0 {
                    f.write_str(".")?;
                }
                write!(f, "{i}")?;
            }
            f.write_str("]")
        }
    }
}

impl fmt::Debug for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Address({self})")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse address `{0}`")]
pub struct ParseAddressError(pub String);

impl FromStr for Address {
    type Err = ParseAddressError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "ε" || s == "root" || s == "e" {
            return Ok(Address::root());
        }
        if let Some(inner) = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            if inner.trim().is_empty() {
                return Ok(Address::root());
            }
            return inner
                .split('.')
                .map(|p| p.trim().parse::<u32>())
                .collect::<Result<Vec<_>, _>>()
                .map(Address)
                .map_err(|_| ParseAddressError(s.to_string()));
        }
        s.chars()
            .map(|c| c.to_digit(36))
            .collect::<Option<Vec<_>>>()
            .map(Address)
            .ok_or_else(|| ParseAddressError(s.to_string()))
    }
}

impl Serialize for Address {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Shorthand for building addresses in tests and gallery code.
pub fn addr(s: &str) -> Address {
    s.parse().expect("valid address literal")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_and_parse() {
        assert_eq!(Address::root().to_string(), "ε");
        assert_eq!(addr("011").indices(), &[0, 1, 1]);
        assert_eq!(addr("2a").indices(), &[2, 10]);
        assert_eq!(addr("[0.40.1]").indices(), &[0, 40, 1]);
        assert_eq!(Address::from_indices(vec![0, 40, 1]).to_string(), "[0.40.1]");
        assert_eq!(addr("root"), Address::root());
        assert!("0-1".parse::<Address>().is_err());
    }

    #[test]
    fn adjacency() {
        assert!(addr("01").is_adjacent(&addr("0")));
        assert!(addr("ε").is_adjacent(&addr("2")));
        assert!(!addr("01").is_adjacent(&addr("1")));
        assert!(!addr("0").is_adjacent(&addr("0")));
        assert!(!addr("0").is_adjacent(&addr("011")));
    }
}
