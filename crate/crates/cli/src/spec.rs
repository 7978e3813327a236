//! Spec files: one tree, named embeddings and named monoids.
//!
//! ```text
//! # comment
//! tree binary_plus_ray;
//! embedding s = swap;
//! embedding r = ray_descent(c=0);
//! embedding sr = compose(s, r);
//! monoid M = [s, r];
//! ```

use std::fmt;

use treeemb::embedding::{CubicTranslation, PeriodicEnd};
use treeemb::gallery;
use treeemb::monoid::MonoidPresentation;
use treeemb::{Address, Embedding, FiniteTree, Tree};

#[derive(Debug, thiserror::Error)]
pub enum SpecError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unknown {kind} `{name}`")]
    Unresolved { kind: &'static str, name: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone)]
pub struct SpecFile {
    pub tree: Tree,
    pub embeddings: Vec<(String, Embedding)>,
    pub monoids: Vec<(String, Vec<String>)>,
}

impl std::fmt::Debug for SpecFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl SpecFile {
    pub fn embedding(&self, name: &str) -> Result<&Embedding, SpecError> {
        self.embeddings
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, e)| e)
            .ok_or_else(|| SpecError::Unresolved {
                kind: "embedding",
                name: name.to_string(),
            })
    }

    pub fn monoid(&self, name: &str) -> Result<MonoidPresentation, SpecError> {
        let (_, members) = self
            .monoids
            .iter()
            .find(|(n, _)| n == name)
            .ok_or_else(|| SpecError::Unresolved {
                kind: "monoid",
                name: name.to_string(),
            })?;
        let gens = members
            .iter()
            .map(|m| Ok((m.clone(), self.embedding(m)?.clone())))
            .collect::<Result<Vec<_>, SpecError>>()?;
        MonoidPresentation::new(gens).map_err(|e| SpecError::Invalid(format!("monoid `{name}`: {e}")))
    }

    /// A spec file for a gallery monoid, naming each generator after its label.
    pub fn from_monoid(name: &str, m: &MonoidPresentation) -> SpecFile {
        SpecFile {
            tree: m.tree().clone(),
            embeddings: m
                .labels()
                .iter()
                .cloned()
                .zip(m.generators().iter().cloned())
                .collect(),
            monoids: vec![(name.to_string(), m.labels().to_vec())],
        }
    }
}

impl fmt::Display for SpecFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "tree {};", self.tree)?;
        for (name, e) in &self.embeddings {
            writeln!(f, "embedding {name} = {e};")?;
        }
        for (name, members) in &self.monoids {
            writeln!(f, "monoid {name} = [{}];", members.join(", "))?;
        }
        Ok(())
    }
}

pub fn parse_spec(text: &str) -> Result<SpecFile, SpecError> {
    let mut p = Parser {
        src: text.chars().collect(),
        pos: 0,
        tree: None,
        embeddings: Vec::new(),
    };
    let mut monoids: Vec<(String, Vec<String>)> = Vec::new();
    loop {
        p.skip_ws();
        if p.at_end() {
            break;
        }
        let start = p.pos;
        let kw = p.ident()?;
        match kw.as_str() {
            "tree" => {
                if p.tree.is_some() {
                    return Err(p.error_at(start, "a spec file holds a single tree"));
                }
                let t = p.tree_term()?;
                p.tree = Some(t);
            }
            "embedding" => {
                let name_pos = p.pos;
                let name = p.ident()?;
                if p.embeddings.iter().any(|(n, _)| *n == name) {
                    return Err(p.error_at(name_pos, format!("embedding `{name}` defined twice")));
                }
                p.expect("=")?;
                let tree = p.require_tree(start)?;
                let e = p.embedding_term(&tree)?;
                p.embeddings.push((name, e));
            }
            "monoid" => {
                let name = p.ident()?;
                p.expect("=")?;
                p.expect("[")?;
                let mut members = Vec::new();
                loop {
                    let at = p.pos;
                    let m = p.ident()?;
                    if !p.embeddings.iter().any(|(n, _)| *n == m) {
                        return Err(p.error_at(at, format!("unknown embedding `{m}`")));
                    }
                    members.push(m);
                    if !p.eat(",") {
                        break;
                    }
                }
                p.expect("]")?;
                monoids.push((name, members));
            }
            other => return Err(p.error_at(start, format!("expected `tree`, `embedding` or `monoid`, found `{other}`"))),
        }
        p.expect(";")?;
    }
    let tree = p.tree.ok_or_else(|| SpecError::Syntax {
        line: 1,
        col: 1,
        msg: "no tree declared".into(),
    })?;
    let spec = SpecFile {
        tree,
        embeddings: p.embeddings,
        monoids,
    };
    for (name, _) in &spec.monoids {
        spec.monoid(name)?;
    }
    Ok(spec)
}

struct Parser {
    src: Vec<char>,
    pos: usize,
    tree: Option<Tree>,
    embeddings: Vec<(String, Embedding)>,
}

impl Parser {
    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<char> {
        self.src.get(self.pos).copied()
    }

    fn line_col(&self, pos: usize) -> (usize, usize) {
        let mut line = 1;
        let mut col = 1;
        for &c in &self.src[..pos.min(self.src.len())] {
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        }
        (line, col)
    }

    fn error_at(&self, pos: usize, msg: impl Into<String>) -> SpecError {
        let (line, col) = self.line_col(pos);
        SpecError::Syntax {
            line,
            col,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c == '#' {
                while self.peek().is_some_and(|c| c != '\n') {
                    self.pos += 1;
                }
            } else if c.is_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        let n = s.chars().count();
        if self.src.len() >= self.pos + n && self.src[self.pos..self.pos + n].iter().copied().eq(s.chars()) {
            self.pos += n;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<(), SpecError> {
        if self.eat(s) {
            Ok(())
        } else {
            let found = self.peek().map_or("end of input".to_string(), |c| format!("`{c}`"));
            Err(self.error_at(self.pos, format!("expected `{s}`, found {found}")))
        }
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> String {
        let start = self.pos;
        while self.peek().is_some_and(&f) {
            self.pos += 1;
        }
        self.src[start..self.pos].iter().collect()
    }

    fn ident(&mut self) -> Result<String, SpecError> {
        self.skip_ws();
        if !self.peek().is_some_and(|c| c.is_ascii_alphabetic() || c == '_') {
            return Err(self.error_at(self.pos, "expected a name"));
        }
        Ok(self.take_while(|c| c.is_ascii_alphanumeric() || c == '_'))
    }

    fn natural(&mut self) -> Result<usize, SpecError> {
        self.skip_ws();
        let at = self.pos;
        let digits = self.take_while(|c| c.is_ascii_digit());
        digits
            .parse()
            .map_err(|_| self.error_at(at, "expected a natural number"))
    }

    fn integer(&mut self) -> Result<i64, SpecError> {
        self.skip_ws();
        let at = self.pos;
        let sign = if self.eat("-") {
            -1
        } else {
            self.eat("+");
            1
        };
        let n = self.natural().map_err(|_| self.error_at(at, "expected an integer"))?;
        Ok(sign * n as i64)
    }

    fn address(&mut self) -> Result<Address, SpecError> {
        self.skip_ws();
        let at = self.pos;
        let text = if self.peek() == Some('[') {
            let mut s = self.take_while(|c| c != ']');
            self.expect("]")?;
            s.push(']');
            s
        } else if self.peek() == Some('ε') {
            self.pos += 1;
            "ε".to_string()
        } else {
            self.take_while(|c| c.is_ascii_digit() || c.is_ascii_lowercase())
        };
        if text.is_empty() {
            return Err(self.error_at(at, "expected an address"));
        }
        text.parse().map_err(|_| self.error_at(at, format!("bad address `{text}`")))
    }

    fn periodic_end(&mut self) -> Result<PeriodicEnd, SpecError> {
        self.skip_ws();
        let at = self.pos;
        let mut text = self.take_while(|c| c.is_ascii_alphanumeric() || c == '[' || c == ']' || c == '.');
        self.expect("(")?;
        text.push('(');
        text.push_str(&self.take_while(|c| c != ')'));
        self.expect(")")?;
        self.expect("*")?;
        text.push_str(")*");
        text.parse()
            .map_err(|e: treeemb::Error| self.error_at(at, e.to_string()))
    }

    /// `key=` followed by a value.
    fn key(&mut self, k: &str) -> Result<(), SpecError> {
        self.expect(k)?;
        self.expect("=")
    }

    fn require_tree(&self, at: usize) -> Result<Tree, SpecError> {
        self.tree
            .clone()
            .ok_or_else(|| self.error_at(at, "declare the tree before embeddings"))
    }

    fn tree_term(&mut self) -> Result<Tree, SpecError> {
        let at = {
            self.skip_ws();
            self.pos
        };
        let base = self.ident()?;
        let lift = |p: &Parser, r: treeemb::Result<Tree>| r.map_err(|e| p.error_at(at, e.to_string()));
        let mut t = match base.as_str() {
            "ray" => Tree::ray(),
            "double_ray" => Tree::double_ray(),
            "binary" => Tree::binary(),
            "cubic" => Tree::cubic(),
            "binary_plus_ray" => gallery::binary_plus_ray(),
            "decorated_binary_ray" => gallery::decorated_binary_ray(),
            "binary_plus_path" => {
                self.expect("(")?;
                let n = self.natural()?;
                self.expect(")")?;
                lift(self, gallery::tree(&format!("binary_plus_path({n})")))?
            }
            "finite" => {
                self.expect("{")?;
                let mut edges = Vec::new();
                let mut n = 1;
                if !self.eat("}") {
                    loop {
                        let u = self.natural()?;
                        if self.eat("-") {
                            let v = self.natural()?;
                            n = n.max(u + 1).max(v + 1);
                            edges.push((u, v));
                        } else if u != 0 || !edges.is_empty() {
                            return Err(self.error_at(self.pos, "expected `-`"));
                        }
                        if !self.eat(",") {
                            break;
                        }
                    }
                    self.expect("}")?;
                }
                let ft = FiniteTree::new(n, edges).map_err(|e| self.error_at(at, e.to_string()))?;
                Tree::finite(ft)
            }
            other => return Err(self.error_at(at, format!("unknown tree term `{other}`"))),
        };
        while self.eat(".") {
            let cat = self.pos;
            let name = self.ident()?;
            self.expect("(")?;
            let next = match name.as_str() {
                "attach_path" => {
                    self.key("at")?;
                    let a = self.address()?;
                    self.expect(",")?;
                    self.key("len")?;
                    let len = self.natural()?;
                    t.attach_path(a, len)
                }
                "attach_ray" => {
                    self.key("at")?;
                    let a = self.address()?;
                    t.attach_ray(a)
                }
                "decorate" => {
                    self.key("mod")?;
                    let m = self.natural()?;
                    self.expect(",")?;
                    self.key("residue")?;
                    let r = self.natural()?;
                    self.expect(",")?;
                    self.key("add")?;
                    let k = self.natural()?;
                    t.decorate(m, r, k)
                }
                "reroot" => {
                    self.key("at")?;
                    let a = self.address()?;
                    t.reroot(a)
                }
                other => return Err(self.error_at(cat, format!("unknown combinator `{other}`"))),
            };
            self.expect(")")?;
            t = next.map_err(|e| self.error_at(cat, e.to_string()))?;
        }
        Ok(t)
    }

    fn embedding_term(&mut self, tree: &Tree) -> Result<Embedding, SpecError> {
        self.skip_ws();
        let at = self.pos;
        let name = self.ident()?;
        let lift = |p: &Parser, r: treeemb::Result<Embedding>| r.map_err(|e| p.error_at(at, e.to_string()));
        let e = match name.as_str() {
            "identity" => Embedding::identity(tree),
            "swap" => lift(self, Embedding::swap_root_subtrees(tree))?,
            "shift" => {
                self.expect("(")?;
                self.expect("ray")?;
                let step = if self.eat(",") {
                    self.key("step")?;
                    self.natural()?
                } else {
                    1
                };
                self.expect(")")?;
                lift(self, Embedding::shift(tree, step))?
            }
            "translate" => {
                self.expect("(")?;
                self.expect("double_ray")?;
                self.expect(",")?;
                self.key("step")?;
                let step = self.integer()?;
                self.expect(")")?;
                lift(self, Embedding::translate(tree, step))?
            }
            "child_descent" => {
                self.expect("(")?;
                self.key("c")?;
                let c = self.address()?;
                self.expect(")")?;
                lift(self, Embedding::child_descent(tree, c))?
            }
            "translate_cubic" => {
                self.expect("(")?;
                self.key("minus")?;
                let minus = self.periodic_end()?;
                self.expect(",")?;
                self.key("plus")?;
                let plus = self.periodic_end()?;
                self.expect(",")?;
                self.key("step")?;
                let step = self.integer()?;
                self.expect(")")?;
                let t = CubicTranslation::new(minus, plus, step).map_err(|e| self.error_at(at, e.to_string()))?;
                lift(self, Embedding::translate_cubic(tree, t))?
            }
            "table" => {
                self.expect("{")?;
                let mut pairs = Vec::new();
                if !self.eat("}") {
                    loop {
                        let a = self.address()?;
                        self.expect("->")?;
                        let b = self.address()?;
                        pairs.push((a, b));
                        if !self.eat(",") {
                            break;
                        }
                    }
                    self.expect("}")?;
                }
                lift(self, Embedding::table(tree, pairs))?
            }
            "path_descent" | "ray_descent" => {
                self.expect("(")?;
                self.key("c")?;
                let c = self.natural()? as u32;
                self.expect(")")?;
                let r = if name == "path_descent" {
                    Embedding::path_descent(tree, c)
                } else {
                    Embedding::ray_descent(tree, c)
                };
                lift(self, r)?
            }
            "rotate_leaves" => {
                self.expect("(")?;
                self.key("at")?;
                let a = self.address()?;
                self.expect(")")?;
                lift(self, Embedding::rotate_leaves(tree, a))?
            }
            "compose" => {
                self.expect("(")?;
                let mut parts = vec![self.embedding_term(tree)?];
                while self.eat(",") {
                    parts.push(self.embedding_term(tree)?);
                }
                self.expect(")")?;
                lift(self, Embedding::compose_all(parts.iter()))?
            }
            "rerooted" => {
                let inner_tree = tree
                    .reroot_inner()
                    .ok_or_else(|| self.error_at(at, "rerooted(…) needs a tree built with .reroot(at=…)"))?;
                self.expect("(")?;
                let inner = self.embedding_term(&inner_tree)?;
                self.expect(")")?;
                lift(self, inner.transport_to_reroot(tree))?
            }
            other => match self.embeddings.iter().find(|(n, _)| n == other) {
                Some((_, e)) if e.tree() == tree => e.clone(),
                Some(_) => return Err(self.error_at(at, format!("`{other}` lives on a different tree"))),
                None => return Err(self.error_at(at, format!("unknown embedding term `{other}`"))),
            },
        };
        Ok(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_spec() {
        let s = parse_spec("tree ray; embedding s = shift(ray);").unwrap();
        assert_eq!(s.tree, Tree::ray());
        assert_eq!(s.embeddings.len(), 1);
    }

    #[test]
    fn positions_in_errors() {
        let err = parse_spec("tree ray;\nembedding s = shfit(ray);").unwrap_err();
        match err {
            SpecError::Syntax { line, col, msg } => {
                assert_eq!((line, col), (2, 15));
                assert!(msg.contains("shfit"), "{msg}");
            }
            other => panic!("{other}"),
        }
        assert!(parse_spec("tree ray; monoid M = [s];").is_err());
        assert!(parse_spec("tree binary; embedding t = translate(double_ray, step=1);").is_err());
        assert!(parse_spec("embedding s = identity;").is_err());
    }

    #[test]
    fn every_term() {
        let s = parse_spec(
            "# the gallery tree of the path example\n\
             tree binary_plus_path(3);\n\
             embedding s = swap;\n\
             embedding d = path_descent(c=0);\n\
             embedding sd = compose(s, d, identity);\n\
             monoid M = [s, d];",
        )
        .unwrap();
        assert_eq!(s.tree.gallery_name(), Some("binary_plus_path(3)"));
        assert_eq!(s.monoid("M").unwrap().rank(), 2);
        let c = parse_spec(
            "tree cubic; embedding g = translate_cubic(minus=(0)*, plus=2(0)*, step=-1);",
        )
        .unwrap();
        assert_eq!(c.embeddings[0].1.to_string(), "translate_cubic(minus=(0)*, plus=2(0)*, step=-1)");
        let f = parse_spec("tree finite{0-1, 1-2}; embedding r = table{ε->00, 0->0, 00->ε};").unwrap();
        assert!(f.tree.is_finite());
        let r = parse_spec("tree binary_plus_ray.reroot(at=2); embedding r = rerooted(ray_descent(c=1));").unwrap();
        assert!(r.embeddings[0].1.validate(6).ok());
        let d = parse_spec("tree binary.decorate(mod=2, residue=0, add=3).attach_ray(at=01); embedding c = identity;").unwrap();
        assert!(!d.tree.is_finite());
        assert!(parse_spec("tree finite{0}; embedding i = identity;").unwrap().tree.is_finite());
    }
}
