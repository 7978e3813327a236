use treeemb::gallery;
use treeemb_cli::{parse_spec, SpecFile};

const SOURCES: &[&str] = &[
    "tree ray; embedding s = shift(ray); embedding s2 = shift(ray, step=2); monoid M = [s, s2];",
    "tree double_ray; embedding p = translate(double_ray, step=1); embedding q = translate(double_ray, step=-2);\
     embedding pq = compose(p, q); monoid M = [p, q, pq];",
    "tree binary; embedding c = child_descent(c=01); embedding s = swap; monoid M = [c, s];",
    "tree cubic; embedding g = translate_cubic(minus=(0)*, plus=(1)*, step=1);\
     embedding h = translate_cubic(minus=(0)*, plus=2(0)*, step=-1); monoid M = [g, h];",
    "tree finite{0-1, 1-2}; embedding r = table{ε->00, 0->0, 00->ε}; embedding i = identity; monoid M = [i, r];",
    "tree binary_plus_path(3); embedding s = swap; embedding d = path_descent(c=0); monoid M = [s, d];",
    "tree binary_plus_ray.reroot(at=2); embedding r = rerooted(ray_descent(c=1));",
    "tree decorated_binary_ray; embedding t = rotate_leaves(at=2); monoid M = [t];",
    "tree binary.decorate(mod=2, residue=0, add=3).attach_ray(at=01).attach_path(at=1, len=2); embedding i = identity;",
];

fn assert_equivalent(a: &SpecFile, b: &SpecFile) {
    assert!(a.tree == b.tree, "trees differ:\n{a}\n{b}");
    assert_eq!(a.embeddings.len(), b.embeddings.len());
    for ((na, ea), (nb, eb)) in a.embeddings.iter().zip(&b.embeddings) {
        assert_eq!(na, nb);
        assert!(ea.agrees_with(eb, 6, 100_000).unwrap(), "{na} differs after printing");
    }
    assert_eq!(a.monoids, b.monoids);
}

#[test]
fn printed_specs_parse_back() {
    for src in SOURCES {
        let s = parse_spec(src).unwrap_or_else(|e| panic!("{src}: {e}"));
        let printed = s.to_string();
        let back = parse_spec(&printed).unwrap_or_else(|e| panic!("{printed}: {e}"));
        assert_equivalent(&s, &back);
        assert_eq!(back.to_string(), printed, "printing is not stable");
    }
}

#[test]
fn gallery_monoids_parse_back() {
    for ex in gallery::examples().unwrap() {
        let s = SpecFile::from_monoid("M", &ex.monoid);
        let back = parse_spec(&s.to_string()).unwrap_or_else(|e| panic!("{}: {e}", ex.name));
        assert_equivalent(&s, &back);
        let m = back.monoid("M").unwrap();
        assert_eq!(m.labels(), ex.monoid.labels());
        for (g, h) in m.generators().iter().zip(ex.monoid.generators()) {
            assert!(g.agrees_with(h, 6, 100_000).unwrap(), "{}", ex.name);
        }
    }
}
