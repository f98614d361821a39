//! The Hecke relations and auxiliary identities on U = W W†.
use cellforge::cells::{build_u, load_w};
use cellforge::relations::{Checker, RelationSet};

fn main() {
    let c = load_w().unwrap();
    let rels = RelationSet::bundled();
    let u = build_u(&c);
    let checker = Checker::default();
    let t = std::time::Instant::now();
    for r in checker.check_hecke_suite(&c.graph, &rels, &u).unwrap() {
        println!("{r}");
    }
    for r in checker.check_kw_aux(&c.graph, &rels, &c.as_morphism(), &u).unwrap() {
        println!("{r}");
    }
    println!("{:.2?}", t.elapsed());
}
