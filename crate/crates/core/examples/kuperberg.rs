//! Certify the Kuperberg relations on W, and watch a corrupted W fail.
use cellforge::cells::load_w;
use cellforge::relations::{Checker, RelationSet};

fn main() {
    let c = load_w().unwrap();
    let rels = RelationSet::bundled();
    let checker = Checker::default();
    let w = c.as_morphism();
    for r in checker.check_kuperberg(&c.graph, &rels, &w).unwrap() {
        println!("{r}");
    }
    let mut bad = w.clone();
    let k = bad.entries.keys().next().unwrap().clone();
    bad.entries.insert(k, cellforge::arith::int(2));
    println!("with one weight replaced by 2:");
    for r in checker.check_kuperberg(&c.graph, &rels, &bad).unwrap() {
        println!("{r}  worst at {}", r.worst.as_deref().unwrap_or("-"));
    }
}
