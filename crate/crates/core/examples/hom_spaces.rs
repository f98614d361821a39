//! Path bases of Hom spaces in the graph planar algebra.
use cellforge::graph::{e412, SignString};

fn main() {
    let g = e412();
    for (s, t) in [("", "+++"), ("-", "++"), ("++", "++"), ("+-", "+-"), ("+++", "+++")] {
        let (s, t): (SignString, SignString) = (s.parse().unwrap(), t.parse().unwrap());
        println!("hom_dim({s:>3} -> {t}) = {}", g.hom_dim(&s, &t));
    }
    let pp: SignString = "++".parse().unwrap();
    let from9 = g.paths(&pp, Some(g.index_of(9).unwrap()), None);
    println!("{} ++ paths leave vertex 9:", from9.len());
    for p in from9 {
        println!("  {}", g.show_path(&p));
    }
}
