//! The bundled cell system W: generators, rotational closure, U = W W†.
use cellforge::cells::{build_u, load_w};

fn main() {
    let c = load_w().unwrap();
    let g = &c.graph;
    println!("{} generators close to {} weights", c.generators.len(), c.weights.len());
    for t in &c.generators {
        println!("  W{:<14} = {}", t.show(g), c.weights[t]);
    }
    c.check_closure(256, cellforge::arith::tolerance(100)).unwrap();
    println!("rotational closure certified");
    let u = build_u(&c);
    println!("U = W W† has {} nonzero entries", u.entries.len());
}
