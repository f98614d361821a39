//! The graph E4^12 and its certified Frobenius-Perron eigenvector.
use cellforge::arith::qint;
use cellforge::graph::e412;

fn main() {
    let g = e412();
    println!("{}: {} vertices, {} edges", g.name(), g.vertex_count(), g.edge_count());
    for (v, vx) in g.vertices().iter().enumerate() {
        println!("  lambda_{:<2} = {:<24} ~ {:.10}", vx.id, g.fp(v).to_string(), g.fp(v).to_c64().unwrap().0);
    }
    let r = g.fp_residual(256).unwrap();
    println!("|A.lambda - [3] lambda| <= {:.3e} at 256 bits", r.abs_upper());
    println!("top eigenvalue {:.10}, [3] = {:.10}", g.top_eigenvalue(), qint(3).to_c64().unwrap().0);
}
