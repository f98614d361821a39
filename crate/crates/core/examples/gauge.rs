//! Edge-phase gauge transformations leave |U| and the relations alone.
use cellforge::cells::{build_u, load_w};
use cellforge::gpa::{gauge, Floats};
use num_complex::Complex64;

fn main() {
    let c = load_w().unwrap();
    let u = build_u(&c).to_c64().unwrap();
    let phases: Vec<Complex64> = (0..c.graph.edge_count()).map(|e| Complex64::from_polar(1.0, 0.37 * e as f64)).collect();
    let v = gauge(&Floats, &u, &phases);
    let moved = u.entries.iter().filter(|(k, z)| (v.entries[*k] - **z).norm() > 1e-9).count();
    let worst = u.entries.iter().map(|(k, z)| (v.entries[k].norm() - z.norm()).abs()).fold(0.0, f64::max);
    println!("{moved} of {} entries change phase; largest change in modulus {worst:.1e}", u.entries.len());
}
