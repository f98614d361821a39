//! Recover W from U = W W† and compare gauge orbits.
use cellforge::cells::{build_u, load_w};
use cellforge::solver::{derive_w, gauge_equivalent};

fn main() {
    let c = load_w().unwrap();
    let d = derive_w(&c.graph, &build_u(&c)).unwrap();
    let cmp = gauge_equivalent(&c, &d).unwrap();
    println!(
        "{} nonzero triangles, magnitude defect {:.2e}, {} cycles with defect {:.2e}: {}",
        cmp.triangles,
        cmp.magnitude_defect,
        cmp.cycles,
        cmp.cycle_defect,
        if cmp.equivalent { "gauge equivalent" } else { "different orbits" }
    );
}
