//! Gauge-fixed Levenberg-Marquardt solve for U and its magnitude table.
use cellforge::graph::e412;
use cellforge::relations::RelationSet;
use cellforge::solver::{assemble_system, block_spectrum, distinct_magnitudes, gauge_fix, gauge_report, solve_numeric, SolveConfig};

fn main() {
    let g = e412();
    let sys = gauge_fix(&assemble_system(&g, &RelationSet::bundled()).unwrap()).unwrap();
    println!("{} real variables, {} real equations", sys.var_count(), sys.equations.len());
    println!("gauge: {}", gauge_report(&g).unwrap());
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let sol = solve_numeric(&sys, &SolveConfig { seed, ..SolveConfig::default() }).unwrap();
    println!("restart {} converged, max residual {:.2e}", sol.restart, sol.residual);
    println!("spectrum of U96: {:.6?}", block_spectrum(&g, &sol.u, 9, 6).unwrap());
    for m in distinct_magnitudes(&sol.u, 1e-6) {
        println!("  {m:.6}");
    }
}
