mod common;

use std::collections::BTreeMap;
use std::sync::OnceLock;

use cellforge::arith::QExpr;
use cellforge::gpa::{gauge, Floats};
use cellforge::graph::e412;
use cellforge::relations::RelationSet;
use cellforge::solver::{assemble_system, block_spectrum, distinct_magnitudes, gauge_fix, solve_numeric, PolySystem, SolveConfig, SolveOutcome};
use num_complex::Complex64;
use proptest::prelude::*;

fn fixed() -> &'static PolySystem {
    static S: OnceLock<PolySystem> = OnceLock::new();
    S.get_or_init(|| gauge_fix(&assemble_system(&e412(), &RelationSet::bundled()).unwrap()).unwrap())
}

fn free() -> &'static PolySystem {
    static S: OnceLock<PolySystem> = OnceLock::new();
    S.get_or_init(|| assemble_system(&e412(), &RelationSet::bundled()).unwrap())
}

fn solved() -> &'static SolveOutcome {
    static S: OnceLock<SolveOutcome> = OnceLock::new();
    S.get_or_init(|| solve_numeric(fixed(), &SolveConfig::default()).unwrap())
}

fn q2() -> f64 {
    QExpr::parse("q[2]").unwrap().to_c64().unwrap().0
}

#[test]
fn seed_zero_converges() {
    let s = solved();
    assert!(s.residual < 1e-10);
    assert!(s.restart < 100);
}

#[test]
fn magnitudes_match_the_listed_values() {
    let mut want: Vec<f64> = common::recognition_table().iter().map(|r| r.value).collect();
    want.extend(common::unrecognized());
    want.sort_by(f64::total_cmp);
    let got = distinct_magnitudes(&solved().u, 1e-6);
    assert_eq!(got.len(), want.len(), "{got:?}");
    for (g, w) in got.iter().zip(&want) {
        assert!((g - w).abs() < 1e-4, "{g} vs {w}");
    }
}

#[test]
fn converged_blocks_are_scaled_projections() {
    let g = e412();
    let u = &solved().u;
    let s19 = block_spectrum(&g, u, 1, 9).unwrap();
    assert!(s19[0].abs() < 1e-8 && (s19[1] - q2()).abs() < 1e-8, "{s19:?}");
    let s96 = block_spectrum(&g, u, 9, 6).unwrap();
    let want = [0.0, 0.0, 0.0, q2(), q2()];
    assert!(s96.iter().zip(want).all(|(a, b)| (a - b).abs() < 1e-8), "{s96:?}");
}

#[test]
fn seeded_runs_are_bit_identical() {
    let cfg = SolveConfig { restarts: 2, ..SolveConfig::default() };
    let a = solve_numeric(fixed(), &cfg).unwrap();
    let b = solve_numeric(fixed(), &cfg).unwrap();
    assert_eq!(a.restart, b.restart);
    assert!(a.x.iter().zip(&b.x).all(|(x, y)| x.to_bits() == y.to_bits()));
}

fn element_norms(sys: &PolySystem, x: &[f64]) -> BTreeMap<(String, String), f64> {
    let mut out: BTreeMap<(String, String), f64> = BTreeMap::new();
    for (e, r) in sys.equations.iter().zip(sys.residuals(x)) {
        let key = (e.relation.clone(), format!("{:?}", e.element));
        *out.entry(key).or_default() += r * r;
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gauge_leaves_residuals_and_magnitudes_alone(
        x in proptest::collection::vec(-1.5f64..1.5, 171),
        angles in proptest::collection::vec(0f64..std::f64::consts::TAU, 64),
    ) {
        let sys = free();
        let u = sys.decode(&x).unwrap();
        let phases: Vec<Complex64> = angles[..sys.graph.edge_count()].iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
        let v = gauge(&Floats, &u, &phases);
        let y = sys.encode(&v);
        let (a, b) = (element_norms(sys, &x), element_norms(sys, &y));
        for (k, na) in &a {
            let nb = b.get(k).copied().unwrap_or(0.0);
            prop_assert!((na.sqrt() - nb.sqrt()).abs() < 1e-9 * (1.0 + na.sqrt()), "{:?}", k);
        }
        for (k, c) in &u.entries {
            prop_assert!((c.norm() - v.entries[k].norm()).abs() < 1e-12);
        }
    }
}
