use super::*;
use crate::arith::{int, qint, zeta};
use crate::cells::{build_u, load_w, CellSystem};
use crate::gpa::{gauge, identity, scale, Exact};
use crate::graph::SignString;

fn setup() -> (CellSystem, Morphism<QExpr>, Morphism<QExpr>, RelationSet) {
    let c = load_w().unwrap();
    let w = c.as_morphism();
    let u = build_u(&c);
    (c, w, u, RelationSet::bundled())
}

fn by_name<'a>(rs: &'a [CheckReport], name: &str) -> &'a CheckReport {
    rs.iter().find(|r| r.name == name).unwrap()
}

#[test]
fn bundled_w_satisfies_kuperberg() {
    let (c, w, _, rels) = setup();
    let rs = Checker::default().check_kuperberg(&c.graph, &rels, &w).unwrap();
    for r in &rs {
        assert!(r.passed(), "{r}");
    }
    assert_eq!(by_name(&rs, "()").equations, 63);
    assert_eq!(by_name(&rs, "(i)").equations, c.graph.hom_dim(&"-".parse().unwrap(), &"-".parse().unwrap()));
    assert_eq!(by_name(&rs, "(ii)").equations, 171);
}

#[test]
fn bundled_u_satisfies_hecke_suite() {
    let (c, _, u, rels) = setup();
    let rs = Checker::default().check_hecke_suite(&c.graph, &rels, &u).unwrap();
    assert_eq!(rs.len(), 5);
    for r in &rs {
        assert!(r.passed(), "{r}");
    }
    assert_eq!(by_name(&rs, "(R3)").equations, 1251);
    assert_eq!(by_name(&rs, "(Hecke)").equations, 171);
}

#[test]
fn bundled_pair_satisfies_auxiliary_relations() {
    let (c, w, u, rels) = setup();
    let rs = Checker::default().check_kw_aux(&c.graph, &rels, &w, &u).unwrap();
    assert_eq!(rs.len(), 4);
    for r in &rs {
        assert!(r.passed(), "{r}");
    }
    // Hom(∅ -> ∅) has one trivial pair per vertex
    assert_eq!(by_name(&rs, "(U)").equations, c.graph.vertex_count());
}

#[test]
fn single_triangle_phase_breaks_rotation() {
    let (c, mut w, _, rels) = setup();
    let key = w.entries.iter().find(|(_, v)| !v.is_zero_literal()).map(|(k, _)| k.clone()).unwrap();
    let v = w.entries[&key].clone();
    w.entries.insert(key, zeta(24, 1) * v);
    let r = Checker::default().check_rotation(&c.graph, &rels, &w).unwrap();
    assert_eq!(r.status, Status::Fail);
}

#[test]
fn scaled_w_fails_bigon_quadratically() {
    let (c, w, _, rels) = setup();
    let w = scale(&Exact, &QExpr::parse("11/10").unwrap(), &w);
    let r = Checker::default().check_bigon(&c.graph, &rels, &w).unwrap();
    assert_eq!(r.status, Status::Fail);
    // (1.21 - 1)·[2]
    let want = 0.21 * qint(2).to_c64().unwrap().0;
    assert!((r.residual_upper - want).abs() < 1e-12, "{}", r.residual_upper);
}

#[test]
fn zero_w_fails_bigon() {
    let (c, w, _, rels) = setup();
    let w = scale(&Exact, &int(0), &w);
    let r = Checker::default().check_bigon(&c.graph, &rels, &w).unwrap();
    assert_eq!(r.status, Status::Fail);
}

#[test]
fn orbit_phase_passes_bigon_but_fails_square() {
    let (c, w, _, rels) = setup();
    let parallel = &c.graph.parallel_families()[0];
    // an orbit away from the parallel edges keeps W†W diagonal entries intact
    let gen = c
        .generators
        .iter()
        .find(|t| !c.weights[t].is_zero_literal() && [t.ab, t.bc, t.ca].iter().all(|e| !parallel.contains(e)))
        .copied()
        .unwrap();
    let orbit = [gen, gen.rotated(), gen.rotated().rotated()];
    let mut w2 = w.clone();
    for t in orbit {
        let k = t.key(&c.graph);
        let v = w2.entries[&k].clone();
        w2.entries.insert(k, zeta(7, 1) * v);
    }
    let ch = Checker::default();
    assert!(ch.check_rotation(&c.graph, &rels, &w2).unwrap().passed());
    assert!(ch.check_bigon(&c.graph, &rels, &w2).unwrap().passed());
    assert_eq!(ch.check_square(&c.graph, &rels, &w2).unwrap().status, Status::Fail);
}

#[test]
fn two_times_identity_is_not_hecke() {
    let (c, _, _, rels) = setup();
    let pp: SignString = "++".parse().unwrap();
    let u = scale(&Exact, &int(2), &identity(&Exact, &c.graph, &pp));
    let rs = Checker::default().check_hecke_suite(&c.graph, &rels, &u).unwrap();
    let hecke = by_name(&rs, "(Hecke)");
    assert_eq!(hecke.status, Status::Fail);
    let want = 4.0 - 2.0 * qint(2).to_c64().unwrap().0;
    assert!((hecke.residual_upper - want).abs() < 1e-12);
    assert!(by_name(&rs, "(R2)").passed());
}

#[test]
fn q2_times_identity_is_hecke_but_not_r1() {
    let (c, _, _, rels) = setup();
    let pp: SignString = "++".parse().unwrap();
    let u = scale(&Exact, &qint(2), &identity(&Exact, &c.graph, &pp));
    let rs = Checker::default().check_hecke_suite(&c.graph, &rels, &u).unwrap();
    assert!(by_name(&rs, "(Hecke)").passed());
    assert_eq!(by_name(&rs, "(R1) right cap").status, Status::Fail);
}

#[test]
fn auxiliary_relations_are_even_in_w() {
    // (U) is quadratic and (BA), (RI) are linear in W, so W -> -W changes nothing
    let (c, w, u, rels) = setup();
    let w = scale(&Exact, &int(-1), &w);
    let rs = Checker::default().check_kw_aux(&c.graph, &rels, &w, &u).unwrap();
    assert!(rs.iter().all(CheckReport::passed));
}

#[test]
fn w_from_another_gauge_breaks_ri_or_ba() {
    let (c, w, u, rels) = setup();
    let mut phases = vec![int(1); c.graph.edge_count()];
    phases[0] = zeta(5, 1);
    let w2 = gauge(&Exact, &w, &phases);
    let ch = Checker::default();
    assert!(ch.check_bigon(&c.graph, &rels, &w2).unwrap().passed());
    let rs = ch.check_kw_aux(&c.graph, &rels, &w2, &u).unwrap();
    let ri = by_name(&rs, "(RI)");
    let ba = by_name(&rs, "(BA)");
    assert!(ri.status == Status::Fail || ba.status == Status::Fail);
}

#[test]
fn residual_bounds_shrink_with_precision() {
    let (c, w, _, rels) = setup();
    let lo = Checker { precision: 128, ..Checker::default() };
    let hi = Checker { precision: 256, ..Checker::default() };
    for name in ["()", "(i)"] {
        let rel = rels.kuperberg.relation(name).unwrap();
        let a = lo.check(&c.graph, &rels.kuperberg, rel, &[("W", &w)]).unwrap();
        let b = hi.check(&c.graph, &rels.kuperberg, rel, &[("W", &w)]).unwrap();
        assert!(b.residual_upper <= a.residual_upper, "{name}");
    }
}

#[test]
fn tight_tolerance_at_low_precision_is_indeterminate() {
    let (c, w, _, rels) = setup();
    let ch = Checker { precision: 64, max_precision: 64, tol_exp: 100, verbose: true };
    let r = ch.check_bigon(&c.graph, &rels, &w).unwrap();
    assert_eq!(r.status, Status::Indeterminate);
    assert_eq!(r.residuals.len(), r.equations);
    // the doubling policy recovers
    let ch = Checker { max_precision: 512, ..ch };
    let r = ch.check_bigon(&c.graph, &rels, &w).unwrap();
    assert!(r.passed());
    assert!(r.precision > 64);
}

#[test]
fn relation_files_type_check() {
    let rels = RelationSet::bundled();
    assert_eq!(rels.kuperberg.relations.len(), 3);
    assert_eq!(rels.hecke.relations.len(), 5);
    assert_eq!(rels.kw_aux.relations.len(), 4);
}
