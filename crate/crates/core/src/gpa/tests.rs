use super::*;
use crate::arith::qint;
use crate::graph::e412;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TAU: f64 = 7.888609052210118e-31; // 2^-100

fn ss(s: &str) -> SignString {
    s.parse().unwrap()
}

fn assert_certified_equal(a: &Morphism<Scalar>, b: &Morphism<Scalar>) {
    let d = sub(&Balls::new(256), a, b).unwrap();
    assert!(d.max_abs_upper() < TAU, "residual {}", d.max_abs_upper());
}

fn random_morphism(g: &OrientedGraph, rng: &mut ChaCha8Rng, s: &str, t: &str) -> Morphism<Complex64> {
    let keys = basis(g, &ss(s), &ss(t));
    let density = rng.gen_range(0.2..1.0);
    let mut entries = BTreeMap::new();
    for k in keys {
        if rng.gen_bool(density) {
            entries.insert(k, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        }
    }
    Morphism { source: ss(s), target: ss(t), entries }
}

fn close(a: &Morphism<Complex64>, b: &Morphism<Complex64>) -> bool {
    sub(&Floats, a, b).unwrap().max_abs() < 1e-12
}

const WORDS: [&str; 6] = ["", "+", "-", "+-", "-+", "++"];

#[test]
fn snakes_all_four_pairings() {
    let g = e412();
    let b = Balls::new(256);
    let (p, m, pm, mp) = (ss("+"), ss("-"), ss("+-"), ss("-+"));
    let cases = [
        (tensor(&b, &ev(&b, &g, &pm).unwrap(), &identity(&b, &g, &p)), tensor(&b, &identity(&b, &g, &p), &coev(&b, &g, &mp).unwrap()), &p),
        (tensor(&b, &identity(&b, &g, &p), &ev(&b, &g, &mp).unwrap()), tensor(&b, &coev(&b, &g, &pm).unwrap(), &identity(&b, &g, &p)), &p),
        (tensor(&b, &ev(&b, &g, &mp).unwrap(), &identity(&b, &g, &m)), tensor(&b, &identity(&b, &g, &m), &coev(&b, &g, &pm).unwrap()), &m),
        (tensor(&b, &identity(&b, &g, &m), &ev(&b, &g, &pm).unwrap()), tensor(&b, &coev(&b, &g, &mp).unwrap(), &identity(&b, &g, &m)), &m),
    ];
    for (outer, inner, s) in cases {
        let snake = compose(&b, &outer, &inner).unwrap();
        assert_certified_equal(&snake, &identity(&b, &g, s));
    }
}

#[test]
fn closed_loops_are_quantum_three() {
    let g = e412();
    let b = Balls::new(256);
    let three = scale(&b, &qint(3).eval(256).unwrap(), &identity(&b, &g, &SignString::unit()));
    for pair in ["+-", "-+"] {
        let lp = compose(&b, &ev(&b, &g, &ss(pair)).unwrap(), &coev(&b, &g, &ss(pair)).unwrap()).unwrap();
        // oracle: per-vertex sum of lambda ratios over incident edges
        let lam: Vec<f64> = (0..11).map(|v| g.fp(v).to_c64().unwrap().0).collect();
        for v in 0..11 {
            let mut s = 0.0;
            for e in 0..g.edge_count() {
                let (a, c) = g.ends(e);
                if pair == "+-" && a == v {
                    s += lam[c] / lam[v];
                }
                if pair == "-+" && c == v {
                    s += lam[a] / lam[v];
                }
            }
            let got = lp.get(&Path::trivial(v), &Path::trivial(v)).unwrap().to_c64().0;
            assert!((got - s).abs() < 1e-12);
        }
        assert_certified_equal(&lp, &three);
    }
}

#[test]
fn rotation_cubed_is_identity_on_every_basis_element() {
    let g = e412();
    let b = Balls::new(192);
    let keys = basis(&g, &ss("-"), &ss("++"));
    assert_eq!(keys.len(), 63);
    for k in keys {
        let f = Morphism { source: ss("-"), target: ss("++"), entries: [(k, b.one())].into_iter().collect() };
        let r3 = rotate(&b, &g, &rotate(&b, &g, &rotate(&b, &g, &f).unwrap()).unwrap()).unwrap();
        let d = sub(&b, &r3, &f).unwrap();
        assert!(d.max_abs_upper() < TAU);
    }
}

#[test]
fn rotation_matches_coordinate_formula() {
    // rot(f) at (a <- c ; a -> b -> c) is sqrt(lambda_b / lambda_c) f at the triangle read from b
    let g = e412();
    let keys = basis(&g, &ss("-"), &ss("++"));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let f = Morphism {
        source: ss("-"),
        target: ss("++"),
        entries: keys.iter().map(|k| (k.clone(), Complex64::new(rng.gen(), rng.gen()))).collect(),
    };
    let r = rotate(&Floats, &g, &f).unwrap();
    let lam: Vec<f64> = (0..11).map(|v| g.fp(v).to_c64().unwrap().0).collect();
    let tri = |k: &Key| (k.1.edges()[0], k.1.edges()[1], k.0.edges()[0]);
    let by_tri: BTreeMap<_, _> = f.entries.iter().map(|(k, v)| (tri(k), *v)).collect();
    for (k, v) in &r.entries {
        let (e1, e2, e3) = tri(k);
        let (b_, c_) = (g.ends(e1).1, g.ends(e2).1);
        let want = by_tri[&(e2, e3, e1)] * (lam[b_] / lam[c_]).sqrt();
        assert!((v - want).norm() < 1e-12);
    }
    assert_eq!(r.len(), 63);
}

#[test]
fn compose_type_mismatch_names_subterm() {
    let g = e412();
    let d = parse_diagram("comp(id(\"+\"), tens(id(\"-\"), id(\"+\")))").unwrap();
    let err = d.eval(&Floats, &g, &BTreeMap::new()).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("comp(id(\"+\"), tens(id(\"-\"), id(\"+\")))"), "{msg}");
}

#[test]
fn diagram_text_round_trip() {
    for s in [
        "comp(dag(W), W)",
        "scale(\"q[2]\", id(\"-\"))",
        "sub(comp(tens(U, id(\"+\")), tens(id(\"+\"), U)), add(rot(W), W))",
        "comp(coev(\"-+\"), ev(\"-+\"))",
    ] {
        let d = parse_diagram(s).unwrap();
        assert_eq!(d.to_string(), s);
    }
    assert!(parse_diagram("comp(W").is_err());
    assert!(parse_diagram("frob(W)").is_err());
}

#[test]
fn unit_tensor_and_identity_tensor() {
    let g = e412();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let f = random_morphism(&g, &mut rng, "-", "++");
    let unit = identity(&Floats, &g, &SignString::unit());
    assert!(close(&tensor(&Floats, &unit, &f), &f));
    let ip = identity(&Floats, &g, &ss("+"));
    assert!(close(&tensor(&Floats, &ip, &ip), &identity(&Floats, &g, &ss("++"))));
    assert!(close(&compose(&Floats, &identity(&Floats, &g, &ss("++")), &f).unwrap(), &f));
}

#[test]
fn one_dimensional_hom_composes_as_rank_one() {
    let g = e412();
    let e = g.edge(8, 7, "").unwrap();
    let (s, t) = g.ends(e);
    let p = Path::new(s, vec![Step { to: t as u32, edge: e as u32, sign: Sign::Plus }]);
    let f = Morphism { source: ss("+"), target: ss("+"), entries: [((p.clone(), p.clone()), Complex64::new(2.0, 1.0))].into_iter().collect() };
    let ff = compose(&Floats, &f, &f).unwrap();
    assert_eq!(ff.len(), 1);
    assert!((ff.get(&p, &p).unwrap() - Complex64::new(3.0, 4.0)).norm() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn interchange_law(seed in any::<u64>(), w in proptest::array::uniform6(0usize..6)) {
        let g = e412();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f1 = random_morphism(&g, &mut rng, WORDS[w[0]], WORDS[w[1]]);
        let f2 = random_morphism(&g, &mut rng, WORDS[w[1]], WORDS[w[2]]);
        let g1 = random_morphism(&g, &mut rng, WORDS[w[3]], WORDS[w[4]]);
        let g2 = random_morphism(&g, &mut rng, WORDS[w[4]], WORDS[w[5]]);
        let lhs = compose(&Floats, &tensor(&Floats, &f2, &g2), &tensor(&Floats, &f1, &g1)).unwrap();
        let rhs = tensor(&Floats, &compose(&Floats, &f2, &f1).unwrap(), &compose(&Floats, &g2, &g1).unwrap());
        prop_assert!(close(&lhs, &rhs));
        // associativity of composition and tensor
        let f3 = random_morphism(&g, &mut rng, WORDS[w[2]], WORDS[w[0]]);
        let a = compose(&Floats, &f3, &compose(&Floats, &f2, &f1).unwrap()).unwrap();
        let b = compose(&Floats, &compose(&Floats, &f3, &f2).unwrap(), &f1).unwrap();
        prop_assert!(close(&a, &b));
        let a = tensor(&Floats, &f1, &tensor(&Floats, &g1, &f2));
        let b = tensor(&Floats, &tensor(&Floats, &f1, &g1), &f2);
        prop_assert!(close(&a, &b));
    }

    #[test]
    fn dagger_is_monoidal_anti_involution(seed in any::<u64>(), w in proptest::array::uniform4(0usize..6)) {
        let g = e412();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_morphism(&g, &mut rng, WORDS[w[0]], WORDS[w[1]]);
        let h = random_morphism(&g, &mut rng, WORDS[w[1]], WORDS[w[2]]);
        let k = random_morphism(&g, &mut rng, WORDS[w[2]], WORDS[w[3]]);
        prop_assert!(close(&dagger(&Floats, &dagger(&Floats, &f)), &f));
        let lhs = dagger(&Floats, &compose(&Floats, &h, &f).unwrap());
        let rhs = compose(&Floats, &dagger(&Floats, &f), &dagger(&Floats, &h)).unwrap();
        prop_assert!(close(&lhs, &rhs));
        let lhs = dagger(&Floats, &tensor(&Floats, &f, &k));
        let rhs = tensor(&Floats, &dagger(&Floats, &f), &dagger(&Floats, &k));
        prop_assert!(close(&lhs, &rhs));
        let c = Complex64::new(rng.gen(), rng.gen());
        let lhs = dagger(&Floats, &scale(&Floats, &c, &f));
        let rhs = scale(&Floats, &c.conj(), &dagger(&Floats, &f));
        prop_assert!(close(&lhs, &rhs));
    }

    #[test]
    fn rotation_cubed_on_random_elements(seed in any::<u64>()) {
        let g = e412();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_morphism(&g, &mut rng, "-", "++");
        let r3 = rotate(&Floats, &g, &rotate(&Floats, &g, &rotate(&Floats, &g, &f).unwrap()).unwrap()).unwrap();
        prop_assert!(close(&r3, &f));
    }

    #[test]
    fn snakes_on_random_elements(seed in any::<u64>()) {
        // zig-zags act as identities on random + and - morphisms too
        let g = e412();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_morphism(&g, &mut rng, "+", "+");
        let (p, pm, mp) = (ss("+"), ss("+-"), ss("-+"));
        let snake = compose(&Floats,
            &tensor(&Floats, &ev(&Floats, &g, &pm).unwrap(), &identity(&Floats, &g, &p)),
            &tensor(&Floats, &identity(&Floats, &g, &p), &coev(&Floats, &g, &mp).unwrap())).unwrap();
        prop_assert!(close(&compose(&Floats, &snake, &f).unwrap(), &f));
    }
}

#[test]
fn morphism_json_round_trip() {
    let g = e412();
    let m = coev(&Exact, &g, &ss("+-")).unwrap();
    let j = MorphismJson::from_morphism(&g, &m);
    let text = serde_json::to_string(&j).unwrap();
    let back: MorphismJson = serde_json::from_str(&text).unwrap();
    assert_eq!(back.to_morphism(&g).unwrap(), m);
}
