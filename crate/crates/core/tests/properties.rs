use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use endoquant::algebra::{GaussianRational, Jet, MatrixJet, NuSeries};
use endoquant::coefficients::c_triangular;
use endoquant::config::Config;
use endoquant::fixtures;
use endoquant::geometry::connection::{nabla_hol, nabla_hol_conjugated, nabla_hol_multi};
use endoquant::geometry::{calabi_d, Chart, ConnectionData};
use endoquant::graphs::{canonicalize, enumerate, sigma_partition, Family};
use endoquant::Rational;
use endoquant::starprod::random::Variables;
use endoquant::starprod::verify::{check_associativity, check_separation, check_unit, compare, Routes};
use endoquant::starprod::{random_section, verify_suite, Section, SectionSpec, SuiteOptions};
use endoquant::tensors::{eval_graph_mixed, eval_graph_upper, g_tensors, rank, TensorContext};

fn coeff() -> impl Strategy<Value = GaussianRational> {
    (-4i64..=4, 1i64..=3, -2i64..=2).prop_map(|(a, b, c)| GaussianRational::new(Rational::new(a, b), Rational::from_int(c)))
}

/// Jets in two variables with at most five terms of degree ≤ 3.
fn jet() -> impl Strategy<Value = Jet> {
    prop::collection::vec(((0u32..=3, 0u32..=3), coeff()), 0..5).prop_map(|ts| {
        Jet::from_terms(2, ts.into_iter().filter(|((a, b), _)| a + b <= 3).map(|((a, b), c)| (vec![a, b], c)), None)
    })
}

fn unit_jet() -> impl Strategy<Value = Jet> {
    jet().prop_map(|j| {
        let c = j.value_at_origin().unwrap();
        &(&j - &Jet::constant(2, c)) + &Jet::one(2)
    })
}

fn accuracy() -> impl Strategy<Value = Option<i32>> {
    prop_oneof![Just(None), (2i32..=6).prop_map(Some)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jet_product_is_associative(a in jet(), b in jet(), c in jet(), x in accuracy(), y in accuracy()) {
        let a = a.with_accuracy(x);
        let b = b.with_accuracy(y);
        let l = &(&a * &b) * &c;
        let r = &a * &(&b * &c);
        prop_assert!(l.agrees_with(&r));
        prop_assert_eq!(l.accuracy(), r.accuracy());
    }

    #[test]
    fn jet_inverse_round_trip(a in unit_jet(), target in 2i32..=8) {
        let inv = a.inverse(target).unwrap();
        let p = &a * &inv;
        prop_assert!(p.agrees_with(&Jet::one(2)));
        prop_assert!(p.accuracy().is_none_or(|acc| acc >= target));
    }

    #[test]
    fn exp_log_round_trip(a in unit_jet(), target in 2i32..=7) {
        let l = a.log(target).unwrap();
        let back = l.exp(target).unwrap();
        prop_assert!(back.agrees_with(&a));
        prop_assert!(back.accuracy().is_none_or(|acc| acc >= target));
    }

    #[test]
    fn nu_window_reads_match_widened_operands(
        a in prop::collection::vec(jet(), 1..4),
        b in prop::collection::vec(jet(), 1..4),
        lo in -1i32..=1,
        wa in 0i32..=3,
        wb in 0i32..=3,
    ) {
        let zero = Jet::zero(2);
        let exact_a = NuSeries::from_coeffs(lo, a.clone(), None, &zero);
        let exact_b = NuSeries::from_coeffs(0, b.clone(), None, &zero);
        let ta = exact_a.truncate(lo + wa);
        let tb = exact_b.truncate(wb);
        let p = ta.mul(&tb);
        let full = exact_a.mul(&exact_b);
        let top = p.max_order().expect("finite window");
        for s in (lo - 1)..=top {
            prop_assert_eq!(p.get(s).unwrap(), full.get(s).unwrap());
        }
        prop_assert!(p.get(top + 1).is_err());
    }

    #[test]
    fn nabla_commutes_and_matches_conjugated_form(seed in any::<u64>()) {
        let chart = chart_m2();
        let conn = ConnectionData::new(&chart);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_section(&mut rng, 2, 2, &SectionSpec::default(), Variables::All).get(0).unwrap();
        let ab = nabla_hol(&nabla_hol(&f, 0, &chart, &conn), 1, &chart, &conn);
        let ba = nabla_hol(&nabla_hol(&f, 1, &chart, &conn), 0, &chart, &conn);
        prop_assert!(ab.agrees_with(&ba));
        let l01 = f.derive(chart.antihol(0)).derive(chart.antihol(1));
        let l10 = f.derive(chart.antihol(1)).derive(chart.antihol(0));
        prop_assert!(l01.agrees_with(&l10));
        for exps in [[1u32, 0], [0, 1], [2, 0], [1, 1]] {
            let direct = nabla_hol_multi(&f, &exps, &chart, &conn);
            let conj = nabla_hol_conjugated(&f, &exps, &chart);
            prop_assert!(direct.agrees_with(&conj), "{:?}", exps);
        }
    }

    #[test]
    fn calabi_d_ignores_pluriharmonic_shift(c1 in coeff(), c2 in coeff()) {
        let chart = fixtures::rich_scalar(1);
        let f = &Jet::monomial(2, &[2, 0], c1.clone()) + &Jet::monomial(2, &[3, 0], c2.clone());
        let shift = &f + &f.conj();
        let mut data = chart.data.clone();
        let p = data.potentials.get_mut(&-1).unwrap();
        *p = &*p + &shift;
        let shifted = Chart::new(data).unwrap();
        prop_assert_eq!(calabi_d(&chart, (3, 3)), calabi_d(&shifted, (3, 3)));
    }

    #[test]
    fn config_round_trip_is_exact(seed in any::<u64>(), nu_top in 0i32..=2) {
        let chart = fixtures::rich_bundle(2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = SectionSpec { nu_top, ..SectionSpec::default() };
        let f = random_section(&mut rng, 1, 2, &spec, Variables::All);
        let cfg = Config { chart, sections: [("f".to_string(), f)].into(), run: Default::default() };
        let text = cfg.emit();
        let back = Config::parse(&text).unwrap();
        prop_assert_eq!(back.emit(), text);
        prop_assert_eq!(&back.sections, &cfg.sections);
        prop_assert_eq!(&back.chart.data, &cfg.chart.data);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn star_product_laws_hold(seed in any::<u64>()) {
        let chart = fixtures::rich_bundle(2);
        let routes = Routes::new(&chart, 2).unwrap();
        let opts = SuiteOptions { cases: 1, ..SuiteOptions::new(seed, 2) };
        let graph = |a: &Section, b: &Section| routes.graph.mul(a, b);
        for r in [
            check_associativity("associativity", &chart, &graph, &opts).unwrap(),
            check_unit("unit", &chart, &graph, &opts).unwrap(),
            check_separation("separation", &chart, &graph, &opts).unwrap(),
        ] {
            prop_assert!(r.passed, "{:?}", r);
        }
    }

    #[test]
    fn routes_agree_on_curved_m2(seed in any::<u64>()) {
        let chart = chart_m2();
        let routes = Routes::new(&chart, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = SectionSpec { max_degree: 2, ..SectionSpec::default() };
        let f = random_section(&mut rng, 2, 2, &spec, Variables::All);
        let g = random_section(&mut rng, 2, 2, &spec, Variables::All);
        let d = compare(&routes.graph.mul(&f, &g).unwrap(), &routes.oracle.mul(&f, &g).unwrap(), 1);
        prop_assert!(d.is_none(), "{:?}", d);
    }
}

/// A curved rank-2 chart of dimension 2.
fn chart_m2() -> Chart {
    let p = |terms: &[(&[u32], i64, i64)]| fixtures::poly(2, terms);
    let pots = [
        (-1, p(&[(&[1, 0, 1, 0], 1, 1), (&[0, 1, 0, 1], 1, 1), (&[1, 1, 1, 1], 1, 2)])),
        (0, p(&[(&[1, 0, 0, 1], 1, 1), (&[0, 1, 1, 0], 1, 1)])),
    ]
    .into();
    let (z1, zb1, z2, zb2) = (Jet::z(2, 0), Jet::zbar(2, 0), Jet::z(2, 1), Jet::zbar(2, 1));
    let one = Jet::one(4);
    let u = MatrixJet::from_rows(vec![
        vec![&one + &(&z2 * &zb2), z1.clone()],
        vec![zb1.clone(), &(&one + &(&z1 * &zb1)) + &(&z2 * &zb2)],
    ]);
    Chart::new(endoquant::geometry::ChartData::new(2, 2, pots, u)).unwrap()
}

#[test]
fn enumeration_is_closed_and_duplicate_free() {
    for fam in [Family::M, Family::N] {
        let classes = enumerate(3, fam);
        let set: BTreeSet<_> = classes.iter().map(|c| c.graph.clone()).collect();
        assert_eq!(set.len(), classes.len());
        for c in &classes {
            assert_eq!(&canonicalize(&c.graph), c);
        }
    }
}

#[test]
fn sigma_partitions_strip_frontal_regulars() {
    for c in enumerate(3, Family::M) {
        let g = &c.graph;
        for i in 0..=g.s() {
            let tail = sigma_partition(g, i).unwrap().split(g).second;
            assert!(tail.frontal_regular().is_empty(), "{g} σ_{i}");
            assert_eq!(tail.s(), i, "{g} σ_{i}");
        }
    }
}

#[test]
fn ansatz_sign_relation() {
    for c in enumerate(3, Family::M) {
        let g = &c.graph;
        let reduced = sigma_partition(g, g.s()).unwrap().split(g).second;
        let s = if (g.r() as i64 - reduced.r() as i64).rem_euclid(2) == 0 { 1 } else { -1 };
        assert_eq!(c_triangular(g), &Rational::from_int(s) * &c_triangular(&reduced), "{g}");
    }
}

#[test]
fn graph_tensor_forms_and_support() {
    let chart = fixtures::rich_bundle(2);
    let ctx = TensorContext::for_degree(&chart, 3).unwrap();
    let (gl, _) = g_tensors(&chart, 3);
    for c in enumerate(2, Family::M) {
        let g = &c.graph;
        let upper = eval_graph_upper(g, &ctx).unwrap().to_tensor(&ctx);
        let mixed = eval_graph_mixed(g, &ctx).unwrap().to_tensor(&ctx);
        for ((a, b), _) in upper.iter() {
            assert_eq!((rank(a), rank(b)), (g.q(), g.p()), "{g}");
        }
        for ((a, b), _) in mixed.iter() {
            assert_eq!((rank(a), rank(b)), (g.q(), g.p()), "{g}");
        }
        let lowered = gl.contract(&upper).unwrap();
        assert!(lowered.agrees_with(&mixed, |_, _| true), "{g}");
    }
}

#[test]
fn reports_do_not_depend_on_worker_count() {
    let chart = fixtures::bundle_flat_base(1);
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| verify_suite(&chart, &SuiteOptions::new(9, 1)).unwrap().to_json())
    };
    assert_eq!(run(1), run(4));
}
