mod common;

use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::Rng;

use common::*;
use randop_core::cli::scenario::{self, VecLit};
use randop_core::conditional::{best_conditional, restrict, StochasticContinuity};
use randop_core::continuity::search::exceed_vector;
use randop_core::continuity::{alpha_t, check_sequential, f_profile, prob_bound_at, prob_close};
use randop_core::exact::{self, int, ratio};
use randop_core::graph::{probe_separating, vetgf_check, LimitStatus};
use randop_core::prob_core::joint_lower_bound;
use randop_core::random_operator::OpNorm;
use randop_core::randomization::{ky_fan_distance, RandomVector};
use randop_core::spaces::SeqVector;
use randop_core::Rational;

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

fn random_vector(r: &mut impl Rng, t: &randop_core::random_operator::RandomOperator) -> RandomVector {
    let vals = (0..t.space().len())
        .map(|_| sparse_vector(r, t.codomain(), 4))
        .collect();
    RandomVector::new(t.space().clone(), t.codomain(), vals).unwrap()
}

proptest! {
    #![proptest_config(cfg(96))]

    #[test]
    fn complement_and_joint_bound(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = space(&mut r, 6);
        let events = all_events(&s);
        for a in &events {
            prop_assert_eq!(a.prob() + s.complement(a).unwrap().prob(), int(1));
        }
        for _ in 0..20 {
            let a = events[r.gen_range(0..events.len())].clone();
            let b = events[r.gen_range(0..events.len())].clone();
            let ab = a.intersect(&b).unwrap();
            let bound = joint_lower_bound(&a.prob(), &b.prob()).unwrap();
            prop_assert!(ab.prob() >= bound);
            if a.union(&b).unwrap().prob().is_one() {
                prop_assert_eq!(ab.prob(), bound);
            }
            if b.prob().is_one() {
                prop_assert_eq!(ab.prob(), a.prob());
            }
        }
    }

    #[test]
    fn conditioning_rescales(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = space(&mut r, 6);
        for cond in all_events(&s).into_iter().filter(|e| !e.is_empty()) {
            let c = s.condition(&cond).unwrap();
            prop_assert_eq!(c.masses().cloned().sum::<Rational>(), int(1));
            for (j, i) in cond.indices().enumerate() {
                prop_assert_eq!(c.mass(j), &(s.mass(i) / cond.prob()));
            }
        }
    }

    #[test]
    fn vector_norm_laws(seed in any::<u64>()) {
        let mut r = rng(seed);
        let v = sparse_vector(&mut r, C00, 12);
        let w = sparse_vector(&mut r, C00, 12);
        let c = small_rational(&mut r, 5, 3);
        prop_assert!(v.add(&w).unwrap().norm() <= v.norm() + w.norm());
        prop_assert_eq!(v.scale(&c).norm(), c.abs() * v.norm());
        prop_assert!(v.entries().values().all(|x| !x.is_zero()));
        let text = serde_json::to_string(&VecLit::from_vector(&v)).unwrap();
        let back: VecLit = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back.0, v.entries());
    }

    #[test]
    fn duality_and_ky_fan_metric(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = operator(&mut r);
        let (x, y, z) = (random_vector(&mut r, &t), random_vector(&mut r, &t), random_vector(&mut r, &t));
        for k in 1..6 {
            let tau = ratio(k, 4);
            let lt = x.event_norm_lt(&tau).unwrap().prob();
            let ge = x.event_norm_ge(&tau).unwrap().prob();
            prop_assert_eq!(lt + ge, int(1));
        }
        let dxy = ky_fan_distance(&x, &y).unwrap();
        prop_assert_eq!(&dxy, &ky_fan_distance(&y, &x).unwrap());
        prop_assert!(dxy <= ky_fan_distance(&x, &z).unwrap() + ky_fan_distance(&z, &y).unwrap());
        prop_assert_eq!(dxy.is_zero(), x.equal_event(&y).unwrap().prob().is_one());
        prop_assert!(ky_fan_distance(&x, &x).unwrap().is_zero());
    }

    #[test]
    fn operator_norms_match_apply(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = operator(&mut r);
        let probes = small_probes().vectors(t.domain());
        for (rep, n) in t.maps().iter().zip(t.op_norms()) {
            for x in &probes {
                let out = rep.apply(x, t.codomain()).norm();
                if let OpNorm::Finite(v) = &n {
                    prop_assert!(out <= v * x.norm());
                }
            }
            let levels: Vec<Rational> = match &n {
                OpNorm::Finite(v) if v.is_positive() => {
                    vec![v - ratio(1, 7), v - ratio(1, 1000)]
                }
                OpNorm::Finite(_) => vec![],
                OpNorm::Infinite => vec![int(1), int(10), int(50)],
            };
            for level in levels.into_iter().filter(|l| !l.is_negative()) {
                let x = exceed_vector(rep, &level, t.domain());
                prop_assert!(x.is_some(), "no input above {} for {:?}", level, rep);
                let x = x.unwrap();
                prop_assert!(rep.apply(&x, t.codomain()).norm() > level * x.norm());
            }
        }
    }

    #[test]
    fn homogeneity_and_linearity(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = operator(&mut r);
        let x = nonzero_vector(&mut r, t.domain(), 6);
        let y = sparse_vector(&mut r, t.domain(), 6);
        let d = ratio(r.gen_range(1..=5), r.gen_range(1..=5));
        let lhs = t.apply(&x.scale(&d.recip()).scale(&d)).unwrap();
        let rhs = t.apply(&x.scale(&d.recip())).unwrap().scale(&d);
        let same = t.space().event_where(|i| lhs.value(i).norm() == rhs.value(i).norm());
        prop_assert!(same.prob().is_one());
        let (a, b) = (small_rational(&mut r, 3, 2), small_rational(&mut r, 3, 2));
        prop_assert_eq!(t.linearity_probability(&x, &y, &a, &b).unwrap(), int(1));
        // corruption breaks linearity exactly off the affine combinations
        let ev = all_events(t.space())[r.gen_range(1..1usize << t.space().len())].clone();
        let off = nonzero_vector(&mut r, t.codomain(), 3);
        let bad = t.clone().with_corruption(ev.clone(), off).unwrap();
        let p = bad.linearity_probability(&x, &y, &a, &b).unwrap();
        let expect = if (&a + &b).is_one() { int(1) } else { int(1) - ev.prob() };
        prop_assert_eq!(p, expect);
    }

    #[test]
    fn origin_and_threshold_duality(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = operator(&mut r);
        let zero = SeqVector::zero(t.domain());
        for x in small_probes().vectors(t.domain()).iter().take(12) {
            let tx = t.apply(x).unwrap();
            for k in 1..5 {
                let tau = ratio(k, 2);
                let lt = tx.event_norm_lt(&tau).unwrap().prob();
                prop_assert_eq!(prob_close(&t, x, &zero, &tau).unwrap(), lt.clone());
                let ge = tx.event_norm_ge(&tau).unwrap().prob();
                for e in 1..10 {
                    let eps = ratio(e, 10);
                    prop_assert_eq!(lt > eps, ge < int(1) - &eps);
                }
            }
        }
    }

    #[test]
    fn profile_is_monotone_and_dominates_bounded_mass(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = operator(&mut r);
        let grid: Vec<Rational> = (0..8).map(|k| ratio(k, 2)).collect();
        let p = f_profile(&t, &small_probes(), &grid).unwrap();
        for w in p.grid.windows(2) {
            prop_assert!(w[0].lower <= w[1].lower && w[0].upper <= w[1].upper);
        }
        for g in &p.grid {
            let b = t.bounded_event(&g.m).unwrap().prob();
            prop_assert!(g.lower >= b && g.lower <= g.upper);
            if t.is_diagonal_only() {
                prop_assert_eq!(&g.lower, &b);
                prop_assert_eq!(&g.upper, &b);
            }
        }
        prop_assert_eq!(&alpha_t(&t).unwrap().alpha_t, &t.finite_norm_event().prob());
    }

    #[test]
    fn conditional_theorem(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = operator(&mut r);
        let (best, p) = best_conditional(&t);
        prop_assert!(p >= *alpha_t(&t).unwrap().lower());
        let probes = small_probes().vectors(t.domain());
        for ev in all_events(t.space()).into_iter().filter(|e| !e.is_empty()) {
            let c = restrict(&t, &ev).unwrap();
            match c.is_stochastically_continuous() {
                StochasticContinuity::Continuous { m } => {
                    prop_assert!(ev.is_subset(&best).unwrap());
                    for x in probes.iter().take(10) {
                        prop_assert!(prob_bound_at(&t, x, &m).unwrap() >= ev.prob());
                    }
                }
                StochasticContinuity::Discontinuous { .. } => {
                    prop_assert!(!ev.is_subset(&best).unwrap());
                }
            }
        }
    }

    #[test]
    fn bounded_event_matches_norms(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = operator(&mut r);
        let m = ratio(r.gen_range(0..8), 2);
        let good = t.bounded_event(&m).unwrap();
        for (i, n) in t.op_norms().iter().enumerate() {
            prop_assert_eq!(good.contains(i), n.at_most(&m));
        }
    }
}

proptest! {
    #![proptest_config(cfg(48))]

    #[test]
    fn closed_graph_forward_and_scaling(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = operator(&mut r);
        let specs: Vec<_> = (0..3).map(|_| null_spec(&mut r, t.domain())).collect();
        let report = vetgf_check(&t, &specs).unwrap();
        let lower = report.alpha.lower().clone();
        let all_bounded = t.op_norms().iter().all(OpNorm::is_finite);
        for probe in &report.graph.probes {
            if let LimitStatus::Detected { y, p_zero, .. } = &probe.limit {
                prop_assert!(*p_zero >= lower);
                if all_bounded {
                    prop_assert!(p_zero.is_one());
                }
                let c = small_rational(&mut r, 3, 2);
                if let Some(scaled) = probe.spec.scaled(&c) {
                    let again = probe_separating(&t, &[scaled]).unwrap();
                    match &again[0].limit {
                        LimitStatus::Detected { y: cy, .. } => prop_assert_eq!(cy, &y.scale(&c)),
                        other => prop_assert!(false, "scaled probe lost its limit: {:?}", other),
                    }
                }
                // a separating element below alpha refutes continuity at alpha
                if !p_zero.is_one() {
                    let nonzero = y.norms().into_iter().filter(|n| n.is_positive()).min().unwrap();
                    let tau = nonzero / int(2);
                    let alpha = (p_zero + int(1)) / int(2);
                    let s = check_sequential(&t, &probe.spec, &alpha, &[tau]).unwrap();
                    prop_assert!(s.refutes_level);
                }
            }
        }
    }

    #[test]
    fn scenario_documents_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let doc = random_doc(&mut r);
        let canon = scenario::to_canonical(&doc);
        let parsed = scenario::parse_doc(&canon).unwrap();
        prop_assert_eq!(&parsed, &doc);
        prop_assert_eq!(scenario::to_canonical(&parsed), canon.clone());
        let built = scenario::Scenario::from_doc(parsed);
        prop_assert!(built.is_ok(), "{:?}\n{}", built.err(), canon);
    }
}

fn coeff_doc(r: &mut impl Rng, depth: u32) -> scenario::CoeffDoc {
    use scenario::CoeffDoc as C;
    let q = |r: &mut _| scenario::Q(small_rational(r, 4, 3));
    match r.gen_range(0..if depth == 0 { 3 } else { 4 }) {
        0 => C::Constant { c: q(r) },
        1 => C::Affine { a: q(r), b: q(r) },
        2 => C::Harmonic { a: q(r), b: q(r) },
        _ => C::Table {
            overrides: VecLit((0..2).map(|_| (r.gen_range(1..=5), small_rational(r, 3, 2))).collect()),
            tail: Box::new(coeff_doc(r, depth - 1)),
        },
    }
}

fn random_doc(r: &mut impl Rng) -> scenario::ScenarioDoc {
    use scenario::*;
    let s = space(r, 4);
    let atoms: Vec<AtomDoc> = s
        .atom_ids()
        .zip(s.masses())
        .map(|(id, m)| AtomDoc { id: id.into(), mass: Q(m.clone()) })
        .collect();
    let operator = s
        .atom_ids()
        .map(|id| OperatorEntry {
            atom: id.into(),
            map: match r.gen_range(0..3) {
                0 => MapDoc::Zero,
                1 => MapDoc::Diagonal { coeff: coeff_doc(r, 1) },
                _ => MapDoc::RankOne {
                    weights: coeff_doc(r, 1),
                    output: VecLit::from_vector(&nonzero_vector(r, C00, 4)),
                },
            },
        })
        .collect();
    let mut analyses = vec![AnalysisDoc::Alpha];
    if r.gen_bool(0.5) {
        analyses.push(AnalysisDoc::Clauses {
            eps: Some(vec![Q(ratio(1, 2))]),
            tau: Some(Q(exact::one())),
            point: None,
        });
    }
    if r.gen_bool(0.5) {
        analyses.push(AnalysisDoc::ClosedGraph {
            specs: Some(vec![SeqDoc::ScaledBasis { p: 1, scale: Some(Q(ratio(1, 2))) }, SeqDoc::WindowSum { len: 2 }]),
        });
    }
    ScenarioDoc {
        name: format!("gen{}", r.gen::<u16>()),
        space: atoms,
        domain: SpaceDoc::C00,
        codomain: SpaceDoc::C00,
        operator,
        corruption: r.gen_bool(0.3).then(|| CorruptionDoc {
            event: vec!["w0".into()],
            offset: VecLit::from_vector(&nonzero_vector(r, C00, 3)),
        }),
        analyses,
        probe_config: r.gen_bool(0.5).then_some(ProbeConfigDoc { basis_max: 8, comb_width: 2, window_len: 3 }),
        grids: GridsDoc {
            m: r.gen_bool(0.5).then(|| vec![Q(int(1)), Q(int(2))]),
            eps: None,
            tau: r.gen_bool(0.5).then(|| vec![Q(ratio(1, 2))]),
        },
    }
}
