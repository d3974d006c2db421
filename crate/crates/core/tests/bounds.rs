use mil_core::bounds::{
    cost_table, enumerate_hypotheses, hspace_size, minimal_signature, reduction_factor, sample_complexity,
    sample_reduction, BoundsError, MAX_SUBSET_SIGNATURE,
};
use mil_core::domains::{Domain, World};
use mil_core::forgetting::{expected_costs, CostParams};
use mil_core::logic::{parse_atom, Program, SymbolKind, Vocabulary};
use mil_core::metarule::MetaruleSet;
use mil_core::mil::{Background, LearnTask, SearchConfig};
use mil_core::signature::Signature;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use proptest::prelude::*;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1e-300)
}

#[test]
fn worked_values() {
    assert_eq!(hspace_size(4, 6, 2, 1), BigUint::from(864u32));
    assert_eq!(hspace_size(9, 9, 1, 0), BigUint::from(1u32));
    assert!(close(sample_complexity(4, 6, 2, 2, 0.1, 0.05), 165.188_778_111_621_02));
    assert!(close(sample_complexity(1, 1, 2, 3, 0.1, 0.05), 20.0_f64.ln() / 0.1));
    assert!(close(sample_reduction(0.5, 2, 2), -4.158_883_083_359_672));
    assert_eq!(reduction_factor(0.5, 2, 2), 1.0 / 64.0);
    assert_eq!((reduction_factor(1.0, 2, 3), sample_reduction(1.0, 2, 3)), (1.0, 0.0));
}

#[test]
fn enumeration_examples() {
    let mut v = Vocabulary::new();
    let a = v.declare("a", 2, SymbolKind::Primitive).unwrap();
    let b = v.declare("b", 2, SymbolKind::Primitive).unwrap();
    let std = MetaruleSet::standard();
    let chain = std.subset(&["chain"]).unwrap();
    assert_eq!(enumerate_hypotheses(&chain, &v, &[a, b], 1, 100, |_| {}).unwrap().ordered, BigUint::from(8u32));
    let two = enumerate_hypotheses(&chain, &v, &[a, b], 2, 100, |_| {}).unwrap();
    assert_eq!(two.ordered, hspace_size(1, 2, 2, 2));
    assert_eq!(enumerate_hypotheses(&std, &v, &[a, b], 1, 100, |_| {}).unwrap().ordered, BigUint::from(12u32));
    assert_eq!(enumerate_hypotheses(&std, &v, &[], 0, 100, |_| {}).unwrap().ordered, BigUint::from(1u32));
    let mut visited = 0;
    enumerate_hypotheses(&std, &v, &[a, b], 2, 1000, |p| {
        assert_eq!(p.len(), 2);
        visited += 1;
    })
    .unwrap();
    assert_eq!(visited, 144);
    assert!(matches!(enumerate_hypotheses(&std, &v, &[a, b], 2, 100, |_| {}), Err(BoundsError::TooLarge { .. })));
}

#[test]
fn enumeration_never_exceeds_closed_form() {
    for rules in [MetaruleSet::standard(), MetaruleSet::standard().subset(&["chain"]).unwrap()] {
        let (m, j) = (rules.m() as u64, rules.j() as u32);
        for p in 1..=4usize {
            for dyadic in 0..=p {
                let mut v = Vocabulary::new();
                let syms: Vec<_> = (0..p)
                    .map(|i| v.declare(&format!("s{i}"), if i < dyadic { 2 } else { 1 }, SymbolKind::Primitive).unwrap())
                    .collect();
                for n in 0..=2 {
                    let count = enumerate_hypotheses(&rules, &v, &syms, n, 1 << 20, |_| {}).unwrap();
                    assert!(count.ordered <= hspace_size(m, p as u64, j, n));
                    assert!(count.distinct <= count.ordered);
                }
            }
        }
    }
}

#[test]
fn table_costs_agree_with_expected_costs() {
    for (p, n, k) in [(10u64, 6u32, 2u32), (10, 6, 5), (3, 4, 4), (7, 2, 1)] {
        let (rel, irr, forget) = cost_table(4, p, 2, n, k);
        for (num, den) in [(1i64, 2i64), (1, 1), (3, 7)] {
            let pr = BigRational::new(num.into(), den.into());
            let cp = CostParams { m: 4, j: 2, n, p, k, pr: pr.clone() };
            let (keep, f) = expected_costs(&cp).unwrap();
            assert_eq!(f, forget);
            let rat = |u: &BigUint| BigRational::from_integer(BigInt::from(u.clone()));
            let one = BigRational::from_integer(1.into());
            assert_eq!(keep, &pr * rat(&rel) + (one - &pr) * rat(&irr));
        }
    }
}

proptest! {
    #[test]
    fn halving_the_signature_divides_the_space(m in 1u64..6, half in 1u64..20, j in 0u32..4, n in 0u32..5) {
        let full = hspace_size(m, 2 * half, j, n);
        let scale = BigUint::from(2u32).pow((j + 1) * n);
        prop_assert_eq!(hspace_size(m, half, j, n) * scale, full);
    }

    #[test]
    fn scaling_by_rational_r_matches_factor(m in 1u64..6, p in 1u64..30, keep in 1u64..30, j in 0u32..3, n in 0u32..4) {
        prop_assume!(keep <= p);
        let r = keep as f64 / p as f64;
        let lhs = hspace_size(m, keep, j, n).to_string().parse::<f64>().unwrap();
        let rhs = reduction_factor(r, j, n) * hspace_size(m, p, j, n).to_string().parse::<f64>().unwrap();
        prop_assert!(close(lhs, rhs), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn sample_complexity_delta(m in 1u64..10, p in 2u64..200, j in 0u32..4, n in 1u32..8, eps in 0.01f64..0.99, delta in 0.01f64..0.99) {
        prop_assume!(p % 2 == 0);
        let d = sample_complexity(m, p / 2, j, n, eps, delta) - sample_complexity(m, p, j, n, eps, delta);
        let want = f64::from((j + 1) * n) * 0.5f64.ln() / eps;
        prop_assert!((d - want).abs() <= 1e-9 * want.abs().max(1.0), "{} vs {}", d, want);
        prop_assert!(close(sample_reduction(0.5, j, n) / eps, want));
    }
}

fn robot_task(w: &mut World, name: &str, example: &str) -> LearnTask {
    let target = w.vocab.declare(name, 2, SymbolKind::Target).unwrap();
    w.vocab.declare_invented(target, 2).unwrap();
    LearnTask::one_shot(parse_atom(example, &w.vocab).unwrap()).unwrap()
}

#[test]
fn minimal_signatures() {
    let mut w = World::new(Domain::Robot);
    let up = robot_task(&mut w, "f", "f(world(1,1,3,3,false),world(1,2,3,3,false))");
    let grab_up = robot_task(&mut w, "g", "g(world(3,3,3,3,false),world(3,4,3,4,true))");
    let never = robot_task(&mut w, "h", "h(world(1,1,3,3,false),world(6,6,3,3,true))");
    let rules = MetaruleSet::standard();
    let bk = Program::new();
    let env = Background { vocab: &w.vocab, registry: &w.registry, metarules: &rules, bk: &bk };
    let cfg = SearchConfig { max_size: 1, step_cap: 1_000_000, timeout: None, ..SearchConfig::default() };
    let sig = w.signature();
    let names = |s: Option<Signature>| s.map(|s| s.names(&w.vocab).into_iter().map(str::to_owned).collect::<Vec<_>>());
    assert_eq!(names(minimal_signature(&env, &sig, &up, &cfg).unwrap()), Some(vec!["up".to_owned()]));
    assert_eq!(names(minimal_signature(&env, &sig, &grab_up, &cfg).unwrap()), Some(vec!["up".to_owned(), "grab".to_owned()]));
    assert_eq!(minimal_signature(&env, &sig, &never, &cfg).unwrap(), None);

    let mut big = Signature::new();
    let mut v = w.vocab.clone();
    for i in 0..=MAX_SUBSET_SIGNATURE {
        big.push(v.declare(&format!("x{i}"), 2, SymbolKind::Primitive).unwrap());
    }
    let env = Background { vocab: &v, ..env };
    assert!(matches!(minimal_signature(&env, &big, &up, &cfg), Err(BoundsError::TooLarge { .. })));
}
