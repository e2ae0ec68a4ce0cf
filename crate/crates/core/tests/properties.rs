mod common;

use std::collections::BTreeSet;

use aspectkbl::mc_exhaustive::{check_lts, sat_obl, sat_pred, unify_label};
use aspectkbl::mc_static::{check_network, Outcome};
use aspectkbl::model::*;
use aspectkbl::semantics::*;
use aspectkbl::{parse_net, parse_obligation, parse_policy, Connective, Four};
use common::Gen;
use proptest::prelude::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

fn lattice_laws(join: fn(Four, Four) -> Four, meet: fn(Four, Four) -> Four) {
    for a in Four::ALL {
        assert_eq!(join(a, a), a);
        assert_eq!(meet(a, a), a);
        for b in Four::ALL {
            assert_eq!(join(a, b), join(b, a));
            assert_eq!(meet(a, b), meet(b, a));
            assert_eq!(join(a, meet(a, b)), a);
            assert_eq!(meet(a, join(a, b)), a);
            for c in Four::ALL {
                assert_eq!(join(join(a, b), c), join(a, join(b, c)));
                assert_eq!(meet(meet(a, b), c), meet(a, meet(b, c)));
            }
        }
    }
}

#[test]
fn both_orders_are_lattices() {
    lattice_laws(Four::join_k, Four::meet_k);
    lattice_laws(Four::join_t, Four::meet_t);
}

#[test]
fn join_k_is_the_least_upper_bound() {
    for a in Four::ALL {
        for b in Four::ALL {
            let uppers: Vec<Four> = Four::ALL.into_iter().filter(|u| a.leq_k(*u) && b.leq_k(*u)).collect();
            let least: Vec<Four> =
                uppers.iter().copied().filter(|u| uppers.iter().all(|v| u.leq_k(*v))).collect();
            assert_eq!(least, vec![a.join_k(b)]);
        }
    }
}

#[test]
fn any_objection_denies_the_liberal_combination() {
    for a in Four::ALL {
        for b in Four::ALL {
            if matches!(a, Four::False | Four::Top) || matches!(b, Four::False | Four::Top) {
                assert!(!a.join_k(b).grant(), "{a} {b}");
            }
        }
    }
}

#[test]
fn and_or_are_classical_on_booleans() {
    for x in [false, true] {
        for y in [false, true] {
            let (a, b) = (Four::from_bool(x), Four::from_bool(y));
            assert_eq!(Connective::And.apply(a, b), Four::from_bool(x && y));
            assert_eq!(Connective::Or.apply(a, b), Four::from_bool(x || y));
        }
    }
}

fn sorted_actions(net: &Net) -> Vec<String> {
    let mut v: Vec<String> =
        take_actions(net).iter().map(|a| format!("{} {} {}", a.source, a.action, a.continuation)).collect();
    v.sort();
    v
}

fn edges(lts: &Lts) -> BTreeSet<(String, String, String)> {
    lts.transitions
        .iter()
        .map(|t| (lts.states[t.from].to_string(), t.label.to_string(), lts.states[t.to].to_string()))
        .collect()
}

proptest! {
    #![proptest_config(config(300))]

    #[test]
    fn net_round_trip(seed in any::<u64>()) {
        let net = Gen::new(seed).arbitrary_net();
        let text = net.to_string();
        let parsed = parse_net(&text).map_err(|d| TestCaseError::fail(format!("{text}\n{d:?}")))?;
        prop_assert_eq!(parsed, net.canonicalize());
    }

    #[test]
    fn obligation_round_trip(seed in any::<u64>()) {
        let obl = Gen::new(seed).arbitrary_obligation();
        let text = obl.to_string();
        let parsed = parse_obligation(&text).map_err(|d| TestCaseError::fail(format!("{text}\n{d:?}")))?;
        prop_assert_eq!(parsed, obl);
    }

    #[test]
    fn policy_round_trip(seed in any::<u64>()) {
        let pol = Gen::new(seed).policy(3);
        let text = pol.to_string();
        let parsed = parse_policy(&text).map_err(|d| TestCaseError::fail(format!("{text}\n{d:?}")))?;
        prop_assert_eq!(parsed, pol);
    }

    #[test]
    fn parser_is_total_on_mangled_input(seed in any::<u64>(), cut in any::<prop::sample::Index>(), junk in "[ -~]{0,8}") {
        let text = Gen::new(seed).arbitrary_net().to_string();
        let mut at = cut.index(text.len() + 1);
        while !text.is_char_boundary(at) {
            at -= 1;
        }
        let mangled = format!("{}{}{}", &text[..at], junk, &text[at..]);
        let _ = parse_net(&mangled);
        let _ = parse_obligation(&mangled);
        let _ = parse_policy(&mangled);
    }

    #[test]
    fn canonicalize_is_idempotent_and_a_congruence_normal_form(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let net = g.arbitrary_net();
        let canon = net.canonicalize();
        prop_assert_eq!(canon.canonicalize(), canon.clone());
        let variant = g.congruent_variant(&net);
        prop_assert_eq!(variant.canonicalize(), canon);
    }

    #[test]
    fn take_actions_survives_canonicalize(seed in any::<u64>()) {
        let net = Gen::new(seed).small_net();
        let variant = Gen::new(seed ^ 1).congruent_variant(&net);
        prop_assert_eq!(sorted_actions(&variant), sorted_actions(&variant.canonicalize()));
    }

    #[test]
    fn findsubs_makes_both_sides_equal(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        use rand::Rng;
        let n = g.rng.random_range(0..4);
        let pool = ["a", "b"];
        let mut cut = Vec::new();
        let mut act = Vec::new();
        for i in 0..n + 2 {
            cut.push(match g.rng.random_range(0..3) {
                0 => Term::Wildcard,
                1 => Term::konst(pool[g.rng.random_range(0..2)]),
                _ => Term::var(format!("#v{}", g.rng.random_range(0..2))),
            });
            act.push(match g.rng.random_range(0..3) {
                0 => Term::Bind(format!("x{i}")),
                1 => Term::konst(pool[g.rng.random_range(0..2)]),
                _ => Term::var(format!("y{}", g.rng.random_range(0..2))),
            });
        }
        let view = |t: &Term| match t {
            Term::Bind(v) => Term::Var(v.clone()),
            other => other.clone(),
        };
        let pat = |ts: &[Term]| (ts[0].clone(), ts[1].clone(), ts[2..].to_vec());
        let (cs, ct, ca) = pat(&cut);
        let (as_, at, aa) = pat(&act);
        if let Some(theta) = findsubs(
            Pattern { subject: &cs, args: &ca, target: &ct },
            Pattern { subject: &as_, args: &aa, target: &at },
        ) {
            for (c, a) in cut.iter().zip(&act) {
                if *c == Term::Wildcard {
                    continue;
                }
                prop_assert_eq!(theta.apply(&view(c)), theta.apply(&view(a)), "{} vs {} under {}", c, a, theta);
            }
        }
    }
}

proptest! {
    #![proptest_config(config(150))]

    #[test]
    fn reachable_states_keep_policies_and_linearity(seed in any::<u64>()) {
        let net = Gen::new(seed).small_net();
        let lts = build_lts(&net, Limits::default()).unwrap();
        let policies: Vec<(String, Policy)> = net
            .locations()
            .into_iter()
            .map(|l| (l.to_owned(), net.policy_of(l).unwrap().clone()))
            .collect();
        for s in &lts.states {
            for e in &s.entries {
                let initial = policies.iter().find(|(l, _)| *l == e.location).map(|(_, p)| p);
                prop_assert_eq!(Some(&e.policy), initial, "location {} changed policy", e.location);
            }
        }
        for t in &lts.transitions {
            let before = lts.states[t.from].data_count() as i64;
            let after = lts.states[t.to].data_count() as i64;
            let expected = match t.label.cap {
                Capability::In => -1,
                Capability::Read => 0,
                Capability::Out => 1,
            };
            prop_assert_eq!(after - before, expected, "{}", t.label);
        }
    }

    #[test]
    fn denied_steps_never_occur(seed in any::<u64>()) {
        let net = Gen::new(seed).small_net();
        let lts = build_lts(&net, Limits::default()).unwrap();
        for (i, s) in lts.states.iter().enumerate() {
            let candidates = candidate_steps(s).unwrap();
            let granted: BTreeSet<(String, String)> = candidates
                .iter()
                .filter(|c| c.value().grant())
                .map(|c| (c.label.to_string(), c.next.to_string()))
                .collect();
            let taken: BTreeSet<(String, String)> = lts
                .outgoing(i)
                .map(|(_, t)| (t.label.to_string(), lts.states[t.to].to_string()))
                .collect();
            prop_assert_eq!(taken, granted);
        }
    }

    #[test]
    fn congruent_nets_have_the_same_lts(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let net = g.small_net();
        let variant = g.congruent_variant(&net);
        let a = build_lts(&net, Limits::default()).unwrap();
        let b = build_lts(&variant, Limits::default()).unwrap();
        prop_assert_eq!(a.states.len(), b.states.len());
        prop_assert_eq!(a.transitions.len(), b.transitions.len());
        prop_assert_eq!(edges(&a), edges(&b));
    }

    #[test]
    fn congruence_preserves_verdicts_and_tests(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let net = g.small_net();
        let variant = g.congruent_variant(&net);
        let obl = g.small_obligation(&net);
        let v1 = sat_obl(&net, &obl, Limits::default()).unwrap().holds;
        let v2 = sat_obl(&variant, &obl, Limits::default()).unwrap().holds;
        prop_assert_eq!(v1, v2);
        let lits: Vec<String> = net.constants().into_iter().collect();
        for at in &lits {
            for x in &lits {
                for y in &lits {
                    let args = [x.clone(), y.clone()];
                    prop_assert_eq!(interp_test(&args, at, &net), interp_test(&args, at, &variant));
                    prop_assert_eq!(interp_test(&args[..1], at, &net), interp_test(&args[..1], at, &variant));
                }
            }
        }
    }

    #[test]
    fn per_edge_equals_per_path(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let net = g.small_net();
        let obl = g.small_obligation(&net);
        let lts = build_lts(&net, Limits::default()).unwrap();
        let edge = check_lts(&lts, &obl).unwrap().holds;
        let mut path_verdict = true;
        for path in lts.maximal_paths(usize::MAX) {
            for &k in &path {
                let t = &lts.transitions[k];
                if let Some(theta) = unify_label(&obl.cut, &t.label) {
                    if !sat_pred((&lts.states[t.from], &lts.states[t.to]), &theta, &obl.pred).unwrap() {
                        path_verdict = false;
                    }
                }
            }
        }
        prop_assert_eq!(edge, path_verdict);
    }

    #[test]
    fn witnesses_replay(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let net = g.small_net();
        let obl = g.small_obligation(&net);
        let v = sat_obl(&net, &obl, Limits::default()).unwrap();
        if let Some(w) = v.witness {
            let reached = replay(&net, &w.path).unwrap();
            prop_assert!(!reached.is_empty(), "witness {:?} does not replay", w.path);
        }
    }

    #[test]
    fn static_certification_is_sound(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let net = g.small_net();
        let obl = g.small_obligation(&net);
        let st = check_network(&net, &obl).unwrap();
        if st.certified {
            let ex = sat_obl(&net, &obl, Limits::default()).unwrap();
            prop_assert!(ex.holds, "certified but violated:\n{}\n{}\n{:?}", net, obl, ex.witness);
        }
    }

    #[test]
    fn irrelevant_obligations_hold(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let net = g.small_net();
        let mut obl = g.small_obligation(&net);
        obl.cut.target = "Nowhere".into();
        obl.pred = Pred::False;
        let st = check_network(&net, &obl).unwrap();
        let variable_target = take_actions(&net).iter().any(|a| !a.action.target.is_const());
        if !variable_target {
            prop_assert!(st.per_action.iter().all(|r| r.outcome == Outcome::CertifiedIrrelevant));
        }
        prop_assert!(st.certified);
        prop_assert!(sat_obl(&net, &obl, Limits::default()).unwrap().holds);
    }
}

#[test]
fn tiny_net_per_path_cross_check() {
    let net = parse_net(
        "EHDB :: <Alice, CarePlan, alicetext> || EHDB :: <Bob, PrivateNotes, bobtext>
         || ROLES :: <Doctor, Hansen> || ROLES :: <Nurse, Olsen>
         || Hansen :: read(Bob, PrivateNotes, !content)@EHDB . out(Bob, PrivateNotes, content)@Olsen . 0
         || Olsen :: read(Bob, PrivateNotes, !content)@EHDB . 0",
    )
    .unwrap();
    let lts = build_lts(&net, Limits::default()).unwrap();
    for src in [
        "AG [$u : r(_, PrivateNotes, _)@EHDB] test(Doctor, $u)@ROLES",
        "AG [$u : o(_, PrivateNotes, _)@Olsen] test(Doctor, Olsen)@ROLES",
        "AG [$u : o(_, _, $c)@Olsen] test'(Bob, PrivateNotes, $c)@Olsen",
    ] {
        let obl = parse_obligation(src).unwrap();
        let per_path = lts.maximal_paths(usize::MAX).iter().all(|p| {
            p.iter().all(|&k| {
                let t = &lts.transitions[k];
                unify_label(&obl.cut, &t.label).is_none_or(|th| {
                    sat_pred((&lts.states[t.from], &lts.states[t.to]), &th, &obl.pred).unwrap()
                })
            })
        });
        assert_eq!(check_lts(&lts, &obl).unwrap().holds, per_path, "{src}");
    }
}
