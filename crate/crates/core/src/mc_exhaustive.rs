//! Reference checker: evaluates an `AG` obligation on every transition of
//! the LTS.

use serde::Serialize;

use crate::model::{loc_set, Basic, Label, LabelPattern, Net, Obligation, Pred, Term};
use crate::semantics::{
    build_lts, findsubs, interp_test, EvalError, Limits, Lts, Pattern, SemanticsError, Subst,
};

/// A violating transition and how to reach it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    /// Labels from the initial state up to and including the failing one.
    pub path: Vec<Label>,
    /// Index of the failing transition in the LTS.
    pub transition: usize,
    pub theta: Subst,
    /// First basic predicate that evaluated to false, after substitution.
    pub failing_bp: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub holds: bool,
    pub witness: Option<Witness>,
    pub states_explored: usize,
    pub transitions_checked: usize,
}

/// `cut θ = label`: the substitution making the obligation label pattern
/// equal to a concrete label.
pub fn unify_label(cut: &LabelPattern, label: &Label) -> Option<Subst> {
    if cut.cap != label.cap {
        return None;
    }
    let act_args: Vec<Term> = label.args.iter().cloned().map(Term::Const).collect();
    findsubs(
        Pattern { subject: &cut.subject, args: &cut.args, target: &Term::Const(cut.target.clone()) },
        Pattern { subject: &Term::Const(label.subject.clone()), args: &act_args, target: &Term::Const(label.target.clone()) },
    )
}

/// Builds the LTS of `n0` and checks `obl` on it.
pub fn sat_obl(n0: &Net, obl: &Obligation, limits: Limits) -> Result<Verdict, SemanticsError> {
    let lts = build_lts(n0, limits)?;
    Ok(check_lts(&lts, obl)?)
}

/// Checks `obl` on every transition of an already built LTS, in index
/// order; the first failing transition becomes the witness.
pub fn check_lts(lts: &Lts, obl: &Obligation) -> Result<Verdict, EvalError> {
    let mut checked = 0;
    for (i, t) in lts.transitions.iter().enumerate() {
        checked += 1;
        let Some(theta) = unify_label(&obl.cut, &t.label) else { continue };
        let mut failing = None;
        let pair = (&lts.states[t.from], &lts.states[t.to]);
        if !sat_pred_tracking(pair, &theta, &obl.pred, &mut failing)? {
            let mut path: Vec<Label> =
                lts.path_to(t.from).into_iter().map(|k| lts.transitions[k].label.clone()).collect();
            path.push(t.label.clone());
            return Ok(Verdict {
                holds: false,
                witness: Some(Witness { path, transition: i, theta, failing_bp: failing }),
                states_explored: lts.states.len(),
                transitions_checked: checked,
            });
        }
    }
    Ok(Verdict { holds: true, witness: None, states_explored: lts.states.len(), transitions_checked: checked })
}

/// `(N1, N2) ⊨θ pred`.
pub fn sat_pred(pair: (&Net, &Net), theta: &Subst, pred: &Pred) -> Result<bool, EvalError> {
    sat_pred_tracking(pair, theta, pred, &mut None)
}

fn sat_pred_tracking(
    pair: (&Net, &Net),
    theta: &Subst,
    pred: &Pred,
    failing: &mut Option<String>,
) -> Result<bool, EvalError> {
    Ok(match pred {
        Pred::True => true,
        Pred::False => false,
        Pred::Not(p) => !sat_pred_tracking(pair, theta, p, failing)?,
        Pred::Or(a, b) => sat_pred_tracking(pair, theta, a, failing)? || sat_pred_tracking(pair, theta, b, failing)?,
        Pred::And(a, b) => sat_pred_tracking(pair, theta, a, failing)? && sat_pred_tracking(pair, theta, b, failing)?,
        Pred::Forall(x, p) => {
            for l in domain(pair) {
                if !sat_pred_tracking(pair, &theta.prepend(x.clone(), Term::Const(l)), p, failing)? {
                    return Ok(false);
                }
            }
            true
        }
        Pred::Exists(x, p) => {
            for l in domain(pair) {
                if sat_pred_tracking(pair, &theta.prepend(x.clone(), Term::Const(l)), p, failing)? {
                    return Ok(true);
                }
            }
            false
        }
        Pred::Basic(bp) => {
            let v = sat_bp(pair, theta, bp)?;
            if !v && failing.is_none() {
                *failing = Some(subst_basic(bp, theta).to_string());
            }
            v
        }
    })
}

/// Quantifier range: `Loc(N1) ∪ Loc(N2)`.
fn domain(pair: (&Net, &Net)) -> Vec<String> {
    let mut d = loc_set(pair.0);
    d.extend(loc_set(pair.1));
    d.into_iter().collect()
}

fn subst_basic(bp: &Basic, theta: &Subst) -> Basic {
    match bp {
        Basic::Eq(a, b) => Basic::Eq(theta.apply(a), theta.apply(b)),
        Basic::Geq(a, b) => Basic::Geq(theta.apply(a), theta.apply(b)),
        Basic::Test(args, at) => Basic::Test(theta.apply_all(args), theta.apply(at)),
        Basic::TestPrime(args, at) => Basic::TestPrime(theta.apply_all(args), theta.apply(at)),
    }
}

fn ground(t: &Term) -> Result<String, EvalError> {
    match t {
        Term::Const(c) => Ok(c.clone()),
        other => Err(EvalError(format!("`{other}` is not bound when evaluating the obligation"))),
    }
}

fn numeric(t: &Term) -> Result<u128, EvalError> {
    let s = ground(t)?;
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(EvalError(format!("`>=` needs numbers, found `{s}`")));
    }
    s.parse().map_err(|_| EvalError(format!("number `{s}` is too large")))
}

pub fn sat_bp(pair: (&Net, &Net), theta: &Subst, bp: &Basic) -> Result<bool, EvalError> {
    Ok(match subst_basic(bp, theta) {
        Basic::Eq(a, b) => ground(&a)? == ground(&b)?,
        Basic::Geq(a, b) => numeric(&a)? >= numeric(&b)?,
        Basic::Test(args, at) => {
            let args = args.iter().map(ground).collect::<Result<Vec<_>, _>>()?;
            interp_test(&args, &ground(&at)?, pair.0)
        }
        Basic::TestPrime(args, at) => {
            let args = args.iter().map(ground).collect::<Result<Vec<_>, _>>()?;
            interp_test(&args, &ground(&at)?, pair.1)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_net, parse_obligation};

    const TINY: &str = "EHDB :: <Alice, CarePlan, alicetext> || EHDB :: <Bob, PrivateNotes, bobtext>
        || ROLES :: <Doctor, Hansen> || ROLES :: <Nurse, Olsen>
        || Hansen :: read(Bob, PrivateNotes, !content)@EHDB . out(Bob, PrivateNotes, content)@Olsen . 0
        || Olsen :: read(Bob, PrivateNotes, !content)@EHDB . 0";

    fn net() -> Net {
        parse_net(TINY).unwrap()
    }

    #[test]
    fn eq1_fails_without_policies() {
        let obl = parse_obligation("AG [$u : r(_, PrivateNotes, _)@EHDB] test(Doctor, $u)@ROLES").unwrap();
        let v = sat_obl(&net(), &obl, Limits::default()).unwrap();
        assert!(!v.holds);
        let w = v.witness.unwrap();
        assert_eq!(w.path.last().unwrap().to_string(), "Olsen:r(Bob, PrivateNotes, bobtext)@EHDB");
        assert_eq!(w.failing_bp.as_deref(), Some("test(Doctor, Olsen)@ROLES"));
    }

    #[test]
    fn unmatched_capability_is_vacuous() {
        let obl = parse_obligation("AG [$u : i(_, _, _)@EHDB] false").unwrap();
        assert!(sat_obl(&net(), &obl, Limits::default()).unwrap().holds);
    }

    #[test]
    fn sat_pred_basics() {
        let n = net();
        let pair = (&n, &n);
        assert!(sat_pred(pair, &Subst::id(), &Pred::True).unwrap());
        let p = parse_obligation("AG [_ : o()@X] forall $x : $x = $x").unwrap().pred;
        assert!(sat_pred(pair, &Subst::id(), &p).unwrap());
        let p = parse_obligation("AG [_ : o()@X] exists $x : test(Doctor, $x)@ROLES").unwrap().pred;
        assert!(sat_pred(pair, &Subst::id(), &p).unwrap());
        let p = parse_obligation("AG [_ : o()@X] exists $x : test(Doctor, $x)@ROLES and not $x = Hansen").unwrap().pred;
        assert!(!sat_pred(pair, &Subst::id(), &p).unwrap());
    }

    #[test]
    fn test_prime_reads_post_state() {
        let pre = parse_net("A :: <k> || B :: in(k)@A . 0 || A :: <j>").unwrap();
        let post = parse_net("A :: <j> || B :: 0").unwrap();
        let bp = Basic::TestPrime(vec![Term::konst("k")], Term::konst("A"));
        assert!(!sat_bp((&pre, &post), &Subst::id(), &bp).unwrap());
        let bp = Basic::Test(vec![Term::konst("k")], Term::konst("A"));
        assert!(sat_bp((&pre, &post), &Subst::id(), &bp).unwrap());
        assert!(sat_bp((&pre, &post), &Subst::id(), &Basic::Eq(Term::konst("Olsen"), Term::konst("Olsen"))).unwrap());
    }

    #[test]
    fn geq_is_numeric_only() {
        let n = net();
        let ge = |a: &str, b: &str| sat_bp((&n, &n), &Subst::id(), &Basic::Geq(Term::konst(a), Term::konst(b)));
        assert_eq!(ge("10", "9"), Ok(true));
        assert_eq!(ge("9", "10"), Ok(false));
        assert!(ge("ten", "9").is_err());
        let unbound = sat_bp((&n, &n), &Subst::id(), &Basic::Eq(Term::var("$z"), Term::konst("a")));
        assert!(unbound.is_err());
    }

    #[test]
    fn interp_test_per_entry_kind() {
        let only_proc = parse_net("l :: out(a)@l . 0").unwrap();
        assert!(!interp_test(&["a".into()], "l", &only_proc));
        let data = parse_net("l3 :: <a, b>").unwrap();
        assert!(interp_test(&["a".into(), "b".into()], "l3", &data));
        assert!(!interp_test(&["a".into(), "b".into()], "l2", &data));
        assert!(!interp_test(&["a".into()], "l3", &data));
        let both = parse_net("l3 :: <a, b> || l4 :: <c>").unwrap();
        assert!(interp_test(&["c".into()], "l4", &both) && interp_test(&["a".into(), "b".into()], "l3", &both));
    }
}
