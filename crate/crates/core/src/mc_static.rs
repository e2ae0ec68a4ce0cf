//! Static certification: checks an obligation action by action, without
//! building the transition system.
//!
//! Every action that can match the obligation cut is either shown to be
//! denied by the policies involved, or the obligation predicate is shown to
//! follow from what a granting policy must have established. Anything else
//! is reported as not certified, which means "unknown", not "violated".

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::belnap::{Connective, Four};
use crate::model::{
    loc_set, take_actions, Action, Aspect, Basic, Capability, Expr, LocatedAction, Net, Obligation, Policy, Pred,
    Term,
};
use crate::semantics::{
    check, extract_action, extract_cut, findsubs, interp_test, occurs_in, subst_process, unifylist, Pattern,
    SemanticsError, Subst,
};

/// A set of Belnap values, used as an abstract policy value.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct FourSet(u8);

fn bit(v: Four) -> u8 {
    1 << Four::ALL.iter().position(|x| *x == v).expect("four values")
}

impl FourSet {
    pub const EMPTY: FourSet = FourSet(0);

    pub fn of(v: Four) -> FourSet {
        FourSet(bit(v))
    }

    pub fn all() -> FourSet {
        FourSet(0b1111)
    }

    pub fn boolean() -> FourSet {
        FourSet(bit(Four::True) | bit(Four::False))
    }

    pub fn contains(self, v: Four) -> bool {
        self.0 & bit(v) != 0
    }

    pub fn insert(&mut self, v: Four) {
        self.0 |= bit(v);
    }

    pub fn union(self, other: FourSet) -> FourSet {
        FourSet(self.0 | other.0)
    }

    pub fn iter(self) -> impl Iterator<Item = Four> {
        Four::ALL.into_iter().filter(move |v| self.contains(*v))
    }

    pub fn map(self, f: impl Fn(Four) -> Four) -> FourSet {
        let mut out = FourSet::EMPTY;
        for v in self.iter() {
            out.insert(f(v));
        }
        out
    }

    pub fn lift(op: Connective, a: FourSet, b: FourSet) -> FourSet {
        let mut out = FourSet::EMPTY;
        for x in a.iter() {
            for y in b.iter() {
                out.insert(op.apply(x, y));
            }
        }
        out
    }

    /// Some value in the set is granted.
    pub fn can_grant(self) -> bool {
        self.iter().any(Four::grant)
    }
}

impl fmt::Debug for FourSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FourSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.iter().map(Four::symbol).collect();
        write!(f, "{{{}}}", names.join(", "))
    }
}

impl Serialize for FourSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter().map(Four::symbol))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    CertifiedIrrelevant,
    CertifiedDenied,
    CertifiedByEntailment,
    NotCertified,
}

impl Outcome {
    pub fn is_certified(self) -> bool {
        self != Outcome::NotCertified
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::CertifiedIrrelevant => "certified_irrelevant",
            Outcome::CertifiedDenied => "certified_denied",
            Outcome::CertifiedByEntailment => "certified_by_entailment",
            Outcome::NotCertified => "not_certified",
        }
    }
}

/// Result of the policy analysis for one action.
#[derive(Clone, Debug, PartialEq)]
pub struct MightGrant {
    pub can_grant: bool,
    pub values: FourSet,
    /// Recommendations that hold whenever the policy grants the action.
    pub constraints: Vec<Expr>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ActionReport {
    pub action: LocatedAction,
    pub outcome: Outcome,
    pub theta0: Option<Subst>,
    pub constraints: Vec<Expr>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StaticVerdict {
    pub certified: bool,
    pub per_action: Vec<ActionReport>,
}

/// Kleene truth values for the entailment check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tri {
    True,
    False,
    Unknown,
}

impl Tri {
    fn from_bool(b: bool) -> Tri {
        if b {
            Tri::True
        } else {
            Tri::False
        }
    }

    fn not(self) -> Tri {
        match self {
            Tri::True => Tri::False,
            Tri::False => Tri::True,
            Tri::Unknown => Tri::Unknown,
        }
    }

    fn and(self, o: Tri) -> Tri {
        match (self, o) {
            (Tri::False, _) | (_, Tri::False) => Tri::False,
            (Tri::True, Tri::True) => Tri::True,
            _ => Tri::Unknown,
        }
    }

    fn or(self, o: Tri) -> Tri {
        self.not().and(o.not()).not()
    }
}

/// What is known about the initial network that holds in every reachable
/// state.
pub struct Analysis<'a> {
    net: &'a Net,
    actions: Vec<LocatedAction>,
    constants: BTreeSet<String>,
}

impl<'a> Analysis<'a> {
    pub fn new(net: &'a Net) -> Self {
        Analysis { net, actions: take_actions(net), constants: loc_set(net) }
    }

    /// `Some(true)` if the tuple is present in every reachable state,
    /// `Some(false)` if absent in every reachable state.
    pub fn stability(&self, args: &[String], at: &str) -> Option<bool> {
        let mut probe: Vec<Term> = args.iter().cloned().map(Term::Const).collect();
        probe.push(Term::Const(at.to_owned()));
        let touches = |cap: Capability| {
            self.actions.iter().any(|a| {
                a.action.cap == cap && {
                    let terms: Vec<Term> = a.action.terms().cloned().collect();
                    unifylist(&probe, &terms).is_some()
                }
            })
        };
        if interp_test(args, at, self.net) {
            (!touches(Capability::In)).then_some(true)
        } else {
            (!touches(Capability::Out)).then_some(false)
        }
    }

    fn test_value(&self, args: &[Term], at: &Term) -> Option<bool> {
        let args: Option<Vec<String>> = args.iter().map(|t| t.as_const().map(str::to_owned)).collect();
        self.stability(&args?, at.as_const()?)
    }
}

fn is_process_var(v: &str) -> bool {
    !v.starts_with('#') && !v.starts_with('$')
}

struct Matched {
    theta: Subst,
    cont_var: String,
    /// The match depends on runtime values of free process variables.
    conditional: bool,
}

fn match_aspect(asp: &Aspect, act: &LocatedAction) -> Option<Matched> {
    let found = check(&extract_cut(&asp.cut), &extract_action(act))?;
    let binders = act.action.binders();
    let conditional = found.theta.0.iter().any(|(k, _)| is_process_var(k) && !binders.contains(k));
    Some(Matched { theta: found.theta, cont_var: found.cont_var, conditional })
}

struct ExprEnv<'a> {
    theta: &'a Subst,
    cont_var: &'a str,
    act: &'a LocatedAction,
}

impl Analysis<'_> {
    fn abs_policy(&self, pol: &Policy, act: &LocatedAction) -> FourSet {
        match pol {
            Policy::True => FourSet::of(Four::True),
            Policy::False => FourSet::of(Four::False),
            Policy::Not(p) => self.abs_policy(p, act).map(Four::neg),
            Policy::Combine(op, a, b) => FourSet::lift(*op, self.abs_policy(a, act), self.abs_policy(b, act)),
            Policy::Aspect(asp) => self.abs_aspect(asp, act),
        }
    }

    fn abs_aspect(&self, asp: &Aspect, act: &LocatedAction) -> FourSet {
        let Some(m) = match_aspect(asp, act) else { return FourSet::of(Four::Bottom) };
        let env = ExprEnv { theta: &m.theta, cont_var: &m.cont_var, act };
        let mut out = FourSet::EMPTY;
        if m.conditional {
            out.insert(Four::Bottom);
        }
        let cond = self.abs_expr(&asp.cond, &env);
        if cond.iter().any(|v| v != Four::True) {
            out.insert(Four::Bottom);
        }
        if cond.contains(Four::True) {
            out = out.union(self.abs_expr(&asp.rec, &env));
        }
        out
    }

    fn abs_expr(&self, e: &Expr, env: &ExprEnv<'_>) -> FourSet {
        match e {
            Expr::True => FourSet::of(Four::True),
            Expr::False => FourSet::of(Four::False),
            Expr::Eq(a, b) => {
                let (a, b) = (env.theta.apply(a), env.theta.apply(b));
                match (&a, &b) {
                    (Term::Const(x), Term::Const(y)) => FourSet::of(Four::from_bool(x == y)),
                    _ if a == b => FourSet::of(Four::True),
                    _ => FourSet::boolean(),
                }
            }
            Expr::Test(args, at) => {
                match self.test_value(&env.theta.apply_all(args), &env.theta.apply(at)) {
                    Some(b) => FourSet::of(Four::from_bool(b)),
                    None => FourSet::boolean(),
                }
            }
            Expr::OccursIn(a, x) => {
                if x != env.cont_var {
                    return FourSet::all();
                }
                let template =
                    Action { cap: a.cap, args: env.theta.apply_all(&a.args), target: env.theta.apply(&a.target) };
                if !occurs_in(&template, &env.act.continuation) {
                    return FourSet::of(Four::False);
                }
                let binders = env.act.action.binders();
                let stable = template.terms().all(|t| match t {
                    Term::Var(v) => !is_process_var(v) || binders.contains(v),
                    _ => true,
                }) && env.act.continuation.free_vars().is_subset(&binders);
                if stable {
                    FourSet::of(Four::True)
                } else {
                    FourSet::boolean()
                }
            }
            Expr::Not(e) => self.abs_expr(e, env).map(Four::neg),
            Expr::Combine(op, a, b) => FourSet::lift(*op, self.abs_expr(a, env), self.abs_expr(b, env)),
        }
    }

    /// Formulas that hold in the pre-state whenever `pol` grants `act`.
    fn granted_facts(&self, pol: &Policy, act: &LocatedAction, out: &mut Vec<Expr>) {
        match pol {
            Policy::Aspect(asp) => {
                let Some(m) = match_aspect(asp, act) else { return };
                if m.conditional {
                    return;
                }
                let env = ExprEnv { theta: &m.theta, cont_var: &m.cont_var, act };
                if self.abs_expr(&asp.cond, &env) == FourSet::of(Four::True) {
                    rec_facts(&asp.rec, &m.theta, &act.action.binders(), out);
                }
            }
            Policy::Combine(op, a, b) => {
                if op.grant_forces_left() {
                    self.granted_facts(a, act, out);
                }
                if op.grant_forces_right() {
                    self.granted_facts(b, act, out);
                }
            }
            Policy::True | Policy::False | Policy::Not(_) => {}
        }
    }
}

fn subst_expr(e: &Expr, th: &Subst) -> Expr {
    match e {
        Expr::True | Expr::False => e.clone(),
        Expr::Eq(a, b) => Expr::Eq(th.apply(a), th.apply(b)),
        Expr::Test(args, at) => Expr::Test(th.apply_all(args), th.apply(at)),
        Expr::OccursIn(a, x) => {
            Expr::OccursIn(Action { cap: a.cap, args: th.apply_all(&a.args), target: th.apply(&a.target) }, x.clone())
        }
        Expr::Not(e) => Expr::not(subst_expr(e, th)),
        Expr::Combine(op, a, b) => Expr::combine(*op, subst_expr(a, th), subst_expr(b, th)),
    }
}

/// Facts implied by `rec θ` evaluating to a granted value.
fn rec_facts(rec: &Expr, th: &Subst, binders: &BTreeSet<String>, out: &mut Vec<Expr>) {
    if rec.is_classical() {
        let e = subst_expr(rec, th);
        if fact_terms_ok(&e, binders) && to_pred(&e).is_some() && !out.contains(&e) {
            out.push(e);
        }
    }
    if let Expr::Combine(op, a, b) = rec {
        if op.grant_forces_left() {
            rec_facts(a, th, binders, out);
        }
        if op.grant_forces_right() {
            rec_facts(b, th, binders, out);
        }
    }
}

/// Terms of a fact must denote the same location at runtime as in the
/// analysis: constants, or free process variables of the action.
fn fact_terms_ok(e: &Expr, binders: &BTreeSet<String>) -> bool {
    let mut terms = Vec::new();
    e.terms(&mut terms);
    terms.iter().all(|t| match t {
        Term::Const(_) => true,
        Term::Var(v) => is_process_var(v) && !binders.contains(v),
        _ => false,
    })
}

/// A classical recommendation as an obligation predicate.
pub fn to_pred(e: &Expr) -> Option<Pred> {
    Some(match e {
        Expr::True => Pred::True,
        Expr::False => Pred::False,
        Expr::Eq(a, b) => Pred::Basic(Basic::Eq(a.clone(), b.clone())),
        Expr::Test(args, at) => Pred::Basic(Basic::Test(args.clone(), at.clone())),
        Expr::OccursIn(..) => return None,
        Expr::Not(e) => Pred::not(to_pred(e)?),
        Expr::Combine(Connective::And, a, b) => Pred::and(to_pred(a)?, to_pred(b)?),
        Expr::Combine(Connective::Or, a, b) => Pred::or(to_pred(a)?, to_pred(b)?),
        Expr::Combine(Connective::Implies, a, b) => Pred::or(Pred::not(to_pred(a)?), to_pred(b)?),
        Expr::Combine(..) => return None,
    })
}

/// Structural equality up to commutativity of `and` and `or`.
fn equiv(a: &Pred, b: &Pred) -> bool {
    match (a, b) {
        (Pred::And(a1, b1), Pred::And(a2, b2)) | (Pred::Or(a1, b1), Pred::Or(a2, b2)) => {
            (equiv(a1, a2) && equiv(b1, b2)) || (equiv(a1, b2) && equiv(b1, a2))
        }
        (Pred::Not(x), Pred::Not(y)) => equiv(x, y),
        (Pred::Forall(x, p), Pred::Forall(y, q)) | (Pred::Exists(x, p), Pred::Exists(y, q)) => x == y && equiv(p, q),
        _ => a == b,
    }
}

/// Applies `th` to the free variables of `p`.
pub fn subst_pred(p: &Pred, th: &Subst) -> Pred {
    match p {
        Pred::True | Pred::False => p.clone(),
        Pred::Not(q) => Pred::not(subst_pred(q, th)),
        Pred::And(a, b) => Pred::and(subst_pred(a, th), subst_pred(b, th)),
        Pred::Or(a, b) => Pred::or(subst_pred(a, th), subst_pred(b, th)),
        Pred::Forall(x, q) | Pred::Exists(x, q) => {
            let inner = Subst(th.0.iter().filter(|(v, _)| v != x).cloned().collect());
            let body = Box::new(subst_pred(q, &inner));
            if matches!(p, Pred::Forall(..)) {
                Pred::Forall(x.clone(), body)
            } else {
                Pred::Exists(x.clone(), body)
            }
        }
        Pred::Basic(bp) => Pred::Basic(match bp {
            Basic::Eq(a, b) => Basic::Eq(th.apply(a), th.apply(b)),
            Basic::Geq(a, b) => Basic::Geq(th.apply(a), th.apply(b)),
            Basic::Test(args, at) => Basic::Test(th.apply_all(args), th.apply(at)),
            Basic::TestPrime(args, at) => Basic::TestPrime(th.apply_all(args), th.apply(at)),
        }),
    }
}

fn numeric(t: &Term) -> Option<u128> {
    let s = t.as_const()?;
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

struct Entail<'a> {
    analysis: &'a Analysis<'a>,
    facts: &'a [Pred],
    /// Constants certainly in the quantifier range of every matching transition.
    guaranteed: BTreeSet<String>,
}

impl Entail<'_> {
    fn eval(&self, p: &Pred) -> Tri {
        if self.facts.iter().any(|f| equiv(f, p)) {
            return Tri::True;
        }
        match p {
            Pred::True => Tri::True,
            Pred::False => Tri::False,
            Pred::Not(q) => self.eval(q).not(),
            Pred::And(a, b) => self.eval(a).and(self.eval(b)),
            Pred::Or(a, b) => self.eval(a).or(self.eval(b)),
            Pred::Forall(x, q) | Pred::Exists(x, q) => {
                let universal = matches!(p, Pred::Forall(..));
                let mut any_unknown = false;
                // Decisive values only count for constants surely in range;
                // the rest of the superset can only make the result unknown.
                let decisive = if universal { Tri::False } else { Tri::True };
                for l in &self.analysis.constants {
                    let v = self.eval(&subst_pred(q, &Subst::single(x.clone(), Term::Const(l.clone()))));
                    if v == decisive {
                        if self.guaranteed.contains(l) {
                            return decisive;
                        }
                        any_unknown = true;
                    } else if v == Tri::Unknown {
                        any_unknown = true;
                    }
                }
                if any_unknown {
                    Tri::Unknown
                } else {
                    decisive.not()
                }
            }
            Pred::Basic(bp) => match bp {
                Basic::Eq(a, b) => match (a, b) {
                    (Term::Const(x), Term::Const(y)) => Tri::from_bool(x == y),
                    _ if a == b => Tri::True,
                    _ => Tri::Unknown,
                },
                Basic::Geq(a, b) => match (numeric(a), numeric(b)) {
                    (Some(x), Some(y)) => Tri::from_bool(x >= y),
                    _ => Tri::Unknown,
                },
                // post-states are reachable too, so stability covers both
                Basic::Test(args, at) | Basic::TestPrime(args, at) => match self.analysis.test_value(args, at) {
                    Some(b) => Tri::from_bool(b),
                    None => Tri::Unknown,
                },
            },
        }
    }
}

/// Policy analysis of `pol` for the action `act` in `net`.
pub fn might_grant(pol: &Policy, act: &LocatedAction, net: &Net) -> MightGrant {
    let analysis = Analysis::new(net);
    might_grant_in(&analysis, pol, act)
}

fn might_grant_in(analysis: &Analysis<'_>, pol: &Policy, act: &LocatedAction) -> MightGrant {
    let values = analysis.abs_policy(pol, act);
    let mut constraints = Vec::new();
    analysis.granted_facts(pol, act, &mut constraints);
    MightGrant { can_grant: values.can_grant(), values, constraints }
}

/// The action instance relevant to the obligation: free variables fixed
/// by θ0 are replaced, binders of the action itself are left alone.
fn instantiate(act: &LocatedAction, theta0: &Subst) -> LocatedAction {
    let binders = act.action.binders();
    let mut free: BTreeSet<String> = act.continuation.free_vars();
    for t in act.action.terms() {
        if let Term::Var(v) = t {
            free.insert(v.clone());
        }
    }
    let fixed = Subst(
        free.into_iter()
            .filter(|v| is_process_var(v) && !binders.contains(v))
            .filter_map(|v| {
                let val = theta0.lookup(&v)?;
                match &val {
                    Term::Const(_) => Some((v, val)),
                    Term::Var(w) if is_process_var(w) && !binders.contains(w) => Some((v, val)),
                    _ => None,
                }
            })
            .collect(),
    );
    let apply = |t: &Term| match t {
        Term::Var(_) => fixed.apply(t),
        other => other.clone(),
    };
    let action = Action {
        cap: act.action.cap,
        args: act.action.args.iter().map(apply).collect(),
        target: apply(&act.action.target),
    };
    let binders_removed = Subst(fixed.0.iter().filter(|(v, _)| !binders.contains(v)).cloned().collect());
    LocatedAction {
        source: act.source.clone(),
        policy: act.policy.clone(),
        action,
        continuation: subst_process(&act.continuation, &binders_removed),
    }
}

pub fn check_single_action(obl: &Obligation, net: &Net, act: &LocatedAction) -> ActionReport {
    check_single_in(&Analysis::new(net), obl, act)
}

fn check_single_in(analysis: &Analysis<'_>, obl: &Obligation, act: &LocatedAction) -> ActionReport {
    let report = |outcome, theta0, constraints, note: Option<String>| ActionReport {
        action: act.clone(),
        outcome,
        theta0,
        constraints,
        note,
    };
    let theta0 = if obl.cut.cap == act.action.cap {
        findsubs(
            Pattern { subject: &obl.cut.subject, args: &obl.cut.args, target: &Term::Const(obl.cut.target.clone()) },
            Pattern { subject: &Term::Const(act.source.clone()), args: &act.action.args, target: &act.action.target },
        )
    } else {
        None
    };
    let Some(theta0) = theta0 else {
        return report(Outcome::CertifiedIrrelevant, None, Vec::new(), None);
    };
    let act0 = instantiate(act, &theta0);
    let Term::Const(target) = &act0.action.target else {
        return report(
            Outcome::NotCertified,
            Some(theta0),
            Vec::new(),
            Some("the action target is not a constant, so its policy is unknown".into()),
        );
    };
    let Some(pol_t) = analysis.net.policy_of(target) else {
        return report(
            Outcome::CertifiedDenied,
            Some(theta0),
            Vec::new(),
            Some(format!("location `{target}` does not exist in any reachable state")),
        );
    };
    let src = might_grant_in(analysis, &act.policy, &act0);
    let tgt = might_grant_in(analysis, pol_t, &act0);
    let combined = FourSet::lift(Connective::Oplus, src.values, tgt.values);
    if !combined.can_grant() {
        return report(
            Outcome::CertifiedDenied,
            Some(theta0),
            Vec::new(),
            Some(format!("source policy gives {}, target policy gives {}", src.values, tgt.values)),
        );
    }
    let mut constraints = src.constraints;
    for c in tgt.constraints {
        if !constraints.contains(&c) {
            constraints.push(c);
        }
    }
    let facts: Vec<Pred> = constraints.iter().filter_map(to_pred).collect();
    let mut guaranteed: BTreeSet<String> = BTreeSet::new();
    for (loc, tuple) in analysis.net.data_entries() {
        if analysis.stability(tuple, loc) == Some(true) {
            guaranteed.insert(loc.to_owned());
            guaranteed.extend(tuple.iter().cloned());
        }
    }
    guaranteed.insert(act0.source.clone());
    for t in act0.action.terms() {
        if let Term::Const(c) = t {
            guaranteed.insert(c.clone());
        }
    }
    let entail = Entail { analysis, facts: &facts, guaranteed };
    let pred0 = subst_pred(&obl.pred, &theta0);
    match entail.eval(&pred0) {
        Tri::True => report(Outcome::CertifiedByEntailment, Some(theta0), constraints, None),
        other => report(
            Outcome::NotCertified,
            Some(theta0),
            constraints,
            Some(if other == Tri::False {
                format!("predicate `{pred0}` is false whenever this action runs")
            } else {
                format!("predicate `{pred0}` does not follow from the policies")
            }),
        ),
    }
}

/// Certifies `obl` for `net` by checking every action occurring in it.
pub fn check_network(net: &Net, obl: &Obligation) -> Result<StaticVerdict, SemanticsError> {
    if net.contains_replication() {
        return Err(SemanticsError::ReplicationPresent);
    }
    let analysis = Analysis::new(net);
    let per_action: Vec<ActionReport> =
        analysis.actions.iter().map(|a| check_single_in(&analysis, obl, a)).collect();
    let certified = per_action.iter().all(|r| r.outcome.is_certified());
    Ok(StaticVerdict { certified, per_action })
}
