//! Reaction semantics: matching, policy evaluation, and the labelled
//! transition system of a network.

use std::cell::Cell;
use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::belnap::Four;
use crate::model::{
    Action, Aspect, Body, Branch, Capability, Cut, Expr, Label, LocatedAction, Net, NetEntry, Policy, Process, Term,
};

/// Ordered variable bindings, applied front to back.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Subst(pub Vec<(String, Term)>);

impl Subst {
    pub fn id() -> Subst {
        Subst(Vec::new())
    }

    pub fn single(var: impl Into<String>, t: Term) -> Subst {
        Subst(vec![(var.into(), t)])
    }

    pub fn is_id(&self) -> bool {
        self.0.is_empty()
    }

    /// `self` followed by `other`.
    pub fn then(mut self, other: Subst) -> Subst {
        self.0.extend(other.0);
        self
    }

    /// Binding placed in front of the existing ones.
    pub fn prepend(&self, var: impl Into<String>, t: Term) -> Subst {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push((var.into(), t));
        v.extend(self.0.iter().cloned());
        Subst(v)
    }

    pub fn apply(&self, t: &Term) -> Term {
        let mut cur = t.clone();
        for (v, s) in &self.0 {
            if matches!(&cur, Term::Var(x) if x == v) {
                cur = s.clone();
            }
        }
        cur
    }

    pub fn apply_all(&self, ts: &[Term]) -> Vec<Term> {
        ts.iter().map(|t| self.apply(t)).collect()
    }

    /// Value of `var` after the whole sequence is applied.
    pub fn lookup(&self, var: &str) -> Option<Term> {
        let t = self.apply(&Term::Var(var.to_owned()));
        (t != Term::Var(var.to_owned())).then_some(t)
    }
}

impl fmt::Display for Subst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("id");
        }
        f.write_str("[")?;
        for (i, (v, t)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v} |-> {t}")?;
        }
        f.write_str("]")
    }
}

impl Serialize for Subst {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for (v, t) in &self.0 {
            seq.serialize_element(&(v, t.to_string()))?;
        }
        seq.end()
    }
}

/// Binders take part in unification as plain variables.
fn unif_view(t: &Term) -> Term {
    match t {
        Term::Bind(u) => Term::Var(u.clone()),
        other => other.clone(),
    }
}

/// Unifies two terms, always binding from the first to the second.
pub fn unify(t1: &Term, t2: &Term) -> Option<Subst> {
    match (unif_view(t1), unif_view(t2)) {
        (Term::Wildcard, _) | (_, Term::Wildcard) => Some(Subst::id()),
        (Term::Const(a), Term::Const(b)) => (a == b).then(Subst::id),
        (Term::Const(l), Term::Var(v)) | (Term::Var(v), Term::Const(l)) => Some(Subst::single(v, Term::Const(l))),
        (Term::Var(a), Term::Var(b)) if a == b => Some(Subst::id()),
        (Term::Var(a), Term::Var(b)) => Some(Subst::single(a, Term::Var(b))),
        _ => unreachable!("binders are viewed as variables"),
    }
}

pub fn unifylist(xs: &[Term], ys: &[Term]) -> Option<Subst> {
    if xs.len() != ys.len() {
        return None;
    }
    let mut theta = Subst::id();
    for (x, y) in xs.iter().zip(ys) {
        let x = theta.apply(&unif_view(x));
        let y = theta.apply(&unif_view(y));
        theta = theta.then(unify(&x, &y)?);
    }
    Some(theta)
}

/// Subject, arguments and target of a cut or an action.
#[derive(Clone, Copy, Debug)]
pub struct Pattern<'a> {
    pub subject: &'a Term,
    pub args: &'a [Term],
    pub target: &'a Term,
}

/// `findsubs cut action`: subjects first, then arguments, then targets,
/// each step seeing the substitution built so far. Capabilities must have
/// been compared by the caller.
pub fn findsubs(cut: Pattern<'_>, act: Pattern<'_>) -> Option<Subst> {
    let th1 = unify(cut.subject, act.subject)?;
    let th2 = unifylist(&apply_view(&th1, cut.args), &apply_view(&th1, act.args))?;
    let th12 = th1.then(th2);
    let th3 = unify(&th12.apply(&unif_view(cut.target)), &th12.apply(&unif_view(act.target)))?;
    Some(th12.then(th3))
}

fn apply_view(th: &Subst, ts: &[Term]) -> Vec<Term> {
    ts.iter().map(|t| th.apply(&unif_view(t))).collect()
}

/// Matches input templates against a tuple.
pub fn match_tuple(templates: &[Term], data: &[String]) -> Option<Subst> {
    if templates.len() != data.len() {
        return None;
    }
    let mut theta = Subst::id();
    for (t, d) in templates.iter().zip(data) {
        match t {
            Term::Const(c) if c == d => {}
            Term::Bind(u) => theta.0.push((u.clone(), Term::Const(d.clone()))),
            _ => return None,
        }
    }
    Some(theta)
}

/// Whether an action matching `a` can occur in `p`.
pub fn occurs_in(a: &Action, p: &Process) -> bool {
    match p {
        Process::Sum(bs) => bs.iter().any(|b| action_matches(a, &b.action) || occurs_in(a, &b.cont)),
        Process::Par(l, r) => occurs_in(a, l) || occurs_in(a, r),
        Process::Repl(body) => occurs_in(a, body),
    }
}

fn action_matches(template: &Action, a: &Action) -> bool {
    if template.cap != a.cap {
        return false;
    }
    let xs: Vec<Term> = template.terms().cloned().collect();
    let ys: Vec<Term> = a.terms().cloned().collect();
    unifylist(&xs, &ys).is_some()
}

/// Literal of an extracted cut or action.
#[derive(Clone, Debug, PartialEq)]
pub enum Literal {
    Term(Term),
    Cap(Capability),
    /// Continuation: a variable name in a cut, a process in an action.
    ContVar(String),
    Cont(Process),
}

pub fn extract_cut(cut: &Cut) -> Vec<Literal> {
    let mut out = vec![Literal::Term(cut.subject.clone()), Literal::Cap(cut.action.cap)];
    out.extend(cut.action.args.iter().cloned().map(Literal::Term));
    out.push(Literal::Term(cut.action.target.clone()));
    out.push(Literal::ContVar(cut.cont_var.clone()));
    out
}

pub fn extract_action(act: &LocatedAction) -> Vec<Literal> {
    let mut out = vec![Literal::Term(Term::Const(act.source.clone())), Literal::Cap(act.action.cap)];
    out.extend(act.action.args.iter().cloned().map(Literal::Term));
    out.push(Literal::Term(act.action.target.clone()));
    out.push(Literal::Cont(act.continuation.clone()));
    out
}

/// Outcome of a successful `check`: the location substitution plus the
/// process bound to the cut's continuation variable.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub theta: Subst,
    pub cont_var: String,
    pub continuation: Process,
}

/// `check(extract(cut); extract(action))`.
pub fn check(cut: &[Literal], act: &[Literal]) -> Option<CheckResult> {
    if cut.len() != act.len() || cut.len() < 4 {
        return None;
    }
    let n = cut.len();
    let (Literal::Cap(c1), Literal::Cap(c2)) = (&cut[1], &act[1]) else { return None };
    if c1 != c2 {
        return None;
    }
    let terms = |lits: &[Literal]| -> Option<Vec<Term>> {
        lits.iter()
            .map(|l| match l {
                Literal::Term(t) => Some(t.clone()),
                _ => None,
            })
            .collect()
    };
    let cut_args = terms(&cut[2..n - 2])?;
    let act_args = terms(&act[2..n - 2])?;
    let (Literal::Term(s1), Literal::Term(s2), Literal::Term(t1), Literal::Term(t2)) =
        (&cut[0], &act[0], &cut[n - 2], &act[n - 2])
    else {
        return None;
    };
    let theta = findsubs(
        Pattern { subject: s1, args: &cut_args, target: t1 },
        Pattern { subject: s2, args: &act_args, target: t2 },
    )?;
    let (Literal::ContVar(x), Literal::Cont(p)) = (&cut[n - 1], &act[n - 1]) else { return None };
    Some(CheckResult { theta, cont_var: x.clone(), continuation: p.clone() })
}

/// Raised when a policy cannot be evaluated, which means it is ill-formed.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("policy evaluation failed: {0}")]
pub struct EvalError(pub String);

/// Presence of the tuple `args` at location `at`.
pub fn interp_test(args: &[String], at: &str, net: &Net) -> bool {
    net.data_entries().any(|(loc, t)| loc == at && t == args)
}

fn ground(t: &Term) -> Result<&str, EvalError> {
    match t {
        Term::Const(c) => Ok(c),
        other => Err(EvalError(format!("`{other}` is not bound to a location"))),
    }
}

/// Meaning of a policy for the trapped action in the current network.
pub fn eval_policy(pol: &Policy, trapped: &LocatedAction, net: &Net) -> Result<Four, EvalError> {
    Ok(match pol {
        Policy::True => Four::True,
        Policy::False => Four::False,
        Policy::Not(p) => eval_policy(p, trapped, net)?.neg(),
        Policy::Combine(op, a, b) => op.apply(eval_policy(a, trapped, net)?, eval_policy(b, trapped, net)?),
        Policy::Aspect(asp) => eval_aspect(asp, trapped, net)?,
    })
}

pub fn eval_aspect(asp: &Aspect, trapped: &LocatedAction, net: &Net) -> Result<Four, EvalError> {
    let Some(found) = check(&extract_cut(&asp.cut), &extract_action(trapped)) else {
        return Ok(Four::Bottom);
    };
    let env = Env { theta: &found.theta, cont_var: &found.cont_var, cont: &found.continuation, net };
    if eval_expr(&asp.cond, &env)? != Four::True {
        return Ok(Four::Bottom);
    }
    eval_expr(&asp.rec, &env)
}

struct Env<'a> {
    theta: &'a Subst,
    cont_var: &'a str,
    cont: &'a Process,
    net: &'a Net,
}

fn eval_expr(e: &Expr, env: &Env<'_>) -> Result<Four, EvalError> {
    Ok(match e {
        Expr::True => Four::True,
        Expr::False => Four::False,
        Expr::Eq(a, b) => {
            let (a, b) = (env.theta.apply(a), env.theta.apply(b));
            Four::from_bool(ground(&a)? == ground(&b)?)
        }
        Expr::Test(args, at) => {
            let args = env
                .theta
                .apply_all(args)
                .iter()
                .map(|t| ground(t).map(str::to_owned))
                .collect::<Result<Vec<_>, _>>()?;
            let at = env.theta.apply(at);
            Four::from_bool(interp_test(&args, ground(&at)?, env.net))
        }
        Expr::OccursIn(a, x) => {
            if x != env.cont_var {
                return Err(EvalError(format!("continuation variable `{x}` is unbound")));
            }
            let a = Action { cap: a.cap, args: env.theta.apply_all(&a.args), target: env.theta.apply(&a.target) };
            Four::from_bool(occurs_in(&a, env.cont))
        }
        Expr::Not(e) => eval_expr(e, env)?.neg(),
        Expr::Combine(op, a, b) => op.apply(eval_expr(a, env)?, eval_expr(b, env)?),
    })
}

/// A reaction, granted or not, with the policy values that decided it.
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub label: Label,
    pub next: Net,
    pub source: String,
    pub action: Action,
    pub source_value: Four,
    pub target_value: Four,
}

impl Candidate {
    /// `pol_s ⊕ pol_t`.
    pub fn value(&self) -> Four {
        self.source_value.join_k(self.target_value)
    }

    pub fn granted(&self) -> bool {
        self.value().grant()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Step {
    pub label: Label,
    pub next: Net,
}

/// Prefixes ready to fire in `p`, each with the parallel remainder.
fn prefixes(p: &Process) -> Vec<(&Branch, Process)> {
    match p {
        Process::Sum(bs) => bs.iter().map(|b| (b, Process::nil())).collect(),
        Process::Par(l, r) => {
            let mut out: Vec<_> =
                prefixes(l).into_iter().map(|(b, rest)| (b, Process::par(rest, (**r).clone()))).collect();
            out.extend(prefixes(r).into_iter().map(|(b, rest)| (b, Process::par((**l).clone(), rest))));
            out
        }
        Process::Repl(body) => prefixes(body).into_iter().map(|(b, rest)| (b, Process::par(rest, p.clone()))).collect(),
    }
}

/// Substitutes ground terms for free process variables, stopping at binders
/// that shadow them.
pub fn subst_process(p: &Process, theta: &Subst) -> Process {
    if theta.is_id() {
        return p.clone();
    }
    match p {
        Process::Sum(bs) => Process::Sum(
            bs.iter()
                .map(|b| {
                    let action = Action {
                        cap: b.action.cap,
                        args: theta.apply_all(&b.action.args),
                        target: theta.apply(&b.action.target),
                    };
                    let binders = b.action.binders();
                    let inner = Subst(theta.0.iter().filter(|(v, _)| !binders.contains(v)).cloned().collect());
                    Branch { action, cont: subst_process(&b.cont, &inner) }
                })
                .collect(),
        ),
        Process::Par(l, r) => Process::par(subst_process(l, theta), subst_process(r, theta)),
        Process::Repl(b) => Process::Repl(Box::new(subst_process(b, theta))),
    }
}

/// Every instance of the reaction rules in `net`, including denied ones.
pub fn candidate_steps(net: &Net) -> Result<Vec<Candidate>, EvalError> {
    let mut out = Vec::new();
    for (i, entry) in net.entries.iter().enumerate() {
        let Body::Proc(p) = &entry.body else { continue };
        for (branch, rest) in prefixes(p) {
            let a = &branch.action;
            let Term::Const(target) = &a.target else { continue };
            let trapped = LocatedAction {
                source: entry.location.clone(),
                policy: entry.policy.clone(),
                action: a.clone(),
                continuation: branch.cont.clone(),
            };
            let residual = |cont: Process| -> Vec<NetEntry> {
                let mut entries = net.entries.clone();
                entries[i] = NetEntry::process(entry.location.clone(), entry.policy.clone(), Process::par(cont, rest.clone()));
                entries
            };
            match a.cap {
                Capability::Read | Capability::In => {
                    for (j, other) in net.entries.iter().enumerate() {
                        let Body::Data(tuple) = &other.body else { continue };
                        if other.location != *target {
                            continue;
                        }
                        let Some(theta) = match_tuple(&a.args, tuple) else { continue };
                        let source_value = eval_policy(&entry.policy, &trapped, net)?;
                        let target_value = eval_policy(&other.policy, &trapped, net)?;
                        let mut entries = residual(subst_process(&branch.cont, &theta));
                        if a.cap == Capability::In {
                            entries.remove(j);
                        }
                        out.push(Candidate {
                            label: Label {
                                subject: entry.location.clone(),
                                cap: a.cap,
                                args: tuple.clone(),
                                target: target.clone(),
                            },
                            next: Net::new(entries).canonicalize(),
                            source: entry.location.clone(),
                            action: a.clone(),
                            source_value,
                            target_value,
                        });
                    }
                }
                Capability::Out => {
                    let Some(args) = a.args.iter().map(|t| t.as_const().map(str::to_owned)).collect::<Option<Vec<_>>>()
                    else {
                        continue;
                    };
                    let Some(pol_t) = net.policy_of(target) else { continue };
                    let source_value = eval_policy(&entry.policy, &trapped, net)?;
                    let target_value = eval_policy(pol_t, &trapped, net)?;
                    let mut entries = residual(branch.cont.clone());
                    entries.push(NetEntry::data(target.clone(), pol_t.clone(), args.clone()));
                    out.push(Candidate {
                        label: Label { subject: entry.location.clone(), cap: a.cap, args, target: target.clone() },
                        next: Net::new(entries).canonicalize(),
                        source: entry.location.clone(),
                        action: a.clone(),
                        source_value,
                        target_value,
                    });
                }
            }
        }
    }
    let mut seen = std::collections::HashSet::new();
    out.retain(|c| seen.insert((c.label.clone(), c.next.clone())));
    Ok(out)
}

/// Granted reactions of a canonical network.
pub fn enabled_steps(net: &Net) -> Result<Vec<Step>, EvalError> {
    Ok(candidate_steps(net)?
        .into_iter()
        .filter(Candidate::granted)
        .map(|c| Step { label: c.label, next: c.next })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Limits {
    pub max_states: usize,
    pub max_depth: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_states: 100_000, max_depth: 10_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("the network uses replication `*`, so its state space is infinite; remove it before checking")]
    ReplicationPresent,
    #[error("state limit of {0} exceeded")]
    StateLimit(usize),
    #[error("depth limit of {0} exceeded")]
    DepthLimit(usize),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Transition {
    pub from: usize,
    pub to: usize,
    pub label: Label,
}

/// A finite labelled transition system. State 0 is the initial network.
#[derive(Clone, Debug)]
pub struct Lts {
    pub states: Vec<Net>,
    pub transitions: Vec<Transition>,
    /// Transition through which each state was first reached.
    pub parent: Vec<Option<usize>>,
}

thread_local! {
    static STATES_BUILT: Cell<u64> = const { Cell::new(0) };
}

/// Number of LTS states constructed on this thread so far.
pub fn states_built() -> u64 {
    STATES_BUILT.with(Cell::get)
}

pub fn reset_states_built() {
    STATES_BUILT.with(|c| c.set(0));
}

/// Breadth-first construction of the LTS of a replication-free network.
pub fn build_lts(net: &Net, limits: Limits) -> Result<Lts, SemanticsError> {
    if net.contains_replication() {
        return Err(SemanticsError::ReplicationPresent);
    }
    let init = net.canonicalize();
    let mut index: HashMap<Net, usize> = HashMap::new();
    let mut lts = Lts { states: vec![init.clone()], transitions: Vec::new(), parent: vec![None] };
    let mut depth = vec![0usize];
    index.insert(init, 0);
    STATES_BUILT.with(|c| c.set(c.get() + 1));
    let mut queue = VecDeque::from([0usize]);
    while let Some(s) = queue.pop_front() {
        let steps = enabled_steps(&lts.states[s])?;
        if !steps.is_empty() && depth[s] >= limits.max_depth {
            return Err(SemanticsError::DepthLimit(limits.max_depth));
        }
        for step in steps {
            let to = match index.get(&step.next) {
                Some(&t) => t,
                None => {
                    if lts.states.len() >= limits.max_states {
                        return Err(SemanticsError::StateLimit(limits.max_states));
                    }
                    let t = lts.states.len();
                    index.insert(step.next.clone(), t);
                    lts.states.push(step.next);
                    lts.parent.push(Some(lts.transitions.len()));
                    depth.push(depth[s] + 1);
                    STATES_BUILT.with(|c| c.set(c.get() + 1));
                    queue.push_back(t);
                    t
                }
            };
            lts.transitions.push(Transition { from: s, to, label: step.label });
        }
    }
    Ok(lts)
}

impl Lts {
    pub fn outgoing(&self, s: usize) -> impl Iterator<Item = (usize, &Transition)> {
        self.transitions.iter().enumerate().filter(move |(_, t)| t.from == s)
    }

    /// States without outgoing transitions.
    pub fn final_states(&self) -> Vec<usize> {
        let mut has_out = vec![false; self.states.len()];
        for t in &self.transitions {
            has_out[t.from] = true;
        }
        (0..self.states.len()).filter(|&s| !has_out[s]).collect()
    }

    /// Transitions on the BFS path from the initial state to `s`.
    pub fn path_to(&self, mut s: usize) -> Vec<usize> {
        let mut path = Vec::new();
        while let Some(t) = self.parent[s] {
            path.push(t);
            s = self.transitions[t].from;
        }
        path.reverse();
        path
    }

    /// Maximal paths from the initial state as transition indices, stopping
    /// after `cap` paths. Terminates because replication-free systems are
    /// acyclic: every step consumes one action prefix.
    pub fn maximal_paths(&self, cap: usize) -> Vec<Vec<usize>> {
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); self.states.len()];
        for (i, t) in self.transitions.iter().enumerate() {
            succ[t.from].push(i);
        }
        let mut out = Vec::new();
        let mut stack: Vec<(usize, Vec<usize>)> = vec![(0, Vec::new())];
        while let Some((s, path)) = stack.pop() {
            if out.len() >= cap {
                break;
            }
            if succ[s].is_empty() {
                out.push(path);
                continue;
            }
            for &t in succ[s].iter().rev() {
                let mut p = path.clone();
                p.push(t);
                stack.push((self.transitions[t].to, p));
            }
        }
        out
    }
}

/// Follows `labels` from `net`; returns the networks reachable by exactly
/// that label sequence.
pub fn replay(net: &Net, labels: &[Label]) -> Result<Vec<Net>, EvalError> {
    let mut current = vec![net.canonicalize()];
    for l in labels {
        let mut next = Vec::new();
        for n in &current {
            for s in enabled_steps(n)? {
                if s.label == *l && !next.contains(&s.next) {
                    next.push(s.next);
                }
            }
        }
        current = next;
    }
    Ok(current)
}
