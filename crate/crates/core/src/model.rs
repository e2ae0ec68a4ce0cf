//! Abstract syntax of networks, policies and obligations, together with the
//! canonical form used to decide structural congruence.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::belnap::Connective;
use crate::diag::Diagnostic;

/// A location-valued term.
///
/// Variable names keep their sigil: aspect variables are spelled `#u`,
/// obligation variables `$u`, and process variables carry no sigil.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Term {
    Const(String),
    Var(String),
    /// `!u`: binds `u` when an input pattern is matched against a tuple.
    Bind(String),
    /// `_`: only inside cuts and obligation labels.
    Wildcard,
}

impl Term {
    pub fn konst(name: impl Into<String>) -> Term {
        Term::Const(name.into())
    }

    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn as_const(&self) -> Option<&str> {
        match self {
            Term::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_const(&self) -> bool {
        matches!(self, Term::Const(_))
    }

    /// Variable name for `Var` and `Bind`.
    pub fn var_name(&self) -> Option<&str> {
        match self {
            Term::Var(v) | Term::Bind(v) => Some(v),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Capability {
    Out,
    In,
    Read,
}

impl Capability {
    pub const ALL: [Capability; 3] = [Capability::Out, Capability::In, Capability::Read];

    pub fn keyword(self) -> &'static str {
        match self {
            Capability::Out => "out",
            Capability::In => "in",
            Capability::Read => "read",
        }
    }

    /// Single-letter form used in transition labels.
    pub fn letter(self) -> char {
        match self {
            Capability::Out => 'o',
            Capability::In => 'i',
            Capability::Read => 'r',
        }
    }

    pub fn from_letter(c: &str) -> Option<Capability> {
        match c {
            "o" => Some(Capability::Out),
            "i" => Some(Capability::In),
            "r" => Some(Capability::Read),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Action {
    pub cap: Capability,
    pub args: Vec<Term>,
    pub target: Term,
}

impl Action {
    pub fn new(cap: Capability, args: Vec<Term>, target: Term) -> Self {
        Action { cap, args, target }
    }

    /// Names bound by `!u` arguments of this action.
    pub fn binders(&self) -> BTreeSet<String> {
        self.args.iter().filter_map(|t| match t {
            Term::Bind(u) => Some(u.clone()),
            _ => None,
        })
        .collect()
    }

    pub fn terms(&self) -> impl Iterator<Item = &Term> {
        self.args.iter().chain(std::iter::once(&self.target))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Branch {
    pub action: Action,
    pub cont: Process,
}

/// Processes. `Sum(vec![])` is the inactive process `0`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Process {
    Sum(Vec<Branch>),
    Par(Box<Process>, Box<Process>),
    Repl(Box<Process>),
}

impl Process {
    pub fn nil() -> Process {
        Process::Sum(Vec::new())
    }

    pub fn is_nil(&self) -> bool {
        matches!(self, Process::Sum(b) if b.is_empty())
    }

    pub fn prefix(action: Action, cont: Process) -> Process {
        Process::Sum(vec![Branch { action, cont }])
    }

    pub fn par(left: Process, right: Process) -> Process {
        Process::Par(Box::new(left), Box::new(right))
    }

    /// Components of nested `|`, left to right.
    pub fn par_components(&self) -> Vec<&Process> {
        let mut out = Vec::new();
        fn walk<'a>(p: &'a Process, out: &mut Vec<&'a Process>) {
            match p {
                Process::Par(l, r) => {
                    walk(l, out);
                    walk(r, out);
                }
                other => out.push(other),
            }
        }
        walk(self, &mut out);
        out
    }

    pub fn contains_replication(&self) -> bool {
        self.replication_count() > 0
    }

    pub fn replication_count(&self) -> usize {
        match self {
            Process::Sum(bs) => bs.iter().map(|b| b.cont.replication_count()).sum(),
            Process::Par(l, r) => l.replication_count() + r.replication_count(),
            Process::Repl(b) => 1 + b.replication_count(),
        }
    }

    /// Variables occurring free, i.e. not bound by an enclosing `!u`.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&BTreeSet::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &BTreeSet<String>, out: &mut BTreeSet<String>) {
        match self {
            Process::Sum(bs) => {
                for b in bs {
                    for t in b.action.terms() {
                        if let Term::Var(v) = t {
                            if !bound.contains(v) {
                                out.insert(v.clone());
                            }
                        }
                    }
                    let binders = b.action.binders();
                    if binders.is_empty() {
                        b.cont.collect_free(bound, out);
                    } else {
                        let inner: BTreeSet<String> = bound.union(&binders).cloned().collect();
                        b.cont.collect_free(&inner, out);
                    }
                }
            }
            Process::Par(l, r) => {
                l.collect_free(bound, out);
                r.collect_free(bound, out);
            }
            Process::Repl(b) => b.collect_free(bound, out),
        }
    }

    /// Constants occurring in the actions of this process.
    pub fn constants(&self, out: &mut BTreeSet<String>) {
        match self {
            Process::Sum(bs) => {
                for b in bs {
                    for t in b.action.terms() {
                        if let Term::Const(c) = t {
                            out.insert(c.clone());
                        }
                    }
                    b.cont.constants(out);
                }
            }
            Process::Par(l, r) => {
                l.constants(out);
                r.constants(out);
            }
            Process::Repl(b) => b.constants(out),
        }
    }

    pub fn canonical(&self) -> Process {
        match self {
            Process::Sum(bs) => {
                let mut branches: Vec<Branch> = bs
                    .iter()
                    .map(|b| Branch { action: b.action.clone(), cont: b.cont.canonical() })
                    .collect();
                branches.sort();
                Process::Sum(branches)
            }
            Process::Par(..) => {
                let mut parts: Vec<Process> = self
                    .par_components()
                    .into_iter()
                    .map(Process::canonical)
                    .flat_map(|p| p.par_components().into_iter().cloned().collect::<Vec<_>>())
                    .filter(|p| !p.is_nil())
                    .collect();
                parts.sort();
                let mut it = parts.into_iter().rev();
                match it.next() {
                    None => Process::nil(),
                    Some(last) => it.fold(last, |acc, p| Process::par(p, acc)),
                }
            }
            Process::Repl(b) => Process::Repl(Box::new(b.canonical())),
        }
    }
}

/// What a located entry holds.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Body {
    Data(Vec<String>),
    Proc(Process),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct NetEntry {
    pub location: String,
    pub body: Body,
    pub policy: Policy,
}

impl NetEntry {
    pub fn data(location: impl Into<String>, policy: Policy, tuple: Vec<String>) -> Self {
        NetEntry { location: location.into(), body: Body::Data(tuple), policy }
    }

    pub fn process(location: impl Into<String>, policy: Policy, p: Process) -> Self {
        NetEntry { location: location.into(), body: Body::Proc(p), policy }
    }

    pub fn is_nil(&self) -> bool {
        matches!(&self.body, Body::Proc(p) if p.is_nil())
    }
}

/// A network: a multiset of located entries joined by `||`.
///
/// Entries are kept in insertion order until [`Net::canonicalize`] is applied.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Net {
    pub entries: Vec<NetEntry>,
}

impl Net {
    pub fn new(entries: Vec<NetEntry>) -> Self {
        Net { entries }
    }

    /// Canonical representative of the structural-congruence class.
    ///
    /// Process entries are split at top-level `|` and every process is
    /// normalised. An inactive entry `l :: 0` is absorbed when `l` hosts some
    /// other entry; a location whose processes have all terminated keeps a
    /// single `l :: 0` so that it stays addressable. Entries end up sorted.
    pub fn canonicalize(&self) -> Net {
        let mut live = Vec::new();
        let mut idle = Vec::new();
        for e in &self.entries {
            match &e.body {
                Body::Data(_) => live.push(e.clone()),
                Body::Proc(p) => {
                    let canon = p.canonical();
                    for part in canon.par_components() {
                        let entry = NetEntry::process(e.location.clone(), e.policy.clone(), part.clone());
                        if part.is_nil() {
                            idle.push(entry);
                        } else {
                            live.push(entry);
                        }
                    }
                }
            }
        }
        let occupied: BTreeSet<&str> = live.iter().map(|e| e.location.as_str()).collect();
        let mut placeholders: Vec<NetEntry> =
            idle.into_iter().filter(|e| !occupied.contains(e.location.as_str())).collect();
        placeholders.sort();
        placeholders.dedup();
        live.extend(placeholders);
        live.sort();
        Net { entries: live }
    }

    pub fn is_canonical(&self) -> bool {
        *self == self.canonicalize()
    }

    pub fn locations(&self) -> BTreeSet<&str> {
        self.entries.iter().map(|e| e.location.as_str()).collect()
    }

    /// Policy hosted at `loc`, taken from its first entry.
    pub fn policy_of(&self, loc: &str) -> Option<&Policy> {
        self.entries.iter().find(|e| e.location == loc).map(|e| &e.policy)
    }

    pub fn data_entries(&self) -> impl Iterator<Item = (&str, &[String])> {
        self.entries.iter().filter_map(|e| match &e.body {
            Body::Data(t) => Some((e.location.as_str(), t.as_slice())),
            Body::Proc(_) => None,
        })
    }

    pub fn data_count(&self) -> usize {
        self.data_entries().count()
    }

    pub fn contains_replication(&self) -> bool {
        self.entries.iter().any(|e| matches!(&e.body, Body::Proc(p) if p.contains_replication()))
    }

    /// Every constant occurring anywhere in the network (processes and data).
    pub fn constants(&self) -> BTreeSet<String> {
        loc_set(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValidationMode {
    /// Reject anything the checkers cannot handle.
    Check,
    /// Only enforce well-formedness of the network itself.
    ParseOnly,
}

/// Validates a network. Diagnostics are the result; an empty list means valid.
pub fn validate(net: &Net, mode: ValidationMode) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let mut policies: BTreeMap<&str, &Policy> = BTreeMap::new();
    let mut reported: BTreeSet<&str> = BTreeSet::new();
    for e in &net.entries {
        match policies.get(e.location.as_str()) {
            Some(p) if **p != e.policy => {
                if reported.insert(e.location.as_str()) {
                    diags.push(Diagnostic::error(
                        None,
                        format!("location `{}` carries more than one policy", e.location),
                    ));
                }
            }
            Some(_) => {}
            None => {
                policies.insert(e.location.as_str(), &e.policy);
            }
        }
    }
    if mode == ValidationMode::Check {
        for e in &net.entries {
            if let Body::Proc(p) = &e.body {
                for _ in 0..p.replication_count() {
                    diags.push(Diagnostic::error(
                        None,
                        format!(
                            "replication `*` at location `{}` makes the state space infinite; \
                             remove it before checking",
                            e.location
                        ),
                    ));
                }
            }
        }
    }
    diags
}

/// Constants of a network: locations, tuple fields, and every constant in the
/// actions of hosted processes.
pub fn loc_set(net: &Net) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for e in &net.entries {
        out.insert(e.location.clone());
        match &e.body {
            Body::Data(t) => out.extend(t.iter().cloned()),
            Body::Proc(p) => p.constants(&mut out),
        }
    }
    out
}

/// Constants of a term sequence; variables contribute nothing.
pub fn vec_set(terms: &[Term]) -> BTreeSet<String> {
    terms.iter().filter_map(|t| t.as_const().map(str::to_owned)).collect()
}

/// An action together with the location hosting it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct LocatedAction {
    pub source: String,
    pub policy: Policy,
    pub action: Action,
    pub continuation: Process,
}

/// Every action occurring anywhere in the processes of `net`, in document
/// order, including actions nested in continuations and sum branches.
pub fn take_actions(net: &Net) -> Vec<LocatedAction> {
    fn walk(loc: &str, pol: &Policy, p: &Process, out: &mut Vec<LocatedAction>) {
        match p {
            Process::Sum(bs) => {
                for b in bs {
                    out.push(LocatedAction {
                        source: loc.to_owned(),
                        policy: pol.clone(),
                        action: b.action.clone(),
                        continuation: b.cont.clone(),
                    });
                    walk(loc, pol, &b.cont, out);
                }
            }
            Process::Par(l, r) => {
                walk(loc, pol, l, out);
                walk(loc, pol, r, out);
            }
            Process::Repl(b) => walk(loc, pol, b, out),
        }
    }
    let mut out = Vec::new();
    for e in &net.entries {
        if let Body::Proc(p) = &e.body {
            walk(&e.location, &e.policy, p, &mut out);
        }
    }
    out
}

/// Policies attached to locations.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Policy {
    True,
    False,
    Not(Box<Policy>),
    Combine(Connective, Box<Policy>, Box<Policy>),
    Aspect(Box<Aspect>),
}

impl Policy {
    pub fn combine(op: Connective, a: Policy, b: Policy) -> Policy {
        Policy::Combine(op, Box::new(a), Box::new(b))
    }

    pub fn aspect(a: Aspect) -> Policy {
        Policy::Aspect(Box::new(a))
    }

    /// Aspects in left-to-right order.
    pub fn aspects(&self) -> Vec<&Aspect> {
        let mut out = Vec::new();
        fn walk<'a>(p: &'a Policy, out: &mut Vec<&'a Aspect>) {
            match p {
                Policy::Aspect(a) => out.push(a),
                Policy::Not(p) => walk(p, out),
                Policy::Combine(_, a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                Policy::True | Policy::False => {}
            }
        }
        walk(self, &mut out);
        out
    }
}

/// `[rec if cut : cond]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Aspect {
    pub rec: Expr,
    pub cut: Cut,
    pub cond: Expr,
}

/// `subject :: action-template . X`
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Cut {
    pub subject: Term,
    pub action: Action,
    pub cont_var: String,
}

/// Default name of the continuation variable when a cut omits `. X`.
pub const DEFAULT_CONT_VAR: &str = "X";

/// Recommendation and condition expressions of an aspect.
///
/// Conditions only use `not`, `and` and `or`, so they stay two-valued.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Expr {
    True,
    False,
    Eq(Term, Term),
    /// Presence of a tuple in the current network.
    Test(Vec<Term>, Term),
    OccursIn(Action, String),
    Not(Box<Expr>),
    Combine(Connective, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn combine(op: Connective, a: Expr, b: Expr) -> Expr {
        Expr::Combine(op, Box::new(a), Box::new(b))
    }

    pub fn not(e: Expr) -> Expr {
        Expr::Not(Box::new(e))
    }

    /// True when only `not`, `and`, `or` and `implies` are used, so the value
    /// is always `tt` or `ff`.
    pub fn is_classical(&self) -> bool {
        match self {
            Expr::True | Expr::False | Expr::Eq(..) | Expr::Test(..) | Expr::OccursIn(..) => true,
            Expr::Not(e) => e.is_classical(),
            Expr::Combine(op, a, b) => {
                matches!(op, Connective::And | Connective::Or | Connective::Implies)
                    && a.is_classical()
                    && b.is_classical()
            }
        }
    }

    pub fn terms(&self, out: &mut Vec<Term>) {
        match self {
            Expr::True | Expr::False => {}
            Expr::Eq(a, b) => {
                out.push(a.clone());
                out.push(b.clone());
            }
            Expr::Test(args, at) => {
                out.extend(args.iter().cloned());
                out.push(at.clone());
            }
            Expr::OccursIn(a, _) => out.extend(a.terms().cloned()),
            Expr::Not(e) => e.terms(out),
            Expr::Combine(_, a, b) => {
                a.terms(out);
                b.terms(out);
            }
        }
    }
}

/// Label pattern of an obligation: `subject : c(args)@target`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct LabelPattern {
    pub subject: Term,
    pub cap: Capability,
    pub args: Vec<Term>,
    pub target: String,
}

/// `AG [cut] pred`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Obligation {
    pub cut: LabelPattern,
    pub pred: Pred,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Pred {
    True,
    False,
    Not(Box<Pred>),
    Or(Box<Pred>, Box<Pred>),
    And(Box<Pred>, Box<Pred>),
    Forall(String, Box<Pred>),
    Exists(String, Box<Pred>),
    Basic(Basic),
}

impl Pred {
    pub fn not(p: Pred) -> Pred {
        Pred::Not(Box::new(p))
    }

    pub fn and(a: Pred, b: Pred) -> Pred {
        Pred::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Pred, b: Pred) -> Pred {
        Pred::Or(Box::new(a), Box::new(b))
    }

    /// Obligation variables that are neither quantified nor listed in `bound`.
    pub fn free_vars(&self, bound: &BTreeSet<String>) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(bound, &mut out);
        out
    }

    fn collect_free(&self, bound: &BTreeSet<String>, out: &mut BTreeSet<String>) {
        match self {
            Pred::True | Pred::False => {}
            Pred::Not(p) => p.collect_free(bound, out),
            Pred::Or(a, b) | Pred::And(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Pred::Forall(x, p) | Pred::Exists(x, p) => {
                let mut inner = bound.clone();
                inner.insert(x.clone());
                p.collect_free(&inner, out);
            }
            Pred::Basic(bp) => {
                for t in bp.terms() {
                    if let Term::Var(v) = t {
                        if !bound.contains(v) {
                            out.insert(v.clone());
                        }
                    }
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Basic {
    Eq(Term, Term),
    /// Tuple presence in the state before the transition.
    Test(Vec<Term>, Term),
    /// Tuple presence in the state after the transition.
    TestPrime(Vec<Term>, Term),
    /// Numeric comparison of all-digit constants.
    Geq(Term, Term),
}

impl Basic {
    pub fn terms(&self) -> Vec<&Term> {
        match self {
            Basic::Eq(a, b) | Basic::Geq(a, b) => vec![a, b],
            Basic::Test(args, at) | Basic::TestPrime(args, at) => {
                args.iter().chain(std::iter::once(at)).collect()
            }
        }
    }
}

/// A ground transition label `subject:c(args)@target`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Label {
    pub subject: String,
    pub cap: Capability,
    pub args: Vec<String>,
    pub target: String,
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}({})@{}", self.subject, self.cap.letter(), self.args.join(", "), self.target)
    }
}
