//! Random generators shared by the property and acceptance tests.
#![allow(dead_code)]

use aspectkbl::model::*;
use aspectkbl::Connective;
use rand::rngs::StdRng;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};

const CONSTS: &[&str] = &["a", "b", "Bob", "EHDB", "l1", "PrivateNotes"];
const LOCS: &[&str] = &["A", "B", "C"];
const BINDERS: &[&str] = &["x", "y", "z"];
const CAPS: [Capability; 3] = [Capability::Out, Capability::In, Capability::Read];
const OPS: [Connective; 6] =
    [Connective::Oplus, Connective::Otimes, Connective::Implies, Connective::Priority, Connective::And, Connective::Or];
const COND_OPS: [Connective; 2] = [Connective::And, Connective::Or];

pub struct Gen {
    pub rng: StdRng,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen { rng: StdRng::seed_from_u64(seed) }
    }

    fn pick<'a>(&mut self, xs: &'a [&'a str]) -> &'a str {
        xs.choose(&mut self.rng).expect("non-empty pool")
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.random_bool(p)
    }

    fn upto(&mut self, n: usize) -> usize {
        self.rng.random_range(0..=n)
    }

    fn cap(&mut self) -> Capability {
        CAPS[self.rng.random_range(0..3)]
    }

    // ---- syntax-level generators, for round-tripping ----

    fn name(&mut self) -> String {
        let pool: Vec<&str> = CONSTS.iter().chain(LOCS).copied().collect();
        self.pick(&pool).to_owned()
    }

    pub fn action(&mut self, scope: &[String]) -> Action {
        let cap = self.cap();
        let arity = self.upto(3);
        let mut binders: Vec<String> = Vec::new();
        if cap != Capability::Out {
            for b in BINDERS {
                if binders.len() < arity && self.chance(0.3) {
                    binders.push(b.to_string());
                }
            }
        }
        let usable: Vec<&String> = scope.iter().filter(|v| !binders.contains(v)).collect();
        let mut args: Vec<Term> = binders.iter().cloned().map(Term::Bind).collect();
        while args.len() < arity {
            if !usable.is_empty() && self.chance(0.4) {
                args.push(Term::Var((*usable.choose(&mut self.rng).unwrap()).clone()));
            } else {
                args.push(Term::Const(self.name()));
            }
        }
        args.shuffle(&mut self.rng);
        let target = if !usable.is_empty() && self.chance(0.2) {
            Term::Var((*usable.choose(&mut self.rng).unwrap()).clone())
        } else {
            Term::Const(self.pick(LOCS).to_owned())
        };
        Action { cap, args, target }
    }

    pub fn process(&mut self, depth: usize, scope: &[String]) -> Process {
        if depth == 0 {
            return Process::nil();
        }
        match self.rng.random_range(0..10) {
            0 => Process::nil(),
            1 | 2 => Process::par(self.process(depth - 1, scope), self.process(depth - 1, scope)),
            3 => Process::Repl(Box::new(self.process(depth - 1, scope))),
            _ => {
                let n = 1 + self.upto(2);
                let branches = (0..n)
                    .map(|_| {
                        let action = self.action(scope);
                        let mut inner = scope.to_vec();
                        inner.extend(action.binders());
                        let cont = self.process(depth - 1, &inner);
                        Branch { action, cont }
                    })
                    .collect();
                Process::Sum(branches)
            }
        }
    }

    fn aspect_term(&mut self, bound: &[String]) -> Term {
        if !bound.is_empty() && self.chance(0.5) {
            Term::Var(bound.choose(&mut self.rng).unwrap().clone())
        } else {
            Term::Const(self.name())
        }
    }

    pub fn expr(&mut self, depth: usize, bound: &[String], cont_var: &str, classical: bool) -> Expr {
        let leaf = depth == 0 || self.chance(0.4);
        if leaf {
            return match self.rng.random_range(0..6) {
                0 => Expr::True,
                1 => Expr::False,
                2 | 3 => Expr::Eq(self.aspect_term(bound), self.aspect_term(bound)),
                4 => {
                    let args = (0..1 + self.upto(2)).map(|_| self.aspect_term(bound)).collect();
                    Expr::Test(args, self.aspect_term(bound))
                }
                _ => {
                    let cap = self.cap();
                    let args = (0..self.upto(2))
                        .map(|_| match self.rng.random_range(0..3) {
                            0 => Term::Wildcard,
                            1 => Term::Var("#free".into()),
                            _ => self.aspect_term(bound),
                        })
                        .collect();
                    Expr::OccursIn(Action { cap, args, target: self.aspect_term(bound) }, cont_var.to_owned())
                }
            };
        }
        if self.chance(0.25) {
            return Expr::not(self.expr(depth - 1, bound, cont_var, classical));
        }
        let ops: &[Connective] = if classical { &COND_OPS } else { &OPS };
        let op = *ops.choose(&mut self.rng).unwrap();
        Expr::combine(
            op,
            self.expr(depth - 1, bound, cont_var, classical),
            self.expr(depth - 1, bound, cont_var, classical),
        )
    }

    pub fn aspect(&mut self) -> Aspect {
        let mut bound = Vec::new();
        let cut_term = |g: &mut Gen, bound: &mut Vec<String>, name: &str, binder_ok: bool| -> Term {
            match g.rng.random_range(0..4) {
                0 => Term::Wildcard,
                1 => Term::Const(g.name()),
                2 if binder_ok => {
                    bound.push(name.to_owned());
                    Term::Bind(name.to_owned())
                }
                _ => {
                    bound.push(name.to_owned());
                    Term::Var(name.to_owned())
                }
            }
        };
        let subject = cut_term(self, &mut bound, "#u", false);
        let cap = self.cap();
        let args = (0..self.upto(3))
            .map(|i| cut_term(self, &mut bound, &format!("#a{i}"), cap != Capability::Out))
            .collect();
        let target = cut_term(self, &mut bound, "#t", false);
        let cont_var = if self.chance(0.5) { "X" } else { "Y" }.to_owned();
        let rec = self.expr(2, &bound, &cont_var, false);
        let cond = self.expr(2, &bound, &cont_var, true);
        Aspect { rec, cut: Cut { subject, action: Action { cap, args, target }, cont_var }, cond }
    }

    pub fn policy(&mut self, depth: usize) -> Policy {
        if depth == 0 || self.chance(0.3) {
            return match self.rng.random_range(0..4) {
                0 => Policy::True,
                1 => Policy::False,
                _ => Policy::aspect(self.aspect()),
            };
        }
        if self.chance(0.2) {
            return Policy::Not(Box::new(self.policy(depth - 1)));
        }
        let op = *OPS.choose(&mut self.rng).unwrap();
        Policy::combine(op, self.policy(depth - 1), self.policy(depth - 1))
    }

    fn tuple(&mut self) -> Vec<String> {
        (0..1 + self.upto(2)).map(|_| self.name()).collect()
    }

    /// Any network the grammar can express, including replication.
    pub fn arbitrary_net(&mut self) -> Net {
        let n = 1 + self.upto(5);
        let entries = (0..n)
            .map(|_| {
                let loc = self.pick(LOCS).to_owned();
                let pol = self.policy(2);
                if self.chance(0.4) {
                    NetEntry::data(loc, pol, self.tuple())
                } else {
                    NetEntry::process(loc, pol, self.process(3, &[]))
                }
            })
            .collect();
        Net::new(entries)
    }

    pub fn arbitrary_obligation(&mut self) -> Obligation {
        let mut vars: Vec<String> = Vec::new();
        let pattern_term = |g: &mut Gen, vars: &mut Vec<String>, i: usize| match g.rng.random_range(0..3) {
            0 => Term::Wildcard,
            1 => Term::Const(g.name()),
            _ => {
                let v = format!("$v{i}");
                vars.push(v.clone());
                Term::Var(v)
            }
        };
        let subject = pattern_term(self, &mut vars, 0);
        let cap = self.cap();
        let args = (0..self.upto(3)).map(|i| pattern_term(self, &mut vars, i + 1)).collect();
        let target = self.pick(LOCS).to_owned();
        let pred = self.pred(3, &mut vars);
        Obligation { cut: LabelPattern { subject, cap, args, target }, pred }
    }

    fn pred_term(&mut self, vars: &[String]) -> Term {
        if !vars.is_empty() && self.chance(0.5) {
            Term::Var(vars.choose(&mut self.rng).unwrap().clone())
        } else {
            Term::Const(self.name())
        }
    }

    fn pred(&mut self, depth: usize, vars: &mut Vec<String>) -> Pred {
        if depth == 0 || self.chance(0.3) {
            return match self.rng.random_range(0..6) {
                0 => Pred::True,
                1 => Pred::False,
                2 => Pred::Basic(Basic::Eq(self.pred_term(vars), self.pred_term(vars))),
                3 => Pred::Basic(Basic::Geq(self.pred_term(vars), Term::Const(self.upto(20).to_string()))),
                4 => Pred::Basic(Basic::Test(
                    (0..1 + self.upto(1)).map(|_| self.pred_term(vars)).collect(),
                    self.pred_term(vars),
                )),
                _ => Pred::Basic(Basic::TestPrime(vec![self.pred_term(vars)], self.pred_term(vars))),
            };
        }
        match self.rng.random_range(0..5) {
            0 => Pred::not(self.pred(depth - 1, vars)),
            1 => Pred::and(self.pred(depth - 1, vars), self.pred(depth - 1, vars)),
            2 => Pred::or(self.pred(depth - 1, vars), self.pred(depth - 1, vars)),
            q => {
                let x = format!("$q{depth}");
                vars.push(x.clone());
                let body = Box::new(self.pred(depth - 1, vars));
                vars.pop();
                if q == 3 {
                    Pred::Forall(x, body)
                } else {
                    Pred::Exists(x, body)
                }
            }
        }
    }

    // ---- semantic generators: small, replication-free, evaluation-safe ----

    fn small_action(&mut self, locs: &[String], scope: &[String], vals: &[&str]) -> Action {
        let cap = self.cap();
        let arity = 1 + self.upto(1);
        let mut args = Vec::new();
        for i in 0..arity {
            let fresh = BINDERS[scope.len() % BINDERS.len()].to_owned() + &i.to_string();
            if cap != Capability::Out && self.chance(0.35) {
                args.push(Term::Bind(fresh));
            } else if !scope.is_empty() && self.chance(0.3) {
                args.push(Term::Var(scope.choose(&mut self.rng).unwrap().clone()));
            } else {
                args.push(Term::Const(self.pick(vals).to_owned()));
            }
        }
        let target = if !scope.is_empty() && self.chance(0.15) {
            Term::Var(scope.choose(&mut self.rng).unwrap().clone())
        } else {
            Term::Const(locs.choose(&mut self.rng).unwrap().clone())
        };
        Action { cap, args, target }
    }

    /// A process with at most two actions in total.
    fn small_process(&mut self, locs: &[String], vals: &[&str]) -> Process {
        let mut first = self.small_action(locs, &[], vals);
        match self.rng.random_range(0..3) {
            0 => Process::prefix(first, Process::nil()),
            1 => {
                let second = self.small_action(locs, &[], vals);
                Process::Sum(vec![
                    Branch { action: first, cont: Process::nil() },
                    Branch { action: second, cont: Process::nil() },
                ])
            }
            _ => {
                // avoid binders shadowing each other across the two actions
                for t in first.args.iter_mut() {
                    if let Term::Bind(v) = t {
                        *v = format!("{v}f");
                    }
                }
                let scope: Vec<String> = first.binders().into_iter().collect();
                let second = self.small_action(locs, &scope, vals);
                Process::prefix(first, Process::prefix(second, Process::nil()))
            }
        }
    }

    /// Aspect variables are only bound by the subject, the target and the
    /// arguments of `out`, which are always ground when the policy runs.
    fn safe_aspect(&mut self, locs: &[String], vals: &[&str]) -> Aspect {
        let mut bound = Vec::new();
        let subject = if self.chance(0.6) {
            bound.push("#u".to_owned());
            Term::var("#u")
        } else if self.chance(0.5) {
            Term::Wildcard
        } else {
            Term::Const(locs.choose(&mut self.rng).unwrap().clone())
        };
        let cap = self.cap();
        let args = (0..1 + self.upto(1))
            .map(|i| match self.rng.random_range(0..3) {
                0 => Term::Wildcard,
                1 if cap == Capability::Out => {
                    let v = format!("#a{i}");
                    bound.push(v.clone());
                    Term::Var(v)
                }
                _ => Term::Const(self.pick(vals).to_owned()),
            })
            .collect();
        let target = if self.chance(0.5) {
            bound.push("#t".to_owned());
            Term::var("#t")
        } else {
            Term::Const(locs.choose(&mut self.rng).unwrap().clone())
        };
        let term = |g: &mut Gen, bound: &[String]| -> Term {
            if !bound.is_empty() && g.chance(0.6) {
                Term::Var(bound.choose(&mut g.rng).unwrap().clone())
            } else if g.chance(0.5) {
                Term::Const(locs.choose(&mut g.rng).unwrap().clone())
            } else {
                Term::Const(g.pick(vals).to_owned())
            }
        };
        let atom = |g: &mut Gen| match g.rng.random_range(0..5) {
            0 => Expr::True,
            1 => Expr::False,
            2 => Expr::Eq(term(g, &bound), term(g, &bound)),
            3 => Expr::Test(vec![term(g, &bound)], term(g, &bound)),
            _ => Expr::OccursIn(
                Action { cap: g.cap(), args: vec![Term::Wildcard], target: Term::Wildcard },
                "X".to_owned(),
            ),
        };
        let a1 = atom(self);
        let rec = if self.chance(0.5) {
            a1
        } else {
            let op = *OPS.choose(&mut self.rng).unwrap();
            Expr::combine(op, a1, atom(self))
        };
        let mut cond = atom(self);
        if self.chance(0.3) {
            cond = Expr::not(cond);
        }
        Aspect { rec, cut: Cut { subject, action: Action { cap, args, target }, cont_var: "X".to_owned() }, cond }
    }

    fn small_policy(&mut self, locs: &[String], vals: &[&str], aspects_left: &mut usize) -> Policy {
        if *aspects_left == 0 || self.chance(0.3) {
            return if self.chance(0.85) { Policy::True } else { Policy::False };
        }
        *aspects_left -= 1;
        let a = Policy::aspect(self.safe_aspect(locs, vals));
        if *aspects_left > 0 && self.chance(0.4) {
            *aspects_left -= 1;
            let op = *OPS.choose(&mut self.rng).unwrap();
            let b = Policy::aspect(self.safe_aspect(locs, vals));
            Policy::combine(op, a, b)
        } else if self.chance(0.1) {
            Policy::Not(Box::new(a))
        } else {
            a
        }
    }

    /// At most three locations, two actions per process and two aspects.
    pub fn small_net(&mut self) -> Net {
        let nloc = 1 + self.upto(2);
        let locs: Vec<String> = LOCS[..nloc].iter().map(|s| s.to_string()).collect();
        let vals: Vec<&str> = ["a", "b"].into_iter().chain(locs.iter().map(String::as_str)).collect();
        let mut aspects_left = 2;
        let mut entries = Vec::new();
        for l in &locs {
            let pol = self.small_policy(&locs, &vals, &mut aspects_left);
            for _ in 0..self.upto(2) {
                let t = (0..1 + self.upto(1)).map(|_| self.pick(&vals).to_owned()).collect();
                entries.push(NetEntry::data(l.clone(), pol.clone(), t));
            }
            if self.chance(0.8) {
                entries.push(NetEntry::process(l.clone(), pol.clone(), self.small_process(&locs, &vals)));
            } else if entries.iter().all(|e| e.location != *l) {
                entries.push(NetEntry::process(l.clone(), pol.clone(), Process::nil()));
            }
        }
        Net::new(entries).canonicalize()
    }

    /// An obligation over the constants of `net`, with ground evaluation.
    pub fn small_obligation(&mut self, net: &Net) -> Obligation {
        let locs: Vec<String> = net.locations().into_iter().map(str::to_owned).collect();
        let mut vals: Vec<String> = net.constants().into_iter().collect();
        vals.extend(["a".to_owned(), "b".to_owned()]);
        let mut vars: Vec<String> = Vec::new();
        let subject = if self.chance(0.7) {
            vars.push("$u".into());
            Term::var("$u")
        } else {
            Term::Wildcard
        };
        // Mostly aim the cut at an action that occurs in the network.
        let actions = take_actions(net);
        let aimed = actions.choose(&mut self.rng).filter(|_| self.chance(0.8)).map(|a| a.action.clone());
        let cap = aimed.as_ref().map_or_else(|| self.cap(), |a| a.cap);
        let arity = aimed.as_ref().map_or_else(|| 1 + self.upto(1), |a| a.args.len());
        let args = (0..arity)
            .map(|i| match self.rng.random_range(0..3) {
                0 => Term::Wildcard,
                1 => Term::Const(vals.choose(&mut self.rng).unwrap().clone()),
                _ => {
                    let v = format!("$v{i}");
                    vars.push(v.clone());
                    Term::Var(v)
                }
            })
            .collect();
        let target = match aimed.as_ref().map(|a| &a.target) {
            Some(Term::Const(t)) => t.clone(),
            _ => locs.choose(&mut self.rng).unwrap().clone(),
        };
        let term = |g: &mut Gen, vars: &[String]| -> Term {
            if !vars.is_empty() && g.chance(0.6) {
                Term::Var(vars.choose(&mut g.rng).unwrap().clone())
            } else {
                Term::Const(vals.choose(&mut g.rng).unwrap().clone())
            }
        };
        let atom = |g: &mut Gen, vars: &[String]| match g.rng.random_range(0..5) {
            0 => Pred::False,
            1 => Pred::Basic(Basic::Eq(term(g, vars), term(g, vars))),
            2 => Pred::Basic(Basic::TestPrime(vec![term(g, vars)], Term::Const(target.clone()))),
            _ => Pred::Basic(Basic::Test(vec![term(g, vars)], term(g, vars))),
        };
        let pred = match self.rng.random_range(0..5) {
            0 => Pred::not(atom(self, &vars)),
            1 => Pred::or(atom(self, &vars), atom(self, &vars)),
            2 => {
                vars.push("$q".into());
                let body = Pred::or(atom(self, &vars), atom(self, &vars));
                if self.chance(0.5) {
                    Pred::Exists("$q".into(), Box::new(body))
                } else {
                    Pred::Forall("$q".into(), Box::new(body))
                }
            }
            _ => atom(self, &vars),
        };
        Obligation { cut: LabelPattern { subject, cap, args, target }, pred }
    }

    /// A structurally congruent but syntactically different network.
    pub fn congruent_variant(&mut self, net: &Net) -> Net {
        let mut entries = net.entries.clone();
        for _ in 0..1 + self.upto(4) {
            match self.rng.random_range(0..5) {
                0 => entries.shuffle(&mut self.rng),
                1 => {
                    // l :: P  ==  l :: P || l :: 0
                    if let Some(e) = entries.choose(&mut self.rng).cloned() {
                        entries.push(NetEntry::process(e.location, e.policy, Process::nil()));
                    }
                }
                2 => {
                    // l :: P || l :: Q  ==  l :: (P | Q)
                    let procs: Vec<usize> =
                        (0..entries.len()).filter(|&i| matches!(entries[i].body, Body::Proc(_))).collect();
                    if let Some((&i, &j)) = procs.choose(&mut self.rng).zip(procs.choose(&mut self.rng)) {
                        if i != j && entries[i].location == entries[j].location && entries[i].policy == entries[j].policy {
                            let (Body::Proc(p), Body::Proc(q)) = (&entries[i].body, &entries[j].body) else { continue };
                            let merged = if self.chance(0.5) {
                                Process::par(p.clone(), q.clone())
                            } else {
                                Process::par(q.clone(), p.clone())
                            };
                            let e = NetEntry::process(entries[i].location.clone(), entries[i].policy.clone(), merged);
                            let (lo, hi) = (i.min(j), i.max(j));
                            entries.remove(hi);
                            entries[lo] = e;
                        }
                    }
                }
                3 => {
                    // P  ==  P | 0,  P | Q  ==  Q | P
                    if let Some(e) = entries.iter_mut().find(|e| matches!(e.body, Body::Proc(_))) {
                        if let Body::Proc(p) = &mut e.body {
                            *p = match p.clone() {
                                Process::Par(a, b) => Process::Par(b, a),
                                other => Process::par(other, Process::nil()),
                            };
                        }
                    }
                }
                _ => {
                    // sum branches commute
                    for e in entries.iter_mut() {
                        if let Body::Proc(Process::Sum(bs)) = &mut e.body {
                            bs.reverse();
                        }
                    }
                }
            }
        }
        Net::new(entries)
    }
}
