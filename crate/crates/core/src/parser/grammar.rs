use std::collections::BTreeSet;

use super::lexer::{is_reserved, kw_text, lex, Kw, Tok, Token};
use crate::belnap::Connective;
use crate::diag::{Diagnostic, Span};
use crate::model::{
    Action, Aspect, Basic, Body, Capability, Cut, Expr, LabelPattern, Net, NetEntry, Obligation, Policy,
    Pred, Process, Term, DEFAULT_CONT_VAR,
};

type PResult<T> = Result<T, Diagnostic>;

/// Where a term occurs; decides how identifiers and sigils are read.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Ctx {
    /// Argument of an `in`/`read` action in a process.
    ProcInput,
    /// Argument of an `out` action, or any action target, in a process.
    ProcOther,
    /// Aspect cut template.
    Cut,
    /// Atom inside a recommendation or condition.
    AspectExpr,
    /// Action template under `occurs-in`.
    OccursTemplate,
    /// Obligation label pattern.
    OblCut,
    /// Obligation predicate.
    OblPred,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    scope: Vec<String>,
}

fn conn_prec(tok: &Tok) -> Option<(Connective, u8)> {
    match tok {
        Tok::Kw(Kw::And) => Some((Connective::And, 6)),
        Tok::Kw(Kw::Or) => Some((Connective::Or, 5)),
        Tok::Kw(Kw::Otimes) => Some((Connective::Otimes, 4)),
        Tok::Kw(Kw::Oplus) => Some((Connective::Oplus, 3)),
        Tok::Kw(Kw::Pref) => Some((Connective::Priority, 2)),
        Tok::Kw(Kw::Implies) => Some((Connective::Implies, 1)),
        _ => None,
    }
}

/// Binding strength of a connective; higher binds tighter.
pub(crate) fn precedence(op: Connective) -> u8 {
    match op {
        Connective::And => 6,
        Connective::Or => 5,
        Connective::Otimes => 4,
        Connective::Oplus => 3,
        Connective::Priority => 2,
        Connective::Implies => 1,
    }
}

impl Parser {
    fn new(src: &str) -> PResult<Parser> {
        Ok(Parser { toks: lex(src)?, pos: 0, scope: Vec::new() })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error_here(&self, msg: impl Into<String>) -> Diagnostic {
        Diagnostic::error(Some(self.span()), msg)
    }

    fn expected(&self, what: &str) -> Diagnostic {
        self.error_here(format!("expected {what}, found {}", self.peek().describe()))
    }

    fn expect(&mut self, tok: Tok) -> PResult<Token> {
        if *self.peek() == tok {
            Ok(self.bump())
        } else {
            Err(self.expected(&tok.describe()))
        }
    }

    fn expect_eof(&mut self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.expected("end of input"))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, Span)> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let sp = self.bump().span;
                Ok((s, sp))
            }
            Tok::Kw(k) => Err(self.error_here(format!("`{}` is a reserved word and cannot be used as {what}", kw_text(k)))),
            _ => Err(self.expected(what)),
        }
    }

    fn term(&mut self, ctx: Ctx) -> PResult<Term> {
        let sp = self.span();
        let err = |msg: String| Diagnostic::error(Some(sp), msg);
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                let bound = matches!(ctx, Ctx::ProcInput | Ctx::ProcOther) && self.scope.contains(&s);
                Ok(if bound { Term::Var(s) } else { Term::Const(s) })
            }
            Tok::AspectVar(v) => match ctx {
                Ctx::Cut | Ctx::AspectExpr | Ctx::OccursTemplate => {
                    self.bump();
                    Ok(Term::Var(v))
                }
                Ctx::OblCut | Ctx::OblPred => Err(err(format!(
                    "aspect variable `{v}` in an obligation; obligation variables start with `$`"
                ))),
                _ => Err(err(format!("aspect variable `{v}` outside a policy"))),
            },
            Tok::OblVar(v) => match ctx {
                Ctx::OblCut | Ctx::OblPred => {
                    self.bump();
                    Ok(Term::Var(v))
                }
                Ctx::Cut | Ctx::AspectExpr | Ctx::OccursTemplate => Err(err(format!(
                    "obligation variable `{v}` in a policy; policy variables start with `#`"
                ))),
                _ => Err(err(format!("obligation variable `{v}` outside an obligation"))),
            },
            Tok::Bind(v) => match ctx {
                Ctx::ProcInput if !v.starts_with('#') => {
                    self.bump();
                    Ok(Term::Bind(v))
                }
                Ctx::ProcInput => Err(err(format!("binder `!{v}` may not use the `#` sigil in a process"))),
                Ctx::Cut if v.starts_with('#') => {
                    self.bump();
                    Ok(Term::Bind(v))
                }
                Ctx::Cut => Err(err(format!("binder `!{v}` in a cut must bind an aspect variable (`!#{v}`)"))),
                _ => Err(err(format!("binder `!{v}` is only allowed among in/read arguments"))),
            },
            Tok::Underscore => match ctx {
                Ctx::Cut | Ctx::OblCut | Ctx::OccursTemplate => {
                    self.bump();
                    Ok(Term::Wildcard)
                }
                _ => Err(err("wildcard `_` is only allowed in cuts".into())),
            },
            Tok::Kw(k) => Err(err(format!("`{}` is a reserved word and cannot be used as a name", kw_text(k)))),
            _ => Err(self.expected("a name")),
        }
    }

    fn capability(&mut self) -> PResult<Capability> {
        match self.peek() {
            Tok::Kw(Kw::Out) => {
                self.bump();
                Ok(Capability::Out)
            }
            Tok::Kw(Kw::In) => {
                self.bump();
                Ok(Capability::In)
            }
            Tok::Kw(Kw::Read) => {
                self.bump();
                Ok(Capability::Read)
            }
            Tok::Ident(s) => Err(self.error_here(format!("unknown capability `{s}`; expected out, in or read"))),
            _ => Err(self.expected("an action (out, in or read)")),
        }
    }

    fn term_list(&mut self, ctx: Ctx) -> PResult<Vec<Term>> {
        self.expect(Tok::LParen)?;
        let mut args = Vec::new();
        if !self.eat(&Tok::RParen) {
            loop {
                args.push(self.term(ctx)?);
                if self.eat(&Tok::RParen) {
                    break;
                }
                self.expect(Tok::Comma)?;
            }
        }
        Ok(args)
    }

    /// An action inside a process.
    fn proc_action(&mut self) -> PResult<Action> {
        let start = self.span();
        let cap = self.capability()?;
        let arg_ctx = if cap == Capability::Out { Ctx::ProcOther } else { Ctx::ProcInput };
        let args_start = self.pos;
        let args = match self.term_list(arg_ctx) {
            Err(d) if cap == Capability::Out && d.message.starts_with("binder") => {
                return Err(Diagnostic::error(d.span, "out cannot carry a binder `!x`; only in and read bind variables"))
            }
            r => r?,
        };
        let mut binders = BTreeSet::new();
        for a in &args {
            if let Term::Bind(v) = a {
                if !binders.insert(v.clone()) {
                    return Err(Diagnostic::error(Some(start), format!("variable `{v}` is bound twice in one action")));
                }
            }
        }
        for t in &self.toks[args_start..self.pos] {
            if let Tok::Ident(s) = &t.tok {
                if binders.contains(s) {
                    return Err(Diagnostic::error(
                        Some(t.span),
                        format!("`{s}` is bound by this action and cannot also be used in it"),
                    ));
                }
            }
        }
        self.expect(Tok::At)?;
        let target = match self.term(Ctx::ProcOther) {
            Err(d) if matches!(self.peek(), Tok::Bind(_)) => {
                return Err(Diagnostic::error(d.span, "an action target cannot be a binder"))
            }
            r => r?,
        };
        Ok(Action { cap, args, target })
    }

    /// `proc := sum ('|' sum)*`
    fn process(&mut self) -> PResult<Process> {
        let mut parts = vec![self.sum()?];
        while self.eat(&Tok::Bar) {
            parts.push(self.sum()?);
        }
        let mut it = parts.into_iter().rev();
        let last = it.next().expect("at least one component");
        Ok(it.fold(last, |acc, p| Process::par(p, acc)))
    }

    /// `sum := unit ('+' unit)*`
    fn sum(&mut self) -> PResult<Process> {
        let start = self.span();
        let first = self.unit()?;
        if *self.peek() != Tok::Plus {
            return Ok(first);
        }
        let mut branches = Vec::new();
        let mut push = |p: Process, sp: Span| match p {
            Process::Sum(bs) => {
                branches.extend(bs);
                Ok(())
            }
            _ => Err(Diagnostic::error(Some(sp), "only prefixed actions can be combined with `+`")),
        };
        push(first, start)?;
        while self.eat(&Tok::Plus) {
            let sp = self.span();
            let p = self.unit()?;
            push(p, sp)?;
        }
        Ok(Process::Sum(branches))
    }

    /// `unit := '0' | '(' proc ')' | '*' unit | action ['.' unit]`
    fn unit(&mut self) -> PResult<Process> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "0" => {
                self.bump();
                Ok(Process::nil())
            }
            Tok::LParen => {
                self.bump();
                let p = self.process()?;
                self.expect(Tok::RParen)?;
                Ok(p)
            }
            Tok::Star => {
                self.bump();
                Ok(Process::Repl(Box::new(self.unit()?)))
            }
            Tok::Kw(Kw::Out | Kw::In | Kw::Read) => {
                let action = self.proc_action()?;
                let binders = action.binders();
                let depth = self.scope.len();
                self.scope.extend(binders);
                let cont = if self.eat(&Tok::Dot) { self.unit() } else { Ok(Process::nil()) };
                self.scope.truncate(depth);
                Ok(Process::prefix(action, cont?))
            }
            Tok::Lt => Err(self.error_here("a data tuple must be placed directly under a location, not inside a process")),
            Tok::Ident(s) => Err(self.error_here(format!("unknown capability `{s}`; expected out, in or read"))),
            _ => Err(self.expected("a process")),
        }
    }

    fn tuple(&mut self) -> PResult<Vec<String>> {
        self.expect(Tok::Lt)?;
        let mut out = Vec::new();
        if !self.eat(&Tok::Gt) {
            loop {
                match self.peek().clone() {
                    Tok::Ident(s) => {
                        self.bump();
                        out.push(s);
                    }
                    Tok::Kw(k) => {
                        return Err(self.error_here(format!("`{}` is a reserved word and cannot be a tuple field", kw_text(k))))
                    }
                    _ => return Err(self.error_here(format!("data tuples hold constants only, found {}", self.peek().describe()))),
                }
                if self.eat(&Tok::Gt) {
                    break;
                }
                self.expect(Tok::Comma)?;
            }
        }
        Ok(out)
    }

    fn net(&mut self) -> PResult<Net> {
        let mut entries = Vec::new();
        loop {
            self.entry(&mut entries)?;
            if !self.eat(&Tok::ParPar) {
                break;
            }
        }
        self.expect_eof()?;
        Ok(Net::new(entries))
    }

    /// `Loc ::[policy] comp ('|' comp)*` with `comp := tuple | sum`.
    fn entry(&mut self, out: &mut Vec<NetEntry>) -> PResult<()> {
        let (location, _) = self.ident("a location name")?;
        self.expect(Tok::ColonColon)?;
        let policy = if self.eat(&Tok::LBracket) {
            let p = self.policy()?;
            self.expect(Tok::RBracket)?;
            p
        } else {
            Policy::True
        };
        loop {
            let body = if *self.peek() == Tok::Lt {
                Body::Data(self.tuple()?)
            } else {
                Body::Proc(self.sum()?)
            };
            out.push(NetEntry { location: location.clone(), body, policy: policy.clone() });
            if !self.eat(&Tok::Bar) {
                break;
            }
        }
        Ok(())
    }

    fn binary<T>(
        &mut self,
        min: u8,
        primary: fn(&mut Parser) -> PResult<T>,
        mk: fn(Connective, T, T) -> T,
    ) -> PResult<T> {
        let mut lhs = primary(self)?;
        while let Some((op, prec)) = conn_prec(self.peek()) {
            if prec < min {
                break;
            }
            self.bump();
            let next = if op == Connective::Implies { prec } else { prec + 1 };
            let rhs = self.binary(next, primary, mk)?;
            lhs = mk(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn policy(&mut self) -> PResult<Policy> {
        self.binary(0, Parser::policy_primary, Policy::combine)
    }

    fn policy_primary(&mut self) -> PResult<Policy> {
        match self.peek() {
            Tok::Kw(Kw::True) => {
                self.bump();
                Ok(Policy::True)
            }
            Tok::Kw(Kw::False) => {
                self.bump();
                Ok(Policy::False)
            }
            Tok::Kw(Kw::Not) => {
                self.bump();
                Ok(Policy::Not(Box::new(self.policy_primary()?)))
            }
            Tok::LParen => {
                self.bump();
                let p = self.policy()?;
                self.expect(Tok::RParen)?;
                Ok(p)
            }
            Tok::LBracket => Ok(Policy::aspect(self.aspect()?)),
            _ => Err(self.expected("a policy (true, false, not, `(` or an aspect `[...]`)")),
        }
    }

    /// `[rec if cut : cond]`
    fn aspect(&mut self) -> PResult<Aspect> {
        let open = self.expect(Tok::LBracket)?.span;
        let rec = self.expr()?;
        self.expect(Tok::Kw(Kw::If))?;
        let cut = self.cut()?;
        self.expect(Tok::Colon)?;
        let cond_start = self.span();
        let cond = self.expr()?;
        self.expect(Tok::RBracket)?;
        if let Some(op) = non_condition_connective(&cond) {
            return Err(Diagnostic::error(
                Some(cond_start),
                format!("`{}` is not allowed in a condition; use not, and, or", op.keyword()),
            ));
        }
        let mut bound = BTreeSet::new();
        for t in std::iter::once(&cut.subject).chain(cut.action.terms()) {
            if let Some(v) = t.var_name() {
                bound.insert(v.to_owned());
            }
        }
        for e in [&rec, &cond] {
            check_aspect_expr(e, &bound, &cut.cont_var, open)?;
        }
        Ok(Aspect { rec, cut, cond })
    }

    fn cut(&mut self) -> PResult<Cut> {
        let subject = self.term(Ctx::Cut)?;
        self.expect(Tok::ColonColon)?;
        let cap = self.capability()?;
        let args = self.term_list(Ctx::Cut)?;
        if cap == Capability::Out && args.iter().any(|a| matches!(a, Term::Bind(_))) {
            return Err(self.error_here("out cannot carry a binder `!x`"));
        }
        self.expect(Tok::At)?;
        if matches!(self.peek(), Tok::Bind(_)) {
            return Err(self.error_here("an action target cannot be a binder"));
        }
        let target = self.term(Ctx::Cut)?;
        if matches!(subject, Term::Bind(_)) {
            return Err(self.error_here("a cut subject cannot be a binder"));
        }
        let cont_var = if self.eat(&Tok::Dot) { self.ident("a continuation variable")?.0 } else { DEFAULT_CONT_VAR.to_owned() };
        Ok(Cut { subject, action: Action { cap, args, target }, cont_var })
    }

    fn expr(&mut self) -> PResult<Expr> {
        self.binary(0, Parser::expr_primary, Expr::combine)
    }

    fn expr_primary(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::Kw(Kw::True) => {
                self.bump();
                Ok(Expr::True)
            }
            Tok::Kw(Kw::False) => {
                self.bump();
                Ok(Expr::False)
            }
            Tok::Kw(Kw::Not) => {
                self.bump();
                Ok(Expr::not(self.expr_primary()?))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Kw(Kw::Test) => {
                self.bump();
                let args = self.term_list(Ctx::AspectExpr)?;
                self.expect(Tok::At)?;
                let at = self.term(Ctx::AspectExpr)?;
                Ok(Expr::Test(args, at))
            }
            Tok::Kw(Kw::Out | Kw::In | Kw::Read) => {
                let cap = self.capability()?;
                let args = self.term_list(Ctx::OccursTemplate)?;
                self.expect(Tok::At)?;
                let target = self.term(Ctx::OccursTemplate)?;
                self.expect(Tok::Kw(Kw::OccursIn))?;
                let (x, _) = self.ident("a continuation variable")?;
                Ok(Expr::OccursIn(Action { cap, args, target }, x))
            }
            Tok::Ident(_) | Tok::AspectVar(_) => {
                let a = self.term(Ctx::AspectExpr)?;
                self.expect(Tok::Eq)?;
                let b = self.term(Ctx::AspectExpr)?;
                Ok(Expr::Eq(a, b))
            }
            Tok::Kw(Kw::TestPrime) => Err(self.error_here("`test'` is only meaningful in obligations")),
            _ => Err(self.expected("a recommendation or condition")),
        }
    }

    fn obligation(&mut self) -> PResult<Obligation> {
        self.expect(Tok::Kw(Kw::AG))?;
        self.expect(Tok::LBracket)?;
        let subject = self.term(Ctx::OblCut)?;
        self.expect(Tok::Colon)?;
        let cap = match self.peek().clone() {
            Tok::Ident(s) => match Capability::from_letter(&s) {
                Some(c) => {
                    self.bump();
                    c
                }
                None => return Err(self.error_here(format!("unknown capability letter `{s}`; expected o, i or r"))),
            },
            Tok::Kw(k @ (Kw::Out | Kw::In | Kw::Read)) => {
                return Err(self.error_here(format!(
                    "obligation labels use the letters o, i, r; found `{}`",
                    kw_text(k)
                )))
            }
            _ => return Err(self.expected("a capability letter (o, i or r)")),
        };
        let args = self.term_list(Ctx::OblCut)?;
        self.expect(Tok::At)?;
        let target = match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                s
            }
            Tok::OblVar(_) | Tok::Underscore => {
                return Err(self.error_here("the target of the transition must be a constant"))
            }
            _ => return Err(self.expected("a constant target location")),
        };
        self.expect(Tok::RBracket)?;
        let pred_start = self.span();
        let pred = self.pred()?;
        self.expect_eof()?;
        let bound: BTreeSet<String> =
            std::iter::once(&subject).chain(&args).filter_map(|t| t.var_name().map(str::to_owned)).collect();
        if let Some(v) = pred.free_vars(&bound).into_iter().next() {
            return Err(Diagnostic::error(
                Some(pred_start),
                format!("variable `{v}` is neither bound by the label nor quantified"),
            ));
        }
        Ok(Obligation { cut: LabelPattern { subject, cap, args, target }, pred })
    }

    fn pred(&mut self) -> PResult<Pred> {
        let mut lhs = self.pred_and()?;
        while self.eat(&Tok::Kw(Kw::Or)) {
            let rhs = self.pred_and()?;
            lhs = Pred::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn pred_and(&mut self) -> PResult<Pred> {
        let mut lhs = self.pred_unary()?;
        while self.eat(&Tok::Kw(Kw::And)) {
            let rhs = self.pred_unary()?;
            lhs = Pred::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn pred_unary(&mut self) -> PResult<Pred> {
        match self.peek().clone() {
            Tok::Kw(Kw::True) => {
                self.bump();
                Ok(Pred::True)
            }
            Tok::Kw(Kw::False) => {
                self.bump();
                Ok(Pred::False)
            }
            Tok::Kw(Kw::Not) => {
                self.bump();
                Ok(Pred::not(self.pred_unary()?))
            }
            Tok::LParen => {
                self.bump();
                let p = self.pred()?;
                self.expect(Tok::RParen)?;
                Ok(p)
            }
            Tok::Kw(q @ (Kw::Forall | Kw::Exists)) => {
                self.bump();
                let x = match self.peek().clone() {
                    Tok::OblVar(v) => {
                        self.bump();
                        v
                    }
                    _ => return Err(self.expected("a `$` variable to quantify")),
                };
                self.expect(Tok::Colon)?;
                let body = Box::new(self.pred()?);
                Ok(if q == Kw::Forall { Pred::Forall(x, body) } else { Pred::Exists(x, body) })
            }
            Tok::Kw(k @ (Kw::Test | Kw::TestPrime)) => {
                self.bump();
                let args = self.term_list(Ctx::OblPred)?;
                self.expect(Tok::At)?;
                let at = self.term(Ctx::OblPred)?;
                Ok(Pred::Basic(if k == Kw::Test { Basic::Test(args, at) } else { Basic::TestPrime(args, at) }))
            }
            Tok::Ident(_) | Tok::OblVar(_) => {
                let a = self.term(Ctx::OblPred)?;
                if self.eat(&Tok::Eq) {
                    Ok(Pred::Basic(Basic::Eq(a, self.term(Ctx::OblPred)?)))
                } else if self.eat(&Tok::Geq) {
                    Ok(Pred::Basic(Basic::Geq(a, self.term(Ctx::OblPred)?)))
                } else {
                    Err(self.expected("`=` or `>=`"))
                }
            }
            _ => Err(self.expected("a predicate")),
        }
    }
}

fn non_condition_connective(e: &Expr) -> Option<Connective> {
    match e {
        Expr::Not(e) => non_condition_connective(e),
        Expr::Combine(op, a, b) => {
            if matches!(op, Connective::And | Connective::Or) {
                non_condition_connective(a).or_else(|| non_condition_connective(b))
            } else {
                Some(*op)
            }
        }
        _ => None,
    }
}

fn check_aspect_expr(e: &Expr, bound: &BTreeSet<String>, cont_var: &str, span: Span) -> PResult<()> {
    let unbound = |t: &Term| match t {
        Term::Var(v) if !bound.contains(v) => {
            Err(Diagnostic::error(Some(span), format!("aspect variable `{v}` is not bound by the cut")))
        }
        _ => Ok(()),
    };
    match e {
        Expr::True | Expr::False => Ok(()),
        Expr::Eq(a, b) => {
            unbound(a)?;
            unbound(b)
        }
        Expr::Test(args, at) => args.iter().chain(std::iter::once(at)).try_for_each(unbound),
        Expr::OccursIn(_, x) => {
            if x == cont_var {
                Ok(())
            } else {
                Err(Diagnostic::error(
                    Some(span),
                    format!("`{x}` is not the continuation variable of the cut (`{cont_var}`)"),
                ))
            }
        }
        Expr::Not(e) => check_aspect_expr(e, bound, cont_var, span),
        Expr::Combine(_, a, b) => {
            check_aspect_expr(a, bound, cont_var, span)?;
            check_aspect_expr(b, bound, cont_var, span)
        }
    }
}

/// Parses a network. The result is in canonical form.
pub fn parse_net(src: &str) -> Result<Net, Vec<Diagnostic>> {
    let mut p = Parser::new(src).map_err(|d| vec![d])?;
    let net = p.net().map_err(|d| vec![d])?;
    Ok(net.canonicalize())
}

pub fn parse_obligation(src: &str) -> Result<Obligation, Vec<Diagnostic>> {
    let mut p = Parser::new(src).map_err(|d| vec![d])?;
    p.obligation().map_err(|d| vec![d])
}

/// Parses a standalone policy expression, as written between `::[` and `]`.
pub fn parse_policy(src: &str) -> Result<Policy, Vec<Diagnostic>> {
    let mut p = Parser::new(src).map_err(|d| vec![d])?;
    let pol = p.policy().map_err(|d| vec![d])?;
    p.expect_eof().map_err(|d| vec![d])?;
    Ok(pol)
}

/// True when `s` can be written as a bare name (location, constant, variable).
pub fn is_valid_name(s: &str) -> bool {
    !s.is_empty() && s != "_" && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') && !is_reserved(s)
}
