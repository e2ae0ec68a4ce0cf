//! Pretty-printing in the concrete syntax accepted by the parser.

use std::fmt::{self, Display, Formatter, Write as _};

use super::grammar::precedence;
use crate::belnap::Connective;
use crate::model::{
    Action, Aspect, Basic, Body, Cut, Expr, LabelPattern, Net, NetEntry, Obligation, Policy, Pred, Process, Term,
};

impl Display for Term {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(c) | Term::Var(c) => f.write_str(c),
            Term::Bind(v) => write!(f, "!{v}"),
            Term::Wildcard => f.write_str("_"),
        }
    }
}

fn comma_list<T: Display>(f: &mut Formatter<'_>, items: &[T]) -> fmt::Result {
    for (i, t) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{t}")?;
    }
    Ok(())
}

impl Display for Action {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.cap.keyword())?;
        comma_list(f, &self.args)?;
        write!(f, ")@{}", self.target)
    }
}

/// Wraps in parentheses anything looser than a prefix.
struct Unit<'a>(&'a Process);

impl Display for Unit<'_> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self.0 {
            Process::Sum(bs) if bs.len() > 1 => write!(f, "({})", self.0),
            Process::Par(..) => write!(f, "({})", self.0),
            p => write!(f, "{p}"),
        }
    }
}

impl Display for Process {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Process::Sum(bs) if bs.is_empty() => f.write_str("0"),
            Process::Sum(bs) => {
                for (i, b) in bs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" + ")?;
                    }
                    write!(f, "{} . {}", b.action, Unit(&b.cont))?;
                }
                Ok(())
            }
            Process::Par(l, r) => {
                let l_paren = matches!(**l, Process::Par(..));
                if l_paren {
                    write!(f, "({l})")?;
                } else {
                    write!(f, "{l}")?;
                }
                write!(f, " | {r}")
            }
            Process::Repl(b) => write!(f, "*{}", Unit(b)),
        }
    }
}

/// Shared precedence handling for policies and expressions.
trait Tree: Display {
    /// Connective at the root, if any.
    fn root(&self) -> Option<Connective>;
    fn is_not(&self) -> bool;
}

fn level<T: Tree>(t: &T) -> u8 {
    match t.root() {
        Some(op) => precedence(op),
        None if t.is_not() => 7,
        None => 8,
    }
}

fn write_combine<T: Tree>(f: &mut Formatter<'_>, op: Connective, a: &T, b: &T) -> fmt::Result {
    let p = precedence(op);
    let right_assoc = op == Connective::Implies;
    let (la, lb) = (level(a), level(b));
    let paren_a = if right_assoc { la <= p } else { la < p };
    let paren_b = if right_assoc { lb < p } else { lb <= p };
    if paren_a {
        write!(f, "({a})")?;
    } else {
        write!(f, "{a}")?;
    }
    write!(f, " {} ", op.keyword())?;
    if paren_b {
        write!(f, "({b})")
    } else {
        write!(f, "{b}")
    }
}

fn write_not<T: Tree>(f: &mut Formatter<'_>, inner: &T) -> fmt::Result {
    if level(inner) < 7 {
        write!(f, "not ({inner})")
    } else {
        write!(f, "not {inner}")
    }
}

impl Tree for Policy {
    fn root(&self) -> Option<Connective> {
        match self {
            Policy::Combine(op, ..) => Some(*op),
            _ => None,
        }
    }
    fn is_not(&self) -> bool {
        matches!(self, Policy::Not(_))
    }
}

impl Tree for Expr {
    fn root(&self) -> Option<Connective> {
        match self {
            Expr::Combine(op, ..) => Some(*op),
            _ => None,
        }
    }
    fn is_not(&self) -> bool {
        matches!(self, Expr::Not(_))
    }
}

impl Display for Policy {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Policy::True => f.write_str("true"),
            Policy::False => f.write_str("false"),
            Policy::Not(p) => write_not(f, &**p),
            Policy::Combine(op, a, b) => write_combine(f, *op, &**a, &**b),
            Policy::Aspect(a) => write!(f, "{a}"),
        }
    }
}

impl Display for Aspect {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "[{} if {} : {}]", self.rec, self.cut, self.cond)
    }
}

impl Display for Cut {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "{} :: {} . {}", self.subject, self.action, self.cont_var)
    }
}

impl Display for Expr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Expr::True => f.write_str("true"),
            Expr::False => f.write_str("false"),
            Expr::Eq(a, b) => write!(f, "{a} = {b}"),
            Expr::Test(args, at) => {
                f.write_str("test(")?;
                comma_list(f, args)?;
                write!(f, ")@{at}")
            }
            Expr::OccursIn(a, x) => write!(f, "{a} occurs-in {x}"),
            Expr::Not(e) => write_not(f, &**e),
            Expr::Combine(op, a, b) => write_combine(f, *op, &**a, &**b),
        }
    }
}

impl Display for NetEntry {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "{} ::[{}] ", self.location, self.policy)?;
        match &self.body {
            Body::Data(t) => {
                f.write_char('<')?;
                comma_list(f, t)?;
                f.write_char('>')
            }
            Body::Proc(p @ Process::Par(..)) => write!(f, "({p})"),
            Body::Proc(p) => write!(f, "{p}"),
        }
    }
}

impl Display for Net {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str("\n|| ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl Net {
    /// Single-line rendering, used for LTS state labels.
    pub fn render_compact(&self) -> String {
        self.entries.iter().map(ToString::to_string).collect::<Vec<_>>().join(" || ")
    }
}

impl Display for LabelPattern {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "{} : {}(", self.subject, self.cap.letter())?;
        comma_list(f, &self.args)?;
        write!(f, ")@{}", self.target)
    }
}

impl Display for Obligation {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "AG [{}] {}", self.cut, self.pred)
    }
}

fn pred_level(p: &Pred) -> u8 {
    match p {
        Pred::Forall(..) | Pred::Exists(..) => 0,
        Pred::Or(..) => 1,
        Pred::And(..) => 2,
        Pred::Not(_) => 3,
        _ => 4,
    }
}

fn write_pred_child(f: &mut Formatter<'_>, p: &Pred, min: u8) -> fmt::Result {
    if pred_level(p) < min {
        write!(f, "({p})")
    } else {
        write!(f, "{p}")
    }
}

impl Display for Pred {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Pred::True => f.write_str("true"),
            Pred::False => f.write_str("false"),
            Pred::Not(p) => {
                f.write_str("not ")?;
                write_pred_child(f, p, 3)
            }
            Pred::Or(a, b) => {
                write_pred_child(f, a, 1)?;
                f.write_str(" or ")?;
                write_pred_child(f, b, 2)
            }
            Pred::And(a, b) => {
                write_pred_child(f, a, 2)?;
                f.write_str(" and ")?;
                write_pred_child(f, b, 3)
            }
            Pred::Forall(x, p) => write!(f, "forall {x} : {p}"),
            Pred::Exists(x, p) => write!(f, "exists {x} : {p}"),
            Pred::Basic(b) => write!(f, "{b}"),
        }
    }
}

impl Display for Basic {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Basic::Eq(a, b) => write!(f, "{a} = {b}"),
            Basic::Geq(a, b) => write!(f, "{a} >= {b}"),
            Basic::Test(args, at) | Basic::TestPrime(args, at) => {
                f.write_str(if matches!(self, Basic::Test(..)) { "test(" } else { "test'(" })?;
                comma_list(f, args)?;
                write!(f, ")@{at}")
            }
        }
    }
}
