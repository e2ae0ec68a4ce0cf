use crate::diag::{Diagnostic, Span};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// `#name`, stored with the sigil.
    AspectVar(String),
    /// `$name`, stored with the sigil.
    OblVar(String),
    /// `!name` or `!#name`; the name keeps a `#` sigil if present.
    Bind(String),
    Underscore,
    Kw(Kw),
    ColonColon,
    Colon,
    ParPar,
    Bar,
    Plus,
    Star,
    Dot,
    Comma,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Lt,
    Gt,
    Geq,
    At,
    Eq,
    Eof,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kw {
    Out,
    In,
    Read,
    Test,
    TestPrime,
    True,
    False,
    Not,
    And,
    Or,
    Oplus,
    Otimes,
    Implies,
    Pref,
    If,
    OccursIn,
    AG,
    Forall,
    Exists,
}

pub const KEYWORDS: &[(&str, Kw)] = &[
    ("out", Kw::Out),
    ("in", Kw::In),
    ("read", Kw::Read),
    ("test", Kw::Test),
    ("true", Kw::True),
    ("false", Kw::False),
    ("not", Kw::Not),
    ("and", Kw::And),
    ("or", Kw::Or),
    ("oplus", Kw::Oplus),
    ("otimes", Kw::Otimes),
    ("implies", Kw::Implies),
    ("pref", Kw::Pref),
    ("if", Kw::If),
    ("AG", Kw::AG),
    ("forall", Kw::Forall),
    ("exists", Kw::Exists),
];

/// True for identifiers that cannot be used as names.
pub fn is_reserved(s: &str) -> bool {
    KEYWORDS.iter().any(|(k, _)| *k == s) || s == "occurs"
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::AspectVar(s) | Tok::OblVar(s) => format!("variable `{s}`"),
            Tok::Bind(s) => format!("binder `!{s}`"),
            Tok::Underscore => "`_`".into(),
            Tok::Kw(k) => format!("keyword `{}`", kw_text(*k)),
            Tok::ColonColon => "`::`".into(),
            Tok::Colon => "`:`".into(),
            Tok::ParPar => "`||`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Star => "`*`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Comma => "`,`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Geq => "`>=`".into(),
            Tok::At => "`@`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

pub fn kw_text(k: Kw) -> &'static str {
    match k {
        Kw::TestPrime => "test'",
        Kw::OccursIn => "occurs-in",
        _ => KEYWORDS.iter().find(|(_, kw)| *kw == k).map(|(s, _)| *s).unwrap_or("?"),
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

struct Cursor<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
    _src: &'a str,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.chars.get(self.pos + n).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn ident(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if is_ident_char(c) {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        s
    }
}

pub fn lex(src: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut cur = Cursor { chars: src.chars().collect(), pos: 0, line: 1, col: 1, _src: src };
    let mut out = Vec::new();
    loop {
        while let Some(c) = cur.peek() {
            if c.is_whitespace() {
                cur.bump();
            } else if c == '/' && cur.peek_at(1) == Some('/') {
                while let Some(c) = cur.peek() {
                    if c == '\n' {
                        break;
                    }
                    cur.bump();
                }
            } else {
                break;
            }
        }
        let (line, col, start) = (cur.line, cur.col, cur.pos);
        let Some(c) = cur.peek() else {
            out.push(Token { tok: Tok::Eof, span: Span { line, col, len: 0 } });
            return Ok(out);
        };
        let err = |len: usize, msg: String| Diagnostic::error(Some(Span { line, col, len }), msg);
        let tok = match c {
            '#' | '$' => {
                cur.bump();
                let name = cur.ident();
                if name.is_empty() {
                    return Err(err(1, format!("expected a variable name after `{c}`")));
                }
                if c == '#' {
                    Tok::AspectVar(format!("#{name}"))
                } else {
                    Tok::OblVar(format!("${name}"))
                }
            }
            '!' => {
                cur.bump();
                let sigil = if cur.peek() == Some('#') {
                    cur.bump();
                    "#"
                } else {
                    ""
                };
                let name = cur.ident();
                if name.is_empty() || name == "_" {
                    return Err(err(1, "expected a variable name after `!`".into()));
                }
                if is_reserved(&name) {
                    return Err(err(name.len() + 1, format!("`{name}` is a reserved word")));
                }
                Tok::Bind(format!("{sigil}{name}"))
            }
            c if is_ident_char(c) => {
                let name = cur.ident();
                if name == "_" {
                    Tok::Underscore
                } else if name == "test" && cur.peek() == Some('\'') {
                    cur.bump();
                    Tok::Kw(Kw::TestPrime)
                } else if name == "occurs" {
                    if cur.peek() == Some('-') && cur.peek_at(1) == Some('i') && cur.peek_at(2) == Some('n')
                        && !cur.peek_at(3).is_some_and(is_ident_char)
                    {
                        cur.bump();
                        cur.bump();
                        cur.bump();
                        Tok::Kw(Kw::OccursIn)
                    } else {
                        return Err(err(name.len(), "expected `occurs-in`".into()));
                    }
                } else if let Some((_, kw)) = KEYWORDS.iter().find(|(k, _)| *k == name) {
                    Tok::Kw(*kw)
                } else {
                    Tok::Ident(name)
                }
            }
            _ => {
                cur.bump();
                let next = cur.peek();
                let two = |cur: &mut Cursor, t: Tok| {
                    cur.bump();
                    t
                };
                match (c, next) {
                    (':', Some(':')) => two(&mut cur, Tok::ColonColon),
                    ('|', Some('|')) => two(&mut cur, Tok::ParPar),
                    ('>', Some('=')) => two(&mut cur, Tok::Geq),
                    (':', _) => Tok::Colon,
                    ('|', _) => Tok::Bar,
                    ('>', _) => Tok::Gt,
                    ('+', _) => Tok::Plus,
                    ('*', _) => Tok::Star,
                    ('.', _) => Tok::Dot,
                    (',', _) => Tok::Comma,
                    ('(', _) => Tok::LParen,
                    (')', _) => Tok::RParen,
                    ('[', _) => Tok::LBracket,
                    (']', _) => Tok::RBracket,
                    ('<', _) => Tok::Lt,
                    ('@', _) => Tok::At,
                    ('=', _) => Tok::Eq,
                    _ => return Err(err(1, format!("unexpected character `{c}`"))),
                }
            }
        };
        out.push(Token { tok, span: Span { line, col, len: cur.pos - start } });
    }
}
