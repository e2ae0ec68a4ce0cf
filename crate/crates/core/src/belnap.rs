//! Belnap's four-valued logic.
//!
//! The carrier is ordered two ways. In the knowledge order `bot` is below
//! everything and `top` above everything, with `tt` and `ff` incomparable.
//! In the truth order `ff` is the bottom and `tt` the top, with `bot` and
//! `top` incomparable. All operators are lattice bounds in one of the two
//! orders and are stored as 4x4 tables; the unit tests re-derive every table
//! from the order relations.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// An element of **Four**.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Four {
    #[serde(rename = "bot")]
    Bottom,
    #[serde(rename = "tt")]
    True,
    #[serde(rename = "ff")]
    False,
    #[serde(rename = "top")]
    Top,
}

use Four::{Bottom as B, False as F, Top as T, True as U};

// Row = left operand, column = right operand, both in `Four::ALL` order.
const JOIN_K: [[Four; 4]; 4] = [[B, U, F, T], [U, U, T, T], [F, T, F, T], [T, T, T, T]];
const MEET_K: [[Four; 4]; 4] = [[B, B, B, B], [B, U, B, U], [B, B, F, F], [B, U, F, T]];
const MEET_T: [[Four; 4]; 4] = [[B, B, F, F], [B, U, F, T], [F, F, F, F], [F, T, F, T]];
const JOIN_T: [[Four; 4]; 4] = [[B, U, B, U], [U, U, U, U], [B, U, F, T], [U, U, T, T]];
const IMPLIES: [[Four; 4]; 4] = [[B, U, F, T], [B, U, F, T], [U, U, U, U], [U, U, U, U]];
const PRIORITY: [[Four; 4]; 4] = [[B, U, F, T], [U, U, U, U], [F, F, F, F], [T, T, T, T]];

impl Four {
    pub const ALL: [Four; 4] = [Four::Bottom, Four::True, Four::False, Four::Top];

    fn idx(self) -> usize {
        match self {
            Four::Bottom => 0,
            Four::True => 1,
            Four::False => 2,
            Four::Top => 3,
        }
    }

    /// Knowledge order `<=_k`.
    pub fn leq_k(self, other: Four) -> bool {
        self == other || self == Four::Bottom || other == Four::Top
    }

    /// Truth order `<=_t`.
    pub fn leq_t(self, other: Four) -> bool {
        self == other || self == Four::False || other == Four::True
    }

    /// `oplus`: least upper bound in the knowledge order.
    pub fn join_k(self, other: Four) -> Four {
        JOIN_K[self.idx()][other.idx()]
    }

    /// `otimes`: greatest lower bound in the knowledge order.
    pub fn meet_k(self, other: Four) -> Four {
        MEET_K[self.idx()][other.idx()]
    }

    /// Conjunction: greatest lower bound in the truth order.
    pub fn meet_t(self, other: Four) -> Four {
        MEET_T[self.idx()][other.idx()]
    }

    /// Disjunction: least upper bound in the truth order.
    pub fn join_t(self, other: Four) -> Four {
        JOIN_T[self.idx()][other.idx()]
    }

    /// Negation swaps `tt` and `ff` and fixes `bot` and `top`.
    pub fn neg(self) -> Four {
        match self {
            Four::True => Four::False,
            Four::False => Four::True,
            v => v,
        }
    }

    /// `p1 => p2` is `p2` when `p1 <=_k tt`, and `tt` otherwise.
    pub fn implies(self, other: Four) -> Four {
        IMPLIES[self.idx()][other.idx()]
    }

    /// `p1 > p2` is `p1` unless `p1` is `bot`.
    pub fn priority(self, other: Four) -> Four {
        PRIORITY[self.idx()][other.idx()]
    }

    /// Maps a recommendation to an access decision: allowed iff `f <=_k tt`.
    pub fn grant(self) -> bool {
        self.leq_k(Four::True)
    }

    pub fn from_bool(b: bool) -> Four {
        if b {
            Four::True
        } else {
            Four::False
        }
    }

    /// `Some` for the two classical values.
    pub fn as_bool(self) -> Option<bool> {
        match self {
            Four::True => Some(true),
            Four::False => Some(false),
            _ => None,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Four::Bottom => "bot",
            Four::True => "tt",
            Four::False => "ff",
            Four::Top => "top",
        }
    }
}

impl fmt::Display for Four {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Four {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bot" => Ok(Four::Bottom),
            "tt" => Ok(Four::True),
            "ff" => Ok(Four::False),
            "top" => Ok(Four::Top),
            other => Err(format!("unknown Belnap value `{other}`")),
        }
    }
}

/// Binary connectives shared by policies and recommendations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Connective {
    Oplus,
    Otimes,
    Implies,
    Priority,
    And,
    Or,
}

impl Connective {
    pub const ALL: [Connective; 6] = [
        Connective::Oplus,
        Connective::Otimes,
        Connective::Implies,
        Connective::Priority,
        Connective::And,
        Connective::Or,
    ];

    pub fn apply(self, a: Four, b: Four) -> Four {
        match self {
            Connective::Oplus => a.join_k(b),
            Connective::Otimes => a.meet_k(b),
            Connective::Implies => a.implies(b),
            Connective::Priority => a.priority(b),
            Connective::And => a.meet_t(b),
            Connective::Or => a.join_t(b),
        }
    }

    /// Concrete-syntax keyword.
    pub fn keyword(self) -> &'static str {
        match self {
            Connective::Oplus => "oplus",
            Connective::Otimes => "otimes",
            Connective::Implies => "implies",
            Connective::Priority => "pref",
            Connective::And => "and",
            Connective::Or => "or",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Connective> {
        Connective::ALL.into_iter().find(|c| c.keyword() == s)
    }

    /// Whether a granted result forces the left operand to be granted too,
    /// i.e. `grant(a op b) => grant(a)` for every `a`, `b`.
    pub fn grant_forces_left(self) -> bool {
        Four::ALL
            .iter()
            .all(|&a| Four::ALL.iter().all(|&b| !self.apply(a, b).grant() || a.grant()))
    }

    /// Whether `grant(a op b) => grant(b)` for every `a`, `b`.
    pub fn grant_forces_right(self) -> bool {
        Four::ALL
            .iter()
            .all(|&a| Four::ALL.iter().all(|&b| !self.apply(a, b).grant() || b.grant()))
    }
}

impl fmt::Display for Connective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}
