//! PDDL frontend: a typed-free STRIPS subset with additive `total-cost`
//! effects. The supported grammar is documented in `docs/pddl-subset.md`;
//! anything outside it is rejected with a named `feature-unsupported`
//! error rather than silently misparsed.

mod ground;
mod lexer;
mod parser;
mod render;

pub use ground::{ground, ground_domain, ground_problem, GroundError, GroundedDomain};
pub use parser::{parse_action, parse_domain, parse_problem};
pub use render::{render_domain, render_problem};

use std::fmt;

/// The repository's blockworld domain text; `pick` follows the published
/// three-parameter shape extended with slot bookkeeping effects.
pub const BLOCKWORLD_DOMAIN: &str = include_str!("blockworld.pddl");

#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn name(&self) -> &str {
        match self {
            Term::Var(s) | Term::Const(s) => s,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A positive literal: predicate applied to terms.
#[derive(Debug, Clone, PartialEq)]
pub struct Literal {
    pub pred: String,
    pub args: Vec<Term>,
}

/// The cost added by an action: a constant or a function term resolved at
/// grounding time (the `move-cost` placeholder).
#[derive(Debug, Clone, PartialEq)]
pub enum CostExpr {
    Constant(f64),
    Function { name: String, args: Vec<Term> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActionSchema {
    pub name: String,
    pub params: Vec<String>,
    pub precondition: Vec<Literal>,
    pub add: Vec<Literal>,
    pub del: Vec<Literal>,
    pub cost: CostExpr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PddlDomain {
    pub name: String,
    pub predicates: Vec<(String, usize)>,
    pub actions: Vec<ActionSchema>,
}

impl PddlDomain {
    pub fn action(&self, name: &str) -> Option<&ActionSchema> {
        self.actions.iter().find(|a| a.name == name)
    }
}

/// A parsed problem file: constants, initial literals, function value
/// assignments from `(= (fn args) value)`, and a conjunctive goal.
#[derive(Debug, Clone, PartialEq)]
pub struct PddlProblem {
    pub name: String,
    pub domain: String,
    pub objects: Vec<String>,
    pub init: Vec<Literal>,
    pub function_values: Vec<(String, Vec<String>, f64)>,
    pub goal: Vec<Literal>,
}

/// A ground atom.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fact {
    pub pred: String,
    pub args: Vec<String>,
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.pred)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        write!(f, ")")
    }
}

/// A fully instantiated action over the indexed fact universe.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundAction {
    pub schema: String,
    pub args: Vec<String>,
    /// Sorted fact indices.
    pub pre: Vec<u32>,
    pub add: Vec<u32>,
    pub del: Vec<u32>,
    pub cost: f64,
}

impl GroundAction {
    pub fn name(&self) -> String {
        format!("({} {})", self.schema, self.args.join(" "))
    }
}

/// The grounded planning problem: indexed facts, instantiated actions, an
/// initial fact set, and a conjunctive goal.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundedProblem {
    pub facts: Vec<Fact>,
    pub actions: Vec<GroundAction>,
    pub init: Vec<u32>,
    pub goal: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParseErrorKind {
    Syntax { expected: String, found: String },
    Unsupported { construct: String },
}

/// Parse failure with a source span.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{line}:{col}: {}", match &self.kind {
    ParseErrorKind::Syntax { expected, found } => format!("expected {expected}, found {found}"),
    ParseErrorKind::Unsupported { construct } => format!("unsupported construct: {construct}"),
})]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub fn is_unsupported(&self) -> bool {
        matches!(self.kind, ParseErrorKind::Unsupported { .. })
    }
}
