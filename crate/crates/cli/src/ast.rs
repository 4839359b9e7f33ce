//! Source AST, spans, and diagnostics for the system-specification DSL.

use pldyn::interval::Rat;
use std::fmt;

/// 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// A positioned diagnostic; parsing never silently accepts a partial input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub span: Span,
    pub message: String,
    pub token: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.token.is_empty() {
            write!(f, "{}: {}", self.span, self.message)
        } else {
            write!(f, "{}: {} ('{}')", self.span, self.message, self.token)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sp<T> {
    pub node: T,
    pub span: Span,
}

impl<T> Sp<T> {
    pub fn new(node: T, span: Span) -> Self {
        Sp { node, span }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapDef {
    pub name: Sp<String>,
    pub nodes: Vec<(Sp<Rat>, Sp<Rat>)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TailAst {
    Cycle(Vec<Sp<String>>),
    Constant(Sp<String>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum SeqRuleAst {
    Cycle(Vec<Sp<String>>),
    Constant(Sp<String>),
    Prefix { prefix: Vec<Sp<String>>, tail: TailAst },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeqDef {
    pub name: Sp<String>,
    pub rule: SeqRuleAst,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntervalAst {
    pub lo: Sp<Rat>,
    pub hi: Sp<Rat>,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SetDef {
    pub name: Sp<String>,
    pub parts: Vec<IntervalAst>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassifyKindAst {
    Transitive,
    Mixing,
    Ergodic,
}

impl ClassifyKindAst {
    pub fn word(&self) -> &'static str {
        match self {
            ClassifyKindAst::Transitive => "transitive",
            ClassifyKindAst::Mixing => "mixing",
            ClassifyKindAst::Ergodic => "ergodic",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OptValue {
    Number(Sp<Rat>),
    Word(Sp<String>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptAst {
    pub name: Sp<String>,
    pub value: OptValue,
}

#[derive(Debug, Clone, PartialEq)]
pub enum QueryAst {
    HitSet { seq: Sp<String>, u: Sp<String>, v: Sp<String>, opts: Vec<OptAst> },
    Classify { kind: ClassifyKindAst, seq: Sp<String>, opts: Vec<OptAst> },
    Compose { outer: Sp<String>, inner: Sp<String> },
    Invariant { map: Sp<String>, interval: IntervalAst },
    VerifyPaper,
}

/// Parsed program: definitions plus the query list, in source order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SystemSpec {
    pub maps: Vec<MapDef>,
    pub seqs: Vec<SeqDef>,
    pub sets: Vec<SetDef>,
    pub queries: Vec<QueryAst>,
}
