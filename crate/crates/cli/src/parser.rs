//! Recursive-descent parser and validator for the system-specification DSL.
//!
//! Grammar (see docs/dsl.md for the full EBNF):
//!
//! ```text
//! statement  = "map" name "=" "pl" "[" node {"," node} "]"
//!            | "seq" name "=" ("cycle" name+ | "constant" name
//!                              | "prefix" name+ "then" tail)
//!            | "set" name "=" interval {"+" interval}
//!            | "query" ("hitset" name name name {opt}
//!                      | "classify" kind name {opt}
//!                      | "compose" name name
//!                      | "invariant" name interval
//!                      | "verify_paper")
//! ```
//!
//! Parsing collects every diagnostic it can (recovering at statement
//! boundaries) and never silently accepts a partial input: any diagnostic
//! fails the whole parse. Validation checks the self-map rules per node with
//! the node's own source position, resolves every referenced name, and checks
//! query options.

use crate::ast::*;
use crate::lexer::{lex, Tok, Token};
use num::{One, Signed, Zero};
use pldyn::interval::Rat;

const STATEMENT_WORDS: [&str; 4] = ["map", "seq", "set", "query"];
const RESERVED: [&str; 15] = [
    "map", "seq", "set", "query", "pl", "cycle", "constant", "prefix", "then", "hitset",
    "classify", "compose", "invariant", "verify_paper", "union",
];

pub fn parse(source: &str) -> Result<SystemSpec, Vec<Diagnostic>> {
    let (tokens, mut diags) = lex(source);
    let mut p = Parser { toks: tokens, pos: 0, diags: Vec::new() };
    let spec = p.program();
    diags.extend(p.diags);
    // semantic validation only on a structurally clean parse, so lexical and
    // grammatical defects do not cascade into spurious semantic diagnostics
    if diags.is_empty() {
        diags.extend(validate(&spec));
    }
    if diags.is_empty() {
        Ok(spec)
    } else {
        diags.sort_by_key(|d| (d.span.line, d.span.col));
        Err(diags)
    }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    diags: Vec<Diagnostic>,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn peek2(&self) -> Option<&Token> {
        self.toks.get(self.pos + 1)
    }

    fn last_span(&self) -> Span {
        self.toks
            .get(self.pos.saturating_sub(1))
            .map(|t| t.span)
            .unwrap_or_default()
    }

    fn error_here(&mut self, message: impl Into<String>) {
        let (span, token) = match self.peek() {
            Some(t) => (t.span, t.tok.describe()),
            None => (self.last_span(), String::new()),
        };
        self.diags.push(Diagnostic { span, message: message.into(), token });
    }

    /// Skips to the next statement keyword after an error.
    fn recover(&mut self) {
        while let Some(t) = self.peek() {
            if let Tok::Ident(w) = &t.tok {
                if STATEMENT_WORDS.contains(&w.as_str()) {
                    return;
                }
            }
            self.pos += 1;
        }
    }

    fn keyword(&mut self, word: &str) -> bool {
        if let Some(Token { tok: Tok::Ident(w), .. }) = self.peek() {
            if w == word {
                self.pos += 1;
                return true;
            }
        }
        self.error_here(format!("expected '{word}'"));
        false
    }

    fn punct(&mut self, tok: Tok, what: &str) -> bool {
        if self.peek().map(|t| &t.tok) == Some(&tok) {
            self.pos += 1;
            return true;
        }
        self.error_here(format!("expected '{what}'"));
        false
    }

    fn name(&mut self, what: &str) -> Option<Sp<String>> {
        match self.peek() {
            Some(Token { tok: Tok::Ident(w), span }) => {
                let (w, span) = (w.clone(), *span);
                if RESERVED.contains(&w.as_str()) {
                    self.diags.push(Diagnostic {
                        span,
                        message: format!("reserved word cannot be used as {what}"),
                        token: w,
                    });
                    self.pos += 1;
                    return None;
                }
                self.pos += 1;
                Some(Sp::new(w, span))
            }
            _ => {
                self.error_here(format!("expected {what}"));
                None
            }
        }
    }

    fn number(&mut self) -> Option<Sp<Rat>> {
        match self.peek() {
            Some(Token { tok: Tok::Number(r), span }) => {
                let out = Sp::new(r.clone(), *span);
                self.pos += 1;
                Some(out)
            }
            _ => {
                self.error_here("expected a rational number");
                None
            }
        }
    }

    fn program(&mut self) -> SystemSpec {
        let mut spec = SystemSpec::default();
        while let Some(t) = self.peek() {
            let word = match &t.tok {
                Tok::Ident(w) => w.clone(),
                _ => {
                    self.error_here("expected a statement (map, seq, set or query)");
                    self.pos += 1;
                    self.recover();
                    continue;
                }
            };
            let before = self.diags.len();
            match word.as_str() {
                "map" => {
                    if let Some(def) = self.map_def() {
                        spec.maps.push(def);
                    }
                }
                "seq" => {
                    if let Some(def) = self.seq_def() {
                        spec.seqs.push(def);
                    }
                }
                "set" => {
                    if let Some(def) = self.set_def() {
                        spec.sets.push(def);
                    }
                }
                "query" => {
                    if let Some(q) = self.query() {
                        spec.queries.push(q);
                    }
                }
                _ => {
                    self.error_here("expected a statement (map, seq, set or query)");
                    self.pos += 1;
                }
            }
            if self.diags.len() > before {
                self.recover();
            }
        }
        spec
    }

    fn map_def(&mut self) -> Option<MapDef> {
        self.keyword("map");
        let name = self.name("a map name")?;
        if !self.punct(Tok::Equals, "=") || !self.keyword("pl") || !self.punct(Tok::LBracket, "[")
        {
            return None;
        }
        let mut nodes = Vec::new();
        loop {
            if !self.punct(Tok::LParen, "(") {
                return None;
            }
            let x = self.number()?;
            self.punct(Tok::Comma, ",");
            let y = self.number()?;
            if !self.punct(Tok::RParen, ")") {
                return None;
            }
            nodes.push((x, y));
            match self.peek().map(|t| &t.tok) {
                Some(Tok::Comma) => {
                    self.pos += 1;
                }
                Some(Tok::RBracket) => {
                    self.pos += 1;
                    break;
                }
                _ => {
                    self.error_here("expected ',' or ']' in node list");
                    return None;
                }
            }
        }
        Some(MapDef { name, nodes })
    }

    fn name_list(&mut self, what: &str) -> Vec<Sp<String>> {
        let mut names = Vec::new();
        loop {
            match self.peek() {
                Some(Token { tok: Tok::Ident(w), .. })
                    if !STATEMENT_WORDS.contains(&w.as_str()) && w != "then" =>
                {
                    if let Some(n) = self.name(what) {
                        names.push(n);
                    }
                }
                _ => break,
            }
        }
        if names.is_empty() {
            self.error_here(format!("expected at least one {what}"));
        }
        names
    }

    fn tail_rule(&mut self) -> Option<TailAst> {
        match self.peek() {
            Some(Token { tok: Tok::Ident(w), .. }) if w == "cycle" => {
                self.pos += 1;
                Some(TailAst::Cycle(self.name_list("map name")))
            }
            Some(Token { tok: Tok::Ident(w), .. }) if w == "constant" => {
                self.pos += 1;
                Some(TailAst::Constant(self.name("a map name")?))
            }
            _ => {
                self.error_here("expected 'cycle' or 'constant'");
                None
            }
        }
    }

    fn seq_def(&mut self) -> Option<SeqDef> {
        self.keyword("seq");
        let name = self.name("a sequence name")?;
        if !self.punct(Tok::Equals, "=") {
            return None;
        }
        let rule = match self.peek() {
            Some(Token { tok: Tok::Ident(w), .. }) if w == "cycle" => {
                self.pos += 1;
                SeqRuleAst::Cycle(self.name_list("map name"))
            }
            Some(Token { tok: Tok::Ident(w), .. }) if w == "constant" => {
                self.pos += 1;
                SeqRuleAst::Constant(self.name("a map name")?)
            }
            Some(Token { tok: Tok::Ident(w), .. }) if w == "prefix" => {
                self.pos += 1;
                let prefix = self.name_list("map name");
                if !self.keyword("then") {
                    return None;
                }
                let tail = self.tail_rule()?;
                SeqRuleAst::Prefix { prefix, tail }
            }
            _ => {
                self.error_here("expected 'cycle', 'constant' or 'prefix'");
                return None;
            }
        };
        Some(SeqDef { name, rule })
    }

    fn interval(&mut self) -> Option<IntervalAst> {
        match self.peek().map(|t| t.tok.clone()) {
            Some(Tok::LBrace) => {
                self.pos += 1;
                let x = self.number()?;
                if !self.punct(Tok::RBrace, "}") {
                    return None;
                }
                Some(IntervalAst { lo: x.clone(), hi: x, lo_closed: true, hi_closed: true })
            }
            Some(Tok::LParen) | Some(Tok::LBracket) => {
                let lo_closed = self.peek().map(|t| t.tok == Tok::LBracket).unwrap_or(false);
                self.pos += 1;
                let lo = self.number()?;
                self.punct(Tok::Comma, ",");
                let hi = self.number()?;
                let hi_closed = match self.peek().map(|t| t.tok.clone()) {
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        false
                    }
                    Some(Tok::RBracket) => {
                        self.pos += 1;
                        true
                    }
                    _ => {
                        self.error_here("expected ')' or ']'");
                        return None;
                    }
                };
                Some(IntervalAst { lo, hi, lo_closed, hi_closed })
            }
            _ => {
                self.error_here("expected an interval literal");
                None
            }
        }
    }

    fn set_def(&mut self) -> Option<SetDef> {
        self.keyword("set");
        let name = self.name("a set name")?;
        if !self.punct(Tok::Equals, "=") {
            return None;
        }
        let mut parts = vec![self.interval()?];
        while self.peek().map(|t| &t.tok) == Some(&Tok::Plus) {
            self.pos += 1;
            parts.push(self.interval()?);
        }
        Some(SetDef { name, parts })
    }

    fn options(&mut self) -> Vec<OptAst> {
        let mut opts = Vec::new();
        while let (Some(Token { tok: Tok::Ident(w), span }), Some(t2)) =
            (self.peek(), self.peek2())
        {
            if t2.tok != Tok::Equals {
                break;
            }
            let name = Sp::new(w.clone(), *span);
            self.pos += 2;
            let value = match self.peek() {
                Some(Token { tok: Tok::Number(r), span }) => {
                    let v = OptValue::Number(Sp::new(r.clone(), *span));
                    self.pos += 1;
                    v
                }
                Some(Token { tok: Tok::Ident(w), span }) => {
                    let v = OptValue::Word(Sp::new(w.clone(), *span));
                    self.pos += 1;
                    v
                }
                _ => {
                    self.error_here("expected an option value");
                    break;
                }
            };
            opts.push(OptAst { name, value });
        }
        opts
    }

    fn query(&mut self) -> Option<QueryAst> {
        self.keyword("query");
        match self.peek().map(|t| t.tok.clone()) {
            Some(Tok::Ident(w)) => match w.as_str() {
                "hitset" => {
                    self.pos += 1;
                    let seq = self.name("a sequence name")?;
                    let u = self.name("a set name")?;
                    let v = self.name("a set name")?;
                    Some(QueryAst::HitSet { seq, u, v, opts: self.options() })
                }
                "classify" => {
                    self.pos += 1;
                    let kind = match self.peek().map(|t| t.tok.clone()) {
                        Some(Tok::Ident(k)) => match k.as_str() {
                            "transitive" => ClassifyKindAst::Transitive,
                            "mixing" => ClassifyKindAst::Mixing,
                            "ergodic" => ClassifyKindAst::Ergodic,
                            _ => {
                                self.error_here(
                                    "expected 'transitive', 'mixing' or 'ergodic'",
                                );
                                return None;
                            }
                        },
                        _ => {
                            self.error_here("expected a classification kind");
                            return None;
                        }
                    };
                    self.pos += 1;
                    let seq = self.name("a sequence name")?;
                    Some(QueryAst::Classify { kind, seq, opts: self.options() })
                }
                "compose" => {
                    self.pos += 1;
                    let outer = self.name("a map name")?;
                    let inner = self.name("a map name")?;
                    Some(QueryAst::Compose { outer, inner })
                }
                "invariant" => {
                    self.pos += 1;
                    let map = self.name("a map name")?;
                    let interval = self.interval()?;
                    Some(QueryAst::Invariant { map, interval })
                }
                "verify_paper" => {
                    self.pos += 1;
                    Some(QueryAst::VerifyPaper)
                }
                _ => {
                    self.error_here(
                        "expected 'hitset', 'classify', 'compose', 'invariant' or 'verify_paper'",
                    );
                    None
                }
            },
            _ => {
                self.error_here("expected a query kind");
                None
            }
        }
    }
}

fn d(span: Span, message: String, token: String) -> Diagnostic {
    Diagnostic { span, message, token }
}

fn validate(spec: &SystemSpec) -> Vec<Diagnostic> {
    let mut diags = Vec::new();

    // duplicate definitions
    for (kind, names) in [
        ("map", spec.maps.iter().map(|d| &d.name).collect::<Vec<_>>()),
        ("seq", spec.seqs.iter().map(|d| &d.name).collect()),
        ("set", spec.sets.iter().map(|d| &d.name).collect()),
    ] {
        for (i, n) in names.iter().enumerate() {
            if names[..i].iter().any(|m| m.node == n.node) {
                diags.push(d(n.span, format!("duplicate {kind} definition"), n.node.clone()));
            }
        }
    }

    // self-map rules, per node, with the node's own position
    for def in &spec.maps {
        if def.nodes.len() < 2 {
            diags.push(d(
                def.name.span,
                "a map needs at least two nodes".into(),
                def.name.node.clone(),
            ));
            continue;
        }
        for (x, y) in &def.nodes {
            if y.node.is_negative() || y.node > Rat::one() {
                diags.push(d(
                    y.span,
                    format!("value {} at x = {} lies outside [0,1]", y.node, x.node),
                    y.node.to_string(),
                ));
            }
            if x.node.is_negative() || x.node > Rat::one() {
                diags.push(d(
                    x.span,
                    format!("node x = {} lies outside [0,1]", x.node),
                    x.node.to_string(),
                ));
            }
        }
        for w in def.nodes.windows(2) {
            if w[0].0.node >= w[1].0.node {
                diags.push(d(
                    w[1].0.span,
                    "node x-coordinates must be strictly increasing".into(),
                    w[1].0.node.to_string(),
                ));
            }
        }
        if !def.nodes[0].0.node.is_zero() {
            diags.push(d(
                def.nodes[0].0.span,
                "first node must have x = 0".into(),
                def.nodes[0].0.node.to_string(),
            ));
        }
        if def.nodes[def.nodes.len() - 1].0.node != Rat::one() {
            let last = &def.nodes[def.nodes.len() - 1].0;
            diags.push(d(last.span, "last node must have x = 1".into(), last.node.to_string()));
        }
    }

    let map_known = |n: &str| spec.maps.iter().any(|d| d.name.node == n);
    let seq_known = |n: &str| spec.seqs.iter().any(|d| d.name.node == n);
    let set_known = |n: &str| spec.sets.iter().any(|d| d.name.node == n);
    let check_map_ref = |n: &Sp<String>, diags: &mut Vec<Diagnostic>| {
        if !map_known(&n.node) {
            diags.push(Diagnostic {
                span: n.span,
                message: "unknown map name".into(),
                token: n.node.clone(),
            });
        }
    };

    for def in &spec.seqs {
        let names: Vec<&Sp<String>> = match &def.rule {
            SeqRuleAst::Cycle(ns) => ns.iter().collect(),
            SeqRuleAst::Constant(n) => vec![n],
            SeqRuleAst::Prefix { prefix, tail } => {
                let mut v: Vec<&Sp<String>> = prefix.iter().collect();
                match tail {
                    TailAst::Cycle(ns) => v.extend(ns.iter()),
                    TailAst::Constant(n) => v.push(n),
                }
                v
            }
        };
        for n in names {
            check_map_ref(n, &mut diags);
        }
    }

    let check_interval = |iv: &IntervalAst, diags: &mut Vec<Diagnostic>| {
        let degenerate_ok = iv.lo.node == iv.hi.node && iv.lo_closed && iv.hi_closed;
        if iv.lo.node > iv.hi.node || (iv.lo.node == iv.hi.node && !degenerate_ok) {
            diags.push(Diagnostic {
                span: iv.lo.span,
                message: "empty interval".into(),
                token: format!("{},{}", iv.lo.node, iv.hi.node),
            });
        }
        for e in [&iv.lo, &iv.hi] {
            if e.node.is_negative() || e.node > Rat::one() {
                diags.push(Diagnostic {
                    span: e.span,
                    message: format!("endpoint {} lies outside [0,1]", e.node),
                    token: e.node.to_string(),
                });
            }
        }
    };

    for def in &spec.sets {
        for iv in &def.parts {
            check_interval(iv, &mut diags);
        }
    }

    let check_opts = |opts: &[OptAst], allowed: &[&str], diags: &mut Vec<Diagnostic>| {
        for opt in opts {
            if !allowed.contains(&opt.name.node.as_str()) {
                diags.push(Diagnostic {
                    span: opt.name.span,
                    message: format!("unknown option (allowed: {})", allowed.join(", ")),
                    token: opt.name.node.clone(),
                });
                continue;
            }
            match (opt.name.node.as_str(), &opt.value) {
                ("horizon" | "depth" | "bound", OptValue::Number(r))
                    if r.node.is_integer() && r.node > Rat::zero() => {}
                ("horizon" | "depth" | "bound", v) => {
                    let (span, token) = opt_value_pos(v);
                    diags.push(Diagnostic {
                        span,
                        message: format!("option {} needs a positive integer", opt.name.node),
                        token,
                    });
                }
                ("family", OptValue::Word(w))
                    if ["infinite", "cofinite", "syndetic", "thick", "density"]
                        .contains(&w.node.as_str()) => {}
                ("family", v) => {
                    let (span, token) = opt_value_pos(v);
                    diags.push(Diagnostic {
                        span,
                        message:
                            "option family needs one of: infinite, cofinite, syndetic, thick, density"
                                .into(),
                        token,
                    });
                }
                ("density_threshold", OptValue::Number(r))
                    if r.node > Rat::zero() && r.node < Rat::one() => {}
                ("density_threshold", v) => {
                    let (span, token) = opt_value_pos(v);
                    diags.push(Diagnostic {
                        span,
                        message: "option density_threshold needs a rational in (0,1)".into(),
                        token,
                    });
                }
                _ => {}
            }
        }
    };

    for q in &spec.queries {
        match q {
            QueryAst::HitSet { seq, u, v, opts } => {
                if !seq_known(&seq.node) {
                    diags.push(d(seq.span, "unknown sequence name".into(), seq.node.clone()));
                }
                for s in [u, v] {
                    if !set_known(&s.node) {
                        diags.push(d(s.span, "unknown set name".into(), s.node.clone()));
                    }
                }
                check_opts(opts, &["horizon", "bound", "family", "density_threshold"], &mut diags);
            }
            QueryAst::Classify { seq, opts, .. } => {
                if !seq_known(&seq.node) {
                    diags.push(d(seq.span, "unknown sequence name".into(), seq.node.clone()));
                }
                check_opts(
                    opts,
                    &["horizon", "depth", "bound", "family", "density_threshold"],
                    &mut diags,
                );
            }
            QueryAst::Compose { outer, inner } => {
                for n in [outer, inner] {
                    check_map_ref(n, &mut diags);
                }
            }
            QueryAst::Invariant { map, interval } => {
                check_map_ref(map, &mut diags);
                check_interval(interval, &mut diags);
            }
            QueryAst::VerifyPaper => {}
        }
    }

    diags
}

fn opt_value_pos(v: &OptValue) -> (Span, String) {
    match v {
        OptValue::Number(r) => (r.span, r.node.to_string()),
        OptValue::Word(w) => (w.span, w.node.clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_small_program() {
        let src = "\
map tent = pl [(0,0),(1/2,1),(1,0)]
set U = (1/4,1/2)
set V = (1/2,3/4) + {7/8}
seq S = constant tent
query hitset S U V horizon=2000
";
        let spec = parse(src).expect("clean parse");
        assert_eq!(spec.maps.len(), 1);
        assert_eq!(spec.sets.len(), 2);
        assert_eq!(spec.sets[1].parts.len(), 2);
        assert_eq!(spec.queries.len(), 1);
        match &spec.queries[0] {
            QueryAst::HitSet { seq, opts, .. } => {
                assert_eq!(seq.node, "S");
                assert_eq!(opts.len(), 1);
                assert_eq!(opts[0].name.node, "horizon");
            }
            _ => panic!("expected hitset query"),
        }
    }

    #[test]
    fn rejects_out_of_range_node_value_with_position() {
        // a falling tail piece printed as -2-2x would pass through (1/2,-3)
        let src = "map g = pl [(0,1/2),(1/4,0),(1/2,1),(1/2,-3),(1,-4)]";
        let diags = parse(src).unwrap_err();
        let range = diags
            .iter()
            .find(|d| d.message.contains("outside [0,1]") && d.token == "-3")
            .expect("range diagnostic");
        assert!(range.message.contains("value -3 at x = 1/2"));
        assert_eq!(range.span.line, 1);
        assert!(diags.iter().any(|d| d.message.contains("strictly increasing")));
    }

    #[test]
    fn rejects_overlapping_domains_as_non_monotone() {
        // second piece declared from 1/4 after a piece ending at 1/3
        let src = "map g2 = pl [(0,0),(1/3,1),(1/4,9/8),(1,0)]";
        let diags = parse(src).unwrap_err();
        assert!(diags.iter().any(|d| d.message.contains("strictly increasing")));
        assert!(diags.iter().any(|d| d.message.contains("outside [0,1]")));
    }

    #[test]
    fn rejects_jump_and_overflow() {
        let src = "map g1 = pl [(0,1/2),(1/4,1/2),(1/4,5/6),(1,7/3)]";
        let diags = parse(src).unwrap_err();
        assert!(diags.iter().any(|d| d.message.contains("strictly increasing")));
        assert!(diags
            .iter()
            .any(|d| d.message.contains("outside [0,1]") && d.token == "7/3"));
    }

    #[test]
    fn one_diagnostic_per_seeded_defect() {
        let cases = [
            ("map m = pl [(0,0),(1,2)]", "outside [0,1]"),
            ("map m = pl [(1/4,0),(1,1)]", "first node must have x = 0"),
            ("map m = pl [(0,0),(1/2,1)]", "last node must have x = 1"),
            ("map m = pl [(0,0),(1/2,1),(1/2,0),(1,1)]", "strictly increasing"),
            ("map m = pl [(0,0),(1/0,1),(1,1)]", "zero denominator"),
            ("seq s = cycle nosuch\nmap m = pl [(0,0),(1,1)]", "unknown map name"),
            ("map m = pl [(0,0),(1,1)]\nset u = (3/4,1/4)", "empty interval"),
            (
                "map m = pl [(0,0),(1,1)]\nseq s = constant m\nset u = (0,1)\nquery hitset s u u horizon=0",
                "positive integer",
            ),
        ];
        for (src, expect) in cases {
            let diags = parse(src).unwrap_err();
            assert_eq!(diags.len(), 1, "{src}: {diags:?}");
            assert!(diags[0].message.contains(expect), "{src}: {diags:?}");
        }
    }

    #[test]
    fn unknown_names_are_positioned() {
        let src = "map m = pl [(0,0),(1,1)]\nseq s = constant m\nquery hitset s nou nov";
        let diags = parse(src).unwrap_err();
        assert_eq!(diags.len(), 2);
        assert_eq!(diags[0].token, "nou");
        assert_eq!(diags[0].span.line, 3);
    }

    #[test]
    fn recovery_reports_several_statements() {
        let src = "map a = pl [(0,0),(1,2)]\nmap b = pl [(0,0),(1,3)]";
        let diags = parse(src).unwrap_err();
        assert_eq!(diags.len(), 2);
    }

    #[test]
    fn reserved_words_cannot_name_things() {
        let diags = parse("map cycle = pl [(0,0),(1,1)]").unwrap_err();
        assert!(diags[0].message.contains("reserved word"));
    }
}
