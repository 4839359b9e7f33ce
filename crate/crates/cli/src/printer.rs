//! Canonical text form of a parsed program. Printing then reparsing yields a
//! semantically identical program; printing is idempotent on its own output.

use crate::ast::*;
use std::fmt::Write;

pub fn print(spec: &SystemSpec) -> String {
    let mut out = String::new();
    for def in &spec.maps {
        write!(out, "map {} = pl [", def.name.node).unwrap();
        for (i, (x, y)) in def.nodes.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            write!(out, "({},{})", x.node, y.node).unwrap();
        }
        out.push_str("]\n");
    }
    for def in &spec.seqs {
        write!(out, "seq {} = ", def.name.node).unwrap();
        match &def.rule {
            SeqRuleAst::Cycle(names) => {
                out.push_str("cycle");
                for n in names {
                    write!(out, " {}", n.node).unwrap();
                }
            }
            SeqRuleAst::Constant(n) => write!(out, "constant {}", n.node).unwrap(),
            SeqRuleAst::Prefix { prefix, tail } => {
                out.push_str("prefix");
                for n in prefix {
                    write!(out, " {}", n.node).unwrap();
                }
                out.push_str(" then ");
                match tail {
                    TailAst::Cycle(names) => {
                        out.push_str("cycle");
                        for n in names {
                            write!(out, " {}", n.node).unwrap();
                        }
                    }
                    TailAst::Constant(n) => write!(out, "constant {}", n.node).unwrap(),
                }
            }
        }
        out.push('\n');
    }
    for def in &spec.sets {
        write!(out, "set {} = ", def.name.node).unwrap();
        for (i, iv) in def.parts.iter().enumerate() {
            if i > 0 {
                out.push_str(" + ");
            }
            print_interval(&mut out, iv);
        }
        out.push('\n');
    }
    for q in &spec.queries {
        out.push_str("query ");
        match q {
            QueryAst::HitSet { seq, u, v, opts } => {
                write!(out, "hitset {} {} {}", seq.node, u.node, v.node).unwrap();
                print_opts(&mut out, opts);
            }
            QueryAst::Classify { kind, seq, opts } => {
                write!(out, "classify {} {}", kind.word(), seq.node).unwrap();
                print_opts(&mut out, opts);
            }
            QueryAst::Compose { outer, inner } => {
                write!(out, "compose {} {}", outer.node, inner.node).unwrap();
            }
            QueryAst::Invariant { map, interval } => {
                write!(out, "invariant {} ", map.node).unwrap();
                print_interval(&mut out, interval);
            }
            QueryAst::VerifyPaper => out.push_str("verify_paper"),
        }
        out.push('\n');
    }
    out
}

fn print_interval(out: &mut String, iv: &IntervalAst) {
    if iv.lo.node == iv.hi.node && iv.lo_closed && iv.hi_closed {
        write!(out, "{{{}}}", iv.lo.node).unwrap();
        return;
    }
    write!(
        out,
        "{}{},{}{}",
        if iv.lo_closed { '[' } else { '(' },
        iv.lo.node,
        iv.hi.node,
        if iv.hi_closed { ']' } else { ')' },
    )
    .unwrap();
}

fn print_opts(out: &mut String, opts: &[OptAst]) {
    for opt in opts {
        match &opt.value {
            OptValue::Number(r) => write!(out, " {}={}", opt.name.node, r.node).unwrap(),
            OptValue::Word(w) => write!(out, " {}={}", opt.name.node, w.node).unwrap(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    #[test]
    fn print_parse_round_trip_is_stable() {
        let src = "\
map tent = pl [(0,0),(1/2,1),(1,0)]
map g = pl [(0,1/2),(1/4,0),(1/2,1),(1,0)]
seq a = cycle tent g
seq b = prefix g then constant tent
seq c = prefix g tent then cycle g tent
set u = (0,1/4) + [1/2,3/4) + {7/8}
query hitset a u u horizon=100 family=syndetic
query classify ergodic b depth=3 density_threshold=1/50
query compose g tent
query invariant tent [0,1]
query verify_paper
";
        let p1 = parse(src).expect("clean parse");
        let out1 = print(&p1);
        let p2 = parse(&out1).expect("printed form reparses");
        let out2 = print(&p2);
        assert_eq!(out1, out2, "printing is idempotent");
        // semantic equality: same definitions and queries modulo spans
        assert_eq!(out1, print(&p1));
        assert_eq!(p1.maps.len(), p2.maps.len());
        assert_eq!(p1.queries.len(), p2.queries.len());
    }
}
