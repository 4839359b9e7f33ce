//! Hand-written lexer with 1-based line/column tracking.
//!
//! Rationals are integer or `p/q` literals (optionally negative, so that
//! out-of-range node values in audited sources still lex and get a positioned
//! range diagnostic from the validator instead of a lexer error). `#` starts a
//! comment to end of line.

use crate::ast::{Diagnostic, Span};
use num::BigInt;
use pldyn::interval::Rat;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Number(Rat),
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Equals,
    Plus,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => s.clone(),
            Tok::Number(r) => r.to_string(),
            Tok::LParen => "(".into(),
            Tok::RParen => ")".into(),
            Tok::LBracket => "[".into(),
            Tok::RBracket => "]".into(),
            Tok::LBrace => "{".into(),
            Tok::RBrace => "}".into(),
            Tok::Comma => ",".into(),
            Tok::Equals => "=".into(),
            Tok::Plus => "+".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub fn lex(source: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut tokens = Vec::new();
    let mut diags = Vec::new();
    for (line_idx, line) in source.lines().enumerate() {
        let line_no = line_idx as u32 + 1;
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0usize;
        while i < chars.len() {
            let c = chars[i];
            let span = Span { line: line_no, col: i as u32 + 1 };
            match c {
                '#' => break,
                c if c.is_whitespace() => {
                    i += 1;
                }
                '(' => {
                    tokens.push(Token { tok: Tok::LParen, span });
                    i += 1;
                }
                ')' => {
                    tokens.push(Token { tok: Tok::RParen, span });
                    i += 1;
                }
                '[' => {
                    tokens.push(Token { tok: Tok::LBracket, span });
                    i += 1;
                }
                ']' => {
                    tokens.push(Token { tok: Tok::RBracket, span });
                    i += 1;
                }
                '{' => {
                    tokens.push(Token { tok: Tok::LBrace, span });
                    i += 1;
                }
                '}' => {
                    tokens.push(Token { tok: Tok::RBrace, span });
                    i += 1;
                }
                ',' => {
                    tokens.push(Token { tok: Tok::Comma, span });
                    i += 1;
                }
                '=' => {
                    tokens.push(Token { tok: Tok::Equals, span });
                    i += 1;
                }
                '+' => {
                    tokens.push(Token { tok: Tok::Plus, span });
                    i += 1;
                }
                c if c.is_ascii_digit() || (c == '-' && matches!(chars.get(i + 1), Some(d) if d.is_ascii_digit())) => {
                    let start = i;
                    i += 1; // sign or first digit
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    let mut text: String = chars[start..i].iter().collect();
                    // after a malformed literal a zero placeholder keeps the
                    // parse on track, so the defect yields exactly one
                    // diagnostic
                    if chars.get(i) == Some(&'/') {
                        let denom_start = i + 1;
                        let mut j = denom_start;
                        while j < chars.len() && chars[j].is_ascii_digit() {
                            j += 1;
                        }
                        if j == denom_start {
                            diags.push(Diagnostic {
                                span,
                                message: "malformed rational: missing denominator".into(),
                                token: format!("{text}/"),
                            });
                            tokens.push(Token { tok: Tok::Number(Rat::default()), span });
                            i += 1;
                            continue;
                        }
                        let denom: String = chars[denom_start..j].iter().collect();
                        if BigInt::from_str(&denom).map(|d| d == BigInt::from(0)).unwrap_or(true) {
                            diags.push(Diagnostic {
                                span,
                                message: "malformed rational: zero denominator".into(),
                                token: format!("{text}/{denom}"),
                            });
                            tokens.push(Token { tok: Tok::Number(Rat::default()), span });
                            i = j;
                            continue;
                        }
                        text.push('/');
                        text.push_str(&denom);
                        i = j;
                    }
                    match Rat::from_str(&text) {
                        Ok(r) => tokens.push(Token { tok: Tok::Number(r), span }),
                        Err(_) => {
                            diags.push(Diagnostic {
                                span,
                                message: "malformed rational".into(),
                                token: text,
                            });
                            tokens.push(Token { tok: Tok::Number(Rat::default()), span });
                        }
                    }
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let start = i;
                    while i < chars.len()
                        && (chars[i].is_ascii_alphanumeric() || chars[i] == '_')
                    {
                        i += 1;
                    }
                    let word: String = chars[start..i].iter().collect();
                    tokens.push(Token { tok: Tok::Ident(word), span });
                }
                other => {
                    diags.push(Diagnostic {
                        span,
                        message: "unexpected character".into(),
                        token: other.to_string(),
                    });
                    i += 1;
                }
            }
        }
    }
    (tokens, diags)
}

#[cfg(test)]
mod tests {
    use super::*;
    use pldyn::interval::rat;

    #[test]
    fn lexes_rationals_and_punctuation() {
        let (toks, diags) = lex("map t = pl [(0,0),(1/2,1)] # tent head");
        assert!(diags.is_empty());
        assert_eq!(toks[0].tok, Tok::Ident("map".into()));
        assert!(toks.iter().any(|t| t.tok == Tok::Number(rat(1, 2))));
        // comment swallowed
        assert!(!toks.iter().any(|t| matches!(&t.tok, Tok::Ident(w) if w == "tent")));
    }

    #[test]
    fn negative_rationals_lex_for_the_validator() {
        let (toks, diags) = lex("(-2/3, -4)");
        assert!(diags.is_empty());
        assert!(toks.iter().any(|t| t.tok == Tok::Number(rat(-2, 3))));
        assert!(toks.iter().any(|t| t.tok == Tok::Number(rat(-4, 1))));
    }

    #[test]
    fn zero_denominator_is_a_positioned_diagnostic() {
        let (_, diags) = lex("map t = pl [(1/0,0)]");
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].span, Span { line: 1, col: 14 });
        assert!(diags[0].message.contains("zero denominator"));
    }

    #[test]
    fn stray_character_is_reported_with_position() {
        let (_, diags) = lex("set U = (0,1) ;");
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].token, ";");
        assert_eq!(diags[0].span.col, 15);
    }
}
