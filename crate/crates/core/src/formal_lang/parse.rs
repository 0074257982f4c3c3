use std::fmt;

use thiserror::Error;

use super::{is_identifier, Connective, Formula, Probability, Term};

/// A parse failure at a byte offset, with the set of tokens that would have
/// been accepted there.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("syntax error at byte {offset}: expected {}, found {found}", .expected.join(" | "))]
pub struct SyntaxError {
    pub offset: usize,
    pub expected: Vec<String>,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Number(u64),
    LParen,
    RParen,
    Dot,
    Comma,
    Bang,
    Equals,
    Slash,
    Conn(Connective),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Number(n) => write!(f, "`{n}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Bang => f.write_str("`!`"),
            Tok::Equals => f.write_str("`=`"),
            Tok::Slash => f.write_str("`/`"),
            Tok::Conn(c) => write!(f, "`{}`", c.glyph()),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let is_word = |b: u8| b.is_ascii_alphanumeric();
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        let tok = match b {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'.' => Tok::Dot,
            b',' => Tok::Comma,
            b'=' => Tok::Equals,
            b'&' => Tok::Conn(Connective::And),
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Conn(Connective::Implies)
            }
            b'|' if bytes.get(i + 1) == Some(&b'/') => {
                i += 1;
                Tok::Conn(Connective::Sheffer)
            }
            b'/' => Tok::Slash,
            b'!' if bytes.get(i + 1) == Some(&b'v')
                && !bytes.get(i + 2).copied().is_some_and(is_word) =>
            {
                i += 1;
                Tok::Conn(Connective::Pierce)
            }
            b'!' => Tok::Bang,
            b if b.is_ascii_digit() => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let digits = &text[start..i];
                let n = digits.parse().map_err(|_| SyntaxError {
                    offset: start,
                    expected: vec!["number below 2^64".into()],
                    found: format!("`{digits}`"),
                })?;
                out.push((start, Tok::Number(n)));
                continue;
            }
            b if b.is_ascii_alphabetic() => {
                while i < bytes.len() && is_word(bytes[i]) {
                    i += 1;
                }
                let word = &text[start..i];
                let tok = if word == "v" {
                    Tok::Conn(Connective::Or)
                } else {
                    Tok::Ident(word.to_string())
                };
                out.push((start, tok));
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(SyntaxError {
                    offset: start,
                    expected: vec!["formula token".into()],
                    found: format!("`{ch}`"),
                });
            }
        };
        i += 1;
        out.push((start, tok));
    }
    out.push((text.len(), Tok::Eof));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn peek_at(&self, ahead: usize) -> &Tok {
        let i = (self.pos + ahead).min(self.toks.len() - 1);
        &self.toks[i].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &[&str]) -> Result<T, SyntaxError> {
        Err(SyntaxError {
            offset: self.offset(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().to_string(),
        })
    }

    fn expect(&mut self, tok: Tok, name: &str) -> Result<(), SyntaxError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(&[name])
        }
    }

    fn keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn identifier(&mut self) -> Result<String, SyntaxError> {
        match self.peek() {
            Tok::Ident(s) if is_identifier(s) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => self.error(&["identifier"]),
        }
    }

    fn term(&mut self) -> Result<Term, SyntaxError> {
        let offset = self.offset();
        let name = self.identifier()?;
        Term::from_name(name.clone()).map_err(|_| SyntaxError {
            offset,
            expected: vec!["term".into()],
            found: format!("`{name}`"),
        })
    }

    fn number(&mut self) -> Result<u64, SyntaxError> {
        match *self.peek() {
            Tok::Number(n) => {
                self.bump();
                Ok(n)
            }
            _ => self.error(&["number"]),
        }
    }

    fn formula(&mut self) -> Result<Formula, SyntaxError> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.formula()?))
            }
            Tok::LParen => {
                self.bump();
                let left = self.formula()?;
                match self.peek().clone() {
                    Tok::RParen => {
                        self.bump();
                        Ok(left)
                    }
                    Tok::Conn(c) => {
                        self.bump();
                        let right = self.formula()?;
                        self.expect(Tok::RParen, "`)`")?;
                        Ok(Formula::binary(c, left, right))
                    }
                    _ => self.error(&["`)`", "`->`", "`&`", "`v`", "`|/`", "`!v`"]),
                }
            }
            Tok::Ident(kw) if kw == "forall" || kw == "exists" => {
                self.bump();
                let var = self.variable()?;
                self.expect(Tok::Dot, "`.`")?;
                let body = self.formula()?;
                Ok(if kw == "forall" {
                    Formula::forall(&var, body)
                } else {
                    Formula::exists(&var, body)
                })
            }
            Tok::Ident(kw) if kw == "wh" => {
                self.bump();
                let var = self.variable()?;
                self.expect(Tok::Dot, "`.`")?;
                self.expect(Tok::LParen, "`(`")?;
                let restrictor = self.formula()?;
                self.expect(Tok::Comma, "`,`")?;
                let body = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Formula::wh(&var, restrictor, body))
            }
            Tok::Ident(kw) if kw == "prob" => {
                self.bump();
                self.expect(Tok::LParen, "`(`")?;
                let event = self.identifier()?;
                self.expect(Tok::RParen, "`)`")?;
                self.expect(Tok::Equals, "`=`")?;
                let offset = self.offset();
                let n = self.number()?;
                self.expect(Tok::Slash, "`/`")?;
                let d = self.number()?;
                let p = Probability::new(n, d).map_err(|e| SyntaxError {
                    offset,
                    expected: vec!["probability in [0,1]".into()],
                    found: e.to_string(),
                })?;
                Ok(Formula::prob(&event, p))
            }
            Tok::Ident(_) => self.atom(),
            _ => self.error(&[
                "`!`",
                "`(`",
                "`forall`",
                "`exists`",
                "`wh`",
                "`prob`",
                "identifier",
            ]),
        }
    }

    fn variable(&mut self) -> Result<String, SyntaxError> {
        let offset = self.offset();
        let name = self.identifier()?;
        if name.starts_with(|c: char| c.is_ascii_lowercase()) {
            Ok(name)
        } else {
            Err(SyntaxError {
                offset,
                expected: vec!["variable".into()],
                found: format!("`{name}`"),
            })
        }
    }

    fn atom(&mut self) -> Result<Formula, SyntaxError> {
        if self.keyword("in") {
            return self.error(&["identifier"]);
        }
        let first_is_name = |t: &Tok| matches!(t, Tok::Ident(s) if is_identifier(s));
        if matches!(self.peek_at(1), Tok::Ident(s) if s == "in") {
            let subject = self.term()?;
            self.bump();
            let predicate = self.identifier()?;
            return Ok(Formula::member(subject, &predicate));
        }
        if first_is_name(self.peek_at(1)) && first_is_name(self.peek_at(2)) {
            let subject = self.term()?;
            let relation = self.identifier()?;
            let object = self.term()?;
            return Ok(Formula::relation(subject, &relation, object));
        }
        let symbol = self.identifier()?;
        Ok(Formula::atom(&symbol))
    }
}

/// Parses the concrete formula syntax. Only prefix quantifiers are accepted.
pub fn parse_formula(text: &str) -> Result<Formula, SyntaxError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return p.error(&["end of input"]);
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn universal_with_relation() {
        let f = parse_formula("forall x. (x in H -> J S x)").unwrap();
        let expected = Formula::forall(
            "x",
            Formula::implies(
                Formula::member(Term::var("x"), "H"),
                Formula::relation(Term::constant("J"), "S", Term::var("x")),
            ),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn parenthesized_atom() {
        assert_eq!(
            parse_formula("(x in H)").unwrap(),
            Formula::member(Term::var("x"), "H")
        );
    }

    #[test]
    fn probability_assertion() {
        assert_eq!(
            parse_formula("prob(snow) = 4/5").unwrap(),
            Formula::prob("snow", Probability::new(4, 5).unwrap())
        );
        assert!(parse_formula("prob(snow) = 6/5").is_err());
    }

    #[test]
    fn both_single_connective_glyphs() {
        let f = parse_formula("((p |/ q) !v !v)").unwrap_err();
        assert_eq!(f.offset, 13);
        let f = parse_formula("((p |/ q) !v !(r))").unwrap();
        assert_eq!(
            f,
            Formula::pierce(
                Formula::sheffer(Formula::atom("p"), Formula::atom("q")),
                Formula::not(Formula::atom("r"))
            )
        );
    }

    #[test]
    fn wh_query() {
        let f = parse_formula("wh x. (x in H, J S x)").unwrap();
        assert!(matches!(f, Formula::WhQuery { .. }));
    }

    #[test]
    fn binary_needs_parentheses() {
        let e = parse_formula("p & q").unwrap_err();
        assert_eq!(e.offset, 2);
        assert_eq!(e.expected, vec!["end of input".to_string()]);
    }

    #[test]
    fn error_reports_offset_and_expectations() {
        let e = parse_formula("forall X. p").unwrap_err();
        assert_eq!(e.offset, 7);
        let e = parse_formula("(p -> )").unwrap_err();
        assert_eq!(e.offset, 6);
        assert!(e.expected.iter().any(|t| t == "`(`"));
        let e = parse_formula("p $").unwrap_err();
        assert_eq!(e.offset, 2);
        assert!(parse_formula("").is_err());
    }

    #[test]
    fn reserved_or_is_not_a_relation() {
        let f = parse_formula("(p v q)").unwrap();
        assert_eq!(f, Formula::or(Formula::atom("p"), Formula::atom("q")));
    }
}
