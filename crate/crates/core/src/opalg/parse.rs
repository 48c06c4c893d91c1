//! Recursive-descent parser for operator expression strings.
//!
//! Grammar (whitespace insensitive, `*` optional between factors):
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := factor (['*'] factor)*
//! factor := scalar | 'i' | op ['^' uint] | '(' expr ')'
//! scalar := number ['/' number]
//! op     := name ['dag'] ['(' var ')']
//! name   := 'a' | 'b' | 'v' | 'v1' | 'v2' | 'd1' | 'd2'
//! var    := identifier
//! ```
//!
//! A bare name is a discrete mode; `name(var)` is a continuous mode labelled
//! by the frequency variable. Numeric literals become exact rationals, so
//! parsing, printing, and re-parsing is idempotent.

use std::fmt;

use super::expr::{ModeLabel, OpFactor, OperatorExpr, OperatorTerm};
use super::scalar::Scalar;

const MODE_NAMES: [&str; 7] = ["a", "b", "v", "v1", "v2", "d1", "d2"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at position {}: {}", self.position, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Number(Scalar),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(usize, Tok)>, ParseError> {
        let mut lx = Lexer { src: src.as_bytes(), pos: 0 };
        let mut out = Vec::new();
        loop {
            lx.skip_ws();
            if lx.pos >= lx.src.len() {
                return Ok(out);
            }
            let start = lx.pos;
            let c = lx.src[lx.pos];
            let tok = match c {
                b'+' => {
                    lx.pos += 1;
                    Tok::Plus
                }
                b'-' => {
                    lx.pos += 1;
                    Tok::Minus
                }
                b'*' => {
                    lx.pos += 1;
                    Tok::Star
                }
                b'/' => {
                    lx.pos += 1;
                    Tok::Slash
                }
                b'^' => {
                    lx.pos += 1;
                    Tok::Caret
                }
                b'(' => {
                    lx.pos += 1;
                    Tok::LParen
                }
                b')' => {
                    lx.pos += 1;
                    Tok::RParen
                }
                b'0'..=b'9' => lx.number(start)?,
                c if c.is_ascii_alphabetic() || c == b'_' => lx.ident(),
                _ => {
                    return Err(ParseError {
                        position: start,
                        message: format!("unexpected character '{}'", c as char),
                    })
                }
            };
            out.push((start, tok));
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn number(&mut self, start: usize) -> Result<Tok, ParseError> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let int_part = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let mut frac_part = "";
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            let fstart = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if self.pos == fstart {
                return Err(ParseError {
                    position: self.pos,
                    message: "expected digits after decimal point".to_string(),
                });
            }
            frac_part = std::str::from_utf8(&self.src[fstart..self.pos]).unwrap();
        }
        let scalar = Scalar::from_decimal_parts(int_part, frac_part).ok_or(ParseError {
            position: start,
            message: "invalid numeric literal".to_string(),
        })?;
        Ok(Tok::Number(scalar))
    }

    fn ident(&mut self) -> Tok {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        Tok::Ident(std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string())
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    end: usize,
}

/// Parse an expression string into a canonicalized [`OperatorExpr`].
pub fn parse_expr(text: &str) -> Result<OperatorExpr, ParseError> {
    let toks = Lexer::tokens(text)?;
    let mut p = Parser { toks, idx: 0, end: text.len() };
    let e = p.expr()?;
    if let Some((pos, _)) = p.peek_at() {
        return Err(ParseError { position: pos, message: "unexpected trailing input".to_string() });
    }
    Ok(e)
}

impl Parser {
    fn peek_at(&self) -> Option<(usize, &Tok)> {
        self.toks.get(self.idx).map(|(p, t)| (*p, t))
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(_, t)| t)
    }

    fn next_pos(&self) -> usize {
        self.toks.get(self.idx).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|(_, t)| t.clone());
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(want) {
            self.idx += 1;
            Ok(())
        } else {
            Err(ParseError { position: self.next_pos(), message: format!("expected {what}") })
        }
    }

    fn expr(&mut self) -> Result<OperatorExpr, ParseError> {
        let mut negate = false;
        if self.peek() == Some(&Tok::Minus) {
            self.idx += 1;
            negate = true;
        }
        let mut acc = self.term()?;
        if negate {
            acc = -acc;
        }
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.idx += 1;
                    let t = self.term()?;
                    acc = acc + t;
                }
                Some(Tok::Minus) => {
                    self.idx += 1;
                    let t = self.term()?;
                    acc = acc - t;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<OperatorExpr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.idx += 1;
                    let f = self.factor()?;
                    acc = acc * f;
                }
                // Implicit multiplication: a token that can start a factor.
                Some(Tok::Number(_)) | Some(Tok::Ident(_)) | Some(Tok::LParen) => {
                    let f = self.factor()?;
                    acc = acc * f;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<OperatorExpr, ParseError> {
        let pos = self.next_pos();
        match self.bump() {
            Some(Tok::Number(n)) => {
                if self.peek() == Some(&Tok::Slash) {
                    self.idx += 1;
                    let dpos = self.next_pos();
                    match self.bump() {
                        Some(Tok::Number(d)) => {
                            if d.is_negligible(0.0) {
                                return Err(ParseError {
                                    position: dpos,
                                    message: "division by zero".to_string(),
                                });
                            }
                            // Both literals are exact rationals; invert via
                            // exact division.
                            let num = n.as_exact().cloned().unwrap();
                            let den = d.as_exact().cloned().unwrap();
                            return Ok(OperatorExpr::scalar(super::scalar::Scalar::Exact(
                                num / den,
                            )));
                        }
                        _ => {
                            return Err(ParseError {
                                position: dpos,
                                message: "expected number after '/'".to_string(),
                            })
                        }
                    }
                }
                Ok(OperatorExpr::scalar(n))
            }
            Some(Tok::Ident(name)) => self.op_factor(pos, name),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(&Tok::RParen, "')'")?;
                Ok(e)
            }
            _ => Err(ParseError { position: pos, message: "expected factor".to_string() }),
        }
    }

    fn op_factor(&mut self, pos: usize, ident: String) -> Result<OperatorExpr, ParseError> {
        if ident == "i" {
            return Ok(OperatorExpr::scalar(Scalar::from_imag_int(1)));
        }
        if ident == "dag" {
            return Err(ParseError {
                position: pos,
                message: "dagger applied to a scalar".to_string(),
            });
        }
        let (name, dagger) = match ident.strip_suffix("dag") {
            Some(base) if MODE_NAMES.contains(&base) => (base.to_string(), true),
            _ if MODE_NAMES.contains(&ident.as_str()) => (ident.clone(), false),
            _ => {
                return Err(ParseError {
                    position: pos,
                    message: format!("unknown function name '{ident}'"),
                })
            }
        };
        let mode = if self.peek() == Some(&Tok::LParen) {
            self.idx += 1;
            let vpos = self.next_pos();
            let var = match self.bump() {
                Some(Tok::Ident(v)) => v,
                _ => {
                    return Err(ParseError {
                        position: vpos,
                        message: "expected frequency variable".to_string(),
                    })
                }
            };
            self.expect(&Tok::RParen, "')'")?;
            ModeLabel::continuous(&name, &var)
        } else {
            ModeLabel::discrete(&name)
        };
        let mut power = 1u32;
        if self.peek() == Some(&Tok::Caret) {
            self.idx += 1;
            let ppos = self.next_pos();
            match self.bump() {
                Some(Tok::Number(n)) => {
                    let z = n.to_c64();
                    if z.im != 0.0 || z.re.fract() != 0.0 || z.re < 1.0 || z.re > 64.0 {
                        return Err(ParseError {
                            position: ppos,
                            message: "exponent must be a small positive integer".to_string(),
                        });
                    }
                    power = z.re as u32;
                }
                _ => {
                    return Err(ParseError {
                        position: ppos,
                        message: "expected integer exponent".to_string(),
                    })
                }
            }
        }
        let factors = vec![OpFactor { mode, dagger }; power as usize];
        Ok(OperatorExpr::from_term(OperatorTerm::from_factors(Scalar::one(), factors)))
    }
}
