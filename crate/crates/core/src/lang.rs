//! Expression input and canonical printing.
//!
//! Input grammar (the normative format for all polynomial arguments):
//!
//! ```text
//! expr     := term (('+'|'-') term)*
//! term     := factor ('*' factor)*
//! factor   := atom ('^' nonneg-int)?
//! atom     := rational | 'i' | 'hbar' | 'x' | 'p' | '(' expr ')'
//! rational := int ('/' posint)?
//! ```
//!
//! There is no implicit multiplication (`2x` is a syntax error) and no unary
//! minus (negate by subtracting from another term, e.g. `0 - x`). Errors
//! carry the byte offset of the offending token.
//!
//! Printing is deterministic: monomials are ordered by descending total
//! degree, then descending first-letter power, then descending second-letter
//! power. Phase-space output re-parses to the same polynomial.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::opalg::{AAPoly, OpPoly};
use crate::phase::PhasePoly;
use crate::scalar::GaussianRational;

/// Parse errors, each carrying the byte offset of the offending token.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("negative exponent at byte {pos}")]
    NegativeExponent { pos: usize },
    #[error("division by zero in literal at byte {pos}")]
    DivisionByZeroLiteral { pos: usize },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { pos, .. }
            | ParseError::NegativeExponent { pos }
            | ParseError::DivisionByZeroLiteral { pos } => *pos,
        }
    }
}

/// Reserved identifiers recognized by the lexer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ident {
    X,
    P,
    Hbar,
    I,
    Sqrt,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Integer(BigInt),
    Slash,
    Ident(Ident),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub pos: usize,
}

fn tokenize(input: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = input.as_bytes();
    let mut tokens = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let b = bytes[pos];
        let kind = match b {
            b' ' | b'\t' | b'\n' | b'\r' => {
                pos += 1;
                continue;
            }
            b'+' => TokenKind::Plus,
            b'-' => TokenKind::Minus,
            b'*' => TokenKind::Star,
            b'/' => TokenKind::Slash,
            b'^' => TokenKind::Caret,
            b'(' => TokenKind::LParen,
            b')' => TokenKind::RParen,
            b'0'..=b'9' => {
                let start = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                let digits = &input[start..pos];
                tokens.push(Token {
                    kind: TokenKind::Integer(digits.parse().expect("ascii digits")),
                    pos: start,
                });
                continue;
            }
            b'a'..=b'z' | b'A'..=b'Z' => {
                let start = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_alphabetic() {
                    pos += 1;
                }
                let word = &input[start..pos];
                let ident = match word {
                    "x" => Ident::X,
                    "p" => Ident::P,
                    "hbar" => Ident::Hbar,
                    "i" => Ident::I,
                    "sqrt" => Ident::Sqrt,
                    other => {
                        return Err(ParseError::Syntax {
                            pos: start,
                            msg: format!("unknown identifier `{other}`"),
                        })
                    }
                };
                tokens.push(Token {
                    kind: TokenKind::Ident(ident),
                    pos: start,
                });
                continue;
            }
            other => {
                return Err(ParseError::Syntax {
                    pos,
                    msg: format!("unexpected character `{}`", other as char),
                })
            }
        };
        tokens.push(Token { kind, pos });
        pos += 1;
    }
    Ok(tokens)
}

struct Parser<'t> {
    tokens: &'t [Token],
    idx: usize,
    end: usize,
}

impl<'t> Parser<'t> {
    fn peek(&self) -> Option<&'t Token> {
        self.tokens.get(self.idx)
    }

    fn bump(&mut self) -> Option<&'t Token> {
        let t = self.tokens.get(self.idx);
        self.idx += 1;
        t
    }

    fn expr(&mut self) -> Result<PhasePoly, ParseError> {
        let mut acc = self.term()?;
        while let Some(tok) = self.peek() {
            match tok.kind {
                TokenKind::Plus => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                TokenKind::Minus => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<PhasePoly, ParseError> {
        let mut acc = self.factor()?;
        while matches!(self.peek().map(|t| &t.kind), Some(TokenKind::Star)) {
            self.bump();
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<PhasePoly, ParseError> {
        let base = self.atom()?;
        if !matches!(self.peek().map(|t| &t.kind), Some(TokenKind::Caret)) {
            return Ok(base);
        }
        self.bump();
        match self.bump() {
            Some(Token {
                kind: TokenKind::Integer(n),
                pos,
            }) => {
                let exp = u32::try_from(n.clone()).map_err(|_| ParseError::Syntax {
                    pos: *pos,
                    msg: format!("exponent `{n}` too large"),
                })?;
                Ok(base.pow(exp))
            }
            Some(Token {
                kind: TokenKind::Minus,
                pos,
            }) => Err(ParseError::NegativeExponent { pos: *pos }),
            Some(tok) => Err(ParseError::Syntax {
                pos: tok.pos,
                msg: "expected a nonnegative integer exponent".to_owned(),
            }),
            None => Err(ParseError::Syntax {
                pos: self.end,
                msg: "expected an exponent, found end of input".to_owned(),
            }),
        }
    }

    fn atom(&mut self) -> Result<PhasePoly, ParseError> {
        match self.bump() {
            Some(Token {
                kind: TokenKind::Integer(num),
                ..
            }) => {
                // rational := int ('/' posint)?
                if matches!(self.peek().map(|t| &t.kind), Some(TokenKind::Slash)) {
                    self.bump();
                    match self.bump() {
                        Some(Token {
                            kind: TokenKind::Integer(den),
                            pos,
                        }) => {
                            if den.is_zero() {
                                return Err(ParseError::DivisionByZeroLiteral { pos: *pos });
                            }
                            Ok(PhasePoly::constant(GaussianRational::from_rational(
                                BigRational::new(num.clone(), den.clone()),
                            )))
                        }
                        Some(tok) => Err(ParseError::Syntax {
                            pos: tok.pos,
                            msg: "expected a denominator".to_owned(),
                        }),
                        None => Err(ParseError::Syntax {
                            pos: self.end,
                            msg: "expected a denominator, found end of input".to_owned(),
                        }),
                    }
                } else {
                    Ok(PhasePoly::constant(GaussianRational::from_bigint(
                        num.clone(),
                    )))
                }
            }
            Some(Token {
                kind: TokenKind::Ident(ident),
                pos,
            }) => match ident {
                Ident::X => Ok(PhasePoly::x()),
                Ident::P => Ok(PhasePoly::p()),
                Ident::Hbar => Ok(PhasePoly::hbar()),
                Ident::I => Ok(PhasePoly::constant(GaussianRational::i())),
                Ident::Sqrt => Err(ParseError::Syntax {
                    pos: *pos,
                    msg: "`sqrt` is not allowed in polynomial input".to_owned(),
                }),
            },
            Some(Token {
                kind: TokenKind::LParen,
                ..
            }) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Token {
                        kind: TokenKind::RParen,
                        ..
                    }) => Ok(inner),
                    Some(tok) => Err(ParseError::Syntax {
                        pos: tok.pos,
                        msg: "expected `)`".to_owned(),
                    }),
                    None => Err(ParseError::Syntax {
                        pos: self.end,
                        msg: "expected `)`, found end of input".to_owned(),
                    }),
                }
            }
            Some(tok) => Err(ParseError::Syntax {
                pos: tok.pos,
                msg: "expected a value".to_owned(),
            }),
            None => Err(ParseError::Syntax {
                pos: self.end,
                msg: "expected a value, found end of input".to_owned(),
            }),
        }
    }
}

/// Parse an expression into its canonical phase-space polynomial.
pub fn parse_phase_poly(input: &str) -> Result<PhasePoly, ParseError> {
    let tokens = tokenize(input)?;
    let mut parser = Parser {
        tokens: &tokens,
        idx: 0,
        end: input.len(),
    };
    let poly = parser.expr()?;
    if let Some(tok) = parser.peek() {
        return Err(ParseError::Syntax {
            pos: tok.pos,
            msg: "unexpected trailing input".to_owned(),
        });
    }
    Ok(poly)
}

// --- canonical printing ------------------------------------------------

/// One rendered monomial: symbol letters with powers, plus its coefficient.
struct TermView {
    coeff: GaussianRational,
    letters: Vec<(&'static str, u32)>,
    sort_key: (u32, u32, u32),
}

fn rational_factor(r: &BigRational, parenthesize_fraction: bool) -> String {
    if r.is_integer() || !parenthesize_fraction {
        r.to_string()
    } else {
        format!("({r})")
    }
}

/// Grammar-form coefficient rendering, without its canonical sign:
/// `3`, `(1/2)`, `i`, `2*i`, `(1/2)*i`, `(1+2*i)`, `(1-1/2*i)`.
/// Returns the empty string for a unit coefficient followed by letters.
fn coeff_magnitude(c: &GaussianRational, has_letters: bool) -> String {
    debug_assert!(!c.leading_negative());
    if c.im().is_zero() {
        if c.is_one() && has_letters {
            String::new()
        } else {
            rational_factor(c.re(), has_letters)
        }
    } else if c.re().is_zero() {
        let im = c.im();
        if im.is_one() {
            "i".to_owned()
        } else {
            format!("{}*i", rational_factor(im, true))
        }
    } else {
        let im = c.im();
        let (sign, mag) = if im.is_negative() {
            ("-", -im.clone())
        } else {
            ("+", im.clone())
        };
        let im_str = if mag.is_one() {
            "i".to_owned()
        } else {
            format!("{mag}*i")
        };
        format!("({}{sign}{im_str})", c.re())
    }
}

/// Assemble sorted terms into an expression. `grammar_safe` renderings never
/// start with `-`; a leading-negative head term is emitted as `0 - ...` so
/// the output stays inside the input grammar.
fn render_terms(mut terms: Vec<TermView>, grammar_safe: bool) -> String {
    if terms.is_empty() {
        return "0".to_owned();
    }
    terms.sort_by_key(|t| std::cmp::Reverse(t.sort_key));
    let mut out = String::new();
    for (idx, term) in terms.iter().enumerate() {
        let neg = term.coeff.leading_negative();
        let mag = if neg {
            -&term.coeff
        } else {
            term.coeff.clone()
        };
        if idx == 0 {
            if neg {
                out.push_str(if grammar_safe { "0 - " } else { "-" });
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mut factors: Vec<String> = Vec::new();
        let coeff_str = coeff_magnitude(&mag, !term.letters.is_empty());
        if !coeff_str.is_empty() {
            factors.push(coeff_str);
        }
        for &(symbol, pow) in &term.letters {
            match pow {
                0 => {}
                1 => factors.push(symbol.to_owned()),
                k => factors.push(format!("{symbol}^{k}")),
            }
        }
        if factors.is_empty() {
            factors.push("1".to_owned());
        }
        out.push_str(&factors.join("*"));
    }
    out
}

/// Canonical phase-space rendering; `parse_phase_poly(format_phase(a)) == a`.
pub fn format_phase(a: &PhasePoly) -> String {
    let terms = a
        .terms()
        .map(|(k, c)| TermView {
            coeff: c.clone(),
            letters: vec![("p", k.p_pow), ("x", k.x_pow), ("hbar", k.hbar_pow)],
            sort_key: (k.p_pow + k.x_pow + k.hbar_pow, k.p_pow, k.x_pow),
        })
        .collect();
    render_terms(terms, true)
}

/// Canonical operator rendering: letters `P`, `X` in canonical order.
pub fn format_op(a: &OpPoly) -> String {
    let terms = a
        .terms()
        .map(|(k, c)| TermView {
            coeff: c.clone(),
            letters: vec![("P", k.p_pow), ("X", k.x_pow), ("hbar", k.hbar_pow)],
            sort_key: (k.p_pow + k.x_pow + k.hbar_pow, k.p_pow, k.x_pow),
        })
        .collect();
    render_terms(terms, false)
}

/// Canonical ladder rendering: letters `A`, `Ad` in anti-normal order.
pub fn format_aa(a: &AAPoly) -> String {
    let terms = a
        .terms()
        .map(|(k, c)| TermView {
            coeff: c.clone(),
            letters: vec![("A", k.a_pow), ("Ad", k.adag_pow), ("hbar", k.hbar_pow)],
            sort_key: (k.a_pow + k.adag_pow + k.hbar_pow, k.a_pow, k.adag_pow),
        })
        .collect();
    render_terms(terms, false)
}

/// Rendering of a bare coefficient, e.g. for tabulated ordering
/// coefficients: `1`, `-2/3`, `(1/2)*i`. Not re-parsed, so a leading minus
/// is allowed.
pub fn format_coeff(c: &GaussianRational) -> String {
    if c.is_zero() {
        return "0".to_owned();
    }
    let terms = vec![TermView {
        coeff: c.clone(),
        letters: Vec::new(),
        sort_key: (0, 0, 0),
    }];
    render_terms(terms, false)
}
