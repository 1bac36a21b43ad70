//! Expression language for superfunctions.
//!
//! ```text
//! expr     := term (("+"|"-") term)*
//! term     := ("+"|"-")? factor ("*" factor)*
//! factor   := atom ("^" nat)?
//! atom     := rational | "i" | "x" nat | "xi" nat | "(" expr ")"
//! rational := int ("/" nat)?
//! ```
//!
//! A sign in front of a term is accepted so that printed output, which may
//! start with `-`, parses back.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{ChartSignature, Monomial, OddSet, Superfunction};
use crate::scalar::{Field, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("variable `{name}` at {pos} is out of range for the chart")]
    VariableOutOfRange { pos: usize, name: String },
    #[error("imaginary unit at {pos} used over the rational field")]
    ImaginaryOverRationals { pos: usize },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Slash,
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    I,
    X(usize),
    Xi(usize),
    End,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut k = 0;
    let digits = |mut k: usize| {
        let start = k;
        while k < bytes.len() && bytes[k].is_ascii_digit() {
            k += 1;
        }
        (start, k)
    };
    while k < bytes.len() {
        let c = bytes[k];
        if c.is_ascii_whitespace() {
            k += 1;
            continue;
        }
        let pos = k;
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' => {
                let (s, e) = digits(k);
                k = e;
                out.push((pos, Tok::Int(text[s..e].parse().unwrap())));
                continue;
            }
            b'x' => {
                let odd = bytes.get(k + 1) == Some(&b'i');
                let (s, e) = digits(if odd { k + 2 } else { k + 1 });
                if s == e {
                    return Err(ParseError::Syntax { pos, msg: "expected index after variable name".into() });
                }
                let idx: usize = text[s..e]
                    .parse()
                    .map_err(|_| ParseError::Syntax { pos, msg: "variable index too large".into() })?;
                k = e;
                out.push((pos, if odd { Tok::Xi(idx) } else { Tok::X(idx) }));
                continue;
            }
            b'i' => Tok::I,
            _ => {
                return Err(ParseError::Syntax { pos, msg: format!("unexpected character `{}`", c as char) });
            }
        };
        out.push((pos, tok));
        k += 1;
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    sig: ChartSignature,
    text: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> (usize, Tok) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn syntax<T>(&self, msg: &str) -> Result<T, ParseError> {
        let found = match self.peek() {
            Tok::End => "end of input".to_string(),
            _ => format!("`{}`", &self.text[self.pos()..].chars().next().unwrap_or(' ')),
        };
        Err(ParseError::Syntax { pos: self.pos(), msg: format!("{msg}, found {found}") })
    }

    fn expr(&mut self) -> Result<Superfunction, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Superfunction, ParseError> {
        let mut negate = false;
        match self.peek() {
            Tok::Minus => {
                self.bump();
                negate = true;
            }
            Tok::Plus => {
                self.bump();
            }
            _ => {}
        }
        let mut acc = self.factor()?;
        while *self.peek() == Tok::Star {
            self.bump();
            acc = acc.mul(&self.factor()?);
        }
        Ok(if negate { acc.neg() } else { acc })
    }

    fn factor(&mut self) -> Result<Superfunction, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let (_, t) = self.bump();
        let Tok::Int(e) = t else {
            self.at -= 1;
            return self.syntax("expected exponent");
        };
        let e: u32 = e
            .try_into()
            .map_err(|_| ParseError::Syntax { pos: self.pos(), msg: "exponent too large".into() })?;
        let mut acc = Superfunction::one(self.sig);
        for _ in 0..e {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Superfunction, ParseError> {
        let sig = self.sig;
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Int(num) => {
                self.bump();
                let mut r = BigRational::from_integer(num);
                if *self.peek() == Tok::Slash {
                    self.bump();
                    match self.bump() {
                        (_, Tok::Int(den)) if !den.is_zero() => r /= BigRational::from_integer(den),
                        (p, Tok::Int(_)) => {
                            return Err(ParseError::Syntax { pos: p, msg: "zero denominator".into() })
                        }
                        _ => {
                            self.at -= 1;
                            return self.syntax("expected denominator");
                        }
                    }
                }
                Ok(Superfunction::constant(sig, Scalar::from_rational(r)))
            }
            Tok::I => {
                self.bump();
                if sig.field != Field::GaussianRational {
                    return Err(ParseError::ImaginaryOverRationals { pos });
                }
                Ok(Superfunction::constant(sig, Scalar::from_parts(BigRational::zero(), BigRational::one())))
            }
            Tok::X(i) => {
                self.bump();
                if i == 0 || i > sig.n {
                    return Err(ParseError::VariableOutOfRange { pos, name: format!("x{i}") });
                }
                Ok(Superfunction::x(sig, i))
            }
            Tok::Xi(a) => {
                self.bump();
                if a == 0 || a > sig.m {
                    return Err(ParseError::VariableOutOfRange { pos, name: format!("xi{a}") });
                }
                Ok(Superfunction::xi(sig, a))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return self.syntax("expected `)`");
                }
                self.bump();
                Ok(inner)
            }
            _ => self.syntax("expected a number, variable or `(`"),
        }
    }
}

/// Parses an expression into canonical form.
pub fn parse_superfunction(text: &str, sig: ChartSignature) -> Result<Superfunction, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, at: 0, sig, text };
    let f = p.expr()?;
    if *p.peek() != Tok::End {
        return p.syntax("unexpected trailing input");
    }
    Ok(f)
}

fn factors(mono: &Monomial, set: OddSet) -> Vec<String> {
    let mut out = Vec::new();
    for (k, e) in mono.0.iter().enumerate() {
        match e {
            0 => {}
            1 => out.push(format!("x{}", k + 1)),
            _ => out.push(format!("x{}^{}", k + 1, e)),
        }
    }
    out.extend(set.indices().map(|a| format!("xi{a}")));
    out
}

fn coeff_text(c: &Scalar) -> String {
    let re = Scalar::from_rational(c.re().clone());
    let im = Scalar::from_rational(c.im().clone());
    if im.is_zero() {
        return re.to_string();
    }
    let im_abs = if im.real_sign() == Some(-1) { -&im } else { im.clone() };
    let im_part = if im_abs.is_one() { "i".to_string() } else { format!("{im_abs}*i") };
    let sign = if im.real_sign() == Some(-1) { "-" } else { "+" };
    if re.is_zero() {
        let lead = if sign == "-" { "-" } else { "" };
        format!("({lead}{im_part})")
    } else {
        format!("({re}{sign}{im_part})")
    }
}

/// Canonical text: odd index sets in lexicographic order, monomials graded.
pub fn print(f: &Superfunction) -> String {
    let mut out = String::new();
    for (set, poly) in f.terms() {
        for (mono, c) in poly.terms() {
            let fs = factors(mono, *set);
            let negative = c.is_real() && c.real_sign() == Some(-1);
            let mag = if negative { -c } else { c.clone() };
            if out.is_empty() {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mut parts = Vec::new();
            if !mag.is_one() || fs.is_empty() {
                parts.push(coeff_text(&mag));
            }
            parts.extend(fs);
            out.push_str(&parts.join("*"));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}
