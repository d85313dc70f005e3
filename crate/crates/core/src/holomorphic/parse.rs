//! Recursive-descent parser for holomorphic expressions.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary | power)*        juxtaposition multiplies
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' exponent)?
//! exponent:= ['+' | '-'] INT | '(' ['+' | '-'] INT ')'
//! primary := NUMBER | NUMBER 'i' | 'i' | 'z' | '(' expr ')'
//!          | 'exp' '(' expr ')'
//!          | 'mobius' '(' expr ',' expr ',' expr ',' expr ',' expr ')'
//! ```
//!
//! The first four `mobius` arguments must be constant expressions.

use num_complex::Complex64;

use super::eval::eval_jet2;
use super::expr::HoloExpr;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Imag(f64),
    Ident(String),
    Sym(char),
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn peek_char(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn next_token(&mut self) -> Result<(Tok, usize)> {
        while let Some(c) = self.peek_char() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        let start = self.pos;
        let Some(c) = self.peek_char() else {
            return Ok((Tok::End, start));
        };
        if c.is_ascii_digit() || c == '.' {
            return self.number(start);
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let rest = &self.src[start..];
            let len = rest
                .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_'))
                .unwrap_or(rest.len());
            self.pos += len;
            return Ok((Tok::Ident(rest[..len].to_string()), start));
        }
        if "+-*/^(),".contains(c) {
            self.pos += 1;
            return Ok((Tok::Sym(c), start));
        }
        Err(Error::Syntax {
            pos: start,
            msg: format!("unexpected character `{c}`"),
        })
    }

    fn number(&mut self, start: usize) -> Result<(Tok, usize)> {
        let bytes = self.src.as_bytes();
        let mut i = start;
        let digits = |i: &mut usize| {
            let s = *i;
            while *i < bytes.len() && bytes[*i].is_ascii_digit() {
                *i += 1;
            }
            *i - s
        };
        let mut n = digits(&mut i);
        if i < bytes.len() && bytes[i] == b'.' {
            i += 1;
            n += digits(&mut i);
        }
        if n == 0 {
            return Err(Error::Syntax {
                pos: start,
                msg: "malformed number".into(),
            });
        }
        if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            let mut j = i + 1;
            if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                j += 1;
            }
            if j < bytes.len() && bytes[j].is_ascii_digit() {
                digits(&mut j);
                i = j;
            }
        }
        let value: f64 = self.src[start..i].parse().map_err(|_| Error::Syntax {
            pos: start,
            msg: "malformed number".into(),
        })?;
        let imag = i < bytes.len()
            && bytes[i] == b'i'
            && !bytes
                .get(i + 1)
                .is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_');
        if imag {
            self.pos = i + 1;
            Ok((Tok::Imag(value), start))
        } else {
            self.pos = i;
            Ok((Tok::Num(value), start))
        }
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    tok_pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self> {
        let mut lexer = Lexer { src, pos: 0 };
        let (tok, tok_pos) = lexer.next_token()?;
        Ok(Self {
            lexer,
            tok,
            tok_pos,
        })
    }

    fn bump(&mut self) -> Result<Tok> {
        let (next, pos) = self.lexer.next_token()?;
        self.tok_pos = pos;
        Ok(std::mem::replace(&mut self.tok, next))
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.tok_pos,
            msg: msg.into(),
        })
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.tok == Tok::Sym(c) {
            self.bump()?;
            Ok(())
        } else {
            self.error(format!("expected `{c}`"))
        }
    }

    fn expr(&mut self) -> Result<HoloExpr> {
        let mut lhs = self.term()?;
        loop {
            match self.tok {
                Tok::Sym('+') => {
                    self.bump()?;
                    lhs = HoloExpr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Sym('-') => {
                    self.bump()?;
                    lhs = HoloExpr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<HoloExpr> {
        let mut lhs = self.unary()?;
        loop {
            match self.tok {
                Tok::Sym('*') => {
                    self.bump()?;
                    lhs = HoloExpr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Sym('/') => {
                    self.bump()?;
                    lhs = HoloExpr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Num(_) | Tok::Imag(_) | Tok::Ident(_) | Tok::Sym('(') => {
                    lhs = HoloExpr::Mul(Box::new(lhs), Box::new(self.power()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<HoloExpr> {
        match self.tok {
            Tok::Sym('-') => {
                self.bump()?;
                Ok(HoloExpr::Neg(Box::new(self.unary()?)))
            }
            Tok::Sym('+') => {
                self.bump()?;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<HoloExpr> {
        let base = self.primary()?;
        if self.tok != Tok::Sym('^') {
            return Ok(base);
        }
        self.bump()?;
        let n = self.exponent()?;
        Ok(HoloExpr::Pow(Box::new(base), n))
    }

    fn exponent(&mut self) -> Result<i32> {
        let parens = self.tok == Tok::Sym('(');
        if parens {
            self.bump()?;
        }
        let sign = match self.tok {
            Tok::Sym('-') => {
                self.bump()?;
                -1
            }
            Tok::Sym('+') => {
                self.bump()?;
                1
            }
            _ => 1,
        };
        let n = match self.tok {
            Tok::Num(v) if v.fract() == 0.0 && v.abs() <= i32::MAX as f64 => v as i32,
            _ => return self.error("expected integer exponent"),
        };
        self.bump()?;
        if parens {
            self.expect(')')?;
        }
        Ok(sign * n)
    }

    fn primary(&mut self) -> Result<HoloExpr> {
        let pos = self.tok_pos;
        match self.bump()? {
            Tok::Num(v) => Ok(HoloExpr::constant(v, 0.0)),
            Tok::Imag(v) => Ok(HoloExpr::constant(0.0, v)),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "z" => Ok(HoloExpr::Var),
                "i" => Ok(HoloExpr::constant(0.0, 1.0)),
                "exp" => {
                    self.expect('(')?;
                    let arg = self.expr()?;
                    self.expect(')')?;
                    Ok(HoloExpr::Exp(Box::new(arg)))
                }
                "mobius" => self.mobius(),
                _ => Err(Error::UnsupportedFunction(name)),
            },
            Tok::End => Err(Error::Syntax {
                pos,
                msg: "unexpected end of input".into(),
            }),
            Tok::Sym(c) => Err(Error::Syntax {
                pos,
                msg: format!("unexpected `{c}`"),
            }),
        }
    }

    fn mobius(&mut self) -> Result<HoloExpr> {
        self.expect('(')?;
        let mut coeffs = [Complex64::new(0.0, 0.0); 4];
        for c in coeffs.iter_mut() {
            let pos = self.tok_pos;
            let e = self.expr()?;
            if e.has_var() {
                return Err(Error::Syntax {
                    pos,
                    msg: "mobius coefficients must be constant".into(),
                });
            }
            *c = eval_jet2(&e, Complex64::new(0.0, 0.0))?.f0;
            self.expect(',')?;
        }
        let arg = self.expr()?;
        self.expect(')')?;
        let [a, b, c, d] = coeffs;
        Ok(HoloExpr::mobius(a, b, c, d, arg))
    }
}

/// Parses an expression in `z`; see the module documentation for the grammar.
pub fn parse_holomorphic(text: &str) -> Result<HoloExpr> {
    let mut p = Parser::new(text)?;
    let e = p.expr()?;
    if p.tok != Tok::End {
        return p.error("unexpected trailing input");
    }
    Ok(e)
}

/// Parses a constant complex number such as `2`, `-3i` or `1 - 0.5i`.
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let e = parse_holomorphic(text)?;
    if e.has_var() {
        return Err(Error::Syntax {
            pos: 0,
            msg: "expected a constant".into(),
        });
    }
    Ok(eval_jet2(&e, Complex64::new(0.0, 0.0))?.f0)
}
