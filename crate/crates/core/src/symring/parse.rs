//! Reader for the canonical text form, used by golden files.

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use super::matrix::SymMatrix;
use super::poly::{Poly, Var};
use super::rational::RationalExpr;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("unexpected character {0:?} at byte {1}")]
    BadChar(char, usize),
    #[error("unexpected end of input")]
    Eof,
    #[error("unknown indeterminate {0}")]
    UnknownVar(String),
    #[error("unexpected token at byte {0}")]
    Unexpected(usize),
    #[error("division by zero")]
    DivZero,
    #[error("bad matrix line {0}: {1}")]
    Matrix(usize, String),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let b = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i] as char;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            out.push((Tok::Num(s[st..i].parse().expect("digits")), st));
        } else if c.is_ascii_alphabetic() {
            let st = i;
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(s[st..i].to_string()), st));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Op(c), i));
            i += 1;
        } else {
            return Err(ParseError::BadChar(c, i));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(usize::MAX, |t| t.1)
    }

    fn expr(&mut self) -> Result<RationalExpr, ParseError> {
        let mut acc = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let t = self.term()?;
            acc = if c == '+' { &acc + &t } else { &acc - &t };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RationalExpr, ParseError> {
        let mut acc = self.unary()?;
        while let Some(Tok::Op(c @ ('*' | '/'))) = self.peek().cloned() {
            self.pos += 1;
            let f = self.unary()?;
            if c == '*' {
                acc = &acc * &f;
            } else {
                if f.is_zero() {
                    return Err(ParseError::DivZero);
                }
                acc = &acc / &f;
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RationalExpr, ParseError> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RationalExpr, ParseError> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            match self.peek().cloned() {
                Some(Tok::Num(n)) => {
                    self.pos += 1;
                    let e: u32 = n.try_into().map_err(|_| ParseError::Unexpected(self.here()))?;
                    return Ok(base.pow(e));
                }
                _ => return Err(ParseError::Unexpected(self.here())),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RationalExpr, ParseError> {
        let at = self.here();
        match self.peek().cloned() {
            None => Err(ParseError::Eof),
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(RationalExpr::constant(BigRational::from_integer(n)))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                Var::from_name(&name)
                    .map(|v| RationalExpr::from_poly(Poly::var(v)))
                    .ok_or(ParseError::UnknownVar(name))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                match self.peek() {
                    Some(Tok::Op(')')) => {
                        self.pos += 1;
                        Ok(e)
                    }
                    _ => Err(ParseError::Unexpected(self.here())),
                }
            }
            Some(_) => Err(ParseError::Unexpected(at)),
        }
    }
}

/// Parse an expression written with `+ - * / ^` and parentheses.
pub fn parse_expr(s: &str) -> Result<RationalExpr, ParseError> {
    let mut p = Parser { toks: lex(s)?, pos: 0 };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(ParseError::Unexpected(p.here()));
    }
    Ok(e)
}

/// Parse the `[i][j] = expr` listing produced by `SymMatrix`'s `Display`.
/// Lines starting with `#` and blank lines are skipped; missing entries are zero.
pub fn parse_matrix(s: &str, rows: usize, cols: usize) -> Result<SymMatrix, ParseError> {
    let mut m = SymMatrix::zeros(rows, cols);
    for (ln, line) in s.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |msg: &str| ParseError::Matrix(ln + 1, msg.to_string());
        let (lhs, rhs) = line.split_once('=').ok_or_else(|| bad("missing '='"))?;
        let idx: Vec<usize> = lhs
            .trim()
            .trim_start_matches('[')
            .trim_end_matches(']')
            .split("][")
            .map(|x| x.trim().parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad("bad index"))?;
        if idx.len() != 2 || idx[0] == 0 || idx[1] == 0 || idx[0] > rows || idx[1] > cols {
            return Err(bad("index out of range"));
        }
        m.set(idx[0] - 1, idx[1] - 1, parse_expr(rhs)?);
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_display() {
        let e = parse_expr("(-3/2*xi1^2*N + X1 - 7)/(N^2 + 1)").unwrap();
        let again = parse_expr(&e.to_string()).unwrap();
        assert_eq!(e, again);
    }

    #[test]
    fn precedence() {
        let e = parse_expr("2 + 3*xi1^2").unwrap();
        let want = &RationalExpr::int(2) + &(&RationalExpr::int(3) * &RationalExpr::var(Var::Xi1).pow(2));
        assert_eq!(e, want);
        assert_eq!(parse_expr("-xi1^2").unwrap(), -RationalExpr::var(Var::Xi1).pow(2));
    }

    #[test]
    fn rejects_unknown_names() {
        assert!(matches!(parse_expr("xi4"), Err(ParseError::UnknownVar(_))));
        assert!(parse_expr("xi1 +").is_err());
        assert!(parse_expr("1/0").is_err());
    }

    #[test]
    fn matrix_listing_round_trip() {
        let mut m = SymMatrix::zeros(2, 2);
        m.set(0, 1, parse_expr("xi2/N").unwrap());
        m.set(1, 0, parse_expr("-X3").unwrap());
        let back = parse_matrix(&m.to_string(), 2, 2).unwrap();
        assert_eq!(back, m);
    }
}
