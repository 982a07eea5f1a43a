//! Text grammar for polynomials in `z, w`:
//! `3*z^2*w - 1/2*w^7 + O(40)`. Whitespace is insignificant; an optional
//! `O(N)` term sets the truncation degree.

use num_bigint::BigInt;

use super::bipoly::{BiPoly, Mono};
use super::scalar::{Rat, Scalar};
use crate::error::{Error, Result};

struct Lexer<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        match self.bump() {
            Some(x) if x == c => Ok(()),
            other => Err(self.err(&format!("expected '{}', found {}", c as char, show(other)))),
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        let txt = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
        Ok(txt.parse().unwrap())
    }

    fn small(&mut self) -> Result<u32> {
        let n = self.integer()?;
        u32::try_from(n).map_err(|_| self.err("exponent too large"))
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {}", self.pos))
    }
}

fn show(c: Option<u8>) -> String {
    match c {
        Some(c) => format!("'{}'", c as char),
        None => "end of input".into(),
    }
}

enum Term {
    Mono(Rat, Mono),
    BigO(u32),
}

fn parse_term(lx: &mut Lexer) -> Result<Term> {
    let mut coeff = Rat::from_integer(1.into());
    let mut mono = Mono::ONE;
    let mut first = true;
    loop {
        match lx.peek() {
            Some(b'O') if first => {
                lx.bump();
                lx.expect(b'(')?;
                let n = lx.small()?;
                lx.expect(b')')?;
                return Ok(Term::BigO(n));
            }
            Some(c) if c.is_ascii_digit() => {
                let num = lx.integer()?;
                let mut r = Rat::from_integer(num);
                if lx.peek() == Some(b'/') {
                    lx.bump();
                    let den = lx.integer()?;
                    if den == BigInt::from(0) {
                        return Err(lx.err("zero denominator"));
                    }
                    r /= Rat::from_integer(den);
                }
                if lx.peek() == Some(b'^') {
                    lx.bump();
                    let e = lx.small()?;
                    r = num_traits::pow(r, e as usize);
                }
                coeff *= r;
            }
            Some(v @ (b'z' | b'w')) => {
                lx.bump();
                let e = if lx.peek() == Some(b'^') {
                    lx.bump();
                    lx.small()?
                } else {
                    1
                };
                if v == b'z' {
                    mono.z += e;
                } else {
                    mono.w += e;
                }
            }
            other => return Err(lx.err(&format!("unexpected {}", show(other)))),
        }
        first = false;
        match lx.peek() {
            Some(b'*') => {
                lx.bump();
            }
            Some(b'z' | b'w') => {}
            _ => return Ok(Term::Mono(coeff, mono)),
        }
    }
}

/// Parses a polynomial; an `O(N)` term sets the truncation degree.
pub fn parse_poly(src: &str) -> Result<BiPoly> {
    let mut lx = Lexer { s: src.as_bytes(), pos: 0 };
    if lx.peek().is_none() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut terms: Vec<(Mono, Scalar)> = Vec::new();
    let mut trunc: Option<u32> = None;
    let mut sign = match lx.peek() {
        Some(b'-') => {
            lx.bump();
            -1
        }
        Some(b'+') => {
            lx.bump();
            1
        }
        _ => 1,
    };
    loop {
        match parse_term(&mut lx)? {
            Term::Mono(c, m) => {
                let c = if sign < 0 { -c } else { c };
                terms.push((m, Scalar::Rat(c)));
            }
            Term::BigO(n) => {
                if trunc.is_some() {
                    return Err(lx.err("more than one O(N) term"));
                }
                trunc = Some(n);
            }
        }
        match lx.bump() {
            None => break,
            Some(b'+') => sign = 1,
            Some(b'-') => sign = -1,
            Some(c) => return Err(lx.err(&format!("unexpected '{}'", c as char))),
        }
    }
    Ok(BiPoly::from_terms(terms, trunc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::scalar::rat_frac;

    #[test]
    fn basic_terms() {
        let p = parse_poly("3*z^2*w + w^7").unwrap();
        assert_eq!(p.coeff(2, 1), Scalar::int(3));
        assert_eq!(p.coeff(0, 7), Scalar::int(1));
        assert_eq!(p.num_terms(), 2);
    }

    #[test]
    fn whitespace_and_rationals() {
        let a = parse_poly(" -1/2 * z ^ 3 - w").unwrap();
        let b = parse_poly("-1/2*z^3-w").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.coeff(3, 0), Scalar::Rat(rat_frac(-1, 2)));
    }

    #[test]
    fn truncation_marker() {
        let p = parse_poly("z^2 + w^70 + O(64)").unwrap();
        assert_eq!(p.truncation(), Some(64));
        assert_eq!(p.num_terms(), 1);
    }

    #[test]
    fn canonical_roundtrip() {
        for s in ["3*z^2*w + w^7", "z^2 - w^2", "-z + 1/3", "6*z*w^2 + 2*z^11", "z^3 + O(10)", "0"] {
            let p = parse_poly(s).unwrap();
            assert_eq!(parse_poly(&p.to_string()).unwrap(), p);
        }
        assert_eq!(parse_poly("w^7 + 3*w*z^2").unwrap().to_string(), "w^7 + 3*z^2*w");
    }

    #[test]
    fn malformed() {
        for s in ["", "z^", "3**z", "z + + w", "x^2", "1/0*z", "z)"] {
            assert!(matches!(parse_poly(s), Err(Error::Parse(_))), "{s}");
        }
    }
}
