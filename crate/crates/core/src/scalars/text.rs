//! ASCII literal grammar shared by the CLI and test fixtures.
//!
//! ```text
//! document := "q=" INT ";" body
//! body     := poly | ratfun | matrix
//! poly     := "[" [INT ("," INT)*] "]"           little-endian coefficients
//! ratfun   := poly ["/" poly]
//! matrix   := "[" row ("," row)* "]"
//! row      := "[" ratfun ("," ratfun)* "]"
//! ```
//!
//! For q = p^k with k > 1, a coefficient INT in 0..q encodes the field element
//! whose base-p digits are its coordinates on 1, X, ..., X^{k-1}.
//! Example: `q=2; [1,1,1]` is Y^2 + Y + 1, `q=2; [[[0,1],[1]],[[1],[]]]` is
//! the matrix ((Y, 1), (1, 0)).

use super::field::Fq;
use super::poly::Poly;
use super::ratfun::RatFun;
use crate::error::{Error, Result};
use crate::latmod::Matrix;

#[derive(Debug)]
enum Node {
    Int(u64),
    List(Vec<Node>),
    Frac(Box<Node>, Box<Node>),
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }
    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }
    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Parse(format!(
                "expected '{}' at byte {}",
                c as char, self.pos
            )))
        }
    }
    fn int(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::Parse(format!("expected integer at byte {start}")))
    }
    fn node(&mut self) -> Result<Node> {
        let n = match self.peek() {
            Some(b'[') => {
                self.pos += 1;
                let mut items = Vec::new();
                if self.peek() != Some(b']') {
                    loop {
                        items.push(self.node()?);
                        if self.peek() == Some(b',') {
                            self.pos += 1;
                        } else {
                            break;
                        }
                    }
                }
                self.expect(b']')?;
                Node::List(items)
            }
            _ => Node::Int(self.int()?),
        };
        if self.peek() == Some(b'/') {
            self.pos += 1;
            let den = self.node()?;
            return Ok(Node::Frac(Box::new(n), Box::new(den)));
        }
        Ok(n)
    }
}

fn split_header(src: &str) -> Result<(Fq, &str)> {
    let (head, body) = src
        .split_once(';')
        .ok_or_else(|| Error::Parse("missing 'q=..;' header".into()))?;
    let q: u32 = head
        .trim()
        .strip_prefix("q=")
        .ok_or_else(|| Error::Parse("header must be q=<int>".into()))?
        .trim()
        .parse()
        .map_err(|_| Error::Parse("bad field order".into()))?;
    Ok((Fq::new(q)?, body))
}

fn parse_body(body: &str) -> Result<Node> {
    let mut p = Parser {
        s: body.as_bytes(),
        pos: 0,
    };
    let n = p.node()?;
    if p.peek().is_some() {
        return Err(Error::Parse(format!("trailing input at byte {}", p.pos)));
    }
    Ok(n)
}

fn to_poly(f: Fq, n: &Node) -> Result<Poly> {
    match n {
        Node::List(items) => {
            let mut coeffs = Vec::with_capacity(items.len());
            for it in items {
                match it {
                    Node::Int(v) if *v < f.q() as u64 => coeffs.push(*v as u8),
                    Node::Int(v) => {
                        return Err(Error::Parse(format!("coefficient {v} out of range")))
                    }
                    _ => {
                        return Err(Error::Parse(
                            "polynomial coefficients must be integers".into(),
                        ))
                    }
                }
            }
            Ok(Poly::new(f, coeffs))
        }
        _ => Err(Error::Parse("expected a coefficient list".into())),
    }
}

fn to_ratfun(f: Fq, n: &Node) -> Result<RatFun> {
    match n {
        Node::Frac(a, b) => RatFun::new(to_poly(f, a)?, to_poly(f, b)?),
        other => Ok(RatFun::from_poly(to_poly(f, other)?)),
    }
}

fn to_matrix(f: Fq, n: &Node) -> Result<Matrix<RatFun>> {
    let Node::List(rows) = n else {
        return Err(Error::Parse("expected a list of rows".into()));
    };
    let mut data = Vec::new();
    let mut cols = None;
    for row in rows {
        let Node::List(entries) = row else {
            return Err(Error::Parse("expected a row".into()));
        };
        if *cols.get_or_insert(entries.len()) != entries.len() {
            return Err(Error::Parse("ragged matrix".into()));
        }
        for e in entries {
            data.push(to_ratfun(f, e)?);
        }
    }
    let cols = cols.ok_or_else(|| Error::Parse("empty matrix".into()))?;
    if cols == 0 {
        return Err(Error::Parse("empty matrix".into()));
    }
    Ok(Matrix::from_vec(f, rows.len(), cols, data))
}

pub fn parse_poly(src: &str) -> Result<Poly> {
    let (f, body) = split_header(src)?;
    to_poly(f, &parse_body(body)?)
}

pub fn parse_ratfun(src: &str) -> Result<RatFun> {
    let (f, body) = split_header(src)?;
    to_ratfun(f, &parse_body(body)?)
}

pub fn parse_matrix(src: &str) -> Result<Matrix<RatFun>> {
    let (f, body) = split_header(src)?;
    to_matrix(f, &parse_body(body)?)
}

/// Polynomial matrix literal; rejects entries with denominators.
pub fn parse_poly_matrix(src: &str) -> Result<Matrix<Poly>> {
    let m = parse_matrix(src)?;
    m.try_map(|x| {
        x.as_poly()
            .cloned()
            .ok_or_else(|| Error::Parse("entries must be polynomials".into()))
    })
}

pub fn format_poly_body(p: &Poly) -> String {
    let c: Vec<String> = p.coeffs().iter().map(|c| c.to_string()).collect();
    format!("[{}]", c.join(","))
}

pub fn format_poly(p: &Poly) -> String {
    format!("q={}; {}", p.field().q(), format_poly_body(p))
}

fn format_ratfun_body(r: &RatFun) -> String {
    if r.is_poly() {
        format_poly_body(r.num())
    } else {
        format!(
            "{}/{}",
            format_poly_body(r.num()),
            format_poly_body(r.den())
        )
    }
}

pub fn format_matrix<T: Clone + Into<RatFun>>(m: &Matrix<T>) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|i| {
            let e: Vec<String> = (0..m.cols())
                .map(|j| format_ratfun_body(&m[(i, j)].clone().into()))
                .collect();
            format!("[{}]", e.join(","))
        })
        .collect();
    format!("q={}; [{}]", m.field().q(), rows.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_polynomial() {
        let p = parse_poly("q=2; [1,1,1]").unwrap();
        assert_eq!(p.degree(), Some(2));
        assert_eq!(format_poly(&p), "q=2; [1,1,1]");
        assert_eq!(parse_poly("q=3;[]").unwrap().degree(), None);
        assert!(parse_poly("q=2; [1,2]").is_err());
        assert!(parse_poly("[1]").is_err());
        assert!(parse_poly("q=2; [1,1] x").is_err());
    }

    #[test]
    fn parses_matrix_round_trip() {
        let src = "q=2; [[[0,1],[1]],[[1],[]/[1]]]";
        let m = parse_matrix(src).unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 2));
        assert_eq!(format_matrix(&m), "q=2; [[[0,1],[1]],[[1],[]]]");
        let r = parse_ratfun("q=3; [1]/[0,1]").unwrap();
        assert_eq!(r.valuation().finite(), Some(1));
        assert!(parse_poly_matrix("q=2; [[[1]/[0,1]]]").is_err());
        assert!(parse_matrix("q=2; [[[1]],[[1],[0]]]").is_err());
    }
}
