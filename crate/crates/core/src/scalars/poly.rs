use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::field::Fq;
use crate::error::{Error, Result};

/// Polynomial in F_q[Y], coefficients little-endian, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    field: Fq,
    coeffs: Vec<u8>,
}

impl Poly {
    pub fn new(field: Fq, mut coeffs: Vec<u8>) -> Poly {
        let q = field.q();
        for c in coeffs.iter_mut() {
            *c = (*c as u32 % q) as u8;
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { field, coeffs }
    }

    pub fn zero(field: Fq) -> Poly {
        Poly {
            field,
            coeffs: Vec::new(),
        }
    }
    pub fn one(field: Fq) -> Poly {
        Poly {
            field,
            coeffs: vec![1],
        }
    }
    pub fn constant(field: Fq, c: u8) -> Poly {
        Poly::new(field, vec![c])
    }
    /// `c * Y^n`.
    pub fn monomial(field: Fq, c: u8, n: usize) -> Poly {
        let mut coeffs = vec![0; n + 1];
        coeffs[n] = c;
        Poly::new(field, coeffs)
    }
    /// The indeterminate `Y`.
    pub fn y(field: Fq) -> Poly {
        Poly::monomial(field, 1, 1)
    }

    pub fn field(&self) -> Fq {
        self.field
    }
    pub fn coeffs(&self) -> &[u8] {
        &self.coeffs
    }
    pub fn coeff(&self, i: usize) -> u8 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }
    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }
    /// Degree as a signed integer with -1 standing in for the zero polynomial.
    /// Only for loops and bounds; valuations use [`super::Valuation`].
    pub fn deg_i64(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }
    /// Nonzero constant, i.e. a unit of F_q[Y].
    pub fn is_unit(&self) -> bool {
        self.coeffs.len() == 1
    }
    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&1)
    }
    /// Leading coefficient, 0 for the zero polynomial.
    pub fn lc(&self) -> u8 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn scale(&self, c: u8) -> Poly {
        if c == 0 {
            return Poly::zero(self.field);
        }
        let f = self.field;
        Poly {
            field: f,
            coeffs: self.coeffs.iter().map(|&a| f.mul(a, c)).collect(),
        }
    }

    /// Multiply by `Y^n`.
    pub fn shift(&self, n: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![0; n];
        coeffs.extend_from_slice(&self.coeffs);
        Poly {
            field: self.field,
            coeffs,
        }
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(self.field.inv(self.lc()))
    }

    pub fn divrem(&self, b: &Poly) -> Result<(Poly, Poly)> {
        let f = self.field;
        let db = b.degree().ok_or(Error::DivisionByZero)?;
        if self.coeffs.len() <= db {
            return Ok((Poly::zero(f), self.clone()));
        }
        let inv_lc = f.inv(b.lc());
        let mut r = self.coeffs.clone();
        let mut quot = vec![0u8; r.len() - db];
        for i in (0..quot.len()).rev() {
            let c = f.mul(r[i + db], inv_lc);
            quot[i] = c;
            if c != 0 {
                for (j, &bj) in b.coeffs.iter().enumerate() {
                    r[i + j] = f.sub(r[i + j], f.mul(c, bj));
                }
            }
        }
        r.truncate(db);
        Ok((Poly::new(f, quot), Poly::new(f, r)))
    }

    pub fn rem(&self, b: &Poly) -> Result<Poly> {
        Ok(self.divrem(b)?.1)
    }

    /// Quotient when `b` divides `self`; `None` otherwise.
    pub fn div_exact(&self, b: &Poly) -> Option<Poly> {
        let (quot, r) = self.divrem(b).ok()?;
        r.is_zero().then_some(quot)
    }

    pub fn divides(&self, other: &Poly) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.rem(self).map(|r| r.is_zero()).unwrap_or(false)
    }

    /// Monic gcd; zero when both inputs are zero.
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let r = x.rem(&y).expect("nonzero divisor");
            x = y;
            y = r;
        }
        x.monic()
    }

    /// Extended gcd: `(g, u, v)` with `g = u a + v b`, `g` monic.
    pub fn xgcd(a: &Poly, b: &Poly) -> Result<(Poly, Poly, Poly)> {
        if a.is_zero() && b.is_zero() {
            return Err(Error::ZeroGcd);
        }
        let f = a.field;
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (Poly::one(f), Poly::zero(f));
        let (mut t0, mut t1) = (Poly::zero(f), Poly::one(f));
        while !r1.is_zero() {
            let (quot, r) = r0.divrem(&r1)?;
            let s = &s0 - &(&quot * &s1);
            let t = &t0 - &(&quot * &t1);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        let c = f.inv(r0.lc());
        Ok((r0.scale(c), s0.scale(c), t0.scale(c)))
    }

    pub fn eval(&self, x: u8) -> u8 {
        let f = self.field;
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| f.add(f.mul(acc, x), c))
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// All polynomials of degree at most `max_deg` (including zero), in
    /// increasing order of their little-endian base-q code.
    pub fn all_up_to(field: Fq, max_deg: usize) -> impl Iterator<Item = Poly> {
        let q = field.q() as u64;
        let count = q.pow(max_deg as u32 + 1);
        (0..count).map(move |code| Poly::from_code(field, code, max_deg + 1))
    }

    /// Monic polynomials of exact degree `deg`.
    pub fn monic_of_degree(field: Fq, deg: usize) -> impl Iterator<Item = Poly> {
        let q = field.q() as u64;
        (0..q.pow(deg as u32)).map(move |code| {
            let mut p = Poly::from_code(field, code, deg);
            p.coeffs.resize(deg + 1, 0);
            p.coeffs[deg] = 1;
            p
        })
    }

    pub(crate) fn from_code(field: Fq, mut code: u64, len: usize) -> Poly {
        let q = field.q() as u64;
        let mut coeffs = Vec::with_capacity(len);
        for _ in 0..len {
            coeffs.push((code % q) as u8);
            code /= q;
        }
        Poly::new(field, coeffs)
    }

    pub fn is_irreducible(&self) -> bool {
        let Some(d) = self.degree() else { return false };
        if d == 0 {
            return false;
        }
        for k in 1..=d / 2 {
            for g in Poly::monic_of_degree(self.field, k) {
                if g.divides(self) {
                    return false;
                }
            }
        }
        true
    }
}

impl Ord for Poly {
    /// Degree first, then coefficients from the top down.
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}
impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "Y")?,
                (1, c) => write!(f, "{c}*Y")?,
                (i, 1) => write!(f, "Y^{i}")?,
                (i, c) => write!(f, "{c}*Y^{i}")?,
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let f = self.field;
        let (long, short) = if self.coeffs.len() >= rhs.coeffs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut coeffs = long.coeffs.clone();
        for (c, &s) in coeffs.iter_mut().zip(&short.coeffs) {
            *c = f.add(*c, s);
        }
        Poly::new(f, coeffs)
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let f = self.field;
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| f.sub(self.coeff(i), rhs.coeff(i))).collect();
        Poly::new(f, coeffs)
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let f = self.field;
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(f);
        }
        let mut coeffs = vec![0u8; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = f.add(coeffs[i + j], f.mul(a, b));
            }
        }
        Poly::new(f, coeffs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        let f = self.field;
        Poly {
            field: f,
            coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($t:ty, $($tr:ident $m:ident),*) => {$(
        impl $tr<$t> for $t {
            type Output = $t;
            fn $m(self, rhs: $t) -> $t { (&self).$m(&rhs) }
        }
        impl<'a> $tr<&'a $t> for $t {
            type Output = $t;
            fn $m(self, rhs: &'a $t) -> $t { (&self).$m(rhs) }
        }
    )*};
}
pub(crate) use forward_owned;
forward_owned!(Poly, Add add, Sub sub, Mul mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}
