use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::field::Fq;
use super::poly::{forward_owned, Poly};
use crate::error::{Error, Result};

/// Valuation at infinity; zero has valuation `Infinity`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinity,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinity => None,
        }
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Infinity, Valuation::Infinity) => Ordering::Equal,
            (Valuation::Infinity, _) => Ordering::Greater,
            (_, Valuation::Infinity) => Ordering::Less,
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
        }
    }
}
impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `log_q |f|`; zero maps to `NegInfinity`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AbsExponent {
    NegInfinity,
    Finite(i64),
}

impl AbsExponent {
    pub fn finite(self) -> Option<i64> {
        match self {
            AbsExponent::Finite(v) => Some(v),
            AbsExponent::NegInfinity => None,
        }
    }
}

/// Element of K = F_q(Y) in reduced form with monic denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFun {
    num: Poly,
    den: Poly,
}

impl RatFun {
    pub fn new(num: Poly, den: Poly) -> Result<RatFun> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.field() != den.field() {
            return Err(Error::FieldMismatch);
        }
        Ok(RatFun::reduced(num, den))
    }

    fn reduced(num: Poly, den: Poly) -> RatFun {
        let f = num.field();
        if num.is_zero() {
            return RatFun {
                num,
                den: Poly::one(f),
            };
        }
        let g = Poly::gcd(&num, &den);
        let (mut n, mut d) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g).unwrap(), den.div_exact(&g).unwrap())
        };
        if !d.is_monic() {
            let c = f.inv(d.lc());
            n = n.scale(c);
            d = d.scale(c);
        }
        RatFun { num: n, den: d }
    }

    pub fn from_poly(p: Poly) -> RatFun {
        let f = p.field();
        RatFun {
            num: p,
            den: Poly::one(f),
        }
    }
    pub fn zero(f: Fq) -> RatFun {
        RatFun::from_poly(Poly::zero(f))
    }
    pub fn one(f: Fq) -> RatFun {
        RatFun::from_poly(Poly::one(f))
    }
    pub fn constant(f: Fq, c: u8) -> RatFun {
        RatFun::from_poly(Poly::constant(f, c))
    }
    /// `Y^e` for any integer `e`.
    pub fn y_pow(f: Fq, e: i64) -> RatFun {
        if e >= 0 {
            RatFun::from_poly(Poly::monomial(f, 1, e as usize))
        } else {
            RatFun {
                num: Poly::one(f),
                den: Poly::monomial(f, 1, (-e) as usize),
            }
        }
    }
    /// The uniformizer `Y^{-1}`.
    pub fn uniformizer(f: Fq) -> RatFun {
        RatFun::y_pow(f, -1)
    }

    pub fn field(&self) -> Fq {
        self.num.field()
    }
    pub fn num(&self) -> &Poly {
        &self.num
    }
    pub fn den(&self) -> &Poly {
        &self.den
    }
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }
    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }
    pub fn as_poly(&self) -> Option<&Poly> {
        self.is_poly().then_some(&self.num)
    }

    /// `deg(den) - deg(num)`.
    pub fn valuation(&self) -> Valuation {
        match self.num.degree() {
            None => Valuation::Infinity,
            Some(dn) => Valuation::Finite(self.den.degree().unwrap() as i64 - dn as i64),
        }
    }

    pub fn abs_value_exponent(&self) -> AbsExponent {
        match self.valuation() {
            Valuation::Infinity => AbsExponent::NegInfinity,
            Valuation::Finite(v) => AbsExponent::Finite(-v),
        }
    }

    /// Membership in the valuation ring O (power series in `Y^{-1}`).
    pub fn is_integral(&self) -> bool {
        self.valuation() >= Valuation::Finite(0)
    }

    /// Leading coefficient of the expansion in `Y^{-1}`.
    pub fn leading_coeff(&self) -> u8 {
        let f = self.field();
        f.mul(self.num.lc(), f.inv(self.den.lc()))
    }

    pub fn inv(&self) -> Result<RatFun> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(RatFun::reduced(self.den.clone(), self.num.clone()))
    }

    pub fn scale(&self, c: u8) -> RatFun {
        RatFun::reduced(self.num.scale(c), self.den.clone())
    }

    pub fn pow(&self, e: i64) -> Result<RatFun> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let k = e.unsigned_abs() as u32;
        Ok(RatFun {
            num: base.num.pow(k),
            den: base.den.pow(k),
        })
    }

    /// Unique splitting `f = pol + prop` with `pol` polynomial and
    /// `prop` of valuation at least 1.
    pub fn proper_split(&self) -> (Poly, RatFun) {
        let (pol, r) = self.num.divrem(&self.den).expect("denominator is nonzero");
        (
            pol,
            RatFun {
                num: r,
                den: self.den.clone(),
            }
            .renormalized(),
        )
    }

    fn renormalized(self) -> RatFun {
        RatFun::reduced(self.num, self.den)
    }

    pub fn polynomial_part(&self) -> Poly {
        self.proper_split().0
    }
}

impl fmt::Debug for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl<'a> Add<&'a RatFun> for &'a RatFun {
    type Output = RatFun;
    fn add(self, rhs: &RatFun) -> RatFun {
        if self.den == rhs.den {
            return RatFun::reduced(&self.num + &rhs.num, self.den.clone());
        }
        RatFun::reduced(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl<'a> Sub<&'a RatFun> for &'a RatFun {
    type Output = RatFun;
    fn sub(self, rhs: &RatFun) -> RatFun {
        if self.den == rhs.den {
            return RatFun::reduced(&self.num - &rhs.num, self.den.clone());
        }
        RatFun::reduced(
            &(&self.num * &rhs.den) - &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl<'a> Mul<&'a RatFun> for &'a RatFun {
    type Output = RatFun;
    fn mul(self, rhs: &RatFun) -> RatFun {
        if self.is_zero() || rhs.is_zero() {
            return RatFun::zero(self.field());
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RatFun::from_poly(&self.num * &rhs.num);
        }
        RatFun::reduced(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl<'a> Div<&'a RatFun> for &'a RatFun {
    type Output = RatFun;
    /// Panics on division by zero; use [`RatFun::inv`] for a checked version.
    fn div(self, rhs: &RatFun) -> RatFun {
        self * &rhs.inv().expect("division by zero rational function")
    }
}

impl Neg for &RatFun {
    type Output = RatFun;
    fn neg(self) -> RatFun {
        RatFun {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}
impl Neg for RatFun {
    type Output = RatFun;
    fn neg(self) -> RatFun {
        -&self
    }
}

forward_owned!(RatFun, Add add, Sub sub, Mul mul, Div div);

impl From<Poly> for RatFun {
    fn from(p: Poly) -> RatFun {
        RatFun::from_poly(p)
    }
}
