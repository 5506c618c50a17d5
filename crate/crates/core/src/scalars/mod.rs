//! Exact scalars: F_q, F_q[Y], F_q(Y), expansions at infinity, and exact
//! rationals for measure values.

mod field;
mod ideal;
mod jet;
mod poly;
mod ratfun;
pub mod text;

pub use field::{FieldTables, Fq, FqElem};
pub use ideal::{factor_monic, IdealR};
pub use jet::{laurent_jet, LaurentJet};
pub use poly::Poly;
pub use ratfun::{AbsExponent, RatFun, Valuation};

pub use num::BigRational as Rational;

use num::{BigInt, One};

/// Exact `q^e` for any integer exponent.
pub fn q_pow(q: u32, e: i64) -> Rational {
    let base = BigInt::from(q).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        Rational::from_integer(base)
    } else {
        Rational::new(BigInt::one(), base)
    }
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `gcd` of the polynomial entries (monic, zero if all zero).
pub fn poly_gcd_all<'a>(items: impl IntoIterator<Item = &'a Poly>, f: Fq) -> Poly {
    items
        .into_iter()
        .fold(Poly::zero(f), |g, p| Poly::gcd(&g, p))
}

/// Standalone wrappers with the names used throughout the docs.
pub fn poly_xgcd(a: &Poly, b: &Poly) -> crate::Result<(Poly, Poly, Poly)> {
    Poly::xgcd(a, b)
}
pub fn valuation(f: &RatFun) -> Valuation {
    f.valuation()
}
pub fn abs_value_exponent(f: &RatFun) -> AbsExponent {
    f.abs_value_exponent()
}
pub fn proper_split(f: &RatFun) -> (Poly, RatFun) {
    f.proper_split()
}
