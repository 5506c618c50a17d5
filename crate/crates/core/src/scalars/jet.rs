use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::field::Fq;
use super::ratfun::{RatFun, Valuation};

/// Truncated expansion in powers of the uniformizer `Y^{-1}`.
///
/// Coefficient `i` of `coeffs` belongs to the exponent `start + i`. All
/// exponents below `precision` are exact; `precision == None` marks an exact
/// jet (only the zero jet is produced that way by [`laurent_jet`]). Stored
/// jets are normalized: the first coefficient is nonzero, or the jet carries
/// no terms at all, in which case `start` equals the precision.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentJet {
    field: Fq,
    start: i64,
    coeffs: Vec<u8>,
    precision: Option<i64>,
}

/// Expansion of `f` with every term of exponent `< precision` exact.
pub fn laurent_jet(f: &RatFun, precision: i64) -> LaurentJet {
    let field = f.field();
    let v = match f.valuation() {
        Valuation::Infinity => return LaurentJet::exact_zero(field),
        Valuation::Finite(v) => v,
    };
    let len = (precision - v).max(0) as usize;
    let (num, den) = (f.num(), f.den());
    let n = num.degree().unwrap();
    let m = den.degree().unwrap();
    let num_rev = |i: usize| if i <= n { num.coeff(n - i) } else { 0 };
    let den_rev = |i: usize| if i <= m { den.coeff(m - i) } else { 0 };
    let inv0 = field.inv(den_rev(0));
    let mut s: Vec<u8> = Vec::with_capacity(len);
    for k in 0..len {
        let mut acc = num_rev(k);
        for j in 1..=k.min(m) {
            acc = field.sub(acc, field.mul(den_rev(j), s[k - j]));
        }
        s.push(field.mul(acc, inv0));
    }
    LaurentJet::from_parts(field, v, s, Some(precision))
}

impl LaurentJet {
    pub fn from_parts(
        field: Fq,
        start: i64,
        coeffs: Vec<u8>,
        precision: Option<i64>,
    ) -> LaurentJet {
        let mut jet = LaurentJet {
            field,
            start,
            coeffs,
            precision,
        };
        jet.normalize();
        jet
    }

    pub fn exact_zero(field: Fq) -> LaurentJet {
        LaurentJet {
            field,
            start: 0,
            coeffs: Vec::new(),
            precision: None,
        }
    }

    fn normalize(&mut self) {
        if let Some(p) = self.precision {
            let keep = (p - self.start).max(0) as usize;
            self.coeffs.truncate(keep);
        }
        let lead = self.coeffs.iter().take_while(|&&c| c == 0).count();
        self.coeffs.drain(..lead);
        self.start += lead as i64;
        if self.coeffs.is_empty() {
            self.start = self.precision.unwrap_or(0);
        } else if self.precision.is_none() {
            while self.coeffs.last() == Some(&0) {
                self.coeffs.pop();
            }
        }
    }

    pub fn field(&self) -> Fq {
        self.field
    }
    /// Exponent of the first nonzero term (or the precision if none is known).
    pub fn leading_exponent(&self) -> i64 {
        self.start
    }
    pub fn coefficients(&self) -> &[u8] {
        &self.coeffs
    }
    pub fn precision(&self) -> Option<i64> {
        self.precision
    }
    pub fn is_exact_zero(&self) -> bool {
        self.precision.is_none() && self.coeffs.is_empty()
    }

    /// Coefficient of `Y^{-e}`, `None` beyond the precision.
    pub fn coeff(&self, e: i64) -> Option<u8> {
        if self.precision.is_some_and(|p| e >= p) {
            return None;
        }
        if e < self.start {
            return Some(0);
        }
        Some(
            self.coeffs
                .get((e - self.start) as usize)
                .copied()
                .unwrap_or(0),
        )
    }

    /// Coefficients for the exponents `from..to` (all must be within precision).
    pub fn window(&self, from: i64, to: i64) -> Option<Vec<u8>> {
        (from..to).map(|e| self.coeff(e)).collect()
    }

    pub fn truncate(&self, precision: i64) -> LaurentJet {
        let p = self.precision.map_or(precision, |p| p.min(precision));
        LaurentJet::from_parts(self.field, self.start, self.coeffs.clone(), Some(p))
    }

    fn min_precision(a: Option<i64>, b: Option<i64>) -> Option<i64> {
        match (a, b) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, None) => x,
            (None, y) => y,
        }
    }

    fn combine(&self, rhs: &LaurentJet, op: impl Fn(u8, u8) -> u8) -> LaurentJet {
        let precision = LaurentJet::min_precision(self.precision, rhs.precision);
        let lo = self.start.min(rhs.start);
        let hi = match precision {
            Some(p) => p,
            None => {
                (self.start + self.coeffs.len() as i64).max(rhs.start + rhs.coeffs.len() as i64)
            }
        };
        let coeffs = (lo..hi.max(lo))
            .map(|e| op(self.coeff(e).unwrap_or(0), rhs.coeff(e).unwrap_or(0)))
            .collect();
        LaurentJet::from_parts(self.field, lo, coeffs, precision)
    }
}

impl fmt::Debug for LaurentJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<String> = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c != 0 {
                terms.push(format!("{c}*Y^{}", -(self.start + i as i64)));
            }
        }
        if terms.is_empty() {
            terms.push("0".into());
        }
        match self.precision {
            Some(p) => write!(f, "{} + O(Y^{})", terms.join(" + "), -p),
            None => write!(f, "{}", terms.join(" + ")),
        }
    }
}

impl<'a> Add<&'a LaurentJet> for &'a LaurentJet {
    type Output = LaurentJet;
    fn add(self, rhs: &LaurentJet) -> LaurentJet {
        let f = self.field;
        self.combine(rhs, |a, b| f.add(a, b))
    }
}

impl<'a> Sub<&'a LaurentJet> for &'a LaurentJet {
    type Output = LaurentJet;
    fn sub(self, rhs: &LaurentJet) -> LaurentJet {
        let f = self.field;
        self.combine(rhs, |a, b| f.sub(a, b))
    }
}

impl Neg for &LaurentJet {
    type Output = LaurentJet;
    fn neg(self) -> LaurentJet {
        let f = self.field;
        LaurentJet {
            coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect(),
            ..self.clone()
        }
    }
}

impl<'a> Mul<&'a LaurentJet> for &'a LaurentJet {
    type Output = LaurentJet;
    fn mul(self, rhs: &LaurentJet) -> LaurentJet {
        let f = self.field;
        if self.is_exact_zero() || rhs.is_exact_zero() {
            return LaurentJet::exact_zero(f);
        }
        // an unknown factor of valuation >= start contributes error at start + other precision
        let precision = LaurentJet::min_precision(
            self.precision.map(|p| p + rhs.start),
            rhs.precision.map(|p| p + self.start),
        );
        let lo = self.start + rhs.start;
        let full = self.coeffs.len() + rhs.coeffs.len();
        let len = match precision {
            Some(p) => ((p - lo).max(0) as usize).min(full),
            None => full,
        };
        let mut coeffs = vec![0u8; len];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                if i + j < len {
                    coeffs[i + j] = f.add(coeffs[i + j], f.mul(a, b));
                }
            }
        }
        LaurentJet::from_parts(f, lo, coeffs, precision)
    }
}
