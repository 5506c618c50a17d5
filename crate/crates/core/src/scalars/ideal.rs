use std::fmt;

use num::BigInt;

use super::field::Fq;
use super::poly::Poly;
use crate::error::{Error, Result};

/// Factor a monic polynomial by trial division over monic irreducibles of
/// increasing degree. Returns `(irreducible, multiplicity)` pairs sorted by
/// the polynomial order.
pub fn factor_monic(p: &Poly) -> Vec<(Poly, u32)> {
    assert!(p.is_monic(), "factor_monic expects a monic polynomial");
    let f = p.field();
    let mut rest = p.clone();
    let mut out = Vec::new();
    let mut deg = 1;
    while rest.degree().unwrap() > 0 {
        if 2 * deg > rest.degree().unwrap() {
            out.push((rest.clone(), 1));
            break;
        }
        for g in Poly::monic_of_degree(f, deg) {
            let mut mult = 0;
            while let Some(quot) = rest.div_exact(&g) {
                rest = quot;
                mult += 1;
            }
            if mult > 0 {
                out.push((g, mult));
            }
        }
        deg += 1;
    }
    // merge a trailing irreducible that equals an earlier factor
    out.sort();
    let mut merged: Vec<(Poly, u32)> = Vec::new();
    for (g, m) in out {
        match merged.last_mut() {
            Some((h, mh)) if *h == g => *mh += m,
            _ => merged.push((g, m)),
        }
    }
    merged
}

/// Nonzero ideal of F_q[Y], stored by its monic generator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IdealR {
    generator: Poly,
    factors: Vec<(Poly, u32)>,
}

impl IdealR {
    pub fn new(generator: Poly) -> Result<IdealR> {
        if generator.is_zero() {
            return Err(Error::ZeroIdeal);
        }
        let generator = generator.monic();
        let factors = factor_monic(&generator);
        Ok(IdealR { generator, factors })
    }

    pub fn unit(f: Fq) -> IdealR {
        IdealR {
            generator: Poly::one(f),
            factors: Vec::new(),
        }
    }

    pub fn generator(&self) -> &Poly {
        &self.generator
    }
    pub fn field(&self) -> Fq {
        self.generator.field()
    }
    pub fn is_unit(&self) -> bool {
        self.generator.is_one()
    }
    pub fn degree(&self) -> usize {
        self.generator.degree().unwrap()
    }
    pub fn factors(&self) -> &[(Poly, u32)] {
        &self.factors
    }
    pub fn primes(&self) -> impl Iterator<Item = &Poly> {
        self.factors.iter().map(|(p, _)| p)
    }

    /// `N(I) = q^{deg}`.
    pub fn norm(&self) -> BigInt {
        BigInt::from(self.field().q()).pow(self.degree() as u32)
    }

    pub fn contains(&self, p: &Poly) -> bool {
        self.generator.divides(p)
    }

    pub fn product(&self, other: &IdealR) -> IdealR {
        IdealR::new(&self.generator * &other.generator).expect("product of nonzero ideals")
    }

    pub fn coprime(&self, other: &IdealR) -> bool {
        Poly::gcd(&self.generator, &other.generator).is_one()
    }
}

impl fmt::Debug for IdealR {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.generator)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(q: u32, c: &[u8]) -> Poly {
        Poly::new(Fq::new(q).unwrap(), c.to_vec())
    }

    #[test]
    fn factor_examples() {
        assert_eq!(
            factor_monic(&p(2, &[0, 1, 1])),
            vec![(p(2, &[0, 1]), 1), (p(2, &[1, 1]), 1)]
        );
        assert_eq!(factor_monic(&p(2, &[1, 1, 1])), vec![(p(2, &[1, 1, 1]), 1)]);
        assert_eq!(factor_monic(&p(2, &[0, 1])), vec![(p(2, &[0, 1]), 1)]);
        assert_eq!(factor_monic(&p(3, &[1])), vec![]);
        // (Y+1)^3 over F_2 = Y^3 + Y^2 + Y + 1
        assert_eq!(factor_monic(&p(2, &[1, 1, 1, 1])), vec![(p(2, &[1, 1]), 3)]);
    }

    #[test]
    fn ideal_norm() {
        let i = IdealR::new(p(3, &[0, 2, 1])).unwrap();
        assert_eq!(i.norm(), BigInt::from(9));
        assert_eq!(i.primes().count(), 2);
        assert!(IdealR::new(p(3, &[])).is_err());
        assert!(IdealR::unit(Fq::new(2).unwrap()).is_unit());
    }
}
