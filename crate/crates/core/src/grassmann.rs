//! Flat part of the Grassmannian: jets of `beta alpha^{-1}`, the sup-norm
//! distance, and cell masses.

use num::{BigInt, One};

use crate::blocklu::is_sharp;
use crate::error::{Error, Result};
use crate::latmod::{MatK, PartialLattice};
use crate::measures::c1;
use crate::scalars::{laurent_jet, q_pow, AbsExponent, LaurentJet, Rational};

/// Cell `orb_d(beta_0 + pi^j M_{n,d}(O))` of the flat part.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct GrassCell {
    pub d: usize,
    pub big_d: usize,
    pub precision: i64,
    /// Row-major `n x d` table; entry `k` of each list is the coefficient of `Y^{-k}`.
    pub table: Vec<Vec<u8>>,
}

impl GrassCell {
    /// Nested coefficient lists, e.g. `[[1,0]]`.
    pub fn key(&self) -> String {
        let rows: Vec<String> = self
            .table
            .iter()
            .map(|e| {
                format!(
                    "[{}]",
                    e.iter()
                        .map(|c| c.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                )
            })
            .collect();
        format!("[{}]", rows.join(","))
    }
}

/// Jets of the entries of `beta alpha^{-1}` at precision `j` (row-major).
pub fn grass_point(l: &PartialLattice, j: i64) -> Result<Vec<LaurentJet>> {
    if !is_sharp(l) {
        return Err(Error::NotSharp);
    }
    if j < 1 {
        return Err(Error::Invalid("grass precision must be at least 1".into()));
    }
    let lower = lower_block(l)?;
    Ok(lower.entries().iter().map(|x| laurent_jet(x, j)).collect())
}

/// `beta alpha^{-1}` for the Hermite basis.
pub fn lower_block(l: &PartialLattice) -> Result<MatK> {
    let d = l.rank();
    let b = l.basis().to_k();
    let alpha = b.block(0, d, 0, d);
    let beta = b.block(d, b.rows(), 0, d);
    Ok(&beta * &alpha.inverse()?)
}

/// Cell containing the jets.
pub fn cell_of_jets(jets: &[LaurentJet], d: usize, big_d: usize, j: i64) -> GrassCell {
    let table = jets
        .iter()
        .map(|x| x.window(0, j).expect("jet precision"))
        .collect();
    GrassCell {
        d,
        big_d,
        precision: j,
        table,
    }
}

pub fn grass_cell(l: &PartialLattice, j: i64) -> Result<GrassCell> {
    Ok(cell_of_jets(
        &grass_point(l, j)?,
        l.rank(),
        l.ambient_dim(),
        j,
    ))
}

/// `max |b1 - b2|`, a power of q or 0.
pub fn grass_distance(b1: &MatK, b2: &MatK) -> Result<Rational> {
    if (b1.rows(), b1.cols()) != (b2.rows(), b2.cols()) {
        return Err(Error::Dimension("grass_distance shapes differ".into()));
    }
    if !b1.is_integral() || !b2.is_integral() {
        return Err(Error::Invalid(
            "grass_distance expects integral entries".into(),
        ));
    }
    let q = b1.field().q();
    Ok(match b1.sub(b2).norm_exponent() {
        AbsExponent::NegInfinity => Rational::from_integer(BigInt::from(0)),
        AbsExponent::Finite(e) => q_pow(q, e),
    })
}

/// `mu_Gr(cell) = c_1 q^{-j d n}`.
pub fn cell_mass(d: u32, n: u32, q: u32, j: u32) -> Rational {
    c1(d, n, q) * q_pow(q, -((j * d * n) as i64))
}

/// Number of cells at precision `j`: `q^{j d n}`.
pub fn cell_count(d: u32, n: u32, q: u32, j: u32) -> BigInt {
    BigInt::from(q).pow(j * d * n)
}

/// Mass of the whole flat part is `c_1`, the rest is `1 - c_1`.
pub fn nonflat_mass(d: u32, n: u32, q: u32) -> Rational {
    Rational::one() - c1(d, n, q)
}
