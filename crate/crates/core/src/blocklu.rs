//! Block LU decomposition `g = u^- g'' z u^+`, sharpness, the flattening
//! permutation, canonical representatives in `SL_D(R)`, and correlated pairs.

use crate::error::{Error, Result};
use crate::latmod::{complete_to_sl, hermite_form, maximal_minors, MatK, MatR, PartialLattice};
use crate::scalars::{laurent_jet, LaurentJet, Poly, RatFun, Valuation};

pub fn lcm(a: usize, b: usize) -> usize {
    a / num::integer::gcd(a, b) * b
}

/// Factors of `g = u_minus * diag(g_bar, g_under) * z * u_plus`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockLU {
    pub d: usize,
    pub n: usize,
    pub u_minus: MatK,
    pub g_bar: MatK,
    pub g_under: MatK,
    pub z: MatK,
    pub u_plus: MatK,
    /// `t = -nu(det alpha) / lcm(d, n)`; `z = diag(Y^{lt/d} I_d, Y^{-lt/n} I_n)`.
    pub level: i64,
    pub ell: usize,
}

impl BlockLU {
    /// Lower-left block `beta alpha^{-1}`.
    pub fn lower(&self) -> MatK {
        self.u_minus.block(self.d, self.d + self.n, 0, self.d)
    }
    /// Upper-right block `alpha^{-1} gamma`.
    pub fn upper(&self) -> MatK {
        self.u_plus.block(0, self.d, self.d, self.d + self.n)
    }
    pub fn g_dd(&self) -> MatK {
        let f = self.g_bar.field();
        MatK::from_blocks(
            &self.g_bar,
            &MatK::zeros(f, self.d, self.n),
            &MatK::zeros(f, self.n, self.d),
            &self.g_under,
        )
    }
    pub fn reassemble(&self) -> MatK {
        &(&(&self.u_minus * &self.g_dd()) * &self.z) * &self.u_plus
    }
}

fn finite_valuation(x: &RatFun) -> Result<i64> {
    match x.valuation() {
        Valuation::Finite(v) => Ok(v),
        Valuation::Infinity => Err(Error::SingularTopBlock),
    }
}

pub fn block_lu(g: &MatK, d: usize) -> Result<BlockLU> {
    let big_d = g.rows();
    if !g.is_square() || d == 0 || d >= big_d {
        return Err(Error::Dimension(format!(
            "block_lu of {}x{} with d={d}",
            g.rows(),
            g.cols()
        )));
    }
    let f = g.field();
    let n = big_d - d;
    if !g.det().is_one() {
        return Err(Error::Invalid("block_lu expects determinant 1".into()));
    }
    let alpha = g.block(0, d, 0, d);
    let gamma = g.block(0, d, d, big_d);
    let beta = g.block(d, big_d, 0, d);
    let delta = g.block(d, big_d, d, big_d);
    let v = finite_valuation(&alpha.det())?;
    let ell = lcm(d, n);
    if v.rem_euclid(ell as i64) != 0 {
        return Err(Error::NotInUg);
    }
    let alpha_inv = alpha.inverse()?;
    let lower = &beta * &alpha_inv;
    let upper = &alpha_inv * &gamma;
    let schur = delta.sub(&(&lower * &gamma));
    let (vd, vn) = (v / d as i64, v / n as i64);
    let g_bar = alpha.scale_y(vd);
    let g_under = schur.scale_y(-vn);
    let z = MatK::from_fn(f, big_d, big_d, |i, j| match (i == j, i < d) {
        (false, _) => RatFun::zero(f),
        (true, true) => RatFun::y_pow(f, -vd),
        (true, false) => RatFun::y_pow(f, vn),
    });
    let id_d = MatK::identity(f, d);
    let id_n = MatK::identity(f, n);
    let u_minus = MatK::from_blocks(&id_d, &MatK::zeros(f, d, n), &lower, &id_n);
    let u_plus = MatK::from_blocks(&id_d, &upper, &MatK::zeros(f, n, d), &id_n);
    Ok(BlockLU {
        d,
        n,
        u_minus,
        g_bar,
        g_under,
        z,
        u_plus,
        level: -v / ell as i64,
        ell,
    })
}

/// Top block `alpha`, bottom block `beta` of a `D x d` basis.
fn split_basis(b: &MatR, d: usize) -> (MatK, MatK) {
    let k = b.to_k();
    (k.block(0, d, 0, d), k.block(d, b.rows(), 0, d))
}

/// `det alpha != 0`, `lcm(d, n) | nu(det alpha)`, `beta alpha^{-1}` integral.
pub fn is_sharp(l: &PartialLattice) -> bool {
    let d = l.rank();
    let (alpha, beta) = split_basis(l.basis(), d);
    let det = alpha.det();
    let Valuation::Finite(v) = det.valuation() else {
        return false;
    };
    if v.rem_euclid(lcm(d, l.corank()) as i64) != 0 {
        return false;
    }
    (&beta * &alpha.inverse().unwrap()).is_integral()
}

/// Signed permutation matrix moving the rows of a maximal-degree `d x d`
/// minor (lexicographically first among ties) to the top, with determinant 1.
pub fn flat_permutation(b: &MatR) -> MatR {
    let f = b.field();
    let big_d = b.rows();
    let minors = maximal_minors(b);
    let best = minors
        .iter()
        .filter(|(_, m)| !m.is_zero())
        .max_by(|(ra, ma), (rb, mb)| ma.degree().cmp(&mb.degree()).then(rb.cmp(ra)))
        .map(|(rows, _)| rows.clone())
        .unwrap_or_else(|| (0..b.cols()).collect());
    let mut order = best.clone();
    order.extend((0..big_d).filter(|i| !best.contains(i)));
    let mut sigma = MatR::zeros(f, big_d, big_d);
    for (new, &old) in order.iter().enumerate() {
        sigma[(new, old)] = Poly::one(f);
    }
    let inversions = (0..big_d)
        .flat_map(|i| (i + 1..big_d).map(move |j| (i, j)))
        .filter(|&(i, j)| order[i] > order[j])
        .count();
    if inversions % 2 == 1 {
        sigma.scale_row(big_d - 1, f.neg(1));
    }
    sigma
}

/// Apply a flattening permutation to a lattice.
pub fn flatten_lattice(l: &PartialLattice) -> Result<(MatR, PartialLattice)> {
    let sigma = flat_permutation(l.basis());
    let moved = PartialLattice::new(&(&sigma * l.basis()))?;
    Ok((sigma, moved))
}

/// Lattice spanned by the first `d` columns of `g`.
pub fn lattice_rep(g: &MatR, d: usize) -> Result<PartialLattice> {
    PartialLattice::new(&g.columns(0..d))
}

/// Canonical `g` in `SL_D(R)` with `Lambda_g = L`, and its block LU.
///
/// Starting from any completion `g0`, right multiplication by
/// `p = [[a, b], [0, c]]` in `SL_D(R)` makes `alpha a` Hermite, makes the
/// lattice of `(g_under^T)^{-1}` Hermite (the determinant defect goes into the
/// last column of `c`), and makes the `u^+` block strictly proper.
pub fn to_omega_rep(l: &PartialLattice) -> Result<(MatR, BlockLU)> {
    if !is_sharp(l) {
        return Err(Error::NotSharp);
    }
    let f = l.field();
    let (big_d, d) = (l.ambient_dim(), l.rank());
    let n = big_d - d;
    let g0 = complete_to_sl(l)?;
    let g0k = g0.to_k();
    let lu0 = block_lu(&g0k, d)?;

    let alpha = g0.block(0, d, 0, d);
    let (_, a) = hermite_form(&alpha)?;
    // W = (S^T)^{-1} is the transposed lower-right block of g0^{-1}
    let w = inverse_block_transposed(&g0k, d)?;
    let (_, w_u) = hermite_form(&w)?;
    // (S c)^T^{-1} = W (c^T)^{-1}: choose c = (w_u^{-1})^T
    let mut c = w_u
        .to_k()
        .inverse()?
        .transpose()
        .to_r()
        .ok_or(Error::NotYLocal)?;
    let lambda = f.mul(a.det().lc(), c.det().lc());
    c.scale_col(n - 1, f.inv(lambda));

    let x = lu0.upper();
    let a_k = a.to_k();
    let inner = &(&a_k.inverse()? * &x) * &c.to_k();
    let pol = inner.map(|e| RatFun::from_poly(e.polynomial_part()));
    let b = (&a_k * &pol).neg().to_r().ok_or(Error::NotYLocal)?;
    let p = MatR::from_blocks(&a, &b, &MatR::zeros(f, n, d), &c);
    let g = &g0 * &p;
    debug_assert!(g.det().is_one());
    let lu = block_lu(&g.to_k(), d)?;
    Ok((g, lu))
}

/// Transposed lower-right `n x n` block of `g^{-1}` (polynomial when
/// `g` is in `SL_D(R)`).
fn inverse_block_transposed(g: &MatK, d: usize) -> Result<MatR> {
    let inv = g.inverse()?;
    let big_d = g.rows();
    inv.block(d, big_d, d, big_d)
        .transpose()
        .to_r()
        .ok_or(Error::NotYLocal)
}

/// `(gbar R^d, gcheck_under R^n)` with the unit `det gbar` as a jet.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelatedPair {
    /// Lattice `Y^{-m} H R^d` stored as `(m, H)` with `H` Hermite.
    pub lat_d: (i64, MatR),
    pub lat_n: (i64, MatR),
    /// `det gbar / lc`, a 1-unit, at the requested precision.
    pub det_jet: LaurentJet,
}

impl CorrelatedPair {
    /// Coefficients of `Y^{-1} .. Y^{-(j-1)}` of the determinant jet: the class
    /// in `(1 + pi O) / (1 + pi^j O)`.
    pub fn det_class(&self, j: i64) -> Vec<u8> {
        self.det_jet.window(1, j).expect("jet precision too small")
    }
}

pub const DEFAULT_DET_PRECISION: i64 = 8;

/// Correlated pair of a sharp lattice, computed from any representative.
pub fn correlated_pair(l: &PartialLattice, precision: i64) -> Result<CorrelatedPair> {
    if !is_sharp(l) {
        return Err(Error::NotSharp);
    }
    let g = complete_to_sl(l)?;
    correlated_pair_of(&g, l.rank(), precision)
}

/// Correlated pair read off a representative `g` in `SL_D(R)` with
/// `Lambda_g` sharp.
pub fn correlated_pair_of(g: &MatR, d: usize, precision: i64) -> Result<CorrelatedPair> {
    let big_d = g.rows();
    let n = big_d - d;
    let alpha = g.block(0, d, 0, d);
    let det_alpha = alpha.det();
    let v = -(det_alpha.degree().ok_or(Error::SingularTopBlock)? as i64);
    let ell = lcm(d, n) as i64;
    if v.rem_euclid(ell) != 0 {
        return Err(Error::NotInUg);
    }
    let h_alpha = hermite_form(&alpha)?.0;
    let w = inverse_block_transposed(&g.to_k(), d)?;
    let h_w = hermite_form(&w)?.0;
    // gbar = Y^{v/d} alpha, det gbar = Y^v det alpha
    let unit = &RatFun::y_pow(g.field(), v) * &RatFun::from_poly(det_alpha.monic());
    let det_jet = laurent_jet(&unit, precision);
    Ok(CorrelatedPair {
        lat_d: (-v / d as i64, h_alpha),
        lat_n: (-v / n as i64, h_w),
        det_jet,
    })
}
