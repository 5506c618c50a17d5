use std::fmt;

use super::matrix::{MatK, MatR};
use super::normal::{hermite_basis, hermite_pivots, smith_form};
use crate::error::{Error, Result};
use crate::scalars::{poly_gcd_all, AbsExponent, Fq, Poly, RatFun};

/// Rank-d sublattice of R^D stored by its column Hermite basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PartialLattice {
    basis: MatR,
    covol_exp: i64,
}

impl PartialLattice {
    /// Lattice spanned by the columns of `b` (full column rank required).
    pub fn new(b: &MatR) -> Result<PartialLattice> {
        if b.cols() == 0 || b.cols() > b.rows() {
            return Err(Error::Dimension(format!(
                "basis of shape {}x{}",
                b.rows(),
                b.cols()
            )));
        }
        let basis = hermite_basis(b)?;
        let covol_exp = max_minor_degree(&basis);
        Ok(PartialLattice { basis, covol_exp })
    }

    /// Trust the caller that `basis` is already in Hermite form.
    pub(crate) fn from_hermite(basis: MatR, covol_exp: i64) -> PartialLattice {
        debug_assert_eq!(hermite_basis(&basis).as_ref(), Ok(&basis));
        PartialLattice { basis, covol_exp }
    }

    /// `R^d x {0}` inside `R^D`.
    pub fn standard(f: Fq, d: usize, big_d: usize) -> PartialLattice {
        let basis = MatR::from_fn(f, big_d, d, |i, j| {
            if i == j {
                Poly::one(f)
            } else {
                Poly::zero(f)
            }
        });
        PartialLattice {
            basis,
            covol_exp: 0,
        }
    }

    /// Span of a single vector.
    pub fn from_vector(v: &[Poly]) -> Result<PartialLattice> {
        let f = v
            .first()
            .ok_or_else(|| Error::Dimension("empty vector".into()))?
            .field();
        PartialLattice::new(&MatR::from_vec(f, v.len(), 1, v.to_vec()))
    }

    pub fn field(&self) -> Fq {
        self.basis.field()
    }
    pub fn rank(&self) -> usize {
        self.basis.cols()
    }
    pub fn ambient_dim(&self) -> usize {
        self.basis.rows()
    }
    /// Complementary rank `D - d`.
    pub fn corank(&self) -> usize {
        self.basis.rows() - self.basis.cols()
    }
    pub fn basis(&self) -> &MatR {
        &self.basis
    }
    /// `log_q` of the normalized covolume.
    pub fn covol_exp(&self) -> i64 {
        self.covol_exp
    }
    pub fn pivots(&self) -> Vec<usize> {
        hermite_pivots(&self.basis)
    }

    /// Whether `v` lies in the lattice.
    pub fn contains(&self, v: &[Poly]) -> bool {
        let f = self.field();
        let piv = self.pivots();
        let d = self.rank();
        // forward substitution on the lower-triangular pivot rows
        let mut x: Vec<Poly> = Vec::with_capacity(d);
        for (j, &p) in piv.iter().enumerate() {
            let mut rhs = v[p].clone();
            for (k, xk) in x.iter().enumerate() {
                rhs = &rhs - &(&self.basis[(p, k)] * xk);
            }
            let _ = j;
            match rhs.div_exact(&self.basis[(p, j)]) {
                Some(c) => x.push(c),
                None => return false,
            }
        }
        (0..self.ambient_dim()).all(|i| {
            let s = (0..d).fold(Poly::zero(f), |acc, k| {
                &acc + &(&self.basis[(i, k)] * &x[k])
            });
            s == v[i]
        })
    }

    /// Whether `v` lies in `V_Lambda`, the K-span.
    pub fn in_span(&self, v: &[Poly]) -> bool {
        let m = self
            .basis
            .hstack(&MatR::from_vec(self.field(), v.len(), 1, v.to_vec()));
        m.to_k().rank() == self.rank()
    }
}

impl fmt::Debug for PartialLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lattice(e={}, {:?})", self.covol_exp, self.basis)
    }
}

impl PartialOrd for PartialLattice {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for PartialLattice {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.ambient_dim(), self.rank(), self.covol_exp)
            .cmp(&(other.ambient_dim(), other.rank(), other.covol_exp))
            .then_with(|| self.basis.entries().cmp(other.basis.entries()))
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Maximal minors `(rows, det)` of a `D x d` matrix.
pub fn maximal_minors(b: &MatR) -> Vec<(Vec<usize>, Poly)> {
    let all_cols: Vec<usize> = (0..b.cols()).collect();
    subsets(b.rows(), b.cols())
        .into_iter()
        .map(|rows| {
            let det = b.submatrix(&rows, &all_cols).det();
            (rows, det)
        })
        .collect()
}

fn max_minor_degree(b: &MatR) -> i64 {
    maximal_minors(b)
        .iter()
        .filter_map(|(_, m)| m.degree())
        .max()
        .map_or(i64::MIN, |d| d as i64)
}

/// `max deg` of the maximal minors.
pub fn covol_exponent(l: &PartialLattice) -> i64 {
    max_minor_degree(l.basis())
}

/// Smith route: all invariant factors are units.
pub fn is_primitive(l: &PartialLattice) -> bool {
    smith_form(l.basis()).invariants.iter().all(|p| p.is_one())
}

/// Minor route: gcd of the maximal minors is a unit.
pub fn is_primitive_by_minors(l: &PartialLattice) -> bool {
    let minors = maximal_minors(l.basis());
    poly_gcd_all(minors.iter().map(|(_, m)| m), l.field()).is_one()
}

/// `g` in `SL_D(R)` whose first `d` columns are the Hermite basis of `l`.
pub fn complete_to_sl(l: &PartialLattice) -> Result<MatR> {
    let s = smith_form(l.basis());
    if !s.invariants.iter().all(|p| p.is_one()) {
        return Err(Error::NotPrimitive);
    }
    let (big_d, d) = (l.ambient_dim(), l.rank());
    let f = l.field();
    // B = L^-1 [I; 0] R^-1, so L^-1 diag(R^-1, I) starts with B
    let mut ext = MatR::identity(f, big_d);
    for i in 0..d {
        for j in 0..d {
            ext[(i, j)] = s.r_inv[(i, j)].clone();
        }
    }
    let mut g = &s.l_inv * &ext;
    let det = g.det();
    debug_assert!(det.is_unit());
    g.scale_col(big_d - 1, f.inv(det.lc()));
    Ok(g)
}

/// `{w in R^D : w^T B = 0}`, a primitive lattice of rank `D - d`.
pub fn orthogonal_lattice(l: &PartialLattice) -> Result<PartialLattice> {
    let s = smith_form(l.basis());
    if !s.invariants.iter().all(|p| p.is_one()) {
        return Err(Error::NotPrimitive);
    }
    let (big_d, d) = (l.ambient_dim(), l.rank());
    // w^T = (0, y) L
    let k = MatR::from_fn(l.field(), big_d, big_d - d, |i, j| s.l[(d + j, i)].clone());
    PartialLattice::new(&k)
}

/// Dual lattice, written in the coordinates of an isometric flattening of
/// `V_Lambda`: `V_Lambda -> K^d`, `x -> (u x)_top`.
#[derive(Clone, Debug)]
pub struct DualLattice {
    pub flatten: MatK,
    /// Basis of `Lambda^*` in `K^d`, `(C_top^T)^{-1}`.
    pub basis: MatK,
    pub covol_exp: i64,
}

/// Factor lattice `R^D / Lambda` inside `V / V_Lambda`, in the coordinates
/// `x -> (u x)_bottom`.
#[derive(Clone, Debug)]
pub struct FactorLattice {
    pub flatten: MatK,
    pub basis: MatK,
    pub covol_exp: i64,
}

/// `log_q |det m|`.
pub fn det_exponent(m: &MatK) -> i64 {
    match m.det().abs_value_exponent() {
        AbsExponent::Finite(e) => e,
        AbsExponent::NegInfinity => i64::MIN,
    }
}

pub fn dual_lattice(l: &PartialLattice) -> Result<DualLattice> {
    let d = l.rank();
    let (u, c) = isometric_flatten(&l.basis().to_k(), d)?;
    let top = c.block(0, d, 0, d);
    let basis = top.transpose().inverse()?;
    let covol_exp = det_exponent(&basis);
    Ok(DualLattice {
        flatten: u,
        basis,
        covol_exp,
    })
}

/// The dual of a dual: returns the original lattice (as an ambient basis).
pub fn undual(dual: &DualLattice) -> Result<PartialLattice> {
    let d = dual.basis.rows();
    let big_d = dual.flatten.rows();
    let top = dual.basis.transpose().inverse()?;
    let f = top.field();
    let padded = MatK::from_fn(f, big_d, d, |i, j| {
        if i < d {
            top[(i, j)].clone()
        } else {
            RatFun::zero(f)
        }
    });
    let back = &dual.flatten.inverse()? * &padded;
    PartialLattice::new(&back.to_r().ok_or(Error::NotYLocal)?)
}

pub fn factor_lattice(l: &PartialLattice) -> Result<FactorLattice> {
    let s = smith_form(l.basis());
    if !s.invariants.iter().all(|p| p.is_one()) {
        return Err(Error::NotPrimitive);
    }
    let (big_d, d) = (l.ambient_dim(), l.rank());
    let (u, _) = isometric_flatten(&l.basis().to_k(), d)?;
    let complement = s.l_inv.to_k().columns(d..big_d);
    let image = &u * &complement;
    let basis = image.block(d, big_d, 0, big_d - d);
    let covol_exp = det_exponent(&basis);
    Ok(FactorLattice {
        flatten: u,
        basis,
        covol_exp,
    })
}

/// `u B = C` with `C` supported on its first `d` rows; `u` and `u^{-1}` are
/// integral at infinity. Pivot = entry of largest absolute value in the
/// current column.
pub fn isometric_flatten(b: &MatK, d: usize) -> Result<(MatK, MatK)> {
    if b.cols() != d || d > b.rows() {
        return Err(Error::Dimension(format!(
            "flatten {}x{} with d={d}",
            b.rows(),
            b.cols()
        )));
    }
    let f = b.field();
    let n = b.rows();
    let mut c = b.clone();
    let mut u = MatK::identity(f, n);
    for k in 0..d {
        let p = (k..n)
            .filter(|&i| !c[(i, k)].is_zero())
            .max_by(|&i, &j| {
                c[(i, k)]
                    .abs_value_exponent()
                    .cmp(&c[(j, k)].abs_value_exponent())
                    .then(j.cmp(&i))
            })
            .ok_or(Error::RankDeficient)?;
        c.swap_rows(k, p);
        u.swap_rows(k, p);
        let inv = c[(k, k)].inv()?;
        for i in k + 1..n {
            if c[(i, k)].is_zero() {
                continue;
            }
            let factor = -(&c[(i, k)] * &inv);
            c.add_row_multiple(i, k, &factor);
            u.add_row_multiple(i, k, &factor);
        }
    }
    Ok((u, c))
}
