//! Shapes of unimodular lattices as splitting types, stabilizer orders, and
//! shape masses.

use std::fmt;

use num::{BigInt, One, ToPrimitive};

use crate::error::{Error, Result};
use crate::latmod::{MatR, PartialLattice};
use crate::measures::gl_order;
use crate::scalars::{int, q_pow, Fq, Poly, Rational};

/// Nonincreasing integer vector summing to zero.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ShapeClass(Vec<i64>);

impl ShapeClass {
    pub fn new(parts: Vec<i64>) -> Result<ShapeClass> {
        if parts.is_empty()
            || parts.iter().sum::<i64>() != 0
            || parts.windows(2).any(|w| w[0] < w[1])
        {
            return Err(Error::Invalid(format!("not a shape class: {parts:?}")));
        }
        Ok(ShapeClass(parts))
    }

    /// Sorts first.
    pub fn from_unsorted(mut parts: Vec<i64>) -> Result<ShapeClass> {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        ShapeClass::new(parts)
    }

    pub fn trivial(k: usize) -> ShapeClass {
        ShapeClass(vec![0; k])
    }
    pub fn rank(&self) -> usize {
        self.0.len()
    }
    pub fn parts(&self) -> &[i64] {
        &self.0
    }
}

impl fmt::Display for ShapeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        write!(f, "[{}]", s.join(","))
    }
}

impl std::str::FromStr for ShapeClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<ShapeClass> {
        let body = s.trim().strip_prefix('[').and_then(|x| x.strip_suffix(']'));
        let body = body.ok_or_else(|| Error::Parse(format!("shape class {s}")))?;
        let parts = body
            .split(',')
            .filter(|x| !x.trim().is_empty())
            .map(|x| {
                x.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::Parse(format!("shape class {s}")))
            })
            .collect::<Result<Vec<_>>>()?;
        ShapeClass::new(parts)
    }
}

impl fmt::Debug for ShapeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn col_degree(a: &MatR, j: usize) -> Option<usize> {
    (0..a.rows()).filter_map(|i| a[(i, j)].degree()).max()
}

/// Row of the first entry attaining the column degree.
fn col_pivot(a: &MatR, j: usize, deg: usize) -> usize {
    (0..a.rows())
        .find(|&i| a[(i, j)].degree() == Some(deg))
        .unwrap()
}

/// Weak Popov form: column operations until the pivots (first row attaining
/// the column degree) are pairwise distinct. The leading coefficient matrix
/// then has full column rank.
pub fn column_reduce(a: &MatR) -> Result<MatR> {
    let f = a.field();
    let mut m = a.clone();
    loop {
        let mut info = Vec::with_capacity(m.cols());
        for j in 0..m.cols() {
            let deg = col_degree(&m, j).ok_or(Error::RankDeficient)?;
            info.push((col_pivot(&m, j, deg), deg));
        }
        let clash = (0..m.cols())
            .flat_map(|j| (j + 1..m.cols()).map(move |k| (j, k)))
            .find(|&(j, k)| info[j].0 == info[k].0);
        let Some((j, k)) = clash else { return Ok(m) };
        // reduce the column of larger degree by the other
        let (hi, lo) = if info[j].1 >= info[k].1 {
            (j, k)
        } else {
            (k, j)
        };
        let r = info[hi].0;
        let shift = info[hi].1 - info[lo].1;
        let c = f.mul(m[(r, hi)].lc(), f.inv(m[(r, lo)].lc()));
        let factor = Poly::monomial(f, f.neg(c), shift);
        m.add_col_multiple(hi, lo, &factor);
    }
}

/// Column degrees of a column-reduced basis, sorted nonincreasing.
pub fn reduced_degrees(a: &MatR) -> Result<Vec<i64>> {
    let m = column_reduce(a)?;
    let mut degs: Vec<i64> = (0..m.cols())
        .map(|j| col_degree(&m, j).unwrap() as i64)
        .collect();
    degs.sort_unstable_by(|a, b| b.cmp(a));
    Ok(degs)
}

/// Shape of the full lattice `Y^{-m} A R^k`, which must have covolume 1.
pub fn shape_of_full(m: i64, a: &MatR) -> Result<ShapeClass> {
    if !a.is_square() {
        return Err(Error::Dimension("shape of a non-square matrix".into()));
    }
    let det = a.det();
    match det.degree() {
        Some(deg) if deg as i64 == a.rows() as i64 * m => {}
        _ => return Err(Error::NotUnimodular),
    }
    let degs = reduced_degrees(a)?;
    ShapeClass::new(degs.into_iter().map(|x| x - m).collect())
}

/// Shape of a primitive partial lattice whose covolume exponent is a multiple
/// of its rank: reduced column degrees of the ambient basis, shifted.
pub fn shape_of_partial(l: &PartialLattice) -> Result<ShapeClass> {
    let d = l.rank() as i64;
    let e = l.covol_exp();
    if e.rem_euclid(d) != 0 {
        return Err(Error::ShapeUndefined);
    }
    let degs = reduced_degrees(l.basis())?;
    debug_assert_eq!(degs.iter().sum::<i64>(), e);
    ShapeClass::new(degs.into_iter().map(|x| x - e / d).collect())
}

/// Type of the inverse double coset.
pub fn invert_class(c: &ShapeClass) -> ShapeClass {
    ShapeClass(c.0.iter().rev().map(|a| -a).collect())
}

/// Order of the stabilizer in `GL_k(F_q[Y])` of the vertex of type `c`:
/// `prod_t |GL_{m_t}(F_q)| * q^{sum_{a_i > a_j} (a_i - a_j + 1)}`.
pub fn stabilizer_order(c: &ShapeClass, q: u32) -> BigInt {
    let a = c.parts();
    let mut out = BigInt::one();
    let mut i = 0;
    while i < a.len() {
        let run = a[i..].iter().take_while(|&&x| x == a[i]).count();
        out *= gl_order(run as u32, q);
        i += run;
    }
    let mut e = 0u32;
    for i in 0..a.len() {
        for j in 0..a.len() {
            if a[i] > a[j] {
                e += (a[i] - a[j] + 1) as u32;
            }
        }
    }
    out * BigInt::from(q).pow(e)
}

/// Rank of a set of F_q-vectors and whether `target` is in their span.
fn span_info(f: Fq, vecs: &[Vec<u8>], target: &[u8]) -> (usize, bool) {
    let len = target.len();
    let mut rows: Vec<Vec<u8>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    let reduce = |v: &mut Vec<u8>, rows: &[Vec<u8>], pivots: &[usize]| {
        for (r, &p) in rows.iter().zip(pivots) {
            let c = v[p];
            if c != 0 {
                for t in 0..len {
                    v[t] = f.sub(v[t], f.mul(c, r[t]));
                }
            }
        }
    };
    for v in vecs {
        let mut v = v.clone();
        reduce(&mut v, &rows, &pivots);
        if let Some(p) = v.iter().position(|&x| x != 0) {
            let inv = f.inv(v[p]);
            for x in v.iter_mut() {
                *x = f.mul(*x, inv);
            }
            // keep earlier rows reduced at the new pivot
            for r in rows.iter_mut() {
                let c = r[p];
                if c != 0 {
                    for t in 0..len {
                        r[t] = f.sub(r[t], f.mul(c, v[t]));
                    }
                }
            }
            rows.push(v);
            pivots.push(p);
        }
    }
    let mut t = target.to_vec();
    reduce(&mut t, &rows, &pivots);
    (rows.len(), t.iter().all(|&x| x == 0))
}

/// Brute-force stabilizer order: count `gamma` in `GL_k(F_q[Y])` with
/// `deg gamma_ij <= a_j - a_i`. All rows but one are enumerated; the
/// remaining row enters the determinant linearly and is counted by rank.
pub fn stabilizer_order_bruteforce(c: &ShapeClass, q: u32) -> Result<u128> {
    let f = Fq::new(q)?;
    let a = c.parts();
    let k = a.len();
    let bound =
        |i: usize, j: usize| -> Option<usize> { (a[j] >= a[i]).then(|| (a[j] - a[i]) as usize) };
    let free = |i: usize| -> usize { (0..k).filter_map(|j| bound(i, j).map(|b| b + 1)).sum() };
    let lin = (0..k).max_by_key(|&i| (free(i), i)).unwrap();
    let others: Vec<usize> = (0..k).filter(|&i| i != lin).collect();

    // all admissible rows for each enumerated row index
    let rows_of = |i: usize| -> Vec<Vec<Poly>> {
        let mut out = vec![Vec::new()];
        for j in 0..k {
            let choices: Vec<Poly> = match bound(i, j) {
                Some(b) => Poly::all_up_to(f, b).collect(),
                None => vec![Poly::zero(f)],
            };
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<Poly>| {
                    choices.iter().map(move |p| {
                        let mut v = prefix.clone();
                        v.push(p.clone());
                        v
                    })
                })
                .collect();
        }
        out
    };
    let candidates: Vec<Vec<Vec<Poly>>> = others.iter().map(|&i| rows_of(i)).collect();

    let lin_basis: Vec<(usize, usize)> = (0..k)
        .filter_map(|j| bound(lin, j).map(|b| (j, b)))
        .flat_map(|(j, b)| (0..=b).map(move |t| (j, t)))
        .collect();
    let dim = lin_basis.len();
    let qq = q as u128;
    let mut total: u128 = 0;
    let mut idx = vec![0usize; others.len()];
    loop {
        // cofactors along the linear row
        let mut cof = Vec::with_capacity(k);
        for j in 0..k {
            let cols: Vec<usize> = (0..k).filter(|&x| x != j).collect();
            let m = MatR::from_fn(f, k - 1, k - 1, |r, s| {
                candidates[r][idx[r]][cols[s]].clone()
            });
            let det = m.det();
            cof.push(if (lin + j) % 2 == 1 { -det } else { det });
        }
        let images: Vec<Poly> = lin_basis.iter().map(|&(j, t)| cof[j].shift(t)).collect();
        let len = images
            .iter()
            .filter_map(|p| p.degree())
            .max()
            .map_or(1, |d| d + 1);
        let vecs: Vec<Vec<u8>> = images
            .iter()
            .map(|p| (0..len).map(|i| p.coeff(i)).collect())
            .collect();
        let mut target = vec![0u8; len];
        target[0] = 1;
        let (rank, hits) = span_info(f, &vecs, &target);
        if hits {
            total += (qq - 1) * qq.pow((dim - rank) as u32);
        }
        // next combination
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return Ok(total);
            }
            idx[pos] += 1;
            if idx[pos] < candidates[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Splitting types of rank `k` with `a_1 <= bound`.
pub fn shape_classes(k: usize, bound: i64) -> Vec<ShapeClass> {
    fn rec(k: usize, max: i64, remaining_sum: i64, cur: &mut Vec<i64>, out: &mut Vec<ShapeClass>) {
        if cur.len() == k - 1 {
            let last = remaining_sum;
            if last <= max {
                cur.push(last);
                out.push(ShapeClass(cur.clone()));
                cur.pop();
            }
            return;
        }
        let left = (k - cur.len()) as i64;
        // the remaining `left` parts are <= x and sum to remaining_sum
        let lo = remaining_sum.div_euclid(left) + i64::from(remaining_sum.rem_euclid(left) != 0);
        let mut x = max;
        while x >= lo {
            cur.push(x);
            rec(k, x, remaining_sum - x, cur, out);
            cur.pop();
            x -= 1;
        }
    }
    let mut out = Vec::new();
    if k == 0 {
        return out;
    }
    rec(k, bound, 0, &mut Vec::new(), &mut out);
    out.retain(|c| c.0[0] >= 0);
    out.sort();
    out
}

/// `sum_{a_1 <= bound} 1 / stabilizer_order`.
pub fn shape_mass_partial_sum(k: usize, q: u32, bound: i64) -> Rational {
    shape_classes(k, bound)
        .iter()
        .fold(Rational::from_integer(0.into()), |acc, c| {
            acc + Rational::new(BigInt::one(), stabilizer_order(c, q))
        })
}

/// Upper bound for the mass of the classes with `a_1 > bound`.
///
/// For `k = 2` the tail is `q^{-(2A+3)} / ((q-1)^2 (1 - q^{-2}))` exactly.
/// In general a class with `a_1 = a` has weight at most `q^{-ka}` and there
/// are at most `(ka+1)^{k-1}` of them; the tail is bounded by a ratio test.
pub fn shape_mass_tail_bound(k: usize, q: u32, bound: i64) -> Rational {
    let qm1 = int(q as i64 - 1);
    match k {
        0 | 1 => Rational::from_integer(0.into()),
        2 => q_pow(q, -(2 * bound + 3)) / (&qm1 * &qm1 * (Rational::one() - q_pow(q, -2))),
        _ => {
            let kk = k as i64;
            let t = |a: i64| -> Rational {
                Rational::from_integer(BigInt::from(kk * a + 1).pow((k - 1) as u32))
                    * q_pow(q, -kk * a)
            };
            let a0 = bound + 1;
            let base = Rational::new(BigInt::from(kk * a0 + kk + 1), BigInt::from(kk * a0 + 1));
            let rho = num::pow(base, k - 1) * q_pow(q, -kk);
            if rho >= Rational::one() {
                // ratio test fails this early; sum explicitly until it holds
                let mut acc = Rational::from_integer(0.into());
                let mut a = a0;
                loop {
                    let base =
                        Rational::new(BigInt::from(kk * a + kk + 1), BigInt::from(kk * a + 1));
                    let rho = num::pow(base, k - 1) * q_pow(q, -kk);
                    if rho < Rational::one() {
                        return acc + t(a) / (Rational::one() - rho);
                    }
                    acc += t(a);
                    a += 1;
                }
            }
            t(a0) / (Rational::one() - rho)
        }
    }
}

/// Total shape mass `sum_c 1/|stab(c)|` in closed form, for `k <= 2`.
pub fn shape_mass_total(k: usize, q: u32) -> Option<Rational> {
    let qm1 = int(q as i64 - 1);
    match k {
        1 => Some(qm1.recip()),
        2 => {
            let gl2 = Rational::from_integer(gl_order(2, q));
            Some(gl2.recip() + q_pow(q, -3) / (&qm1 * &qm1 * (Rational::one() - q_pow(q, -2))))
        }
        _ => None,
    }
}

/// Mass of one class divided by the total mass of its rank.
pub fn normalized_shape_mass(c: &ShapeClass, q: u32) -> Option<Rational> {
    let total = shape_mass_total(c.rank(), q)?;
    Some(Rational::new(BigInt::one(), stabilizer_order(c, q)) / total)
}

/// Convenience: `stabilizer_order` as `u128` where it fits.
pub fn stabilizer_order_u128(c: &ShapeClass, q: u32) -> Option<u128> {
    stabilizer_order(c, q).to_u128()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::latmod::orthogonal_lattice;
    use crate::scalars::rat;
    use crate::scalars::text::parse_poly_matrix;

    fn sc(v: &[i64]) -> ShapeClass {
        ShapeClass::new(v.to_vec()).unwrap()
    }

    #[test]
    fn full_shape_examples() {
        let f = Fq::new(2).unwrap();
        assert_eq!(
            shape_of_full(0, &MatR::identity(f, 3)).unwrap(),
            sc(&[0, 0, 0])
        );
        let a = parse_poly_matrix("q=2; [[[0,0,1],[]],[[],[1]]]").unwrap();
        assert_eq!(shape_of_full(1, &a).unwrap(), sc(&[1, -1]));
        let a = parse_poly_matrix("q=3; [[[1],[0,1]],[[],[1]]]").unwrap();
        assert_eq!(shape_of_full(0, &a).unwrap(), sc(&[0, 0]));
        assert_eq!(shape_of_full(1, &a), Err(Error::NotUnimodular));
        // columns (Y^2, Y) and (Y^3, 1) share a pivot row
        let a = parse_poly_matrix("q=3; [[[0,0,1],[0,0,0,1]],[[0,1],[1]]]").unwrap();
        assert_eq!(shape_of_full(2, &a).unwrap(), sc(&[0, 0]));
    }

    #[test]
    fn partial_shapes() {
        let l = PartialLattice::new(&parse_poly_matrix("q=2; [[[0,0,1]],[[0,1]],[[1]]]").unwrap())
            .unwrap();
        assert_eq!(shape_of_partial(&l).unwrap(), sc(&[0]));
        let perp = orthogonal_lattice(&l).unwrap();
        assert_eq!(perp.covol_exp(), 2);
        let s = shape_of_partial(&perp).unwrap();
        assert_eq!(s.rank(), 2);
        let l =
            PartialLattice::new(&parse_poly_matrix("q=2; [[[0,1]],[[1]],[[1]]]").unwrap()).unwrap();
        let perp = orthogonal_lattice(&l).unwrap();
        assert_eq!(shape_of_partial(&perp), Err(Error::ShapeUndefined));
    }

    #[test]
    fn stabilizer_examples() {
        assert_eq!(stabilizer_order(&sc(&[0, 0]), 2), BigInt::from(6));
        assert_eq!(stabilizer_order(&sc(&[1, -1]), 2), BigInt::from(8));
        assert_eq!(stabilizer_order(&sc(&[1, -1]), 3), BigInt::from(108));
        assert_eq!(stabilizer_order_bruteforce(&sc(&[1, -1]), 2).unwrap(), 8);
        assert_eq!(stabilizer_order_bruteforce(&sc(&[1, -1]), 3).unwrap(), 108);
        assert_eq!(stabilizer_order_bruteforce(&sc(&[0, 0]), 2).unwrap(), 6);
        assert_eq!(
            stabilizer_order_bruteforce(&sc(&[0, 0, 0]), 2).unwrap(),
            168
        );
        assert_eq!(
            stabilizer_order_bruteforce(&sc(&[1, 0, -1]), 2).unwrap(),
            2u128.pow(7)
        );
    }

    #[test]
    fn class_listing() {
        assert_eq!(shape_classes(1, 5), vec![sc(&[0])]);
        assert_eq!(
            shape_classes(2, 2),
            vec![sc(&[0, 0]), sc(&[1, -1]), sc(&[2, -2])]
        );
        let k3 = shape_classes(3, 1);
        assert_eq!(k3, vec![sc(&[0, 0, 0]), sc(&[1, 0, -1]), sc(&[1, 1, -2])]);
    }

    #[test]
    fn mass_sums() {
        assert_eq!(shape_mass_partial_sum(1, 3, 4), rat(1, 2));
        assert_eq!(shape_mass_partial_sum(2, 2, 1), rat(7, 24));
        assert_eq!(shape_mass_total(2, 2).unwrap(), rat(1, 3));
        assert_eq!(shape_mass_total(2, 3).unwrap(), rat(1, 32));
        for a in 0..6 {
            let s = shape_mass_partial_sum(2, 2, a);
            assert_eq!(s + shape_mass_tail_bound(2, 2, a), rat(1, 3));
        }
        assert_eq!(normalized_shape_mass(&sc(&[0, 0]), 2).unwrap(), rat(1, 2));
        assert_eq!(normalized_shape_mass(&sc(&[1, -1]), 2).unwrap(), rat(3, 8));
        assert_eq!(normalized_shape_mass(&sc(&[2, -2]), 2).unwrap(), rat(3, 32));
    }

    #[test]
    fn tail_bound_k3() {
        let s4 = shape_mass_partial_sum(3, 2, 4);
        let s8 = shape_mass_partial_sum(3, 2, 8);
        assert!(&s8 - &s4 <= shape_mass_tail_bound(3, 2, 4));
    }

    #[test]
    fn inversion() {
        assert_eq!(invert_class(&sc(&[2, -1, -1])), sc(&[1, 1, -2]));
        let c = sc(&[3, 0, -1, -2]);
        assert_eq!(invert_class(&invert_class(&c)), c);
        assert_eq!(invert_class(&sc(&[0, 0])), sc(&[0, 0]));
    }
}
