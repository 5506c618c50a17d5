//! Column Hermite form and Smith form over F_q[Y].

use super::matrix::MatR;
use crate::error::{Error, Result};
use crate::scalars::Poly;

/// Column Hermite form `H = B U`.
///
/// Rows are scanned top to bottom. The first row with a nonzero entry among
/// the unprocessed columns becomes the pivot row of the next column: Euclid
/// on that row collects the gcd into the column, the pivot is made monic, and
/// the entries to its left in the pivot row are reduced modulo the pivot.
/// Result: lower echelon, monic pivots, `deg H[p_j, i] < deg H[p_j, j]` for
/// `i < j`. Two bases of the same lattice give the same `H`.
pub fn hermite_form(b: &MatR) -> Result<(MatR, MatR)> {
    let mut h = b.clone();
    let mut u = MatR::identity(b.field(), b.cols());
    hermite_in_place(&mut h, Some(&mut u))?;
    Ok((h, u))
}

/// Hermite form without tracking the transform.
pub fn hermite_basis(b: &MatR) -> Result<MatR> {
    let mut h = b.clone();
    hermite_in_place(&mut h, None)?;
    Ok(h)
}

fn hermite_in_place(h: &mut MatR, mut u: Option<&mut MatR>) -> Result<()> {
    let (rows, cols) = (h.rows(), h.cols());
    let mut c = 0;
    for r in 0..rows {
        if c == cols {
            break;
        }
        loop {
            // column in c.. with the smallest nonzero degree in row r
            let best = (c..cols)
                .filter(|&j| !h[(r, j)].is_zero())
                .min_by_key(|&j| h[(r, j)].degree().unwrap());
            let Some(best) = best else { break };
            h.swap_cols(c, best);
            if let Some(u) = u.as_deref_mut() {
                u.swap_cols(c, best);
            }
            let mut done = true;
            for j in c + 1..cols {
                if h[(r, j)].is_zero() {
                    continue;
                }
                let (quo, rem) = h[(r, j)].divrem(&h[(r, c)])?;
                let neg = -quo;
                h.add_col_multiple(j, c, &neg);
                if let Some(u) = u.as_deref_mut() {
                    u.add_col_multiple(j, c, &neg);
                }
                if !rem.is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[(r, c)].is_zero() {
            continue;
        }
        let lc_inv = h.field().inv(h[(r, c)].lc());
        h.scale_col(c, lc_inv);
        if let Some(u) = u.as_deref_mut() {
            u.scale_col(c, lc_inv);
        }
        for j in 0..c {
            if h[(r, j)].is_zero() {
                continue;
            }
            let (quo, _) = h[(r, j)].divrem(&h[(r, c)])?;
            if quo.is_zero() {
                continue;
            }
            let neg = -quo;
            h.add_col_multiple(j, c, &neg);
            if let Some(u) = u.as_deref_mut() {
                u.add_col_multiple(j, c, &neg);
            }
        }
        c += 1;
    }
    if c < cols {
        return Err(Error::RankDeficient);
    }
    Ok(())
}

/// Row indices of the pivots of a column Hermite form.
pub fn hermite_pivots(h: &MatR) -> Vec<usize> {
    let mut out = Vec::with_capacity(h.cols());
    let mut r = 0;
    for j in 0..h.cols() {
        while r < h.rows() && h[(r, j)].is_zero() {
            r += 1;
        }
        out.push(r);
        r += 1;
    }
    out
}

/// `l * b * r = diag(invariants)` padded with zeros; the inverses are kept
/// alongside so callers never have to invert a polynomial matrix.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub invariants: Vec<Poly>,
    pub l: MatR,
    pub l_inv: MatR,
    pub r: MatR,
    pub r_inv: MatR,
}

pub fn smith_form(b: &MatR) -> SmithForm {
    let f = b.field();
    let (m, n) = (b.rows(), b.cols());
    let mut a = b.clone();
    let mut l = MatR::identity(f, m);
    let mut l_inv = MatR::identity(f, m);
    let mut r = MatR::identity(f, n);
    let mut r_inv = MatR::identity(f, n);
    let mut invariants = Vec::new();

    // a row operation row_i += c row_j is mirrored on l and, inverted, on l_inv
    macro_rules! row_add {
        ($i:expr, $j:expr, $c:expr) => {{
            let c: &Poly = $c;
            a.add_row_multiple($i, $j, c);
            l.add_row_multiple($i, $j, c);
            l_inv.add_col_multiple($j, $i, &-c);
        }};
    }
    macro_rules! col_add {
        ($i:expr, $j:expr, $c:expr) => {{
            let c: &Poly = $c;
            a.add_col_multiple($i, $j, c);
            r.add_col_multiple($i, $j, c);
            r_inv.add_row_multiple($j, $i, &-c);
        }};
    }

    for t in 0..m.min(n) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if !a[(i, j)].is_zero()
                        && best.is_none_or(|(bi, bj)| a[(i, j)].degree() < a[(bi, bj)].degree())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return SmithForm {
                    invariants,
                    l,
                    l_inv,
                    r,
                    r_inv,
                };
            };
            a.swap_rows(t, pi);
            l.swap_rows(t, pi);
            l_inv.swap_cols(t, pi);
            a.swap_cols(t, pj);
            r.swap_cols(t, pj);
            r_inv.swap_rows(t, pj);

            let mut clean = true;
            for i in t + 1..m {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let (quo, rem) = a[(i, t)].divrem(&a[(t, t)]).unwrap();
                row_add!(i, t, &-quo);
                clean &= rem.is_zero();
            }
            for j in t + 1..n {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let (quo, rem) = a[(t, j)].divrem(&a[(t, t)]).unwrap();
                col_add!(j, t, &-quo);
                clean &= rem.is_zero();
            }
            if !clean {
                continue;
            }
            // divisibility: fold an offending row into the pivot row and retry
            let offending =
                (t + 1..m).find(|&i| (t + 1..n).any(|j| !a[(t, t)].divides(&a[(i, j)])));
            match offending {
                Some(i) => row_add!(t, i, &Poly::one(f)),
                None => break,
            }
        }
        let c = f.inv(a[(t, t)].lc());
        let c_inv = a[(t, t)].lc();
        a.scale_row(t, c);
        l.scale_row(t, c);
        l_inv.scale_col(t, c_inv);
        invariants.push(a[(t, t)].clone());
    }
    SmithForm {
        invariants,
        l,
        l_inv,
        r,
        r_inv,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::text::parse_poly_matrix;

    #[test]
    fn hermite_examples() {
        let b = parse_poly_matrix("q=2; [[[0,1]],[[1]]]").unwrap();
        assert_eq!(hermite_form(&b).unwrap().0, b);
        let b = parse_poly_matrix("q=2; [[[0,0,1]],[[0,1]]]").unwrap();
        assert_eq!(hermite_form(&b).unwrap().0, b);
        let b = parse_poly_matrix("q=3; [[[1],[0,1]],[[0],[1]]]").unwrap();
        let (h, u) = hermite_form(&b).unwrap();
        assert!(h.is_identity());
        assert_eq!(&b * &u, h);
        assert!(u.det().is_unit());
    }

    #[test]
    fn hermite_rejects_rank_deficient() {
        let b = parse_poly_matrix("q=2; [[[0,1],[0,1]],[[1],[1]]]").unwrap();
        assert_eq!(hermite_form(&b), Err(Error::RankDeficient));
    }

    #[test]
    fn smith_examples() {
        let cases = [
            (
                "q=2; [[[0,1],[]],[[],[0,0,1]]]",
                vec![vec![0, 1], vec![0, 0, 1]],
            ),
            ("q=3; [[[0,1],[1]],[[1],[]]]", vec![vec![1], vec![1]]),
            ("q=2; [[[0,1]],[[1,1]]]", vec![vec![1]]),
        ];
        for (src, want) in cases {
            let b = parse_poly_matrix(src).unwrap();
            let s = smith_form(&b);
            let got: Vec<Vec<u8>> = s.invariants.iter().map(|p| p.coeffs().to_vec()).collect();
            assert_eq!(got, want, "{src}");
            let prod = &(&s.l * &b) * &s.r;
            for i in 0..prod.rows() {
                for j in 0..prod.cols() {
                    let want = if i == j {
                        s.invariants[i].clone()
                    } else {
                        Poly::zero(b.field())
                    };
                    assert_eq!(prod[(i, j)], want);
                }
            }
            assert!((&s.l * &s.l_inv).is_identity());
            assert!((&s.r * &s.r_inv).is_identity());
        }
    }
}
