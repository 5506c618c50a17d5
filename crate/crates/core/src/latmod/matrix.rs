use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use crate::error::{Error, Result};
use crate::scalars::{AbsExponent, Fq, Poly, RatFun};

/// Commutative ring operations needed by the dense matrix code.
pub trait Ring: Clone + PartialEq + fmt::Debug {
    fn zero(f: Fq) -> Self;
    fn one(f: Fq) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, c: u8) -> Self;
}

impl Ring for Poly {
    fn zero(f: Fq) -> Self {
        Poly::zero(f)
    }
    fn one(f: Fq) -> Self {
        Poly::one(f)
    }
    fn is_zero(&self) -> bool {
        Poly::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, c: u8) -> Self {
        Poly::scale(self, c)
    }
}

impl Ring for RatFun {
    fn zero(f: Fq) -> Self {
        RatFun::zero(f)
    }
    fn one(f: Fq) -> Self {
        RatFun::one(f)
    }
    fn is_zero(&self) -> bool {
        RatFun::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, c: u8) -> Self {
        RatFun::scale(self, c)
    }
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    field: Fq,
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type MatR = Matrix<Poly>;
pub type MatK = Matrix<RatFun>;

impl<T> Matrix<T> {
    pub fn from_vec(field: Fq, rows: usize, cols: usize, data: Vec<T>) -> Matrix<T> {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        Matrix {
            field,
            rows,
            cols,
            data,
        }
    }
    pub fn field(&self) -> Fq {
        self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }
    pub fn entries(&self) -> &[T] {
        &self.data
    }
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn try_map<U>(&self, f: impl Fn(&T) -> Result<U>) -> Result<Matrix<U>> {
        let data = self.data.iter().map(f).collect::<Result<Vec<U>>>()?;
        Ok(Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }
}

impl<T: Ring> Matrix<T> {
    pub fn zeros(field: Fq, rows: usize, cols: usize) -> Matrix<T> {
        Matrix {
            field,
            rows,
            cols,
            data: vec![T::zero(field); rows * cols],
        }
    }

    pub fn identity(field: Fq, n: usize) -> Matrix<T> {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m[(i, i)] = T::one(field);
        }
        m
    }

    pub fn from_fn(
        field: Fq,
        rows: usize,
        cols: usize,
        f: impl Fn(usize, usize) -> T,
    ) -> Matrix<T> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix {
            field,
            rows,
            cols,
            data,
        }
    }

    pub fn transpose(&self) -> Matrix<T> {
        Matrix::from_fn(self.field, self.cols, self.rows, |i, j| {
            self[(j, i)].clone()
        })
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Matrix<T> {
        Matrix::from_fn(self.field, rows.len(), cols.len(), |i, j| {
            self[(rows[i], cols[j])].clone()
        })
    }

    /// Block `[r0, r1) x [c0, c1)`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Matrix<T> {
        Matrix::from_fn(self.field, r1 - r0, c1 - c0, |i, j| {
            self[(r0 + i, c0 + j)].clone()
        })
    }

    pub fn columns(&self, range: std::ops::Range<usize>) -> Matrix<T> {
        self.block(0, self.rows, range.start, range.end)
    }

    /// Assemble `[[a, b], [c, d]]`.
    pub fn from_blocks(a: &Matrix<T>, b: &Matrix<T>, c: &Matrix<T>, d: &Matrix<T>) -> Matrix<T> {
        let (r0, c0) = (a.rows, a.cols);
        Matrix::from_fn(a.field, a.rows + c.rows, a.cols + b.cols, |i, j| {
            match (i < r0, j < c0) {
                (true, true) => a[(i, j)].clone(),
                (true, false) => b[(i, j - c0)].clone(),
                (false, true) => c[(i - r0, j)].clone(),
                (false, false) => d[(i - r0, j - c0)].clone(),
            }
        })
    }

    pub fn hstack(&self, other: &Matrix<T>) -> Matrix<T> {
        Matrix::from_fn(self.field, self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                other[(i, j - self.cols)].clone()
            }
        })
    }

    pub fn mul_checked(&self, rhs: &Matrix<T>) -> Result<Matrix<T>> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out: Matrix<T> = Matrix::zeros(self.field, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = out[(i, j)].add(&a.mul(b));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &Matrix<T>) -> Matrix<T> {
        Matrix::from_fn(self.field, self.rows, self.cols, |i, j| {
            self[(i, j)].add(&rhs[(i, j)])
        })
    }
    pub fn sub(&self, rhs: &Matrix<T>) -> Matrix<T> {
        Matrix::from_fn(self.field, self.rows, self.cols, |i, j| {
            self[(i, j)].sub(&rhs[(i, j)])
        })
    }
    pub fn neg(&self) -> Matrix<T> {
        self.map(|x| x.neg())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }
    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = &self[(i, j)];
                    if i == j {
                        *x == T::one(self.field)
                    } else {
                        x.is_zero()
                    }
                })
            })
    }

    // elementary column and row operations, used by the normal forms
    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }
    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }
    /// `col[dst] += factor * col[src]`.
    pub fn add_col_multiple(&mut self, dst: usize, src: usize, factor: &T) {
        if factor.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = self[(i, src)].mul(factor);
            if !v.is_zero() {
                self[(i, dst)] = self[(i, dst)].add(&v);
            }
        }
    }
    /// `row[dst] += factor * row[src]`.
    pub fn add_row_multiple(&mut self, dst: usize, src: usize, factor: &T) {
        if factor.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = self[(src, j)].mul(factor);
            if !v.is_zero() {
                self[(dst, j)] = self[(dst, j)].add(&v);
            }
        }
    }
    pub fn scale_col(&mut self, j: usize, c: u8) {
        for i in 0..self.rows {
            self[(i, j)] = self[(i, j)].scale(c);
        }
    }
    pub fn scale_row(&mut self, i: usize, c: u8) {
        for j in 0..self.cols {
            self[(i, j)] = self[(i, j)].scale(c);
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}
impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<'a, T: Ring> Mul<&'a Matrix<T>> for &'a Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.mul_checked(rhs).expect("matrix dimensions")
    }
}

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl MatR {
    pub fn to_k(&self) -> MatK {
        self.map(|p| RatFun::from_poly(p.clone()))
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Poly {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let f = self.field;
        if n == 0 {
            return Poly::one(f);
        }
        let mut m = self.clone();
        let mut sign_neg = false;
        let mut prev = Poly::one(f);
        for k in 0..n - 1 {
            if m[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !m[(i, k)].is_zero()) {
                    Some(i) => {
                        m.swap_rows(i, k);
                        sign_neg = !sign_neg;
                    }
                    None => return Poly::zero(f),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &(&m[(i, j)] * &m[(k, k)]) - &(&m[(i, k)] * &m[(k, j)]);
                    m[(i, j)] = v.div_exact(&prev).expect("Bareiss division is exact");
                }
                m[(i, k)] = Poly::zero(f);
            }
            prev = m[(k, k)].clone();
        }
        let d = m[(n - 1, n - 1)].clone();
        if sign_neg {
            -d
        } else {
            d
        }
    }
}

impl MatK {
    /// Entries as polynomials, if all denominators are 1.
    pub fn to_r(&self) -> Option<MatR> {
        self.try_map(|x| x.as_poly().cloned().ok_or(Error::NotYLocal))
            .ok()
    }

    /// Sup norm exponent `max log_q |x_ij|`.
    pub fn norm_exponent(&self) -> AbsExponent {
        self.data
            .iter()
            .map(|x| x.abs_value_exponent())
            .max()
            .unwrap_or(AbsExponent::NegInfinity)
    }

    /// All entries in the valuation ring O.
    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.is_integral())
    }

    pub fn det(&self) -> RatFun {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let f = self.field;
        let n = self.rows;
        let mut m = self.clone();
        let mut det = RatFun::one(f);
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !m[(i, k)].is_zero()) else {
                return RatFun::zero(f);
            };
            if p != k {
                m.swap_rows(p, k);
                det = -det;
            }
            let pivot = m[(k, k)].clone();
            det = &det * &pivot;
            let inv = pivot.inv().unwrap();
            for i in k + 1..n {
                if m[(i, k)].is_zero() {
                    continue;
                }
                let factor = -(&m[(i, k)] * &inv);
                m.add_row_multiple(i, k, &factor);
            }
        }
        det
    }

    pub fn inverse(&self) -> Result<MatK> {
        if !self.is_square() {
            return Err(Error::Dimension("inverse of non-square matrix".into()));
        }
        let n = self.rows;
        let f = self.field;
        let mut a = self.clone();
        let mut inv = MatK::identity(f, n);
        for k in 0..n {
            let p = (k..n)
                .find(|&i| !a[(i, k)].is_zero())
                .ok_or(Error::RankDeficient)?;
            a.swap_rows(p, k);
            inv.swap_rows(p, k);
            let pinv = a[(k, k)].inv()?;
            for j in 0..n {
                a[(k, j)] = &a[(k, j)] * &pinv;
                inv[(k, j)] = &inv[(k, j)] * &pinv;
            }
            for i in 0..n {
                if i != k && !a[(i, k)].is_zero() {
                    let factor = -a[(i, k)].clone();
                    a.add_row_multiple(i, k, &factor);
                    inv.add_row_multiple(i, k, &factor);
                }
            }
        }
        Ok(inv)
    }

    /// Rank over K.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut r = 0;
        for c in 0..m.cols {
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(p, r);
            let inv = m[(r, c)].inv().unwrap();
            for i in r + 1..m.rows {
                if !m[(i, c)].is_zero() {
                    let factor = -(&m[(i, c)] * &inv);
                    m.add_row_multiple(i, r, &factor);
                }
            }
            r += 1;
        }
        r
    }

    /// `Y^e * self`.
    pub fn scale_y(&self, e: i64) -> MatK {
        let s = RatFun::y_pow(self.field, e);
        self.map(|x| x * &s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::text::parse_poly_matrix;

    #[test]
    fn bareiss_matches_field_determinant() {
        let m = parse_poly_matrix("q=3; [[[0,1],[1],[2]],[[1,1],[0,0,1],[1]],[[2],[1,2],[0,1]]]")
            .unwrap();
        assert_eq!(RatFun::from_poly(m.det()), m.to_k().det());
        let sing = parse_poly_matrix("q=2; [[[0,1],[1]],[[0,1],[1]]]").unwrap();
        assert!(sing.det().is_zero());
    }

    #[test]
    fn inverse_round_trip() {
        let m = parse_poly_matrix("q=2; [[[0,1],[1]],[[1],[]]]")
            .unwrap()
            .to_k();
        let inv = m.inverse().unwrap();
        assert!((&m * &inv).is_identity());
        assert_eq!(m.rank(), 2);
    }
}
