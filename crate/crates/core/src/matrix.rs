//! Exact dense linear algebra over the integers and rationals.
//!
//! Everything here is small and dense (lattice ranks up to the field degree),
//! so plain rational Gaussian elimination and textbook column-style Hermite
//! reduction are the right tools.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};
use num::Integer;

/// Row-major integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<BigInt>,
}

impl IMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IMat { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IMat::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_columns(rows: usize, columns: &[Vec<BigInt>]) -> Self {
        let mut m = IMat::zero(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for i in 0..rows {
                m[(i, j)] = col[i].clone();
            }
        }
        m
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    /// Product of the diagonal entries (determinant of a triangular matrix).
    pub fn diagonal_product(&self) -> BigInt {
        assert_eq!(self.rows, self.cols);
        let mut p = BigInt::one();
        for i in 0..self.rows {
            p *= &self[(i, i)];
        }
        p
    }

    /// Greatest common divisor of all entries (zero for the zero matrix).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for x in &self.data {
            g = g.gcd(x);
        }
        g
    }

    pub fn mul(&self, other: &IMat) -> IMat {
        assert_eq!(self.cols, other.rows);
        let mut out = IMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self[(i, k)].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = &self[(i, k)] * &other[(k, j)];
                    out[(i, j)] += t;
                }
            }
        }
        out
    }

    pub fn to_rational(&self) -> QMat {
        QMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| BigRational::from_integer(x.clone())).collect(),
        }
    }
}

impl std::ops::Index<(usize, usize)> for IMat {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

/// Column-style Hermite normal form.
///
/// Columns of the input generate a lattice in Z^n. The result is the unique
/// upper-triangular n x n basis with positive diagonal and each entry right of
/// the diagonal reduced modulo the diagonal entry of its row. Returns `None`
/// when the columns do not span a full-rank lattice.
pub fn hnf_upper(mat: &IMat) -> Option<IMat> {
    hnf_upper_with_transform(mat).map(|(h, _)| h)
}

/// As [`hnf_upper`], also returning the column transform `U` with
/// `mat * U = [H | 0]` (U is `cols x cols`, unimodular).
pub fn hnf_upper_with_transform(mat: &IMat) -> Option<(IMat, IMat)> {
    let n = mat.rows;
    let m = mat.cols;
    if m < n {
        return None;
    }
    let mut cols: Vec<Vec<BigInt>> = (0..m).map(|j| mat.column(j)).collect();
    let mut trans: Vec<Vec<BigInt>> = (0..m)
        .map(|j| {
            let mut e = vec![BigInt::zero(); m];
            e[j] = BigInt::one();
            e
        })
        .collect();
    let mut active: Vec<usize> = (0..m).collect();
    let mut pivots: Vec<usize> = Vec::with_capacity(n);

    for row in (0..n).rev() {
        // clear row `row` across the active columns down to a single pivot
        loop {
            let mut nz: Vec<usize> = active
                .iter()
                .copied()
                .filter(|&j| !cols[j][row].is_zero())
                .collect();
            if nz.is_empty() {
                return None; // rank deficient
            }
            if nz.len() == 1 {
                let p = nz[0];
                if cols[p][row].is_negative() {
                    for x in cols[p].iter_mut() {
                        *x = -std::mem::take(x);
                    }
                    for x in trans[p].iter_mut() {
                        *x = -std::mem::take(x);
                    }
                }
                pivots.push(p);
                active.retain(|&j| j != p);
                break;
            }
            nz.sort_by(|&a, &b| cols[a][row].abs().cmp(&cols[b][row].abs()));
            let (small, big) = (nz[0], nz[1]);
            let q = div_round(&cols[big][row], &cols[small][row]);
            for i in 0..n {
                let t = &q * &cols[small][i];
                cols[big][i] -= t;
            }
            for i in 0..m {
                let t = &q * &trans[small][i];
                trans[big][i] -= t;
            }
        }
    }
    pivots.reverse(); // pivots[i] now has its lowest non-zero entry in row i

    // canonical reduction of entries right of the diagonal
    for i in (0..n).rev() {
        let pi = pivots[i];
        for k in (i + 1)..n {
            let pk = pivots[k];
            let q = cols[pk][i].div_floor(&cols[pi][i]);
            if q.is_zero() {
                continue;
            }
            for r in 0..n {
                let t = &q * &cols[pi][r];
                cols[pk][r] -= t;
            }
            for r in 0..m {
                let t = &q * &trans[pi][r];
                trans[pk][r] -= t;
            }
        }
    }

    let mut h = IMat::zero(n, n);
    for (i, &p) in pivots.iter().enumerate() {
        for r in 0..n {
            h[(r, i)] = cols[p][r].clone();
        }
    }
    // transform columns: pivots first, then the (now zero) remainder
    let mut u = IMat::zero(m, m);
    let mut order: Vec<usize> = pivots.clone();
    order.extend(active.iter().copied());
    for (jj, &p) in order.iter().enumerate() {
        for r in 0..m {
            u[(r, jj)] = trans[p][r].clone();
        }
    }
    Some((h, u))
}

/// Rounded division q = round(a / b), used to keep Euclid steps small.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let two = BigInt::from(2u32);
    let (mut q, r) = a.div_rem(b);
    if &r * &two >= b.abs() {
        q += if b.is_negative() { -1 } else { 1 };
    } else if -(&r) * &two > b.abs() {
        q -= if b.is_negative() { -1 } else { 1 };
    }
    q
}

/// Solves `mat * x = t` over the integers, if an integer solution exists.
pub fn solve_integral(mat: &IMat, target: &[BigInt]) -> Option<Vec<BigInt>> {
    let n = mat.rows;
    let m = mat.cols;
    assert_eq!(target.len(), n);
    let (h, u) = hnf_upper_with_transform(mat)?;
    // back-substitute on the upper-triangular block
    let mut y = vec![BigInt::zero(); m];
    let mut rhs: Vec<BigInt> = target.to_vec();
    for i in (0..n).rev() {
        let (q, r) = rhs[i].div_rem(&h[(i, i)]);
        if !r.is_zero() {
            return None;
        }
        y[i] = q;
        for r2 in 0..=i {
            let t = &y[i] * &h[(r2, i)];
            rhs[r2] -= t;
        }
    }
    if rhs.iter().any(|x| !x.is_zero()) {
        return None;
    }
    // x = U * [y; 0]
    let mut x = vec![BigInt::zero(); m];
    for r in 0..m {
        for j in 0..n {
            let t = &u[(r, j)] * &y[j];
            x[r] += t;
        }
    }
    Some(x)
}

/// Row-major rational matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<BigRational>,
}

impl QMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        QMat { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMat::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigRational::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<BigRational>]) -> Self {
        let r = rows.len();
        let c = if r > 0 { rows[0].len() } else { 0 };
        let mut m = QMat::zero(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c);
            for j in 0..c {
                m[(i, j)] = row[j].clone();
            }
        }
        m
    }

    pub fn column(&self, j: usize) -> Vec<BigRational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> QMat {
        let mut out = QMat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn mul(&self, other: &QMat) -> QMat {
        assert_eq!(self.cols, other.rows);
        let mut out = QMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self[(i, k)].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = &self[(i, k)] * &other[(k, j)];
                    out[(i, j)] += t;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut s = BigRational::zero();
                for j in 0..self.cols {
                    s += &self[(i, j)] * &v[j];
                }
                s
            })
            .collect()
    }

    pub fn trace(&self) -> BigRational {
        assert_eq!(self.rows, self.cols);
        let mut s = BigRational::zero();
        for i in 0..self.rows {
            s += &self[(i, i)];
        }
        s
    }

    /// Determinant by rational Gaussian elimination with pivoting.
    pub fn det(&self) -> BigRational {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut det = BigRational::one();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[(r, col)].is_zero());
            let Some(p) = pivot else { return BigRational::zero() };
            if p != col {
                for j in 0..n {
                    let tmp = a[(p, j)].clone();
                    a[(p, j)] = a[(col, j)].clone();
                    a[(col, j)] = tmp;
                }
                det = -det;
            }
            det *= &a[(col, col)];
            let inv = a[(col, col)].recip();
            for r in (col + 1)..n {
                if a[(r, col)].is_zero() {
                    continue;
                }
                let f = &a[(r, col)] * &inv;
                for j in col..n {
                    let t = &f * &a[(col, j)];
                    a[(r, j)] -= t;
                }
            }
        }
        det
    }

    /// Inverse by Gauss-Jordan; `None` for singular input.
    pub fn inverse(&self) -> Option<QMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = QMat::identity(n);
        for col in 0..n {
            let p = (col..n).find(|&r| !a[(r, col)].is_zero())?;
            if p != col {
                for j in 0..n {
                    a.data.swap(p * n + j, col * n + j);
                    inv.data.swap(p * n + j, col * n + j);
                }
            }
            let piv = a[(col, col)].recip();
            for j in 0..n {
                a[(col, j)] *= &piv;
                inv[(col, j)] *= &piv;
            }
            for r in 0..n {
                if r == col || a[(r, col)].is_zero() {
                    continue;
                }
                let f = a[(r, col)].clone();
                for j in 0..n {
                    let t = &f * &a[(col, j)];
                    a[(r, j)] -= t;
                    let t = &f * &inv[(col, j)];
                    inv[(r, j)] -= t;
                }
            }
        }
        Some(inv)
    }

    /// Solves `self * x = b`; `None` for singular systems.
    pub fn solve(&self, b: &[BigRational]) -> Option<Vec<BigRational>> {
        Some(self.inverse()?.mul_vec(b))
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.data.iter().map(crate::numutil::rat_to_f64).collect()
    }
}

impl std::ops::Index<(usize, usize)> for QMat {
    type Output = BigRational;
    fn index(&self, (i, j): (usize, usize)) -> &BigRational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigRational {
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numutil::rat_from_i64;

    fn imat(rows: usize, cols: usize, v: &[i64]) -> IMat {
        IMat {
            rows,
            cols,
            data: v.iter().map(|&x| BigInt::from(x)).collect(),
        }
    }

    #[test]
    fn hnf_of_identity_like() {
        let m = imat(2, 3, &[2, 1, 0, 0, 0, 3]);
        let h = hnf_upper(&m).unwrap();
        // lattice contains (1,0)? gcd(2,1)=1 in row 0 after clearing row 1
        assert_eq!(h[(1, 1)], BigInt::from(3));
        assert!(h[(0, 0)].is_positive());
        let d = h.diagonal_product();
        assert_eq!(d, BigInt::from(3)); // index of the lattice in Z^2
    }

    #[test]
    fn hnf_canonical_under_column_shuffle() {
        let a = imat(2, 2, &[4, 1, 0, 2]);
        let b = imat(2, 2, &[1, 4, 2, 0]);
        assert_eq!(hnf_upper(&a).unwrap(), hnf_upper(&b).unwrap());
    }

    #[test]
    fn hnf_transform_consistency() {
        let m = imat(2, 3, &[2, 3, 5, 4, 1, 7]);
        let (h, u) = hnf_upper_with_transform(&m).unwrap();
        let prod = m.mul(&u);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(prod[(i, j)], h[(i, j)]);
            }
            assert!(prod[(i, 2)].is_zero());
        }
    }

    #[test]
    fn integral_solve() {
        let m = imat(2, 3, &[2, 3, 5, 4, 1, 7]);
        let t = vec![BigInt::from(1), BigInt::from(3)];
        let x = solve_integral(&m, &t).unwrap();
        let mut lhs = [BigInt::zero(), BigInt::zero()];
        for (j, xj) in x.iter().enumerate() {
            lhs[0] += &m[(0, j)] * xj;
            lhs[1] += &m[(1, j)] * xj;
        }
        assert_eq!(lhs[0], t[0]);
        assert_eq!(lhs[1], t[1]);
    }

    #[test]
    fn rational_inverse_and_det() {
        let m = QMat::from_rows(&[
            vec![rat_from_i64(2), rat_from_i64(1)],
            vec![rat_from_i64(1), rat_from_i64(3)],
        ]);
        assert_eq!(m.det(), rat_from_i64(5));
        let inv = m.inverse().unwrap();
        let prod = m.mul(&inv);
        assert_eq!(prod, QMat::identity(2));
    }
}
