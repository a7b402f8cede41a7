//! Dense exact matrices: integer matrices with Hermite normal form and
//! kernels, and rational matrices with Gauss-Jordan inverse/solve.
//!
//! The HNF here is row-style echelon: `transform * m = hnf` with a
//! unimodular transform, pivots positive, and every entry above a pivot
//! reduced into `[0, pivot)`. That normal form is a canonical label for the
//! row lattice, which is what the lattice layer relies on.

use crate::error::{Error, Result};
use crate::{Int, Rat};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Int>,
}

impl IntMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMat { rows, cols, data: vec![Int::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Int::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Int>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        IntMat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| Int::from(x)).collect()).collect())
    }

    pub fn row(&self, i: usize) -> &[Int] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> IntMat {
        let mut t = IntMat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = a * &other[(k, j)];
                    out[(i, j)] += t;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &IntMat) -> IntMat {
        assert!(self.rows == other.rows && self.cols == other.cols);
        let mut out = self.clone();
        for i in 0..self.data.len() {
            out.data[i] += &other.data[i];
        }
        out
    }

    pub fn scale(&self, c: &Int) -> IntMat {
        let mut out = self.clone();
        for v in &mut out.data {
            *v *= c;
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// gcd of all entries (zero for the zero matrix).
    pub fn content(&self) -> Int {
        let mut g = Int::zero();
        for v in &self.data {
            g = g.gcd(v);
        }
        g
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self[(i, j)].clone();
            self[(i, j)] = v;
        }
    }

    /// row_i -= q * row_k
    fn row_submul(&mut self, i: usize, k: usize, q: &Int) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let t = &self[(k, j)] * q;
            self[(i, j)] -= t;
        }
    }

    /// Hermite normal form of the row lattice. Returns (h, u) with
    /// u unimodular and u * self = h.
    pub fn hnf(&self) -> (IntMat, IntMat) {
        let mut h = self.clone();
        let mut u = IntMat::identity(self.rows);
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut r = 0usize;
        for c in 0..h.cols {
            if r == h.rows {
                break;
            }
            loop {
                // smallest nonzero |entry| in column c at rows >= r
                let mut best: Option<usize> = None;
                for i in r..h.rows {
                    if !h[(i, c)].is_zero()
                        && best.map_or(true, |b| h[(i, c)].abs() < h[(b, c)].abs())
                    {
                        best = Some(i);
                    }
                }
                let Some(b) = best else { break };
                h.swap_rows(r, b);
                u.swap_rows(r, b);
                if h[(r, c)].is_negative() {
                    h.negate_row(r);
                    u.negate_row(r);
                }
                let mut clean = true;
                for i in r + 1..h.rows {
                    if !h[(i, c)].is_zero() {
                        let q = h[(i, c)].div_floor(&h[(r, c)]);
                        h.row_submul(i, r, &q);
                        u.row_submul(i, r, &q);
                        if !h[(i, c)].is_zero() {
                            clean = false;
                        }
                    }
                }
                if clean {
                    break;
                }
            }
            if r < h.rows && !h[(r, c)].is_zero() {
                pivots.push((r, c));
                r += 1;
            }
        }
        // reduce entries above each pivot into [0, pivot)
        for &(i, c) in &pivots {
            for j in 0..i {
                let q = h[(j, c)].div_floor(&h[(i, c)]);
                h.row_submul(j, i, &q);
                u.row_submul(j, i, &q);
            }
        }
        (h, u)
    }

    /// Rank of the matrix (number of nonzero HNF rows).
    pub fn rank(&self) -> usize {
        let (h, _) = self.hnf();
        (0..h.rows).filter(|&i| h.row(i).iter().any(|x| !x.is_zero())).count()
    }

    /// Saturated basis of the left kernel {x : x * self = 0}, as rows.
    pub fn left_kernel(&self) -> IntMat {
        let (h, u) = self.hnf();
        let mut rows = Vec::new();
        for i in 0..h.rows {
            if h.row(i).iter().all(|x| x.is_zero()) {
                rows.push(u.row(i).to_vec());
            }
        }
        if rows.is_empty() {
            IntMat::zero(0, self.rows)
        } else {
            IntMat::from_rows(rows).hnf().0
        }
    }

    /// Saturated basis of the right kernel {x : self * x = 0}, as rows.
    pub fn right_kernel(&self) -> IntMat {
        self.transpose().left_kernel()
    }

    /// Determinant by fraction-free Bareiss elimination.
    pub fn det(&self) -> Int {
        assert_eq!(self.rows, self.cols, "det of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Int::one();
        }
        let mut m = self.clone();
        let mut sign = 1i32;
        let mut prev = Int::one();
        for k in 0..n - 1 {
            if m[(k, k)].is_zero() {
                let Some(s) = (k + 1..n).find(|&i| !m[(i, k)].is_zero()) else {
                    return Int::zero();
                };
                m.swap_rows(k, s);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let t = &m[(k, k)] * &m[(i, j)] - &m[(i, k)] * &m[(k, j)];
                    m[(i, j)] = t.div_floor(&prev);
                }
                m[(i, k)] = Int::zero();
            }
            prev = m[(k, k)].clone();
        }
        let d = m[(n - 1, n - 1)].clone();
        if sign < 0 {
            -d
        } else {
            d
        }
    }

    pub fn to_rat(&self) -> RatMat {
        RatMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| Rat::from(x.clone())).collect(),
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMat {
    type Output = Int;
    fn index(&self, (i, j): (usize, usize)) -> &Int {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Int {
        &mut self.data[i * self.cols + j]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Rat>,
}

impl RatMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        RatMat { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        RatMat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> RatMat {
        let mut t = RatMat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &RatMat) -> RatMat {
        assert_eq!(self.cols, other.rows);
        let mut out = RatMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = a * &other[(k, j)];
                    out[(i, j)] += t;
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &RatMat) -> RatMat {
        assert!(self.rows == other.rows && self.cols == other.cols);
        let mut out = self.clone();
        for i in 0..self.data.len() {
            out.data[i] -= &other.data[i];
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Inverse by exact Gauss-Jordan elimination.
    pub fn inverse(&self) -> Result<RatMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = RatMat::identity(n);
        for col in 0..n {
            let Some(p) = (col..n).find(|&i| !a[(i, col)].is_zero()) else {
                return Err(Error::ConsistencyFailure("singular matrix inversion".into()));
            };
            for j in 0..n {
                a.data.swap(col * n + j, p * n + j);
                inv.data.swap(col * n + j, p * n + j);
            }
            let d = a[(col, col)].clone();
            for j in 0..n {
                a[(col, j)] /= d.clone();
                inv[(col, j)] /= d.clone();
            }
            for i in 0..n {
                if i != col && !a[(i, col)].is_zero() {
                    let f = a[(i, col)].clone();
                    for j in 0..n {
                        let t1 = &f * &a[(col, j)];
                        a[(i, j)] -= t1;
                        let t2 = &f * &inv[(col, j)];
                        inv[(i, j)] -= t2;
                    }
                }
            }
        }
        Ok(inv)
    }

    /// Clear denominators: returns (m, d) with self = m / d and d minimal positive.
    pub fn clear_denominators(&self) -> (IntMat, Int) {
        let mut d = Int::one();
        for v in &self.data {
            d = d.lcm(v.denom());
        }
        let mut m = IntMat::zero(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let x = &self[(i, j)] * Rat::from(d.clone());
                debug_assert!(x.is_integer());
                m[(i, j)] = x.to_integer();
            }
        }
        (m, d)
    }
}

impl std::ops::Index<(usize, usize)> for RatMat {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::int;

    #[test]
    fn hnf_pinned_two_by_two() {
        let m = IntMat::from_i64(&[&[2, 0], &[1, 1]]);
        let (h, u) = m.hnf();
        assert_eq!(h, IntMat::from_i64(&[&[1, 1], &[0, 2]]));
        assert_eq!(u.mul(&m), h);
        assert_eq!(u.det().abs(), int(1));
    }

    #[test]
    fn hnf_idempotent_and_transform_unimodular() {
        let cases = vec![
            IntMat::from_i64(&[&[4, 6], &[2, 2]]),
            IntMat::from_i64(&[&[0, 0], &[0, 0]]),
            IntMat::from_i64(&[&[3, 1, 2], &[6, 2, 4], &[1, 1, 1]]),
            IntMat::from_i64(&[&[10, -3, 7, 1], &[2, 8, -5, 0], &[0, 0, 4, 4], &[9, 9, 9, 9]]),
            IntMat::from_i64(&[&[2, 4], &[6, 8], &[10, 12]]),
        ];
        for m in cases {
            let (h, u) = m.hnf();
            assert_eq!(u.mul(&m), h);
            if m.rows == m.cols {
                assert_eq!(h.det().abs(), m.det().abs());
            }
            assert_eq!(u.det().abs(), int(1));
            let (h2, _) = h.hnf();
            assert_eq!(h2, h, "hnf must be idempotent");
        }
    }

    #[test]
    fn hnf_invariant_under_unimodular_row_ops() {
        let m = IntMat::from_i64(&[&[5, 3, 1], &[2, 0, 4], &[7, 1, 1]]);
        let ts = vec![
            IntMat::from_i64(&[&[1, 1, 0], &[0, 1, 0], &[0, 0, 1]]),
            IntMat::from_i64(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, -1]]),
            IntMat::from_i64(&[&[1, 0, 0], &[2, 1, 0], &[-3, 5, 1]]),
        ];
        let base = m.hnf().0;
        for t in ts {
            assert_eq!(t.det().abs(), int(1));
            assert_eq!(t.mul(&m).hnf().0, base);
        }
    }

    #[test]
    fn hnf_shape_reduced_above_pivots() {
        let m = IntMat::from_i64(&[&[4, 7, 2], &[0, 3, 9], &[0, 0, 5]]);
        let (h, _) = m.hnf();
        // pivots positive, entries above each pivot lie in [0, pivot)
        let mut pivots = Vec::new();
        for i in 0..h.rows {
            if let Some(c) = (0..h.cols).find(|&c| !h[(i, c)].is_zero()) {
                assert!(h[(i, c)].is_positive());
                pivots.push((i, c));
            }
        }
        for &(i, c) in &pivots {
            for j in 0..i {
                assert!(!h[(j, c)].is_negative() && h[(j, c)] < h[(i, c)]);
            }
        }
    }

    #[test]
    fn kernels_annihilate_and_have_right_rank() {
        let m = IntMat::from_i64(&[&[1, 2, 3], &[2, 4, 6]]);
        let k = m.right_kernel();
        assert_eq!(k.rows, 2);
        for i in 0..k.rows {
            let prod = m.mul(&IntMat::from_rows(vec![k.row(i).to_vec()]).transpose());
            assert!(prod.is_zero());
        }
        let lk = m.left_kernel();
        assert_eq!(lk.rows, 1);
        assert!(lk.mul(&m).is_zero());
    }

    #[test]
    fn kernel_is_saturated() {
        // (2,4) has right kernel spanned by (2,-1), primitive, not (4,-2)
        let m = IntMat::from_i64(&[&[2, 4]]);
        let k = m.right_kernel();
        assert_eq!(k.rows, 1);
        assert_eq!(k.row(0).iter().fold(Int::zero(), |g, x| g.gcd(x)), int(1));
    }

    #[test]
    fn det_matches_cofactor_expansion_small() {
        let m = IntMat::from_i64(&[&[2, -1, 0], &[3, 4, 5], &[1, 0, 2]]);
        // cofactor by hand: 2*(8-0) +1*(6-5) + 0 = 17
        assert_eq!(m.det(), int(17));
        let id = IntMat::identity(4);
        assert_eq!(id.det(), int(1));
    }

    #[test]
    fn rat_inverse_roundtrip() {
        let m = IntMat::from_i64(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]).to_rat();
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), RatMat::identity(3));
        assert_eq!(inv.mul(&m), RatMat::identity(3));
    }

    #[test]
    fn rat_inverse_rejects_singular() {
        let m = IntMat::from_i64(&[&[1, 2], &[2, 4]]).to_rat();
        assert!(m.inverse().is_err());
    }
}
