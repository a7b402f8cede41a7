//! Characteristic polynomials and exact polynomial arithmetic over the
//! integers. Char polys use the Samuelson-Berkowitz construction, which is
//! division-free, so integer matrices stay in integer arithmetic all the way
//! through.

use crate::error::{Error, Result};
use crate::mat::{IntMat, RatMat};
use crate::{Int, Rat};
use num_traits::{One, Signed, Zero};

/// Monic integer polynomial, coefficients ascending by degree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CharPoly {
    pub coeffs: Vec<Int>,
}

impl CharPoly {
    pub fn one() -> Self {
        CharPoly { coeffs: vec![Int::one()] }
    }

    pub fn from_coeffs(coeffs: Vec<Int>) -> Self {
        let p = CharPoly { coeffs };
        assert!(p.coeffs.last().map(|c| c.is_one()).unwrap_or(false), "charpoly must be monic");
        p
    }

    /// x - a
    pub fn linear(a: &Int) -> Self {
        CharPoly { coeffs: vec![-a.clone(), Int::one()] }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn mul(&self, other: &CharPoly) -> CharPoly {
        CharPoly { coeffs: poly_mul(&self.coeffs, &other.coeffs) }
    }

    pub fn pow(&self, e: usize) -> CharPoly {
        let mut out = CharPoly::one();
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Exact division by a monic divisor; a nonzero remainder is an error,
    /// not a truncation.
    pub fn div_exact(&self, divisor: &CharPoly) -> Result<CharPoly> {
        let (q, r) = poly_divmod(&self.coeffs, &divisor.coeffs);
        if r.iter().any(|c| !c.is_zero()) {
            return Err(Error::ConsistencyFailure(format!(
                "inexact polynomial division: ({}) by ({})",
                self, divisor
            )));
        }
        Ok(CharPoly { coeffs: q })
    }

    pub fn eval_int(&self, x: &Int) -> Int {
        let mut acc = Int::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// p(M) over the rationals.
    pub fn eval_mat(&self, m: &RatMat) -> RatMat {
        let n = m.rows;
        let mut acc = RatMat::zero(n, n);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(m);
            for i in 0..n {
                let t = Rat::from(c.clone());
                acc[(i, i)] += t;
            }
        }
        acc
    }

    /// Coefficient of x^{deg-1}, negated: the trace of any matrix with this
    /// characteristic polynomial (sum of roots).
    pub fn root_sum(&self) -> Int {
        if self.degree() == 0 {
            Int::zero()
        } else {
            -self.coeffs[self.degree() - 1].clone()
        }
    }

    /// Multiplicity of the exact integer root a.
    pub fn root_multiplicity(&self, a: &Int) -> usize {
        let mut p = self.clone();
        let lin = CharPoly::linear(a);
        let mut m = 0;
        while p.degree() > 0 && p.eval_int(a).is_zero() {
            p = p.div_exact(&lin).expect("root divides");
            m += 1;
        }
        m
    }
}

impl std::fmt::Display for CharPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let n = self.degree();
        if n == 0 {
            return write!(f, "1");
        }
        let mut first = true;
        for d in (0..=n).rev() {
            let c = &self.coeffs[d];
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let show_coeff = !mag.is_one() || d == 0;
            if show_coeff {
                write!(f, "{mag}")?;
            }
            if d > 0 {
                if show_coeff {
                    write!(f, "*")?;
                }
                write!(f, "x")?;
                if d > 1 {
                    write!(f, "^{d}")?;
                }
            }
        }
        Ok(())
    }
}

pub fn poly_mul(a: &[Int], b: &[Int]) -> Vec<Int> {
    let mut out = vec![Int::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Division with remainder by a monic divisor.
pub fn poly_divmod(num: &[Int], den: &[Int]) -> (Vec<Int>, Vec<Int>) {
    assert!(den.last().map(|c| c.is_one()).unwrap_or(false), "divisor must be monic");
    let dd = den.len() - 1;
    if num.len() <= dd {
        return (vec![Int::one()], num.to_vec());
    }
    let mut rem = num.to_vec();
    let qd = num.len() - den.len();
    let mut q = vec![Int::zero(); qd + 1];
    for k in (0..=qd).rev() {
        let c = rem[k + dd].clone();
        q[k] = c.clone();
        if c.is_zero() {
            continue;
        }
        for j in 0..=dd {
            let t = &den[j] * &c;
            rem[k + j] -= t;
        }
    }
    rem.truncate(dd.max(1));
    (q, rem)
}

/// Characteristic polynomial of an integer matrix, det(xI - m), by the
/// division-free Berkowitz construction. Coefficients ascending.
pub fn charpoly_int(m: &IntMat) -> CharPoly {
    assert_eq!(m.rows, m.cols);
    let n = m.rows;
    if n == 0 {
        return CharPoly::one();
    }
    // c holds coefficients in descending-degree order, c[0] = 1.
    let mut c: Vec<Int> = vec![Int::one(), -m[(0, 0)].clone()];
    for r in 2..=n {
        // principal block of size r-1, its border row/column, corner a
        let a = m[(r - 1, r - 1)].clone();
        let row: Vec<Int> = (0..r - 1).map(|j| m[(r - 1, j)].clone()).collect();
        let col: Vec<Int> = (0..r - 1).map(|i| m[(i, r - 1)].clone()).collect();
        // t[k] coefficients of the Toeplitz factor
        let mut t = vec![Int::one(), -a];
        let mut w = col.clone();
        for _ in 2..=r {
            // t_k = -(row . w), then w <- M w
            let dot = row.iter().zip(&w).fold(Int::zero(), |s, (x, y)| s + x * y);
            t.push(-dot);
            let mut nw = vec![Int::zero(); r - 1];
            for i in 0..r - 1 {
                for j in 0..r - 1 {
                    nw[i] += &m[(i, j)] * &w[j];
                }
            }
            w = nw;
        }
        let mut next = vec![Int::zero(); r + 1];
        for (i, ti) in t.iter().enumerate() {
            if ti.is_zero() {
                continue;
            }
            for (j, cj) in c.iter().enumerate() {
                if i + j <= r {
                    next[i + j] += ti * cj;
                }
            }
        }
        c = next;
    }
    c.reverse();
    CharPoly::from_coeffs(c)
}

/// Characteristic polynomial of a rational matrix; must come out integral
/// (it does whenever the matrix is conjugate to an integer matrix), and the
/// integrality is checked.
pub fn charpoly_rat(m: &RatMat) -> Result<CharPoly> {
    assert_eq!(m.rows, m.cols);
    let n = m.rows;
    if n == 0 {
        return Ok(CharPoly::one());
    }
    let mut c: Vec<Rat> = vec![Rat::one(), -m[(0, 0)].clone()];
    for r in 2..=n {
        let a = m[(r - 1, r - 1)].clone();
        let row: Vec<Rat> = (0..r - 1).map(|j| m[(r - 1, j)].clone()).collect();
        let col: Vec<Rat> = (0..r - 1).map(|i| m[(i, r - 1)].clone()).collect();
        let mut t = vec![Rat::one(), -a];
        let mut w = col.clone();
        for _ in 2..=r {
            let dot = row.iter().zip(&w).fold(Rat::zero(), |s, (x, y)| s + x * y);
            t.push(-dot);
            let mut nw = vec![Rat::zero(); r - 1];
            for i in 0..r - 1 {
                for j in 0..r - 1 {
                    nw[i] += &m[(i, j)] * &w[j];
                }
            }
            w = nw;
        }
        let mut next = vec![Rat::zero(); r + 1];
        for (i, ti) in t.iter().enumerate() {
            if ti.is_zero() {
                continue;
            }
            for (j, cj) in c.iter().enumerate() {
                if i + j <= r {
                    next[i + j] += ti * cj;
                }
            }
        }
        c = next;
    }
    c.reverse();
    let mut coeffs = Vec::with_capacity(c.len());
    for x in c {
        if !x.is_integer() {
            return Err(Error::ConsistencyFailure(
                "characteristic polynomial is not integral".into(),
            ));
        }
        coeffs.push(x.to_integer());
    }
    Ok(CharPoly::from_coeffs(coeffs))
}
