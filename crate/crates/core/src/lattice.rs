//! Positive definite quadratic forms over the rationals: exact LLL
//! reduction and Fincke-Pohst enumeration of short vectors.
//!
//! Everything is exact. Enumeration bounds are derived from integer square
//! roots with a final exact comparison, so no vector is ever missed or
//! spuriously included, which is what the lattice-counting layers above
//! depend on for correctness.

use crate::error::{Error, Result};
use crate::mat::{IntMat, RatMat};
use crate::{Int, Rat};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

/// Symmetric positive definite Gram matrix with rational entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GramForm {
    pub mat: RatMat,
}

impl GramForm {
    pub fn new(mat: RatMat) -> Result<Self> {
        if mat.rows != mat.cols {
            return Err(Error::InvalidArgument("gram matrix must be square".into()));
        }
        for i in 0..mat.rows {
            for j in 0..i {
                if mat[(i, j)] != mat[(j, i)] {
                    return Err(Error::InvalidArgument("gram matrix must be symmetric".into()));
                }
            }
        }
        let g = GramForm { mat };
        if !g.is_positive_definite() {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(g)
    }

    pub fn dim(&self) -> usize {
        self.mat.rows
    }

    /// Leading principal minors all positive (Sylvester).
    fn is_positive_definite(&self) -> bool {
        let n = self.dim();
        let (im, _) = self.mat.clear_denominators();
        for k in 1..=n {
            let mut sub = IntMat::zero(k, k);
            for i in 0..k {
                for j in 0..k {
                    sub[(i, j)] = im[(i, j)].clone();
                }
            }
            if !sub.det().is_positive() {
                return false;
            }
        }
        true
    }

    /// Value x^T G x.
    pub fn eval(&self, x: &[Int]) -> Rat {
        let n = self.dim();
        let mut total = Rat::zero();
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if x[j].is_zero() {
                    continue;
                }
                total += &self.mat[(i, j)] * Rat::from(&x[i] * &x[j]);
            }
        }
        total
    }
}

/// One representative per +-pair of nonzero vectors with value <= bound,
/// together with the exact count of pairs at each attained value.
#[derive(Debug, Clone)]
pub struct ShortVectors {
    pub vectors: Vec<(Vec<Int>, Rat)>,
    pub counts: BTreeMap<Rat, usize>,
}

/// Exact LLL reduction (delta = 3/4) applied to a Gram matrix; returns the
/// unimodular change of basis U with reduced Gram U G U^T.
pub fn lll_gram(g: &GramForm) -> IntMat {
    let n = g.dim();
    let mut u = IntMat::identity(n);
    if n <= 1 {
        return u;
    }
    let gram = |u: &IntMat, i: usize, j: usize, g: &GramForm| -> Rat {
        // row_i(U) G row_j(U)^T
        let mut s = Rat::zero();
        for a in 0..n {
            if u[(i, a)].is_zero() {
                continue;
            }
            for b in 0..n {
                if u[(j, b)].is_zero() {
                    continue;
                }
                s += &g.mat[(a, b)] * Rat::from(&u[(i, a)] * &u[(j, b)]);
            }
        }
        s
    };
    // Gram-Schmidt data recomputed on demand; n <= 4 in practice so the
    // quadratic bookkeeping is irrelevant next to bignum costs.
    let mut k = 1usize;
    let delta = Rat::new(Int::from(3), Int::from(4));
    let mut guard = 0usize;
    while k < n {
        guard += 1;
        assert!(guard < 100_000, "lll failed to terminate");
        // recompute mu and B for rows 0..=k
        let (mu, b) = gram_schmidt(&u, g, k, &gram);
        // size-reduce row k against k-1..0
        let mut changed = false;
        for j in (0..k).rev() {
            let m = &mu[k][j];
            let q = round_rat(m);
            if !q.is_zero() {
                for c in 0..n {
                    let t = &u[(j, c)] * &q;
                    u[(k, c)] -= t;
                }
                changed = true;
            }
        }
        let (mu, b) = if changed { gram_schmidt(&u, g, k, &gram) } else { (mu, b) };
        // Lovasz condition
        let lhs = &b[k];
        let rhs = (&delta - &mu[k][k - 1] * &mu[k][k - 1]) * &b[k - 1];
        if *lhs >= rhs {
            k += 1;
        } else {
            u.swap_rows_pub(k, k - 1);
            k = k.max(2) - 1;
            if k == 0 {
                k = 1;
            }
        }
    }
    u
}

fn gram_schmidt(
    u: &IntMat,
    g: &GramForm,
    upto: usize,
    gram: &dyn Fn(&IntMat, usize, usize, &GramForm) -> Rat,
) -> (Vec<Vec<Rat>>, Vec<Rat>) {
    let k = upto + 1;
    let mut mu = vec![vec![Rat::zero(); k]; k];
    let mut b = vec![Rat::zero(); k];
    for i in 0..k {
        let mut bi = gram(u, i, i, g);
        for j in 0..i {
            let mut gij = gram(u, i, j, g);
            for l in 0..j {
                gij -= &mu[i][l] * &mu[j][l] * &b[l];
            }
            mu[i][j] = &gij / &b[j];
            bi -= &mu[i][j] * &gij;
        }
        b[i] = bi;
        mu[i][i] = Rat::one();
    }
    (mu, b)
}

fn round_rat(x: &Rat) -> Int {
    // nearest integer, ties toward zero
    let two = Int::from(2);
    let num = x.numer() * &two + x.denom();
    num.div_floor(&(x.denom() * &two))
}

impl IntMat {
    fn swap_rows_pub(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            let x = self[(a, j)].clone();
            let y = self[(b, j)].clone();
            self[(a, j)] = y;
            self[(b, j)] = x;
        }
    }
}

/// floor(sqrt(x)) for a nonnegative rational.
fn floor_sqrt_rat(x: &Rat) -> Int {
    if x.is_negative() {
        return Int::zero();
    }
    (x.numer() / x.denom()).sqrt()
}

/// ceil of c - sqrt(s) for rationals c, s >= 0: smallest integer k with
/// (c - k)^2 <= s or k >= c.
fn lower_index(c: &Rat, s: &Rat) -> Int {
    let mut k = c.floor().to_integer() - floor_sqrt_rat(s) - Int::from(2);
    loop {
        let diff = c - Rat::from(k.clone());
        if diff <= Rat::zero() || &diff * &diff <= *s {
            return k;
        }
        k += 1;
    }
}

/// floor of c + sqrt(s): largest integer k with (k - c)^2 <= s or k <= c.
fn upper_index(c: &Rat, s: &Rat) -> Int {
    let mut k = c.ceil().to_integer() + floor_sqrt_rat(s) + Int::from(2);
    loop {
        let diff = Rat::from(k.clone()) - c;
        if diff <= Rat::zero() || &diff * &diff <= *s {
            return k;
        }
        k -= 1;
    }
}

struct FinckePohst {
    // x^T G x = sum_i q[i][i] (x_i + sum_{j>i} q[i][j] x_j)^2
    q: Vec<Vec<Rat>>,
    n: usize,
}

impl FinckePohst {
    fn new(g: &RatMat) -> Result<Self> {
        let n = g.rows;
        let mut q: Vec<Vec<Rat>> = (0..n).map(|i| g.row(i).to_vec()).collect();
        for i in 0..n {
            if !q[i][i].is_positive() {
                return Err(Error::NotPositiveDefinite);
            }
            for j in i + 1..n {
                let t = q[i][j].clone();
                let scaled = &t / &q[i][i];
                q[j][i] = t; // stash g_ij for the update below
                q[i][j] = scaled;
            }
            for k in i + 1..n {
                for l in k..n {
                    let t = &q[k][i] * &q[i][l];
                    q[k][l] -= t;
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                q[i][j] = Rat::zero();
            }
        }
        Ok(FinckePohst { q, n })
    }

    /// All nonzero x with value <= bound, visiting each +-pair once (the
    /// representative has positive first nonzero coordinate from the top).
    fn enumerate(&self, bound: &Rat, mut visit: impl FnMut(&[Int], &Rat) -> bool) {
        let n = self.n;
        let mut x = vec![Int::zero(); n];
        self.walk(n, bound, &mut x, &mut visit, true);
    }

    // depth-first from coordinate level-1 down; `top` tracks whether all
    // coordinates chosen so far are zero (then x_i ranges only over >= 0 to
    // pick one representative per +-pair).
    fn walk(
        &self,
        level: usize,
        budget: &Rat,
        x: &mut [Int],
        visit: &mut impl FnMut(&[Int], &Rat) -> bool,
        top: bool,
    ) -> bool {
        if level == 0 {
            if top {
                return true; // the zero vector: skip
            }
            let spent = Rat::zero();
            let _ = spent;
            return true;
        }
        let i = level - 1;
        // center c_i = -sum_{j>i} q_ij x_j
        let mut c = Rat::zero();
        for j in i + 1..self.n {
            c -= &self.q[i][j] * Rat::from(x[j].clone());
        }
        let s = budget / &self.q[i][i];
        let lo = if top { Int::zero().max(lower_index(&c, &s)) } else { lower_index(&c, &s) };
        let hi = upper_index(&c, &s);
        let mut k = lo;
        while k <= hi {
            let diff = Rat::from(k.clone()) - &c;
            let used = &self.q[i][i] * &diff * &diff;
            if used <= *budget {
                x[i] = k.clone();
                let rest = budget - &used;
                let now_top = top && k.is_zero();
                if level == 1 {
                    if !now_top {
                        // value = bound - remaining budget is not directly
                        // available; recompute exactly at the leaf
                        if !visit(x, &rest) {
                            return false;
                        }
                    }
                } else if !self.walk(level - 1, &rest, x, visit, now_top) {
                    return false;
                }
            }
            k += 1;
        }
        x[i] = Int::zero();
        true
    }
}

/// Enumerate short vectors of a positive definite rational form: exactly one
/// representative from each +-pair {x, -x} of nonzero vectors with
/// x^T G x <= bound, the representative being the lexicographically larger
/// tuple of the pair. `counts` records how many pairs attain each value.
pub fn short_vectors(g: &GramForm, bound: &Rat) -> Result<ShortVectors> {
    let mut out = collect_short(g, bound, None)?;
    out.vectors.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

/// Early-exit search: does any vector attain exactly `value`?
pub fn attains_value(g: &GramForm, value: &Rat) -> Result<bool> {
    let res = collect_short(g, value, Some(value))?;
    Ok(!res.vectors.is_empty())
}

fn collect_short(g: &GramForm, bound: &Rat, stop_at: Option<&Rat>) -> Result<ShortVectors> {
    let n = g.dim();
    if !bound.is_positive() {
        return Ok(ShortVectors { vectors: vec![], counts: BTreeMap::new() });
    }
    let u = lll_gram(g);
    // reduced gram u g u^T
    let ur = u.to_rat();
    let gr = ur.mul(&g.mat).mul(&ur.transpose());
    let fp = FinckePohst::new(&gr)?;
    let mut vectors = Vec::new();
    let mut counts: BTreeMap<Rat, usize> = BTreeMap::new();
    let mut found_target = false;
    fp.enumerate(bound, |y, _| {
        // back to original coordinates: x = y U
        let mut x = vec![Int::zero(); n];
        for (j, xr) in x.iter_mut().enumerate() {
            for (i, yi) in y.iter().enumerate() {
                *xr += yi * &u[(i, j)];
            }
        }
        let v = g.eval(&x);
        debug_assert!(v <= *bound);
        // canonical representative: lexicographically larger of {x, -x}
        let neg: Vec<Int> = x.iter().map(|a| -a.clone()).collect();
        let rep = if x > neg { x } else { neg };
        *counts.entry(v.clone()).or_insert(0) += 1;
        let stop = if let Some(t) = stop_at {
            if v == *t {
                found_target = true;
            }
            found_target
        } else {
            false
        };
        vectors.push((rep, v));
        !stop
    });
    if stop_at.is_some() && !found_target {
        vectors.clear();
        counts.clear();
    }
    Ok(ShortVectors { vectors, counts })
}
