//! Brandt matrices of a quaternion order and the Hecke module they span.
//!
//! For class representatives I_1..I_h with unit weights e_j, the n-th
//! Brandt matrix has entries a_ij(n) = (pairs of elements of I_i conj(I_j)
//! of reduced norm n N(I_i) N(I_j)) / e_j. One lattice enumeration per
//! ordered pair covers every n up to the requested bound. The module
//! splits into Eisenstein vectors attached to the quadratic characters of
//! the order and a cusp part; restrictions of the matrices to the cusp
//! part act by integer matrices because the basis is saturated, and the
//! new part of a level is defined by dividing out the characteristic
//! polynomials of all smaller compatible levels.

use crate::arith::divisor_sum_constrained;
use crate::error::{Error, Result};
use crate::ideal::{class_set, ClassSet, ClassSetOptions};
use crate::lattice::short_vectors;
use crate::mat::{IntMat, RatMat};
use crate::order::{Order, SuperorderLevel};
use crate::poly::{charpoly_int, CharPoly};
use crate::{Int, Rat};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Raw pair counts of the norm forms on the products I_i conj(I_j), for
/// all norms up to `bound` at once.
#[derive(Debug, Clone)]
pub struct BrandtFamily {
    pub classes: ClassSet,
    pub bound: Int,
    counts: Vec<Vec<BTreeMap<Int, usize>>>,
}

impl BrandtFamily {
    /// Enumerate short vectors on every pair product once; the counts are
    /// symmetric because conjugation swaps the factors.
    pub fn compute(classes: ClassSet, bound: &Int) -> Result<BrandtFamily> {
        if bound < &Int::one() {
            return Err(Error::InvalidArgument("bound must be at least 1".into()));
        }
        let h = classes.len();
        let alg = &classes.order.alg;
        let mut todo: Vec<(usize, usize)> = Vec::new();
        for i in 0..h {
            for j in i..h {
                todo.push((i, j));
            }
        }
        let computed: Result<Vec<(usize, usize, BTreeMap<Int, usize>)>> = todo
            .par_iter()
            .map(|&(i, j)| {
                let prod = classes.reps[i]
                    .lat
                    .mul_lattice(alg, &classes.reps[j].lat.conj_lattice(alg))?;
                let gram = prod.norm_gram(alg)?;
                let scale = &classes.reps[i].norm * &classes.reps[j].norm;
                let sv = short_vectors(&gram, &(&scale * Rat::from(bound.clone())))?;
                let mut map = BTreeMap::new();
                for (value, pairs) in &sv.counts {
                    let n = value / &scale;
                    if !n.is_integer() {
                        return Err(Error::ConsistencyFailure(format!(
                            "norm {value} is not a multiple of the pair scale {scale}"
                        )));
                    }
                    map.insert(n.to_integer(), *pairs);
                }
                Ok((i, j, map))
            })
            .collect();
        let mut counts = vec![vec![BTreeMap::new(); h]; h];
        for (i, j, map) in computed? {
            counts[i][j] = map.clone();
            counts[j][i] = map;
        }
        Ok(BrandtFamily { classes, bound: bound.clone(), counts })
    }

    pub fn class_number(&self) -> usize {
        self.classes.len()
    }

    /// Raw pair count at norm multiplier n for the (i, j) product lattice.
    pub fn pair_count(&self, i: usize, j: usize, n: &Int) -> usize {
        self.counts[i][j].get(n).copied().unwrap_or(0)
    }

    /// The n-th Brandt matrix, 1 <= n <= bound. Entries are raw counts
    /// divided by the column unit weight; inexact division is an error.
    pub fn matrix(&self, n: &Int) -> Result<IntMat> {
        if n < &Int::one() || n > &self.bound {
            return Err(Error::InvalidArgument(format!(
                "matrix index {n} outside computed range 1..={}",
                self.bound
            )));
        }
        let h = self.class_number();
        let mut m = IntMat::zero(h, h);
        for i in 0..h {
            for j in 0..h {
                let raw = Int::from(self.pair_count(i, j, n));
                let e = &self.classes.unit_halves[j];
                let (q, r) = raw.div_rem(e);
                if !r.is_zero() {
                    return Err(Error::ConsistencyFailure(format!(
                        "pair count {raw} at ({i},{j},{n}) is not divisible by the weight {e}"
                    )));
                }
                m[(i, j)] = q;
            }
        }
        Ok(m)
    }

    /// Degree-zero matrix: every row is (1/(2 e_j))_j, the constant terms
    /// of the pair theta series.
    pub fn matrix_zero(&self) -> RatMat {
        let h = self.class_number();
        let mut m = RatMat::zero(h, h);
        for i in 0..h {
            for j in 0..h {
                m[(i, j)] = Rat::new(Int::one(), Int::from(2) * &self.classes.unit_halves[j]);
            }
        }
        m
    }
}

/// Eisenstein vectors of the order: for each quadratic character (the
/// trivial one listed first, as discriminant 1) the vector of character
/// values at the reduced norms of the class representatives.
pub fn eisenstein_vectors(classes: &ClassSet) -> Result<Vec<(Int, Vec<Int>)>> {
    let h = classes.len();
    let mut out = vec![(Int::one(), vec![Int::one(); h])];
    for d in classes.order.norm_characters()? {
        let mut v = Vec::with_capacity(h);
        for rep in &classes.reps {
            if !rep.norm.is_integer() {
                return Err(Error::ConsistencyFailure(
                    "class representative with non-integral norm".into(),
                ));
            }
            let n = rep.norm.to_integer();
            let val = crate::arith::kronecker(&d, &n);
            if val == 0 {
                return Err(Error::ConsistencyFailure(format!(
                    "class representative norm {n} shares a factor with the character {d}"
                )));
            }
            v.push(Int::from(val));
        }
        out.push((d, v));
    }
    Ok(out)
}

/// Row-sum eigenvalue of the n-th Brandt matrix on the all-ones vector
/// for n coprime to the level: the constrained divisor sum attached to
/// the ramified and Eichler parts. For n sharing a factor with the level
/// the matrix counts every locally principal ideal, which mixes the
/// degeneracy operators (at an Eichler prime q the row sum is 2*sigma(q^k)-1,
/// at a ramified prime of a non-maximal order it picks up the local unit
/// index), so no divisor-sum prediction is made and None is returned.
pub fn expected_row_eigenvalue(o: &Order, n: &Int) -> Result<Option<Int>> {
    if !n.gcd(&o.level).is_one() {
        return Ok(None);
    }
    let mut ram_part = Int::one();
    for lt in &o.locals {
        ram_part *= lt.p.pow(lt.r);
    }
    let mut eichler_part = Int::one();
    for (q, e) in &o.eichler {
        eichler_part *= q.pow(*e);
    }
    Ok(Some(divisor_sum_constrained(n, &ram_part, &eichler_part)?))
}

fn mat_vec(m: &IntMat, v: &[Int]) -> Vec<Int> {
    let mut out = vec![Int::zero(); m.rows];
    for (i, o) in out.iter_mut().enumerate() {
        for (j, x) in v.iter().enumerate() {
            *o += &m[(i, j)] * x;
        }
    }
    out
}

/// Solve X * basis = targets over the integers, where the rows of
/// `targets` must lie in the saturated row space of `basis`.
pub(crate) fn solve_in_row_space(basis: &IntMat, targets: &IntMat) -> Result<IntMat> {
    let (hh, u) = basis.hnf();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    for r in 0..hh.rows {
        if let Some(c) = (0..hh.cols).find(|&c| !hh[(r, c)].is_zero()) {
            pivots.push((r, c));
        }
    }
    if pivots.len() != basis.rows {
        return Err(Error::InvalidArgument("basis rows are dependent".into()));
    }
    let mut out = IntMat::zero(targets.rows, basis.rows);
    for t in 0..targets.rows {
        let mut residual: Vec<Int> = targets.row(t).to_vec();
        let mut y = vec![Int::zero(); hh.rows];
        for &(r, c) in &pivots {
            let (q, rem) = residual[c].div_rem(&hh[(r, c)]);
            if !rem.is_zero() {
                return Err(Error::ConsistencyFailure(
                    "row is not an integer combination of the basis".into(),
                ));
            }
            if !q.is_zero() {
                for k in 0..hh.cols {
                    let s = &hh[(r, k)] * &q;
                    residual[k] -= s;
                }
            }
            y[r] = q;
        }
        if residual.iter().any(|x| !x.is_zero()) {
            return Err(Error::ConsistencyFailure(
                "row lies outside the span of the basis".into(),
            ));
        }
        // x = y * u restricted to the original rows
        for j in 0..basis.rows {
            let mut acc = Int::zero();
            for (r, yr) in y.iter().enumerate() {
                if !yr.is_zero() {
                    acc += yr * &u[(r, j)];
                }
            }
            out[(t, j)] = acc;
        }
    }
    Ok(out)
}

/// Saturated basis (rows) of the intersection of two saturated row spaces.
pub(crate) fn intersect_row_spaces(a: &IntMat, b: &IntMat) -> IntMat {
    let ka = a.right_kernel();
    let kb = b.right_kernel();
    let mut rows = Vec::new();
    for i in 0..ka.rows {
        rows.push(ka.row(i).to_vec());
    }
    for i in 0..kb.rows {
        rows.push(kb.row(i).to_vec());
    }
    if rows.is_empty() {
        // both spaces are everything
        return IntMat::identity(a.cols);
    }
    IntMat::from_rows(rows).right_kernel()
}

/// The Brandt module of an order: matrix family, Eisenstein vectors and a
/// saturated integer basis of the cusp part (the orthogonal complement of
/// the Eisenstein vectors under sum x_i y_i / e_i).
#[derive(Debug, Clone)]
pub struct HeckeModule {
    pub order: Order,
    pub family: BrandtFamily,
    pub eis: Vec<(Int, Vec<Int>)>,
    pub cusp: IntMat,
}

pub fn hecke_module(o: &Order, bound: &Int, opts: &ClassSetOptions) -> Result<HeckeModule> {
    let classes = class_set(o, opts)?;
    let eis = eisenstein_vectors(&classes)?;
    let h = classes.len();
    let mut lcm = Int::one();
    for e in &classes.unit_halves {
        lcm = lcm.lcm(e);
    }
    let mut rows = Vec::new();
    for (_, u) in &eis {
        let row: Vec<Int> =
            (0..h).map(|j| &u[j] * (&lcm / &classes.unit_halves[j])).collect();
        rows.push(row);
    }
    let cusp = IntMat::from_rows(rows).right_kernel();
    let family = BrandtFamily::compute(classes, bound)?;
    Ok(HeckeModule { order: o.clone(), family, eis, cusp })
}

impl HeckeModule {
    pub fn class_number(&self) -> usize {
        self.family.class_number()
    }

    pub fn cusp_dim(&self) -> usize {
        self.cusp.rows
    }

    pub fn brandt(&self, n: &Int) -> Result<IntMat> {
        self.family.matrix(n)
    }

    /// Matrix of the n-th Brandt matrix on the cusp basis: X with
    /// X cusp = cusp A_n^T. Integrality is guaranteed by saturation and
    /// failure to solve means the cusp space is not invariant.
    pub fn restriction(&self, n: &Int) -> Result<IntMat> {
        let a = self.brandt(n)?;
        let target = self.cusp.mul(&a.transpose());
        solve_in_row_space(&self.cusp, &target)
    }

    pub fn cusp_charpoly(&self, n: &Int) -> Result<CharPoly> {
        Ok(charpoly_int(&self.restriction(n)?))
    }

    /// Verify that every Eisenstein vector is an eigenvector of A_n with
    /// the predicted eigenvalue.
    pub fn eisenstein_check(&self, n: &Int) -> Result<()> {
        let a = self.brandt(n)?;
        for (d, u) in &self.eis {
            let image = mat_vec(&a, u);
            let lambda = if d.is_one() {
                match expected_row_eigenvalue(&self.order, n)? {
                    Some(c) => c,
                    None => continue,
                }
            } else {
                if !n.gcd(&self.order.level).is_one() {
                    continue;
                }
                let chi = crate::arith::kronecker(d, n);
                let sigma = divisor_sum_constrained(n, &Int::one(), &Int::one())?;
                Int::from(chi) * sigma
            };
            let expect: Vec<Int> = u.iter().map(|x| x * &lambda).collect();
            if image != expect {
                return Err(Error::ConsistencyFailure(format!(
                    "character {d} is not an eigenvector of A_{n} with value {lambda}"
                )));
            }
        }
        Ok(())
    }

    /// Structural verification over all n in 1..=bound: integrality of the
    /// entries, A_1 = 1, weighted symmetry e_j a_ij = e_i a_ji, Eisenstein
    /// eigenvectors, the prime power recurrence away from the level, and
    /// multiplicativity on coprime indices.
    pub fn verify_structure(&self) -> Result<HeckeModuleReport> {
        let bound: i64 = self
            .family
            .bound
            .to_string()
            .parse()
            .map_err(|_| Error::Unsupported("bound too large for verification".into()))?;
        let h = self.class_number();
        let mut mats: BTreeMap<i64, IntMat> = BTreeMap::new();
        for n in 1..=bound {
            mats.insert(n, self.brandt(&Int::from(n))?);
        }
        if mats[&1] != IntMat::identity(h) {
            return Err(Error::ConsistencyFailure("A_1 is not the identity".into()));
        }
        let e = &self.family.classes.unit_halves;
        for (n, a) in &mats {
            for i in 0..h {
                for j in 0..h {
                    if &a[(i, j)] * &e[j] != &a[(j, i)] * &e[i] {
                        return Err(Error::ConsistencyFailure(format!(
                            "weighted symmetry fails at n={n} ({i},{j})"
                        )));
                    }
                    if a[(i, j)].is_negative() {
                        return Err(Error::ConsistencyFailure(format!(
                            "negative entry at n={n} ({i},{j})"
                        )));
                    }
                }
            }
            self.eisenstein_check(&Int::from(*n))?;
        }
        for q in crate::arith::small_primes(bound as usize + 1) {
            let q = q as i64;
            if (&self.order.level % Int::from(q)).is_zero() {
                continue;
            }
            // A_{q^{r+1}} = A_q A_{q^r} - q A_{q^{r-1}}
            let mut r = 1i64;
            while let Some(next) = q.checked_pow((r + 1) as u32).filter(|&x| x <= bound) {
                let prev = q.pow((r - 1) as u32);
                let cur = q.pow(r as u32);
                let lhs = &mats[&next];
                let rhs = mats[&q]
                    .mul(&mats[&cur])
                    .add(&mats[&prev].scale(&Int::from(-q)));
                if *lhs != rhs {
                    return Err(Error::ConsistencyFailure(format!(
                        "recurrence fails at {q}^{}",
                        r + 1
                    )));
                }
                r += 1;
            }
        }
        for m in 2..=bound {
            for n in 2..=bound / m {
                if Int::from(m).gcd(&Int::from(n)).is_one() {
                    let prod = mats[&m].mul(&mats[&n]);
                    if prod != mats[&(m * n)] {
                        return Err(Error::ConsistencyFailure(format!(
                            "multiplicativity fails at {m} * {n}"
                        )));
                    }
                }
            }
        }
        let coprime: Vec<i64> = (2..=bound)
            .filter(|&n| Int::from(n).gcd(&self.order.level).is_one())
            .collect();
        for (a, m) in coprime.iter().enumerate() {
            for n in &coprime[a + 1..] {
                if mats[m].mul(&mats[n]) != mats[n].mul(&mats[m]) {
                    return Err(Error::ConsistencyFailure(format!(
                        "A_{m} and A_{n} do not commute"
                    )));
                }
            }
        }
        Ok(HeckeModuleReport {
            level: self.order.level.clone(),
            class_number: h,
            unit_halves: e.clone(),
            mass: self.family.classes.mass.clone(),
            eisenstein_dim: self.eis.len(),
            cusp_dim: self.cusp_dim(),
            max_index: Int::from(bound),
        })
    }
}

/// Outcome of a structural verification run.
#[derive(Debug, Clone)]
pub struct HeckeModuleReport {
    pub level: Int,
    pub class_number: usize,
    pub unit_halves: Vec<Int>,
    pub mass: Rat,
    pub eisenstein_dim: usize,
    pub cusp_dim: usize,
    pub max_index: Int,
}

/// Evaluate a monic integer polynomial on an integer matrix.
fn eval_poly_int(p: &CharPoly, m: &IntMat) -> IntMat {
    let n = m.rows;
    let mut acc = IntMat::zero(n, n);
    for c in p.coeffs.iter().rev() {
        acc = acc.mul(m);
        for i in 0..n {
            let v = &acc[(i, i)] + c;
            acc[(i, i)] = v;
        }
    }
    acc
}

/// A tower of Brandt modules over the compatible smaller levels of a base
/// order, with memoised new-part characteristic polynomials.
pub struct Tower {
    pub bound: Int,
    opts: ClassSetOptions,
    base_level: Int,
    levels: Vec<SuperorderLevel>,
    base_order: Order,
    modules: BTreeMap<Int, HeckeModule>,
    new_memo: BTreeMap<(Int, Int), CharPoly>,
}

impl Tower {
    pub fn new(o: &Order, bound: &Int, opts: &ClassSetOptions) -> Result<Tower> {
        let mut t = Tower {
            bound: bound.clone(),
            opts: opts.clone(),
            base_level: o.level.clone(),
            levels: o.superorder_levels(),
            base_order: o.clone(),
            modules: BTreeMap::new(),
            new_memo: BTreeMap::new(),
        };
        t.ensure_module(&o.level.clone())?;
        Ok(t)
    }

    fn ensure_module(&mut self, level: &Int) -> Result<()> {
        if self.modules.contains_key(level) {
            return Ok(());
        }
        let order = if *level == self.base_level {
            self.base_order.clone()
        } else {
            let s = self
                .levels
                .iter()
                .find(|s| &s.level == level)
                .ok_or_else(|| {
                    Error::InvalidArgument(format!("{level} is not a level of the tower"))
                })?;
            self.base_order.at_level(s)?
        };
        let module = hecke_module(&order, &self.bound.clone(), &self.opts.clone())?;
        self.modules.insert(level.clone(), module);
        Ok(())
    }

    pub fn module(&mut self, level: &Int) -> Result<&HeckeModule> {
        self.ensure_module(level)?;
        Ok(&self.modules[level])
    }

    pub fn base(&self) -> &HeckeModule {
        &self.modules[&self.base_level]
    }

    /// Characteristic polynomial of A_n on the part of the cusp space new
    /// at the given level: the cusp polynomial divided exactly by the new
    /// polynomials of all smaller compatible levels with multiplicity.
    pub fn new_charpoly(&mut self, level: &Int, n: &Int) -> Result<CharPoly> {
        let key = (level.clone(), n.clone());
        if let Some(p) = self.new_memo.get(&key) {
            return Ok(p.clone());
        }
        self.ensure_module(level)?;
        let mut result = self.modules[level].cusp_charpoly(n)?;
        let subs = self.modules[level].order.superorder_levels();
        for s in subs {
            if s.level >= *level {
                continue;
            }
            let sub_new = self.new_charpoly(&s.level, n)?;
            result = result.div_exact(&sub_new.pow(s.multiplicity))?;
        }
        self.new_memo.insert(key, result.clone());
        Ok(result)
    }

    /// Saturated basis (rows, in base cusp coordinates) of the common
    /// kernel cutting out the new part, found by intersecting kernels of
    /// new polynomials at ascending primes coprime to the level.
    pub fn new_subspace(&mut self) -> Result<IntMat> {
        let base_level = self.base_level.clone();
        self.ensure_module(&base_level)?;
        let k = self.modules[&base_level].cusp_dim();
        let mut ell = Int::from(2);
        let mut first = true;
        let mut target = 0usize;
        let mut current = IntMat::identity(k);
        loop {
            while !ell.gcd(&base_level).is_one() || !crate::arith::is_prime(&ell) {
                ell += 1;
            }
            if ell > self.bound {
                return Err(Error::BudgetExceeded {
                    context: "new subspace cut needs operators beyond the bound",
                    limit: 0,
                });
            }
            let g = self.new_charpoly(&base_level, &ell)?;
            if first {
                target = g.degree();
                first = false;
                if target == 0 {
                    return Ok(IntMat::zero(0, k));
                }
            }
            let x = self.modules[&base_level].restriction(&ell)?;
            let gx = eval_poly_int(&g, &x);
            let ker = gx.right_kernel();
            current = intersect_row_spaces(&current, &ker);
            if current.rows == target {
                return Ok(current);
            }
            if current.rows < target {
                return Err(Error::ConsistencyFailure(format!(
                    "new space dimension {} fell below the degree {target}",
                    current.rows
                )));
            }
            ell += 1;
        }
    }

    /// Matrix of A_n acting on the rows of a saturated subspace of the
    /// base cusp space.
    pub fn block_action(&mut self, subspace: &IntMat, n: &Int) -> Result<IntMat> {
        let base_level = self.base_level.clone();
        self.ensure_module(&base_level)?;
        let x = self.modules[&base_level].restriction(n)?;
        let target = subspace.mul(&x.transpose());
        solve_in_row_space(subspace, &target)
    }

    /// At a prime of ramified type with exponent >= 2, A_p must kill the
    /// new part of the cusp space while fixing nothing of it.
    pub fn ramified_new_annihilation(&mut self, p: &Int) -> Result<bool> {
        let w = self.new_subspace()?;
        if w.rows == 0 {
            return Ok(true);
        }
        let base_level = self.base_level.clone();
        let x = self.modules[&base_level].restriction(p)?;
        Ok(w.mul(&x.transpose()).is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::build_order;
    use crate::quat::construct_definite;
    use crate::{int, rat};

    fn module(d: i64, n: i64, bound: i64) -> HeckeModule {
        let alg = construct_definite(&int(d)).unwrap();
        let o = build_order(&alg, &int(n), &BTreeMap::new()).unwrap();
        hecke_module(&o, &int(bound), &ClassSetOptions::default()).unwrap()
    }

    #[test]
    fn brandt_matrices_at_eleven_pinned() {
        let m = module(11, 11, 12);
        assert_eq!(m.class_number(), 2);
        assert_eq!(m.family.classes.unit_halves, vec![int(2), int(3)]);
        let a1 = m.brandt(&int(1)).unwrap();
        assert_eq!(a1, IntMat::identity(2));
        let a2 = m.brandt(&int(2)).unwrap();
        assert_eq!(a2, IntMat::from_i64(&[&[1, 2], &[3, 0]]));
        // spectrum {3, -2}
        assert_eq!(charpoly_int(&a2).coeffs, vec![int(-6), int(-1), int(1)]);
        let a0 = m.family.matrix_zero();
        for i in 0..2 {
            assert_eq!(a0[(i, 0)], rat(1, 4));
            assert_eq!(a0[(i, 1)], rat(1, 6));
        }
    }

    #[test]
    fn eisenstein_row_sums_match_divisor_sums() {
        let m = module(11, 11, 22);
        for n in 1..=22 {
            m.eisenstein_check(&int(n)).unwrap();
        }
        assert_eq!(
            expected_row_eigenvalue(&m.order, &int(2)).unwrap(),
            Some(int(3))
        );
        assert_eq!(expected_row_eigenvalue(&m.order, &int(11)).unwrap(), None);
        // at a maximal order the unique two-sided ideal above 11 is the
        // only norm-11 ideal, so those row sums are 1, and norm-22 ideals
        // factor uniquely into a norm-2 and the norm-11 one
        for (n, sum) in [(11i64, 1i64), (22, 3)] {
            let a = m.brandt(&int(n)).unwrap();
            for i in 0..a.rows {
                let s: Int = (0..a.cols).map(|j| a[(i, j)].clone()).sum();
                assert_eq!(s, int(sum), "row sum of A_{n}");
            }
        }
    }

    #[test]
    fn structural_suite_on_small_modules() {
        for (d, n) in [(11i64, 11i64), (11, 22), (2, 6)] {
            let m = module(d, n, 12);
            let report = m.verify_structure().unwrap();
            assert_eq!(report.level, int(n));
            assert!(report.cusp_dim < report.class_number);
        }
    }

    #[test]
    fn cusp_eigenvalues_at_eleven_match_the_elliptic_curve() {
        // the unique cusp line at level 11 carries a_n of 11a
        let m = module(11, 11, 13);
        assert_eq!(m.cusp_dim(), 1);
        for (n, a) in [(2i64, -2i64), (3, -1), (4, 2), (5, 1), (7, -2), (9, -2), (11, 1), (13, 4)]
        {
            let x = m.restriction(&int(n)).unwrap();
            assert_eq!(x[(0, 0)], int(a), "a_{n}");
        }
    }

    #[test]
    fn eichler_level_twentytwo_cusp_structure() {
        let m = module(11, 22, 10);
        assert_eq!(m.cusp_dim(), 2);
        let p3 = m.cusp_charpoly(&int(3)).unwrap();
        // old copies of the level 11 form: (x + 1)^2
        assert_eq!(p3.coeffs, vec![int(1), int(2), int(1)]);
        // At the Eichler prime the matrix counts every locally principal
        // norm-2 ideal, stacking both degeneracy operators and the norm-2
        // involution on the old pair. The involution is traceless there,
        // so the trace is twice a_2 of the level 11 form.
        let p2 = m.cusp_charpoly(&int(2)).unwrap();
        assert_eq!(p2.degree(), 2);
        assert_eq!(p2.coeffs[1], int(4), "trace -4 on the old pair");
    }

    #[test]
    fn new_part_vanishes_at_twentytwo_and_survives_at_eleven() {
        let alg = construct_definite(&int(11)).unwrap();
        let o = build_order(&alg, &int(22), &BTreeMap::new()).unwrap();
        let mut t = Tower::new(&o, &int(10), &ClassSetOptions::default()).unwrap();
        assert_eq!(t.new_charpoly(&int(22), &int(3)).unwrap().degree(), 0);
        let eleven = t.new_charpoly(&int(11), &int(3)).unwrap();
        assert_eq!(eleven.coeffs, vec![int(1), int(1)], "x + 1 at 3");
        let w = t.new_subspace().unwrap();
        assert_eq!(w.rows, 0);
    }

    #[test]
    fn ramified_square_level_killed_by_ramified_operator() {
        let alg = construct_definite(&int(11)).unwrap();
        let o = build_order(&alg, &int(121), &BTreeMap::new()).unwrap();
        let mut t = Tower::new(&o, &int(11), &ClassSetOptions::default()).unwrap();
        let m = t.base();
        assert_eq!(m.eis.len(), 2, "trivial and ramified quadratic characters");
        let h = m.class_number();
        let cusp_dim = m.cusp_dim();
        assert_eq!(cusp_dim, h - 2);
        // the old part is the level 11 line where A_11 acts by 1; the new
        // part is annihilated
        assert!(t.ramified_new_annihilation(&int(11)).unwrap());
        let w = t.new_subspace().unwrap();
        assert_eq!(w.rows, cusp_dim - 1);
        // The one line that survives is the level 11 form; the ideal
        // count scales it by the local unit index 11 + 1. Bookkeeping:
        // trace A_11 = 24, the trivial character takes 12, the ramified
        // quadratic character takes 0, so the old line carries the
        // remaining 12.
        let p11 = t
            .modules
            .get(&int(121))
            .unwrap()
            .cusp_charpoly(&int(11))
            .unwrap();
        assert_eq!(p11.root_multiplicity(&int(0)), cusp_dim - 1);
        assert_eq!(p11.root_multiplicity(&int(12)), 1);
    }

    #[test]
    fn unramified_cube_level_has_zero_ramified_operator() {
        let alg = construct_definite(&int(5)).unwrap();
        let o = build_order(&alg, &int(125), &BTreeMap::new()).unwrap();
        let m = hecke_module(&o, &int(5), &ClassSetOptions::default()).unwrap();
        assert!(m.brandt(&int(5)).unwrap().is_zero());
        m.verify_structure().unwrap();
    }

    #[test]
    fn solve_in_row_space_is_exact() {
        let basis = IntMat::from_i64(&[&[2, -3, 1], &[0, 1, 4]]);
        let x = IntMat::from_i64(&[&[1, 2], &[-1, 0], &[3, 5]]);
        let targets = x.mul(&basis);
        let sol = solve_in_row_space(&basis, &targets).unwrap();
        assert_eq!(sol.mul(&basis), targets);
        let bad = IntMat::from_i64(&[&[1, 0, 0]]);
        assert!(solve_in_row_space(&basis, &bad).is_err());
    }

    #[test]
    fn row_space_intersection_is_saturated() {
        let a = IntMat::from_i64(&[&[1, 0, 0], &[0, 1, 0]]);
        let b = IntMat::from_i64(&[&[0, 1, 0], &[0, 0, 1]]);
        let w = intersect_row_spaces(&a, &b);
        assert_eq!(w.rows, 1);
        assert_eq!(w.row(0), &[int(0), int(1), int(0)]);
    }
}
