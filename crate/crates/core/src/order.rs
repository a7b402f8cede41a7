//! Full-rank lattices and orders in a definite quaternion algebra.
//!
//! Lattices are stored as a 4x4 integer basis matrix in Hermite normal form
//! over a common positive denominator, so equality is structural. Orders
//! carry the metadata of their construction at each ramified prime (local
//! level, type, quadratic generator) plus the Eichler levels away from the
//! discriminant; every constructor certifies the result by recomputing the
//! reduced discriminant from the trace form.

use crate::arith::{exact_sqrt, factor, hilbert_symbol, Place};
use crate::error::{Error, Result};
use crate::lattice::GramForm;
use crate::mat::{IntMat, RatMat};
use crate::quat::{QuatAlgebra, QuatElement};
use crate::{Int, Rat};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Full-rank lattice in a quaternion algebra: rows of `basis` divided by
/// `den` are the basis vectors in coordinates (1, i, j, k). `basis` is in
/// Hermite normal form and gcd(content(basis), den) = 1, so two lattices
/// are equal iff their representations are identical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QLattice {
    pub basis: IntMat,
    pub den: Int,
}

impl QLattice {
    /// Lattice Z<1, i, j, k>.
    pub fn standard() -> Self {
        QLattice { basis: IntMat::identity(4), den: Int::one() }
    }

    /// Lattice spanned by the given elements; they must span a rank-4
    /// subgroup.
    pub fn from_generators(gens: &[QuatElement]) -> Result<Self> {
        if gens.is_empty() {
            return Err(Error::InvalidArgument("empty generating set".into()));
        }
        let mut den = Int::one();
        for g in gens {
            for c in &g.c {
                den = den.lcm(c.denom());
            }
        }
        let rows: Vec<Vec<Int>> = gens
            .iter()
            .map(|g| {
                g.c.iter()
                    .map(|c| {
                        let scaled = c * Rat::from(den.clone());
                        debug_assert!(scaled.is_integer());
                        scaled.to_integer()
                    })
                    .collect()
            })
            .collect();
        let (h, _) = IntMat::from_rows(rows).hnf();
        let mut basis = IntMat::zero(4, 4);
        for i in 0..4.min(h.rows) {
            for j in 0..4 {
                basis[(i, j)] = h[(i, j)].clone();
            }
        }
        if h.rows < 4 || basis[(3, 3)].is_zero() {
            return Err(Error::InvalidArgument("generators do not span rank 4".into()));
        }
        Ok(QLattice { basis, den }.normalized())
    }

    fn normalized(mut self) -> Self {
        let g = self.basis.content().gcd(&self.den);
        if g > Int::one() {
            for i in 0..4 {
                for j in 0..4 {
                    let v = &self.basis[(i, j)] / &g;
                    self.basis[(i, j)] = v;
                }
            }
            self.den /= &g;
        }
        self
    }

    pub fn basis_element(&self, i: usize) -> QuatElement {
        let d = Rat::from(self.den.clone());
        QuatElement::new([
            Rat::from(self.basis[(i, 0)].clone()) / &d,
            Rat::from(self.basis[(i, 1)].clone()) / &d,
            Rat::from(self.basis[(i, 2)].clone()) / &d,
            Rat::from(self.basis[(i, 3)].clone()) / &d,
        ])
    }

    pub fn basis_elements(&self) -> Vec<QuatElement> {
        (0..4).map(|i| self.basis_element(i)).collect()
    }

    /// Integer coordinates of x in this basis, or None if x is outside.
    pub fn coords(&self, x: &QuatElement) -> Option<Vec<Int>> {
        // Solve c * B = den * x by forward substitution (B is upper
        // triangular with nonzero diagonal).
        let d = Rat::from(self.den.clone());
        let mut w: Vec<Rat> = x.c.iter().map(|c| c * &d).collect();
        let mut out = vec![Int::zero(); 4];
        for j in 0..4 {
            let mut v = w[j].clone();
            for (i, ci) in out.iter().enumerate().take(j) {
                v -= Rat::from(ci * &self.basis[(i, j)]);
            }
            let q = v / Rat::from(self.basis[(j, j)].clone());
            if !q.is_integer() {
                return None;
            }
            out[j] = q.to_integer();
            w[j] = Rat::zero();
        }
        Some(out)
    }

    pub fn contains(&self, x: &QuatElement) -> bool {
        self.coords(x).is_some()
    }

    pub fn contains_lattice(&self, other: &QLattice) -> bool {
        other.basis_elements().iter().all(|b| self.contains(b))
    }

    /// Element with the given integer coordinates in this basis.
    pub fn element_from_coords(&self, c: &[Int]) -> QuatElement {
        let mut out = QuatElement::zero();
        for (i, ci) in c.iter().enumerate() {
            if !ci.is_zero() {
                out = out.add(&self.basis_element(i).scale(&Rat::from(ci.clone())));
            }
        }
        out
    }

    pub fn add_lattice(&self, other: &QLattice) -> Result<QLattice> {
        let mut gens = self.basis_elements();
        gens.extend(other.basis_elements());
        QLattice::from_generators(&gens)
    }

    /// Dual lattice with respect to the standard dot product on the
    /// coordinate space.
    fn dual(&self) -> Result<QLattice> {
        let mut m = self.basis.to_rat();
        let d = Rat::from(self.den.clone());
        for i in 0..4 {
            for j in 0..4 {
                let v = m[(i, j)].clone() / &d;
                m[(i, j)] = v;
            }
        }
        let inv = m.inverse()?;
        let gens: Vec<QuatElement> = (0..4)
            .map(|i| {
                QuatElement::new([
                    inv[(0, i)].clone(),
                    inv[(1, i)].clone(),
                    inv[(2, i)].clone(),
                    inv[(3, i)].clone(),
                ])
            })
            .collect();
        QLattice::from_generators(&gens)
    }

    pub fn intersect(&self, other: &QLattice) -> Result<QLattice> {
        self.dual()?.add_lattice(&other.dual()?)?.dual()
    }

    /// Lattice spanned by all products xy, x in self, y in other.
    pub fn mul_lattice(&self, alg: &QuatAlgebra, other: &QLattice) -> Result<QLattice> {
        let xs = self.basis_elements();
        let ys = other.basis_elements();
        let mut gens = Vec::with_capacity(16);
        for x in &xs {
            for y in &ys {
                gens.push(alg.mul(x, y));
            }
        }
        QLattice::from_generators(&gens)
    }

    pub fn conj_lattice(&self, alg: &QuatAlgebra) -> QLattice {
        let gens: Vec<QuatElement> =
            self.basis_elements().iter().map(|b| alg.conj(b)).collect();
        QLattice::from_generators(&gens).expect("conjugate keeps rank")
    }

    pub fn scale(&self, r: &Rat) -> QLattice {
        let gens: Vec<QuatElement> =
            self.basis_elements().iter().map(|b| b.scale(r)).collect();
        QLattice::from_generators(&gens).expect("nonzero scaling keeps rank")
    }

    /// det of the basis matrix over den^4, an invariant of the lattice up
    /// to sign; [L' : L] = covolume(L)/covolume(L') for L inside L'.
    pub fn covolume(&self) -> Rat {
        let d = self.basis.det().abs();
        let mut den4 = Int::one();
        for _ in 0..4 {
            den4 *= &self.den;
        }
        Rat::new(d, den4)
    }

    /// Index [other : self] for self contained in other.
    pub fn index_in(&self, other: &QLattice) -> Result<Int> {
        let idx = self.covolume() / other.covolume();
        if !idx.is_integer() {
            return Err(Error::ConsistencyFailure("index is not an integer".into()));
        }
        Ok(idx.to_integer())
    }

    /// Matrix of the pairing (x, y) -> trace(x conj(y)) / 2 on the basis;
    /// the norm form in basis coordinates.
    pub fn pairing_matrix(&self, alg: &QuatAlgebra) -> RatMat {
        let b = self.basis_elements();
        let mut m = RatMat::zero(4, 4);
        for i in 0..4 {
            for j in 0..=i {
                let v = alg.pairing(&b[i], &b[j]);
                m[(i, j)] = v.clone();
                m[(j, i)] = v;
            }
        }
        m
    }

    /// Norm form of the lattice as a positive definite Gram matrix.
    pub fn norm_gram(&self, alg: &QuatAlgebra) -> Result<GramForm> {
        GramForm::new(self.pairing_matrix(alg))
    }
}

impl fmt::Display for QLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..4)
            .map(|i| {
                let r: Vec<String> =
                    (0..4).map(|j| self.basis[(i, j)].to_string()).collect();
                format!("[{}]", r.join(","))
            })
            .collect();
        write!(f, "[{}]/{}", rows.join(","), self.den)
    }
}

/// Reduced discriminant of a lattice that is an order: the square root of
/// |det(trace(b_i conj(b_j)))|.
pub fn reduced_discriminant(alg: &QuatAlgebra, lat: &QLattice) -> Result<Int> {
    let t = lat.pairing_matrix(alg);
    let mut m = IntMat::zero(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            let v = &t[(i, j)] + &t[(i, j)];
            if !v.is_integer() {
                return Err(Error::ConsistencyFailure(
                    "trace form of an order must be integral".into(),
                ));
            }
            m[(i, j)] = v.to_integer();
        }
    }
    let d = m.det().abs();
    exact_sqrt(&d).ok_or_else(|| {
        Error::ConsistencyFailure("trace form determinant is not a square".into())
    })
}

/// Whether the lattice contains 1 and is closed under multiplication.
pub fn is_ring(alg: &QuatAlgebra, lat: &QLattice) -> bool {
    if !lat.contains(&QuatElement::one()) {
        return false;
    }
    let b = lat.basis_elements();
    for x in &b {
        for y in &b {
            if !lat.contains(&alg.mul(x, y)) {
                return false;
            }
        }
    }
    true
}

/// Local behaviour of an order at a prime dividing the discriminant:
/// level exponent r, residual type of the embedded quadratic ring, and
/// the quadratic generator used to build it (for r >= 2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderLocalType {
    pub p: Int,
    pub r: u32,
    pub etype: EType,
    pub omega: Option<QuatElement>,
    /// Discriminant trace(omega)^2 - 4 norm(omega) of the quadratic
    /// generator; its square class pins the quadratic field.
    pub e_disc: Option<Int>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EType {
    Unramified,
    Ramified,
}

impl fmt::Display for EType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EType::Unramified => write!(f, "unramified"),
            EType::Ramified => write!(f, "ramified"),
        }
    }
}

/// An order together with the data of its construction. `level` equals the
/// reduced discriminant and is certified on construction.
#[derive(Debug, Clone)]
pub struct Order {
    pub alg: QuatAlgebra,
    pub lat: QLattice,
    pub level: Int,
    pub locals: Vec<OrderLocalType>,
    pub eichler: Vec<(Int, u32)>,
    /// Ambient maximal order the construction started from.
    pub max_lat: QLattice,
}

impl PartialEq for Order {
    fn eq(&self, other: &Self) -> bool {
        self.alg == other.alg && self.lat == other.lat
    }
}

/// Advance a base-m counter; returns false after wrapping past the end.
pub(crate) fn next_coord_vec(c: &mut [u64], m: u64) -> bool {
    for v in c.iter_mut().rev() {
        *v += 1;
        if *v < m {
            return true;
        }
        *v = 0;
    }
    false
}

fn next_vec(c: &mut [u64], m: u64) -> bool {
    next_coord_vec(c, m)
}

/// Row-reduced echelon bases of the d-dimensional subspaces of F_p^4.
fn subspaces_mod_p(p: u64, d: usize) -> Vec<Vec<Vec<u64>>> {
    let mut out = Vec::new();
    let cols = 4usize;
    let mut pivots: Vec<Vec<usize>> = Vec::new();
    // all increasing d-subsets of 0..4
    let mut stack = vec![(Vec::new(), 0usize)];
    while let Some((cur, start)) = stack.pop() {
        if cur.len() == d {
            pivots.push(cur);
            continue;
        }
        for c in start..cols {
            let mut nxt = cur.clone();
            nxt.push(c);
            stack.push((nxt, c + 1));
        }
    }
    pivots.sort();
    for piv in pivots {
        let mut free: Vec<(usize, usize)> = Vec::new();
        for (i, &pc) in piv.iter().enumerate() {
            for c in pc + 1..cols {
                if !piv.contains(&c) {
                    free.push((i, c));
                }
            }
        }
        let mut counter = vec![0u64; free.len()];
        loop {
            let mut rows = vec![vec![0u64; cols]; d];
            for (i, &pc) in piv.iter().enumerate() {
                rows[i][pc] = 1;
            }
            for (k, &(i, c)) in free.iter().enumerate() {
                rows[i][c] = counter[k];
            }
            out.push(rows);
            if free.is_empty() || !next_vec(&mut counter, p) {
                break;
            }
        }
    }
    out
}

impl Order {
    /// Wrap a lattice that is already a ring with 1; no local metadata.
    pub fn from_lattice(alg: &QuatAlgebra, lat: QLattice) -> Result<Order> {
        if !is_ring(alg, &lat) {
            return Err(Error::InvalidArgument("lattice is not a unital ring".into()));
        }
        let level = reduced_discriminant(alg, &lat)?;
        Ok(Order {
            alg: alg.clone(),
            lat: lat.clone(),
            level,
            locals: Vec::new(),
            eichler: Vec::new(),
            max_lat: lat,
        })
    }

    /// A maximal order, found by saturating Z<1, i, j, k> at the primes
    /// where the reduced discriminant exceeds the algebra discriminant.
    /// Each enlargement step is certified by the ring axioms and a strict
    /// drop of the reduced discriminant.
    pub fn maximal(alg: &QuatAlgebra) -> Result<Order> {
        if !alg.a.is_integer() || !alg.b.is_integer() {
            return Err(Error::Unsupported(
                "maximal order construction needs an integral presentation".into(),
            ));
        }
        let mut lat = QLattice::standard();
        let mut disc = reduced_discriminant(alg, &lat)?;
        let target = &alg.disc;
        'saturate: while &disc != target {
            let (q, r) = disc.div_rem(target);
            if !r.is_zero() || q < Int::one() {
                return Err(Error::ConsistencyFailure(format!(
                    "reduced discriminant {disc} does not sit over {target}"
                )));
            }
            let p = factor(&q)?[0].0.clone();
            let pu: u64 = p.to_string().parse().map_err(|_| {
                Error::Unsupported("saturation prime too large".into())
            })?;
            let prat = Rat::from(p.clone());
            let base = lat.basis_elements();
            for dim in 1..=3usize {
                for rows in subspaces_mod_p(pu, dim) {
                    let mut gens = base.clone();
                    for row in &rows {
                        let mut v = QuatElement::zero();
                        for (c, &coef) in row.iter().enumerate() {
                            if coef != 0 {
                                v = v.add(&base[c].scale(&Rat::from(Int::from(coef))));
                            }
                        }
                        gens.push(v.scale(&prat.clone().recip()));
                    }
                    let cand = QLattice::from_generators(&gens)?;
                    if cand != lat && is_ring(alg, &cand) {
                        let nd = reduced_discriminant(alg, &cand)?;
                        debug_assert!(nd < disc);
                        lat = cand;
                        disc = nd;
                        continue 'saturate;
                    }
                }
            }
            return Err(Error::ConsistencyFailure(format!(
                "no superorder found at {p} while saturating"
            )));
        }
        let locals = factor(target)?
            .into_iter()
            .map(|(p, _)| OrderLocalType {
                p,
                r: 1,
                etype: EType::Unramified,
                omega: None,
                e_disc: None,
            })
            .collect();
        Ok(Order {
            alg: alg.clone(),
            lat: lat.clone(),
            level: target.clone(),
            locals,
            eichler: Vec::new(),
            max_lat: lat,
        })
    }

    /// Coordinates of 1 in the order basis.
    pub fn one_coords(&self) -> Vec<Int> {
        self.lat.coords(&QuatElement::one()).expect("orders contain 1")
    }

    /// Multiplication table: entry [u][v] holds the coordinates of
    /// b_u b_v in the basis.
    pub fn mult_table(&self) -> Vec<Vec<Vec<Int>>> {
        let b = self.lat.basis_elements();
        let mut t = vec![vec![Vec::new(); 4]; 4];
        for u in 0..4 {
            for v in 0..4 {
                t[u][v] = self
                    .lat
                    .coords(&self.alg.mul(&b[u], &b[v]))
                    .expect("order closed under multiplication");
            }
        }
        t
    }
}

fn mul_coords(table: &[Vec<Vec<Int>>], x: &[Int], y: &[Int], modulus: &Int) -> Vec<Int> {
    let mut out = vec![Int::zero(); 4];
    for u in 0..4 {
        if x[u].is_zero() {
            continue;
        }
        for v in 0..4 {
            if y[v].is_zero() {
                continue;
            }
            let c = &x[u] * &y[v];
            for (k, t) in table[u][v].iter().enumerate() {
                out[k] += &c * t;
            }
        }
    }
    for o in out.iter_mut() {
        *o = o.mod_floor(modulus);
    }
    out
}

/// The two-sided ideal P of a maximal order with P^2 = pO, at a prime p
/// dividing the discriminant. P is spanned by pO together with all
/// residues x mod p whose reduced norm is divisible by p; the defining
/// property P^2 = pO is verified before returning.
pub fn two_sided_prime(o: &Order, p: &Int) -> Result<QLattice> {
    if !o.alg.is_ramified_at(p) {
        return Err(Error::InvalidArgument(format!("{p} is not ramified")));
    }
    let pu: u64 = p
        .to_string()
        .parse()
        .map_err(|_| Error::Unsupported("prime too large".into()))?;
    let b = o.lat.basis_elements();
    let prat = Rat::from(p.clone());
    let mut gens: Vec<QuatElement> = b.iter().map(|x| x.scale(&prat)).collect();
    let mut c = vec![0u64; 4];
    loop {
        if c.iter().any(|&v| v != 0) {
            let mut x = QuatElement::zero();
            for (i, &ci) in c.iter().enumerate() {
                if ci != 0 {
                    x = x.add(&b[i].scale(&Rat::from(Int::from(ci))));
                }
            }
            let n = o.alg.norm(&x);
            debug_assert!(n.is_integer());
            if (n.to_integer() % p).is_zero() {
                gens.push(x);
            }
        }
        if !next_vec(&mut c, pu) {
            break;
        }
    }
    let ideal = QLattice::from_generators(&gens)?;
    let square = ideal.mul_lattice(&o.alg, &ideal)?;
    if square != o.lat.scale(&prat) {
        return Err(Error::ConsistencyFailure(format!(
            "two-sided ideal at {p} does not square to {p}O"
        )));
    }
    let idx = ideal.index_in(&o.lat)?;
    if idx != p * p {
        return Err(Error::ConsistencyFailure(format!(
            "two-sided ideal at {p} has index {idx}, expected {}",
            p * p
        )));
    }
    Ok(ideal)
}

/// k-th power of a lattice under lattice multiplication, k >= 1.
fn lattice_pow(alg: &QuatAlgebra, l: &QLattice, k: u32) -> Result<QLattice> {
    debug_assert!(k >= 1, "the zeroth power is the ambient order, not the lattice");
    let mut out = l.clone();
    for _ in 1..k {
        out = out.mul_lattice(alg, l)?;
    }
    Ok(out)
}

/// Find an element of the maximal order whose characteristic polynomial is
/// irreducible modulo p (its ring Z_p[x] is the unramified quadratic ring).
fn find_unramified_generator(o: &Order, p: &Int) -> Result<(QuatElement, Int)> {
    let pu: u64 = p
        .to_string()
        .parse()
        .map_err(|_| Error::Unsupported("prime too large".into()))?;
    let b = o.lat.basis_elements();
    let mut c = vec![0u64; 4];
    loop {
        if c.iter().any(|&v| v != 0) {
            let mut x = QuatElement::zero();
            for (i, &ci) in c.iter().enumerate() {
                if ci != 0 {
                    x = x.add(&b[i].scale(&Rat::from(Int::from(ci))));
                }
            }
            let t = o.alg.trace(&x);
            let n = o.alg.norm(&x);
            if t.is_integer() && n.is_integer() {
                let (t, n) = (t.to_integer(), n.to_integer());
                let mut irreducible = true;
                let mut z = Int::zero();
                while &z < p {
                    let val = (&z * &z - &t * &z + &n).mod_floor(p);
                    if val.is_zero() {
                        irreducible = false;
                        break;
                    }
                    z += 1;
                }
                if irreducible {
                    let disc = &t * &t - Int::from(4) * &n;
                    return Ok((x, disc));
                }
            }
        }
        if !next_vec(&mut c, pu) {
            return Err(Error::ConsistencyFailure(format!(
                "no unramified quadratic generator at {p}"
            )));
        }
    }
}

/// Find a uniformizer: an element of P whose reduced norm has p-valuation
/// exactly 1 (its ring Z_p[x] is a ramified quadratic ring).
fn find_ramified_generator(
    o: &Order,
    p: &Int,
    prime_ideal: &QLattice,
) -> Result<(QuatElement, Int)> {
    let pu: u64 = p
        .to_string()
        .parse()
        .map_err(|_| Error::Unsupported("prime too large".into()))?;
    let b = prime_ideal.basis_elements();
    let mut c = vec![0u64; 4];
    loop {
        if c.iter().any(|&v| v != 0) {
            let mut x = QuatElement::zero();
            for (i, &ci) in c.iter().enumerate() {
                if ci != 0 {
                    x = x.add(&b[i].scale(&Rat::from(Int::from(ci))));
                }
            }
            let n = o.alg.norm(&x).to_integer();
            let (q, r) = n.div_rem(p);
            if !n.is_zero() && r.is_zero() && !(&q % p).is_zero() {
                let t = o.alg.trace(&x).to_integer();
                let disc = &t * &t - Int::from(4) * &n;
                return Ok((x, disc));
            }
        }
        if !next_vec(&mut c, pu) {
            return Err(Error::ConsistencyFailure(format!(
                "no ramified quadratic generator at {p}"
            )));
        }
    }
}

/// Lattice Z + Z omega + P^(r-1): the local order of level p^r attached to
/// the quadratic ring generated by omega. The zeroth power of the prime is
/// the ambient maximal order itself.
fn special_lattice(
    alg: &QuatAlgebra,
    omega: &QuatElement,
    max_lat: &QLattice,
    prime_ideal: &QLattice,
    r: u32,
) -> Result<QLattice> {
    let pr = if r == 1 {
        max_lat.clone()
    } else {
        lattice_pow(alg, prime_ideal, r - 1)?
    };
    let mut gens = vec![QuatElement::one(), omega.clone()];
    gens.extend(pr.basis_elements());
    QLattice::from_generators(&gens)
}

/// Find a uniformizer whose discriminant sits in the opposite square class
/// mod p from the given one, so that the two ramified quadratic extensions
/// are both represented.
fn ramified_generator_other_class(
    o: &Order,
    p: &Int,
    prime_ideal: &QLattice,
    disc: &Int,
) -> Result<QuatElement> {
    let pu: u64 = p
        .to_string()
        .parse()
        .map_err(|_| Error::Unsupported("prime too large".into()))?;
    let u1 = (disc / p).mod_floor(p);
    let b = prime_ideal.basis_elements();
    let mut c = vec![0u64; 4];
    loop {
        if c.iter().any(|&v| v != 0) {
            let mut x = QuatElement::zero();
            for (i, &ci) in c.iter().enumerate() {
                if ci != 0 {
                    x = x.add(&b[i].scale(&Rat::from(Int::from(ci))));
                }
            }
            let n = o.alg.norm(&x).to_integer();
            let (q, r) = n.div_rem(p);
            if !n.is_zero() && r.is_zero() && !(&q % p).is_zero() {
                let t = o.alg.trace(&x).to_integer();
                let d2 = &t * &t - Int::from(4) * &n;
                let u2 = (&d2 / p).mod_floor(p);
                if crate::arith::kronecker(&u1, p) != crate::arith::kronecker(&u2, p) {
                    return Ok(x);
                }
            }
        }
        if !next_vec(&mut c, pu) {
            return Err(Error::ConsistencyFailure(format!(
                "only one square class of uniformizers at {p}"
            )));
        }
    }
}

/// Lattices Z + Z omega + P^(r-1) for r = 1..=max_r, sharing one quadratic
/// generator omega of the requested type at the ramified prime p. With
/// `other_class` the generator is taken from the second square class of
/// uniformizers (ramified type only; the unramified quadratic extension is
/// unique). Exposes the containment chain of the local orders directly, so
/// equalities and strict inclusions between consecutive lattices can be
/// checked without rebuilding global orders.
pub fn special_lattice_chain(
    alg: &QuatAlgebra,
    p: &Int,
    etype: EType,
    max_r: u32,
    other_class: bool,
) -> Result<Vec<QLattice>> {
    if max_r == 0 {
        return Err(Error::InvalidArgument("chain needs at least one level".into()));
    }
    let o = Order::maximal(alg)?;
    if !alg.is_ramified_at(p) {
        return Err(Error::InvalidArgument(format!(
            "{p} does not divide the discriminant"
        )));
    }
    let prime_ideal = two_sided_prime(&o, p)?;
    let omega = match etype {
        EType::Unramified => {
            if other_class {
                return Err(Error::InvalidArgument(
                    "the unramified quadratic extension is unique".into(),
                ));
            }
            find_unramified_generator(&o, p)?.0
        }
        EType::Ramified => {
            let (w, d) = find_ramified_generator(&o, p, &prime_ideal)?;
            if other_class {
                ramified_generator_other_class(&o, p, &prime_ideal, &d)?
            } else {
                w
            }
        }
    };
    (1..=max_r).map(|r| special_lattice(alg, &omega, &o.lat, &prime_ideal, r)).collect()
}

/// Eichler piece at a prime q away from the discriminant: the sublattice
/// {x : (1 - e) x e = 0 mod q^r} for an idempotent e of O/q^r O, found by
/// scanning O/qO and lifting by Hensel's iteration e <- 3e^2 - 2e^3.
fn eichler_lattice(o: &Order, q: &Int, r: u32) -> Result<QLattice> {
    let qu: u64 = q
        .to_string()
        .parse()
        .map_err(|_| Error::Unsupported("prime too large".into()))?;
    let table = o.mult_table();
    let one = o.one_coords();
    let one_mod: Vec<Int> = one.iter().map(|v| v.mod_floor(q)).collect();
    // nontrivial idempotent mod q
    let mut c = vec![0u64; 4];
    let mut eps: Option<Vec<Int>> = None;
    loop {
        let x: Vec<Int> = c.iter().map(|&v| Int::from(v)).collect();
        let is_zero = x.iter().all(|v| v.is_zero());
        let is_one = x == one_mod;
        if !is_zero && !is_one {
            let sq = mul_coords(&table, &x, &x, q);
            if sq == x {
                eps = Some(x);
                break;
            }
        }
        if !next_vec(&mut c, qu) {
            break;
        }
    }
    let mut eps = eps.ok_or_else(|| {
        Error::ConsistencyFailure(format!("no idempotent mod {q}: order not split"))
    })?;
    // Hensel: precision doubles each pass
    let target = q.pow(r);
    let mut modulus = q.clone();
    while modulus < target {
        modulus = &modulus * &modulus;
        let sq = mul_coords(&table, &eps, &eps, &modulus);
        let cu = mul_coords(&table, &sq, &eps, &modulus);
        eps = (0..4)
            .map(|k| {
                (Int::from(3) * &sq[k] - Int::from(2) * &cu[k]).mod_floor(&modulus)
            })
            .collect();
    }
    let eps: Vec<Int> = eps.iter().map(|v| v.mod_floor(&target)).collect();
    let comp: Vec<Int> = (0..4).map(|k| (&one[k] - &eps[k]).mod_floor(&target)).collect();
    // rows of m: coordinates of (1-e) b_u e mod q^r
    let mut m = IntMat::zero(8, 4);
    for u in 0..4 {
        let mut bu = vec![Int::zero(); 4];
        bu[u] = Int::one();
        let left = mul_coords(&table, &comp, &bu, &target);
        let full = mul_coords(&table, &left, &eps, &target);
        for k in 0..4 {
            m[(u, k)] = full[k].clone();
        }
    }
    for u in 0..4 {
        m[(4 + u, u)] = target.clone();
    }
    let ker = m.left_kernel();
    if ker.rows != 4 {
        return Err(Error::ConsistencyFailure("split condition kernel is not rank 4".into()));
    }
    let gens: Vec<QuatElement> = (0..4)
        .map(|i| {
            let coords: Vec<Int> = (0..4).map(|u| ker[(i, u)].clone()).collect();
            o.lat.element_from_coords(&coords)
        })
        .collect();
    QLattice::from_generators(&gens)
}

/// Assemble an order of level prod p^r * prod q^e inside a maximal order,
/// from per-prime local data. The reduced discriminant of the result is
/// recomputed and must match the requested level exactly.
pub fn assemble_order(
    alg: &QuatAlgebra,
    max_order: &Order,
    locals: Vec<OrderLocalType>,
    eichler: Vec<(Int, u32)>,
) -> Result<Order> {
    let mut expected = Int::one();
    let mut lat = max_order.lat.clone();
    for lt in &locals {
        expected *= lt.p.pow(lt.r);
        if lt.r >= 2 {
            let omega = lt.omega.as_ref().ok_or_else(|| {
                Error::InvalidArgument(format!("level {} at {} needs a generator", lt.r, lt.p))
            })?;
            let prime_ideal = two_sided_prime(max_order, &lt.p)?;
            let part = special_lattice(alg, omega, &max_order.lat, &prime_ideal, lt.r)?;
            lat = lat.intersect(&part)?;
        }
    }
    for (q, e) in &eichler {
        expected *= q.pow(*e);
        let part = eichler_lattice(max_order, q, *e)?;
        lat = lat.intersect(&part)?;
    }
    if !is_ring(alg, &lat) {
        return Err(Error::ConsistencyFailure("assembled lattice is not a ring".into()));
    }
    let disc = reduced_discriminant(alg, &lat)?;
    if disc != expected {
        return Err(Error::ConsistencyFailure(format!(
            "assembled order has reduced discriminant {disc}, expected {expected}"
        )));
    }
    Ok(Order {
        alg: alg.clone(),
        lat,
        level: expected,
        locals,
        eichler,
        max_lat: max_order.lat.clone(),
    })
}

/// Build an order of level n in the algebra of discriminant d | n. At each
/// prime p | d with p^r || n, the local type defaults to unramified for odd
/// r and ramified for even r; `etype_overrides` can force the ramified type
/// at odd r. Away from d the order is an Eichler intersection.
pub fn build_order(
    alg: &QuatAlgebra,
    n: &Int,
    etype_overrides: &BTreeMap<Int, EType>,
) -> Result<Order> {
    let max_order = Order::maximal(alg)?;
    let nf = factor(n)?;
    for (p, et) in etype_overrides {
        if !alg.is_ramified_at(p) {
            return Err(Error::InvalidArgument(format!(
                "type override at {p}: prime does not divide the discriminant"
            )));
        }
        let r = nf.iter().find(|(q, _)| q == p).map(|(_, e)| *e).unwrap_or(0);
        if *et == EType::Unramified && r % 2 == 0 {
            return Err(Error::InvalidArgument(format!(
                "unramified type at {p} needs an odd level exponent, got {r}"
            )));
        }
    }
    let mut locals = Vec::new();
    let mut eichler = Vec::new();
    for (p, e) in nf {
        if alg.is_ramified_at(&p) {
            let etype = etype_overrides.get(&p).copied().unwrap_or(if e % 2 == 1 {
                EType::Unramified
            } else {
                EType::Ramified
            });
            let (omega, e_disc) = if e >= 2 {
                match etype {
                    EType::Unramified => {
                        let (w, d) = find_unramified_generator(&max_order, &p)?;
                        (Some(w), Some(d))
                    }
                    EType::Ramified => {
                        let prime_ideal = two_sided_prime(&max_order, &p)?;
                        let (w, d) = find_ramified_generator(&max_order, &p, &prime_ideal)?;
                        (Some(w), Some(d))
                    }
                }
            } else {
                (None, None)
            };
            locals.push(OrderLocalType { p, r: e, etype, omega, e_disc });
        } else {
            eichler.push((p, e));
        }
    }
    for p in &alg.ramified {
        if !locals.iter().any(|lt| &lt.p == p) {
            return Err(Error::InvalidArgument(format!(
                "level {n} is not divisible by the ramified prime {p}"
            )));
        }
    }
    assemble_order(alg, &max_order, locals, eichler)
}

impl Order {
    /// Fundamental discriminants d of the nontrivial quadratic characters
    /// kronecker(d, .) that are trivial on the reduced norms of the local
    /// unit groups of this order. Such a character is ramified only at
    /// primes where the order has ramified type; at odd p that needs level
    /// exponent >= 2, at p = 2 the exponent must be at least twice the
    /// conductor exponent and the character must agree with the one cut out
    /// by the quadratic generator on the units 3, 5, 7 mod 8.
    pub fn norm_characters(&self) -> Result<Vec<Int>> {
        let mut odd_parts: Vec<Int> = Vec::new();
        let mut dyadic_parts: Vec<Int> = Vec::new();
        for lt in &self.locals {
            if lt.etype != EType::Ramified || lt.r < 2 {
                continue;
            }
            if lt.p == Int::from(2) {
                let e_disc = lt.e_disc.clone().ok_or_else(|| {
                    Error::ConsistencyFailure("ramified type without generator".into())
                })?;
                for (d2, rmin) in [(-4i64, 4u32), (8, 6), (-8, 6)] {
                    if lt.r < rmin {
                        continue;
                    }
                    let mut compatible = true;
                    for u in [3i64, 5, 7] {
                        let u = Rat::from(Int::from(u));
                        let is_norm = hilbert_symbol(
                            &u,
                            &Rat::from(e_disc.clone()),
                            &Place::Prime(Int::from(2)),
                        )? == 1;
                        let char_val = hilbert_symbol(
                            &u,
                            &Rat::from(Int::from(d2)),
                            &Place::Prime(Int::from(2)),
                        )?;
                        if is_norm && char_val != 1 {
                            compatible = false;
                            break;
                        }
                    }
                    if compatible {
                        dyadic_parts.push(Int::from(d2));
                    }
                }
            } else {
                // p odd: the ramified character is p* = (-1)^((p-1)/2) p,
                // whose restriction to units matches any ramified quadratic
                let p_star = if (&lt.p % Int::from(4)) == Int::from(1) {
                    lt.p.clone()
                } else {
                    -lt.p.clone()
                };
                odd_parts.push(p_star);
            }
        }
        let mut out: Vec<Int> = Vec::new();
        let subsets = 1usize << odd_parts.len();
        for mask in 0..subsets {
            let mut d = Int::one();
            for (i, part) in odd_parts.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    d *= part;
                }
            }
            if mask != 0 {
                out.push(d.clone());
            }
            for d2 in &dyadic_parts {
                out.push(&d * d2);
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }
}

/// A level dividing the order's level, with inherited local data and the
/// number of copies of that level sitting above the order.
#[derive(Debug, Clone)]
pub struct SuperorderLevel {
    pub level: Int,
    pub multiplicity: usize,
    pub locals: Vec<OrderLocalType>,
    pub eichler: Vec<(Int, u32)>,
}

impl Order {
    /// Rebuild an order of smaller level from this order's local data,
    /// keeping the same quadratic generators at the ramified primes.
    pub fn at_level(&self, s: &SuperorderLevel) -> Result<Order> {
        let ambient = Order::from_lattice(&self.alg, self.max_lat.clone())?;
        assemble_order(&self.alg, &ambient, s.locals.clone(), s.eichler.clone())
    }

    /// All levels of orders containing this one with compatible local data:
    /// at a ramified prime the exponent drops through odd values for the
    /// unramified type and through every value for the ramified type; at an
    /// Eichler prime q^e the exponent drops to any e' <= e with e - e' + 1
    /// containments. Sorted by level, largest first.
    pub fn superorder_levels(&self) -> Vec<SuperorderLevel> {
        let mut per_prime: Vec<Vec<(OrderLocalType, usize)>> = Vec::new();
        for lt in &self.locals {
            let choices: Vec<u32> = match lt.etype {
                EType::Unramified => (1..=lt.r).filter(|x| x % 2 == 1).collect(),
                EType::Ramified => (1..=lt.r).collect(),
            };
            per_prime.push(
                choices
                    .into_iter()
                    .map(|r| {
                        let mut inherited = lt.clone();
                        inherited.r = r;
                        if r == 1 {
                            inherited.etype = EType::Unramified;
                            inherited.omega = None;
                            inherited.e_disc = None;
                        }
                        (inherited, 1usize)
                    })
                    .collect(),
            );
        }
        let mut eichler_choices: Vec<Vec<(Option<(Int, u32)>, usize)>> = Vec::new();
        for (q, e) in &self.eichler {
            let mut v: Vec<(Option<(Int, u32)>, usize)> = Vec::new();
            for ep in 0..=*e {
                let mult = (*e - ep + 1) as usize;
                if ep == 0 {
                    v.push((None, mult));
                } else {
                    v.push((Some((q.clone(), ep)), mult));
                }
            }
            eichler_choices.push(v);
        }
        let mut out = vec![SuperorderLevel {
            level: Int::one(),
            multiplicity: 1,
            locals: Vec::new(),
            eichler: Vec::new(),
        }];
        for choices in &per_prime {
            let mut next = Vec::new();
            for base in &out {
                for (lt, m) in choices {
                    let mut s = base.clone();
                    s.level *= lt.p.pow(lt.r);
                    s.multiplicity *= m;
                    s.locals.push(lt.clone());
                    next.push(s);
                }
            }
            out = next;
        }
        for choices in &eichler_choices {
            let mut next = Vec::new();
            for base in &out {
                for (qe, m) in choices {
                    let mut s = base.clone();
                    s.multiplicity *= m;
                    if let Some((q, e)) = qe {
                        s.level *= q.pow(*e);
                        s.eichler.push((q.clone(), *e));
                    }
                    next.push(s);
                }
            }
            out = next;
        }
        out.sort_by(|a, b| b.level.cmp(&a.level));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::construct_definite;
    use crate::{int, rat};

    fn maximal_for(d: i64) -> Order {
        let alg = construct_definite(&int(d)).unwrap();
        Order::maximal(&alg).unwrap()
    }

    #[test]
    fn lattice_roundtrip_and_membership() {
        let l = QLattice::standard();
        assert!(l.contains(&QuatElement::one()));
        assert!(l.contains(&QuatElement::from_ints([3, -2, 7, 0])));
        assert!(!l.contains(&QuatElement::new([rat(1, 2), rat(0, 1), rat(0, 1), rat(0, 1)])));
        let half = l.scale(&rat(1, 2));
        assert!(half.contains(&QuatElement::new([rat(1, 2), rat(0, 1), rat(0, 1), rat(0, 1)])));
        assert_eq!(half.index_in(&l).err().is_some(), true);
        assert_eq!(l.index_in(&half).unwrap(), int(16));
    }

    #[test]
    fn lattice_sum_intersection_duality() {
        let a = QLattice::standard().scale(&rat(2, 1));
        let b = QLattice::standard().scale(&rat(3, 1));
        let sum = a.add_lattice(&b).unwrap();
        assert_eq!(sum, QLattice::standard());
        let meet = a.intersect(&b).unwrap();
        assert_eq!(meet, QLattice::standard().scale(&rat(6, 1)));
    }

    #[test]
    fn hurwitz_order_at_discriminant_two() {
        let o = maximal_for(2);
        assert_eq!(o.level, int(2));
        let half = QuatElement::new([rat(1, 2), rat(1, 2), rat(1, 2), rat(1, 2)]);
        assert!(o.lat.contains(&half));
        assert_eq!(QLattice::standard().index_in(&o.lat).unwrap(), int(2));
    }

    #[test]
    fn maximal_orders_have_the_algebra_discriminant() {
        for d in [2i64, 3, 5, 7, 11, 13, 17, 30] {
            let o = maximal_for(d);
            assert_eq!(o.level, int(d), "d={d}");
            assert!(is_ring(&o.alg, &o.lat));
            assert_eq!(o.lat.conj_lattice(&o.alg), o.lat, "stable under conjugation");
        }
    }

    #[test]
    fn two_sided_prime_squares_to_p() {
        for d in [2i64, 3, 11] {
            let o = maximal_for(d);
            let p = int(d);
            let ideal = two_sided_prime(&o, &p).unwrap();
            assert!(o.lat.contains_lattice(&ideal));
            assert_eq!(ideal.index_in(&o.lat).unwrap(), &p * &p);
            let sq = ideal.mul_lattice(&o.alg, &ideal).unwrap();
            assert_eq!(sq, o.lat.scale(&rat(d, 1)));
            assert_eq!(ideal.conj_lattice(&o.alg), ideal);
        }
    }

    #[test]
    fn two_sided_prime_rejects_split_primes() {
        let o = maximal_for(11);
        assert!(two_sided_prime(&o, &int(2)).is_err());
    }

    #[test]
    fn special_order_level_grows_with_exponent() {
        let alg = construct_definite(&int(11)).unwrap();
        let none = BTreeMap::new();
        for (n, r) in [(121i64, 2u32), (1331, 3)] {
            let o = build_order(&alg, &int(n), &none).unwrap();
            assert_eq!(o.level, int(n));
            assert_eq!(o.locals.len(), 1);
            assert_eq!(o.locals[0].r, r);
            let idx = o.lat.index_in(&o.max_lat).unwrap();
            assert_eq!(idx, int(11).pow(r - 1), "index p^(r-1) under the maximal order");
        }
    }

    #[test]
    fn special_order_types_follow_parity() {
        let alg = construct_definite(&int(11)).unwrap();
        let none = BTreeMap::new();
        let o2 = build_order(&alg, &int(121), &none).unwrap();
        assert_eq!(o2.locals[0].etype, EType::Ramified);
        let o3 = build_order(&alg, &int(1331), &none).unwrap();
        assert_eq!(o3.locals[0].etype, EType::Unramified);
        // forcing the unramified type at an even exponent is rejected
        let mut force = BTreeMap::new();
        force.insert(int(11), EType::Unramified);
        assert!(build_order(&alg, &int(121), &force).is_err());
        // ramified type at an odd exponent is allowed
        let mut force = BTreeMap::new();
        force.insert(int(11), EType::Ramified);
        let o3r = build_order(&alg, &int(1331), &force).unwrap();
        assert_eq!(o3r.level, int(1331));
        assert_ne!(o3r.lat, o3.lat);
    }

    #[test]
    fn level_two_special_order_is_type_independent() {
        // Z + Z omega + P gives the same lattice for every uniformizer
        let alg = construct_definite(&int(11)).unwrap();
        let p = int(11);
        let first = special_lattice_chain(&alg, &p, EType::Ramified, 2, false).unwrap();
        let second = special_lattice_chain(&alg, &p, EType::Ramified, 2, true).unwrap();
        assert_eq!(first[1], second[1]);
    }

    #[test]
    fn eichler_orders_have_expected_levels() {
        let alg = construct_definite(&int(11)).unwrap();
        let none = BTreeMap::new();
        for n in [22i64, 33, 44, 55] {
            let o = build_order(&alg, &int(n), &none).unwrap();
            assert_eq!(o.level, int(n), "n={n}");
            assert!(is_ring(&o.alg, &o.lat));
        }
        let o = build_order(&alg, &int(44), &none).unwrap();
        assert_eq!(o.eichler, vec![(int(2), 2)]);
    }

    #[test]
    fn build_order_requires_discriminant_divides_level() {
        let alg = construct_definite(&int(11)).unwrap();
        let none = BTreeMap::new();
        assert!(build_order(&alg, &int(7), &none).is_err());
        assert!(build_order(&alg, &int(2), &none).is_err());
    }

    #[test]
    fn superorder_levels_for_a_ramified_square() {
        let alg = construct_definite(&int(11)).unwrap();
        let none = BTreeMap::new();
        let o = build_order(&alg, &int(121), &none).unwrap();
        let levels = o.superorder_levels();
        let got: Vec<(i64, usize)> = levels
            .iter()
            .map(|s| (s.level.to_string().parse().unwrap(), s.multiplicity))
            .collect();
        assert_eq!(got, vec![(121, 1), (11, 1)]);
        // rebuilding at the smaller level recovers the maximal order
        let smaller = o.at_level(&levels[1]).unwrap();
        assert_eq!(smaller.lat, o.max_lat);
    }

    #[test]
    fn superorder_levels_for_an_eichler_prime() {
        let alg = construct_definite(&int(11)).unwrap();
        let none = BTreeMap::new();
        let o = build_order(&alg, &int(44), &none).unwrap();
        let got: Vec<(i64, usize)> = o
            .superorder_levels()
            .iter()
            .map(|s| (s.level.to_string().parse().unwrap(), s.multiplicity))
            .collect();
        assert_eq!(got, vec![(44, 1), (22, 2), (11, 3)]);
        let o3 = build_order(&alg, &int(1331), &none).unwrap();
        let got: Vec<(i64, usize)> = o3
            .superorder_levels()
            .iter()
            .map(|s| (s.level.to_string().parse().unwrap(), s.multiplicity))
            .collect();
        assert_eq!(got, vec![(1331, 1), (11, 1)], "unramified type skips even exponents");
    }

    #[test]
    fn norm_characters_detect_ramified_square_levels() {
        let none = BTreeMap::new();
        let alg = construct_definite(&int(11)).unwrap();
        let o = build_order(&alg, &int(121), &none).unwrap();
        assert_eq!(o.norm_characters().unwrap(), vec![int(-11)]);
        let o = build_order(&alg, &int(11), &none).unwrap();
        assert!(o.norm_characters().unwrap().is_empty());
        let o = build_order(&alg, &int(22), &none).unwrap();
        assert!(o.norm_characters().unwrap().is_empty());
        let o = build_order(&alg, &int(1331), &none).unwrap();
        assert!(o.norm_characters().unwrap().is_empty(), "unramified type has full norms");
        let alg5 = construct_definite(&int(5)).unwrap();
        let o = build_order(&alg5, &int(25), &none).unwrap();
        assert_eq!(o.norm_characters().unwrap(), vec![int(5)]);
    }

    #[test]
    fn towers_reuse_the_quadratic_generator() {
        let alg = construct_definite(&int(7)).unwrap();
        let none = BTreeMap::new();
        let o = build_order(&alg, &int(343), &none).unwrap();
        let levels = o.superorder_levels();
        for s in &levels {
            if s.level == int(343) {
                assert_eq!(s.locals[0].omega, o.locals[0].omega);
            }
            let rebuilt = o.at_level(s).unwrap();
            assert_eq!(rebuilt.level, s.level);
        }
    }
}
