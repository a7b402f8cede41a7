//! Right ideals of a quaternion order and the enumeration of their
//! equivalence classes.
//!
//! Classes are found by a breadth-first walk on the graph of q-neighbours.
//! One prime does not always suffice: the components of the single-prime
//! graph are separated exactly by the quadratic characters trivial on the
//! local norm groups of the order, so the walk uses a set of primes chosen
//! to make every such character take the value -1 somewhere. For orders
//! that are Eichler away from nothing (all local exponents 1 at the
//! ramified primes) the weighted class count is checked against the mass
//! formula, turning termination into a hard certificate.

use crate::arith::kronecker;
use crate::error::{Error, Result};
use crate::lattice::{attains_value, short_vectors};
use crate::order::{Order, QLattice};
use crate::quat::QuatAlgebra;
use crate::{Int, Rat};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// A right ideal of a fixed order, with its reduced norm cached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RightIdeal {
    pub lat: QLattice,
    pub norm: Rat,
}

fn rat_gcd(a: &Rat, b: &Rat) -> Rat {
    if a.is_zero() {
        return b.abs();
    }
    if b.is_zero() {
        return a.abs();
    }
    let num = (a.numer() * b.denom()).gcd(&(b.numer() * a.denom()));
    Rat::new(num, a.denom() * b.denom())
}

/// Reduced norm of a lattice: the positive generator of the fractional
/// ideal spanned by the norms of its elements.
pub fn lattice_norm(alg: &QuatAlgebra, lat: &QLattice) -> Rat {
    let g = lat.pairing_matrix(alg);
    let mut out = Rat::zero();
    for i in 0..4 {
        out = rat_gcd(&out, &g[(i, i)]);
        for j in 0..i {
            out = rat_gcd(&out, &(&g[(i, j)] + &g[(i, j)]));
        }
    }
    out
}

impl RightIdeal {
    /// The order itself as the unit ideal.
    pub fn unit_ideal(o: &Order) -> RightIdeal {
        RightIdeal { lat: o.lat.clone(), norm: Rat::one() }
    }

    /// Wrap a lattice after checking it is stable under right
    /// multiplication by the order.
    pub fn new(o: &Order, lat: QLattice) -> Result<RightIdeal> {
        for b in lat.basis_elements() {
            for x in o.lat.basis_elements() {
                if !lat.contains(&o.alg.mul(&b, &x)) {
                    return Err(Error::InvalidArgument(
                        "lattice is not a right ideal of the order".into(),
                    ));
                }
            }
        }
        let norm = lattice_norm(&o.alg, &lat);
        Ok(RightIdeal { lat, norm })
    }

    /// Rescale so that the coordinate matrix with respect to the order
    /// basis is integral and primitive.
    pub fn primitive(&self, o: &Order) -> RightIdeal {
        let mut den = Int::one();
        let mut coords: Vec<Vec<Rat>> = Vec::new();
        for b in self.lat.basis_elements() {
            // rational coordinates in the order basis
            let d = Rat::from(o.lat.den.clone());
            let mut w: Vec<Rat> = b.c.iter().map(|c| c * &d).collect();
            let mut row = vec![Rat::zero(); 4];
            for j in 0..4 {
                let mut v = w[j].clone();
                for (i, ci) in row.iter().enumerate().take(j) {
                    v -= ci * &Rat::from(o.lat.basis[(i, j)].clone());
                }
                row[j] = v / Rat::from(o.lat.basis[(j, j)].clone());
                w[j] = Rat::zero();
            }
            for r in &row {
                den = den.lcm(r.denom());
            }
            coords.push(row);
        }
        let mut content = Int::zero();
        for row in &coords {
            for r in row {
                let scaled = r * Rat::from(den.clone());
                content = content.gcd(&scaled.to_integer());
            }
        }
        let factor = Rat::new(den, content);
        if factor.is_one() {
            return self.clone();
        }
        let lat = self.lat.scale(&factor);
        let norm = &self.norm * &factor * &factor;
        RightIdeal { lat, norm }
    }
}

/// Left order {x : x I contained in I} of a locally principal ideal,
/// computed as I conj(I) / norm(I).
pub fn left_order(alg: &QuatAlgebra, ideal: &RightIdeal) -> Result<QLattice> {
    let prod = ideal.lat.mul_lattice(alg, &ideal.lat.conj_lattice(alg))?;
    Ok(prod.scale(&ideal.norm.clone().recip()))
}

/// Number of units modulo +-1 of the order with the given lattice: pairs
/// of lattice vectors of reduced norm 1.
pub fn unit_half_count(alg: &QuatAlgebra, lat: &QLattice) -> Result<Int> {
    let g = lat.norm_gram(alg)?;
    let sv = short_vectors(&g, &Rat::one())?;
    let n = sv.counts.get(&Rat::one()).copied().unwrap_or(0);
    Ok(Int::from(n))
}

/// The q+1 neighbours of an ideal at a prime q coprime to the level:
/// sublattices J with qI < J < I of index q^2 that are right ideals.
pub fn q_neighbors(o: &Order, ideal: &RightIdeal, q: &Int) -> Result<Vec<RightIdeal>> {
    if (&o.level % q).is_zero() {
        return Err(Error::InvalidArgument(format!(
            "neighbour prime {q} divides the level"
        )));
    }
    let qu: u64 = q
        .to_string()
        .parse()
        .map_err(|_| Error::Unsupported("neighbour prime too large".into()))?;
    let b = ideal.lat.basis_elements();
    let ob = o.lat.basis_elements();
    let qrat = Rat::from(q.clone());
    let scaled: Vec<_> = b.iter().map(|x| x.scale(&qrat)).collect();
    let q2 = q * q;
    let mut out: Vec<RightIdeal> = Vec::new();
    // canonical line representatives: first nonzero coordinate is 1
    let mut c = [0u64; 4];
    'scan: loop {
        if !crate::order::next_coord_vec(&mut c, qu) {
            break;
        }
        let first = c.iter().position(|&v| v != 0);
        let Some(first) = first else { continue };
        if c[first] != 1 {
            continue;
        }
        let mut x = crate::quat::QuatElement::zero();
        for (i, &ci) in c.iter().enumerate() {
            if ci != 0 {
                x = x.add(&b[i].scale(&Rat::from(Int::from(ci))));
            }
        }
        let mut gens = scaled.clone();
        for y in &ob {
            gens.push(o.alg.mul(&x, y));
        }
        let cand = QLattice::from_generators(&gens)?;
        if cand.index_in(&ideal.lat)? != q2 {
            continue;
        }
        for seen in &out {
            if seen.lat == cand {
                continue 'scan;
            }
        }
        let norm = lattice_norm(&o.alg, &cand);
        debug_assert_eq!(norm, &ideal.norm * Rat::from(q.clone()));
        out.push(RightIdeal { lat: cand, norm });
    }
    let expected = q + Int::one();
    if Int::from(out.len()) != expected {
        return Err(Error::ConsistencyFailure(format!(
            "found {} neighbours at {q}, expected {expected}",
            out.len()
        )));
    }
    Ok(out)
}

/// Whether two right ideals of the same order are equivalent: the norm
/// form on I conj(J) attains its theoretical minimum norm(I) norm(J).
pub fn is_equivalent(alg: &QuatAlgebra, a: &RightIdeal, b: &RightIdeal) -> Result<bool> {
    let prod = a.lat.mul_lattice(alg, &b.lat.conj_lattice(alg))?;
    let g = prod.norm_gram(alg)?;
    attains_value(&g, &(&a.norm * &b.norm))
}

/// Replace an ideal by a small-norm representative of its class: divide on
/// the left by a shortest vector.
fn reduce_class_rep(o: &Order, ideal: &RightIdeal) -> Result<RightIdeal> {
    let g = ideal.lat.norm_gram(&o.alg)?;
    let mut bound = ideal.norm.clone();
    let gamma = loop {
        let sv = short_vectors(&g, &bound)?;
        if let Some((coords, _)) = sv.vectors.iter().min_by_key(|(_, v)| v.clone()) {
            break ideal.lat.element_from_coords(coords);
        }
        bound = &bound + &ideal.norm;
    };
    let gbar = o.alg.conj(&gamma);
    let gens: Vec<_> = ideal
        .lat
        .basis_elements()
        .iter()
        .map(|x| o.alg.mul(&gbar, x).scale(&ideal.norm.clone().recip()))
        .collect();
    let lat = QLattice::from_generators(&gens)?;
    let reduced = RightIdeal { norm: lattice_norm(&o.alg, &lat), lat };
    Ok(reduced.primitive(o))
}

/// Mass of an Eichler order of level prod q^e in the algebra of squarefree
/// discriminant d: (1/12) prod_{p | d} (p - 1) prod q^(e-1) (q + 1).
pub fn mass_eichler(d: &Int, eichler: &[(Int, u32)]) -> Result<Rat> {
    let mut mass = Rat::new(Int::one(), Int::from(12));
    for (p, _) in crate::arith::factor(d)? {
        mass *= Rat::from(&p - Int::one());
    }
    for (q, e) in eichler {
        mass *= Rat::from(q.pow(e - 1) * (q + Int::one()));
    }
    Ok(mass)
}

#[derive(Debug, Clone)]
pub struct ClassSetOptions {
    /// Hard cap on the number of classes explored.
    pub max_classes: usize,
    /// Walk one extra prime beyond the certified connecting set.
    pub extra_sweep: bool,
}

impl Default for ClassSetOptions {
    fn default() -> Self {
        ClassSetOptions { max_classes: 2000, extra_sweep: false }
    }
}

/// The right ideal class set of an order: representatives (the first being
/// the order itself), the unit count of each left order modulo sign, the
/// primes used for the walk, and the weighted mass.
#[derive(Debug, Clone)]
pub struct ClassSet {
    pub order: Order,
    pub reps: Vec<RightIdeal>,
    pub unit_halves: Vec<Int>,
    pub neighbor_primes: Vec<Int>,
    pub mass: Rat,
}

impl ClassSet {
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }
}

/// Primes q coprime to the level such that every nontrivial norm character
/// of the order takes the value -1 at some q: neighbour moves at these
/// primes connect the whole class set.
fn connecting_primes(o: &Order) -> Result<Vec<Int>> {
    let mut primes = vec![crate::arith::smallest_coprime_prime(&o.level)];
    for d in o.norm_characters()? {
        if primes.iter().any(|q| kronecker(&d, q) == -1) {
            continue;
        }
        let mut q = Int::from(2);
        loop {
            if crate::arith::is_prime(&q)
                && !(&o.level % &q).is_zero()
                && kronecker(&d, &q) == -1
            {
                break;
            }
            q += 1;
        }
        if !primes.contains(&q) {
            primes.push(q);
        }
    }
    primes.sort();
    Ok(primes)
}

/// Enumerate the right ideal classes of an order by walking q-neighbours
/// over a certified connecting set of primes.
pub fn class_set(o: &Order, opts: &ClassSetOptions) -> Result<ClassSet> {
    let mut primes = connecting_primes(o)?;
    if opts.extra_sweep {
        let mut q = primes.last().unwrap().clone() + 1;
        loop {
            if crate::arith::is_prime(&q) && !(&o.level % &q).is_zero() && !primes.contains(&q)
            {
                primes.push(q);
                break;
            }
            q += 1;
        }
    }
    let mut reps = vec![RightIdeal::unit_ideal(o)];
    let mut frontier = vec![0usize];
    while let Some(idx) = frontier.pop() {
        let current = reps[idx].clone();
        for q in &primes {
            for neighbor in q_neighbors(o, &current, q)? {
                let cand = reduce_class_rep(o, &neighbor)?;
                let mut known = false;
                for seen in &reps {
                    if is_equivalent(&o.alg, seen, &cand)? {
                        known = true;
                        break;
                    }
                }
                if !known {
                    if reps.len() >= opts.max_classes {
                        return Err(Error::BudgetExceeded {
                            context: "class set enumeration",
                            limit: opts.max_classes,
                        });
                    }
                    reps.push(cand);
                    frontier.push(reps.len() - 1);
                }
            }
        }
    }
    let mut unit_halves = Vec::with_capacity(reps.len());
    let mut mass = Rat::zero();
    for ideal in &reps {
        let lo = left_order(&o.alg, ideal)?;
        let e = unit_half_count(&o.alg, &lo)?;
        mass += Rat::from(e.clone()).recip();
        unit_halves.push(e);
    }
    let is_eichler_type = o.locals.iter().all(|lt| lt.r == 1);
    if is_eichler_type {
        let expected = mass_eichler(&o.alg.disc, &o.eichler)?;
        if mass != expected {
            return Err(Error::MassMismatch {
                expected: expected.to_string(),
                got: mass.to_string(),
            });
        }
    }
    Ok(ClassSet { order: o.clone(), reps, unit_halves, neighbor_primes: primes, mass })
}
