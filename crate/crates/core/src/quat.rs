//! Definite quaternion algebras (a,b | Q): element arithmetic and
//! construction of an algebra with prescribed ramification.
//!
//! An algebra is presented by rationals a, b < 0 with basis 1, i, j, k,
//! i^2 = a, j^2 = b, k = ij = -ji. The discriminant is the product of the
//! finite ramified primes; definiteness means the infinite place ramifies.

use crate::arith::{factor, hilbert_symbol, is_prime, kronecker, Place};
use crate::error::{Error, Result};
use crate::{Int, Rat};
use num_traits::{One, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuatAlgebra {
    pub a: Rat,
    pub b: Rat,
    /// Product of the finite ramified primes.
    pub disc: Int,
    pub ramified: Vec<Int>,
}

/// Element x + y i + z j + w k with rational coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuatElement {
    pub c: [Rat; 4],
}

impl QuatElement {
    pub fn new(c: [Rat; 4]) -> Self {
        QuatElement { c }
    }

    pub fn zero() -> Self {
        QuatElement { c: [Rat::zero(), Rat::zero(), Rat::zero(), Rat::zero()] }
    }

    pub fn one() -> Self {
        QuatElement { c: [Rat::one(), Rat::zero(), Rat::zero(), Rat::zero()] }
    }

    pub fn from_ints(c: [i64; 4]) -> Self {
        QuatElement { c: c.map(|x| Rat::from(Int::from(x))) }
    }

    pub fn add(&self, other: &QuatElement) -> QuatElement {
        let mut c = self.c.clone();
        for (x, y) in c.iter_mut().zip(&other.c) {
            *x += y;
        }
        QuatElement { c }
    }

    pub fn sub(&self, other: &QuatElement) -> QuatElement {
        let mut c = self.c.clone();
        for (x, y) in c.iter_mut().zip(&other.c) {
            *x -= y;
        }
        QuatElement { c }
    }

    pub fn scale(&self, r: &Rat) -> QuatElement {
        QuatElement { c: self.c.clone().map(|x| x * r) }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }
}

impl QuatAlgebra {
    /// Multiplication in the basis 1, i, j, k with k = ij:
    /// ij = k, ji = -k, ik = aj, ki = -aj, jk = -bi, kj = bi, k^2 = -ab.
    pub fn mul(&self, x: &QuatElement, y: &QuatElement) -> QuatElement {
        let (a, b) = (&self.a, &self.b);
        let ab = a * b;
        let [x0, x1, x2, x3] = &x.c;
        let [y0, y1, y2, y3] = &y.c;
        let c0 = x0 * y0 + a * (x1 * y1) + b * (x2 * y2) - &ab * (x3 * y3);
        let c1 = x0 * y1 + x1 * y0 - b * (x2 * y3) + b * (x3 * y2);
        let c2 = x0 * y2 + x2 * y0 + a * (x1 * y3) - a * (x3 * y1);
        let c3 = x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1;
        QuatElement { c: [c0, c1, c2, c3] }
    }

    pub fn conj(&self, x: &QuatElement) -> QuatElement {
        let [x0, x1, x2, x3] = &x.c;
        QuatElement { c: [x0.clone(), -x1.clone(), -x2.clone(), -x3.clone()] }
    }

    /// Reduced trace x + conj(x).
    pub fn trace(&self, x: &QuatElement) -> Rat {
        &x.c[0] + &x.c[0]
    }

    /// Reduced norm x * conj(x) = x0^2 - a x1^2 - b x2^2 + ab x3^2,
    /// positive definite for a, b < 0.
    pub fn norm(&self, x: &QuatElement) -> Rat {
        let (a, b) = (&self.a, &self.b);
        let [x0, x1, x2, x3] = &x.c;
        x0 * x0 - a * (x1 * x1) - b * (x2 * x2) + a * b * (x3 * x3)
    }

    /// Inverse of a nonzero element: conj(x)/N(x).
    pub fn inverse(&self, x: &QuatElement) -> Result<QuatElement> {
        let n = self.norm(x);
        if n.is_zero() {
            return Err(Error::InvalidArgument("inverse of zero".into()));
        }
        Ok(self.conj(x).scale(&n.recip()))
    }

    /// Symmetric bilinear form (N(x+y) - N(x) - N(y))/2 = tr(x conj(y))/2.
    pub fn pairing(&self, x: &QuatElement, y: &QuatElement) -> Rat {
        let t = self.mul(x, &self.conj(y));
        t.c[0].clone()
    }

    pub fn is_ramified_at(&self, p: &Int) -> bool {
        self.ramified.contains(p)
    }
}

fn validate_disc(d: &Int) -> Result<Vec<Int>> {
    if d < &Int::from(2) {
        return Err(Error::InvalidDiscriminant(d.to_string()));
    }
    let f = factor(d)?;
    if f.iter().any(|(_, e)| *e > 1) || f.len() % 2 == 0 {
        return Err(Error::InvalidDiscriminant(d.to_string()));
    }
    Ok(f.into_iter().map(|(p, _)| p).collect())
}

/// Ramified finite places of (−na, −nb), for positive integers na, nb.
fn finite_ramification(na: &Int, nb: &Int) -> Result<Vec<Int>> {
    let a = Rat::from(-na.clone());
    let b = Rat::from(-nb.clone());
    let mut supp: Vec<Int> = vec![Int::from(2)];
    for (p, _) in factor(&(na * nb))? {
        if !supp.contains(&p) {
            supp.push(p);
        }
    }
    supp.sort();
    let mut ram = Vec::new();
    for p in supp {
        if hilbert_symbol(&a, &b, &Place::Prime(p.clone()))? == -1 {
            ram.push(p);
        }
    }
    Ok(ram)
}

/// Construct the definite quaternion algebra over Q ramified exactly at the
/// primes dividing d (and infinity). d must be a squarefree product of an
/// odd number of primes. Prime discriminants use fixed presentations;
/// composite ones fall back to a bounded deterministic search. The returned
/// presentation is verified by Hilbert symbols in every case.
pub fn construct_definite(d: &Int) -> Result<QuatAlgebra> {
    let ram_target = validate_disc(d)?;
    let pick = |na: i64, nb: i64| (Int::from(na), Int::from(nb));
    let (na, nb) = if ram_target.len() == 1 {
        let p = &ram_target[0];
        if p == &Int::from(2) {
            pick(1, 1)
        } else if p % 4 == Int::from(3) {
            (Int::one(), p.clone())
        } else if p % 8 == Int::from(5) {
            (Int::from(2), p.clone())
        } else {
            // p = 1 mod 8: pair with an auxiliary prime q = 3 mod 4,
            // (p|q) = -1
            let mut q = Int::from(3);
            loop {
                if is_prime(&q) && &q % 4 == Int::from(3) && kronecker(p, &q) == -1 {
                    break;
                }
                q += 2;
            }
            (p.clone(), q)
        }
    } else {
        let mut found = None;
        'outer: for total in 2i64..=4000 {
            for na in 1..total {
                let nb = total - na;
                let (ia, ib) = (Int::from(na), Int::from(nb));
                if finite_ramification(&ia, &ib)? == ram_target {
                    found = Some((ia, ib));
                    break 'outer;
                }
            }
        }
        found.ok_or_else(|| {
            Error::BudgetExceeded { context: "definite algebra search", limit: 4000 }
        })?
    };
    let got = finite_ramification(&na, &nb)?;
    if got != ram_target {
        return Err(Error::ConsistencyFailure(format!(
            "presentation (-{na},-{nb}) ramifies at {got:?}, wanted {ram_target:?}"
        )));
    }
    Ok(QuatAlgebra {
        a: Rat::from(-na),
        b: Rat::from(-nb),
        disc: d.clone(),
        ramified: ram_target,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{int, rat};

    fn sample_elements() -> Vec<QuatElement> {
        vec![
            QuatElement::from_ints([1, 0, 0, 0]),
            QuatElement::from_ints([0, 1, 0, 0]),
            QuatElement::from_ints([0, 0, 1, 0]),
            QuatElement::from_ints([0, 0, 0, 1]),
            QuatElement::from_ints([1, 2, -1, 3]),
            QuatElement::from_ints([-2, 0, 5, 1]),
            QuatElement::new([rat(1, 2), rat(1, 2), rat(1, 2), rat(1, 2)]),
            QuatElement::new([rat(-1, 3), rat(2, 1), rat(0, 1), rat(5, 2)]),
        ]
    }

    #[test]
    fn construct_prime_discriminants() {
        for (d, ea, eb) in [
            (2i64, -1i64, -1i64),
            (3, -1, -3),
            (7, -1, -7),
            (11, -1, -11),
            (5, -2, -5),
            (13, -2, -13),
        ] {
            let alg = construct_definite(&int(d)).unwrap();
            assert_eq!(alg.a, rat(ea, 1));
            assert_eq!(alg.b, rat(eb, 1));
            assert_eq!(alg.disc, int(d));
        }
        // 17 = 1 mod 8 pairs with an auxiliary prime
        let alg = construct_definite(&int(17)).unwrap();
        assert_eq!(alg.a, rat(-17, 1));
        assert!(alg.b < rat(0, 1));
        assert_eq!(alg.ramified, vec![int(17)]);
    }

    #[test]
    fn construct_composite_discriminant() {
        let alg = construct_definite(&int(30)).unwrap();
        assert_eq!(alg.ramified, vec![int(2), int(3), int(5)]);
        assert!(alg.a < rat(0, 1) && alg.b < rat(0, 1));
    }

    #[test]
    fn construct_rejects_invalid_discriminants() {
        for d in [-2i64, 0, 1, 4, 6, 9, 15, 12] {
            assert!(construct_definite(&int(d)).is_err(), "d={d}");
        }
    }

    #[test]
    fn ramification_verified_by_hilbert_symbols() {
        for d in [2i64, 3, 5, 7, 11, 13, 30, 42] {
            let alg = construct_definite(&int(d)).unwrap();
            for p in [2i64, 3, 5, 7, 11, 13, 17] {
                let expected = int(d) % int(p) == int(0);
                let sym =
                    hilbert_symbol(&alg.a, &alg.b, &Place::Prime(int(p))).unwrap();
                assert_eq!(sym == -1, expected, "d={d} p={p}");
            }
            assert_eq!(
                hilbert_symbol(&alg.a, &alg.b, &Place::Infinity).unwrap(),
                -1,
                "definite at infinity"
            );
        }
    }

    #[test]
    fn norm_is_multiplicative_and_conj_antihomomorphic() {
        let alg = construct_definite(&int(11)).unwrap();
        let els = sample_elements();
        for x in &els {
            for y in &els {
                let xy = alg.mul(x, y);
                assert_eq!(alg.norm(&xy), alg.norm(x) * alg.norm(y));
                assert_eq!(alg.conj(&xy), alg.mul(&alg.conj(y), &alg.conj(x)));
            }
        }
    }

    #[test]
    fn mul_is_associative_and_unital() {
        let alg = construct_definite(&int(5)).unwrap();
        let els = sample_elements();
        let one = QuatElement::one();
        for x in &els {
            assert_eq!(alg.mul(&one, x), *x);
            assert_eq!(alg.mul(x, &one), *x);
            for y in &els {
                for z in &els {
                    assert_eq!(
                        alg.mul(&alg.mul(x, y), z),
                        alg.mul(x, &alg.mul(y, z))
                    );
                }
            }
        }
    }

    #[test]
    fn trace_and_norm_from_conjugation() {
        let alg = construct_definite(&int(3)).unwrap();
        for x in sample_elements() {
            let xbar = alg.conj(&x);
            let sum = x.add(&xbar);
            assert_eq!(sum.c[0], alg.trace(&x));
            assert!(sum.c[1].is_zero() && sum.c[2].is_zero() && sum.c[3].is_zero());
            let prod = alg.mul(&x, &xbar);
            assert_eq!(prod.c[0], alg.norm(&x));
            assert!(prod.c[1].is_zero() && prod.c[2].is_zero() && prod.c[3].is_zero());
            if !x.is_zero() {
                assert!(alg.norm(&x) > rat(0, 1), "definite norm is positive");
                let inv = alg.inverse(&x).unwrap();
                assert_eq!(alg.mul(&x, &inv), QuatElement::one());
            }
        }
    }

    #[test]
    fn pairing_matches_norm_polarization() {
        let alg = construct_definite(&int(7)).unwrap();
        let els = sample_elements();
        for x in &els {
            for y in &els {
                let lhs = alg.pairing(x, y) * rat(2, 1);
                let rhs = alg.norm(&x.add(y)) - alg.norm(x) - alg.norm(y);
                assert_eq!(lhs, rhs);
            }
        }
    }
}
