//! Elementary exact number theory: Kronecker and Hilbert symbols, integer
//! factorization, constrained divisor sums.
//!
//! All symbol computations are deterministic and exact; primality testing
//! uses Miller-Rabin with a fixed base set that is deterministic far beyond
//! the sizes this crate ever touches.

use crate::error::{Error, Result};
use crate::{Int, Rat};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// A place of the rationals: a finite prime or the archimedean place.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Place {
    Prime(Int),
    Infinity,
}

/// Kronecker symbol (a|n), extending the Jacobi symbol to all integers.
pub fn kronecker(a: &Int, n: &Int) -> i32 {
    if n.is_zero() {
        return if a.abs().is_one() { 1 } else { 0 };
    }
    let mut a = a.clone();
    let mut n = n.clone();
    let mut k = 1i32;
    if n.is_negative() {
        n = -n;
        if a.is_negative() {
            k = -k;
        }
    }
    // (a|2) table indexed by a mod 8; zero entries flag even a.
    let two_sym = |x: &Int| -> i32 {
        let m = (x.mod_floor(&Int::from(8))).to_string().parse::<u8>().unwrap();
        match m {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        }
    };
    while n.is_even() {
        n /= 2;
        let t = two_sym(&a);
        if t == 0 {
            return 0;
        }
        k *= t;
    }
    if n.is_one() {
        return k;
    }
    a = a.mod_floor(&n);
    while !a.is_zero() {
        while a.is_even() {
            a /= 2;
            k *= two_sym(&n);
        }
        // quadratic reciprocity for positive odd a, n
        if a.mod_floor(&Int::from(4)) == Int::from(3) && n.mod_floor(&Int::from(4)) == Int::from(3)
        {
            k = -k;
        }
        std::mem::swap(&mut a, &mut n);
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        k
    } else {
        0
    }
}

/// p-adic valuation and unit part of a nonzero rational.
fn val_unit(x: &Rat, p: &Int) -> (i64, Int, Int) {
    // returns (v, unit numerator, unit denominator), both prime to p
    let mut num = x.numer().clone();
    let mut den = x.denom().clone();
    let mut v = 0i64;
    while (&num % p).is_zero() {
        num /= p;
        v += 1;
    }
    while (&den % p).is_zero() {
        den /= p;
        v -= 1;
    }
    (v, num, den)
}

/// Unit part of x at p reduced mod p^k (denominator inverted mod p^k).
fn unit_mod(x: &Rat, p: &Int, k: u32) -> (i64, Int) {
    let (v, num, den) = val_unit(x, p);
    let m = p.pow(k);
    let den_inv = mod_inverse(&den.mod_floor(&m), &m).expect("unit denominator invertible");
    (v, (num * den_inv).mod_floor(&m))
}

/// Modular inverse, when it exists.
pub fn mod_inverse(a: &Int, m: &Int) -> Option<Int> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Hilbert symbol (a, b) at a place of the rationals. The place must be a
/// prime or infinity; a and b must be nonzero.
pub fn hilbert_symbol(a: &Rat, b: &Rat, place: &Place) -> Result<i32> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::InvalidArgument("hilbert symbol of zero".into()));
    }
    match place {
        Place::Infinity => Ok(if a.is_negative() && b.is_negative() { -1 } else { 1 }),
        Place::Prime(p) => {
            if p < &Int::from(2) || !is_prime(p) {
                return Err(Error::InvalidArgument(format!(
                    "hilbert symbol place must be prime, got {p}"
                )));
            }
            if p == &Int::from(2) {
                let (alpha, u) = unit_mod(a, p, 3);
                let (beta, v) = unit_mod(b, p, 3);
                let eps = |x: &Int| -> i64 {
                    // (x - 1)/2 mod 2 for odd x mod 8
                    let m = x.mod_floor(&Int::from(4));
                    if m == Int::from(3) {
                        1
                    } else {
                        0
                    }
                };
                let omega = |x: &Int| -> i64 {
                    // (x^2 - 1)/8 mod 2 for odd x mod 8
                    let m = x.mod_floor(&Int::from(8));
                    if m == Int::from(3) || m == Int::from(5) {
                        1
                    } else {
                        0
                    }
                };
                let exp = eps(&u) * eps(&v) + alpha * omega(&v) + beta * omega(&u);
                Ok(if exp % 2 == 0 { 1 } else { -1 })
            } else {
                let (alpha, u) = unit_mod(a, p, 1);
                let (beta, v) = unit_mod(b, p, 1);
                let mut s = 1i32;
                if alpha % 2 != 0 && beta % 2 != 0 {
                    // (-1|p)
                    s *= kronecker(&Int::from(-1), p);
                }
                if beta % 2 != 0 {
                    s *= kronecker(&u, p);
                }
                if alpha % 2 != 0 {
                    s *= kronecker(&v, p);
                }
                Ok(s)
            }
        }
    }
}

/// Deterministic Miller-Rabin for the sizes that occur here.
pub fn is_prime(n: &Int) -> bool {
    if n < &Int::from(2) {
        return false;
    }
    for q in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let q = Int::from(q);
        if n == &q {
            return true;
        }
        if (n % &q).is_zero() {
            return false;
        }
    }
    let one = Int::one();
    let two = Int::from(2);
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'bases: for base in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let b = Int::from(base);
        let mut x = b.modpow(&d, n);
        if x.is_one() || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == nm1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: &Int) -> Int {
    // Brent's cycle variant with deterministic parameter sweep.
    let one = Int::one();
    for c in 1u64.. {
        let c = Int::from(c);
        let f = |x: &Int| (x * x + &c) % n;
        let mut x = Int::from(2);
        let mut y = Int::from(2);
        let mut d = Int::one();
        while d.is_one() {
            x = f(&x);
            y = f(&f(&y));
            d = (&x - &y).abs().gcd(n);
        }
        if d != *n {
            return d;
        }
        let _ = &one;
    }
    unreachable!()
}

/// Prime factorization n = prod p^e with p ascending. Errors on n = 0.
pub fn factor(n: &Int) -> Result<Vec<(Int, u32)>> {
    if n.is_zero() {
        return Err(Error::InvalidArgument("factor(0)".into()));
    }
    let mut n = n.abs();
    let mut out: Vec<(Int, u32)> = Vec::new();
    let push = |p: Int, e: u32, out: &mut Vec<(Int, u32)>| {
        if e > 0 {
            out.push((p, e));
        }
    };
    for q in small_primes(10_000) {
        let q = Int::from(q);
        if &q * &q > n {
            break;
        }
        let mut e = 0;
        while (&n % &q).is_zero() {
            n /= &q;
            e += 1;
        }
        push(q, e, &mut out);
    }
    let mut stack = vec![n];
    let mut big: Vec<Int> = Vec::new();
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_prime(&m) {
            big.push(m);
            continue;
        }
        let d = pollard_rho(&m);
        stack.push(&m / &d);
        stack.push(d);
    }
    big.sort();
    let mut i = 0;
    while i < big.len() {
        let mut j = i;
        while j < big.len() && big[j] == big[i] {
            j += 1;
        }
        push(big[i].clone(), (j - i) as u32, &mut out);
        i = j;
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

/// All divisors of n, ascending.
pub fn divisors(n: &Int) -> Result<Vec<Int>> {
    let f = factor(n)?;
    let mut out = vec![Int::one()];
    for (p, e) in f {
        let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
        let mut pk = Int::one();
        for _ in 0..=e {
            for d in &out {
                next.push(d * &pk);
            }
            pk *= &p;
        }
        out = next;
    }
    out.sort();
    Ok(out)
}

/// Sum of divisors d of n with gcd(d, a) = 1 and gcd(n/d, b) = 1.
pub fn divisor_sum_constrained(n: &Int, a: &Int, b: &Int) -> Result<Int> {
    if n < &Int::one() {
        return Err(Error::InvalidArgument("divisor sum needs n >= 1".into()));
    }
    let mut s = Int::zero();
    for d in divisors(n)? {
        let cod = n / &d;
        if d.gcd(a).is_one() && cod.gcd(b).is_one() {
            s += &d;
        }
    }
    Ok(s)
}

/// Primes below the bound, by sieve.
pub fn small_primes(bound: usize) -> Vec<u64> {
    if bound < 2 {
        return vec![];
    }
    let mut sieve = vec![true; bound];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i < bound {
        if sieve[i] {
            let mut j = i * i;
            while j < bound {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(i, &b)| if b { Some(i as u64) } else { None })
        .collect()
}

/// Floor of the integer square root; errors on negative input.
pub fn isqrt(n: &Int) -> Result<Int> {
    if n.is_negative() {
        return Err(Error::InvalidArgument("isqrt of negative".into()));
    }
    Ok(n.sqrt())
}

/// Exact integer square root, or None when n is not a perfect square.
pub fn exact_sqrt(n: &Int) -> Option<Int> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &(&r * &r) == n {
        Some(r)
    } else {
        None
    }
}

/// Smallest prime not dividing n.
pub fn smallest_coprime_prime(n: &Int) -> Int {
    for q in small_primes(100_000) {
        let q = Int::from(q);
        if !(n % &q).is_zero() {
            return q;
        }
    }
    unreachable!("n has a prime factor below 100000 missing")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{int, rat};

    fn legendre_brute(a: i64, p: i64) -> i32 {
        // Euler criterion by exhaustive squaring, independent of kronecker().
        let am = a.rem_euclid(p);
        if am == 0 {
            return 0;
        }
        for x in 1..p {
            if (x * x) % p == am {
                return 1;
            }
        }
        -1
    }

    #[test]
    fn kronecker_matches_euler_criterion_at_odd_primes() {
        for p in [3i64, 5, 7, 11, 13, 17, 19, 23] {
            for a in -30..30 {
                assert_eq!(
                    kronecker(&int(a), &int(p)),
                    legendre_brute(a, p),
                    "a={a} p={p}"
                );
            }
        }
    }

    #[test]
    fn kronecker_pinned_values() {
        assert_eq!(kronecker(&int(2), &int(7)), 1);
        assert_eq!(kronecker(&int(3), &int(5)), -1);
        assert_eq!(kronecker(&int(-1), &int(3)), -1);
        assert_eq!(kronecker(&int(-1), &int(13)), 1);
        assert_eq!(kronecker(&int(6), &int(3)), 0);
    }

    #[test]
    fn kronecker_multiplicative_in_top_argument() {
        for n in [3i64, 5, 15, 21, 35] {
            for a in -12..12i64 {
                for b in -12..12i64 {
                    assert_eq!(
                        kronecker(&int(a * b), &int(n)),
                        kronecker(&int(a), &int(n)) * kronecker(&int(b), &int(n))
                    );
                }
            }
        }
    }

    #[test]
    fn hilbert_pinned_values() {
        let two = Place::Prime(int(2));
        let three = Place::Prime(int(3));
        assert_eq!(hilbert_symbol(&rat(-1, 1), &rat(-1, 1), &two).unwrap(), -1);
        assert_eq!(hilbert_symbol(&rat(-1, 1), &rat(-1, 1), &three).unwrap(), 1);
        assert_eq!(
            hilbert_symbol(&rat(-1, 1), &rat(-1, 1), &Place::Infinity).unwrap(),
            -1
        );
        // (-1,-11) ramified exactly at 11 and infinity
        assert_eq!(
            hilbert_symbol(&rat(-1, 1), &rat(-11, 1), &Place::Prime(int(11))).unwrap(),
            -1
        );
        assert_eq!(hilbert_symbol(&rat(-1, 1), &rat(-11, 1), &two).unwrap(), 1);
    }

    #[test]
    fn hilbert_rejects_bad_place() {
        assert!(hilbert_symbol(&rat(1, 1), &rat(1, 1), &Place::Prime(int(6))).is_err());
        assert!(hilbert_symbol(&rat(1, 1), &rat(1, 1), &Place::Prime(int(0))).is_err());
    }

    #[test]
    fn hilbert_symmetric_and_multiplicative() {
        let places: Vec<Place> = [2i64, 3, 5, 7, 11]
            .iter()
            .map(|p| Place::Prime(int(*p)))
            .chain(std::iter::once(Place::Infinity))
            .collect();
        let vals: Vec<Rat> = [-10i64, -7, -3, -2, -1, 1, 2, 3, 5, 6, 15]
            .iter()
            .map(|v| rat(*v, 1))
            .collect();
        for pl in &places {
            for a in &vals {
                for b in &vals {
                    let ab = hilbert_symbol(a, b, pl).unwrap();
                    assert_eq!(ab, hilbert_symbol(b, a, pl).unwrap());
                    for c in &vals {
                        let ac = hilbert_symbol(a, c, pl).unwrap();
                        let abc = hilbert_symbol(a, &(b * c), pl).unwrap();
                        assert_eq!(abc, ab * ac, "a={a} b={b} c={c} at {pl:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn hilbert_reciprocity() {
        // product over all places of (a,b)_v = 1
        let vals = [-30i64, -11, -7, -5, -2, -1, 2, 3, 5, 7, 10, 21];
        for &a in &vals {
            for &b in &vals {
                let ra = rat(a, 1);
                let rb = rat(b, 1);
                let mut prod = hilbert_symbol(&ra, &rb, &Place::Infinity).unwrap();
                let support = factor(&int(2 * a * b)).unwrap();
                for (p, _) in support {
                    prod *= hilbert_symbol(&ra, &rb, &Place::Prime(p)).unwrap();
                }
                assert_eq!(prod, 1, "reciprocity fails for ({a},{b})");
            }
        }
    }

    #[test]
    fn factor_roundtrip() {
        for n in 1i64..500 {
            let f = factor(&int(n)).unwrap();
            let mut m = Int::one();
            for (p, e) in &f {
                assert!(is_prime(p));
                m *= p.pow(*e);
            }
            assert_eq!(m, int(n));
        }
        let f = factor(&int(1_000_003 * 998_117)).unwrap();
        assert_eq!(f.len(), 2);
    }

    #[test]
    fn divisor_sum_brute_force_agreement() {
        let brute = |n: i64, a: i64, b: i64| -> i64 {
            (1..=n)
                .filter(|d| n % d == 0)
                .filter(|d| num_integer::gcd(*d, a) == 1 && num_integer::gcd(n / d, b) == 1)
                .sum()
        };
        for n in 1i64..=60 {
            for (a, b) in [(11, 1), (1, 11), (2, 3), (6, 35), (11, 2)] {
                assert_eq!(
                    divisor_sum_constrained(&int(n), &int(a), &int(b)).unwrap(),
                    int(brute(n, a, b)),
                    "n={n} a={a} b={b}"
                );
            }
        }
    }

    #[test]
    fn divisor_sum_pinned() {
        // constrained sums for (a,b) = (11,1)
        assert_eq!(divisor_sum_constrained(&int(2), &int(11), &int(1)).unwrap(), int(3));
        assert_eq!(divisor_sum_constrained(&int(3), &int(11), &int(1)).unwrap(), int(4));
        assert_eq!(divisor_sum_constrained(&int(11), &int(11), &int(1)).unwrap(), int(1));
        assert_eq!(divisor_sum_constrained(&int(22), &int(11), &int(1)).unwrap(), int(3));
    }

    #[test]
    fn divisor_sum_multiplicative_on_coprime_arguments() {
        for (m, n) in [(4i64, 9), (5, 8), (7, 12), (25, 9)] {
            for (a, b) in [(11i64, 1), (2, 3), (6, 5)] {
                let lhs = divisor_sum_constrained(&int(m * n), &int(a), &int(b)).unwrap();
                let rhs = divisor_sum_constrained(&int(m), &int(a), &int(b)).unwrap()
                    * divisor_sum_constrained(&int(n), &int(a), &int(b)).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn smallest_coprime_prime_works() {
        assert_eq!(smallest_coprime_prime(&int(11)), int(2));
        assert_eq!(smallest_coprime_prime(&int(6)), int(5));
        assert_eq!(smallest_coprime_prime(&int(30)), int(7));
    }
}
