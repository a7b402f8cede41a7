//! Randomized structural properties of the arithmetic layers: symbol
//! identities, divisor sums, polynomial algebra, integer linear algebra,
//! and the dimension formulas. Everything here is an exact identity, so a
//! single counterexample is a real bug rather than numerical noise.

use std::collections::BTreeSet;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use qmf_core::arith::{divisor_sum_constrained, factor, hilbert_symbol, kronecker, Place};
use qmf_core::oracle::{dim_new_cusp, genus_x0};
use qmf_core::poly::CharPoly;
use qmf_core::{int, rat, Int, IntMat};

fn nonzero(range: std::ops::RangeInclusive<i64>) -> impl Strategy<Value = i64> {
    range.prop_filter("nonzero", |&x| x != 0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kronecker_is_multiplicative(a in -80i64..=80, b in -80i64..=80, m in 1i64..=60, n in 1i64..=60) {
        let top = kronecker(&int(a * b), &int(n));
        prop_assert_eq!(top, kronecker(&int(a), &int(n)) * kronecker(&int(b), &int(n)));
        let bottom = kronecker(&int(a), &int(m * n));
        prop_assert_eq!(bottom, kronecker(&int(a), &int(m)) * kronecker(&int(a), &int(n)));
    }

    #[test]
    fn hilbert_symbols_obey_the_product_formula(a in nonzero(-120i64..=120), b in nonzero(-120i64..=120)) {
        let ar = rat(a, 1);
        let br = rat(b, 1);
        // Only infinity and primes dividing 2ab can carry a nontrivial symbol.
        let mut places = vec![Place::Infinity, Place::Prime(int(2))];
        let mut seen = BTreeSet::new();
        for x in [a.abs(), b.abs()] {
            for (p, _) in factor(&int(x)).unwrap() {
                if p > int(2) && seen.insert(p.clone()) {
                    places.push(Place::Prime(p));
                }
            }
        }
        let mut product = 1;
        for v in &places {
            let s = hilbert_symbol(&ar, &br, v).unwrap();
            prop_assert_eq!(s, hilbert_symbol(&br, &ar, v).unwrap(), "symmetry at {:?}", v);
            product *= s;
        }
        prop_assert_eq!(product, 1, "product formula for ({}, {})", a, b);
        // (a, -a) splits everywhere.
        for v in &places {
            prop_assert_eq!(hilbert_symbol(&ar, &(-&ar), v).unwrap(), 1);
        }
    }

    #[test]
    fn constrained_divisor_sums_are_multiplicative(
        m in 1i64..=400, n in 1i64..=400, a in 1i64..=30, b in 1i64..=30,
    ) {
        prop_assume!(int(m).gcd(&int(n)).is_one());
        let left = divisor_sum_constrained(&int(m * n), &int(a), &int(b)).unwrap();
        let right = divisor_sum_constrained(&int(m), &int(a), &int(b)).unwrap()
            * divisor_sum_constrained(&int(n), &int(a), &int(b)).unwrap();
        prop_assert_eq!(left, right);
        // With trivial constraints this is the ordinary divisor sum.
        let sigma: i64 = (1..=m).filter(|d| m % d == 0).sum();
        prop_assert_eq!(divisor_sum_constrained(&int(m), &int(1), &int(1)).unwrap(), int(sigma));
    }

    #[test]
    fn charpoly_algebra_roundtrips(roots in prop::collection::vec(-9i64..=9, 1..6), extra in -9i64..=9) {
        let mut f = CharPoly::one();
        let mut sum = Int::zero();
        for &r in &roots {
            f = f.mul(&CharPoly::linear(&int(r)));
            sum += int(r);
        }
        prop_assert_eq!(f.degree(), roots.len());
        prop_assert_eq!(f.root_sum(), sum);
        for &r in &roots {
            let expected = roots.iter().filter(|&&x| x == r).count();
            prop_assert_eq!(f.root_multiplicity(&int(r)), expected);
        }
        let g = CharPoly::linear(&int(extra));
        let fg = f.mul(&g);
        prop_assert_eq!(fg.degree(), f.degree() + 1);
        let back = fg.div_exact(&g).unwrap();
        prop_assert_eq!(back, f.clone());
        // Division by a non-root factor fails rather than rounding.
        if !roots.contains(&extra) {
            prop_assert!(f.div_exact(&g).is_err());
        }
    }

    #[test]
    fn kernels_annihilate_and_hnf_preserves_determinants(
        entries in prop::collection::vec(-6i64..=6, 12),
    ) {
        let rows: Vec<Vec<Int>> = entries.chunks(4).map(|c| c.iter().map(|&x| int(x)).collect()).collect();
        let a = IntMat::from_rows(rows);
        let k = a.right_kernel();
        if k.rows > 0 {
            let prod = a.mul(&k.transpose());
            prop_assert!(prod.is_zero(), "kernel rows must be annihilated");
        }
        // Kernel dimension is at least the column count minus the row count.
        prop_assert!(k.rows + a.rows >= a.cols);

        let square_rows: Vec<Vec<Int>> =
            entries.chunks(4).take(3).map(|c| c.iter().take(3).map(|&x| int(x)).collect()).collect();
        let s = IntMat::from_rows(square_rows);
        let (h, u) = s.hnf();
        prop_assert_eq!(u.det().abs(), Int::one(), "transform is unimodular");
        prop_assert_eq!(h.det().abs(), s.det().abs(), "row operations keep the determinant");
        prop_assert_eq!(u.mul(&s), h, "transform reproduces the normal form");
    }

    #[test]
    fn new_dimensions_invert_the_genus(n in 1u64..=2000) {
        let mut total = 0u64;
        for m in 1..=n {
            if n % m == 0 {
                let k = n / m;
                let tau = (1..=k).filter(|d| k % d == 0).count() as u64;
                total += tau * dim_new_cusp(m);
            }
        }
        prop_assert_eq!(total, genus_x0(n));
    }
}
