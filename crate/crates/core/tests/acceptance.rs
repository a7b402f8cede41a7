//! Acceptance suite: one test per published verification criterion. Each
//! test prints a one-line pass summary (visible with --nocapture); the
//! harness result line per test is the per-criterion pass/fail record. All
//! comparisons are exact, so any failure falsifies either the
//! implementation or the decomposition data it is checked against.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use num_integer::Integer;
use num_traits::Signed;

use qmf_core::arith::small_primes;
use qmf_core::brandt::{hecke_module, HeckeModule, Tower};
use qmf_core::ideal::{class_set, ClassSetOptions};
use qmf_core::oracle::{
    congruence_check, load_fixtures, local_multiplicity, predict_decomposition,
    predicted_theta_kernel, verify_decomposition, FixtureDb, LocalKind, LocalMultiplicity,
    LocalRepDescriptor,
};
use qmf_core::order::{build_order, special_lattice_chain, EType, Order, OrderLocalType};
use qmf_core::poly::CharPoly;
use qmf_core::quat::construct_definite;
use qmf_core::theta::{eisenstein_q_expansion, eta_product, theta_new_span};
use qmf_core::{int, Int, Rat};

const PAIRS: [(u64, u64); 9] =
    [(2, 1), (3, 1), (5, 1), (7, 1), (11, 1), (13, 1), (2, 3), (3, 5), (11, 2)];

fn order_for(d: u64, m: u64) -> Order {
    let alg = construct_definite(&Int::from(d)).expect("definite algebra");
    build_order(&alg, &Int::from(d * m), &BTreeMap::new()).expect("order")
}

fn module_for(d: u64, m: u64, bound: i64) -> HeckeModule {
    hecke_module(&order_for(d, m), &int(bound), &ClassSetOptions::default()).expect("module")
}

fn fixtures() -> FixtureDb {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/newforms.jsonl");
    load_fixtures(&path).expect("fixture file loads")
}

fn fixture_trace(db: &FixtureDb, level: u64, label: &str, p: u64) -> Int {
    db.record(level, label)
        .unwrap_or_else(|| panic!("fixture {label} at {level}"))
        .trace(p)
        .unwrap_or_else(|| panic!("fixture {label} lacks a_{p}"))
        .clone()
}

#[test]
fn criterion_01_mass_formula() {
    let mut worst = Duration::ZERO;
    for (d, m) in PAIRS {
        let start = Instant::now();
        let order = order_for(d, m);
        let cs = class_set(&order, &ClassSetOptions::default()).expect("class set");
        let sum: Rat = cs
            .unit_halves
            .iter()
            .map(|e| Rat::new(Int::from(1), e.clone()))
            .sum();
        let mut expected = Rat::new(Int::from(1), Int::from(12));
        expected *= Rat::from(Int::from(d - 1));
        for (p, r) in qmf_core::arith::factor(&Int::from(m)).unwrap() {
            expected *= Rat::from(p.pow(r - 1) * (&p + Int::from(1)));
        }
        assert_eq!(sum, expected, "mass at ({d},{m})");
        let elapsed = start.elapsed();
        assert!(elapsed < Duration::from_secs(10), "({d},{m}) took {elapsed:?}");
        worst = worst.max(elapsed);
    }
    println!("criterion 1: pass - mass formula exact for all 9 pairs (slowest case {worst:?})");
}

#[test]
fn criterion_02_brandt_structural_suite() {
    for (d, m) in PAIRS {
        let module = module_for(d, m, 30);
        let h = module.class_number();
        let e = &module.family.classes.unit_halves;
        let n_level = Int::from(d * m);
        let eis = eisenstein_q_expansion(&Int::from(d), &Int::from(m), 30).expect("eisenstein");
        let mats: Vec<_> =
            (1..=30).map(|n| module.brandt(&int(n)).expect("brandt matrix")).collect();

        assert_eq!(mats[0], qmf_core::IntMat::identity(h), "A_1 at ({d},{m})");
        for (idx, a) in mats.iter().enumerate() {
            let n = idx as i64 + 1;
            for i in 0..h {
                for j in 0..h {
                    assert!(!a[(i, j)].is_negative(), "negative entry in A_{n} at ({d},{m})");
                }
            }
            if int(n).gcd(&n_level) == int(1) {
                for i in 0..h {
                    for j in 0..h {
                        assert_eq!(
                            &e[j] * &a[(i, j)],
                            &e[i] * &a[(j, i)],
                            "weighted symmetry of A_{n} at ({d},{m})"
                        );
                    }
                }
                let c = eis.coeffs[n as usize].to_integer();
                for i in 0..h {
                    let row_sum: Int = a.row(i).iter().sum();
                    assert_eq!(row_sum, c, "row sum of A_{n} at ({d},{m})");
                }
            }
        }
        for i in 0..mats.len() {
            for j in i + 1..mats.len() {
                assert_eq!(
                    mats[i].mul(&mats[j]),
                    mats[j].mul(&mats[i]),
                    "A_{} and A_{} commute at ({d},{m})",
                    i + 1,
                    j + 1
                );
            }
        }
        for p in small_primes(31) {
            if (d * m) % p == 0 {
                continue;
            }
            let mut pk = p * p;
            while pk <= 30 {
                let prev = &mats[(pk / p) as usize - 1];
                let prev2 = &mats[(pk / (p * p)) as usize - 1];
                let cur = &mats[pk as usize - 1];
                let prod = mats[p as usize - 1].mul(prev);
                for i in 0..h {
                    for j in 0..h {
                        assert_eq!(
                            &cur[(i, j)] + Int::from(p) * &prev2[(i, j)],
                            prod[(i, j)],
                            "Hecke recursion at p={p}, n={pk}, ({d},{m})"
                        );
                    }
                }
                pk *= p;
            }
        }
    }
    println!("criterion 2: pass - Brandt structure checks exact for n <= 30 over all 9 pairs");
}

#[test]
fn criterion_03_level_eleven_basis_problem() {
    let order = order_for(11, 1);
    let mut tower = Tower::new(&order, &int(50), &ClassSetOptions::default()).expect("tower");
    let span = theta_new_span(&mut tower, 50).expect("theta span");
    assert_eq!(span.len(), 1, "new theta span at level 11 is a line");
    let eta = eta_product(&[(1, 2), (11, 2)], 50).expect("eta product");
    assert_eq!(span[0].coeffs.len(), 51);
    for n in 0..=50 {
        assert_eq!(span[0].coeffs[n], eta.coeffs[n], "coefficient {n}");
    }
    println!("criterion 3: pass - theta span at level 11 equals the eta product through q^50");
}

#[test]
fn criterion_04_oldform_multiplicity() {
    let db = fixtures();

    let order = order_for(11, 2);
    let mut tower = Tower::new(&order, &int(3), &ClassSetOptions::default()).expect("tower");
    assert_eq!(tower.base().cusp_dim(), 2, "cusp dimension at (11,22)");
    let a3 = fixture_trace(&db, 11, "11a", 3);
    let expected = CharPoly::linear(&a3).pow(2);
    assert_eq!(tower.base().cusp_charpoly(&int(3)).unwrap(), expected, "charpoly at (11,22)");
    assert_eq!(tower.new_charpoly(&int(22), &int(3)).unwrap(), CharPoly::one(), "level 22 has no new part");

    let order = order_for(11, 3);
    let mut tower = Tower::new(&order, &int(2), &ClassSetOptions::default()).expect("tower");
    assert_eq!(tower.base().cusp_dim(), 3, "cusp dimension at (11,33)");
    let a2_new = fixture_trace(&db, 33, "33a", 2);
    let a2_old = fixture_trace(&db, 11, "11a", 2);
    let expected = CharPoly::linear(&a2_new).mul(&CharPoly::linear(&a2_old).pow(2));
    assert_eq!(tower.base().cusp_charpoly(&int(2)).unwrap(), expected, "charpoly at (11,33)");
    assert_eq!(
        tower.new_charpoly(&int(33), &int(2)).unwrap(),
        CharPoly::linear(&a2_new),
        "new part at level 33"
    );
    println!("criterion 4: pass - oldform multiplicities at (11,22) and (11,33) match the fixtures");
}

#[test]
fn criterion_05_level_p_squared_decomposition() {
    let start = Instant::now();
    let db = fixtures();
    let order = order_for(11, 11);
    assert_eq!(order.locals[0].etype, EType::Ramified, "level 121 defaults to the ramified type");

    let pred = predict_decomposition(&order, &db).expect("prediction");
    let mut tower = Tower::new(&order, &int(3), &ClassSetOptions::default()).expect("tower");

    // Dimension bookkeeping from fixture data alone.
    let dim_new_11: usize = db.orbits(11).iter().map(|r| r.dim).sum();
    let twist_dims: usize = db
        .orbits(121)
        .iter()
        .filter(|r| r.local_descriptor(11).kind == LocalKind::SpecialTwist)
        .map(|r| r.dim)
        .sum();
    let sc_dims: usize = db
        .orbits(121)
        .iter()
        .filter(|r| {
            let l = r.local_descriptor(11);
            l.kind == LocalKind::Supercuspidal && l.minimal
        })
        .map(|r| r.dim)
        .sum();
    let expected_dim = dim_new_11 + twist_dims + 2 * sc_dims;
    assert_eq!(tower.base().cusp_dim(), expected_dim, "cusp dimension at (11,121)");
    assert_eq!(pred.predicted_cusp_dim, Some(expected_dim as u64));

    // The characteristic polynomial of A_2 is exactly the fixture product.
    let mut expected = CharPoly::one();
    for t in &pred.terms {
        assert_eq!(t.dim, 1);
        let a2 = fixture_trace(&db, t.level, &t.label, 2);
        expected = expected.mul(&CharPoly::linear(&a2).pow(t.multiplicity));
    }
    assert_eq!(tower.base().cusp_charpoly(&int(2)).unwrap(), expected, "charpoly of A_2");
    let report = verify_decomposition(&pred, &db, &mut tower, &[2, 3]).expect("verification");
    assert!(report.all_matched, "{:?}", report.checks);

    // No predicted term has a principal-series component at 11, and a
    // record reclassified as principal series is excluded from the
    // prediction entirely.
    for t in &pred.terms {
        let kind = db.record(t.level, &t.label).unwrap().local_descriptor(11).kind;
        assert_ne!(kind, LocalKind::PrincipalSeries, "{}", t.label);
    }
    let mut altered = db.clone();
    let mut rec = altered.record(121, "121a").unwrap().clone();
    rec.bad.insert(
        11,
        LocalRepDescriptor {
            conductor_exp: 2,
            kind: LocalKind::PrincipalSeries,
            minimal: false,
            minimal_twist_conductor: None,
        },
    );
    *altered.records.iter_mut().find(|r| r.level == 121 && r.label == "121a").unwrap() = rec;
    let excluded = predict_decomposition(&order, &altered).expect("prediction");
    assert!(excluded.terms.iter().all(|t| t.label != "121a"), "principal series must not appear");

    // The predicted theta kernel agrees with the representation count.
    assert_eq!(predicted_theta_kernel(&order, &db).unwrap(), sc_dims as u64);

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    println!("criterion 5: pass - (11,121) decomposition exact in {elapsed:?}");
}

#[test]
fn criterion_06_ramified_hecke_action() {
    let db = fixtures();

    let order = order_for(11, 11);
    let mut tower = Tower::new(&order, &int(11), &ClassSetOptions::default()).expect("tower");
    assert!(
        tower.ramified_new_annihilation(&int(11)).unwrap(),
        "A_11 annihilates the 121-new subspace"
    );

    let order = order_for(11, 1);
    let module = hecke_module(&order, &int(11), &ClassSetOptions::default()).expect("module");
    let a11 = fixture_trace(&db, 11, "11a", 11);
    assert_eq!(
        module.cusp_charpoly(&int(11)).unwrap(),
        CharPoly::linear(&a11),
        "A_11 acts by the fixture eigenvalue on the level-11 cusp line"
    );
    println!("criterion 6: pass - ramified Hecke action matches at (11,121) and (11,11)");
}

#[test]
fn criterion_07_eisenstein_congruences() {
    for (p, ells) in [(5u64, [2u64, 3, 7, 11, 13]), (7, [2, 3, 5, 11, 13])] {
        let start = Instant::now();
        assert!(congruence_check(p, &ells).unwrap(), "congruence at {p}");
        let elapsed = start.elapsed();
        assert!(elapsed < Duration::from_secs(300), "congruence at {p} took {elapsed:?}");
        println!("criterion 7: pass - mod-{p} congruence at level {p}^3 holds in {elapsed:?}");
    }
}

#[test]
fn criterion_08_special_order_lattices() {
    for p in [5i64, 11] {
        let alg = construct_definite(&int(p)).unwrap();

        // Unramified type: consecutive pairs coincide, and the first order
        // is maximal.
        let chain = special_lattice_chain(&alg, &int(p), EType::Unramified, 4, false).unwrap();
        let maximal = qmf_core::Order::maximal(&alg).unwrap();
        assert_eq!(chain[0], maximal.lat, "index 1 is the maximal order at {p}");
        assert_eq!(chain[0], chain[1], "indices 1 and 2 agree at {p}");
        assert_eq!(chain[2], chain[3], "indices 3 and 4 agree at {p}");
        assert_ne!(chain[1], chain[2], "indices 2 and 3 differ at {p}");

        // Ramified type: the chain is strictly decreasing, so the orders
        // are pairwise distinct through index 5.
        let ram = special_lattice_chain(&alg, &int(p), EType::Ramified, 5, false).unwrap();
        for i in 0..ram.len() {
            for j in i + 1..ram.len() {
                assert_ne!(ram[i], ram[j], "ramified indices {} and {} at {p}", i + 1, j + 1);
            }
        }

        // Index 2 does not depend on which ramified quadratic extension
        // generated it.
        let other = special_lattice_chain(&alg, &int(p), EType::Ramified, 2, true).unwrap();
        assert_eq!(ram[1], other[1], "index 2 is extension-independent at {p}");
        assert_ne!(ram[2], ram[1], "index 3 is a proper sublattice at {p}");
    }
    println!("criterion 8: pass - special-order lattice identities hold at p = 5 and 11");
}

#[test]
fn criterion_09_local_multiplicity_table() {
    use LocalMultiplicity as M;
    let local = |p: i64, r: u32, etype: EType| OrderLocalType {
        p: int(p),
        r,
        etype,
        omega: None,
        e_disc: None,
    };
    let rep = |c: u32, kind: LocalKind, minimal: bool| LocalRepDescriptor {
        conductor_exp: c,
        kind,
        minimal,
        minimal_twist_conductor: None,
    };
    use EType::{Ramified, Unramified};
    use LocalKind::{PrincipalSeries, SpecialTwist, Steinberg, Supercuspidal, Unramified as Spherical};

    let table: &[(LocalRepDescriptor, OrderLocalType, M)] = &[
        // Principal series and spherical components never contribute.
        (rep(0, Spherical, true), local(11, 2, Ramified), M::Zero),
        (rep(2, PrincipalSeries, false), local(3, 2, Ramified), M::Zero),
        (rep(2, PrincipalSeries, false), local(3, 3, Unramified), M::Zero),
        // Conductor above the level exponent.
        (rep(4, Supercuspidal, true), local(5, 3, Unramified), M::Zero),
        (rep(3, Supercuspidal, true), local(5, 2, Ramified), M::Zero),
        // One-dimensional components with unramified twist.
        (rep(1, Steinberg, true), local(11, 1, Unramified), M::One),
        (rep(1, Steinberg, true), local(11, 2, Ramified), M::One),
        // One-dimensional components with ramified twist.
        (rep(2, SpecialTwist, false), local(11, 3, Unramified), M::Zero),
        (rep(2, SpecialTwist, false), local(11, 2, Ramified), M::One),
        (rep(4, SpecialTwist, false), local(2, 4, Ramified), M::Unknown),
        // Minimal supercuspidal, unramified type: conductor parity.
        (rep(3, Supercuspidal, true), local(5, 3, Unramified), M::One),
        (rep(2, Supercuspidal, true), local(5, 3, Unramified), M::Zero),
        // Minimal supercuspidal, ramified type.
        (rep(2, Supercuspidal, true), local(11, 2, Ramified), M::Two),
        (rep(4, Supercuspidal, true), local(11, 4, Ramified), M::Two),
        (rep(3, Supercuspidal, true), local(5, 4, Ramified), M::ConjecturalOne),
        (rep(3, Supercuspidal, true), local(2, 4, Ramified), M::One),
        (rep(5, Supercuspidal, true), local(2, 6, Ramified), M::Unknown),
        // Non-minimal supercuspidal.
        (rep(4, Supercuspidal, false), local(5, 5, Unramified), M::Zero),
        (rep(4, Supercuspidal, false), local(5, 4, Ramified), M::Zero),
        (rep(6, Supercuspidal, false), local(2, 6, Ramified), M::Unknown),
    ];
    for (r, o, want) in table {
        assert_eq!(local_multiplicity(r, o), *want, "c={} kind={:?} at p={} r={} {:?}", r.conductor_exp, r.kind, o.p, o.r, o.etype);
    }

    // Structural bound: a decided value never exceeds the ramification
    // degree of the quadratic extension attached to the type.
    for kind in [Steinberg, SpecialTwist, PrincipalSeries, Supercuspidal] {
        for minimal in [true, false] {
            for c in 1..=7u32 {
                for r in 1..=7u32 {
                    for (p, etype) in [(3i64, Unramified), (3, Ramified), (2, Unramified), (2, Ramified)] {
                        let m = local_multiplicity(&rep(c, kind, minimal), &local(p, r, etype));
                        if let Some(v) = m.count() {
                            let bound = if etype == Ramified { 2 } else { 1 };
                            assert!(v <= bound);
                        }
                    }
                }
            }
        }
    }
    println!("criterion 9: pass - local multiplicity table and structural bound verified");
}

#[test]
fn criterion_10_declared_scope() {
    // Declared out of scope at desk scale: base fields other than the
    // rationals, asymptotics in the level, and the representation-theoretic
    // proofs behind the local multiplicity rules. Their substitutes are the
    // exact suites in criteria 1 through 9 together with the randomized
    // property tests; a failure of any of those falsifies the
    // implementation or the transcribed decomposition data, and the test
    // harness reports it as a nonzero exit.
    let db = fixtures();
    assert!(!db.is_empty(), "substitute suites need the fixture data to exist");
    println!(
        "criterion 10: declared - rational base field only, desk-scale levels, \
         proofs replaced by exact property suites"
    );
}
