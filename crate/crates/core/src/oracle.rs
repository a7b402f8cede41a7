//! Independent newform data and the local multiplicity rules.
//!
//! This module compares quaternionic Brandt modules against classical
//! modular forms data supplied as fixture files. A fixture records, for one
//! Galois orbit of weight-2 newforms, the level, the dimension, integer
//! Hecke traces, and a classification of the local component at each prime
//! dividing the level. From those descriptors alone the functions here
//! predict how the cusp space of a special order decomposes, verify the
//! prediction against computed Brandt characteristic polynomials, and run
//! the mod-p Eisenstein congruence test at level p^3.
//!
//! Nothing in this module looks at the quaternionic side while loading or
//! validating fixtures, so the two data sources stay independent until the
//! explicit comparison steps.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factor, is_prime, kronecker};
use crate::brandt::Tower;
use crate::error::{Error, Result};
use crate::ideal::ClassSetOptions;
use crate::int;
use crate::order::{build_order, EType, Order, OrderLocalType};
use crate::poly::CharPoly;
use crate::quat::construct_definite;
use crate::Int;

/// Isomorphism class of the local component of a newform at a prime.
///
/// `Steinberg` and `SpecialTwist` are the one-dimensional (twist of
/// Steinberg) types; `SpecialTwist` means the twisting character is
/// ramified. `PrincipalSeries` covers the irreducible principal series
/// with nontrivial conductor. `Unramified` is the spherical case at a
/// prime not dividing the level and never appears in fixture files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LocalKind {
    Unramified,
    Steinberg,
    SpecialTwist,
    PrincipalSeries,
    Supercuspidal,
    Unknown,
}

impl fmt::Display for LocalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LocalKind::Unramified => "unramified",
            LocalKind::Steinberg => "steinberg",
            LocalKind::SpecialTwist => "special-twist",
            LocalKind::PrincipalSeries => "principal-series",
            LocalKind::Supercuspidal => "supercuspidal",
            LocalKind::Unknown => "unknown",
        };
        f.write_str(s)
    }
}

/// Local data of a newform at one prime: the conductor exponent, the kind,
/// and whether the component is minimal among its twists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalRepDescriptor {
    pub conductor_exp: u32,
    pub kind: LocalKind,
    pub minimal: bool,
    /// Conductor exponent of a minimal twist, when known. Only consulted
    /// for non-minimal supercuspidals at p = 2.
    pub minimal_twist_conductor: Option<u32>,
}

impl LocalRepDescriptor {
    /// The spherical descriptor used at primes away from the level.
    pub fn unramified() -> Self {
        LocalRepDescriptor {
            conductor_exp: 0,
            kind: LocalKind::Unramified,
            minimal: true,
            minimal_twist_conductor: None,
        }
    }

    /// True for the twist-of-Steinberg kinds, whose Langlands parameter is
    /// an unramified or ramified character in place of a 2-dimensional one.
    pub fn one_dimensional(&self) -> bool {
        matches!(self.kind, LocalKind::Steinberg | LocalKind::SpecialTwist)
    }
}

/// One Galois orbit of weight-2 newforms: integer traces of Hecke
/// eigenvalues and local descriptors at the bad primes.
#[derive(Debug, Clone, Serialize)]
pub struct NewformRecord {
    pub level: u64,
    pub label: String,
    pub dim: usize,
    /// Trace of a_p over the coefficient field, keyed by prime.
    pub ap: BTreeMap<u64, Int>,
    pub bad: BTreeMap<u64, LocalRepDescriptor>,
}

impl NewformRecord {
    /// Local descriptor at p: the stored one at bad primes, spherical
    /// otherwise.
    pub fn local_descriptor(&self, p: u64) -> LocalRepDescriptor {
        self.bad.get(&p).cloned().unwrap_or_else(LocalRepDescriptor::unramified)
    }

    /// Stored trace of a_n, if the fixture covers the prime n.
    pub fn trace(&self, n: u64) -> Option<&Int> {
        self.ap.get(&n)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLocal {
    #[serde(default)]
    c: Option<u32>,
    kind: LocalKind,
    #[serde(default)]
    minimal: Option<bool>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecord {
    level: u64,
    label: String,
    dim: usize,
    ap: BTreeMap<String, i64>,
    #[serde(default)]
    bad: BTreeMap<String, RawLocal>,
}

fn fixture_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Fixture { line, msg: msg.into() }
}

fn parse_prime_key(key: &str, line: usize, what: &str) -> Result<u64> {
    let p: u64 = key
        .parse()
        .map_err(|_| fixture_err(line, format!("{what} key {key:?} is not an integer")))?;
    if !is_prime(&Int::from(p)) {
        return Err(fixture_err(line, format!("{what} key {p} is not prime")));
    }
    Ok(p)
}

fn validate_record(raw: RawRecord, line: usize) -> Result<NewformRecord> {
    if raw.level == 0 {
        return Err(fixture_err(line, "level must be positive"));
    }
    if raw.dim == 0 {
        return Err(fixture_err(line, "dim must be positive"));
    }
    if raw.label.is_empty() {
        return Err(fixture_err(line, "label must be nonempty"));
    }
    let level_factors = factor(&Int::from(raw.level))
        .map_err(|e| fixture_err(line, format!("cannot factor level: {e}")))?;
    let vp = |p: u64| -> u32 {
        level_factors
            .iter()
            .find(|(q, _)| *q == Int::from(p))
            .map(|(_, e)| *e)
            .unwrap_or(0)
    };

    let mut ap = BTreeMap::new();
    for (key, value) in raw.ap {
        let p = parse_prime_key(&key, line, "ap")?;
        let a = Int::from(value);
        if raw.level % p != 0 {
            let dim = Int::from(raw.dim as u64);
            if &a * &a > Int::from(4u32) * Int::from(p) * &dim * &dim {
                return Err(fixture_err(
                    line,
                    format!("a_{p} = {a} violates the trace bound for dimension {}", raw.dim),
                ));
            }
        }
        if ap.insert(p, a).is_some() {
            return Err(fixture_err(line, format!("duplicate ap key {p}")));
        }
    }

    let mut bad = BTreeMap::new();
    for (key, loc) in raw.bad {
        let p = parse_prime_key(&key, line, "bad")?;
        let e = vp(p);
        if e == 0 {
            return Err(fixture_err(line, format!("bad prime {p} does not divide the level")));
        }
        let desc = match loc.kind {
            LocalKind::Unramified => {
                return Err(fixture_err(line, format!("bad prime {p} marked unramified")));
            }
            LocalKind::Unknown => {
                if let Some(c) = loc.c {
                    if c != e {
                        return Err(fixture_err(
                            line,
                            format!("conductor exponent {c} at {p} differs from level exponent {e}"),
                        ));
                    }
                }
                LocalRepDescriptor {
                    conductor_exp: e,
                    kind: LocalKind::Unknown,
                    minimal: loc.minimal.unwrap_or(false),
                    minimal_twist_conductor: None,
                }
            }
            kind => {
                let c = loc
                    .c
                    .ok_or_else(|| fixture_err(line, format!("missing conductor exponent at {p}")))?;
                let minimal = loc
                    .minimal
                    .ok_or_else(|| fixture_err(line, format!("missing minimal flag at {p}")))?;
                if c != e {
                    return Err(fixture_err(
                        line,
                        format!("conductor exponent {c} at {p} differs from level exponent {e}"),
                    ));
                }
                match kind {
                    LocalKind::Steinberg => {
                        if c != 1 || !minimal {
                            return Err(fixture_err(
                                line,
                                format!("steinberg at {p} requires conductor 1 and minimality"),
                            ));
                        }
                        if let Some(a) = ap.get(&p) {
                            if a.abs() != Int::from(raw.dim as u64) {
                                return Err(fixture_err(
                                    line,
                                    format!("steinberg at {p} needs |a_{p}| = dim, got {a}"),
                                ));
                            }
                        }
                    }
                    LocalKind::SpecialTwist | LocalKind::PrincipalSeries => {
                        if c < 2 {
                            return Err(fixture_err(
                                line,
                                format!("{kind} at {p} requires conductor exponent >= 2"),
                            ));
                        }
                        if minimal {
                            return Err(fixture_err(
                                line,
                                format!("{kind} at {p} is a twist and cannot be minimal"),
                            ));
                        }
                    }
                    LocalKind::Supercuspidal => {
                        if c < 2 {
                            return Err(fixture_err(
                                line,
                                format!("supercuspidal at {p} requires conductor exponent >= 2"),
                            ));
                        }
                    }
                    _ => unreachable!(),
                }
                if c >= 2 {
                    if let Some(a) = ap.get(&p) {
                        if !a.is_zero() {
                            return Err(fixture_err(
                                line,
                                format!("a_{p} must vanish when the conductor exponent is {c}"),
                            ));
                        }
                    }
                }
                LocalRepDescriptor {
                    conductor_exp: c,
                    kind,
                    minimal,
                    minimal_twist_conductor: None,
                }
            }
        };
        bad.insert(p, desc);
    }

    for (p, _) in &level_factors {
        let p = p.to_u64().ok_or_else(|| fixture_err(line, "level prime too large"))?;
        if !bad.contains_key(&p) {
            return Err(fixture_err(line, format!("no local data at prime {p} dividing the level")));
        }
    }

    Ok(NewformRecord { level: raw.level, label: raw.label, dim: raw.dim, ap, bad })
}

/// An in-memory fixture file: newform orbits indexed by level.
#[derive(Debug, Clone, Default)]
pub struct FixtureDb {
    pub records: Vec<NewformRecord>,
    by_level: BTreeMap<u64, Vec<usize>>,
}

impl FixtureDb {
    /// Parse line-delimited JSON records, validating each line. Line
    /// numbers in errors are 1-based; blank lines are permitted.
    pub fn from_str(data: &str) -> Result<FixtureDb> {
        let mut db = FixtureDb::default();
        let mut seen = BTreeSet::new();
        for (idx, text) in data.lines().enumerate() {
            let line = idx + 1;
            if text.trim().is_empty() {
                continue;
            }
            let raw: RawRecord = serde_json::from_str(text)
                .map_err(|e| fixture_err(line, format!("invalid record: {e}")))?;
            let rec = validate_record(raw, line)?;
            if !seen.insert((rec.level, rec.label.clone())) {
                return Err(fixture_err(line, format!("duplicate label {} at level {}", rec.label, rec.level)));
            }
            db.by_level.entry(rec.level).or_default().push(db.records.len());
            db.records.push(rec);
        }
        Ok(db)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// All orbits that are new at exactly the given level.
    pub fn orbits(&self, level: u64) -> Vec<&NewformRecord> {
        self.by_level
            .get(&level)
            .map(|v| v.iter().map(|&i| &self.records[i]).collect())
            .unwrap_or_default()
    }

    pub fn record(&self, level: u64, label: &str) -> Option<&NewformRecord> {
        self.orbits(level).into_iter().find(|r| r.label == label)
    }

    /// Check that the stored orbit dimensions at each listed level add up
    /// to the full new cuspidal dimension there, so that no orbit is
    /// missing from the file.
    pub fn check_coverage(&self, levels: &[u64]) -> Result<()> {
        let mut missing = Vec::new();
        for &n in levels {
            let have: u64 = self.orbits(n).iter().map(|r| r.dim as u64).sum();
            if have != dim_new_cusp(n) {
                missing.push(n);
            }
        }
        if missing.is_empty() {
            Ok(())
        } else {
            missing.sort_unstable();
            missing.dedup();
            Err(Error::FixtureCoverage(missing))
        }
    }
}

/// Load and validate a fixture file from disk.
pub fn load_fixtures(path: &Path) -> Result<FixtureDb> {
    let data = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    FixtureDb::from_str(&data)
}

fn factor_u64(n: u64) -> Vec<(u64, u32)> {
    factor(&Int::from(n))
        .expect("positive integer factors")
        .into_iter()
        .map(|(p, e)| (p.to_u64().expect("u64 prime"), e))
        .collect()
}

/// Genus of the modular curve X_0(n), i.e. the dimension of the full
/// cuspidal space of weight 2 and level n.
pub fn genus_x0(n: u64) -> u64 {
    assert!(n >= 1);
    let fs = factor_u64(n);
    let mut mu: i128 = n as i128;
    for (p, _) in &fs {
        mu = mu / *p as i128 * (*p as i128 + 1);
    }
    let nu2: i128 = if n % 4 == 0 {
        0
    } else {
        let mut v = 1i128;
        for (p, _) in &fs {
            if *p != 2 {
                v *= 1 + kronecker(&int(-1), &Int::from(*p)) as i128;
            }
        }
        v
    };
    let nu3: i128 = if n % 9 == 0 {
        0
    } else {
        let mut v = 1i128;
        for (p, _) in &fs {
            if *p != 3 {
                v *= 1 + kronecker(&int(-3), &Int::from(*p)) as i128;
            }
        }
        v
    };
    let mut divisors = vec![1u64];
    for (p, e) in &fs {
        let mut next = Vec::new();
        for d in &divisors {
            let mut pk = 1u64;
            for _ in 0..=*e {
                next.push(d * pk);
                if pk <= u64::MAX / p {
                    pk *= p;
                } else {
                    break;
                }
            }
        }
        divisors = next;
    }
    let phi = |m: u64| -> u64 {
        let mut v = m;
        for (p, _) in factor_u64(m) {
            v = v / p * (p - 1);
        }
        v
    };
    let nuinf: i128 = divisors.iter().map(|&d| phi(d.gcd(&(n / d))) as i128).sum();
    let twelve_g = 12 + mu - 3 * nu2 - 4 * nu3 - 6 * nuinf;
    assert!(twelve_g % 12 == 0 && twelve_g >= 0, "genus formula failed at {n}");
    (twelve_g / 12) as u64
}

/// Dimension of the new subspace of the weight-2 cuspidal space at level
/// n, by inclusion-exclusion over the divisors of n.
pub fn dim_new_cusp(n: u64) -> u64 {
    let fs = factor_u64(n);
    // Coefficient of the inversion: multiplicative with p -> -2, p^2 -> 1,
    // and 0 beyond that, applied to the complementary divisor.
    let mut total: i128 = 0;
    let mut stack = vec![(0usize, 1u64, 1i128)];
    while let Some((i, m, coeff)) = stack.pop() {
        if i == fs.len() {
            total += coeff * genus_x0(m) as i128;
            continue;
        }
        let (p, e) = fs[i];
        let mut pk = 1u64;
        for a in 0..=e {
            let factor = match e - a {
                0 => 1,
                1 => -2,
                2 => 1,
                _ => 0,
            };
            if factor != 0 {
                stack.push((i + 1, m * pk, coeff * factor));
            }
            pk *= p;
        }
    }
    assert!(total >= 0, "new dimension negative at {n}");
    total as u64
}

/// Multiplicity of the trivial-character fixed space in one local
/// component, as far as the implemented criteria decide it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LocalMultiplicity {
    Zero,
    One,
    Two,
    /// Equals one under a conjecture; not proved in every case.
    ConjecturalOne,
    /// The criteria implemented here do not decide this case.
    Unknown,
}

impl LocalMultiplicity {
    /// Numeric value when decided (conjecturally or not).
    pub fn count(&self) -> Option<usize> {
        match self {
            LocalMultiplicity::Zero => Some(0),
            LocalMultiplicity::One | LocalMultiplicity::ConjecturalOne => Some(1),
            LocalMultiplicity::Two => Some(2),
            LocalMultiplicity::Unknown => None,
        }
    }
}

/// Valuation-of-different parameter for a ramified quadratic extension of
/// the 2-adic field, read off from the discriminant of the stored
/// quadratic generator: 1 for odd square classes, 2 for even ones.
fn dyadic_t(ord: &OrderLocalType) -> Option<u32> {
    let d = ord.e_disc.as_ref()?;
    if d.is_zero() {
        return None;
    }
    let mut v = 0u32;
    let mut m = d.clone();
    let two = int(2);
    while m.is_multiple_of(&two) {
        m /= &two;
        v += 1;
    }
    if v % 2 == 1 {
        Some(2)
    } else {
        // Odd square class: ramified iff the odd part is 3 mod 4.
        let r = m.mod_floor(&int(4));
        if r == int(3) {
            Some(1)
        } else {
            None
        }
    }
}

/// Decide the dimension of the fixed space of a local component under the
/// unit group of one local order factor.
///
/// The rules, applied in order:
/// 1. Spherical and ramified principal series components never transfer to
///    a definite quaternion algebra, so they contribute zero.
/// 2. A conductor exponent above the level exponent contributes zero.
/// 3. Steinberg components contribute one for either local order type.
/// 4. Ramified quadratic twists of Steinberg contribute zero for the
///    unramified type (the norm map is onto the units, so the character
///    is nontrivial on them), one for the ramified type at odd p (norms
///    are the squares there), and are undecided at p = 2.
/// 5. Minimal supercuspidals: for the unramified type, one when the
///    conductor exponent is odd and zero when it is even; for the
///    ramified type, two when it is even, one at odd p under a
///    conjecture when it is odd and below the level exponent, one at
///    p = 2 with conductor exponent 3 below the level exponent, and
///    otherwise undecided.
/// 6. Non-minimal supercuspidals contribute zero for the unramified type
///    and for the ramified type at odd p; at p = 2 they contribute zero
///    when the conductor is far enough above both the different and the
///    minimal twist, and are otherwise undecided.
///
/// The result never exceeds the ramification degree of the quadratic
/// field attached to the order type: at most one for the unramified type
/// and at most two for the ramified type.
pub fn local_multiplicity(rep: &LocalRepDescriptor, ord: &OrderLocalType) -> LocalMultiplicity {
    let c = rep.conductor_exp;
    let r = ord.r;
    let out = local_multiplicity_inner(rep, ord, c, r);
    if let Some(m) = out.count() {
        let bound = match ord.etype {
            EType::Unramified => 1,
            EType::Ramified => 2,
        };
        assert!(m <= bound, "local multiplicity exceeds ramification degree");
    }
    out
}

fn local_multiplicity_inner(
    rep: &LocalRepDescriptor,
    ord: &OrderLocalType,
    c: u32,
    r: u32,
) -> LocalMultiplicity {
    match rep.kind {
        LocalKind::Unramified | LocalKind::PrincipalSeries => return LocalMultiplicity::Zero,
        LocalKind::Unknown => return LocalMultiplicity::Unknown,
        _ => {}
    }
    if c > r {
        return LocalMultiplicity::Zero;
    }
    let dyadic = ord.p == int(2);
    match (rep.kind, ord.etype) {
        (LocalKind::Steinberg, _) => LocalMultiplicity::One,
        (LocalKind::SpecialTwist, EType::Unramified) => LocalMultiplicity::Zero,
        (LocalKind::SpecialTwist, EType::Ramified) => {
            if dyadic {
                LocalMultiplicity::Unknown
            } else {
                LocalMultiplicity::One
            }
        }
        (LocalKind::Supercuspidal, EType::Unramified) => {
            if !rep.minimal {
                LocalMultiplicity::Zero
            } else if c % 2 == 1 {
                LocalMultiplicity::One
            } else {
                LocalMultiplicity::Zero
            }
        }
        (LocalKind::Supercuspidal, EType::Ramified) => {
            if rep.minimal {
                if c % 2 == 0 {
                    LocalMultiplicity::Two
                } else if !dyadic && c < r {
                    LocalMultiplicity::ConjecturalOne
                } else if dyadic && c == 3 && c < r {
                    LocalMultiplicity::One
                } else {
                    LocalMultiplicity::Unknown
                }
            } else if !dyadic {
                LocalMultiplicity::Zero
            } else {
                match (dyadic_t(ord), rep.minimal_twist_conductor) {
                    (Some(t), Some(ct)) if c >= 2 * t + 4 && c > ct && c - ct > t => {
                        LocalMultiplicity::Zero
                    }
                    _ => LocalMultiplicity::Unknown,
                }
            }
        }
        _ => unreachable!("remaining kinds handled above"),
    }
}

/// How firmly a predicted multiplicity is established. Ordered so that
/// the minimum over factors is the weakest link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Confidence {
    Unknown,
    Conjectural,
    Proven,
}

/// One isotypic block of the predicted decomposition: a newform orbit at
/// a compatible level, with its multiplicity in the cusp space.
#[derive(Debug, Clone, Serialize)]
pub struct PredictedTerm {
    pub level: u64,
    pub label: String,
    pub dim: usize,
    /// Predicted multiplicity; 0 with `Unknown` confidence when the local
    /// criteria cannot decide the orbit.
    pub multiplicity: usize,
    pub confidence: Confidence,
}

/// Predicted decomposition of the cusp space of one special order.
#[derive(Debug, Clone, Serialize)]
pub struct DecompositionPrediction {
    pub order_level: u64,
    pub terms: Vec<PredictedTerm>,
    /// Sum of multiplicity times dimension over decided terms; absent when
    /// any orbit is undecided.
    pub predicted_cusp_dim: Option<u64>,
    pub conjectural: bool,
    pub undecided: bool,
}

/// Predict the isotypic decomposition of the cusp space of the order from
/// fixture data alone.
///
/// Every compatible smaller level of the order contributes the orbits new
/// at that level, with multiplicity the product of the lattice-counting
/// multiplicity of the level and the local factors at the primes where
/// the order has a non-Eichler local type. Orbits whose multiplicity
/// comes out zero are dropped; orbits the local rules cannot decide are
/// kept with `Unknown` confidence.
pub fn predict_decomposition(order: &Order, db: &FixtureDb) -> Result<DecompositionPrediction> {
    let order_level = order
        .level
        .to_u64()
        .ok_or_else(|| Error::InvalidArgument("order level too large".into()))?;
    let supers = order.superorder_levels();
    let mut levels = Vec::new();
    for s in &supers {
        levels.push(
            s.level
                .to_u64()
                .ok_or_else(|| Error::InvalidArgument("tower level too large".into()))?,
        );
    }
    db.check_coverage(&levels)?;

    let mut terms = Vec::new();
    for (s, &lvl) in supers.iter().zip(&levels) {
        for orbit in db.orbits(lvl) {
            let mut mult = s.multiplicity;
            let mut confidence = Confidence::Proven;
            let mut undecided = false;
            for loc in &s.locals {
                let p = loc
                    .p
                    .to_u64()
                    .ok_or_else(|| Error::InvalidArgument("local prime too large".into()))?;
                let desc = orbit.local_descriptor(p);
                match local_multiplicity(&desc, loc) {
                    LocalMultiplicity::Zero => {
                        mult = 0;
                        break;
                    }
                    LocalMultiplicity::One => {}
                    LocalMultiplicity::Two => mult *= 2,
                    LocalMultiplicity::ConjecturalOne => {
                        confidence = confidence.min(Confidence::Conjectural);
                    }
                    LocalMultiplicity::Unknown => {
                        undecided = true;
                    }
                }
            }
            if undecided {
                terms.push(PredictedTerm {
                    level: lvl,
                    label: orbit.label.clone(),
                    dim: orbit.dim,
                    multiplicity: 0,
                    confidence: Confidence::Unknown,
                });
            } else if mult > 0 {
                terms.push(PredictedTerm {
                    level: lvl,
                    label: orbit.label.clone(),
                    dim: orbit.dim,
                    multiplicity: mult,
                    confidence,
                });
            }
        }
    }

    let undecided = terms.iter().any(|t| t.confidence == Confidence::Unknown);
    let conjectural = terms.iter().any(|t| t.confidence == Confidence::Conjectural);
    let predicted_cusp_dim = if undecided {
        None
    } else {
        Some(terms.iter().map(|t| (t.multiplicity * t.dim) as u64).sum())
    };
    Ok(DecompositionPrediction { order_level, terms, predicted_cusp_dim, conjectural, undecided })
}

/// Outcome of comparing one Hecke operator against a prediction.
#[derive(Debug, Clone, Serialize)]
pub struct PrimeCheck {
    pub ell: u64,
    pub matched: bool,
    pub detail: String,
}

/// Result of verifying a predicted decomposition against computed Brandt
/// characteristic polynomials.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<PrimeCheck>,
    pub all_matched: bool,
    pub conjectural: bool,
    pub undecided: bool,
}

/// Verify a predicted decomposition at the given primes, which must be
/// coprime to the order level.
///
/// For each prime, the characteristic polynomial of the Brandt operator
/// on the cusp space must be divisible by (x - a)^multiplicity for every
/// one-dimensional predicted term with trace a, and the remaining factor
/// must have the degree and root sum dictated by the higher-dimensional
/// terms. When every term has dimension one this forces full equality of
/// polynomials, which in particular rules out any orbit the prediction
/// excludes.
pub fn verify_decomposition(
    pred: &DecompositionPrediction,
    db: &FixtureDb,
    tower: &mut Tower,
    primes: &[u64],
) -> Result<VerificationReport> {
    let base_level = Int::from(pred.order_level);
    let mut checks = Vec::new();
    for &ell in primes {
        if !Int::from(ell).gcd(&base_level).is_one() {
            return Err(Error::InvalidArgument(format!(
                "verification prime {ell} divides the level {base_level}"
            )));
        }
        let computed = tower.module(&base_level)?.cusp_charpoly(&Int::from(ell))?;
        let mut residual = computed;
        let mut matched = true;
        let mut detail = String::new();
        let mut residual_degree = 0usize;
        let mut residual_trace = Int::zero();
        for term in &pred.terms {
            if term.confidence == Confidence::Unknown {
                continue;
            }
            let orbit = db.record(term.level, &term.label).ok_or_else(|| {
                Error::InvalidArgument(format!("missing fixture {} at level {}", term.label, term.level))
            })?;
            let a = orbit.trace(ell).ok_or_else(|| {
                Error::InvalidArgument(format!("fixture {} lacks a_{ell}", term.label))
            })?;
            if term.dim == 1 {
                let lin = CharPoly::linear(a).pow(term.multiplicity);
                match residual.div_exact(&lin) {
                    Ok(q) => residual = q,
                    Err(_) => {
                        matched = false;
                        detail = format!(
                            "(x - {a})^{} from {} does not divide the cusp polynomial at {ell}",
                            term.multiplicity, term.label
                        );
                        break;
                    }
                }
            } else {
                residual_degree += term.multiplicity * term.dim;
                residual_trace += Int::from(term.multiplicity as u64) * a;
            }
        }
        if matched {
            if residual.degree() != residual_degree {
                matched = false;
                detail = format!(
                    "residual degree {} at {ell}, expected {residual_degree}",
                    residual.degree()
                );
            } else if residual.root_sum() != residual_trace {
                matched = false;
                detail = format!(
                    "residual trace {} at {ell}, expected {residual_trace}",
                    residual.root_sum()
                );
            } else {
                detail = format!("degree {} residual matched", residual_degree);
            }
        }
        checks.push(PrimeCheck { ell, matched, detail });
    }
    Ok(VerificationReport {
        all_matched: checks.iter().all(|c| c.matched),
        checks,
        conjectural: pred.conjectural,
        undecided: pred.undecided,
    })
}

fn fp_reduce(x: &Int, p: u64) -> u64 {
    x.mod_floor(&Int::from(p)).to_u64().expect("reduced residue fits")
}

/// Rank of a matrix over the prime field F_p, by Gaussian elimination.
fn fp_rank(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&i| rows[i][col] % p != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = mod_inverse_u64(rows[rank][col] % p, p);
        for j in col..cols {
            rows[rank][j] = mulmod(rows[rank][j] % p, inv, p);
        }
        for i in 0..rows.len() {
            if i != rank && rows[i][col] % p != 0 {
                let f = rows[i][col] % p;
                for j in col..cols {
                    let sub = mulmod(f, rows[rank][j], p);
                    rows[i][j] = (rows[i][j] % p + p - sub) % p;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn mod_inverse_u64(a: u64, p: u64) -> u64 {
    // p is prime and a is nonzero mod p.
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = mulmod(result, base, p);
        }
        base = mulmod(base, base, p);
        e >>= 1;
    }
    result
}

/// Test the Eisenstein congruence for the odd prime p at level p^3.
///
/// Builds the unramified-type order of level p^3 in the algebra ramified
/// at p, cuts out the new subspace of its cusp space, and asks whether
/// the reductions mod p of A_ell - (1 + ell), restricted to that
/// subspace, share a nonzero common kernel over all ell in the set.
pub fn congruence_check(p: u64, ells: &[u64]) -> Result<bool> {
    if p == 2 {
        return Err(Error::Unsupported("the congruence test needs an odd prime".into()));
    }
    if !is_prime(&Int::from(p)) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    if ells.is_empty() {
        return Err(Error::InvalidArgument("empty operator set".into()));
    }
    let mut bound = int(2);
    for &ell in ells {
        if !is_prime(&Int::from(ell)) {
            return Err(Error::InvalidArgument(format!("{ell} is not prime")));
        }
        if ell % p == 0 {
            return Err(Error::InvalidArgument(format!("operator prime {ell} divides {p}")));
        }
        bound = bound.max(Int::from(ell));
    }
    let alg = construct_definite(&Int::from(p))?;
    let level = Int::from(p).pow(3);
    let order = build_order(&alg, &level, &BTreeMap::new())?;
    let mut tower = Tower::new(&order, &bound, &ClassSetOptions::default())?;
    let w = tower.new_subspace()?;
    if w.rows == 0 {
        return Ok(false);
    }
    let d = w.rows;
    let mut constraints: Vec<Vec<u64>> = Vec::new();
    for &ell in ells {
        let b = tower.block_action(&w, &Int::from(ell))?;
        let lambda = (1 + ell) % p;
        // Coordinates transform by right multiplication, so the common
        // eigenvectors are cut out by the columns of b - lambda.
        for k in 0..d {
            let mut row = Vec::with_capacity(d);
            for i in 0..d {
                let mut v = fp_reduce(&b[(i, k)], p);
                if i == k {
                    v = (v + p - lambda) % p;
                }
                row.push(v);
            }
            constraints.push(row);
        }
    }
    Ok(fp_rank(constraints, p) < d)
}

/// Predicted dimension of the kernel of the theta map on the subspace new
/// at the order's own level: each orbit contributes 2^s - 1 copies of its
/// dimension, where s counts the ramified-type primes of the order at
/// which the orbit's local component has dimension greater than one.
pub fn predicted_theta_kernel(order: &Order, db: &FixtureDb) -> Result<u64> {
    let pred = predict_decomposition(order, db)?;
    if pred.undecided {
        return Err(Error::Unsupported(
            "kernel prediction needs every orbit decided".into(),
        ));
    }
    let n = pred.order_level;
    let ramified_primes: Vec<u64> = order
        .locals
        .iter()
        .filter(|l| l.etype == EType::Ramified)
        .filter_map(|l| l.p.to_u64())
        .collect();
    let mut kernel = 0u64;
    for term in pred.terms.iter().filter(|t| t.level == n && t.multiplicity > 0) {
        let orbit = db
            .record(term.level, &term.label)
            .ok_or_else(|| Error::InvalidArgument(format!("missing fixture {}", term.label)))?;
        let s = ramified_primes
            .iter()
            .filter(|&&p| {
                let d = orbit.local_descriptor(p);
                !d.one_dimensional() && d.kind != LocalKind::Unramified
            })
            .count() as u32;
        kernel += (2u64.pow(s) - 1) * term.dim as u64;
    }
    Ok(kernel)
}
