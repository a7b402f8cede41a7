//! q-expansions: theta series of ideal pairs, their span on the new
//! subspace, weight-2 Eisenstein series with constrained divisor sums,
//! and eta products used as independent oracles.

use crate::arith::{divisor_sum_constrained, factor};
use crate::brandt::{BrandtFamily, Tower};
use crate::error::{Error, Result};
use crate::{Int, Rat};
use num_traits::{One, Signed, Zero};

/// A q-expansion a_0 + a_1 q + ... + a_prec q^prec with exact rational
/// coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QExpansion {
    pub coeffs: Vec<Rat>,
}

impl QExpansion {
    pub fn zero(prec: usize) -> QExpansion {
        QExpansion { coeffs: vec![Rat::zero(); prec + 1] }
    }

    /// Highest exponent carried by this expansion.
    pub fn prec(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn get(&self, n: usize) -> &Rat {
        &self.coeffs[n]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

impl std::fmt::Display for QExpansion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut wrote = false;
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let abs = c.abs();
            if wrote {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            let unit_coeff = abs.is_one() && n > 0;
            if !unit_coeff {
                write!(f, "{abs}")?;
            }
            match n {
                0 => {}
                1 => write!(f, "{}q", if unit_coeff { "" } else { "*" })?,
                _ => write!(f, "{}q^{n}", if unit_coeff { "" } else { "*" })?,
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.prec() + 1)
    }
}

/// Theta series of the (i, j) ideal pair: constant term 1/(2 e_j) and
/// higher coefficients equal to the Brandt matrix entries.
pub fn theta_entry(family: &BrandtFamily, i: usize, j: usize) -> Result<QExpansion> {
    let h = family.class_number();
    if i >= h || j >= h {
        return Err(Error::InvalidArgument("class index out of range".into()));
    }
    let prec: usize = family
        .bound
        .to_string()
        .parse()
        .map_err(|_| Error::Unsupported("bound too large for a q-expansion".into()))?;
    let mut coeffs = Vec::with_capacity(prec + 1);
    let e = &family.classes.unit_halves[j];
    coeffs.push(Rat::new(Int::one(), Int::from(2) * e));
    for n in 1..=prec {
        let raw = Int::from(family.pair_count(i, j, &Int::from(n as i64)));
        let c = Rat::new(raw, e.clone());
        if !c.is_integer() {
            return Err(Error::ConsistencyFailure(format!(
                "theta coefficient at ({i},{j},{n}) is not integral"
            )));
        }
        coeffs.push(c);
    }
    Ok(QExpansion { coeffs })
}

/// Weight-2 Eisenstein series attached to the pair (a, b): constant term
/// -(1/24) prod_{p | ab} (1 - 1/p) and coefficients the divisor sums over
/// d | n with d coprime to a and n/d coprime to b. The pair (1, 1) has no
/// such holomorphic series.
pub fn eisenstein_q_expansion(a: &Int, b: &Int, prec: usize) -> Result<QExpansion> {
    if a < &Int::one() || b < &Int::one() {
        return Err(Error::InvalidArgument("parameters must be positive".into()));
    }
    let ab = a * b;
    if ab.is_one() {
        return Err(Error::InvalidArgument(
            "no weight-2 Eisenstein series exists for the pair (1, 1)".into(),
        ));
    }
    let mut c0 = -Rat::new(Int::one(), Int::from(24));
    for (p, _) in factor(&ab)? {
        c0 *= Rat::one() - Rat::new(Int::one(), p);
    }
    let mut coeffs = vec![c0];
    for n in 1..=prec {
        coeffs.push(Rat::from(divisor_sum_constrained(&Int::from(n as i64), a, b)?));
    }
    Ok(QExpansion { coeffs })
}

/// Integer q-expansion of prod_m eta(m z)^{e_m} for the given list of
/// (m, e_m); the weight-24 offset sum m e_m must be divisible by 24.
pub fn eta_product(parts: &[(u32, u32)], prec: usize) -> Result<QExpansion> {
    if parts.is_empty() {
        return Err(Error::InvalidArgument("empty eta product".into()));
    }
    let offset_24: u64 = parts.iter().map(|&(m, e)| m as u64 * e as u64).sum();
    if offset_24 % 24 != 0 {
        return Err(Error::InvalidArgument(format!(
            "eta product exponent sum {offset_24} is not divisible by 24"
        )));
    }
    let offset = (offset_24 / 24) as usize;
    if offset > prec {
        return Ok(QExpansion::zero(prec));
    }
    let inner = prec - offset;
    let mut c = vec![Int::zero(); inner + 1];
    c[0] = Int::one();
    for &(m, e) in parts {
        for _ in 0..e {
            let mut k = m as usize;
            while k <= inner {
                // multiply by (1 - q^k)
                for i in (k..=inner).rev() {
                    let d = &c[i - k] * Int::one();
                    c[i] -= d;
                }
                k += m as usize;
            }
        }
    }
    let mut coeffs = vec![Rat::zero(); prec + 1];
    for (i, v) in c.into_iter().enumerate() {
        coeffs[offset + i] = Rat::from(v);
    }
    Ok(QExpansion { coeffs })
}

/// Reduced row echelon form over the rationals; returns the nonzero rows
/// with leading coefficient 1 in canonical pivot order.
fn rref(mut rows: Vec<Vec<Rat>>) -> Vec<Vec<Rat>> {
    if rows.is_empty() {
        return rows;
    }
    let cols = rows[0].len();
    let mut rank = 0usize;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = rows[rank][c].recip();
        for x in rows[rank].iter_mut() {
            *x *= &inv;
        }
        for r in 0..rows.len() {
            if r != rank && !rows[r][c].is_zero() {
                let f = rows[r][c].clone();
                for k in 0..cols {
                    let s = &rows[rank][k] * &f;
                    rows[r][k] -= s;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
    rows
}

/// Echelonized basis of the span of theta series restricted to the new
/// subspace of the tower's base level, to the precision of the tower's
/// bound. Every series is cuspidal: its constant term vanishes because
/// the restricting vectors are orthogonal to the Eisenstein vectors.
pub fn theta_new_span(tower: &mut Tower, prec: usize) -> Result<Vec<QExpansion>> {
    if Int::from(prec as i64) > tower.bound {
        return Err(Error::InvalidArgument(format!(
            "requested precision {prec} exceeds the computed bound {}",
            tower.bound
        )));
    }
    let w = tower.new_subspace()?;
    let base = tower.base();
    let embed = w.mul(&base.cusp);
    let s = embed.rows;
    let h = base.class_number();
    let e = base.family.classes.unit_halves.clone();
    // constant terms vanish: sum_j v_j / (2 e_j) = 0 for cusp vectors
    for t in 0..s {
        let mut c0 = Rat::zero();
        for j in 0..h {
            c0 += Rat::new(embed[(t, j)].clone(), Int::from(2) * &e[j]);
        }
        if !c0.is_zero() {
            return Err(Error::ConsistencyFailure(
                "new-subspace vector is not cuspidal".into(),
            ));
        }
    }
    let mut rows = Vec::new();
    for a in 0..s {
        for b in 0..s {
            let mut row = vec![Rat::zero(); prec];
            for (idx, r) in row.iter_mut().enumerate() {
                let n = Int::from((idx + 1) as i64);
                let mut acc = Rat::zero();
                for i in 0..h {
                    if embed[(a, i)].is_zero() {
                        continue;
                    }
                    for j in 0..h {
                        if embed[(b, j)].is_zero() {
                            continue;
                        }
                        let raw = Int::from(base.family.pair_count(i, j, &n));
                        if raw.is_zero() {
                            continue;
                        }
                        acc += Rat::new(&embed[(a, i)] * &embed[(b, j)] * raw, e[j].clone());
                    }
                }
                *r = acc;
            }
            rows.push(row);
        }
    }
    let basis = rref(rows);
    Ok(basis
        .into_iter()
        .map(|row| {
            let mut coeffs = vec![Rat::zero()];
            coeffs.extend(row);
            QExpansion { coeffs }
        })
        .collect())
}

/// Index of the congruence subgroup of the level divided by 6, rounded
/// up: a weight-2 form vanishing to this order is zero, so ranks of
/// coefficient matrices stabilize here.
pub fn sturm_bound(level: &Int) -> Result<usize> {
    let mut mu = Rat::from(level.clone());
    for (p, _) in factor(level)? {
        mu *= Rat::one() + Rat::new(Int::one(), p);
    }
    let six = (mu / Rat::from(Int::from(6))).ceil().to_integer();
    six.to_string()
        .parse()
        .map_err(|_| Error::Unsupported("level too large for a Sturm bound".into()))
}

/// Rank of the new-subspace theta span at Sturm precision plus margin,
/// and the codimension inside the new subspace (the kernel dimension of
/// the theta map on the new part).
pub fn theta_kernel_dimension(tower: &mut Tower, margin: usize) -> Result<(usize, usize)> {
    let level = tower.base().order.level.clone();
    let prec = sturm_bound(&level)? + margin;
    let span = theta_new_span(tower, prec)?;
    let new_dim = tower.new_subspace()?.rows;
    Ok((span.len(), new_dim - span.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideal::ClassSetOptions;
    use crate::order::build_order;
    use crate::quat::construct_definite;
    use crate::{hecke_module, int, rat};
    use std::collections::BTreeMap;

    #[test]
    fn eisenstein_series_eleven() {
        let e = eisenstein_q_expansion(&int(11), &int(1), 6).unwrap();
        assert_eq!(*e.get(0), rat(-5, 132));
        let tail: Vec<i64> = (1..=6).map(|n| e.get(n).to_integer().to_string().parse().unwrap()).collect();
        assert_eq!(tail, vec![1, 3, 4, 7, 6, 12]);
    }

    #[test]
    fn eisenstein_series_composite_pair() {
        let e = eisenstein_q_expansion(&int(2), &int(3), 6).unwrap();
        assert_eq!(*e.get(0), rat(-1, 72));
        assert_eq!(*e.get(2), rat(1, 1));
        assert_eq!(*e.get(3), rat(3, 1));
        assert_eq!(*e.get(5), rat(6, 1));
        assert!(eisenstein_q_expansion(&int(1), &int(1), 4).is_err());
    }

    #[test]
    fn eta_product_pins() {
        // eta(z)^2 eta(11 z)^2 = q prod (1-q^n)^2 (1-q^{11n})^2; the first
        // coefficients follow from squaring the pentagonal number series
        let f = eta_product(&[(1, 2), (11, 2)], 7).unwrap();
        let vals: Vec<Rat> = (0..=7).map(|n| f.get(n).clone()).collect();
        let expect: Vec<Rat> =
            [0, 1, -2, -1, 2, 1, 2, -2].iter().map(|&v| rat(v, 1)).collect();
        assert_eq!(vals, expect);
        // eta(z)^24 starts q - 24 q^2
        let d = eta_product(&[(1, 24)], 3).unwrap();
        assert_eq!(*d.get(1), rat(1, 1));
        assert_eq!(*d.get(2), rat(-24, 1));
        assert!(eta_product(&[(1, 1)], 5).is_err());
    }

    #[test]
    fn theta_entries_match_brandt_entries() {
        let alg = construct_definite(&int(11)).unwrap();
        let o = build_order(&alg, &int(11), &BTreeMap::new()).unwrap();
        let m = hecke_module(&o, &int(6), &ClassSetOptions::default()).unwrap();
        let t00 = theta_entry(&m.family, 0, 0).unwrap();
        assert_eq!(*t00.get(0), rat(1, 4));
        assert_eq!(*t00.get(1), rat(1, 1));
        assert_eq!(*t00.get(2), rat(1, 1));
        let t01 = theta_entry(&m.family, 0, 1).unwrap();
        assert_eq!(*t01.get(0), rat(1, 6));
        assert_eq!(*t01.get(1), rat(0, 1));
        assert_eq!(*t01.get(2), rat(2, 1));
        for n in 0..=6 {
            let a = if n == 0 {
                m.family.matrix_zero()[(0, 1)].clone()
            } else {
                Rat::from(m.brandt(&int(n as i64)).unwrap()[(0, 1)].clone())
            };
            assert_eq!(*t01.get(n), a);
        }
    }

    #[test]
    fn new_span_at_eleven_is_the_eta_product() {
        let alg = construct_definite(&int(11)).unwrap();
        let o = build_order(&alg, &int(11), &BTreeMap::new()).unwrap();
        let mut tower = crate::brandt::Tower::new(&o, &int(20), &ClassSetOptions::default()).unwrap();
        let span = theta_new_span(&mut tower, 20).unwrap();
        assert_eq!(span.len(), 1);
        let oracle = eta_product(&[(1, 2), (11, 2)], 20).unwrap();
        assert_eq!(span[0], oracle);
    }

    #[test]
    fn sturm_bounds() {
        assert_eq!(sturm_bound(&int(11)).unwrap(), 2);
        assert_eq!(sturm_bound(&int(121)).unwrap(), 22);
        assert_eq!(sturm_bound(&int(22)).unwrap(), 6);
    }

    #[test]
    fn display_forms() {
        let f = QExpansion { coeffs: vec![rat(-5, 132), rat(1, 1), rat(3, 1)] };
        assert_eq!(f.to_string(), "-5/132 + q + 3*q^2 + O(q^3)");
        let z = QExpansion::zero(2);
        assert_eq!(z.to_string(), "0 + O(q^3)");
    }
}
