//! Exact Stirling numbers of the second kind and the derived moment
//! weights `B(k) = sum_{d=1}^{k} S(k,d) * k^{2d} / d!`.
//!
//! Stirling numbers are kept as arbitrary-precision integers; the
//! weights are accumulated exactly over rationals and stored as natural
//! logarithms, which is the only form the bound evaluation needs.

use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Largest supported table size; `k^{2k}` for k = 64 is still cheap to
/// handle exactly, and the bound minimization never needs more.
pub const K_MAX_LIMIT: usize = 64;

/// Triangular table of Stirling numbers of the second kind,
/// `S(k, l)` for `1 <= l <= k <= k_max`.
#[derive(Debug, Clone)]
pub struct StirlingTable {
    k_max: usize,
    rows: Vec<Vec<BigUint>>,
}

impl StirlingTable {
    /// Build the table by the recurrence
    /// `S(k, l) = l * S(k-1, l) + S(k-1, l-1)`.
    pub fn new(k_max: usize) -> Result<Self> {
        if !(1..=K_MAX_LIMIT).contains(&k_max) {
            return Err(Error::param(
                "k_max",
                format!("must be in 1..={K_MAX_LIMIT}, got {k_max}"),
            ));
        }
        let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(k_max);
        rows.push(vec![BigUint::one()]);
        for k in 2..=k_max {
            let prev = &rows[k - 2];
            let mut row = Vec::with_capacity(k);
            for l in 1..=k {
                let mut v = BigUint::zero();
                if l < k {
                    v += BigUint::from(l) * &prev[l - 1];
                }
                if l >= 2 {
                    v += &prev[l - 2];
                }
                row.push(v);
            }
            rows.push(row);
        }
        Ok(StirlingTable { k_max, rows })
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// `S(k, l)`; panics outside the triangle.
    pub fn get(&self, k: usize, l: usize) -> &BigUint {
        assert!(1 <= l && l <= k && k <= self.k_max, "S({k},{l}) out of range");
        &self.rows[k - 1][l - 1]
    }

    /// Row sum `sum_l S(k, l)`, i.e. the k-th Bell number.
    pub fn row_sum(&self, k: usize) -> BigUint {
        self.rows[k - 1].iter().sum()
    }
}

/// Bell numbers by the triangle recurrence, independent of the Stirling
/// table (used to cross-check it).
pub fn bell_numbers(k_max: usize) -> Vec<BigUint> {
    let mut out = Vec::with_capacity(k_max);
    let mut row = vec![BigUint::one()];
    out.push(BigUint::one()); // Bell(1)
    for _ in 2..=k_max {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(row.last().unwrap().clone());
        for v in &row {
            let last: BigUint = next.last().unwrap() + v;
            next.push(last);
        }
        out.push(next.last().unwrap().clone());
        row = next;
    }
    out
}

/// Exact `B(k)` as a rational.
pub fn b_weight_exact(stirling: &StirlingTable, k: usize) -> BigRational {
    let mut acc = BigRational::zero();
    let mut fact = BigInt::one();
    let kk = BigUint::from(k * k);
    let mut kpow = BigUint::one();
    for d in 1..=k {
        fact *= BigInt::from(d);
        kpow *= &kk; // k^{2d}
        let num = BigInt::from(stirling.get(k, d) * &kpow);
        acc += BigRational::new(num, fact.clone());
    }
    acc
}

/// Logarithms of the weights `B(1) ..= B(k_max)`.
#[derive(Debug, Clone)]
pub struct BWeights {
    log_b: Vec<f64>,
}

impl BWeights {
    pub fn new(k_max: usize) -> Result<Self> {
        let table = StirlingTable::new(k_max)?;
        let log_b = (1..=k_max)
            .map(|k| ln_rational(&b_weight_exact(&table, k)))
            .collect();
        Ok(BWeights { log_b })
    }

    pub fn k_max(&self) -> usize {
        self.log_b.len()
    }

    /// ln B(k).
    pub fn log_b(&self, k: usize) -> f64 {
        self.log_b[k - 1]
    }
}

/// Natural log of a positive big rational, exact to f64 resolution even
/// when numerator or denominator overflow f64.
fn ln_rational(r: &BigRational) -> f64 {
    assert!(r.is_positive(), "ln of non-positive rational");
    ln_bigint(r.numer()) - ln_bigint(r.denom())
}

fn ln_bigint(x: &BigInt) -> f64 {
    let mag = x.magnitude();
    let bits = mag.bits();
    if bits <= 1000 {
        return mag.to_f64().expect("fits in f64 range").ln();
    }
    // ln(m * 2^s) = ln m + s ln 2 with m the top bits
    let shift = bits - 512;
    let top = mag >> shift;
    top.to_f64().expect("shifted value fits").ln() + shift as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_rows_are_one() {
        let t = StirlingTable::new(12).unwrap();
        for k in 1..=12 {
            assert_eq!(t.get(k, 1), &BigUint::one());
            assert_eq!(t.get(k, k), &BigUint::one());
        }
    }

    /// Count set partitions of {0..k-1} into exactly l blocks by direct
    /// enumeration (restricted growth strings).
    fn partitions_by_enumeration(k: usize, l: usize) -> u64 {
        fn rec(assign: &mut Vec<usize>, k: usize, blocks: usize, l: usize) -> u64 {
            if assign.len() == k {
                return u64::from(blocks == l);
            }
            let mut total = 0;
            for b in 0..blocks.min(l) {
                assign.push(b);
                total += rec(assign, k, blocks, l);
                assign.pop();
            }
            if blocks < l {
                assign.push(blocks);
                total += rec(assign, k, blocks + 1, l);
                assign.pop();
            }
            total
        }
        rec(&mut Vec::new(), k, 0, l)
    }

    #[test]
    fn matches_set_partition_enumeration() {
        let t = StirlingTable::new(9).unwrap();
        for k in 1..=9 {
            for l in 1..=k {
                let want = partitions_by_enumeration(k, l);
                assert_eq!(t.get(k, l), &BigUint::from(want), "S({k},{l})");
            }
        }
    }

    #[test]
    fn row_sums_are_bell_numbers() {
        let t = StirlingTable::new(10).unwrap();
        let bell = bell_numbers(10);
        for k in 1..=10 {
            assert_eq!(t.row_sum(k), bell[k - 1], "k={k}");
        }
        // spot-check the classical values
        assert_eq!(bell[0], BigUint::from(1u32));
        assert_eq!(bell[4], BigUint::from(52u32));
        assert_eq!(bell[9], BigUint::from(115_975u32));
    }

    #[test]
    fn b_weights_small_values() {
        let t = StirlingTable::new(4).unwrap();
        // direct evaluation of the defining sum
        assert_eq!(b_weight_exact(&t, 1), BigRational::from(BigInt::from(1)));
        assert_eq!(b_weight_exact(&t, 2), BigRational::from(BigInt::from(12)));
        // 1*9/1! + 3*81/2! + 1*729/3! = 9 + 243/2 + 243/2 = 252
        assert_eq!(b_weight_exact(&t, 3), BigRational::from(BigInt::from(252)));
        // 1*16 + 7*256/2 + 6*4096/6 + 1*65536/24 = 23216/3
        assert_eq!(
            b_weight_exact(&t, 4),
            BigRational::new(BigInt::from(23216), BigInt::from(3))
        );
    }

    #[test]
    fn b_weights_increasing_and_finite() {
        let w = BWeights::new(K_MAX_LIMIT).unwrap();
        assert!((w.log_b(1) - 0.0).abs() < 1e-12);
        assert!((w.log_b(2) - 12.0f64.ln()).abs() < 1e-12);
        assert!((w.log_b(3) - 252.0f64.ln()).abs() < 1e-12);
        for k in 2..=K_MAX_LIMIT {
            assert!(w.log_b(k) > w.log_b(k - 1), "B must increase at k={k}");
            assert!(w.log_b(k).is_finite());
        }
    }

    #[test]
    fn rejects_out_of_range_k_max() {
        assert!(StirlingTable::new(0).is_err());
        assert!(StirlingTable::new(K_MAX_LIMIT + 1).is_err());
    }
}
