//! Exhaustive-enumeration oracle for the k-th moment of the indicator
//! sum `N = sum_{l,m} 1{X_l = Y_m}` over two sets of IID uniform draws
//! from a small alphabet, together with the exact-rational form of the
//! bound it is checked against.
//!
//! The alphabet model makes the moment exactly computable: with m
//! symbols, `Q = 1/m` and the full outcome space has only `m^(2n)`
//! points, so both sides of the comparison are exact rationals and the
//! dominance check involves no floating point at all.

use crate::combinat::{b_weight_exact, StirlingTable};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

/// Enumeration limits; beyond these the outcome space is pointlessly
/// large for an oracle.
pub const ORACLE_MAX_N: usize = 3;
pub const ORACLE_MAX_M: usize = 3;
pub const ORACLE_MAX_K: usize = 5;

/// Exact `E[N^k]` for `n` draws per side over an `m`-letter alphabet.
pub fn exact_moment_small(n: usize, m: usize, k: usize) -> Result<BigRational> {
    if n == 0 || n > ORACLE_MAX_N {
        return Err(Error::SizeLimit {
            context: "exact_moment_small",
            reason: format!("n must be in 1..={ORACLE_MAX_N}, got {n}"),
        });
    }
    if m == 0 || m > ORACLE_MAX_M {
        return Err(Error::SizeLimit {
            context: "exact_moment_small",
            reason: format!("m must be in 1..={ORACLE_MAX_M}, got {m}"),
        });
    }
    if k == 0 || k > ORACLE_MAX_K {
        return Err(Error::SizeLimit {
            context: "exact_moment_small",
            reason: format!("k must be in 1..={ORACLE_MAX_K}, got {k}"),
        });
    }

    let outcomes = m.pow(n as u32) as u64;
    let mut sum: u64 = 0;
    let decode = |mut code: u64| -> Vec<usize> {
        (0..n)
            .map(|_| {
                let s = (code % m as u64) as usize;
                code /= m as u64;
                s
            })
            .collect()
    };
    for xc in 0..outcomes {
        let x = decode(xc);
        for yc in 0..outcomes {
            let y = decode(yc);
            let count = x
                .iter()
                .map(|&xv| y.iter().filter(|&&yv| yv == xv).count())
                .sum::<usize>() as u64;
            sum += count.pow(k as u32);
        }
    }
    let total = BigInt::from(m.pow(2 * n as u32));
    Ok(BigRational::new(BigInt::from(sum), total))
}

/// Exact-rational right-hand side of the moment bound for `Q = 1/m`:
/// `k (k+1) B(k) * [(n^2/m)^k if n^2/m >= 1 else n^2/m]`.
pub fn moment_bound_rhs_exact(n: usize, m: usize, k: usize) -> Result<BigRational> {
    if k == 0 {
        return Err(Error::param("k", "must be >= 1"));
    }
    let table = StirlingTable::new(k)?;
    let bk = b_weight_exact(&table, k);
    let n2q = BigRational::new(BigInt::from(n * n), BigInt::from(m));
    let bracket = if n2q >= BigRational::one() {
        let mut acc = BigRational::one();
        for _ in 0..k {
            acc *= &n2q;
        }
        acc
    } else {
        n2q
    };
    Ok(BigRational::from(BigInt::from(k * (k + 1))) * bk * bracket)
}
