//! The constants `alpha_t(k)`: above `alpha_t(k) n^(t-1)` ones an
//! `n x ... x n` tensor has a full `k x ... x k` division.
//!
//! `alpha_2(k)` is a configurable base. Higher dimensions follow
//!
//! ```text
//! alpha_t(k) = 2t(k-1) [ binom(p - 1, k - 1) / p ]^(t-1),  p = 2^t alpha_{t-1}(k)^t
//! ```
//!
//! evaluated exactly; `binom(x, j)` for rational `x` is the falling factorial
//! `x (x-1) ... (x-j+1) / j!`.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Default base constant `alpha_2(k) = 2 k^4 binom(k^2, k)`.
pub fn default_base(k: usize) -> BigRational {
    let k_big = BigUint::from(k);
    let value = BigUint::from(2u32) * Pow::pow(&k_big, 4u32) * binomial(BigUint::from(k * k), k_big);
    BigRational::from_integer(BigInt::from(value))
}

/// Memoized `alpha_t(k)` values over a chosen two-dimensional base.
#[derive(Clone, Debug)]
pub struct AlphaTable {
    base: fn(usize) -> BigRational,
    entries: BTreeMap<(usize, usize), BigRational>,
}

impl Default for AlphaTable {
    fn default() -> Self {
        AlphaTable::with_base(default_base)
    }
}

impl AlphaTable {
    pub fn with_base(base: fn(usize) -> BigRational) -> Self {
        AlphaTable {
            base,
            entries: BTreeMap::new(),
        }
    }

    pub fn get(&mut self, t: usize, k: usize) -> Result<BigRational> {
        if t < 2 || k < 2 {
            return Err(Error::arg(format!("alpha needs t >= 2 and k >= 2, got t = {t}, k = {k}")));
        }
        if let Some(v) = self.entries.get(&(t, k)) {
            return Ok(v.clone());
        }
        let value = if t == 2 {
            (self.base)(k)
        } else {
            let prev = self.get(t - 1, k)?;
            closed_form_step(t, k, &prev)
        };
        self.entries.insert((t, k), value.clone());
        Ok(value)
    }

    pub fn entries(&self) -> &BTreeMap<(usize, usize), BigRational> {
        &self.entries
    }
}

/// `alpha_t(k)` under the default base.
pub fn alpha(t: usize, k: usize) -> Result<BigRational> {
    AlphaTable::default().get(t, k)
}

/// The block side `p = 2^t alpha^t` used with `alpha = alpha_{t-1}(k)`.
pub fn default_block_side(t: usize, prev: &BigRational) -> BigRational {
    let two_alpha = prev * BigRational::from_integer(2.into());
    Pow::pow(two_alpha, t)
}

/// `x (x - 1) ... (x - j + 1) / j!` for rational `x`.
pub fn rational_binomial(x: &BigRational, j: usize) -> BigRational {
    let mut acc = BigRational::one();
    for i in 0..j {
        acc *= x - BigRational::from_integer(i.into());
        acc /= BigRational::from_integer((i + 1).into());
    }
    acc
}

fn closed_form_step(t: usize, k: usize, prev: &BigRational) -> BigRational {
    let p = default_block_side(t, prev);
    let inner = rational_binomial(&(&p - BigRational::one()), k - 1) / &p;
    BigRational::from_integer((2 * t * (k - 1)).into()) * Pow::pow(inner, t - 1)
}

/// Approximate `log2` of a positive rational, good to double precision.
pub fn log2_approx(x: &BigRational) -> f64 {
    fn log2_int(n: &BigInt) -> f64 {
        let bits = n.bits();
        if bits <= 1000 {
            return n.to_f64().unwrap_or(f64::INFINITY).log2();
        }
        let shift = bits - 64;
        let top: BigInt = n >> shift;
        top.to_f64().unwrap_or(f64::INFINITY).log2() + shift as f64
    }
    log2_int(x.numer()) - log2_int(x.denom())
}

/// How much the per-block density recursion shrinks with block side `p`:
/// the coefficient `2^t alpha^(t/(t-1)) p^(-1/(t-1))` in front of
/// `c(n/p, k)`, where `alpha = alpha_{t-1}(k)`.
#[derive(Clone, Debug, Serialize)]
pub struct RecursionCoefficient {
    pub t: usize,
    pub k: usize,
    /// `log2(p)`.
    pub log2_block_side: f64,
    /// `log2` of the coefficient.
    pub log2_coefficient: f64,
    pub coefficient_approx: f64,
    /// Exact comparison against 1/2.
    pub exceeds_half: bool,
    /// Closed form when `p = 2^t alpha^t`, e.g. `2^(3/2)` at t = 3.
    pub symbolic: Option<String>,
    /// `log2` of the least `p` with coefficient at most 1/2, i.e.
    /// `2^(t^2 - 1) alpha^t`.
    pub log2_least_sufficient_side: f64,
}

/// `coefficient <= 1/2` exactly iff `2^(t^2 - 1) alpha^t <= p`.
fn least_sufficient_side(t: usize, prev: &BigRational) -> BigRational {
    let two = BigRational::from_integer(2.into());
    Pow::pow(two, t * t - 1) * Pow::pow(prev.clone(), t)
}

/// Reports the recursion coefficient for block side `p`, or for the
/// choice `p = 2^t alpha_{t-1}(k)^t` when `p` is `None`.
pub fn recursion_coefficient(
    table: &mut AlphaTable,
    t: usize,
    k: usize,
    p: Option<BigRational>,
) -> Result<RecursionCoefficient> {
    if t < 3 {
        return Err(Error::UnsupportedDimension { min: 3, got: t });
    }
    let prev = table.get(t - 1, k)?;
    let symbolic = p.is_none().then(|| {
        // 2^(t - t/(t-1)) = 2^((t^2 - 2t)/(t - 1)).
        let num = t * t - 2 * t;
        let den = t - 1;
        let g = num_integer::gcd(num, den);
        format!("2^(t - t/(t-1)) = 2^({}/{})", num / g, den / g)
    });
    let p = p.unwrap_or_else(|| default_block_side(t, &prev));
    if !p.is_positive() || p.is_zero() {
        return Err(Error::arg("block side must be positive"));
    }
    let least = least_sufficient_side(t, &prev);
    let tf = t as f64;
    let log2_p = log2_approx(&p);
    let log2_coefficient = tf + tf / (tf - 1.0) * log2_approx(&prev) - log2_p / (tf - 1.0);
    Ok(RecursionCoefficient {
        t,
        k,
        log2_block_side: log2_p,
        log2_coefficient,
        coefficient_approx: log2_coefficient.exp2(),
        exceeds_half: least > p,
        symbolic,
        log2_least_sufficient_side: log2_approx(&least),
    })
}
