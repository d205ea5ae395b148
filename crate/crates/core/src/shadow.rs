//! Face counts of the colourful complex of a tensor, Turán binomials,
//! cascade representations and the shadow bound.
//!
//! The complex of a t-dimensional tensor `M` has vertex set
//! `{(r, i)}` and one maximal face `{(1, i_1), ..., (t, i_t)}` per 1 of `M`.
//! Its `i`-faces are the distinct projections of the ones onto `i`-element
//! sets of axes.

use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::{One, Pow, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle::combinations;
use crate::tensor::BitTensor;

/// `binom(n, k)_t`: the number of `k`-cliques of the Turán graph `T(n, t)`,
/// i.e. `e_k` of its `t` balanced part sizes.
pub fn turan_binomial(n: usize, k: usize, t: usize) -> BigUint {
    if k > t {
        return BigUint::zero();
    }
    let (q, r) = (n / t, n % t);
    // e[j] over the parts seen so far.
    let mut e = vec![BigUint::zero(); k + 1];
    e[0] = BigUint::one();
    for part in 0..t {
        let size = BigUint::from(q + usize::from(part < r));
        for j in (1..=k).rev() {
            let add = &e[j - 1] * &size;
            e[j] += add;
        }
    }
    e.swap_remove(k)
}

/// `m = binom(n_k, k)_t + binom(n_(k-1), k-1)_(t-1) + ...`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CascadeRep {
    pub k: usize,
    pub t: usize,
    /// `(level, n_level)`, top level first.
    pub terms: Vec<(usize, usize)>,
}

impl CascadeRep {
    /// Colour count of the term at `level`.
    pub fn colours_at(&self, level: usize) -> usize {
        self.t - (self.k - level)
    }

    pub fn value(&self) -> BigUint {
        self.terms
            .iter()
            .map(|&(level, n)| turan_binomial(n, level, self.colours_at(level)))
            .sum()
    }

    /// Checks the chain condition `n_(k-i) - floor(n_(k-i) / (t-i)) > n_(k-i-1)`
    /// and `n_(k-s) >= k-s > 0`.
    pub fn validate(&self) -> Result<()> {
        for pair in self.terms.windows(2) {
            let (level, n) = pair[0];
            let (_, next) = pair[1];
            let colours = self.colours_at(level);
            if n - n / colours <= next {
                return Err(Error::Invariant(format!(
                    "cascade chain condition fails at level {level}: {n} - floor({n}/{colours}) <= {next} \
                     (k = {}, t = {}, terms {:?})",
                    self.k, self.t, self.terms
                )));
            }
        }
        match self.terms.last() {
            Some(&(level, n)) if level > 0 && n >= level => Ok(()),
            _ => Err(Error::Invariant(format!(
                "cascade ends badly: terms {:?} (k = {}, t = {})",
                self.terms, self.k, self.t
            ))),
        }
    }
}

/// Largest `n` with `binom(n, k)_t <= m`.
fn largest_fitting(m: &BigUint, k: usize, t: usize) -> usize {
    let mut hi = k.max(1);
    while turan_binomial(hi, k, t) <= *m {
        hi *= 2;
    }
    // binom(lo, k)_t <= m < binom(hi, k)_t
    let mut lo = 0;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if turan_binomial(mid, k, t) <= *m {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Greedy cascade representation of `m` at level `k` with `t` colours.
pub fn cascade_representation(m: u64, k: usize, t: usize) -> Result<CascadeRep> {
    if m == 0 || k == 0 || k > t {
        return Err(Error::arg(format!(
            "cascade representation needs m >= 1 and 1 <= k <= t, got m = {m}, k = {k}, t = {t}"
        )));
    }
    let mut rest = BigUint::from(m);
    let mut terms = Vec::new();
    let (mut level, mut colours) = (k, t);
    while !rest.is_zero() {
        if level == 0 {
            return Err(Error::Invariant(format!(
                "cascade of {m} at (k = {k}, t = {t}) left {rest} after level 1: terms {terms:?}"
            )));
        }
        let n = largest_fitting(&rest, level, colours);
        rest -= turan_binomial(n, level, colours);
        terms.push((level, n));
        level -= 1;
        colours -= 1;
    }
    let rep = CascadeRep { k, t, terms };
    rep.validate()?;
    Ok(rep)
}

/// `binom(n_k, k+1)_t + binom(n_(k-1), k)_(t-1) + ...`: the bound on
/// `cl_(k+1)` given `cl_k`.
pub fn shadow_upper_bound(rep: &CascadeRep) -> BigUint {
    rep.terms
        .iter()
        .map(|&(level, n)| turan_binomial(n, level + 1, rep.colours_at(level)))
        .sum()
}

/// `counts[i - 1] = cl_i` for `i = 1..=t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaceCounts {
    pub counts: Vec<u64>,
}

impl FaceCounts {
    /// `cl_i`, with `cl_0 = 0` for the empty tensor and 1 otherwise.
    pub fn cl(&self, i: usize) -> u64 {
        match i {
            0 => u64::from(self.counts.iter().any(|&c| c > 0)),
            _ => self.counts.get(i - 1).copied().unwrap_or(0),
        }
    }
}

pub fn face_counts(m: &BitTensor) -> Result<FaceCounts> {
    let t = m.t();
    let mut counts = Vec::with_capacity(t);
    for i in 1..=t {
        let mut cl = 0u64;
        for axes in combinations(t, i) {
            let faces: HashSet<Vec<usize>> = m.ones().iter().map(|c| axes.iter().map(|&a| c[a]).collect()).collect();
            cl += faces.len() as u64;
        }
        counts.push(cl);
    }
    let out = FaceCounts { counts };
    if out.cl(t) != m.ones_count() as u64 {
        return Err(Error::Invariant(format!(
            "cl_t = {} but the tensor has {} ones",
            out.cl(t),
            m.ones_count()
        )));
    }
    if t >= 2 {
        let smashed: u64 = (0..t)
            .map(|r| m.smash(r).map(|s| s.ones_count() as u64))
            .sum::<Result<u64>>()?;
        if out.cl(t - 1) != smashed {
            return Err(Error::Invariant(format!(
                "cl_(t-1) = {} but the smashes hold {smashed} ones",
                out.cl(t - 1)
            )));
        }
    }
    Ok(out)
}

/// `ones <= 2^t ((sum_r N_r) / t)^(t/(t-1))`, compared as
/// `ones^(t-1) t^t <= 2^(t(t-1)) (sum_r N_r)^t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorollaryReport {
    pub t: usize,
    pub ones: u64,
    pub smash_counts: Vec<u64>,
    #[serde(serialize_with = "as_string")]
    pub lhs: BigUint,
    #[serde(serialize_with = "as_string")]
    pub rhs: BigUint,
    pub holds: bool,
}

fn as_string<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub fn corollary_entry_bound(m: &BitTensor) -> Result<CorollaryReport> {
    let t = m.t();
    if t < 3 {
        return Err(Error::UnsupportedDimension { min: 3, got: t });
    }
    let smash_counts = (0..t)
        .map(|r| m.smash(r).map(|s| s.ones_count() as u64))
        .collect::<Result<Vec<u64>>>()?;
    let total: u64 = smash_counts.iter().sum();
    let ones = m.ones_count() as u64;
    let lhs = Pow::pow(BigUint::from(ones), t - 1) * Pow::pow(BigUint::from(t), t);
    let rhs = (BigUint::one() << (t * (t - 1))) * Pow::pow(BigUint::from(total), t);
    Ok(CorollaryReport {
        t,
        ones,
        smash_counts,
        holds: lhs <= rhs,
        lhs,
        rhs,
    })
}
