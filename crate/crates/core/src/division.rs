//! Divisions into intervals, contractions, full divisions and the pigeonhole
//! extraction of a common full division from a family of blocks.

use std::collections::BTreeMap;
use std::ops::Range;

use num_bigint::BigUint;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::Pow;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extremal::AlphaTable;
use crate::tensor::{BitTensor, Shape};

/// Default limit on the number of divisions examined by exhaustive finders.
pub const DEFAULT_DIVISION_CAP: u128 = 1 << 24;

/// Blocks up to this side keep their whole set of full divisions during
/// pigeonhole extraction; larger blocks keep only the least witness.
pub const EXACT_SHARING_MAX_SIDE: usize = 6;

/// A tuple of interval partitions, one per axis. Axis `r` is split at the
/// strictly increasing `cuts[r]` into `cuts[r].len() + 1` non-empty
/// intervals `[0, c_1), [c_1, c_2), ..., [c_last, dims[r])`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Division {
    #[serde(skip)]
    dims: Vec<usize>,
    cuts: Vec<Vec<usize>>,
}

impl Division {
    pub fn new(shape: &Shape, cuts: Vec<Vec<usize>>) -> Result<Self> {
        if cuts.len() != shape.t() {
            return Err(Error::arg(format!(
                "division has {} axes, shape has {}",
                cuts.len(),
                shape.t()
            )));
        }
        for (r, c) in cuts.iter().enumerate() {
            let n = shape.dim(r);
            if c.windows(2).any(|w| w[0] >= w[1]) || c.iter().any(|&x| x == 0 || x >= n) {
                return Err(Error::arg(format!(
                    "cuts {c:?} on axis {r} must be strictly increasing inside (0, {n})"
                )));
            }
        }
        Ok(Division {
            dims: shape.dims().to_vec(),
            cuts,
        })
    }

    /// The division with a single interval per axis.
    pub fn trivial(shape: &Shape) -> Self {
        Division {
            dims: shape.dims().to_vec(),
            cuts: vec![Vec::new(); shape.t()],
        }
    }

    /// Every index in its own interval.
    pub fn singletons(shape: &Shape) -> Self {
        Division {
            dims: shape.dims().to_vec(),
            cuts: shape.dims().iter().map(|&n| (1..n).collect()).collect(),
        }
    }

    pub fn cuts(&self) -> &[Vec<usize>] {
        &self.cuts
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Number of intervals on each axis (`k_1, ..., k_t`).
    pub fn parts(&self) -> Vec<usize> {
        self.cuts.iter().map(|c| c.len() + 1).collect()
    }

    pub fn contracted_shape(&self) -> Shape {
        Shape::new(self.parts()).expect("every axis has at least one part")
    }

    pub fn interval(&self, r: usize, i: usize) -> Range<usize> {
        let c = &self.cuts[r];
        let lo = if i == 0 { 0 } else { c[i - 1] };
        let hi = c.get(i).copied().unwrap_or(self.dims[r]);
        lo..hi
    }

    /// Interval containing `index` on axis `r`.
    pub fn part_of(&self, r: usize, index: usize) -> usize {
        self.cuts[r].partition_point(|&c| c <= index)
    }

    /// Refines `coarser`, a division of this division's contracted shape,
    /// into a division of the original shape.
    pub fn compose(&self, coarser: &Division) -> Result<Division> {
        if coarser.dims != self.parts() {
            return Err(Error::arg("coarser division must divide the contracted shape"));
        }
        let cuts = coarser
            .cuts
            .iter()
            .zip(&self.cuts)
            .map(|(outer, inner)| outer.iter().map(|&c| inner[c - 1]).collect())
            .collect();
        Ok(Division {
            dims: self.dims.clone(),
            cuts,
        })
    }

    fn check_for(&self, m: &BitTensor) -> Result<()> {
        if self.dims != m.dims() {
            return Err(Error::arg(format!(
                "division for shape {:?} applied to a {} tensor",
                self.dims,
                m.shape()
            )));
        }
        Ok(())
    }
}

/// Next strictly increasing `cuts` inside `1..n` in lexicographic order.
fn next_cuts(cuts: &mut [usize], n: usize) -> bool {
    let len = cuts.len();
    for i in (0..len).rev() {
        // Largest value position i may take.
        let max = n - (len - i);
        if cuts[i] < max {
            cuts[i] += 1;
            for j in i + 1..len {
                cuts[j] = cuts[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Every `k x ... x k` division of a shape, lexicographically by cut lists
/// with axis 0 most significant.
pub struct DivisionEnumerator {
    dims: Vec<usize>,
    current: Option<Vec<Vec<usize>>>,
}

impl Iterator for DivisionEnumerator {
    type Item = Division;

    fn next(&mut self) -> Option<Division> {
        let current = self.current.as_mut()?;
        let out = Division {
            dims: self.dims.clone(),
            cuts: current.clone(),
        };
        let mut advanced = false;
        for r in (0..current.len()).rev() {
            if next_cuts(&mut current[r], self.dims[r]) {
                advanced = true;
                break;
            }
            let len = current[r].len();
            current[r] = (1..=len).collect();
        }
        if !advanced {
            self.current = None;
        }
        Some(out)
    }
}

pub fn enumerate_divisions(shape: &Shape, k: usize) -> Result<DivisionEnumerator> {
    let min = shape.dims().iter().copied().min().unwrap_or(0);
    if k < 1 || k > min {
        return Err(Error::arg(format!(
            "k = {k} must lie in 1..={min} for a {shape} shape"
        )));
    }
    Ok(DivisionEnumerator {
        dims: shape.dims().to_vec(),
        current: Some(vec![(1..k).collect(); shape.t()]),
    })
}

/// `binom(p - 1, k - 1)^t`, the number of `k x ... x k` divisions of a
/// `p x ... x p` tensor.
pub fn count_divisions(p: usize, k: usize, t: usize) -> BigUint {
    if k < 1 || k > p {
        return BigUint::from(0u32);
    }
    let per_axis = binomial(BigUint::from(p - 1), BigUint::from(k - 1));
    Pow::pow(per_axis, t)
}

/// Number of `k`-divisions of an arbitrary shape.
pub fn count_divisions_of(shape: &Shape, k: usize) -> BigUint {
    shape
        .dims()
        .iter()
        .map(|&n| {
            if k < 1 || k > n {
                BigUint::from(0u32)
            } else {
                binomial(BigUint::from(n - 1), BigUint::from(k - 1))
            }
        })
        .product()
}

/// The contraction `M / D`: a 1 for every cell holding at least one 1.
pub fn contract(m: &BitTensor, d: &Division) -> Result<BitTensor> {
    d.check_for(m)?;
    let ones = m
        .ones()
        .iter()
        .map(|c| c.iter().enumerate().map(|(r, &i)| d.part_of(r, i)).collect())
        .collect();
    BitTensor::new(d.contracted_shape(), ones)
}

/// Every cell of the division holds a 1.
pub fn is_full(m: &BitTensor, d: &Division) -> Result<bool> {
    let c = contract(m, d)?;
    Ok(c.ones_count() as u128 == c.shape().cells())
}

/// The lexicographically least full `k x ... x k` division, if any.
pub fn find_full_division(m: &BitTensor, k: usize, cap: u128) -> Result<Option<Division>> {
    let divisions = enumerate_divisions(m.shape(), k)?;
    let cells = (k as u128).saturating_pow(m.t() as u32);
    if (m.ones_count() as u128) < cells {
        return Ok(None);
    }
    let total = count_divisions_of(m.shape(), k);
    if total > BigUint::from(cap) {
        return Err(Error::Resource {
            cap: "division-cap",
            needed: u128::try_from(&total).unwrap_or(u128::MAX),
            limit: cap,
            hint: "a smaller k or tensor",
        });
    }
    for d in divisions {
        if is_full(m, &d)? {
            return Ok(Some(d));
        }
    }
    Ok(None)
}

/// Every full `k`-division, in enumeration order.
pub fn all_full_divisions(m: &BitTensor, k: usize, cap: u128) -> Result<Vec<Division>> {
    let total = count_divisions_of(m.shape(), k);
    if total > BigUint::from(cap) {
        return Err(Error::Resource {
            cap: "division-cap",
            needed: u128::try_from(&total).unwrap_or(u128::MAX),
            limit: cap,
            hint: "a smaller k or tensor",
        });
    }
    let mut out = Vec::new();
    for d in enumerate_divisions(m.shape(), k)? {
        if is_full(m, &d)? {
            out.push(d);
        }
    }
    Ok(out)
}

/// `ones(M) > alpha_s(k) * n^(s-1)` for a cubic `s`-dimensional `M`, `s >= 2`,
/// compared exactly.
pub fn is_heavy(m: &BitTensor, k: usize, alphas: &mut AlphaTable) -> Result<bool> {
    let s = m.t();
    if s < 2 {
        return Err(Error::UnsupportedDimension { min: 2, got: s });
    }
    let n = m
        .shape()
        .side()
        .ok_or_else(|| Error::arg(format!("heaviness needs a cubic tensor, got {}", m.shape())))?;
    let alpha = alphas.get(s, k)?;
    let threshold = alpha * BigRational::from_integer(Pow::pow(num_bigint::BigInt::from(n), s - 1));
    Ok(BigRational::from_integer(m.ones_count().into()) > threshold)
}

/// `(k - 1) * binom(p - 1, k - 1)^(t - 1)`: more heavy blocks than this
/// force a shared full division.
pub fn pigeonhole_threshold(p: usize, k: usize, t: usize) -> BigUint {
    BigUint::from(k.saturating_sub(1)) * count_divisions(p, k, t - 1)
}

/// Stacks equal cubic blocks along axis `r`.
pub fn stack_blocks(blocks: &[BitTensor], r: usize) -> Result<BitTensor> {
    let first = blocks
        .first()
        .ok_or_else(|| Error::arg("cannot stack an empty block family"))?;
    let p = check_blocks(blocks, r)?;
    let mut dims = first.dims().to_vec();
    dims[r] = p * blocks.len();
    let ones = blocks
        .iter()
        .enumerate()
        .flat_map(|(b, block)| {
            block.ones().iter().map(move |c| {
                let mut c = c.clone();
                c[r] += b * p;
                c
            })
        })
        .collect();
    BitTensor::new(Shape::new(dims)?, ones)
}

fn check_blocks(blocks: &[BitTensor], r: usize) -> Result<usize> {
    let first = blocks
        .first()
        .ok_or_else(|| Error::arg("empty block family"))?;
    let p = first
        .shape()
        .side()
        .ok_or_else(|| Error::arg("blocks must be cubic"))?;
    if blocks.iter().any(|b| b.shape() != first.shape()) {
        return Err(Error::arg("blocks must share one shape"));
    }
    if r >= first.t() || first.t() < 2 {
        return Err(Error::arg(format!("axis {r} invalid for t = {}", first.t())));
    }
    Ok(p)
}

/// Per block: the full `k`-divisions of its `r`th smash. Exhaustive.
pub fn smash_full_division_sets(blocks: &[BitTensor], r: usize, k: usize) -> Result<Vec<Vec<Division>>> {
    check_blocks(blocks, r)?;
    blocks
        .iter()
        .map(|b| {
            let s = b.smash(r)?;
            all_full_divisions(&s, k, DEFAULT_DIVISION_CAP)
        })
        .collect()
}

/// Largest number of blocks sharing one smash division, and that division.
pub fn best_shared(sets: &[Vec<Division>]) -> Option<(Division, Vec<usize>)> {
    let mut by_division: BTreeMap<&Division, Vec<usize>> = BTreeMap::new();
    for (b, set) in sets.iter().enumerate() {
        for d in set {
            by_division.entry(d).or_default().push(b);
        }
    }
    by_division
        .into_iter()
        .max_by(|a, b| a.1.len().cmp(&b.1.len()).then_with(|| b.0.cmp(a.0)))
        .map(|(d, bs)| (d.clone(), bs))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PigeonholeOutcome {
    /// Full division of the stacked tensor ([`stack_blocks`]).
    pub division: Division,
    /// The `k` blocks whose smashes share the `(t-1)`-dimensional division.
    pub blocks: Vec<usize>,
    /// Whether sharing was decided on complete division sets.
    pub exact: bool,
}

/// Looks for `k` blocks whose `r`th smashes have a common full division and
/// lifts it to a full division of the blocks stacked along axis `r`.
pub fn extract_full_division_pigeonhole(
    blocks: &[BitTensor],
    r: usize,
    k: usize,
) -> Result<Option<PigeonholeOutcome>> {
    let p = check_blocks(blocks, r)?;
    if k < 1 || k > p {
        return Ok(None);
    }
    let exact = p <= EXACT_SHARING_MAX_SIDE;
    let sets: Vec<Vec<Division>> = if exact {
        smash_full_division_sets(blocks, r, k)?
    } else {
        blocks
            .iter()
            .map(|b| Ok(find_full_division(&b.smash(r)?, k, DEFAULT_DIVISION_CAP)?.into_iter().collect()))
            .collect::<Result<_>>()?
    };
    // Least division among those shared by at least k blocks.
    let mut by_division: BTreeMap<&Division, Vec<usize>> = BTreeMap::new();
    for (b, set) in sets.iter().enumerate() {
        for d in set {
            by_division.entry(d).or_default().push(b);
        }
    }
    let Some((shared, members)) = by_division.into_iter().find(|(_, bs)| bs.len() >= k) else {
        return Ok(None);
    };
    let chosen: Vec<usize> = members[..k].to_vec();
    let stacked_shape = {
        let mut dims = blocks[0].dims().to_vec();
        dims[r] = p * blocks.len();
        Shape::new(dims)?
    };
    let mut cuts = shared.cuts().to_vec();
    cuts.insert(r, chosen[1..].iter().map(|&b| b * p).collect());
    let division = Division::new(&stacked_shape, cuts)?;
    Ok(Some(PigeonholeOutcome {
        division,
        blocks: chosen,
        exact,
    }))
}
