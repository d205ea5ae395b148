//! Containment and avoidance of t-patterns, with explicit witnesses.
//!
//! The search walks the pattern's ones in lexicographic order and maps each
//! onto a 1-cell of the host, assigning per-axis selection indices lazily.
//! An index assigned to pattern position `a` on axis `r` is confined to the
//! interval left open by the already assigned positions, so every partial
//! assignment can still be completed to strictly increasing selections.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pattern::Pattern;
use crate::tensor::{BitTensor, CellLookup, Coord};

/// Default node budget for a single containment search.
pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;

/// One strictly increasing index list per axis; `selections[r].len()` is the
/// pattern's `r`th dimension.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Embedding {
    pub selections: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContainmentReport {
    pub embedding: Option<Embedding>,
    pub nodes: u64,
}

/// Anything that answers "is this cell a 1".
pub trait Cells {
    fn is_one(&self, coord: &[usize]) -> bool;
}

impl Cells for CellLookup<'_> {
    #[inline]
    fn is_one(&self, coord: &[usize]) -> bool {
        self.get(coord)
    }
}

impl Cells for BitTensor {
    fn is_one(&self, coord: &[usize]) -> bool {
        self.get(coord)
    }
}

/// Cells of a tensor with at most 64 cells held in a bitmask.
#[derive(Clone, Copy, Debug)]
pub struct MaskCells<'a> {
    pub mask: u64,
    pub strides: &'a [usize],
}

impl Cells for MaskCells<'_> {
    #[inline]
    fn is_one(&self, coord: &[usize]) -> bool {
        let i: usize = coord.iter().zip(self.strides).map(|(a, b)| a * b).sum();
        self.mask >> i & 1 == 1
    }
}

struct Search<'a, C: Cells> {
    host: &'a C,
    host_dims: &'a [usize],
    pat_dims: &'a [usize],
    ones: &'a [Coord],
    /// `assigned[r][a]`: host index chosen for pattern position `a` on axis `r`.
    assigned: Vec<Vec<Option<usize>>>,
    nodes: u64,
    budget: u64,
    scratch: Vec<usize>,
}

enum Step {
    Found,
    Exhausted,
    OutOfBudget,
}

impl<'a, C: Cells> Search<'a, C> {
    fn new(host: &'a C, host_dims: &'a [usize], pat_dims: &'a [usize], ones: &'a [Coord], budget: u64) -> Self {
        Search {
            host,
            host_dims,
            pat_dims,
            ones,
            assigned: pat_dims.iter().map(|&k| vec![None; k]).collect(),
            nodes: 0,
            budget,
            scratch: vec![0; pat_dims.len()],
        }
    }

    /// Admissible host indices for pattern position `a` on axis `r`.
    fn window(&self, r: usize, a: usize) -> (usize, usize) {
        let k = self.pat_dims[r];
        let n = self.host_dims[r];
        let mut lo = a;
        let mut hi = n - (k - a);
        for (b, v) in self.assigned[r].iter().enumerate() {
            if let Some(v) = *v {
                if b < a {
                    lo = lo.max(v + (a - b));
                } else if b > a {
                    hi = hi.min(v - (b - a));
                }
            }
        }
        (lo, hi)
    }

    fn place(&mut self, idx: usize) -> Step {
        if idx == self.ones.len() {
            return Step::Found;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return Step::OutOfBudget;
        }
        self.place_axis(idx, 0)
    }

    fn place_axis(&mut self, idx: usize, r: usize) -> Step {
        let t = self.pat_dims.len();
        if r == t {
            // Deeper ones reuse the scratch buffer, so rebuild it here.
            for (s, &a) in self.ones[idx].iter().enumerate() {
                self.scratch[s] = self.assigned[s][a].expect("assigned on every axis");
            }
            if !self.host.is_one(&self.scratch) {
                return Step::Exhausted;
            }
            return self.place(idx + 1);
        }
        let a = self.ones[idx][r];
        if self.assigned[r][a].is_some() {
            return self.place_axis(idx, r + 1);
        }
        let (lo, hi) = self.window(r, a);
        for v in lo..=hi {
            self.assigned[r][a] = Some(v);
            match self.place_axis(idx, r + 1) {
                Step::Exhausted => {}
                other => {
                    if matches!(other, Step::OutOfBudget) {
                        self.assigned[r][a] = None;
                    }
                    return other;
                }
            }
        }
        self.assigned[r][a] = None;
        Step::Exhausted
    }

    /// Completes the partial assignment with the smallest admissible indices.
    fn selections(&self) -> Vec<Vec<usize>> {
        self.assigned
            .iter()
            .map(|axis| {
                let mut out: Vec<usize> = Vec::with_capacity(axis.len());
                for (a, v) in axis.iter().enumerate() {
                    let next = v.unwrap_or_else(|| out.last().map_or(a, |&p| p + 1));
                    out.push(next);
                }
                out
            })
            .collect()
    }
}

fn check_arity(host: &BitTensor, pattern: &Pattern) -> Result<()> {
    if host.t() != pattern.t() {
        return Err(Error::arg(format!(
            "host has t = {} but pattern has t = {}",
            host.t(),
            pattern.t()
        )));
    }
    Ok(())
}

fn fits(host_dims: &[usize], pat_dims: &[usize]) -> bool {
    host_dims.iter().zip(pat_dims).all(|(n, k)| k <= n)
}

/// Containment search over an arbitrary cell oracle. `Ok(None)` inside the
/// report means the host avoids the pattern.
pub fn search_cells<C: Cells>(
    host: &C,
    host_dims: &[usize],
    pattern: &Pattern,
    budget: u64,
) -> Result<ContainmentReport> {
    if !fits(host_dims, pattern.dims()) {
        return Ok(ContainmentReport {
            embedding: None,
            nodes: 0,
        });
    }
    let mut s = Search::new(host, host_dims, pattern.dims(), pattern.ones(), budget);
    match s.place(0) {
        Step::Found => Ok(ContainmentReport {
            embedding: Some(Embedding {
                selections: s.selections(),
            }),
            nodes: s.nodes,
        }),
        Step::Exhausted => Ok(ContainmentReport {
            embedding: None,
            nodes: s.nodes,
        }),
        Step::OutOfBudget => Err(Error::Unknown { budget }),
    }
}

/// Is there an embedding that sends the pattern's lexicographically last
/// one onto `pin`? Every embedding preserves the lexicographic order of
/// ones, so a host whose lexicographically last 1 is `pin` contains the
/// pattern through that 1 exactly when this returns true.
pub fn contains_through_last<C: Cells>(
    host: &C,
    host_dims: &[usize],
    pattern: &Pattern,
    pin: &[usize],
    budget: u64,
) -> Result<bool> {
    let ones = pattern.ones();
    let Some(last) = ones.last() else {
        return Ok(fits(host_dims, pattern.dims()));
    };
    if !fits(host_dims, pattern.dims()) {
        return Ok(false);
    }
    let rest = &ones[..ones.len() - 1];
    let mut s = Search::new(host, host_dims, pattern.dims(), rest, budget);
    for (r, (&a, &v)) in last.iter().zip(pin).enumerate() {
        let k = pattern.dims()[r];
        if v < a || v > host_dims[r] - (k - a) {
            return Ok(false);
        }
        s.assigned[r][a] = Some(v);
    }
    match s.place(0) {
        Step::Found => Ok(true),
        Step::Exhausted => Ok(false),
        Step::OutOfBudget => Err(Error::Unknown { budget }),
    }
}

pub fn find_embedding_with_budget(host: &BitTensor, pattern: &Pattern, budget: u64) -> Result<ContainmentReport> {
    check_arity(host, pattern)?;
    let lookup = host.lookup();
    search_cells(&lookup, host.dims(), pattern, budget)
}

/// A witness embedding of `pattern` into `host`, or `None` if `host` avoids it.
pub fn find_embedding(host: &BitTensor, pattern: &Pattern) -> Result<Option<Embedding>> {
    Ok(find_embedding_with_budget(host, pattern, DEFAULT_NODE_BUDGET)?.embedding)
}

pub fn avoids(host: &BitTensor, pattern: &Pattern) -> Result<bool> {
    Ok(find_embedding(host, pattern)?.is_none())
}

/// Independent check that `subtensor(host, selections)` dominates the pattern.
pub fn witness_dominates(host: &BitTensor, pattern: &Pattern, embedding: &Embedding) -> bool {
    let Ok(q) = host.subtensor(&embedding.selections) else {
        return false;
    };
    q.dims() == pattern.dims() && pattern.ones().iter().all(|c| q.get(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::{make_cyclic_latin, make_identity};
    use crate::tensor::Shape;

    fn tensor(dims: &[usize], ones: &[&[usize]]) -> BitTensor {
        BitTensor::new(
            Shape::new(dims.to_vec()).unwrap(),
            ones.iter().map(|c| c.to_vec()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn backtracking_past_a_failed_later_one() {
        // The first one is tried at depth 0 then 1; the failed attempt to
        // place the second one must not leak into the retry.
        let host = BitTensor::new(Shape::cubic(3, 2).unwrap(), vec![vec![0, 1, 0], vec![1, 0, 1]]).unwrap();
        let p = Pattern::new(
            BitTensor::new(Shape::new(vec![2, 2, 1]).unwrap(), vec![vec![0, 1, 0], vec![1, 0, 0]]).unwrap(),
        )
        .unwrap();
        assert!(avoids(&host, &p).unwrap());
        assert!(!crate::oracle::contains(&host, p.tensor()));
    }

    #[test]
    fn identity_in_identity() {
        let id = make_identity(2, 2).unwrap();
        let e = find_embedding(id.tensor(), &id).unwrap().unwrap();
        assert_eq!(e.selections, vec![vec![0, 1], vec![0, 1]]);
    }

    #[test]
    fn anti_diagonal_avoids_identity() {
        let anti = tensor(&[2, 2], &[&[0, 1], &[1, 0]]);
        assert!(avoids(&anti, &make_identity(2, 2).unwrap()).unwrap());
    }

    #[test]
    fn staircase_contains_identity() {
        // (0,0) and (1,1) are both ones; brute force over all 9 selection
        // pairs agrees.
        let m = tensor(&[3, 3], &[&[0, 0], &[0, 1], &[1, 1], &[1, 2], &[2, 2]]);
        let e = find_embedding(&m, &make_identity(2, 2).unwrap()).unwrap().unwrap();
        assert_eq!(e.selections, vec![vec![0, 1], vec![0, 1]]);
    }

    #[test]
    fn full_and_zero_hosts() {
        let full = BitTensor::full(Shape::cubic(3, 3).unwrap());
        let zero = BitTensor::zeros(Shape::cubic(3, 3).unwrap());
        let p = Pattern::new(tensor(&[2, 2, 2], &[&[0, 0, 0], &[1, 1, 0], &[0, 1, 1]])).unwrap();
        assert!(!avoids(&full, &p).unwrap());
        assert!(avoids(&zero, &p).unwrap());
    }

    #[test]
    fn pattern_larger_than_host() {
        let p = make_identity(2, 3).unwrap();
        let host = BitTensor::full(Shape::new(vec![2, 5]).unwrap());
        assert!(avoids(&host, &p).unwrap());
    }

    #[test]
    fn arity_mismatch_is_an_error() {
        let p = make_identity(3, 2).unwrap();
        let host = BitTensor::full(Shape::cubic(2, 3).unwrap());
        assert!(matches!(find_embedding(&host, &p), Err(Error::Argument(_))));
    }

    #[test]
    fn empty_pattern_embeds_when_it_fits() {
        let p = Pattern::new(BitTensor::zeros(Shape::new(vec![2, 1]).unwrap())).unwrap();
        let host = BitTensor::zeros(Shape::new(vec![3, 3]).unwrap());
        let e = find_embedding(&host, &p).unwrap().unwrap();
        assert_eq!(e.selections, vec![vec![0, 1], vec![0]]);
    }

    #[test]
    fn zero_rows_in_pattern_are_filled_in() {
        // Pattern with an empty middle row: (0,0) and (2,1) in a 3x2.
        let p = Pattern::new(tensor(&[3, 2], &[&[0, 0], &[2, 1]])).unwrap();
        let host = tensor(&[4, 4], &[&[0, 0], &[1, 3]]);
        // Rows 0 and 1 leave no room for the middle row.
        assert!(avoids(&host, &p).unwrap());
        let host = tensor(&[4, 4], &[&[0, 0], &[2, 3]]);
        let e = find_embedding(&host, &p).unwrap().unwrap();
        assert_eq!(e.selections, vec![vec![0, 1, 2], vec![0, 3]]);
        assert!(witness_dominates(&host, &p, &e));
    }

    #[test]
    fn cyclic_latin_cube_contains_identity() {
        // The only selection triple is the full range; 3i is divisible by 3,
        // so the whole diagonal is present.
        let m = make_cyclic_latin(3, 3).unwrap();
        assert!(!avoids(&m, &make_identity(3, 3).unwrap()).unwrap());
    }

    #[test]
    fn budget_exhaustion_is_unknown_not_false() {
        let host = BitTensor::full(Shape::cubic(2, 6).unwrap());
        let p = make_identity(2, 6).unwrap();
        let err = find_embedding_with_budget(&host, &p, 3).unwrap_err();
        assert_eq!(err, Error::Unknown { budget: 3 });
    }

    #[test]
    fn pinned_search() {
        let id = make_identity(2, 2).unwrap();
        let host = tensor(&[3, 3], &[&[0, 0], &[2, 2]]);
        let lk = host.lookup();
        assert!(contains_through_last(&lk, host.dims(), &id, &[2, 2], 100).unwrap());
        assert!(!contains_through_last(&lk, host.dims(), &id, &[0, 0], 100).unwrap());
    }
}
