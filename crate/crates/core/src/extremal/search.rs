//! Exact `f_t(n, P)` by branch and bound over the cells of the cube.
//!
//! Cells are visited in lexicographic order and each is tried as 1 before 0.
//! A branch is cut when its ones plus the undecided cells cannot beat the
//! incumbent. Setting a cell to 1 is rejected as soon as the pattern embeds
//! through that cell; since the new cell is the lexicographically largest 1
//! so far, it can only be the image of the pattern's last one.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::containment::{contains_through_last, MaskCells};
use crate::error::{Error, Result};
use crate::pattern::Pattern;
use crate::tensor::{BitTensor, Coord, Shape};

use super::{SearchOptions, SearchReport};

/// Largest cube handled by the bitmask searches.
pub const MAX_SEARCH_CELLS: usize = 64;

pub(crate) struct Cube {
    pub shape: Shape,
    pub strides: Vec<usize>,
    pub coords: Vec<Coord>,
}

impl Cube {
    pub fn new(t: usize, n: usize, cap_cells: usize) -> Result<Self> {
        let shape = Shape::cubic(t, n)?;
        let limit = cap_cells.min(MAX_SEARCH_CELLS);
        if shape.cells() > limit as u128 {
            return Err(Error::Resource {
                cap: "cap-cells",
                needed: shape.cells(),
                limit: limit as u128,
                hint: "--cap-cells or TENSOR_EXTREMAL_CAP_CELLS",
            });
        }
        let coords = shape.coords().collect();
        Ok(Cube {
            strides: shape.strides(),
            coords,
            shape,
        })
    }

    pub fn cells(&self) -> usize {
        self.coords.len()
    }

    /// Does setting cell `i` on top of `mask` (all of whose ones precede
    /// `i`) create a copy of the pattern?
    #[inline]
    pub fn closes_copy(&self, pattern: &Pattern, mask: u64, i: usize) -> bool {
        let cells = MaskCells {
            mask: mask | 1 << i,
            strides: &self.strides,
        };
        contains_through_last(&cells, self.shape.dims(), pattern, &self.coords[i], u64::MAX)
            .expect("unbounded budget")
    }

    pub fn tensor(&self, mask: u64) -> BitTensor {
        BitTensor::from_mask(self.shape.clone(), mask)
    }
}

pub(crate) fn check_pattern(pattern: &Pattern, t: usize) -> Result<()> {
    if pattern.t() != t {
        return Err(Error::arg(format!(
            "pattern has t = {} but t = {t} was requested",
            pattern.t()
        )));
    }
    Ok(())
}

/// Greedy lexicographic fill: every cell that keeps the tensor avoiding.
fn greedy(cube: &Cube, pattern: &Pattern) -> (u64, usize) {
    let mut mask = 0u64;
    let mut count = 0;
    for i in 0..cube.cells() {
        if !cube.closes_copy(pattern, mask, i) {
            mask |= 1 << i;
            count += 1;
        }
    }
    (mask, count)
}

struct Shared {
    nodes: AtomicU64,
    global_best: AtomicUsize,
    truncated: AtomicBool,
    budget: u64,
}

struct Subtree<'a> {
    cube: &'a Cube,
    pattern: &'a Pattern,
    shared: &'a Shared,
    best: usize,
    witness: Option<u64>,
}

impl Subtree<'_> {
    fn dfs(&mut self, i: usize, mask: u64, count: usize) {
        let nodes = self.shared.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if nodes > self.shared.budget {
            self.shared.truncated.store(true, Ordering::Relaxed);
            return;
        }
        let reach = count + (self.cube.cells() - i);
        // Equal-valued branches elsewhere are never cut by the shared bound,
        // so the reported witness does not depend on scheduling.
        if reach <= self.best || reach < self.shared.global_best.load(Ordering::Relaxed) {
            return;
        }
        if i == self.cube.cells() {
            self.best = count;
            self.witness = Some(mask);
            self.shared.global_best.fetch_max(count, Ordering::Relaxed);
            return;
        }
        if !self.cube.closes_copy(self.pattern, mask, i) {
            self.dfs(i + 1, mask | 1 << i, count + 1);
        }
        if self.shared.truncated.load(Ordering::Relaxed) {
            return;
        }
        self.dfs(i + 1, mask, count);
    }
}

/// Avoiding prefixes over the first `depth` cells, 1-branch first.
fn prefixes(cube: &Cube, pattern: &Pattern, depth: usize) -> Vec<(u64, usize)> {
    fn go(cube: &Cube, pattern: &Pattern, depth: usize, i: usize, mask: u64, count: usize, out: &mut Vec<(u64, usize)>) {
        if i == depth {
            out.push((mask, count));
            return;
        }
        if !cube.closes_copy(pattern, mask, i) {
            go(cube, pattern, depth, i + 1, mask | 1 << i, count + 1, out);
        }
        go(cube, pattern, depth, i + 1, mask, count, out);
    }
    let mut out = Vec::new();
    go(cube, pattern, depth, 0, 0, 0, &mut out);
    out
}

/// `f_t(n, P)`: the most ones in an `n x ... x n` tensor avoiding `P`.
pub fn f_exact(n: usize, pattern: &Pattern, t: usize, opts: &SearchOptions) -> Result<SearchReport> {
    check_pattern(pattern, t)?;
    let cube = Cube::new(t, n, opts.cap_cells)?;
    if pattern.dims().iter().any(|&k| k > n) {
        return Ok(SearchReport {
            value: cube.cells(),
            witness: Some(BitTensor::full(cube.shape.clone())),
            nodes_explored: 0,
            exact: true,
        });
    }
    if pattern.ones().is_empty() {
        return Err(Error::NoAvoider {
            shape_desc: cube.shape.to_string(),
        });
    }

    let (seed_mask, seed_value) = if t == 2 { greedy(&cube, pattern) } else { (0, 0) };
    let shared = Shared {
        nodes: AtomicU64::new(0),
        global_best: AtomicUsize::new(seed_value),
        truncated: AtomicBool::new(false),
        budget: opts.budget,
    };

    let threads = opts.threads.max(1);
    let depth = if threads == 1 {
        0
    } else {
        (usize::BITS - (threads - 1).leading_zeros()) as usize + 3
    }
    .min(cube.cells());
    let roots = prefixes(&cube, pattern, depth);

    let run = |&(mask, count): &(u64, usize)| {
        let mut sub = Subtree {
            cube: &cube,
            pattern,
            shared: &shared,
            best: seed_value,
            witness: None,
        };
        sub.dfs(depth, mask, count);
        (sub.best, sub.witness)
    };
    let results: Vec<(usize, Option<u64>)> = if threads == 1 {
        roots.iter().map(run).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::arg(format!("cannot start {threads} threads: {e}")))?;
        pool.install(|| roots.par_iter().map(run).collect())
    };

    // First subtree in search order holding the maximum.
    let mut value = seed_value;
    let mut witness = seed_mask;
    for (best, w) in results {
        if let Some(w) = w {
            if best > value {
                value = best;
                witness = w;
            }
        }
    }
    Ok(SearchReport {
        value,
        witness: Some(cube.tensor(witness)),
        nodes_explored: shared.nodes.load(Ordering::Relaxed),
        exact: !shared.truncated.load(Ordering::Relaxed),
    })
}
