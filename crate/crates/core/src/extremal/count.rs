//! Avoider counts `|T_t(n, P)|` and the doubling inequality
//! `|T_t(2n, P)| <= |T_t(n, P)| (2^(2^t) - 1)^(f_t(n, P))`.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Pow, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::containment::avoids;
use crate::division::{contract, Division};
use crate::error::{Error, Result};
use crate::pattern::Pattern;
use crate::tensor::{BitTensor, Shape};

use super::search::{check_pattern, Cube};
use super::SearchOptions;

/// Calls `visit` with the mask of every avoider extending `mask` from cell
/// `i` on. Branches are abandoned as soon as they contain the pattern.
fn walk(cube: &Cube, pattern: &Pattern, i: usize, mask: u64, visit: &mut dyn FnMut(u64)) {
    if i == cube.cells() {
        visit(mask);
        return;
    }
    if !cube.closes_copy(pattern, mask, i) {
        walk(cube, pattern, i + 1, mask | 1 << i, visit);
    }
    walk(cube, pattern, i + 1, mask, visit);
}

/// An empty pattern that fits is contained in every tensor, the zero one
/// included; the cell walk alone would miss that.
fn nothing_avoids(cube: &Cube, pattern: &Pattern) -> bool {
    pattern.ones().is_empty() && pattern.dims().iter().zip(cube.shape.dims()).all(|(k, n)| k <= n)
}

/// Masks of all avoiders of an `n x ... x n` cube.
pub fn avoider_masks(n: usize, pattern: &Pattern, t: usize, opts: &SearchOptions) -> Result<Vec<u64>> {
    check_pattern(pattern, t)?;
    let cube = Cube::new(t, n, opts.cap_cells.min(super::MAX_COUNT_CELLS))?;
    let mut out = Vec::new();
    if !nothing_avoids(&cube, pattern) {
        walk(&cube, pattern, 0, 0, &mut |m| out.push(m));
    }
    Ok(out)
}

/// `|T_t(n, P)|`.
pub fn count_avoiders(n: usize, pattern: &Pattern, t: usize, opts: &SearchOptions) -> Result<u64> {
    check_pattern(pattern, t)?;
    let cube = Cube::new(t, n, opts.cap_cells.min(super::MAX_COUNT_CELLS))?;
    let threads = opts.threads.max(1);
    let fits = pattern.dims().iter().all(|&k| k <= n);
    if !fits {
        return Ok(1u64 << cube.cells());
    }
    if nothing_avoids(&cube, pattern) {
        return Ok(0);
    }
    if threads == 1 {
        let mut count = 0u64;
        walk(&cube, pattern, 0, 0, &mut |_| count += 1);
        return Ok(count);
    }
    let depth = 6.min(cube.cells());
    let mut roots = Vec::new();
    fn split(cube: &Cube, pattern: &Pattern, depth: usize, i: usize, mask: u64, out: &mut Vec<u64>) {
        if i == depth {
            out.push(mask);
            return;
        }
        if !cube.closes_copy(pattern, mask, i) {
            split(cube, pattern, depth, i + 1, mask | 1 << i, out);
        }
        split(cube, pattern, depth, i + 1, mask, out);
    }
    split(&cube, pattern, depth, 0, 0, &mut roots);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::arg(format!("cannot start {threads} threads: {e}")))?;
    Ok(pool.install(|| {
        roots
            .par_iter()
            .map(|&mask| {
                let mut count = 0u64;
                walk(&cube, pattern, depth, mask, &mut |_| count += 1);
                count
            })
            .sum()
    }))
}

/// The doubling map: contract a `2n`-cube by its `2 x ... x 2` blocks.
pub fn block_contract(m: &BitTensor) -> Result<BitTensor> {
    let side = m
        .shape()
        .side()
        .filter(|s| s % 2 == 0)
        .ok_or_else(|| Error::arg(format!("block contraction needs an even cube, got {}", m.shape())))?;
    let cuts = vec![(1..side / 2).map(|b| 2 * b).collect(); m.t()];
    let d = Division::new(m.shape(), cuts)?;
    contract(m, &d)
}

/// Both sides of the doubling inequality.
#[derive(Clone, Debug, Serialize)]
pub struct KlazarReport {
    pub n: usize,
    pub t: usize,
    /// `|T_t(2n, P)|`.
    #[serde(serialize_with = "as_string")]
    pub lhs: BigUint,
    /// `|T_t(n, P)|`.
    pub avoiders_n: u64,
    /// `f_t(n, P)`, absent when nothing avoids `P`.
    pub f_n: Option<usize>,
    /// `|T_t(n, P)| (2^(2^t) - 1)^(f_t(n, P))`.
    #[serde(serialize_with = "as_string")]
    pub rhs: BigUint,
    pub holds: bool,
}

fn as_string<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    match u64::try_from(v) {
        Ok(small) => s.serialize_u64(small),
        Err(_) => s.serialize_str(&v.to_string()),
    }
}

/// `2^(2^t) - 1`: non-zero fillings of one `2 x ... x 2` block.
pub fn block_fillings(t: usize) -> BigUint {
    let cells = 1usize << t;
    Pow::pow(BigUint::from(2u32), cells) - BigUint::one()
}

pub fn klazar_check(n: usize, pattern: &Pattern, t: usize, opts: &SearchOptions) -> Result<KlazarReport> {
    let small = avoider_masks(n, pattern, t, opts)?;
    let lhs = BigUint::from(count_avoiders(2 * n, pattern, t, opts)?);
    let f_n = small.iter().map(|m| m.count_ones() as usize).max();
    let rhs = match f_n {
        Some(f) => BigUint::from(small.len()) * Pow::pow(block_fillings(t), f),
        None => BigUint::zero(),
    };
    Ok(KlazarReport {
        n,
        t,
        holds: lhs <= rhs,
        lhs,
        avoiders_n: small.len() as u64,
        f_n,
        rhs,
    })
}

/// Witness-level check of the doubling map on every avoider of the `2n`-cube.
#[derive(Clone, Debug, Serialize)]
pub struct DoublingMapReport {
    pub avoiders_checked: u64,
    pub distinct_images: u64,
    /// Avoiders whose contraction contains the pattern.
    pub image_violations: Vec<BitTensor>,
    /// Images with more preimages than `(2^(2^t) - 1)^(ones)`.
    pub fiber_violations: Vec<BitTensor>,
}

impl DoublingMapReport {
    pub fn holds(&self) -> bool {
        self.image_violations.is_empty() && self.fiber_violations.is_empty()
    }
}

pub fn doubling_map_check(n: usize, pattern: &Pattern, t: usize, opts: &SearchOptions) -> Result<DoublingMapReport> {
    let big = avoider_masks(2 * n, pattern, t, opts)?;
    let shape = Shape::cubic(t, 2 * n)?;
    let mut fibers: HashMap<BitTensor, u64> = HashMap::new();
    let mut image_violations = Vec::new();
    for &mask in &big {
        let m = BitTensor::from_mask(shape.clone(), mask);
        let image = block_contract(&m)?;
        if !avoids(&image, pattern)? {
            image_violations.push(m);
        }
        *fibers.entry(image).or_default() += 1;
    }
    let fill = block_fillings(t);
    let mut fiber_violations: Vec<BitTensor> = fibers
        .iter()
        .filter(|(image, &count)| BigUint::from(count) > Pow::pow(&fill, image.ones_count()))
        .map(|(image, _)| image.clone())
        .collect();
    fiber_violations.sort_by(|a, b| a.ones().cmp(b.ones()));
    Ok(DoublingMapReport {
        avoiders_checked: big.len() as u64,
        distinct_images: fibers.len() as u64,
        image_violations,
        fiber_violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use crate::pattern::make_identity;

    fn opts() -> SearchOptions {
        SearchOptions::default()
    }

    #[test]
    fn identity_counts() {
        let id = make_identity(2, 2).unwrap();
        assert_eq!(count_avoiders(1, &id, 2, &opts()).unwrap(), 2);
        assert_eq!(count_avoiders(2, &id, 2, &opts()).unwrap(), 12);
        let sq3 = Shape::cubic(2, 3).unwrap();
        assert_eq!(count_avoiders(3, &id, 2, &opts()).unwrap(), oracle::count_avoiders(&sq3, id.tensor()));
        let par = SearchOptions { threads: 3, ..opts() };
        assert_eq!(count_avoiders(4, &id, 2, &par).unwrap(), count_avoiders(4, &id, 2, &opts()).unwrap());
    }

    #[test]
    fn single_cell_pattern() {
        let p = Pattern::new(BitTensor::full(Shape::cubic(2, 1).unwrap())).unwrap();
        assert_eq!(count_avoiders(1, &p, 2, &opts()).unwrap(), 1);
        assert_eq!(count_avoiders(3, &p, 2, &opts()).unwrap(), 1);
    }

    #[test]
    fn klazar_identity() {
        let id = make_identity(2, 2).unwrap();
        let r = klazar_check(1, &id, 2, &opts()).unwrap();
        assert_eq!(r.lhs, BigUint::from(12u32));
        assert_eq!(r.rhs, BigUint::from(30u32));
        assert_eq!(r.f_n, Some(1));
        assert!(r.holds);
    }

    #[test]
    fn klazar_oversized_pattern() {
        let p = make_identity(2, 3).unwrap();
        let r = klazar_check(1, &p, 2, &opts()).unwrap();
        assert_eq!(r.lhs, BigUint::from(16u32));
        assert_eq!(r.rhs, BigUint::from(30u32));
        assert!(r.holds);
    }

    #[test]
    fn block_contraction() {
        let m = BitTensor::new(Shape::cubic(2, 4).unwrap(), vec![vec![0, 3], vec![3, 3]]).unwrap();
        let c = block_contract(&m).unwrap();
        assert_eq!(c.ones(), &[vec![0, 1], vec![1, 1]]);
        assert!(block_contract(&BitTensor::zeros(Shape::cubic(2, 3).unwrap())).is_err());
    }

    #[test]
    fn doubling_map_sound_for_identity() {
        let id = make_identity(2, 2).unwrap();
        for n in 1..=2 {
            let r = doubling_map_check(n, &id, 2, &opts()).unwrap();
            assert!(r.holds());
            assert_eq!(r.avoiders_checked, count_avoiders(2 * n, &id, 2, &opts()).unwrap());
        }
    }
}
