//! Slice reduction for sunflower patterns: with `s` a core axis and `P'`
//! the `(s, c_s)`-slice of `P`, `f_t(n, P) <= n f_(t-1)(n, P')`.
//!
//! A copy of `P'` inside the `(s, i)`-slice of a host only extends to a copy
//! of `P` when the host has `c_s` indices before `i` and `k_s - 1 - c_s`
//! after it, `k_s` being the extent of `P` along `s`. When `k_s > 1` the
//! boundary slices are unconstrained, and the inequality can fail for small
//! `n`. The report therefore also carries the bound the slice argument does
//! give: `g f_(t-1)(n, P') + (n - g) n^(t-1)` with `g = n - k_s + 1`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pattern::Pattern;

use super::search::f_exact;
use super::SearchOptions;

#[derive(Clone, Debug, Serialize)]
pub struct ReductionReport {
    pub axis: usize,
    pub core_value: usize,
    /// `f_t(n, P)`.
    pub lhs: usize,
    /// `f_(t-1)(n, P')`.
    pub slice_extremal: usize,
    /// `n f_(t-1)(n, P')`.
    pub rhs: usize,
    pub holds: bool,
    /// Extent `k_s` of the pattern along the chosen axis.
    pub core_extent: usize,
    pub boundary_rhs: usize,
    pub boundary_holds: bool,
    pub exact: bool,
}

/// Picks the core axis (`axis`, or the smallest axis of the minimal core)
/// and its fixed value.
fn core_axis(pattern: &Pattern, axis: Option<usize>) -> Result<(usize, usize)> {
    let ones = pattern.ones();
    let Some(first) = ones.first() else {
        return Err(Error::arg("a pattern without ones has no sunflower slice"));
    };
    let spec = pattern
        .sunflower_core()
        .ok_or_else(|| Error::arg("pattern is not a sunflower pattern"))?;
    match axis {
        Some(s) if s >= pattern.t() => Err(Error::arg(format!("axis {s} out of range"))),
        // A lone one is a sunflower for every core.
        Some(s) if ones.len() == 1 => Ok((s, first[s])),
        Some(s) => spec
            .core_values
            .get(&s)
            .map(|&c| (s, c))
            .ok_or_else(|| Error::arg(format!("axis {s} is not in the sunflower core {:?}", spec.core()))),
        None => spec.core_values.iter().next().map(|(&s, &c)| (s, c)).ok_or_else(|| {
            Error::arg(
                "the sunflower core is empty: bound f_t(n, P) directly with `extremal` \
                 (free patterns are covered by the full-division threshold)",
            )
        }),
    }
}

pub fn sunflower_reduction_check(
    n: usize,
    pattern: &Pattern,
    axis: Option<usize>,
    opts: &SearchOptions,
) -> Result<ReductionReport> {
    let t = pattern.t();
    if t < 2 {
        return Err(Error::UnsupportedDimension { min: 2, got: t });
    }
    let (s, c) = core_axis(pattern, axis)?;
    let slice = Pattern::new(pattern.tensor().slice(s, c)?)?;
    let full = f_exact(n, pattern, t, opts)?;
    let reduced = f_exact(n, &slice, t - 1, opts)?;
    let rhs = n * reduced.value;
    let core_extent = pattern.dims()[s];
    let inner = (n + 1).saturating_sub(core_extent);
    let boundary_rhs = inner * reduced.value + (n - inner) * n.pow(t as u32 - 1);
    Ok(ReductionReport {
        axis: s,
        core_value: c,
        lhs: full.value,
        slice_extremal: reduced.value,
        rhs,
        holds: full.value <= rhs,
        core_extent,
        boundary_rhs,
        boundary_holds: full.value <= boundary_rhs,
        exact: full.exact && reduced.exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use crate::pattern::{make_identity, make_sunflower, SunflowerSpec};
    use crate::tensor::{BitTensor, Shape};

    #[test]
    fn two_petals_on_a_core_axis() {
        let core = SunflowerSpec::new([(2, 0)]);
        let p = make_sunflower(3, &core, 2, &[2, 2, 1]).unwrap();
        let r = sunflower_reduction_check(2, &p, None, &SearchOptions::default()).unwrap();
        assert_eq!(r.axis, 2);
        // Oracle: brute force over 256 cubes and 16 squares.
        let cube = Shape::cubic(3, 2).unwrap();
        assert_eq!(Some(r.lhs), oracle::extremal(&cube, p.tensor()));
        let slice = p.tensor().slice(2, 0).unwrap();
        assert_eq!(Some(r.slice_extremal), oracle::extremal(&Shape::cubic(2, 2).unwrap(), &slice));
        assert!(r.holds);
        assert!(r.exact);
    }

    #[test]
    fn single_one_with_explicit_axis() {
        let shape = Shape::new(vec![1, 2, 2]).unwrap();
        let p = Pattern::new(BitTensor::new(shape, vec![vec![0, 0, 1]]).unwrap()).unwrap();
        let r = sunflower_reduction_check(2, &p, Some(0), &SearchOptions::default()).unwrap();
        // Oracle: avoiding one cell of a 2x2 window in a 2x2 slice leaves 3.
        assert_eq!((r.lhs, r.slice_extremal, r.rhs), (6, 3, 6));
        assert!(r.holds);
    }

    #[test]
    fn boundary_slices_break_the_plain_bound() {
        // Extent 2 along the core axis: only the host cell (1,0,1) can play
        // the one, so f = 7, while 2 f_2(2, P') = 6.
        let p = Pattern::new(BitTensor::new(Shape::cubic(3, 2).unwrap(), vec![vec![1, 0, 1]]).unwrap()).unwrap();
        let r = sunflower_reduction_check(2, &p, Some(0), &SearchOptions::default()).unwrap();
        assert_eq!(Some(r.lhs), oracle::extremal(&Shape::cubic(3, 2).unwrap(), p.tensor()));
        assert_eq!((r.lhs, r.rhs), (7, 6));
        assert!(!r.holds);
        assert_eq!(r.boundary_rhs, 3 + 4);
        assert!(r.boundary_holds);
    }

    #[test]
    fn order_one() {
        let core = SunflowerSpec::new([(0, 0)]);
        let p = make_sunflower(3, &core, 1, &[1, 1, 1]).unwrap();
        let r = sunflower_reduction_check(1, &p, Some(0), &SearchOptions::default()).unwrap();
        assert_eq!((r.lhs, r.rhs), (0, 0));
        assert!(r.holds);
    }

    #[test]
    fn empty_core_is_rejected() {
        let p = make_identity(3, 2).unwrap();
        let err = sunflower_reduction_check(2, &p, None, &SearchOptions::default()).unwrap_err();
        assert!(err.to_string().contains("extremal"));
        assert!(sunflower_reduction_check(2, &p, Some(0), &SearchOptions::default()).is_err());
    }
}
