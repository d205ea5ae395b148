//! Storage and elementary transformations of t-dimensional 0-1 matrices.
//!
//! A [`BitTensor`] keeps its 1-entries as a sorted, duplicate-free list of
//! zero-based coordinates. A bit-packed view ([`CellLookup`]) is built on
//! demand for membership-heavy work such as containment search.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default limit on the number of cells for exhaustive sweeps.
pub const DEFAULT_CAP_CELLS: usize = 25;

/// Environment variable that overrides [`DEFAULT_CAP_CELLS`].
pub const CAP_ENV_VAR: &str = "TENSOR_EXTREMAL_CAP_CELLS";

/// Tensors are enumerated through a `u64` mask, so no cap can go past this.
pub const MAX_ENUMERATION_CELLS: usize = 63;

/// Largest cell count for which the dense bit-packed view is built.
pub const DENSE_LIMIT: usize = 1 << 16;

/// Enumeration cap taken from the environment, falling back to the default.
pub fn cap_cells_from_env() -> usize {
    std::env::var(CAP_ENV_VAR)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_CAP_CELLS)
}

/// A zero-based coordinate `(i_1, ..., i_t)`.
pub type Coord = Vec<usize>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Shape {
    dims: Vec<usize>,
}

impl Shape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::UnsupportedDimension { min: 1, got: 0 });
        }
        if let Some(axis) = dims.iter().position(|&d| d == 0) {
            return Err(Error::arg(format!("dimension of axis {axis} must be positive")));
        }
        Ok(Shape { dims })
    }

    /// The `n x ... x n` shape with `t` axes.
    pub fn cubic(t: usize, n: usize) -> Result<Self> {
        Shape::new(vec![n; t])
    }

    pub fn t(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, axis: usize) -> usize {
        self.dims[axis]
    }

    /// Total number of cells, saturating at `u128::MAX`.
    pub fn cells(&self) -> u128 {
        self.dims
            .iter()
            .try_fold(1u128, |acc, &d| acc.checked_mul(d as u128))
            .unwrap_or(u128::MAX)
    }

    pub fn is_cubic(&self) -> bool {
        self.dims.windows(2).all(|w| w[0] == w[1])
    }

    /// Common side length when the shape is cubic.
    pub fn side(&self) -> Option<usize> {
        self.is_cubic().then(|| self.dims[0])
    }

    pub fn check_coord(&self, coord: &[usize]) -> Result<()> {
        if coord.len() != self.t() {
            return Err(Error::CoordArity {
                coord: coord.to_vec(),
                got: coord.len(),
                expected: self.t(),
            });
        }
        for (axis, (&i, &d)) in coord.iter().zip(&self.dims).enumerate() {
            if i >= d {
                return Err(Error::OutOfBounds {
                    coord: coord.to_vec(),
                    axis,
                    dim: d,
                });
            }
        }
        Ok(())
    }

    /// Row-major strides (last axis varies fastest).
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.t()];
        for r in (0..self.t().saturating_sub(1)).rev() {
            strides[r] = strides[r + 1] * self.dims[r + 1];
        }
        strides
    }

    /// Row-major linear index of an in-bounds coordinate.
    pub fn linear_index(&self, coord: &[usize]) -> usize {
        coord
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&i, &d)| acc * d + i)
    }

    /// Inverse of [`Shape::linear_index`].
    pub fn coord_of(&self, mut index: usize) -> Coord {
        let mut coord = vec![0; self.t()];
        for r in (0..self.t()).rev() {
            coord[r] = index % self.dims[r];
            index /= self.dims[r];
        }
        coord
    }

    /// All coordinates in lexicographic order.
    pub fn coords(&self) -> impl Iterator<Item = Coord> + '_ {
        let cells = usize::try_from(self.cells()).unwrap_or(usize::MAX);
        (0..cells).map(move |i| self.coord_of(i))
    }

    /// The shape with `axis` deleted.
    pub fn without_axis(&self, axis: usize) -> Result<Shape> {
        let mut dims = self.dims.clone();
        dims.remove(axis);
        Shape::new(dims)
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", parts.join("x"))
    }
}

/// A t-dimensional 0-1 matrix stored as its sorted set of 1-coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitTensor {
    shape: Shape,
    ones: Vec<Coord>,
}

impl BitTensor {
    /// Builds a tensor, sorting and deduplicating `ones`.
    pub fn new(shape: Shape, mut ones: Vec<Coord>) -> Result<Self> {
        for c in &ones {
            shape.check_coord(c)?;
        }
        ones.sort_unstable();
        ones.dedup();
        Ok(BitTensor { shape, ones })
    }

    pub fn zeros(shape: Shape) -> Self {
        BitTensor {
            shape,
            ones: Vec::new(),
        }
    }

    pub fn full(shape: Shape) -> Self {
        let ones = shape.coords().collect();
        BitTensor { shape, ones }
    }

    /// Tensor whose cell with linear index `i` is 1 iff bit `i` of `mask` is set.
    pub fn from_mask(shape: Shape, mask: u64) -> Self {
        let cells = usize::try_from(shape.cells()).unwrap_or(usize::MAX).min(64);
        let ones = (0..cells)
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| shape.coord_of(i))
            .collect();
        BitTensor { shape, ones }
    }

    /// Inverse of [`BitTensor::from_mask`]; `None` above 64 cells.
    pub fn to_mask(&self) -> Option<u64> {
        if self.shape.cells() > 64 {
            return None;
        }
        Some(
            self.ones
                .iter()
                .fold(0u64, |m, c| m | 1 << self.shape.linear_index(c)),
        )
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn t(&self) -> usize {
        self.shape.t()
    }

    pub fn dims(&self) -> &[usize] {
        self.shape.dims()
    }

    pub fn ones(&self) -> &[Coord] {
        &self.ones
    }

    pub fn ones_count(&self) -> usize {
        self.ones.len()
    }

    pub fn is_zero(&self) -> bool {
        self.ones.is_empty()
    }

    pub fn get(&self, coord: &[usize]) -> bool {
        self.ones
            .binary_search_by(|c| c.as_slice().cmp(coord))
            .is_ok()
    }

    /// Entrywise `self <= other` on equal shapes.
    pub fn is_dominated_by(&self, other: &BitTensor) -> bool {
        self.shape == other.shape && self.ones.iter().all(|c| other.get(c))
    }

    fn axis_args(&self, r: usize) -> Result<()> {
        if self.t() < 2 {
            return Err(Error::UnsupportedDimension {
                min: 2,
                got: self.t(),
            });
        }
        if r >= self.t() {
            return Err(Error::arg(format!(
                "axis {r} out of range for a {}-dimensional tensor",
                self.t()
            )));
        }
        Ok(())
    }

    /// The `(r, j)`-slice: entries with index `j` on axis `r`, that axis removed.
    pub fn slice(&self, r: usize, j: usize) -> Result<BitTensor> {
        self.axis_args(r)?;
        if j >= self.shape.dim(r) {
            return Err(Error::arg(format!(
                "slice position {j} out of range for axis {r} of dimension {}",
                self.shape.dim(r)
            )));
        }
        let shape = self.shape.without_axis(r)?;
        // Deleting a fixed axis keeps lexicographic order.
        let ones = self
            .ones
            .iter()
            .filter(|c| c[r] == j)
            .map(|c| drop_axis(c, r))
            .collect();
        Ok(BitTensor { shape, ones })
    }

    /// The `r`th smash: projection along axis `r` recording non-empty fibres.
    pub fn smash(&self, r: usize) -> Result<BitTensor> {
        self.axis_args(r)?;
        let shape = self.shape.without_axis(r)?;
        let ones = self.ones.iter().map(|c| drop_axis(c, r)).collect();
        BitTensor::new(shape, ones)
    }

    /// Submatrix picked out by one strictly increasing index list per axis.
    pub fn subtensor(&self, selections: &[Vec<usize>]) -> Result<BitTensor> {
        check_selections(&self.shape, selections)?;
        let dims = selections.iter().map(Vec::len).collect::<Vec<_>>();
        if dims.contains(&0) {
            return Err(Error::arg("every selection must pick at least one index"));
        }
        let shape = Shape::new(dims)?;
        let mut ones = Vec::new();
        'outer: for c in &self.ones {
            let mut image = Vec::with_capacity(c.len());
            for (sel, &i) in selections.iter().zip(c) {
                match sel.binary_search(&i) {
                    Ok(a) => image.push(a),
                    Err(_) => continue 'outer,
                }
            }
            ones.push(image);
        }
        Ok(BitTensor { shape, ones })
    }

    /// Bit-packed membership view.
    pub fn lookup(&self) -> CellLookup<'_> {
        CellLookup::new(self)
    }

    pub fn to_json(&self) -> TensorJson {
        TensorJson {
            t: self.t(),
            shape: self.dims().to_vec(),
            ones: self.ones.clone(),
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("tensor serialization cannot fail")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: TensorJson = serde_json::from_str(s).map_err(|e| {
            Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
        })?;
        raw.into_tensor()
    }
}

impl fmt::Display for BitTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} tensor with {} ones", self.shape, self.ones_count())
    }
}

fn drop_axis(c: &[usize], r: usize) -> Coord {
    c.iter()
        .enumerate()
        .filter(|&(s, _)| s != r)
        .map(|(_, &i)| i)
        .collect()
}

pub(crate) fn check_selections(shape: &Shape, selections: &[Vec<usize>]) -> Result<()> {
    if selections.len() != shape.t() {
        return Err(Error::arg(format!(
            "expected {} selection lists, got {}",
            shape.t(),
            selections.len()
        )));
    }
    for (axis, sel) in selections.iter().enumerate() {
        if sel.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::arg(format!(
                "selection for axis {axis} is not strictly increasing: {sel:?}"
            )));
        }
        if let Some(&last) = sel.last() {
            if last >= shape.dim(axis) {
                return Err(Error::arg(format!(
                    "selection index {last} out of range for axis {axis} of dimension {}",
                    shape.dim(axis)
                )));
            }
        }
    }
    Ok(())
}

/// Membership oracle over a tensor's cells: bit-packed when the tensor has at
/// most [`DENSE_LIMIT`] cells, binary search over the sorted ones otherwise.
pub enum CellLookup<'a> {
    Dense { strides: Vec<usize>, bits: Vec<u64> },
    Sparse(&'a BitTensor),
}

impl<'a> CellLookup<'a> {
    pub fn new(tensor: &'a BitTensor) -> Self {
        let cells = tensor.shape().cells();
        if cells > DENSE_LIMIT as u128 {
            return CellLookup::Sparse(tensor);
        }
        let mut bits = vec![0u64; (cells as usize).div_ceil(64)];
        for c in tensor.ones() {
            let i = tensor.shape().linear_index(c);
            bits[i / 64] |= 1 << (i % 64);
        }
        CellLookup::Dense {
            strides: tensor.shape().strides(),
            bits,
        }
    }

    #[inline]
    pub fn get(&self, coord: &[usize]) -> bool {
        match self {
            CellLookup::Dense { strides, bits } => {
                let i: usize = coord.iter().zip(strides).map(|(a, b)| a * b).sum();
                bits[i / 64] >> (i % 64) & 1 == 1
            }
            CellLookup::Sparse(t) => t.get(coord),
        }
    }
}

impl Serialize for BitTensor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

/// Wire form: `{"t": .., "shape": [..], "ones": [[..], ..]}`, zero-based,
/// ones sorted lexicographically without duplicates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorJson {
    pub t: usize,
    pub shape: Vec<usize>,
    pub ones: Vec<Coord>,
}

impl TensorJson {
    /// Strict conversion: rejects unsorted or duplicated ones instead of
    /// repairing them.
    pub fn into_tensor(self) -> Result<BitTensor> {
        if self.t != self.shape.len() {
            return Err(Error::Parse(format!(
                "field `t` is {} but `shape` has {} entries",
                self.t,
                self.shape.len()
            )));
        }
        let shape = Shape::new(self.shape).map_err(|e| Error::Parse(format!("field `shape`: {e}")))?;
        for (i, c) in self.ones.iter().enumerate() {
            shape
                .check_coord(c)
                .map_err(|e| Error::Parse(format!("field `ones[{i}]`: {e}")))?;
        }
        if let Some(i) = self.ones.windows(2).position(|w| w[0] >= w[1]) {
            let what = if self.ones[i] == self.ones[i + 1] {
                "duplicates"
            } else {
                "is not sorted after"
            };
            return Err(Error::Parse(format!(
                "field `ones[{}]` = {:?} {what} `ones[{i}]` = {:?}",
                i + 1,
                self.ones[i + 1],
                self.ones[i]
            )));
        }
        Ok(BitTensor {
            shape,
            ones: self.ones,
        })
    }
}

/// Every tensor of a shape, in increasing order of the cell-set bitmask
/// (bit `i` is the cell with row-major index `i`).
pub struct TensorEnumerator {
    shape: Shape,
    next: u64,
    end: u64,
}

impl Iterator for TensorEnumerator {
    type Item = BitTensor;

    fn next(&mut self) -> Option<BitTensor> {
        if self.next >= self.end {
            return None;
        }
        let t = BitTensor::from_mask(self.shape.clone(), self.next);
        self.next += 1;
        Some(t)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = usize::try_from(self.end - self.next).unwrap_or(usize::MAX);
        (left, Some(left))
    }
}

/// Number of masks for a shape, checked against `cap_cells`.
pub fn enumeration_size(shape: &Shape, cap_cells: usize) -> Result<u64> {
    let cells = shape.cells();
    let limit = cap_cells.min(MAX_ENUMERATION_CELLS);
    if cells > limit as u128 {
        return Err(Error::Resource {
            cap: "cap-cells",
            needed: cells,
            limit: limit as u128,
            hint: "--cap-cells or TENSOR_EXTREMAL_CAP_CELLS",
        });
    }
    Ok(1u64 << cells)
}

/// Enumerates all `2^(cells)` tensors of `shape`.
pub fn enumerate_tensors(shape: &Shape, cap_cells: usize) -> Result<TensorEnumerator> {
    let end = enumeration_size(shape, cap_cells)?;
    Ok(TensorEnumerator {
        shape: shape.clone(),
        next: 0,
        end,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(dims: &[usize], ones: &[&[usize]]) -> BitTensor {
        BitTensor::new(
            Shape::new(dims.to_vec()).unwrap(),
            ones.iter().map(|c| c.to_vec()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn construction_dedups_and_sorts() {
        let m = t(&[2, 2], &[&[1, 1], &[0, 0], &[0, 0]]);
        assert_eq!(m.ones_count(), 2);
        assert_eq!(m.ones(), &[vec![0, 0], vec![1, 1]]);
        assert_eq!(t(&[2, 2], &[&[0, 0], &[0, 0]]).ones_count(), 1);
        assert_eq!(BitTensor::zeros(Shape::cubic(3, 2).unwrap()).ones_count(), 0);
    }

    #[test]
    fn out_of_bounds_names_axis() {
        let err = BitTensor::new(Shape::new(vec![2, 3]).unwrap(), vec![vec![1, 3]]).unwrap_err();
        assert_eq!(
            err,
            Error::OutOfBounds {
                coord: vec![1, 3],
                axis: 1,
                dim: 3
            }
        );
        assert!(err.to_string().contains("axis 1"));
    }

    #[test]
    fn slice_examples() {
        let id = t(&[2, 2], &[&[0, 0], &[1, 1]]);
        let s = id.slice(0, 0).unwrap();
        assert_eq!(s.dims(), &[2]);
        assert_eq!(s.ones(), &[vec![0]]);

        let m = t(&[2, 2, 2], &[&[0, 0, 0], &[1, 1, 1]]);
        let s = m.slice(1, 1).unwrap();
        assert_eq!(s.dims(), &[2, 2]);
        assert_eq!(s.ones(), &[vec![1, 1]]);
    }

    #[test]
    fn slice_errors() {
        let id = t(&[2, 2], &[&[0, 0], &[1, 1]]);
        assert!(matches!(id.slice(2, 0), Err(Error::Argument(_))));
        assert!(matches!(id.slice(0, 2), Err(Error::Argument(_))));
        let line = t(&[3], &[&[1]]);
        assert_eq!(
            line.slice(0, 0).unwrap_err(),
            Error::UnsupportedDimension { min: 2, got: 1 }
        );
    }

    #[test]
    fn smash_examples() {
        let m = t(&[2, 2, 2], &[&[0, 0, 0], &[1, 0, 0]]);
        let s = m.smash(0).unwrap();
        assert_eq!(s.ones(), &[vec![0, 0]]);
        let z = BitTensor::zeros(Shape::cubic(3, 2).unwrap()).smash(1).unwrap();
        assert!(z.is_zero());
        assert_eq!(z.dims(), &[2, 2]);
        assert!(matches!(m.smash(3), Err(Error::Argument(_))));
    }

    #[test]
    fn subtensor_examples() {
        let full = BitTensor::full(Shape::cubic(2, 3).unwrap());
        let s = full.subtensor(&[vec![0, 2], vec![0, 2]]).unwrap();
        assert_eq!(s, BitTensor::full(Shape::cubic(2, 2).unwrap()));
        let all = vec![vec![0, 1, 2], vec![0, 1, 2]];
        assert_eq!(full.subtensor(&all).unwrap(), full);
        let id = t(&[2, 2], &[&[0, 0], &[1, 1]]);
        let s = id.subtensor(&[vec![0], vec![1]]).unwrap();
        assert_eq!(s.dims(), &[1, 1]);
        assert!(s.is_zero());
    }

    #[test]
    fn subtensor_rejects_bad_selections() {
        let id = t(&[2, 2], &[&[0, 0], &[1, 1]]);
        assert!(id.subtensor(&[vec![1, 0], vec![0, 1]]).is_err());
        assert!(id.subtensor(&[vec![0, 2], vec![0, 1]]).is_err());
        assert!(id.subtensor(&[vec![0, 1]]).is_err());
    }

    #[test]
    fn enumeration_counts_and_cap() {
        let count = |dims: &[usize]| {
            enumerate_tensors(&Shape::new(dims.to_vec()).unwrap(), DEFAULT_CAP_CELLS)
                .unwrap()
                .count()
        };
        assert_eq!(count(&[1, 1]), 2);
        assert_eq!(count(&[2, 2]), 16);
        assert_eq!(count(&[2, 2, 2]), 256);
        let err = enumerate_tensors(&Shape::cubic(2, 6).unwrap(), DEFAULT_CAP_CELLS)
            .err()
            .unwrap();
        assert!(matches!(err, Error::Resource { cap: "cap-cells", .. }));
        assert!(err.to_string().contains("--cap-cells"));
    }

    #[test]
    fn enumeration_order_follows_masks() {
        let shape = Shape::new(vec![2, 2]).unwrap();
        let all: Vec<_> = enumerate_tensors(&shape, 25).unwrap().collect();
        assert!(all[0].is_zero());
        assert_eq!(all[1].ones(), &[vec![0, 0]]);
        assert_eq!(all[2].ones(), &[vec![0, 1]]);
        for (i, m) in all.iter().enumerate() {
            assert_eq!(m.to_mask(), Some(i as u64));
        }
    }

    #[test]
    fn json_is_strict() {
        let ok = BitTensor::from_json_str(r#"{"t":2,"shape":[2,2],"ones":[[0,0],[1,1]]}"#).unwrap();
        assert_eq!(ok.ones_count(), 2);
        let unsorted = BitTensor::from_json_str(r#"{"t":2,"shape":[2,2],"ones":[[1,1],[0,0]]}"#);
        assert!(unsorted.unwrap_err().to_string().contains("ones[1]"));
        let dup = BitTensor::from_json_str(r#"{"t":2,"shape":[2,2],"ones":[[0,0],[0,0]]}"#);
        assert!(dup.unwrap_err().to_string().contains("duplicates"));
        let oob = BitTensor::from_json_str(r#"{"t":2,"shape":[2,2],"ones":[[0,2]]}"#);
        assert!(oob.unwrap_err().to_string().contains("axis 1"));
        let arity = BitTensor::from_json_str(r#"{"t":3,"shape":[2,2],"ones":[]}"#);
        assert!(arity.unwrap_err().to_string().contains("`t`"));
        let syntax = BitTensor::from_json_str("{\"t\":2,\n\"shape\":[2,2],\"ones\":[[0,0]");
        assert!(syntax.unwrap_err().to_string().contains("line 2"));
    }

    #[test]
    fn lookup_agrees_with_get() {
        let m = t(&[3, 2, 2], &[&[0, 1, 0], &[2, 0, 1], &[1, 1, 1]]);
        let lk = m.lookup();
        for c in m.shape().coords() {
            assert_eq!(lk.get(&c), m.get(&c));
        }
    }
}
