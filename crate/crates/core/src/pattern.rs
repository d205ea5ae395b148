//! t-patterns: validation, classification and canonical constructions.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tensor::{BitTensor, Coord, Shape};

/// Core axes of a sunflower pattern together with the forced index on each.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize)]
pub struct SunflowerSpec {
    pub core_values: BTreeMap<usize, usize>,
}

impl SunflowerSpec {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(core_values: impl IntoIterator<Item = (usize, usize)>) -> Self {
        SunflowerSpec {
            core_values: core_values.into_iter().collect(),
        }
    }

    pub fn core(&self) -> Vec<usize> {
        self.core_values.keys().copied().collect()
    }

    pub fn is_empty(&self) -> bool {
        self.core_values.is_empty()
    }

    /// Does every pair of `ones` agree on the core (at the fixed values) and
    /// differ everywhere else?
    pub fn admits(&self, ones: &[Coord]) -> bool {
        let on_core = ones
            .iter()
            .all(|c| self.core_values.iter().all(|(&s, &v)| c.get(s) == Some(&v)));
        on_core
            && pairs(ones).all(|(a, b)| {
                (0..a.len())
                    .filter(|s| !self.core_values.contains_key(s))
                    .all(|s| a[s] != b[s])
            })
    }
}

fn pairs(ones: &[Coord]) -> impl Iterator<Item = (&Coord, &Coord)> {
    ones.iter()
        .enumerate()
        .flat_map(move |(i, a)| ones[i + 1..].iter().map(move |b| (a, b)))
}

fn agreements(a: &[usize], b: &[usize]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x == y).count()
}

/// True iff any two distinct ones differ in at least two positions.
pub fn validate_pattern(m: &BitTensor) -> bool {
    first_conflict(m).is_none()
}

fn first_conflict(m: &BitTensor) -> Option<(Coord, Coord)> {
    let t = m.t();
    pairs(m.ones())
        .find(|(a, b)| t - agreements(a, b) < 2)
        .map(|(a, b)| (a.clone(), b.clone()))
}

/// Number of ones in every slice, indexed `[axis][position]`.
fn slice_counts(m: &BitTensor) -> Vec<Vec<usize>> {
    let mut counts: Vec<Vec<usize>> = m.dims().iter().map(|&d| vec![0; d]).collect();
    for c in m.ones() {
        for (r, &i) in c.iter().enumerate() {
            counts[r][i] += 1;
        }
    }
    counts
}

/// Every slice holds at most one 1.
pub fn is_free_tensor(m: &BitTensor) -> bool {
    slice_counts(m).iter().flatten().all(|&n| n <= 1)
}

/// Result of a total classification predicate: non-cubic input yields
/// `false` plus a diagnostic instead of an error.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub diagnostic: Option<String>,
}

impl Verdict {
    fn yes() -> Self {
        Verdict {
            holds: true,
            diagnostic: None,
        }
    }

    fn no(why: impl Into<String>) -> Self {
        Verdict {
            holds: false,
            diagnostic: Some(why.into()),
        }
    }
}

fn non_cubic(m: &BitTensor, what: &str) -> Verdict {
    Verdict::no(format!("{what} requires equal dimensions, shape is {}", m.shape()))
}

/// Exactly one 1 in every slice.
pub fn permutation_verdict(m: &BitTensor) -> Verdict {
    if !m.shape().is_cubic() {
        return non_cubic(m, "a t-dimensional permutation");
    }
    for (r, per_axis) in slice_counts(m).iter().enumerate() {
        if let Some(j) = per_axis.iter().position(|&n| n != 1) {
            return Verdict::no(format!("slice ({r}, {j}) holds {} ones", per_axis[j]));
        }
    }
    Verdict::yes()
}

pub fn is_permutation_tensor(m: &BitTensor) -> bool {
    permutation_verdict(m).holds
}

/// Recursive Latin test: permutation matrices at t = 2, and for larger t
/// every slice must be Latin one dimension down.
pub fn latin_verdict(m: &BitTensor) -> Verdict {
    let t = m.t();
    if t < 2 {
        return Verdict::no(format!("Latin matrices need t >= 2, got t = {t}"));
    }
    let Some(n) = m.shape().side() else {
        return non_cubic(m, "a Latin matrix");
    };
    // Necessary condition: exactly n^(t-1) ones.
    let expected = (n as u128).pow(t as u32 - 1);
    if m.ones_count() as u128 != expected {
        return Verdict::no(format!(
            "order {n} Latin matrix needs {expected} ones, found {}",
            m.ones_count()
        ));
    }
    if t == 2 {
        return permutation_verdict(m);
    }
    for r in 0..t {
        for j in 0..n {
            let s = m.slice(r, j).expect("axis and position are in range");
            let v = latin_verdict(&s);
            if !v.holds {
                return Verdict::no(format!(
                    "slice ({r}, {j}) is not Latin: {}",
                    v.diagnostic.unwrap_or_default()
                ));
            }
        }
    }
    Verdict::yes()
}

pub fn is_latin(m: &BitTensor) -> bool {
    latin_verdict(m).holds
}

/// Inclusion-minimal sunflower core, if any.
///
/// With two or more ones the core is forced: it is exactly the set of axes
/// on which some pair agrees. With fewer ones every core works and the empty
/// one is reported.
pub fn sunflower_core_of(m: &BitTensor) -> Option<SunflowerSpec> {
    let ones = m.ones();
    if ones.len() < 2 {
        return Some(SunflowerSpec::empty());
    }
    let forced = (0..m.t())
        .filter(|&s| pairs(ones).any(|(a, b)| a[s] == b[s]))
        .map(|s| (s, ones[0][s]));
    let spec = SunflowerSpec::new(forced);
    spec.admits(ones).then_some(spec)
}

/// A validated t-pattern with its classification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    tensor: BitTensor,
    is_free: bool,
    is_permutation: bool,
    is_latin: bool,
    sunflower: Option<SunflowerSpec>,
    diagnostics: Vec<String>,
}

impl Pattern {
    /// Validates and classifies `tensor`.
    pub fn new(tensor: BitTensor) -> Result<Self> {
        if let Some((first, second)) = first_conflict(&tensor) {
            return Err(Error::NotAPattern { first, second });
        }
        let mut diagnostics = Vec::new();
        let perm = permutation_verdict(&tensor);
        diagnostics.extend(perm.diagnostic.clone());
        let latin = latin_verdict(&tensor);
        diagnostics.extend(latin.diagnostic.clone());
        Ok(Pattern {
            is_free: is_free_tensor(&tensor),
            is_permutation: perm.holds,
            is_latin: latin.holds,
            sunflower: sunflower_core_of(&tensor),
            tensor,
            diagnostics,
        })
    }

    pub fn tensor(&self) -> &BitTensor {
        &self.tensor
    }

    pub fn t(&self) -> usize {
        self.tensor.t()
    }

    pub fn dims(&self) -> &[usize] {
        self.tensor.dims()
    }

    pub fn ones(&self) -> &[Coord] {
        self.tensor.ones()
    }

    pub fn is_free(&self) -> bool {
        self.is_free
    }

    pub fn is_permutation(&self) -> bool {
        self.is_permutation
    }

    pub fn is_latin(&self) -> bool {
        self.is_latin
    }

    pub fn sunflower_core(&self) -> Option<&SunflowerSpec> {
        self.sunflower.as_ref()
    }

    pub fn diagnostics(&self) -> &[String] {
        &self.diagnostics
    }

    pub fn classification(&self) -> Classification {
        Classification {
            valid: true,
            free: self.is_free,
            permutation: self.is_permutation,
            latin: self.is_latin,
            sunflower_core: self.sunflower.as_ref().map(SunflowerSpec::core),
            core_values: self
                .sunflower
                .as_ref()
                .map(|s| s.core_values.values().copied().collect()),
            diagnostics: self.diagnostics.clone(),
        }
    }
}

/// Report emitted by the `classify` command.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub valid: bool,
    pub free: bool,
    pub permutation: bool,
    pub latin: bool,
    pub sunflower_core: Option<Vec<usize>>,
    pub core_values: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

/// Classifies any tensor; invalid patterns get `valid: false` and nothing else.
pub fn classify(m: &BitTensor) -> Classification {
    match Pattern::new(m.clone()) {
        Ok(p) => p.classification(),
        Err(e) => Classification {
            valid: false,
            free: false,
            permutation: false,
            latin: false,
            sunflower_core: None,
            core_values: None,
            diagnostics: vec![e.to_string()],
        },
    }
}

/// The `k x ... x k` diagonal pattern with ones at `(i, ..., i)`.
pub fn make_identity(t: usize, k: usize) -> Result<Pattern> {
    if t < 2 || k < 1 {
        return Err(Error::arg(format!("identity pattern needs t >= 2 and k >= 1, got t = {t}, k = {k}")));
    }
    let ones = (0..k).map(|i| vec![i; t]).collect();
    Pattern::new(BitTensor::new(Shape::cubic(t, k)?, ones)?)
}

/// Ones at every coordinate whose index sum is divisible by `n`.
pub fn make_cyclic_latin(n: usize, t: usize) -> Result<BitTensor> {
    if n < 1 || t < 2 {
        return Err(Error::arg(format!("cyclic Latin tensor needs n >= 1 and t >= 2, got n = {n}, t = {t}")));
    }
    let shape = Shape::cubic(t, n)?;
    let ones = shape
        .coords()
        .filter(|c| c.iter().sum::<usize>() % n == 0)
        .collect();
    BitTensor::new(shape, ones)
}

/// Sunflower pattern with `petals` ones: fixed values on the core axes and
/// index `j` on every other axis for the `j`th one.
pub fn make_sunflower(
    t: usize,
    core: &SunflowerSpec,
    petals: usize,
    dims: &[usize],
) -> Result<Pattern> {
    if dims.len() != t {
        return Err(Error::arg(format!("expected {t} dimensions, got {}", dims.len())));
    }
    let shape = Shape::new(dims.to_vec())?;
    for (&s, &v) in &core.core_values {
        if s >= t {
            return Err(Error::arg(format!("core axis {s} out of range for t = {t}")));
        }
        if v >= dims[s] {
            return Err(Error::arg(format!(
                "core value {v} out of range for axis {s} of dimension {}",
                dims[s]
            )));
        }
    }
    let free_axes: Vec<usize> = (0..t).filter(|s| !core.core_values.contains_key(s)).collect();
    if petals > 1 && free_axes.is_empty() {
        return Err(Error::arg("a core covering every axis admits at most one petal"));
    }
    if let Some(&s) = free_axes.iter().find(|&&s| dims[s] < petals) {
        return Err(Error::arg(format!(
            "{petals} petals do not fit on axis {s} of dimension {}",
            dims[s]
        )));
    }
    let ones = (0..petals)
        .map(|j| {
            (0..t)
                .map(|s| core.core_values.get(&s).copied().unwrap_or(j))
                .collect()
        })
        .collect();
    Pattern::new(BitTensor::new(shape, ones)?)
}
