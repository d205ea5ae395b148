//! Enumeration of t-dimensional Latin matrices.
//!
//! A t-dimensional Latin matrix of order `n` has exactly one 1 on every
//! axis-parallel line, so it is the graph of a map `[n]^(t-1) -> [n]` that
//! is injective along every line of `[n]^(t-1)`. The enumerator fills that
//! map cell by cell in lexicographic order, tracking the symbols already
//! used on each line.

use crate::containment::avoids;
use crate::error::{Error, Result};
use crate::pattern::Pattern;
use crate::tensor::{BitTensor, Shape};

/// Largest order enumerated by default for each dimension.
pub fn latin_reach(t: usize) -> usize {
    match t {
        2 => 6,
        3 => 4,
        4 => 3,
        _ => 2,
    }
}

fn check_reach(n: usize, t: usize, beyond_reach: bool) -> Result<()> {
    if t < 2 || n < 1 {
        return Err(Error::arg(format!("Latin matrices need t >= 2 and n >= 1, got t = {t}, n = {n}")));
    }
    if n > 64 {
        return Err(Error::arg("orders above 64 are not supported"));
    }
    if !beyond_reach && n > latin_reach(t) {
        return Err(Error::Resource {
            cap: "latin-reach",
            needed: n as u128,
            limit: latin_reach(t) as u128,
            hint: "--beyond-reach",
        });
    }
    Ok(())
}

struct Filler<'a> {
    n: usize,
    /// `lines[cell][a]`: id of the line through `cell` along axis `a`.
    lines: Vec<Vec<usize>>,
    /// `used[a][line]`: bitmask of symbols already on that line.
    used: Vec<Vec<u64>>,
    values: Vec<usize>,
    visit: &'a mut dyn FnMut(&[usize]),
}

impl Filler<'_> {
    fn fill(&mut self, cell: usize) {
        if cell == self.values.len() {
            (self.visit)(&self.values);
            return;
        }
        let blocked = self.lines[cell]
            .iter()
            .enumerate()
            .fold(0u64, |acc, (a, &line)| acc | self.used[a][line]);
        for v in 0..self.n {
            if blocked >> v & 1 == 1 {
                continue;
            }
            for (a, &line) in self.lines[cell].iter().enumerate() {
                self.used[a][line] |= 1 << v;
            }
            self.values[cell] = v;
            self.fill(cell + 1);
            for (a, &line) in self.lines[cell].iter().enumerate() {
                self.used[a][line] &= !(1 << v);
            }
        }
    }
}

/// Calls `visit` once per Latin matrix of order `n` and dimension `t`.
pub fn latin_for_each(n: usize, t: usize, beyond_reach: bool, visit: &mut dyn FnMut(&BitTensor)) -> Result<()> {
    check_reach(n, t, beyond_reach)?;
    let base = Shape::cubic(t - 1, n)?;
    let shape = Shape::cubic(t, n)?;
    let cells: Vec<Vec<usize>> = base.coords().collect();
    let line_count = n.pow(t as u32 - 2);
    let lines = cells
        .iter()
        .map(|c| {
            (0..t - 1)
                .map(|a| {
                    c.iter()
                        .enumerate()
                        .filter(|&(b, _)| b != a)
                        .fold(0, |acc, (_, &i)| acc * n + i)
                })
                .collect()
        })
        .collect();
    let mut emit = |values: &[usize]| {
        let ones = cells
            .iter()
            .zip(values)
            .map(|(c, &v)| {
                let mut full = c.clone();
                full.push(v);
                full
            })
            .collect();
        let m = BitTensor::new(shape.clone(), ones).expect("symbols are in range");
        visit(&m);
    };
    let mut filler = Filler {
        n,
        lines,
        used: vec![vec![0; line_count]; t - 1],
        values: vec![0; cells.len()],
        visit: &mut emit,
    };
    filler.fill(0);
    Ok(())
}

/// All Latin matrices of order `n` and dimension `t`.
pub fn latin_enumerate(n: usize, t: usize, beyond_reach: bool) -> Result<Vec<BitTensor>> {
    let mut out = Vec::new();
    latin_for_each(n, t, beyond_reach, &mut |m| out.push(m.clone()))?;
    Ok(out)
}

pub fn latin_count(n: usize, t: usize, beyond_reach: bool) -> Result<u64> {
    let mut count = 0;
    latin_for_each(n, t, beyond_reach, &mut |_| count += 1)?;
    Ok(count)
}

/// Number of Latin matrices of order `n` that avoid `pattern`.
pub fn latin_count_avoiders(n: usize, t: usize, pattern: &Pattern, beyond_reach: bool) -> Result<u64> {
    if pattern.t() != t {
        return Err(Error::arg(format!("pattern has t = {} but t = {t} was requested", pattern.t())));
    }
    let mut count = 0;
    let mut failure = None;
    latin_for_each(n, t, beyond_reach, &mut |m| match avoids(m, pattern) {
        Ok(true) => count += 1,
        Ok(false) => {}
        Err(e) => failure = Some(e),
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(count),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use crate::pattern::{is_latin, make_identity};

    #[test]
    fn permutation_counts() {
        let counts: Vec<u64> = (1..=5).map(|n| latin_count(n, 2, false).unwrap()).collect();
        assert_eq!(counts, vec![1, 2, 6, 24, 120]);
    }

    #[test]
    fn cubes_match_brute_force_squares() {
        for n in 1..=3 {
            let mut ours = latin_enumerate(n, 3, false).unwrap();
            let mut brute = oracle::latin_squares(n);
            ours.sort_by(|a, b| a.ones().cmp(b.ones()));
            brute.sort_by(|a, b| a.ones().cmp(b.ones()));
            assert_eq!(ours, brute);
        }
        assert_eq!(latin_count(2, 3, false).unwrap(), 2);
        assert_eq!(latin_count(3, 3, false).unwrap(), 12);
    }

    #[test]
    fn every_enumerated_tensor_is_latin() {
        for (n, t) in [(3, 2), (3, 3), (2, 4), (3, 4)] {
            for m in latin_enumerate(n, t, false).unwrap() {
                assert!(is_latin(&m));
                assert_eq!(m.ones_count(), n.pow(t as u32 - 1));
            }
        }
    }

    #[test]
    fn reach_is_enforced() {
        let err = latin_count(5, 3, false).unwrap_err();
        assert!(matches!(err, Error::Resource { cap: "latin-reach", .. }));
        assert!(latin_count(1, 1, false).is_err());
    }

    #[test]
    fn avoider_filter() {
        // Both order-2 cubes: the cyclic one has ones at even index sums,
        // so it misses (1,1,1); the other has (0,0,1), (0,1,0), (1,0,0),
        // (1,1,1) and misses (0,0,0). Neither holds the whole diagonal.
        let id = make_identity(3, 2).unwrap();
        assert_eq!(latin_count_avoiders(2, 3, &id, false).unwrap(), 2);
        let big = make_identity(3, 3).unwrap();
        assert_eq!(latin_count_avoiders(2, 3, &big, false).unwrap(), 2);
        // Order 3: only cubes holding every (i,i,i) contain it.
        let expected = latin_enumerate(3, 3, false)
            .unwrap()
            .iter()
            .filter(|m| !(0..3).all(|i| m.get(&[i, i, i])))
            .count() as u64;
        assert_eq!(latin_count_avoiders(3, 3, &big, false).unwrap(), expected);
    }
}
