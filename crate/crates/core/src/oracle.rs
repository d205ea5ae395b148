//! Brute-force reference implementations.
//!
//! Every function here answers a question that the main modules answer
//! faster, by direct enumeration and without sharing their code paths. The
//! property suite and the tests compare the two. Keep these slow and
//! obvious.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::tensor::{BitTensor, Shape};

/// All strictly increasing `len`-subsets of `0..n`, lexicographically.
pub fn combinations(n: usize, len: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, len: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, len, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if len <= n {
        go(0, n, len, &mut Vec::with_capacity(len), &mut out);
    }
    out
}

/// Cartesian product of per-axis choice lists.
fn product<T: Clone>(lists: &[Vec<T>]) -> Vec<Vec<T>> {
    lists.iter().fold(vec![Vec::new()], |acc, list| {
        acc.iter()
            .flat_map(|prefix| {
                list.iter().map(move |x| {
                    let mut p = prefix.clone();
                    p.push(x.clone());
                    p
                })
            })
            .collect()
    })
}

/// Containment by trying every tuple of selection lists.
pub fn contains(host: &BitTensor, pattern: &BitTensor) -> bool {
    if host.t() != pattern.t() {
        return false;
    }
    let per_axis: Vec<Vec<Vec<usize>>> = host
        .dims()
        .iter()
        .zip(pattern.dims())
        .map(|(&n, &k)| combinations(n, k))
        .collect();
    if per_axis.iter().any(Vec::is_empty) {
        return false;
    }
    product(&per_axis).iter().any(|sel| {
        pattern.ones().iter().all(|c| {
            let image: Vec<usize> = c.iter().zip(sel).map(|(&a, s)| s[a]).collect();
            host.get(&image)
        })
    })
}

/// Every tensor of `shape`, by mask.
pub fn all_tensors(shape: &Shape) -> Vec<BitTensor> {
    let cells = shape.cells() as u32;
    assert!(cells <= 24, "oracle sweep over {cells} cells is too large");
    (0..1u64 << cells)
        .map(|m| BitTensor::from_mask(shape.clone(), m))
        .collect()
}

/// Maximum ones over tensors of `shape` that avoid `pattern`; `None` when
/// nothing avoids it.
pub fn extremal(shape: &Shape, pattern: &BitTensor) -> Option<usize> {
    all_tensors(shape)
        .iter()
        .filter(|m| !contains(m, pattern))
        .map(BitTensor::ones_count)
        .max()
}

pub fn count_avoiders(shape: &Shape, pattern: &BitTensor) -> u64 {
    all_tensors(shape)
        .iter()
        .filter(|m| !contains(m, pattern))
        .count() as u64
}

/// Explicit complete balanced t-partite graph on `n` vertices: vertex `v`
/// lies in part `v mod t`.
pub fn turan_graph(n: usize, t: usize) -> Vec<Vec<bool>> {
    (0..n)
        .map(|u| (0..n).map(|v| u != v && u % t != v % t).collect())
        .collect()
}

/// Number of `k`-cliques of the explicit Turán graph, by subset enumeration.
pub fn turan_cliques(n: usize, k: usize, t: usize) -> u64 {
    let g = turan_graph(n, t);
    combinations(n, k)
        .iter()
        .filter(|set| {
            set.iter()
                .enumerate()
                .all(|(i, &u)| set[i + 1..].iter().all(|&v| g[u][v]))
        })
        .count() as u64
}

/// Turán binomial by summing products of part sizes over `k`-sets of parts.
pub fn turan_binomial(n: usize, k: usize, t: usize) -> BigUint {
    let sizes: Vec<usize> = (0..t).map(|i| (n + t - 1 - i) / t).collect();
    combinations(t, k)
        .iter()
        .map(|parts| parts.iter().map(|&p| BigUint::from(sizes[p])).product::<BigUint>())
        .sum()
}

/// Every sequence `[(level, n_level), ..]` starting at level `k` with colour
/// count `t` that satisfies the cascade side conditions and sums to `m`.
pub fn cascade_representations(m: usize, k: usize, t: usize) -> Vec<Vec<(usize, usize)>> {
    fn go(
        remaining: &BigUint,
        level: usize,
        colours: usize,
        prev: Option<(usize, usize)>,
        cur: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if level == 0 || colours == 0 {
            return;
        }
        let mut n = 1;
        loop {
            let value = turan_binomial(n, level, colours);
            if n >= level && value > *remaining {
                break;
            }
            let chain_ok = match prev {
                None => true,
                Some((prev_n, prev_colours)) => prev_n - prev_n / prev_colours > n,
            };
            if !chain_ok {
                break;
            }
            cur.push((level, n));
            let rest = remaining - &value;
            if rest.is_zero() {
                if n >= level {
                    out.push(cur.clone());
                }
            } else {
                go(&rest, level - 1, colours - 1, Some((n, colours)), cur, out);
            }
            cur.pop();
            n += 1;
        }
    }
    let mut out = Vec::new();
    go(&BigUint::from(m), k, t, None, &mut Vec::new(), &mut out);
    out
}

/// Face counts of the colourful complex, by enumerating every subset of
/// axes and collecting distinct projections.
pub fn face_counts(m: &BitTensor) -> Vec<usize> {
    let t = m.t();
    (1..=t)
        .map(|i| {
            combinations(t, i)
                .iter()
                .map(|axes| {
                    let mut proj: Vec<Vec<usize>> = m
                        .ones()
                        .iter()
                        .map(|c| axes.iter().map(|&a| c[a]).collect())
                        .collect();
                    proj.sort();
                    proj.dedup();
                    proj.len()
                })
                .sum()
        })
        .collect()
}

/// All full `k x ... x k` divisions of `m`, as cut lists, checked cell by
/// cell.
pub fn full_divisions(m: &BitTensor, k: usize) -> Vec<Vec<Vec<usize>>> {
    let per_axis: Vec<Vec<Vec<usize>>> = m
        .dims()
        .iter()
        .map(|&n| {
            combinations(n.saturating_sub(1), k.saturating_sub(1))
                .into_iter()
                .map(|c| c.into_iter().map(|x| x + 1).collect())
                .collect()
        })
        .collect();
    product(&per_axis)
        .into_iter()
        .filter(|cuts| {
            let bounds: Vec<Vec<(usize, usize)>> = cuts
                .iter()
                .zip(m.dims())
                .map(|(c, &n)| {
                    let mut edges = vec![0];
                    edges.extend(c);
                    edges.push(n);
                    edges.windows(2).map(|w| (w[0], w[1])).collect()
                })
                .collect();
            product(&bounds).iter().all(|cell| {
                m.ones()
                    .iter()
                    .any(|c| c.iter().zip(cell).all(|(&i, &(lo, hi))| lo <= i && i < hi))
            })
        })
        .collect()
}

/// Latin squares of order `n` as 3-dimensional tensors `(row, col, symbol)`,
/// built row by row from all permutations and filtered on columns.
pub fn latin_squares(n: usize) -> Vec<BitTensor> {
    fn perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for p in perms(n - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }
    let rows = perms(n);
    let mut squares: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for _ in 0..n {
        squares = squares
            .into_iter()
            .flat_map(|sq| {
                rows.iter()
                    .filter(|row| sq.iter().all(|prev: &Vec<usize>| prev.iter().zip(row.iter()).all(|(a, b)| a != b)))
                    .map(|row| {
                        let mut s = sq.clone();
                        s.push(row.clone());
                        s
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    let shape = Shape::cubic(3, n).expect("n >= 1");
    squares
        .into_iter()
        .map(|sq| {
            let ones = sq
                .iter()
                .enumerate()
                .flat_map(|(i, row)| row.iter().enumerate().map(move |(j, &v)| vec![i, j, v]))
                .collect();
            BitTensor::new(shape.clone(), ones).expect("in bounds")
        })
        .collect()
}

/// `alpha_3(2)` written out: `6 ((p - 1) / p)^2` with `p = 8 * 192^3`.
pub fn alpha_3_2() -> BigRational {
    let p = BigRational::from_integer((8u64 * 192u64.pow(3)).into());
    let ratio = (&p - BigRational::one()) / &p;
    BigRational::from_integer(6.into()) * &ratio * &ratio
}
