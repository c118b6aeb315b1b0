//! Distance matrices over vertex subsets and their product across a shared row.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::eval::{PathWeight, Ticks, INF_TICKS};
use crate::model::{EdgeId, GridInstance, VertexId};
use crate::money::Money;
use crate::rounding::PriceSet;

/// Assumed pairwise distances over an ordered vertex set (row-major, symmetric,
/// zero diagonal). Compared and hashed by value, index set included.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DistanceMatrix {
    index: Vec<VertexId>,
    entries: Vec<Money>,
}

impl DistanceMatrix {
    pub fn new(index: Vec<VertexId>, entries: Vec<Money>) -> Self {
        let n = index.len();
        assert_eq!(entries.len(), n * n, "matrix must be square over its index set");
        DistanceMatrix { index, entries }
    }

    /// Zero diagonal, infinity everywhere else.
    pub fn infinite(index: Vec<VertexId>) -> Self {
        let n = index.len();
        let entries = (0..n * n).map(|k| if k / n == k % n { Money::zero() } else { Money::Infinity }).collect();
        DistanceMatrix { index, entries }
    }

    pub fn index(&self) -> &[VertexId] {
        &self.index
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn entries(&self) -> &[Money] {
        &self.entries
    }

    pub fn position(&self, v: VertexId) -> Option<usize> {
        self.index.iter().position(|x| *x == v)
    }

    pub fn at(&self, i: usize, j: usize) -> &Money {
        &self.entries[i * self.len() + j]
    }

    pub fn get(&self, a: VertexId, b: VertexId) -> Option<&Money> {
        Some(self.at(self.position(a)?, self.position(b)?))
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| self.at(i, i).is_zero() && (0..n).all(|j| self.at(i, j) == self.at(j, i)))
    }

    pub fn satisfies_triangle_inequality(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| *self.at(i, j) <= self.at(i, k) + self.at(k, j))))
    }

    /// Triangle inequality up to quantization: an infinite entry is allowed
    /// whenever the detour through any third vertex exceeds `cap`.
    pub fn satisfies_quantized_triangle_inequality(&self, cap: &Money) -> bool {
        let n = self.len();
        (0..n).all(|i| {
            (0..n).all(|j| {
                (0..n).all(|k| {
                    let via = self.at(i, k) + self.at(k, j);
                    *self.at(i, j) <= via || (self.at(i, j).is_infinite() && via > *cap)
                })
            })
        })
    }

    /// Re-expresses a tick matrix in money.
    pub(crate) fn from_ticks(index: Vec<VertexId>, ticks: &[Ticks], set: &PriceSet) -> Self {
        let entries = ticks.iter().map(|t| set.ticks_to_money(*t)).collect();
        DistanceMatrix::new(index, entries)
    }
}

/// In-place all-pairs closure of an `n x n` weight matrix.
pub fn floyd_warshall<W: PathWeight>(n: usize, d: &mut [W]) {
    for k in 0..n {
        for i in 0..n {
            let dik = d[i * n + k].clone();
            if dik.is_inf() {
                continue;
            }
            for j in 0..n {
                let via = dik.plus(&d[k * n + j]);
                if via < d[i * n + j] {
                    d[i * n + j] = via;
                }
            }
        }
    }
}

/// Product `A ⊗_S B`: distances among `S` in the union of the two graphs,
/// glued along their shared vertices. Distances above `cap` become infinite.
pub fn product(a: &DistanceMatrix, b: &DistanceMatrix, s: &[VertexId], cap: Option<&Money>) -> Result<DistanceMatrix> {
    if !a.index.iter().any(|v| b.index.contains(v)) {
        return Err(Error::SeparatorNotShared);
    }
    let mut nodes: Vec<VertexId> = a.index.clone();
    for v in &b.index {
        if !nodes.contains(v) {
            nodes.push(*v);
        }
    }
    for v in s {
        if !nodes.contains(v) {
            return Err(Error::UnknownVertex(*v));
        }
    }
    let n = nodes.len();
    let pos = |v: &VertexId| nodes.iter().position(|x| x == v).expect("indexed");
    let mut d = vec![Money::Infinity; n * n];
    for i in 0..n {
        d[i * n + i] = Money::zero();
    }
    for m in [a, b] {
        let map: Vec<usize> = m.index.iter().map(pos).collect();
        for (i, &pi) in map.iter().enumerate() {
            for (j, &pj) in map.iter().enumerate() {
                let e = m.at(i, j);
                if *e < d[pi * n + pj] {
                    d[pi * n + pj] = e.clone();
                }
            }
        }
    }
    floyd_warshall(n, &mut d);
    let sel: Vec<usize> = s.iter().map(pos).collect();
    let mut entries = Vec::with_capacity(sel.len() * sel.len());
    for &i in &sel {
        for &j in &sel {
            let x = &d[i * n + j];
            entries.push(match cap {
                Some(c) if x > c => Money::Infinity,
                _ => x.clone(),
            });
        }
    }
    Ok(DistanceMatrix::new(s.to_vec(), entries))
}

/// One way of pricing the edges between a row and the next, with the
/// distance matrix it induces over both rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowTransition {
    pub witness: Vec<(EdgeId, Money)>,
    pub matrix: DistanceMatrix,
}

/// Tick-valued closure plus quantization: entries above `cap` become infinite.
pub(crate) fn close_ticks(n: usize, d: &mut [Ticks], cap: Ticks) {
    floyd_warshall(n, d);
    for x in d.iter_mut() {
        if *x > cap {
            *x = INF_TICKS;
        }
    }
}

/// Distinct matrices produced by pricing a small edge set, each with the
/// lexicographically smallest assignment that produces it. Sorted by matrix.
pub(crate) struct LocalEnumeration {
    pub matrices: Vec<Box<[Ticks]>>,
    pub witnesses: Vec<Vec<Ticks>>,
}

/// Enumerates every assignment of `values` (ascending) to `edges`
/// (`(a, b, missing)` on `n` local nodes); missing edges are pinned to infinity.
pub(crate) fn enumerate_local(n: usize, edges: &[(usize, usize, bool)], values: &[Ticks], cap: Ticks) -> LocalEnumeration {
    let free: Vec<usize> = (0..edges.len()).filter(|&k| !edges[k].2).collect();
    let radix = values.len();
    let total = radix.checked_pow(free.len() as u32).expect("assignment count overflow");
    let mut seen: HashMap<Box<[Ticks]>, Vec<Ticks>> = HashMap::new();
    let mut digits = vec![0usize; free.len()];
    let mut assign = vec![INF_TICKS; edges.len()];
    let mut d = vec![INF_TICKS; n * n];
    for _ in 0..total {
        for (k, &e) in free.iter().enumerate() {
            assign[e] = values[digits[k]];
        }
        d.fill(INF_TICKS);
        for i in 0..n {
            d[i * n + i] = 0;
        }
        for (k, &(a, b, _)) in edges.iter().enumerate() {
            let w = assign[k];
            if w < d[a * n + b] {
                d[a * n + b] = w;
                d[b * n + a] = w;
            }
        }
        close_ticks(n, &mut d, cap);
        if !seen.contains_key(d.as_slice()) {
            seen.insert(d.clone().into_boxed_slice(), assign.clone());
        }
        // Mixed-radix increment, first edge most significant.
        for k in (0..digits.len()).rev() {
            digits[k] += 1;
            if digits[k] < radix {
                break;
            }
            digits[k] = 0;
        }
    }
    let mut pairs: Vec<_> = seen.into_iter().collect();
    pairs.sort();
    let (matrices, witnesses) = pairs.into_iter().unzip();
    LocalEnumeration { matrices, witnesses }
}

/// Edges of `G_i` (row `i` horizontals, then verticals to row `i + 1`) on local
/// nodes `0..w` (row `i`) and `w..2w` (row `i + 1`).
pub(crate) fn transition_edges(grid: &GridInstance, row: usize) -> Vec<(EdgeId, usize, usize)> {
    let w = grid.width();
    let mut out = Vec::with_capacity(2 * w - 1);
    for c in 0..w.saturating_sub(1) {
        out.push((EdgeId::h(row, c), c, c + 1));
    }
    for c in 0..w {
        out.push((EdgeId::v(row, c), c, w + c));
    }
    out
}

/// Horizontal edges of a single row on local nodes `0..w`.
pub(crate) fn row_edges(grid: &GridInstance, row: usize) -> Vec<(EdgeId, usize, usize)> {
    (0..grid.width().saturating_sub(1)).map(|c| (EdgeId::h(row, c), c, c + 1)).collect()
}

pub(crate) fn local_spec(grid: &GridInstance, edges: &[(EdgeId, usize, usize)]) -> Vec<(usize, usize, bool)> {
    edges.iter().map(|(e, a, b)| (*a, *b, !grid.is_present(*e))).collect()
}

/// Every pricing of `G_i` from the price set (missing edges at infinity),
/// deduplicated by the matrix it induces over rows `i` and `i + 1`.
pub fn enumerate_row_transitions(grid: &GridInstance, row: usize, set: &PriceSet) -> Result<Vec<RowTransition>> {
    if row + 1 >= grid.length() {
        return Err(Error::EmptyRowRange { lo: row, hi: row + 1, length: grid.length() });
    }
    let w = grid.width();
    let edges = transition_edges(grid, row);
    let spec = local_spec(grid, &edges);
    let en = enumerate_local(2 * w, &spec, &set.tick_values(), set.cap_ticks());
    let index: Vec<VertexId> = (0..w).map(|c| VertexId::new(row, c)).chain((0..w).map(|c| VertexId::new(row + 1, c))).collect();
    Ok(en
        .matrices
        .iter()
        .zip(&en.witnesses)
        .map(|(m, wit)| RowTransition {
            witness: edges.iter().zip(wit).map(|((e, _, _), t)| (*e, set.ticks_to_money(*t))).collect(),
            matrix: DistanceMatrix::from_ticks(index.clone(), m, set),
        })
        .collect())
}

/// Vertices of a row in column order.
pub fn row_vertices(width: usize, row: usize) -> Vec<VertexId> {
    (0..width).map(|c| VertexId::new(row, c)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(r: usize, c: usize) -> VertexId {
        VertexId::new(r, c)
    }

    #[test]
    fn infinite_matrix_shapes() {
        let one = DistanceMatrix::infinite(vec![v(0, 0)]);
        assert_eq!(one.entries(), &[Money::zero()]);
        let two = DistanceMatrix::infinite(vec![v(0, 0), v(0, 1)]);
        assert_eq!(two.entries(), &[Money::zero(), Money::Infinity, Money::Infinity, Money::zero()]);
        let s = [v(0, 0), v(0, 1)];
        assert_eq!(product(&two, &two, &s, None).unwrap(), two);
    }

    #[test]
    fn infinite_upper_absorbs() {
        let r = v(0, 0);
        let r1 = [v(1, 0), v(1, 1)];
        let r2 = [v(2, 0), v(2, 1)];
        let u = DistanceMatrix::infinite(vec![r1[0], r1[1], r]);
        let n = |x: u64| Money::from_integer(x);
        // Metric on R1 ∪ R2.
        let b = DistanceMatrix::new(
            vec![r1[0], r1[1], r2[0], r2[1]],
            vec![
                n(0), n(1), n(2), n(3),
                n(1), n(0), n(3), n(2),
                n(2), n(3), n(0), n(1),
                n(3), n(2), n(1), n(0),
            ],
        );
        let s = [r1[0], r1[1], r2[0], r2[1], r];
        let c = product(&u, &b, &s, None).unwrap();
        for a in &s[..4] {
            for bb in &s[..4] {
                assert_eq!(c.get(*a, *bb), b.get(*a, *bb));
            }
            assert!(c.get(*a, r).unwrap().is_infinite());
        }
    }

    #[test]
    fn idempotent_on_shared_pair() {
        let m = DistanceMatrix::new(vec![v(0, 0), v(0, 1)], vec![0u64.into(), 3u64.into(), 3u64.into(), 0u64.into()]);
        let s = [v(0, 0), v(0, 1)];
        assert_eq!(product(&m, &m, &s, None).unwrap(), m);
    }

    #[test]
    fn product_errors() {
        let a = DistanceMatrix::infinite(vec![v(0, 0)]);
        let b = DistanceMatrix::infinite(vec![v(1, 0)]);
        assert_eq!(product(&a, &b, &[v(0, 0)], None), Err(Error::SeparatorNotShared));
        assert_eq!(product(&a, &a, &[v(5, 5)], None), Err(Error::UnknownVertex(v(5, 5))));
    }

    #[test]
    fn transitions_count_and_zero_matrix() {
        let g = GridInstance::new(2, 2).unwrap();
        let set = PriceSet::new(&1u64.into(), 1, 1);
        // Restrict to {1, 0}: build the tiny enumeration directly.
        let spec = local_spec(&g, &transition_edges(&g, 0));
        let en = enumerate_local(4, &spec, &[0, 1], 1);
        assert!(en.matrices.len() <= 8);
        assert!(en.matrices.iter().any(|m| m.iter().all(|x| *x == 0)));
        let zero_idx = en.matrices.iter().position(|m| m.iter().all(|x| *x == 0)).unwrap();
        assert_eq!(en.witnesses[zero_idx], vec![0, 0, 0]);
        let all = enumerate_row_transitions(&g, 0, &set).unwrap();
        for t in &all {
            assert!(t.matrix.is_symmetric());
            assert!(t.matrix.satisfies_quantized_triangle_inequality(set.b_max()));
        }
        assert!(enumerate_row_transitions(&g, 1, &set).is_err());
    }
}
