//! Shortest-path collections with few crossing vertices, and compression of a
//! weighted grid to bounded depth while keeping all first-row distances.
//!
//! A weighted grid is represented as a [`Pricing`]: one weight per edge slot,
//! with `Infinity` standing for an absent edge.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::error::{Error, Result};
use crate::eval::dijkstra_tree;
use crate::model::{EdgeId, EdgeKind, GridShape, Pricing, VertexId};
use crate::money::Money;

/// An undirected graph with non-negative weights; `Infinity` edges are unusable.
#[derive(Clone, Debug)]
pub struct WeightedGraph {
    endpoints: Vec<(usize, usize)>,
    weights: Vec<Money>,
    adj: Vec<Vec<(usize, usize)>>,
}

impl WeightedGraph {
    pub fn new(n: usize, edges: Vec<(usize, usize, Money)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        let mut endpoints = Vec::with_capacity(edges.len());
        let mut weights = Vec::with_capacity(edges.len());
        for (i, (a, b, w)) in edges.into_iter().enumerate() {
            adj[a].push((i, b));
            adj[b].push((i, a));
            endpoints.push((a, b));
            weights.push(w);
        }
        WeightedGraph { endpoints, weights, adj }
    }

    /// Vertices and edges numbered as in the grid's shape.
    pub fn from_grid(weights: &Pricing) -> Self {
        let s = weights.shape();
        let edges = weights
            .iter()
            .map(|(e, w)| {
                let (a, b) = e.endpoints();
                (s.vertex_index(a), s.vertex_index(b), w.clone())
            })
            .collect();
        WeightedGraph::new(s.num_vertices(), edges)
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn weight(&self, e: usize) -> &Money {
        &self.weights[e]
    }

    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        self.endpoints[e]
    }

    /// Cheapest usable edge joining `a` and `b`.
    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.adj[a]
            .iter()
            .filter(|(e, x)| *x == b && !self.weights[*e].is_infinite())
            .min_by(|x, y| self.weights[x.0].cmp(&self.weights[y.0]).then(x.0.cmp(&y.0)))
            .map(|(e, _)| *e)
    }

    pub fn distances(&self, src: usize) -> Vec<Money> {
        dijkstra_tree(&self.adj, &self.weights, src).0
    }

    /// Total weight of a walk given by its vertices.
    pub fn path_weight(&self, path: &[usize]) -> Money {
        path.windows(2)
            .map(|p| self.edge_between(p[0], p[1]).map_or(Money::Infinity, |e| self.weights[e].clone()))
            .sum()
    }

    fn shortest_path(&self, a: usize, b: usize) -> Option<Vec<usize>> {
        let (dist, pred) = dijkstra_tree(&self.adj, &self.weights, a);
        if dist[b].is_infinite() {
            return None;
        }
        let mut path = vec![b];
        let mut v = b;
        while v != a {
            v = pred[v].expect("reached vertices have predecessors").1;
            path.push(v);
        }
        path.reverse();
        Some(path)
    }
}

/// Crossing vertices of two simple paths: endpoints of their maximal common
/// subpaths, i.e. common vertices that are not interior to a shared stretch.
pub fn crossing_vertices(p: &[usize], r: &[usize]) -> Vec<usize> {
    let r_vertices: HashSet<usize> = r.iter().copied().collect();
    let r_edges: HashSet<(usize, usize)> = r.windows(2).map(|e| (e[0].min(e[1]), e[0].max(e[1]))).collect();
    let shared = |a: usize, b: usize| r_edges.contains(&(a.min(b), a.max(b)));
    (0..p.len())
        .filter(|&i| r_vertices.contains(&p[i]))
        .filter(|&i| !(i > 0 && i + 1 < p.len() && shared(p[i - 1], p[i]) && shared(p[i], p[i + 1])))
        .map(|i| p[i])
        .collect()
}

/// One shortest path per connected pair of terminals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathCollection {
    /// Terminal pairs `(a, b)` in processing order, with their paths from `a` to `b`.
    pub pairs: Vec<(usize, usize)>,
    pub paths: Vec<Vec<usize>>,
    /// Crossing vertices outside the terminal set after each insertion.
    pub crossings_history: Vec<usize>,
    terminals: BTreeSet<usize>,
}

impl PathCollection {
    /// Crossing vertices of all pairs of paths, excluding terminals.
    pub fn crossing_set(&self) -> BTreeSet<usize> {
        crossing_set(&self.paths, &self.terminals)
    }
}

fn crossing_set(paths: &[Vec<usize>], terminals: &BTreeSet<usize>) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    for i in 0..paths.len() {
        for j in i + 1..paths.len() {
            out.extend(crossing_vertices(&paths[i], &paths[j]).into_iter().filter(|v| !terminals.contains(v)));
        }
    }
    out
}

/// Shortest paths between all connected pairs of `terminals`, rerouted so that
/// any two share at most two crossing vertices when they were inserted.
///
/// Pairs are processed in lexicographic order of terminal positions. A new
/// path meeting an earlier one in more than two crossing vertices takes over
/// the earlier path between the first and last of them.
pub fn reroute_shortest_paths(g: &WeightedGraph, terminals: &[usize]) -> Result<PathCollection> {
    let terminal_set: BTreeSet<usize> = terminals.iter().copied().collect();
    let mut pairs = Vec::new();
    let mut paths: Vec<Vec<usize>> = Vec::new();
    let mut history = Vec::new();
    for i in 0..terminals.len() {
        for j in i + 1..terminals.len() {
            let (a, b) = (terminals[i], terminals[j]);
            let Some(mut p) = g.shortest_path(a, b) else { continue };
            let weight = g.path_weight(&p);
            for r in &paths {
                let cross = crossing_vertices(&p, r);
                if cross.len() <= 2 {
                    continue;
                }
                let (c1, cq) = (cross[0], cross[cross.len() - 1]);
                let pi1 = p.iter().position(|x| *x == c1).expect("on p");
                let piq = p.iter().position(|x| *x == cq).expect("on p");
                let ri1 = r.iter().position(|x| *x == c1).expect("on r");
                let riq = r.iter().position(|x| *x == cq).expect("on r");
                let middle: Vec<usize> = if ri1 <= riq { r[ri1..=riq].to_vec() } else { r[riq..=ri1].iter().rev().copied().collect() };
                let mut spliced = p[..pi1].to_vec();
                spliced.extend(middle);
                spliced.extend_from_slice(&p[piq + 1..]);
                if g.path_weight(&spliced) != weight {
                    return Err(Error::SelfCheck(format!("rerouting changed the weight of the {a}-{b} path")));
                }
                p = spliced;
            }
            let distinct: HashSet<usize> = p.iter().copied().collect();
            if distinct.len() != p.len() {
                return Err(Error::SelfCheck(format!("rerouted {a}-{b} path is not simple")));
            }
            pairs.push((a, b));
            paths.push(p);
            history.push(crossing_set(&paths, &terminal_set).len());
        }
    }
    Ok(PathCollection { pairs, paths, crossings_history: history, terminals: terminal_set })
}

/// What happened to one maximal run of rows free of branching vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerReport {
    pub top: usize,
    pub bottom: usize,
    /// Rows in the output; equal to the input row count when left alone.
    pub rows: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Compression {
    pub grid: Pricing,
    /// `None` when the input was already shallow enough and returned as is.
    pub paths: Option<PathCollection>,
    pub black_rows: Vec<usize>,
    pub layers: Vec<LayerReport>,
}

/// Depth every compressed grid fits in: `⌈ω⁵ / 4⌉` rows.
pub fn depth_bound(width: usize) -> usize {
    width.pow(5).div_ceil(4)
}

/// A grid of the same width, at most [`depth_bound`] rows deep, with the same
/// distances between every pair of first-row vertices.
pub fn compress_grid(weights: &Pricing) -> Result<Compression> {
    let shape = weights.shape();
    let (w, m) = (shape.width, shape.length);
    if m <= depth_bound(w) {
        return Ok(Compression { grid: weights.clone(), paths: None, black_rows: vec![], layers: vec![] });
    }
    let g = WeightedGraph::from_grid(weights);
    let terminals: Vec<usize> = (0..w).map(|c| shape.vertex_index(VertexId::new(0, c))).collect();
    let paths = reroute_shortest_paths(&g, &terminals)?;

    let mut used = vec![false; shape.num_edges()];
    for p in &paths.paths {
        for e in p.windows(2) {
            used[g.edge_between(e[0], e[1]).expect("path edges are usable")] = true;
        }
    }
    let mut degree = vec![0usize; shape.num_vertices()];
    for (e, _) in used.iter().enumerate().filter(|(_, u)| **u) {
        let (a, b) = g.endpoints(e);
        degree[a] += 1;
        degree[b] += 1;
    }
    let black_rows: Vec<usize> = (1..m).filter(|&r| (0..w).any(|c| degree[shape.vertex_index(VertexId::new(r, c))] >= 3)).collect();

    let src = Source { shape, weights, used: &used };
    let mut out = Builder::new(w);
    out.copy_rows(&src, 0, 0);
    let mut layers = Vec::new();
    let mut r = 1;
    while r < m {
        if black_rows.contains(&r) {
            out.join(&src, r - 1);
            out.copy_rows(&src, r, r);
            r += 1;
            continue;
        }
        let top = r;
        let mut bottom = r;
        while bottom + 1 < m && !black_rows.contains(&(bottom + 1)) {
            bottom += 1;
        }
        out.join(&src, top - 1);
        if bottom - top + 1 <= w + 1 {
            out.copy_rows(&src, top, bottom);
            layers.push(LayerReport { top, bottom, rows: bottom - top + 1 });
        } else {
            let rows = compress_layer(&src, top, bottom)?;
            layers.push(LayerReport { top, bottom, rows: rows.len() });
            out.append(rows);
        }
        r = bottom + 1;
    }
    let grid = out.finish();
    if grid.shape().length > depth_bound(w) {
        return Err(Error::SelfCheck(format!("compressed depth {} exceeds {}", grid.shape().length, depth_bound(w))));
    }
    Ok(Compression { grid, paths: Some(paths), black_rows, layers })
}

/// The input grid restricted to the union of the rerouted paths.
struct Source<'a> {
    shape: GridShape,
    weights: &'a Pricing,
    used: &'a [bool],
}

impl Source<'_> {
    fn weight(&self, e: EdgeId) -> Money {
        if self.used[self.shape.edge_index(e)] {
            self.weights.get(e).clone()
        } else {
            Money::Infinity
        }
    }
}

/// Output rows under construction: horizontal weights per row and vertical
/// weights from each row to the next.
struct LocalRows {
    horizontal: Vec<Vec<Money>>,
    vertical: Vec<Vec<Money>>,
}

impl LocalRows {
    fn new(width: usize, rows: usize) -> Self {
        LocalRows {
            horizontal: vec![vec![Money::Infinity; width.saturating_sub(1)]; rows],
            vertical: vec![vec![Money::Infinity; width]; rows.saturating_sub(1)],
        }
    }

    fn len(&self) -> usize {
        self.horizontal.len()
    }
}

struct Builder {
    width: usize,
    horizontal: Vec<Vec<Money>>,
    vertical: Vec<Vec<Money>>,
}

impl Builder {
    fn new(width: usize) -> Self {
        Builder { width, horizontal: vec![], vertical: vec![] }
    }

    /// Vertical edges from the last output row down to the next section, taken from input row `r`.
    fn join(&mut self, src: &Source, r: usize) {
        self.vertical.push((0..self.width).map(|c| src.weight(EdgeId::v(r, c))).collect());
    }

    fn copy_rows(&mut self, src: &Source, top: usize, bottom: usize) {
        for r in top..=bottom {
            self.horizontal.push((0..self.width.saturating_sub(1)).map(|c| src.weight(EdgeId::h(r, c))).collect());
            if r < bottom {
                self.join(src, r);
            }
        }
    }

    fn append(&mut self, rows: LocalRows) {
        self.horizontal.extend(rows.horizontal);
        self.vertical.extend(rows.vertical);
    }

    fn finish(self) -> Pricing {
        let shape = GridShape::new(self.width, self.horizontal.len()).expect("at least the first row");
        let mut p = Pricing::filled(shape, Money::Infinity);
        for (r, row) in self.horizontal.into_iter().enumerate() {
            for (c, x) in row.into_iter().enumerate() {
                p.set(EdgeId::h(r, c), x);
            }
        }
        for (r, row) in self.vertical.into_iter().enumerate() {
            for (c, x) in row.into_iter().enumerate() {
                p.set(EdgeId::v(r, c), x);
            }
        }
        p
    }
}

/// Paths drawn on a local grid, refusing to reuse any vertex.
struct Canvas {
    rows: LocalRows,
    taken: HashSet<(usize, usize)>,
}

impl Canvas {
    /// Draws a rectilinear path through `corners` with the whole weight on its first edge.
    fn draw(&mut self, corners: &[(usize, usize)], weight: &Money) -> Result<()> {
        let mut cells = vec![corners[0]];
        for pair in corners.windows(2) {
            let (mut r, mut c) = pair[0];
            let (r1, c1) = pair[1];
            while (r, c) != (r1, c1) {
                if r != r1 {
                    r = if r1 > r { r + 1 } else { r - 1 };
                } else {
                    c = if c1 > c { c + 1 } else { c - 1 };
                }
                cells.push((r, c));
            }
        }
        for cell in &cells {
            if !self.taken.insert(*cell) {
                return Err(Error::SelfCheck(format!("compressed layer reuses local vertex {cell:?}")));
            }
        }
        for (k, e) in cells.windows(2).enumerate() {
            let x = if k == 0 { weight.clone() } else { Money::zero() };
            let ((r0, c0), (r1, c1)) = (e[0], e[1]);
            if r0 == r1 {
                self.rows.horizontal[r0][c0.min(c1)] = x;
            } else {
                self.rows.vertical[r0.min(r1)][c0] = x;
            }
        }
        Ok(())
    }
}

/// A pair of layer boundary vertices joined inside the layer, with the distance between them.
struct Link {
    a: (bool, usize),
    b: (bool, usize),
    weight: Money,
}

/// Rebuilds rows `[top, bottom]` of the path union in at most `ω + 1` rows.
fn compress_layer(src: &Source, top: usize, bottom: usize) -> Result<LocalRows> {
    let (shape, w) = (src.shape, src.shape.width);
    let inside = |e: EdgeId| match e.kind {
        EdgeKind::Horizontal => e.row >= top && e.row <= bottom,
        EdgeKind::Vertical => e.row >= top && e.row < bottom,
    };
    let ups: Vec<usize> = (0..w).filter(|&c| src.used[shape.edge_index(EdgeId::v(top - 1, c))]).collect();
    let downs: Vec<usize> =
        (0..w).filter(|&c| bottom + 1 < shape.length && src.used[shape.edge_index(EdgeId::v(bottom, c))]).collect();

    // Every boundary vertex has exactly one path edge inside the layer; walk to its partner.
    let boundary: BTreeSet<(bool, usize)> = ups.iter().map(|c| (true, *c)).chain(downs.iter().map(|c| (false, *c))).collect();
    let vertex_of = |(up, c): (bool, usize)| VertexId::new(if up { top } else { bottom }, c);
    let mut links: Vec<Link> = Vec::new();
    let mut seen: BTreeSet<(bool, usize)> = BTreeSet::new();
    for &start in &boundary {
        if seen.contains(&start) {
            continue;
        }
        let mut prev: Option<VertexId> = None;
        let mut v = vertex_of(start);
        let mut weight = Money::zero();
        let end = loop {
            let next: Vec<(EdgeId, VertexId)> = neighbours(shape, v)
                .into_iter()
                .filter(|(e, x)| inside(*e) && src.used[shape.edge_index(*e)] && Some(*x) != prev)
                .collect();
            if next.len() != 1 {
                return Err(Error::SelfCheck(format!("vertex {v} branches inside a layer")));
            }
            let (e, x) = next[0];
            weight = &weight + src.weights.get(e);
            prev = Some(v);
            v = x;
            let here = [(true, v.col), (false, v.col)].into_iter().find(|k| boundary.contains(k) && vertex_of(*k) == v);
            if let Some(k) = here {
                break k;
            }
        };
        seen.insert(start);
        seen.insert(end);
        links.push(Link { a: start, b: end, weight });
    }

    let nest = |side: bool| -> Result<Vec<(usize, usize, usize, Money)>> {
        let mut arcs: Vec<(usize, usize, Money)> = links
            .iter()
            .filter(|l| l.a.0 == side && l.b.0 == side)
            .map(|l| (l.a.1.min(l.b.1), l.a.1.max(l.b.1), l.weight.clone()))
            .collect();
        arcs.sort_by_key(|(a, b, _)| b - a);
        let mut out: Vec<(usize, usize, usize, Money)> = Vec::new();
        for (a, b, x) in arcs {
            let mut level = 0;
            for (a2, b2, l2, _) in &out {
                if a < *a2 && *b2 < b {
                    level = level.max(l2 + 1);
                } else if !(b < *a2 || *b2 < a) {
                    return Err(Error::SelfCheck("boundary pairs inside a layer interleave".into()));
                }
            }
            out.push((a, b, level, x));
        }
        Ok(out)
    };
    let up_arcs = nest(true)?;
    let down_arcs = nest(false)?;
    let l_up = up_arcs.iter().map(|a| a.2 + 1).max().unwrap_or(0);
    let l_down = down_arcs.iter().map(|a| a.2 + 1).max().unwrap_or(0);

    let mut cross: Vec<(usize, usize, Money)> = links
        .iter()
        .filter(|l| l.a.0 != l.b.0)
        .map(|l| if l.a.0 { (l.a.1, l.b.1, l.weight.clone()) } else { (l.b.1, l.a.1, l.weight.clone()) })
        .collect();
    cross.sort_by_key(|(u, _, _)| *u);
    if cross.windows(2).any(|p| p[0].1 >= p[1].1) {
        return Err(Error::SelfCheck("top-bottom pairs inside a layer are not order preserving".into()));
    }

    let straight = cross.iter().all(|(u, d, _)| u == d);
    // Extra rows between the two frontiers so every bend has room.
    let mut gap = 0;
    let mut bends = 0;
    for (j, (u, d, _)) in cross.iter().enumerate() {
        let need = usize::from(u != d && j + 1 < cross.len());
        gap = gap.max(bends + need);
        if u != d && j + 1 < cross.len() {
            bends += 1;
        }
    }
    let (yu0, height) = if straight {
        (0, (l_up + l_down).max(2))
    } else {
        let yu0 = l_up.max(1);
        (yu0, yu0 + gap + l_down.max(1) + 1)
    };
    if height > w + 1 {
        return Err(Error::SelfCheck(format!("layer rebuilt with {height} rows for width {w}")));
    }

    let mut canvas = Canvas { rows: LocalRows::new(w, height), taken: HashSet::new() };
    let last = height - 1;
    for (a, b, level, x) in &up_arcs {
        canvas.draw(&[(0, *a), (*level, *a), (*level, *b), (0, *b)], x)?;
    }
    for (a, b, level, x) in &down_arcs {
        canvas.draw(&[(last, *a), (last - level, *a), (last - level, *b), (last, *b)], x)?;
    }
    let (mut yu, mut yd) = (yu0, yu0 + gap);
    for (j, (u, d, x)) in cross.iter().enumerate() {
        let more = j + 1 < cross.len();
        if u == d || straight {
            canvas.draw(&[(0, *u), (last, *d)], x)?;
        } else if u > d {
            canvas.draw(&[(0, *u), (yu, *u), (yu, *d), (last, *d)], x)?;
            if more {
                yu += 1;
            }
        } else {
            canvas.draw(&[(0, *u), (yd, *u), (yd, *d), (last, *d)], x)?;
            if more {
                yd -= 1;
            }
        }
    }
    debug_assert_eq!(canvas.rows.len(), height);
    Ok(canvas.rows)
}

fn neighbours(shape: GridShape, v: VertexId) -> Vec<(EdgeId, VertexId)> {
    let mut out = Vec::with_capacity(4);
    if v.col + 1 < shape.width {
        out.push((EdgeId::h(v.row, v.col), VertexId::new(v.row, v.col + 1)));
    }
    if v.col > 0 {
        out.push((EdgeId::h(v.row, v.col - 1), VertexId::new(v.row, v.col - 1)));
    }
    if v.row + 1 < shape.length {
        out.push((EdgeId::v(v.row, v.col), VertexId::new(v.row + 1, v.col)));
    }
    if v.row > 0 {
        out.push((EdgeId::v(v.row - 1, v.col), VertexId::new(v.row - 1, v.col)));
    }
    out
}

/// Distances between all pairs of first-row vertices.
pub fn first_row_distances(weights: &Pricing) -> BTreeMap<(usize, usize), Money> {
    let shape = weights.shape();
    let g = WeightedGraph::from_grid(weights);
    let mut out = BTreeMap::new();
    for a in 0..shape.width {
        let d = g.distances(shape.vertex_index(VertexId::new(0, a)));
        for b in 0..shape.width {
            out.insert((a, b), d[shape.vertex_index(VertexId::new(0, b))].clone());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(w: usize, m: usize, f: impl Fn(EdgeId) -> u64) -> Pricing {
        let shape = GridShape::new(w, m).unwrap();
        let mut p = Pricing::filled(shape, Money::zero());
        for e in shape.edges() {
            p.set(e, Money::from(f(e)));
        }
        p
    }

    #[test]
    fn two_terminals_have_no_crossings() {
        let p = grid(2, 5, |_| 1);
        let g = WeightedGraph::from_grid(&p);
        let c = reroute_shortest_paths(&g, &[0, 1]).unwrap();
        assert_eq!(c.paths.len(), 1);
        assert!(c.crossing_set().is_empty());
    }

    #[test]
    fn crossing_vertex_definition() {
        // Shared stretch 2-3-4, then apart: crossings are 2 and 4.
        assert_eq!(crossing_vertices(&[1, 2, 3, 4, 5], &[6, 2, 3, 4, 7]), vec![2, 4]);
        // Touching at one vertex.
        assert_eq!(crossing_vertices(&[1, 2, 3], &[4, 2, 5]), vec![2]);
        assert!(crossing_vertices(&[1, 2], &[3, 4]).is_empty());
    }

    #[test]
    fn disjoint_paths_are_kept() {
        // Path graph 0-1-2-3 plus an isolated pair 4-5: terminals {0, 1} and {4, 5}.
        let g = WeightedGraph::new(
            6,
            vec![(0, 1, 1u64.into()), (1, 2, 1u64.into()), (2, 3, 1u64.into()), (4, 5, 1u64.into())],
        );
        let c = reroute_shortest_paths(&g, &[0, 4, 5]).unwrap();
        assert_eq!(c.pairs, vec![(4, 5)]);
        assert_eq!(c.paths, vec![vec![4, 5]]);
    }

    #[test]
    fn shallow_grid_is_returned_as_is() {
        let p = grid(2, 8, |_| 1);
        let c = compress_grid(&p).unwrap();
        assert_eq!(c.grid, p);
        assert!(c.paths.is_none());
    }

    #[test]
    fn zero_weights_stay_zero() {
        let p = grid(2, 30, |_| 0);
        let c = compress_grid(&p).unwrap();
        assert!(c.grid.shape().length <= 8);
        assert_eq!(first_row_distances(&c.grid), first_row_distances(&p));
    }

    #[test]
    fn detour_through_deep_rows_is_preserved() {
        // The top edge is expensive; the cheap route dives to the bottom.
        let p = grid(2, 20, |e| if e == EdgeId::h(0, 0) { 100 } else if e.kind == EdgeKind::Horizontal && e.row < 19 { 50 } else { 1 });
        let before = first_row_distances(&p);
        let c = compress_grid(&p).unwrap();
        assert_eq!(first_row_distances(&c.grid), before);
        assert!(c.grid.shape().length <= depth_bound(2));
    }
}
