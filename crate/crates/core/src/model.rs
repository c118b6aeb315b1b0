//! Grid, driver and pricing data model.
//!
//! Rows are numbered from the top (row 0). A horizontal edge `H(r, c)` joins
//! `(r, c)` and `(r, c + 1)`; a vertical edge `V(r, c)` joins `(r, c)` and
//! `(r + 1, c)`. Edges are indexed in lexicographic `(kind, row, col)` order
//! with every horizontal edge before every vertical one.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::money::Money;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId {
    pub row: usize,
    pub col: usize,
}

impl VertexId {
    pub const fn new(row: usize, col: usize) -> Self {
        VertexId { row, col }
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeKind {
    Horizontal,
    Vertical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId {
    pub kind: EdgeKind,
    pub row: usize,
    pub col: usize,
}

impl EdgeId {
    pub const fn h(row: usize, col: usize) -> Self {
        EdgeId { kind: EdgeKind::Horizontal, row, col }
    }

    pub const fn v(row: usize, col: usize) -> Self {
        EdgeId { kind: EdgeKind::Vertical, row, col }
    }

    pub fn endpoints(&self) -> (VertexId, VertexId) {
        let a = VertexId::new(self.row, self.col);
        match self.kind {
            EdgeKind::Horizontal => (a, VertexId::new(self.row, self.col + 1)),
            EdgeKind::Vertical => (a, VertexId::new(self.row + 1, self.col)),
        }
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.kind {
            EdgeKind::Horizontal => 'H',
            EdgeKind::Vertical => 'V',
        };
        write!(f, "{}({},{})", k, self.row, self.col)
    }
}

/// A commuter travelling between `u` and `v` who pays at most `budget`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Driver {
    pub u: VertexId,
    pub v: VertexId,
    pub budget: Money,
}

impl Driver {
    pub fn new(u: VertexId, v: VertexId, budget: Money) -> Self {
        assert!(!budget.is_infinite(), "budgets are finite");
        Driver { u, v, budget }
    }
}

/// Shape of an `length x width` grid; all index arithmetic lives here.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GridShape {
    pub width: usize,
    pub length: usize,
}

impl GridShape {
    pub fn new(width: usize, length: usize) -> Result<Self> {
        if width == 0 || length == 0 {
            return Err(Error::BadDimensions { width, length });
        }
        Ok(GridShape { width, length })
    }

    pub fn num_vertices(&self) -> usize {
        self.width * self.length
    }

    pub fn num_horizontal(&self) -> usize {
        self.length * (self.width - 1)
    }

    pub fn num_edges(&self) -> usize {
        self.num_horizontal() + (self.length - 1) * self.width
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v.row < self.length && v.col < self.width
    }

    pub fn contains_edge(&self, e: EdgeId) -> bool {
        match e.kind {
            EdgeKind::Horizontal => e.row < self.length && e.col + 1 < self.width,
            EdgeKind::Vertical => e.row + 1 < self.length && e.col < self.width,
        }
    }

    pub fn vertex_index(&self, v: VertexId) -> usize {
        v.row * self.width + v.col
    }

    pub fn vertex_at(&self, idx: usize) -> VertexId {
        VertexId::new(idx / self.width, idx % self.width)
    }

    pub fn edge_index(&self, e: EdgeId) -> usize {
        match e.kind {
            EdgeKind::Horizontal => e.row * (self.width - 1) + e.col,
            EdgeKind::Vertical => self.num_horizontal() + e.row * self.width + e.col,
        }
    }

    pub fn edge_at(&self, idx: usize) -> EdgeId {
        let nh = self.num_horizontal();
        if idx < nh {
            EdgeId::h(idx / (self.width - 1), idx % (self.width - 1))
        } else {
            let k = idx - nh;
            EdgeId::v(k / self.width, k % self.width)
        }
    }

    /// All edge slots in index order.
    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.num_edges()).map(move |i| self.edge_at(i))
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.num_vertices()).map(move |i| self.vertex_at(i))
    }
}

/// A width-`width`, `length`-row grid with optional missing edges and a driver multiset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridInstance {
    shape: GridShape,
    missing: BTreeSet<EdgeId>,
    pub drivers: Vec<Driver>,
}

impl GridInstance {
    pub fn new(width: usize, length: usize) -> Result<Self> {
        Ok(GridInstance { shape: GridShape::new(width, length)?, missing: BTreeSet::new(), drivers: Vec::new() })
    }

    pub fn with_parts(
        width: usize,
        length: usize,
        missing: impl IntoIterator<Item = EdgeId>,
        drivers: Vec<Driver>,
    ) -> Result<Self> {
        let mut g = GridInstance::new(width, length)?;
        for e in missing {
            g.remove_edge(e)?;
        }
        for d in &drivers {
            g.check_vertex(d.u)?;
            g.check_vertex(d.v)?;
        }
        g.drivers = drivers;
        Ok(g)
    }

    pub fn shape(&self) -> GridShape {
        self.shape
    }

    pub fn width(&self) -> usize {
        self.shape.width
    }

    pub fn length(&self) -> usize {
        self.shape.length
    }

    pub fn missing_edges(&self) -> &BTreeSet<EdgeId> {
        &self.missing
    }

    pub fn is_present(&self, e: EdgeId) -> bool {
        self.shape.contains_edge(e) && !self.missing.contains(&e)
    }

    pub fn remove_edge(&mut self, e: EdgeId) -> Result<()> {
        if !self.shape.contains_edge(e) {
            return Err(Error::EdgeOutOfBounds(e));
        }
        self.missing.insert(e);
        Ok(())
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<()> {
        if self.shape.contains(v) {
            Ok(())
        } else {
            Err(Error::VertexOutOfBounds(v))
        }
    }

    pub fn add_driver(&mut self, d: Driver) -> Result<()> {
        self.check_vertex(d.u)?;
        self.check_vertex(d.v)?;
        self.drivers.push(d);
        Ok(())
    }

    pub fn present_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.shape.edges().filter(move |e| !self.missing.contains(e))
    }

    pub fn num_present_edges(&self) -> usize {
        self.shape.num_edges() - self.missing.len()
    }

    /// Largest budget among the drivers (zero when there are none).
    pub fn b_max(&self) -> Money {
        self.drivers.iter().map(|d| d.budget.clone()).max().unwrap_or_else(Money::zero)
    }

    pub fn total_budget(&self) -> Money {
        self.drivers.iter().map(|d| &d.budget).sum()
    }

    /// Adjacency over present edges: `adj[v] = [(edge index, neighbour index)]`.
    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let s = self.shape;
        let mut adj = vec![Vec::with_capacity(4); s.num_vertices()];
        for (i, e) in s.edges().enumerate() {
            if self.missing.contains(&e) {
                continue;
            }
            let (a, b) = e.endpoints();
            let (ia, ib) = (s.vertex_index(a), s.vertex_index(b));
            adj[ia].push((i, ib));
            adj[ib].push((i, ia));
        }
        adj
    }

    /// The subgrid on rows `[row_lo, row_hi]`, re-indexed from 0.
    ///
    /// Missing edges are inherited; `extra_missing` is given in the
    /// coordinates of the result. Drivers are not carried over.
    pub fn restrict(&self, row_lo: usize, row_hi: usize, extra_missing: &BTreeSet<EdgeId>) -> Result<GridInstance> {
        if row_lo > row_hi || row_hi >= self.length() {
            return Err(Error::EmptyRowRange { lo: row_lo, hi: row_hi, length: self.length() });
        }
        let mut sub = GridInstance::new(self.width(), row_hi - row_lo + 1)?;
        for e in &self.missing {
            let inside = match e.kind {
                EdgeKind::Horizontal => e.row >= row_lo && e.row <= row_hi,
                EdgeKind::Vertical => e.row >= row_lo && e.row < row_hi,
            };
            if inside {
                sub.missing.insert(EdgeId { row: e.row - row_lo, ..*e });
            }
        }
        for e in extra_missing {
            sub.remove_edge(*e)?;
        }
        Ok(sub)
    }

    /// The same grid upside down, together with the relabelling.
    pub fn flip_vertical(&self) -> (GridInstance, VerticalFlip) {
        let flip = VerticalFlip { length: self.length() };
        let missing = self.missing.iter().map(|e| flip.edge(*e)).collect();
        let drivers = self
            .drivers
            .iter()
            .map(|d| Driver { u: flip.vertex(d.u), v: flip.vertex(d.v), budget: d.budget.clone() })
            .collect();
        (GridInstance { shape: self.shape, missing, drivers }, flip)
    }
}

/// Row-reversal relabelling for a grid of a given length. It is an involution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerticalFlip {
    pub length: usize,
}

impl VerticalFlip {
    pub fn vertex(&self, v: VertexId) -> VertexId {
        VertexId::new(self.length - 1 - v.row, v.col)
    }

    pub fn edge(&self, e: EdgeId) -> EdgeId {
        match e.kind {
            EdgeKind::Horizontal => EdgeId::h(self.length - 1 - e.row, e.col),
            EdgeKind::Vertical => EdgeId::v(self.length - 2 - e.row, e.col),
        }
    }

    pub fn pricing(&self, p: &Pricing) -> Pricing {
        let shape = p.shape();
        let mut out = Pricing::filled(shape, Money::zero());
        for e in shape.edges() {
            out.set(self.edge(e), p.get(e).clone());
        }
        out
    }
}

/// A price for every edge slot of a grid; missing edges carry `Infinity`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pricing {
    shape: GridShape,
    prices: Vec<Money>,
}

impl Pricing {
    pub fn filled(shape: GridShape, value: Money) -> Self {
        Pricing { shape, prices: vec![value; shape.num_edges()] }
    }

    /// Every present edge at `value`, every missing edge at `Infinity`.
    pub fn uniform(grid: &GridInstance, value: Money) -> Self {
        let mut p = Pricing::filled(grid.shape(), value);
        for e in grid.missing_edges() {
            p.set(*e, Money::Infinity);
        }
        p
    }

    pub fn zero(grid: &GridInstance) -> Self {
        Pricing::uniform(grid, Money::zero())
    }

    pub fn from_vec(shape: GridShape, prices: Vec<Money>) -> Result<Self> {
        if prices.len() != shape.num_edges() {
            return Err(Error::PricingShape { expected: shape.num_edges(), got: prices.len() });
        }
        Ok(Pricing { shape, prices })
    }

    pub fn shape(&self) -> GridShape {
        self.shape
    }

    pub fn get(&self, e: EdgeId) -> &Money {
        &self.prices[self.shape.edge_index(e)]
    }

    pub fn set(&mut self, e: EdgeId, m: Money) {
        let i = self.shape.edge_index(e);
        self.prices[i] = m;
    }

    pub fn as_slice(&self) -> &[Money] {
        &self.prices
    }

    pub fn iter(&self) -> impl Iterator<Item = (EdgeId, &Money)> + '_ {
        self.prices.iter().enumerate().map(move |(i, m)| (self.shape.edge_at(i), m))
    }

    /// Checks the shape and that every missing edge is priced at infinity.
    pub fn validate(&self, grid: &GridInstance) -> Result<()> {
        if self.shape != grid.shape() {
            return Err(Error::PricingShape { expected: grid.shape().num_edges(), got: self.prices.len() });
        }
        for e in grid.missing_edges() {
            if !self.get(*e).is_infinite() {
                return Err(Error::MissingEdgePriced(*e));
            }
        }
        Ok(())
    }

    /// Pointwise `self <= other`.
    pub fn le(&self, other: &Pricing) -> bool {
        self.shape == other.shape && self.prices.iter().zip(&other.prices).all(|(a, b)| a <= b)
    }
}
