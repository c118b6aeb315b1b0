//! Pricing a single block whose drivers all cross (or touch) its middle row,
//! plus the handler for the small blocks at the bottom of the decomposition.
//!
//! For every choice of crossing columns `s` (entering the middle row from
//! above) and `t` (leaving it downward), all other crossings are blocked and
//! the remaining edges split into an upper, a middle and a lower group. Three
//! candidates price one group and leave the other two free: the lower group is
//! a rooted instance hanging from `t`, the upper group the same upside down
//! from `s`, and the middle group a single priced edge.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::eval;
use crate::model::{Driver, EdgeId, EdgeKind, GridInstance, Pricing, VertexId};
use crate::money::Money;
use crate::oracle;
use crate::rooted::{solve_rooted, RootedInstance};
use crate::rounding::PriceSet;

/// Role of an edge under the template for crossing columns `(s, t)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeGroup {
    /// Priced out of reach of every driver.
    Blocked,
    Up,
    Mid,
    Low,
}

pub fn template_group(e: EdgeId, middle_row: usize, s: usize, t: usize) -> EdgeGroup {
    let (lo, hi) = (s.min(t), s.max(t));
    match e.kind {
        EdgeKind::Horizontal if e.row < middle_row => EdgeGroup::Up,
        EdgeKind::Horizontal if e.row > middle_row => EdgeGroup::Low,
        EdgeKind::Horizontal if e.col >= lo && e.col < hi => EdgeGroup::Mid,
        EdgeKind::Horizontal => EdgeGroup::Blocked,
        EdgeKind::Vertical if e.row + 1 < middle_row => EdgeGroup::Up,
        EdgeKind::Vertical if e.row + 1 == middle_row => {
            if e.col == s {
                EdgeGroup::Up
            } else {
                EdgeGroup::Blocked
            }
        }
        EdgeKind::Vertical if e.row == middle_row => {
            if e.col == t {
                EdgeGroup::Low
            } else {
                EdgeGroup::Blocked
            }
        }
        EdgeKind::Vertical => EdgeGroup::Low,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CandidateKind {
    Up,
    Mid,
    Low,
}

impl std::fmt::Display for CandidateKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CandidateKind::Up => "up",
            CandidateKind::Mid => "mid",
            CandidateKind::Low => "low",
        })
    }
}

/// A block (already extended and re-indexed) with its drivers, each stored
/// with `u` on or above the middle row and `v` on or below it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSubproblem {
    grid: GridInstance,
    middle_row: usize,
}

impl BlockSubproblem {
    /// The drivers of `grid` become the block's drivers.
    pub fn new(grid: GridInstance, middle_row: usize) -> Result<Self> {
        if middle_row >= grid.length() {
            return Err(Error::EmptyRowRange { lo: middle_row, hi: middle_row, length: grid.length() });
        }
        let mut grid = grid;
        for d in grid.drivers.iter_mut() {
            if d.u.row > d.v.row {
                std::mem::swap(&mut d.u, &mut d.v);
            }
            if d.u.row > middle_row || d.v.row < middle_row {
                return Err(Error::NotStraddling { u: d.u, v: d.v, middle: middle_row });
            }
        }
        Ok(BlockSubproblem { grid, middle_row })
    }

    pub fn grid(&self) -> &GridInstance {
        &self.grid
    }

    pub fn middle_row(&self) -> usize {
        self.middle_row
    }

    /// Price set from the block's own maximum budget, length and driver count.
    pub fn price_set(&self) -> PriceSet {
        PriceSet::new(&self.grid.b_max(), self.grid.length(), self.grid.drivers.len().max(1))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub s: usize,
    pub t: usize,
    pub kind: CandidateKind,
    pub pricing: Pricing,
    pub revenue: Money,
    /// What the rooted solve promised for the priced group (`up` and `low` only).
    pub rooted_revenue: Option<Money>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSolution {
    pub best: Candidate,
    /// Candidates dropped because a rooted solve hit the state budget (skip mode only).
    pub skipped: usize,
}

/// Builds and evaluates the `(s, t, kind)` candidates of one block, caching
/// the rooted solves shared between candidates.
pub struct BlockSolver<'a> {
    sub: &'a BlockSubproblem,
    set: PriceSet,
    state_budget: usize,
    blocked: Money,
    low: HashMap<usize, Option<(Pricing, Money)>>,
    up: HashMap<usize, Option<(Pricing, Money)>>,
    skip_over_budget: bool,
}

impl<'a> BlockSolver<'a> {
    pub fn new(sub: &'a BlockSubproblem, set: PriceSet, state_budget: usize) -> Self {
        let blocked = set.blocking_price();
        BlockSolver { sub, set, state_budget, blocked, low: HashMap::new(), up: HashMap::new(), skip_over_budget: false }
    }

    /// Drop `up`/`low` candidates whose rooted solve exceeds the state budget
    /// instead of failing.
    pub fn skip_over_budget(mut self, skip: bool) -> Self {
        self.skip_over_budget = skip;
        self
    }

    fn base_pricing(&self, s: usize, t: usize) -> Pricing {
        let g = &self.sub.grid;
        let mut p = Pricing::zero(g);
        for e in g.present_edges() {
            if template_group(e, self.sub.middle_row, s, t) == EdgeGroup::Blocked {
                p.set(e, self.blocked.clone());
            }
        }
        p
    }

    /// `None` when skipped over budget.
    pub fn candidate(&mut self, s: usize, t: usize, kind: CandidateKind) -> Result<Option<Candidate>> {
        let mut pricing = self.base_pricing(s, t);
        let mut rooted_revenue = None;
        match kind {
            CandidateKind::Mid => {
                let mid = self.sub.middle_row;
                let designated = EdgeId::h(mid, s.min(t));
                if s != t && self.sub.grid.is_present(designated) {
                    let mut prices: Vec<Money> = self.sub.grid.drivers.iter().map(|d| d.budget.clone()).collect();
                    prices.push(Money::zero());
                    prices.sort();
                    prices.dedup();
                    let mut best: Option<(Money, Money)> = None;
                    for p in prices {
                        pricing.set(designated, p.clone());
                        let r = eval::revenue(&self.sub.grid, &pricing)?;
                        if best.as_ref().is_none_or(|(_, br)| r > *br) {
                            best = Some((p, r));
                        }
                    }
                    let (p, _) = best.expect("zero is always a candidate");
                    pricing.set(designated, p);
                }
            }
            CandidateKind::Low => {
                let Some((rooted, rev)) = self.low_solution(t)? else { return Ok(None) };
                let mid = self.sub.middle_row;
                for e in self.sub.grid.present_edges() {
                    if template_group(e, mid, s, t) == EdgeGroup::Low {
                        pricing.set(e, rooted.get(EdgeId { row: e.row - mid, ..e }).clone());
                    }
                }
                rooted_revenue = Some(rev);
            }
            CandidateKind::Up => {
                let Some((rooted, rev)) = self.up_solution(s)? else { return Ok(None) };
                let mid = self.sub.middle_row;
                for e in self.sub.grid.present_edges() {
                    if template_group(e, mid, s, t) == EdgeGroup::Up {
                        pricing.set(e, rooted.get(e).clone());
                    }
                }
                rooted_revenue = Some(rev);
            }
        }
        let revenue = eval::revenue(&self.sub.grid, &pricing)?;
        Ok(Some(Candidate { s, t, kind, pricing, revenue, rooted_revenue }))
    }

    fn rooted(&self, inst: &RootedInstance) -> Result<Option<(Pricing, Money)>> {
        match solve_rooted(inst, &self.set, self.state_budget) {
            Ok(sol) => Ok(Some((sol.pricing, sol.revenue))),
            Err(e) if self.skip_over_budget && e.is_limit() => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// Rooted solve of the part below the middle row, hanging from `t`.
    fn low_solution(&mut self, t: usize) -> Result<Option<(Pricing, Money)>> {
        if let Some(hit) = self.low.get(&t) {
            return Ok(hit.clone());
        }
        let g = &self.sub.grid;
        let (w, mid, len) = (g.width(), self.sub.middle_row, g.length());
        let mut extra: BTreeSet<EdgeId> = (0..w.saturating_sub(1)).map(|c| EdgeId::h(0, c)).collect();
        if mid + 1 < len {
            extra.extend((0..w).filter(|c| *c != t).map(|c| EdgeId::v(0, c)));
        }
        let lower = g.restrict(mid, len - 1, &extra)?;
        let drivers = g.drivers.iter().map(|d| (VertexId::new(d.v.row - mid, d.v.col), d.budget.clone())).collect();
        let inst = RootedInstance::new(lower, VertexId::new(0, t), drivers)?;
        let out = self.rooted(&inst)?;
        self.low.insert(t, out.clone());
        Ok(out)
    }

    /// Rooted solve of the part above the middle row, hanging from `s`,
    /// returned in the block's own coordinates.
    fn up_solution(&mut self, s: usize) -> Result<Option<(Pricing, Money)>> {
        if let Some(hit) = self.up.get(&s) {
            return Ok(hit.clone());
        }
        let g = &self.sub.grid;
        let (w, mid) = (g.width(), self.sub.middle_row);
        let mut extra: BTreeSet<EdgeId> = (0..w.saturating_sub(1)).map(|c| EdgeId::h(mid, c)).collect();
        if mid > 0 {
            extra.extend((0..w).filter(|c| *c != s).map(|c| EdgeId::v(mid - 1, c)));
        }
        let upper = g.restrict(0, mid, &extra)?;
        let (flipped, flip) = upper.flip_vertical();
        let drivers = g.drivers.iter().map(|d| (flip.vertex(d.u), d.budget.clone())).collect();
        let inst = RootedInstance::new(flipped, VertexId::new(0, s), drivers)?;
        let out = self.rooted(&inst)?.map(|(p, r)| (flip.pricing(&p), r));
        self.up.insert(s, out.clone());
        Ok(out)
    }

    /// Best candidate over all `(s, t, kind)`; ties go to the first in that order.
    pub fn solve(&mut self) -> Result<BlockSolution> {
        let w = self.sub.grid.width();
        let mut best: Option<Candidate> = None;
        let mut skipped = 0;
        for s in 0..w {
            for t in 0..w {
                for kind in [CandidateKind::Up, CandidateKind::Mid, CandidateKind::Low] {
                    match self.candidate(s, t, kind)? {
                        Some(c) => {
                            if best.as_ref().is_none_or(|b| c.revenue > b.revenue) {
                                best = Some(c);
                            }
                        }
                        None => skipped += 1,
                    }
                }
            }
        }
        Ok(BlockSolution { best: best.expect("mid candidates never skip"), skipped })
    }
}

/// Best template candidate for a block, with the block's own price set.
pub fn solve_block(sub: &BlockSubproblem, state_budget: usize) -> Result<BlockSolution> {
    BlockSolver::new(sub, sub.price_set(), state_budget).solve()
}

/// How the bottom-level blocks are solved.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LastLevelMode {
    /// Exhaustive when the block has at most [`LAST_LEVEL_BRUTE_EDGES`] present edges, row split otherwise.
    #[default]
    Auto,
    Brute,
    RowSplit,
}

pub const LAST_LEVEL_BRUTE_EDGES: usize = 7;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LastLevelSolution {
    pub pricing: Pricing,
    pub revenue: Money,
    /// Splitting row of the chosen candidate; `None` for the exhaustive search.
    pub row: Option<usize>,
    pub skipped: usize,
}

/// Solves a bottom-level block whose drivers need not cross any fixed row.
///
/// The exhaustive search is exact over the block's price set. The row split
/// groups drivers by their upper endpoint's row, solves each group as a block
/// split at that row, and keeps the pricing that earns most from all drivers.
pub fn solve_last_level_block(
    grid: &GridInstance,
    mode: LastLevelMode,
    edge_guard: usize,
    state_budget: usize,
    skip_over_budget: bool,
) -> Result<LastLevelSolution> {
    let set = PriceSet::new(&grid.b_max(), grid.length(), grid.drivers.len().max(1));
    let brute = match mode {
        LastLevelMode::Brute => true,
        LastLevelMode::RowSplit => false,
        LastLevelMode::Auto => grid.num_present_edges() <= edge_guard.min(LAST_LEVEL_BRUTE_EDGES),
    };
    if brute {
        let sol = oracle::brute_force_opt(grid, &set, edge_guard)?;
        return Ok(LastLevelSolution { pricing: sol.pricing, revenue: sol.revenue, row: None, skipped: 0 });
    }
    let mut classes: std::collections::BTreeMap<usize, Vec<Driver>> = Default::default();
    for d in &grid.drivers {
        classes.entry(d.u.row.min(d.v.row)).or_default().push(d.clone());
    }
    let mut best = LastLevelSolution { pricing: Pricing::zero(grid), revenue: Money::zero(), row: None, skipped: 0 };
    best.revenue = eval::revenue(grid, &best.pricing)?;
    let mut skipped = 0;
    for (row, drivers) in classes {
        let mut g = grid.clone();
        g.drivers = drivers;
        let sub = BlockSubproblem::new(g, row)?;
        let sol = BlockSolver::new(&sub, set.clone(), state_budget).skip_over_budget(skip_over_budget).solve()?;
        skipped += sol.skipped;
        let revenue = eval::revenue(grid, &sol.best.pricing)?;
        if best.row.is_none() || revenue > best.revenue {
            best = LastLevelSolution { pricing: sol.best.pricing, revenue, row: Some(row), skipped: 0 };
        }
    }
    best.skipped = skipped;
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rooted::DEFAULT_STATE_BUDGET;

    fn v(r: usize, c: usize) -> VertexId {
        VertexId::new(r, c)
    }

    #[test]
    fn groups_partition_edges() {
        let g = GridInstance::new(3, 5).unwrap();
        for s in 0..3 {
            for t in 0..3 {
                let mut counts: HashMap<EdgeGroup, usize> = HashMap::new();
                for e in g.shape().edges() {
                    *counts.entry(template_group(e, 2, s, t)).or_default() += 1;
                }
                // Two rows of three horizontals + two rows of three verticals per side.
                assert_eq!(counts[&EdgeGroup::Up], 2 * 2 + 3 + 1);
                assert_eq!(counts[&EdgeGroup::Low], 2 * 2 + 3 + 1);
                assert_eq!(counts.get(&EdgeGroup::Mid).copied().unwrap_or(0), s.abs_diff(t));
            }
        }
    }

    #[test]
    fn self_loop_driver_earns_nothing() {
        let mut g = GridInstance::new(2, 3).unwrap();
        g.add_driver(Driver::new(v(1, 0), v(1, 0), 4u64.into())).unwrap();
        let sub = BlockSubproblem::new(g, 1).unwrap();
        assert_eq!(solve_block(&sub, DEFAULT_STATE_BUDGET).unwrap().best.revenue, 0u64);
    }

    #[test]
    fn single_middle_edge() {
        let mut g = GridInstance::new(2, 3).unwrap();
        g.add_driver(Driver::new(v(1, 0), v(1, 1), 4u64.into())).unwrap();
        let sub = BlockSubproblem::new(g, 1).unwrap();
        let mut solver = BlockSolver::new(&sub, sub.price_set(), DEFAULT_STATE_BUDGET);
        let mid = solver.candidate(0, 1, CandidateKind::Mid).unwrap().unwrap();
        assert_eq!(mid.revenue, 4u64);
        assert_eq!(*mid.pricing.get(EdgeId::h(1, 0)), 4u64);
        assert_eq!(solver.solve().unwrap().best.revenue, 4u64);
    }

    #[test]
    fn rejects_one_sided_drivers() {
        let mut g = GridInstance::new(2, 3).unwrap();
        g.add_driver(Driver::new(v(0, 0), v(0, 1), 4u64.into())).unwrap();
        assert!(matches!(BlockSubproblem::new(g, 1), Err(Error::NotStraddling { .. })));
    }

    #[test]
    fn drivers_are_normalized_downward() {
        let mut g = GridInstance::new(2, 3).unwrap();
        g.add_driver(Driver::new(v(2, 1), v(0, 0), 4u64.into())).unwrap();
        let sub = BlockSubproblem::new(g, 1).unwrap();
        assert_eq!(sub.grid().drivers[0].u, v(0, 0));
    }

    #[test]
    fn last_level_brute_single_row() {
        let mut g = GridInstance::new(2, 1).unwrap();
        g.add_driver(Driver::new(v(0, 0), v(0, 1), 4u64.into())).unwrap();
        let sol = solve_last_level_block(&g, LastLevelMode::Brute, 8, DEFAULT_STATE_BUDGET, false).unwrap();
        assert_eq!(sol.revenue, 4u64);
        let split = solve_last_level_block(&g, LastLevelMode::RowSplit, 8, DEFAULT_STATE_BUDGET, false).unwrap();
        assert_eq!(split.revenue, 4u64);
        assert_eq!(split.row, Some(0));
    }

    #[test]
    fn last_level_brute_refused_over_guard() {
        let g = GridInstance::new(3, 3).unwrap();
        let r = solve_last_level_block(&g, LastLevelMode::Brute, 8, DEFAULT_STATE_BUDGET, false);
        assert!(matches!(r, Err(Error::GuardExceeded { .. })));
    }
}
