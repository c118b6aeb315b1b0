//! Recursive row-interval decomposition and the top-level solver.
//!
//! Level 1 is the whole grid. Every block is split at its middle row into the
//! rows above and the rows below, and splitting stops before a level would
//! contain a block shorter than `ω⁵ / 2`. A driver belongs to the smallest block
//! containing both endpoints, so in every block except the last level it
//! touches or crosses the middle row. Each level is solved twice, once for the
//! odd-numbered blocks and once for the even-numbered ones; blocks of one parity
//! are extended by `⌈ω⁵ / 4⌉` rows each way and solved independently, and all
//! other edges are priced out of reach. The best of these pricings and the
//! single-price baseline is returned.

use std::fmt;

use rayon::prelude::*;

use crate::baseline::best_single_price;
use crate::block::{solve_last_level_block, BlockSolver, BlockSubproblem, LastLevelMode};
use crate::error::{Error, Result};
use crate::eval;
use crate::model::{Driver, EdgeId, GridInstance, Pricing, VertexId};
use crate::money::Money;
use crate::oracle::DEFAULT_EDGE_GUARD;
use crate::rooted::DEFAULT_STATE_BUDGET;

/// A contiguous run of rows `[start, end]` at some level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    /// 1-based level.
    pub level: usize,
    /// 0-based position within the level, top to bottom.
    pub index: usize,
    pub start: usize,
    pub end: usize,
    pub middle_row: usize,
    /// Positions of the children in the next level.
    pub children: Vec<usize>,
}

impl Block {
    pub fn num_rows(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn contains_row(&self, r: usize) -> bool {
        self.start <= r && r <= self.end
    }

    pub fn parity(&self) -> Parity {
        if self.index % 2 == 0 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }
}

/// Parity of a block's 1-based position within its level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Parity {
    Odd,
    Even,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Odd => "odd",
            Parity::Even => "even",
        })
    }
}

impl std::str::FromStr for Parity {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "odd" => Ok(Parity::Odd),
            "even" => Ok(Parity::Even),
            _ => Err(format!("expected `odd` or `even`, got {s:?}")),
        }
    }
}

/// `ω⁵`, the scale every block size is measured against.
pub fn omega5(width: usize) -> usize {
    width.pow(5)
}

/// `⌈ω⁵ / 4⌉` rows added on each side of a block before solving it.
pub fn extension_length(width: usize) -> usize {
    omega5(width).div_ceil(4)
}

/// The laminar family of blocks, level by level.
pub fn build_levels(length: usize, width: usize) -> Vec<Vec<Block>> {
    assert!(length >= 1 && width >= 1);
    let mid = |start: usize, len: usize| start + (len - 1) / 2;
    let mut levels = vec![vec![Block { level: 1, index: 0, start: 0, end: length - 1, middle_row: mid(0, length), children: vec![] }]];
    loop {
        let cur = levels.last().expect("level 1 exists");
        let mut next: Vec<(usize, usize, usize)> = Vec::new();
        for (pi, b) in cur.iter().enumerate() {
            if b.middle_row > b.start {
                next.push((pi, b.start, b.middle_row - 1));
            }
            if b.middle_row < b.end {
                next.push((pi, b.middle_row + 1, b.end));
            }
        }
        if next.is_empty() || next.iter().any(|&(_, s, e)| 2 * (e - s + 1) < omega5(width)) {
            break;
        }
        let level = levels.len() + 1;
        let mut blocks = Vec::with_capacity(next.len());
        for (i, &(parent, start, end)) in next.iter().enumerate() {
            levels.last_mut().expect("exists")[parent].children.push(i);
            blocks.push(Block { level, index: i, start, end, middle_row: mid(start, end - start + 1), children: vec![] });
        }
        levels.push(blocks);
    }
    levels
}

/// Row interval of a block after extending it by [`extension_length`] each way.
pub fn extend_block(block: &Block, length: usize, width: usize) -> (usize, usize) {
    let ext = extension_length(width);
    (block.start.saturating_sub(ext), (block.end + ext).min(length - 1))
}

/// Drivers (by index into the instance's list) of every block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DriverAssignment {
    /// `by_block[level - 1][index]`.
    pub by_block: Vec<Vec<Vec<usize>>>,
}

impl DriverAssignment {
    pub fn block(&self, level: usize, index: usize) -> &[usize] {
        &self.by_block[level - 1][index]
    }

    /// All drivers assigned at one level.
    pub fn level(&self, level: usize) -> Vec<usize> {
        self.by_block[level - 1].iter().flatten().copied().collect()
    }
}

/// Assigns each driver to the smallest block containing both endpoints.
pub fn assign_drivers(levels: &[Vec<Block>], drivers: &[Driver]) -> DriverAssignment {
    let mut by_block: Vec<Vec<Vec<usize>>> = levels.iter().map(|l| vec![Vec::new(); l.len()]).collect();
    for (k, d) in drivers.iter().enumerate() {
        let (lo, hi) = (d.u.row.min(d.v.row), d.u.row.max(d.v.row));
        let (mut j, mut i) = (0, 0);
        loop {
            let b = &levels[j][i];
            let child = b.children.iter().copied().find(|&c| {
                let cb = &levels[j + 1][c];
                cb.contains_row(lo) && cb.contains_row(hi)
            });
            match child {
                Some(c) => {
                    j += 1;
                    i = c;
                }
                None => break,
            }
        }
        by_block[j][i].push(k);
    }
    DriverAssignment { by_block }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    /// Per-row state cap for every rooted solve.
    pub state_budget: usize,
    /// Largest edge count the bottom-level exhaustive search may enumerate.
    pub edge_guard: usize,
    pub last_level: LastLevelMode,
    /// Drop candidates whose rooted solves exceed the state budget instead of failing.
    pub skip_over_budget: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            state_budget: DEFAULT_STATE_BUDGET,
            edge_guard: DEFAULT_EDGE_GUARD,
            last_level: LastLevelMode::Auto,
            skip_over_budget: false,
        }
    }
}

/// Pricing produced by solving the blocks of one parity at one level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelPricing {
    pub pricing: Pricing,
    /// Extended row intervals that were solved.
    pub solved: Vec<(usize, usize)>,
    /// Block candidates dropped over the state budget.
    pub skipped: usize,
}

/// A fully built decomposition of one instance.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub levels: Vec<Vec<Block>>,
    pub assignment: DriverAssignment,
}

impl Decomposition {
    pub fn new(instance: &GridInstance) -> Self {
        let levels = build_levels(instance.length(), instance.width());
        let assignment = assign_drivers(&levels, &instance.drivers);
        Decomposition { levels, assignment }
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    fn is_last(&self, level: usize) -> bool {
        level == self.levels.len()
    }
}

/// Solves every block of the given parity at `level` (1-based) on its extended
/// rows. Edges outside all solved extensions cost one more than the largest budget.
pub fn solve_level(
    instance: &GridInstance,
    dec: &Decomposition,
    level: usize,
    parity: Parity,
    opts: &SolveOptions,
) -> Result<LevelPricing> {
    let (w, m) = (instance.width(), instance.length());
    let blocked = &instance.b_max() + &Money::from_integer(1);
    let mut pricing = Pricing::uniform(instance, blocked);
    let chosen: Vec<&Block> = dec.levels[level - 1].iter().filter(|b| b.parity() == parity).collect();
    let solved: Vec<Result<(usize, usize, Pricing, usize)>> = chosen
        .par_iter()
        .map(|b| {
            let (a, z) = extend_block(b, m, w);
            let mut sub = instance.restrict(a, z, &Default::default())?;
            sub.drivers = dec
                .assignment
                .block(level, b.index)
                .iter()
                .map(|&k| {
                    let d = &instance.drivers[k];
                    let shift = |x: VertexId| VertexId::new(x.row - a, x.col);
                    Driver::new(shift(d.u), shift(d.v), d.budget.clone())
                })
                .collect();
            if dec.is_last(level) {
                let sol = solve_last_level_block(&sub, opts.last_level, opts.edge_guard, opts.state_budget, opts.skip_over_budget)?;
                Ok((a, z, sol.pricing, sol.skipped))
            } else {
                let sub = BlockSubproblem::new(sub, b.middle_row - a)?;
                let sol = BlockSolver::new(&sub, sub.price_set(), opts.state_budget).skip_over_budget(opts.skip_over_budget).solve()?;
                Ok((a, z, sol.best.pricing, sol.skipped))
            }
        })
        .collect();
    let mut out = LevelPricing { pricing: Pricing::zero(instance), solved: Vec::new(), skipped: 0 };
    for r in solved {
        let (a, z, sub, skipped) = r?;
        for (e, p) in sub.iter() {
            pricing.set(EdgeId { row: e.row + a, ..e }, p.clone());
        }
        out.solved.push((a, z));
        out.skipped += skipped;
    }
    out.pricing = pricing;
    Ok(out)
}

/// Which pricing a candidate is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CandidateLabel {
    Level { level: usize, parity: Parity },
    SinglePrice,
}

impl fmt::Display for CandidateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CandidateLabel::Level { level, parity } => write!(f, "level {level} {parity}"),
            CandidateLabel::SinglePrice => f.write_str("single price"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateReport {
    pub label: CandidateLabel,
    /// Revenue over every driver of the instance.
    pub revenue: Money,
    pub skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub pricing: Pricing,
    pub revenue: Money,
    pub chosen: CandidateLabel,
    pub candidates: Vec<CandidateReport>,
    pub num_levels: usize,
}

/// Best of the per-level, per-parity pricings and the single-price baseline,
/// each evaluated on the full driver set. Ties go to the earliest candidate.
pub fn solve(instance: &GridInstance, opts: &SolveOptions) -> Result<Solution> {
    let dec = Decomposition::new(instance);
    let labels: Vec<(usize, Parity)> =
        (1..=dec.num_levels()).flat_map(|j| [(j, Parity::Odd), (j, Parity::Even)]).collect();
    let levels: Vec<Result<(CandidateReport, Pricing)>> = labels
        .par_iter()
        .map(|&(level, parity)| {
            let lp = solve_level(instance, &dec, level, parity, opts)?;
            let revenue = eval::revenue(instance, &lp.pricing)?;
            Ok((CandidateReport { label: CandidateLabel::Level { level, parity }, revenue, skipped: lp.skipped }, lp.pricing))
        })
        .collect();
    let mut candidates = Vec::with_capacity(levels.len() + 1);
    for r in levels {
        candidates.push(r?);
    }
    let single = best_single_price(instance);
    let sp = single.pricing(instance);
    let revenue = eval::revenue(instance, &sp)?;
    candidates.push((CandidateReport { label: CandidateLabel::SinglePrice, revenue, skipped: 0 }, sp));

    let mut best = 0;
    for (k, (c, _)) in candidates.iter().enumerate() {
        if c.revenue > candidates[best].0.revenue {
            best = k;
        }
    }
    let chosen = candidates[best].0.label;
    let revenue = candidates[best].0.revenue.clone();
    let pricing = if instance.b_max().is_zero() { Pricing::zero(instance) } else { candidates[best].1.clone() };
    Ok(Solution {
        pricing,
        revenue,
        chosen,
        candidates: candidates.into_iter().map(|(c, _)| c).collect(),
        num_levels: dec.num_levels(),
    })
}

/// The single pricing for one `(level, parity)` pair, evaluated on all drivers.
pub fn solve_candidate(instance: &GridInstance, level: usize, parity: Parity, opts: &SolveOptions) -> Result<(Pricing, Money)> {
    let dec = Decomposition::new(instance);
    if level == 0 || level > dec.num_levels() {
        return Err(Error::NoSuchLevel { level, levels: dec.num_levels() });
    }
    let lp = solve_level(instance, &dec, level, parity, opts)?;
    let revenue = eval::revenue(instance, &lp.pricing)?;
    Ok((lp.pricing, revenue))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(r: usize, c: usize) -> VertexId {
        VertexId::new(r, c)
    }

    fn spans(level: &[Block]) -> Vec<(usize, usize)> {
        level.iter().map(|b| (b.start, b.end)).collect()
    }

    #[test]
    fn single_row() {
        let l = build_levels(1, 2);
        assert_eq!(l.len(), 1);
        assert_eq!(spans(&l[0]), vec![(0, 0)]);
    }

    #[test]
    fn sixty_four_rows_width_two() {
        let l = build_levels(64, 2);
        assert_eq!(l.len(), 2);
        assert_eq!(spans(&l[0]), vec![(0, 63)]);
        assert_eq!(l[0][0].middle_row, 31);
        assert_eq!(spans(&l[1]), vec![(0, 30), (32, 63)]);
    }

    #[test]
    fn extension_arithmetic() {
        let b = Block { level: 2, index: 0, start: 20, end: 40, middle_row: 30, children: vec![] };
        assert_eq!(extend_block(&b, 100, 2), (12, 48));
        let top = Block { start: 3, end: 10, ..b };
        assert_eq!(extend_block(&top, 100, 2), (0, 18));
        assert_eq!(extension_length(3), 61);
    }

    #[test]
    fn assignment_examples() {
        let l = build_levels(64, 2);
        let drivers = vec![
            Driver::new(v(0, 0), v(63, 1), 1u64.into()),
            Driver::new(v(31, 0), v(2, 1), 1u64.into()),
            Driver::new(v(40, 0), v(50, 1), 1u64.into()),
            Driver::new(v(5, 0), v(5, 0), 1u64.into()),
        ];
        let a = assign_drivers(&l, &drivers);
        assert_eq!(a.block(1, 0), &[0, 1]);
        assert_eq!(a.block(2, 0), &[3]);
        assert_eq!(a.block(2, 1), &[2]);
    }

    #[test]
    fn even_parity_with_one_block_prices_everything_out() {
        let mut g = GridInstance::new(2, 3).unwrap();
        g.add_driver(Driver::new(v(0, 0), v(2, 1), 4u64.into())).unwrap();
        let dec = Decomposition::new(&g);
        let lp = solve_level(&g, &dec, 1, Parity::Even, &SolveOptions::default()).unwrap();
        assert!(lp.pricing.as_slice().iter().all(|p| *p == 5u64));
        assert_eq!(eval::revenue(&g, &lp.pricing).unwrap(), 0u64);
    }

    #[test]
    fn single_edge_instance() {
        let mut g = GridInstance::new(2, 1).unwrap();
        g.add_driver(Driver::new(v(0, 0), v(0, 1), 4u64.into())).unwrap();
        let s = solve(&g, &SolveOptions::default()).unwrap();
        assert_eq!(s.revenue, 4u64);
        assert_eq!(s.candidates.len(), 3);
    }

    #[test]
    fn zero_budgets_give_zero_pricing() {
        let mut g = GridInstance::new(2, 2).unwrap();
        g.add_driver(Driver::new(v(0, 0), v(1, 1), Money::zero())).unwrap();
        let s = solve(&g, &SolveOptions::default()).unwrap();
        assert_eq!(s.pricing, Pricing::zero(&g));
        assert_eq!(s.revenue, 0u64);
    }
}
