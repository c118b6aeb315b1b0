//! The rounded price set and rounding of arbitrary pricings onto it.

use crate::eval::{Ticks, INF_TICKS};
use crate::model::Pricing;
use crate::money::{ceil_log2, Money};

/// `{b_max / 2^t : 0 <= t <= T} ∪ {0}` with `T = ceil(log2(4 m n))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PriceSet {
    b_max: Money,
    exponent_cap: u32,
    /// Strictly decreasing, ending in zero.
    values: Vec<Money>,
    p_min: Option<Money>,
}

impl PriceSet {
    /// Price set for a maximum budget `b_max`, grid length `m` and `n` drivers
    /// (counted with multiplicity).
    pub fn new(b_max: &Money, m: usize, n: usize) -> PriceSet {
        assert!(!b_max.is_infinite(), "b_max must be finite");
        assert!(m >= 1 && n >= 1, "price set needs m >= 1 and n >= 1");
        let cap = ceil_log2(4 * m as u64 * n as u64);
        if b_max.is_zero() {
            return PriceSet { b_max: Money::zero(), exponent_cap: cap, values: vec![Money::zero()], p_min: None };
        }
        let mut values: Vec<Money> = (0..=cap).map(|t| b_max.div_int(1u64 << t)).collect();
        let p_min = values.last().cloned();
        values.push(Money::zero());
        PriceSet { b_max: b_max.clone(), exponent_cap: cap, values, p_min }
    }

    pub fn b_max(&self) -> &Money {
        &self.b_max
    }

    pub fn exponent_cap(&self) -> u32 {
        self.exponent_cap
    }

    pub fn values(&self) -> &[Money] {
        &self.values
    }

    pub fn p_min(&self) -> Option<&Money> {
        self.p_min.as_ref()
    }

    pub fn is_degenerate(&self) -> bool {
        self.p_min.is_none()
    }

    /// `b_max + 1`, the finite stand-in for an unaffordable edge.
    pub fn blocking_price(&self) -> Money {
        &self.b_max + &Money::from_integer(1)
    }

    /// Values as multiples of `p_min`, ascending: `[0, 1, 2, 4, ..., 2^T]`.
    pub fn tick_values(&self) -> Vec<Ticks> {
        if self.is_degenerate() {
            return vec![0];
        }
        std::iter::once(0).chain((0..=self.exponent_cap).map(|t| 1u64 << t)).collect()
    }

    /// `b_max` in units of `p_min`.
    pub fn cap_ticks(&self) -> Ticks {
        if self.is_degenerate() {
            0
        } else {
            1u64 << self.exponent_cap
        }
    }

    pub fn ticks_to_money(&self, t: Ticks) -> Money {
        if t == INF_TICKS {
            return Money::Infinity;
        }
        match &self.p_min {
            Some(u) => u.times(t),
            None => Money::zero(),
        }
    }

    /// Largest tick count not exceeding `budget`.
    pub fn budget_ticks(&self, budget: &Money) -> Ticks {
        match &self.p_min {
            Some(u) => budget.floor_div(u),
            None => 0,
        }
    }

    /// Money value of an element of the set, in ticks; `None` if not a member.
    pub fn ticks_of(&self, m: &Money) -> Option<Ticks> {
        if m.is_infinite() {
            return Some(INF_TICKS);
        }
        if m.is_zero() {
            return Some(0);
        }
        let t = m.whole_multiple_of(self.p_min.as_ref()?)?;
        (t.is_power_of_two() && t <= self.cap_ticks()).then_some(t)
    }

    /// Largest element not exceeding `price` after capping at `b_max`.
    pub fn round_down(&self, price: &Money) -> Money {
        if price.is_infinite() {
            return Money::Infinity;
        }
        let capped = Money::min_of(price, &self.b_max);
        self.values.iter().find(|v| *v <= capped).cloned().unwrap_or_else(Money::zero)
    }
}

/// Caps every finite price at `b_max` and rounds it down into the price set.
pub fn round_pricing(pricing: &Pricing, set: &PriceSet) -> Pricing {
    let prices = pricing.as_slice().iter().map(|p| set.round_down(p)).collect();
    Pricing::from_vec(pricing.shape(), prices).expect("same shape")
}

/// Distances above `b_max` are unaffordable to everyone and collapse to infinity.
pub fn quantize_distance(d: &Money, b_max: &Money) -> Money {
    if d > b_max {
        Money::Infinity
    } else {
        d.clone()
    }
}
