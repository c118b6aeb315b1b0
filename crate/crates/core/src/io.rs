//! JSON files for instances, pricings and weighted grids.
//!
//! Money values are strings: `"num/den"`, integers, plain decimals, or `"inf"`.
//! Output always uses the canonical `"num/den"` form in lowest terms.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{ParseError, Result};
use crate::model::{Driver, EdgeId, EdgeKind, GridInstance, GridShape, Pricing, VertexId};
use crate::money::Money;

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RawEdge {
    kind: String,
    row: usize,
    col: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RawDriver {
    u: [usize; 2],
    v: [usize; 2],
    budget: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RawInstance {
    width: usize,
    length: usize,
    #[serde(default)]
    missing_edges: Vec<RawEdge>,
    #[serde(default)]
    drivers: Vec<RawDriver>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RawPrice {
    edge: RawEdge,
    price: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RawPricing {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    width: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    length: Option<usize>,
    prices: Vec<RawPrice>,
}

fn field(name: impl Into<String>, message: impl Into<String>) -> ParseError {
    ParseError::Field { field: name.into(), message: message.into() }
}

fn json<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| ParseError::Json { line: e.line(), column: e.column(), message: e.to_string() }.into())
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

fn edge_in(raw: &RawEdge, shape: GridShape, name: &str) -> Result<EdgeId> {
    let kind = match raw.kind.as_str() {
        "H" => EdgeKind::Horizontal,
        "V" => EdgeKind::Vertical,
        other => return Err(field(format!("{name}.kind"), format!("expected \"H\" or \"V\", got {other:?}")).into()),
    };
    let e = EdgeId { kind, row: raw.row, col: raw.col };
    if !shape.contains_edge(e) {
        return Err(field(name, format!("edge {e} is outside the {}x{} grid", shape.width, shape.length)).into());
    }
    Ok(e)
}

fn edge_out(e: EdgeId) -> RawEdge {
    let kind = match e.kind {
        EdgeKind::Horizontal => "H",
        EdgeKind::Vertical => "V",
    };
    RawEdge { kind: kind.into(), row: e.row, col: e.col }
}

fn money_in(s: &str, name: &str) -> Result<Money> {
    s.parse::<Money>().map_err(|_| field(name, format!("invalid money value {s:?}")).into())
}

fn vertex_in(rc: [usize; 2], shape: GridShape, name: &str) -> Result<VertexId> {
    let v = VertexId::new(rc[0], rc[1]);
    if !shape.contains(v) {
        return Err(field(name, format!("vertex {v} is outside the {}x{} grid", shape.width, shape.length)).into());
    }
    Ok(v)
}

fn shape_in(width: usize, length: usize) -> Result<GridShape> {
    if width == 0 {
        return Err(field("width", "must be at least 1").into());
    }
    if length == 0 {
        return Err(field("length", "must be at least 1").into());
    }
    GridShape::new(width, length)
}

pub fn parse_instance(text: &str) -> Result<GridInstance> {
    let raw: RawInstance = json(text)?;
    let shape = shape_in(raw.width, raw.length)?;
    let mut g = GridInstance::new(raw.width, raw.length)?;
    for (i, e) in raw.missing_edges.iter().enumerate() {
        g.remove_edge(edge_in(e, shape, &format!("missing_edges[{i}]"))?)?;
    }
    for (i, d) in raw.drivers.iter().enumerate() {
        let u = vertex_in(d.u, shape, &format!("drivers[{i}].u"))?;
        let v = vertex_in(d.v, shape, &format!("drivers[{i}].v"))?;
        let name = format!("drivers[{i}].budget");
        let budget = money_in(&d.budget, &name)?;
        if budget.is_infinite() {
            return Err(field(name, "budgets must be finite").into());
        }
        g.add_driver(Driver::new(u, v, budget))?;
    }
    Ok(g)
}

pub fn instance_to_json(g: &GridInstance) -> String {
    to_json(&RawInstance {
        width: g.width(),
        length: g.length(),
        missing_edges: g.missing_edges().iter().map(|e| edge_out(*e)).collect(),
        drivers: g
            .drivers
            .iter()
            .map(|d| RawDriver { u: [d.u.row, d.u.col], v: [d.v.row, d.v.col], budget: d.budget.to_canonical_string() })
            .collect(),
    })
}

fn prices_in(raw: &RawPricing, shape: GridShape) -> Result<(Pricing, BTreeSet<EdgeId>)> {
    let mut p = Pricing::filled(shape, Money::Infinity);
    let mut listed = BTreeSet::new();
    for (i, rp) in raw.prices.iter().enumerate() {
        let e = edge_in(&rp.edge, shape, &format!("prices[{i}].edge"))?;
        if !listed.insert(e) {
            return Err(field(format!("prices[{i}].edge"), format!("edge {e} is priced twice")).into());
        }
        p.set(e, money_in(&rp.price, &format!("prices[{i}].price"))?);
    }
    Ok((p, listed))
}

/// Reads a pricing for `instance`. Missing edges may be omitted (they are at
/// infinity); every present edge needs a price.
pub fn parse_pricing(text: &str, instance: &GridInstance) -> Result<Pricing> {
    let raw: RawPricing = json(text)?;
    let (p, listed) = prices_in(&raw, instance.shape())?;
    if let Some(e) = instance.present_edges().find(|e| !listed.contains(e)) {
        return Err(field("prices", format!("present edge {e} has no price")).into());
    }
    p.validate(instance)?;
    Ok(p)
}

pub fn pricing_to_json(p: &Pricing) -> String {
    to_json(&RawPricing {
        width: None,
        length: None,
        prices: p.iter().map(|(e, x)| RawPrice { edge: edge_out(e), price: x.to_canonical_string() }).collect(),
    })
}

/// Reads a weighted grid: a pricing file with `width` and `length`; unlisted edges are absent.
pub fn parse_weighted_grid(text: &str) -> Result<Pricing> {
    let raw: RawPricing = json(text)?;
    let width = raw.width.ok_or_else(|| field("width", "required for a weighted grid"))?;
    let length = raw.length.ok_or_else(|| field("length", "required for a weighted grid"))?;
    Ok(prices_in(&raw, shape_in(width, length)?)?.0)
}

pub fn weighted_grid_to_json(p: &Pricing) -> String {
    let s = p.shape();
    to_json(&RawPricing {
        width: Some(s.width),
        length: Some(s.length),
        prices: p.iter().map(|(e, x)| RawPrice { edge: edge_out(e), price: x.to_canonical_string() }).collect(),
    })
}
