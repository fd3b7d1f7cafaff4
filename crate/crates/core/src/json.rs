//! JSON encodings of positions, grid points, regions, consumptions and
//! analysis reports.
//!
//! Positions: `"bot"`, `"top"`, `{"seq":[p,q]}`, `{"or":[p,q]}`,
//! `{"par":[p,q]}`, `{"loop":{"n":k,"p":p}}`. Grid points are integer
//! arrays. A region is an array of `{"low": .., "high": ..}` objects, sorted
//! by the serialized `(low, high)` pair.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::grid::GridPoint;
use crate::positions::Position;
use crate::regions::{Interval, Region};
use crate::resources::ConsumptionMap;
use crate::statespace::Analysis;

/// Points that have a JSON encoding.
pub trait JsonPoint: Sized {
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;
}

fn malformed(what: &str, v: &Value) -> Error {
    Error::Json(format!("expected {what}, found {v}"))
}

fn pair(v: &Value) -> Result<(Position, Position)> {
    match v.as_array().map(Vec::as_slice) {
        Some([p, q]) => Ok((Position::from_json(p)?, Position::from_json(q)?)),
        _ => Err(malformed("a two-element array", v)),
    }
}

fn index_to_json(n: &BigUint) -> Value {
    match n.to_u64() {
        Some(k) => json!(k),
        None => Value::String(n.to_string()),
    }
}

fn index_from_json(v: &Value) -> Result<BigUint> {
    match v {
        Value::Number(k) => k
            .as_u64()
            .map(BigUint::from)
            .ok_or_else(|| malformed("a natural number", v)),
        Value::String(s) => s
            .parse::<BigUint>()
            .map_err(|_| malformed("a natural number", v)),
        _ => Err(malformed("a natural number", v)),
    }
}

impl JsonPoint for Position {
    fn to_json(&self) -> Value {
        match self {
            Position::Bot => json!("bot"),
            Position::Top => json!("top"),
            Position::Seq(p, q) => json!({ "seq": [p.to_json(), q.to_json()] }),
            Position::Choice(p, q) => json!({ "or": [p.to_json(), q.to_json()] }),
            Position::Par(p, q) => json!({ "par": [p.to_json(), q.to_json()] }),
            Position::Loop(n, p) => json!({ "loop": { "n": index_to_json(n), "p": p.to_json() } }),
        }
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::String(s) if s == "bot" => Ok(Position::Bot),
            Value::String(s) if s == "top" => Ok(Position::Top),
            Value::Object(m) if m.len() == 1 => {
                let (key, inner) = m.iter().next().expect("one entry");
                match key.as_str() {
                    "seq" => pair(inner).map(|(p, q)| Position::seq(p, q)),
                    "or" => pair(inner).map(|(p, q)| Position::choice(p, q)),
                    "par" => pair(inner).map(|(p, q)| Position::par(p, q)),
                    "loop" => {
                        let n = inner
                            .get("n")
                            .ok_or_else(|| malformed("a loop index", inner))?;
                        let p = inner
                            .get("p")
                            .ok_or_else(|| malformed("a loop body", inner))?;
                        Ok(Position::Loop(
                            index_from_json(n)?,
                            Box::new(Position::from_json(p)?),
                        ))
                    }
                    _ => Err(malformed("a position", v)),
                }
            }
            _ => Err(malformed("a position", v)),
        }
    }
}

impl JsonPoint for GridPoint {
    fn to_json(&self) -> Value {
        json!(self.coords())
    }

    fn from_json(v: &Value) -> Result<Self> {
        let items = v
            .as_array()
            .ok_or_else(|| malformed("an integer array", v))?;
        items
            .iter()
            .map(|c| {
                c.as_u64()
                    .and_then(|c| u32::try_from(c).ok())
                    .ok_or_else(|| malformed("a grid coordinate", c))
            })
            .collect::<Result<Vec<u32>>>()
            .map(GridPoint::new)
    }
}

pub fn interval_to_json<T: JsonPoint>(i: &Interval<T>) -> Value {
    json!({ "low": i.low.to_json(), "high": i.high.to_json() })
}

/// Serialized intervals in canonical order.
pub fn region_to_json<T: JsonPoint + Ord>(r: &Region<T>) -> Value {
    let mut items: Vec<(String, String, Value)> = r
        .iter()
        .map(|i| {
            (
                i.low.to_json().to_string(),
                i.high.to_json().to_string(),
                interval_to_json(i),
            )
        })
        .collect();
    items.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
    Value::Array(items.into_iter().map(|(_, _, v)| v).collect())
}

/// Parses a region without checking `low ≤ high`; see
/// [`Interval::new`](crate::regions::Interval::new) for that.
pub fn region_from_json<T: JsonPoint + Ord>(v: &Value) -> Result<Vec<Interval<T>>> {
    let items = v
        .as_array()
        .ok_or_else(|| malformed("an array of intervals", v))?;
    items
        .iter()
        .map(|item| {
            let low = item
                .get("low")
                .ok_or_else(|| malformed("an interval", item))?;
            let high = item
                .get("high")
                .ok_or_else(|| malformed("an interval", item))?;
            Ok(Interval::new_unchecked(
                T::from_json(low)?,
                T::from_json(high)?,
            ))
        })
        .collect()
}

pub fn consumption_to_json(c: &ConsumptionMap) -> Value {
    Value::Object(
        c.iter()
            .map(|(k, v)| (k.to_string(), json!(v)))
            .collect::<Map<_, _>>(),
    )
}

/// Sorted list of positions.
pub fn positions_to_json<'a>(ps: impl IntoIterator<Item = &'a Position>) -> Value {
    let mut items: Vec<(String, Value)> = ps
        .into_iter()
        .map(|p| {
            let v = p.to_json();
            (v.to_string(), v)
        })
        .collect();
    items.sort_by(|a, b| a.0.cmp(&b.0));
    Value::Array(items.into_iter().map(|(_, v)| v).collect())
}

pub fn analysis_to_json(a: &Analysis) -> Value {
    json!({
        "conservative": true,
        "delta": consumption_to_json(&a.delta),
        "positions": a.graph.vertex_count(),
        "forbidden": region_to_json(&a.forbidden),
        "fundamental": region_to_json(&a.fundamental),
        "deadlocks": positions_to_json(&a.deadlocks),
        "unroll": a.unroll,
    })
}
