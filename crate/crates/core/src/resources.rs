//! Mutex consumption of executions, positions and programs.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};

use crate::error::{Error, Result};
use crate::positions::{check_valid, labeled_successors, Position};
use crate::syntax::Program;

/// Per-mutex count of takes minus releases. Absent keys are zero.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConsumptionMap(BTreeMap<String, i64>);

impl ConsumptionMap {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `δ_a`: one take of `mutex`.
    pub fn unit(mutex: &str) -> Self {
        let mut m = BTreeMap::new();
        m.insert(mutex.to_string(), 1);
        ConsumptionMap(m)
    }

    pub fn get(&self, mutex: &str) -> i64 {
        self.0.get(mutex).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Non-zero entries, sorted by mutex name.
    pub fn iter(&self) -> impl Iterator<Item = (&str, i64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Every count lies in `[0, 1]`.
    pub fn is_within_unit_bounds(&self) -> bool {
        self.0.values().all(|&v| (0..=1).contains(&v))
    }
}

impl FromIterator<(String, i64)> for ConsumptionMap {
    fn from_iter<I: IntoIterator<Item = (String, i64)>>(iter: I) -> Self {
        let mut out = ConsumptionMap::zero();
        for (k, v) in iter {
            out += ConsumptionMap([(k, v)].into_iter().collect());
        }
        out
    }
}

impl AddAssign for ConsumptionMap {
    fn add_assign(&mut self, rhs: ConsumptionMap) {
        for (k, v) in rhs.0 {
            *self.0.entry(k).or_insert(0) += v;
        }
        self.0.retain(|_, v| *v != 0);
    }
}

impl Add for ConsumptionMap {
    type Output = ConsumptionMap;

    fn add(mut self, rhs: ConsumptionMap) -> ConsumptionMap {
        self += rhs;
        self
    }
}

impl Neg for ConsumptionMap {
    type Output = ConsumptionMap;

    fn neg(self) -> ConsumptionMap {
        ConsumptionMap(self.0.into_iter().map(|(k, v)| (k, -v)).collect())
    }
}

impl Sub for ConsumptionMap {
    type Output = ConsumptionMap;

    fn sub(self, rhs: ConsumptionMap) -> ConsumptionMap {
        self + (-rhs)
    }
}

impl fmt::Display for ConsumptionMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}: {v}")?;
        }
        f.write_str("}")
    }
}

fn leaf_consumption(leaf: &Program) -> ConsumptionMap {
    match leaf {
        Program::Lock(m) => ConsumptionMap::unit(m),
        Program::Unlock(m) => -ConsumptionMap::unit(m),
        _ => ConsumptionMap::zero(),
    }
}

/// Consumption of a single reduction step, or an error if `to` is not a
/// successor of `from`.
pub fn step_consumption(prog: &Program, from: &Position, to: &Position) -> Result<ConsumptionMap> {
    check_valid(prog, from)?;
    labeled_successors(prog, from)
        .into_iter()
        .find(|(p, _)| p == to)
        .map(|(_, leaf)| leaf.map(leaf_consumption).unwrap_or_default())
        .ok_or_else(|| Error::InvalidStep {
            from: from.to_string(),
            to: to.to_string(),
        })
}

/// Sum of the step consumptions along a composable path.
pub fn path_consumption(prog: &Program, path: &[(Position, Position)]) -> Result<ConsumptionMap> {
    let mut total = ConsumptionMap::zero();
    for (k, (from, to)) in path.iter().enumerate() {
        if k > 0 && path[k - 1].1 != *from {
            return Err(Error::InvalidStep {
                from: path[k - 1].1.to_string(),
                to: from.to_string(),
            });
        }
        total += step_consumption(prog, from, to)?;
    }
    Ok(total)
}

/// Consumption of the whole program, with the innermost subterm whose side
/// condition fails as the error.
fn delta(prog: &Program) -> std::result::Result<ConsumptionMap, &Program> {
    match prog {
        Program::Action(_) | Program::Lock(_) | Program::Unlock(_) => Ok(leaf_consumption(prog)),
        Program::Seq(l, r) | Program::Par(l, r) => Ok(delta(l)? + delta(r)?),
        Program::Choice(l, r) => {
            let dl = delta(l)?;
            if dl == delta(r)? {
                Ok(dl)
            } else {
                Err(prog)
            }
        }
        Program::Loop(body) => {
            if delta(body)?.is_zero() {
                Ok(ConsumptionMap::zero())
            } else {
                Err(prog)
            }
        }
    }
}

/// `Δ(P)`, or `None` where the definition's side conditions fail.
pub fn delta_program(prog: &Program) -> Option<ConsumptionMap> {
    delta(prog).ok()
}

/// Like [`delta_program`], but reports the offending subterm.
pub fn check_conservative(prog: &Program) -> Result<ConsumptionMap> {
    delta(prog).map_err(|sub| Error::NonConservative {
        subterm: sub.to_string(),
    })
}

pub fn is_conservative(prog: &Program) -> bool {
    delta(prog).is_ok()
}

fn consumption_at(prog: &Program, p: &Position) -> Result<ConsumptionMap> {
    Ok(match (prog, p) {
        (_, Position::Bot) => ConsumptionMap::zero(),
        (_, Position::Top) => check_conservative(prog)?,
        (Program::Seq(left, right), Position::Seq(p, q)) => {
            if q.is_bot() {
                consumption_at(left, p)?
            } else {
                check_conservative(left)? + consumption_at(right, q)?
            }
        }
        (Program::Choice(left, right), Position::Choice(p, q)) => {
            if q.is_bot() {
                consumption_at(left, p)?
            } else {
                consumption_at(right, q)?
            }
        }
        (Program::Par(left, right), Position::Par(p, q)) => {
            consumption_at(left, p)? + consumption_at(right, q)?
        }
        // a conservative loop body consumes nothing per iteration
        (Program::Loop(body), Position::Loop(_, p)) => consumption_at(body, p)?,
        _ => unreachable!("consumption of an invalid position"),
    })
}

/// `⟦p⟧`, the consumption of any execution from `⊥` to `p`.
pub fn position_consumption(prog: &Program, p: &Position) -> Result<ConsumptionMap> {
    check_conservative(prog)?;
    check_valid(prog, p)?;
    consumption_at(prog, p)
}

/// No mutex is held twice or released before being taken at `p`.
pub fn is_valid_state(prog: &Program, p: &Position) -> Result<bool> {
    Ok(position_consumption(prog, p)?.is_within_unit_bounds())
}
