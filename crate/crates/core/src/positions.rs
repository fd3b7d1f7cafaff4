//! Positions of a program: the points of its state space.
//!
//! A position records how far an execution has progressed through each
//! syntactic construct. Positions of a fixed program form a bounded lattice
//! whose order coincides with reachability under the one-step reduction
//! relation.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::regions::PosetContract;
use crate::syntax::Program;

/// A pre-position term. Whether it is a position of a given program is
/// decided by [`is_valid_position`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Position {
    Bot,
    Top,
    Seq(Box<Position>, Box<Position>),
    Choice(Box<Position>, Box<Position>),
    /// Inside the `n`-th iteration of a loop body.
    Loop(BigUint, Box<Position>),
    Par(Box<Position>, Box<Position>),
}

use Position::{Bot, Top};

impl Position {
    pub fn seq(p: Position, q: Position) -> Position {
        Position::Seq(Box::new(p), Box::new(q))
    }

    pub fn choice(p: Position, q: Position) -> Position {
        Position::Choice(Box::new(p), Box::new(q))
    }

    pub fn par(p: Position, q: Position) -> Position {
        Position::Par(Box::new(p), Box::new(q))
    }

    pub fn looped(n: impl Into<BigUint>, p: Position) -> Position {
        Position::Loop(n.into(), Box::new(p))
    }

    pub fn is_bot(&self) -> bool {
        matches!(self, Bot)
    }

    pub fn is_top(&self) -> bool {
        matches!(self, Top)
    }

    /// Largest loop index occurring anywhere in the term.
    pub fn max_loop_index(&self) -> Option<&BigUint> {
        match self {
            Bot | Top => None,
            Position::Loop(n, p) => Some(match p.max_loop_index() {
                Some(m) if m > n => m,
                _ => n,
            }),
            Position::Seq(p, q) | Position::Choice(p, q) | Position::Par(p, q) => {
                match (p.max_loop_index(), q.max_loop_index()) {
                    (Some(a), Some(b)) => Some(a.max(b)),
                    (a, b) => a.or(b),
                }
            }
        }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bot => f.write_str("⊥"),
            Top => f.write_str("⊤"),
            Position::Seq(p, q) => write!(f, "({p} ; {q})"),
            Position::Choice(p, q) => write!(f, "({p} + {q})"),
            Position::Par(p, q) => write!(f, "({p} || {q})"),
            Position::Loop(n, p) => write!(f, "<{p}>_{n}"),
        }
    }
}

pub fn is_valid_position(prog: &Program, p: &Position) -> bool {
    match (prog, p) {
        (_, Bot | Top) => true,
        (Program::Seq(left, right), Position::Seq(p, q)) => {
            if q.is_bot() {
                is_valid_position(left, p)
            } else {
                p.is_top() && is_valid_position(right, q)
            }
        }
        (Program::Choice(left, right), Position::Choice(p, q)) => {
            if q.is_bot() {
                is_valid_position(left, p)
            } else {
                p.is_bot() && is_valid_position(right, q)
            }
        }
        (Program::Loop(body), Position::Loop(_, p)) => is_valid_position(body, p),
        (Program::Par(left, right), Position::Par(p, q)) => {
            is_valid_position(left, p) && is_valid_position(right, q)
        }
        _ => false,
    }
}

pub(crate) fn check_valid(prog: &Program, p: &Position) -> Result<()> {
    if is_valid_position(prog, p) {
        Ok(())
    } else {
        Err(Error::InvalidPosition {
            program: prog.to_string(),
            position: p.to_string(),
        })
    }
}

/// One-step successors of a valid position, each tagged with the leaf whose
/// execution the step performs (`None` for purely structural steps).
pub(crate) fn labeled_successors<'a>(
    prog: &'a Program,
    p: &Position,
) -> Vec<(Position, Option<&'a Program>)> {
    let mut out = Vec::new();
    match (prog, p) {
        (_, Top) => {}
        (leaf, Bot) if leaf.is_leaf() => out.push((Top, Some(leaf))),
        (Program::Seq(..), Bot) => out.push((Position::seq(Bot, Bot), None)),
        (Program::Choice(..), Bot) => out.push((Position::choice(Bot, Bot), None)),
        (Program::Par(..), Bot) => out.push((Position::par(Bot, Bot), None)),
        (Program::Loop(_), Bot) => {
            out.push((Position::looped(0u32, Bot), None));
            out.push((Top, None));
        }
        (Program::Seq(left, right), Position::Seq(p, q)) => {
            if q.is_bot() {
                for (p2, l) in labeled_successors(left, p) {
                    out.push((Position::seq(p2, Bot), l));
                }
            }
            if p.is_top() {
                if q.is_top() {
                    out.push((Top, None));
                } else {
                    for (q2, l) in labeled_successors(right, q) {
                        out.push((Position::seq(Top, q2), l));
                    }
                }
            }
        }
        (Program::Choice(left, right), Position::Choice(p, q)) => {
            if q.is_bot() {
                if p.is_top() {
                    out.push((Top, None));
                } else {
                    for (p2, l) in labeled_successors(left, p) {
                        out.push((Position::choice(p2, Bot), l));
                    }
                }
            }
            if p.is_bot() {
                if q.is_top() {
                    out.push((Top, None));
                } else {
                    for (q2, l) in labeled_successors(right, q) {
                        out.push((Position::choice(Bot, q2), l));
                    }
                }
            }
        }
        (Program::Loop(body), Position::Loop(n, p)) => {
            if p.is_top() {
                out.push((Position::looped(n + 1u32, Bot), None));
                out.push((Top, None));
            } else {
                for (p2, l) in labeled_successors(body, p) {
                    out.push((Position::Loop(n.clone(), Box::new(p2)), l));
                }
            }
        }
        (Program::Par(left, right), Position::Par(p, q)) => {
            if p.is_top() && q.is_top() {
                out.push((Top, None));
            }
            for (p2, l) in labeled_successors(left, p) {
                out.push((Position::Par(Box::new(p2), q.clone()), l));
            }
            for (q2, l) in labeled_successors(right, q) {
                out.push((Position::Par(p.clone(), Box::new(q2)), l));
            }
        }
        _ => unreachable!("successors of an invalid position"),
    }
    out
}

/// The positions reachable from `p` in exactly one reduction step.
pub fn successors(prog: &Program, p: &Position) -> Result<Vec<Position>> {
    check_valid(prog, p)?;
    Ok(labeled_successors(prog, p)
        .into_iter()
        .map(|(q, _)| q)
        .collect())
}

pub(crate) fn leq(p: &Position, q: &Position) -> bool {
    match (p, q) {
        (Bot, _) | (_, Top) => true,
        (Position::Seq(a, b), Position::Seq(c, d))
        | (Position::Choice(a, b), Position::Choice(c, d))
        | (Position::Par(a, b), Position::Par(c, d)) => leq(a, c) && leq(b, d),
        (Position::Loop(m, a), Position::Loop(n, b)) => m < n || (m == n && leq(a, b)),
        _ => false,
    }
}

pub(crate) fn join(p: &Position, q: &Position) -> Position {
    match (p, q) {
        (Bot, x) | (x, Bot) => x.clone(),
        (Top, _) | (_, Top) => Top,
        (Position::Seq(a, b), Position::Seq(c, d)) => Position::seq(join(a, c), join(b, d)),
        (Position::Par(a, b), Position::Par(c, d)) => Position::par(join(a, c), join(b, d)),
        (Position::Loop(m, a), Position::Loop(n, b)) => {
            if m < n {
                q.clone()
            } else if n < m {
                p.clone()
            } else {
                Position::Loop(m.clone(), Box::new(join(a, b)))
            }
        }
        (Position::Choice(a, b), Position::Choice(c, d)) => {
            if b.is_bot() && d.is_bot() {
                Position::choice(join(a, c), Bot)
            } else if a.is_bot() && c.is_bot() {
                Position::choice(Bot, join(b, d))
            } else {
                // committed to different branches
                Top
            }
        }
        _ => unreachable!("join of positions of different programs: {p} and {q}"),
    }
}

pub(crate) fn meet(p: &Position, q: &Position) -> Position {
    match (p, q) {
        (Top, x) | (x, Top) => x.clone(),
        (Bot, _) | (_, Bot) => Bot,
        (Position::Seq(a, b), Position::Seq(c, d)) => Position::seq(meet(a, c), meet(b, d)),
        (Position::Par(a, b), Position::Par(c, d)) => Position::par(meet(a, c), meet(b, d)),
        (Position::Loop(m, a), Position::Loop(n, b)) => {
            if m < n {
                p.clone()
            } else if n < m {
                q.clone()
            } else {
                Position::Loop(m.clone(), Box::new(meet(a, b)))
            }
        }
        (Position::Choice(a, b), Position::Choice(c, d)) => {
            if b.is_bot() && d.is_bot() {
                Position::choice(meet(a, c), Bot)
            } else if a.is_bot() && c.is_bot() {
                Position::choice(Bot, meet(b, d))
            } else {
                Position::choice(Bot, Bot)
            }
        }
        _ => unreachable!("meet of positions of different programs: {p} and {q}"),
    }
}

pub fn pos_leq(prog: &Program, p: &Position, q: &Position) -> Result<bool> {
    check_valid(prog, p)?;
    check_valid(prog, q)?;
    Ok(leq(p, q))
}

pub fn pos_join(prog: &Program, p: &Position, q: &Position) -> Result<Position> {
    check_valid(prog, p)?;
    check_valid(prog, q)?;
    Ok(join(p, q))
}

pub fn pos_meet(prog: &Program, p: &Position, q: &Position) -> Result<Position> {
    check_valid(prog, p)?;
    check_valid(prog, q)?;
    Ok(meet(p, q))
}

/// Maximal positions not above `p`, by induction on the program.
///
/// Only a generating set when [`flc`] holds; below the top of a loop the
/// set of positions not above it has no maximal element at all.
pub(crate) fn lower_generators(prog: &Program, p: &Position) -> Vec<Position> {
    match (prog, p) {
        (_, Bot) => vec![],
        (leaf, Top) if leaf.is_leaf() => vec![Bot],
        (Program::Seq(..), Top) => vec![Position::seq(Top, Top)],
        (Program::Par(..), Top) => vec![Position::par(Top, Top)],
        (Program::Choice(..), Top) => {
            vec![Position::choice(Top, Bot), Position::choice(Bot, Top)]
        }
        (Program::Loop(_), Top) => vec![],
        (Program::Seq(left, right), Position::Seq(p, q)) => {
            if p.is_bot() && q.is_bot() {
                vec![Bot]
            } else if q.is_bot() {
                lower_generators(left, p)
                    .into_iter()
                    .map(|x| Position::seq(x, Bot))
                    .collect()
            } else {
                lower_generators(right, q)
                    .into_iter()
                    .map(|y| Position::seq(Top, y))
                    .collect()
            }
        }
        (Program::Choice(left, right), Position::Choice(p, q)) => {
            if p.is_bot() && q.is_bot() {
                return vec![Bot];
            }
            // Everything in the other branch is incomparable with `p`; its
            // completed execution dominates the branch-entry point.
            let (mut out, other_done) = if q.is_bot() {
                let gens = lower_generators(left, p)
                    .into_iter()
                    .filter(|x| !x.is_bot())
                    .map(|x| Position::choice(x, Bot));
                (gens.collect::<Vec<_>>(), Position::choice(Bot, Top))
            } else {
                let gens = lower_generators(right, q)
                    .into_iter()
                    .filter(|y| !y.is_bot())
                    .map(|y| Position::choice(Bot, y));
                (gens.collect::<Vec<_>>(), Position::choice(Top, Bot))
            };
            out.push(other_done);
            out
        }
        (Program::Par(left, right), Position::Par(p, q)) => {
            if p.is_bot() && q.is_bot() {
                return vec![Bot];
            }
            let mut out: Vec<Position> = lower_generators(left, p)
                .into_iter()
                .map(|x| Position::par(x, Top))
                .collect();
            out.extend(
                lower_generators(right, q)
                    .into_iter()
                    .map(|y| Position::par(Top, y)),
            );
            out
        }
        (Program::Loop(body), Position::Loop(n, p)) => {
            if p.is_bot() {
                if n.is_zero() {
                    vec![Bot]
                } else {
                    vec![Position::looped(n - BigUint::one(), Top)]
                }
            } else {
                lower_generators(body, p)
                    .into_iter()
                    .map(|x| Position::Loop(n.clone(), Box::new(x)))
                    .collect()
            }
        }
        _ => unreachable!("lower generators of an invalid position"),
    }
}

/// Minimal positions not below `p`, by induction on the program.
pub(crate) fn upper_generators(prog: &Program, p: &Position) -> Vec<Position> {
    match (prog, p) {
        (_, Top) => vec![],
        (leaf, Bot) if leaf.is_leaf() => vec![Top],
        (Program::Seq(..), Bot) => vec![Position::seq(Bot, Bot)],
        (Program::Choice(..), Bot) => vec![Position::choice(Bot, Bot)],
        (Program::Par(..), Bot) => vec![Position::par(Bot, Bot)],
        (Program::Loop(_), Bot) => vec![Position::looped(0u32, Bot)],
        (Program::Seq(left, right), Position::Seq(p, q)) => {
            if q.is_top() {
                vec![Top]
            } else if p.is_top() {
                upper_generators(right, q)
                    .into_iter()
                    .map(|y| Position::seq(Top, y))
                    .collect()
            } else {
                upper_generators(left, p)
                    .into_iter()
                    .map(|x| Position::seq(x, Bot))
                    .collect()
            }
        }
        (Program::Choice(left, right), Position::Choice(p, q)) => {
            // The other branch is entirely outside the down-set of `p`;
            // its first step is minimal there.
            let (this, other) = if q.is_bot() {
                (
                    upper_generators(left, p)
                        .into_iter()
                        .map(|x| Position::choice(x, Bot))
                        .collect::<Vec<_>>(),
                    upper_generators(right, &Bot)
                        .into_iter()
                        .map(|y| Position::choice(Bot, y))
                        .collect::<Vec<_>>(),
                )
            } else {
                (
                    upper_generators(right, q)
                        .into_iter()
                        .map(|y| Position::choice(Bot, y))
                        .collect(),
                    upper_generators(left, &Bot)
                        .into_iter()
                        .map(|x| Position::choice(x, Bot))
                        .collect(),
                )
            };
            this.into_iter().chain(other).collect()
        }
        (Program::Par(left, right), Position::Par(p, q)) => {
            if p.is_top() && q.is_top() {
                return vec![Top];
            }
            let mut out: Vec<Position> = upper_generators(left, p)
                .into_iter()
                .map(|x| Position::par(x, Bot))
                .collect();
            out.extend(
                upper_generators(right, q)
                    .into_iter()
                    .map(|y| Position::par(Bot, y)),
            );
            out
        }
        (Program::Loop(body), Position::Loop(n, p)) => {
            if p.is_top() {
                vec![Position::looped(n + 1u32, Bot)]
            } else {
                upper_generators(body, p)
                    .into_iter()
                    .map(|x| Position::Loop(n.clone(), Box::new(x)))
                    .collect()
            }
        }
        _ => unreachable!("upper generators of an invalid position"),
    }
}

/// Whether the positions not above `p` are generated by finitely many
/// maximal ones. Fails exactly when the recursion meets the top of a loop.
pub(crate) fn flc(prog: &Program, p: &Position) -> bool {
    match (prog, p) {
        (_, Bot) => true,
        (Program::Loop(_), Top) => false,
        (_, Top) => true,
        (Program::Seq(left, right), Position::Seq(p, q))
        | (Program::Choice(left, right), Position::Choice(p, q)) => {
            if q.is_bot() {
                flc(left, p)
            } else {
                flc(right, q)
            }
        }
        (Program::Par(left, right), Position::Par(p, q)) => flc(left, p) && flc(right, q),
        (Program::Loop(body), Position::Loop(_, p)) => flc(body, p),
        _ => unreachable!("finite complementation of an invalid position"),
    }
}

/// `(max{x : x ≱ p}, min{x : x ≰ p})`.
pub fn complement_generators(
    prog: &Program,
    p: &Position,
) -> Result<(Vec<Position>, Vec<Position>)> {
    check_valid(prog, p)?;
    let mut lower = lower_generators(prog, p);
    let mut upper = upper_generators(prog, p);
    lower.sort();
    upper.sort();
    Ok((lower, upper))
}

pub fn is_finitely_lower_complemented(prog: &Program, p: &Position) -> Result<bool> {
    check_valid(prog, p)?;
    Ok(flc(prog, p))
}

/// All positions of `prog` (with every loop index at most `max_iterations`),
/// listed in an order compatible with `≤`.
pub fn enumerate_positions(prog: &Program, max_iterations: Option<u64>) -> Result<Vec<Position>> {
    if max_iterations.is_none() && prog.has_loop() {
        return Err(Error::UnboundedLoop);
    }
    Ok(enumerate_bounded(prog, max_iterations.unwrap_or(0)))
}

// Each construct's inner positions are laid out so that earlier entries are
// never above later ones: sequences and loops concatenate, choices put the
// shared entry point first, products use lexicographic order.
fn enumerate_bounded(prog: &Program, bound: u64) -> Vec<Position> {
    let mut out = vec![Bot];
    match prog {
        Program::Action(_) | Program::Lock(_) | Program::Unlock(_) => {}
        Program::Seq(left, right) => {
            for p in enumerate_bounded(left, bound) {
                out.push(Position::seq(p, Bot));
            }
            for q in enumerate_bounded(right, bound).into_iter().skip(1) {
                out.push(Position::seq(Top, q));
            }
        }
        Program::Choice(left, right) => {
            for p in enumerate_bounded(left, bound) {
                out.push(Position::choice(p, Bot));
            }
            for q in enumerate_bounded(right, bound).into_iter().skip(1) {
                out.push(Position::choice(Bot, q));
            }
        }
        Program::Par(left, right) => {
            let lefts = enumerate_bounded(left, bound);
            let rights = enumerate_bounded(right, bound);
            for p in &lefts {
                for q in &rights {
                    out.push(Position::par(p.clone(), q.clone()));
                }
            }
        }
        Program::Loop(body) => {
            let inner = enumerate_bounded(body, bound);
            for n in 0..=bound {
                for p in &inner {
                    out.push(Position::looped(n, p.clone()));
                }
            }
        }
    }
    out.push(Top);
    out
}

/// The lattice of positions of one program, as a [`PosetContract`].
#[derive(Debug, Clone, Copy)]
pub struct ProgramPoset<'a> {
    program: &'a Program,
    bound: Option<u64>,
}

impl<'a> ProgramPoset<'a> {
    pub fn new(program: &'a Program) -> Self {
        ProgramPoset {
            program,
            bound: None,
        }
    }

    /// Enumeration of a loopy program restricted to loop indices `≤ bound`.
    /// Only the enumeration is truncated; the lattice operations are not.
    pub fn with_enumeration_bound(program: &'a Program, bound: u64) -> Self {
        ProgramPoset {
            program,
            bound: Some(bound),
        }
    }

    pub fn program(&self) -> &'a Program {
        self.program
    }
}

impl PosetContract for ProgramPoset<'_> {
    type Point = Position;

    fn bottom(&self) -> Position {
        Bot
    }

    fn top(&self) -> Position {
        Top
    }

    fn leq(&self, a: &Position, b: &Position) -> bool {
        leq(a, b)
    }

    fn join(&self, a: &Position, b: &Position) -> Position {
        join(a, b)
    }

    fn meet(&self, a: &Position, b: &Position) -> Position {
        meet(a, b)
    }

    fn lower_gen(&self, p: &Position) -> Vec<Position> {
        lower_generators(self.program, p)
    }

    fn upper_gen(&self, p: &Position) -> Vec<Position> {
        upper_generators(self.program, p)
    }

    fn is_flc(&self, p: &Position) -> bool {
        flc(self.program, p)
    }

    fn enumerate(&self) -> Option<Vec<Position>> {
        enumerate_positions(self.program, self.bound).ok()
    }
}

/// Positions reachable from `from` by reductions, restricted to positions
/// accepted by `keep`.
pub fn reachable_from(
    prog: &Program,
    from: &Position,
    keep: impl Fn(&Position) -> bool,
) -> Result<BTreeSet<Position>> {
    check_valid(prog, from)?;
    let mut seen = BTreeSet::new();
    let mut stack = vec![from.clone()];
    seen.insert(from.clone());
    while let Some(p) = stack.pop() {
        for (q, _) in labeled_successors(prog, &p) {
            if keep(&q) && seen.insert(q.clone()) {
                stack.push(q);
            }
        }
    }
    Ok(seen)
}
