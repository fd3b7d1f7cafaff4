//! Brute-force reference implementations shared by the integration suites.
//!
//! Everything here is built from the reduction rules alone (`successors`)
//! and from plain set comparisons, never from the order, lattice or
//! generator code under test.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, VecDeque};

use num_bigint::BigUint;
use pvspace::grid::{Grid, GridPoint};
use pvspace::positions::{successors, Position};
use pvspace::regions::{Interval, Region};
use pvspace::syntax::Program;
use rand::rngs::StdRng;
use rand::Rng;

pub const LEAVES: [&str; 6] = ["A", "B", "P(a)", "V(a)", "P(b)", "V(b)"];

fn random_leaf(rng: &mut StdRng) -> Program {
    match rng.gen_range(0..LEAVES.len()) {
        0 => Program::action("A"),
        1 => Program::action("B"),
        2 => Program::lock("a"),
        3 => Program::unlock("a"),
        4 => Program::lock("b"),
        _ => Program::unlock("b"),
    }
}

/// A random program with exactly `leaves` leaves. Loops appear only when
/// `loops` is set.
pub fn random_program_with(rng: &mut StdRng, leaves: usize, loops: bool) -> Program {
    let body = if leaves <= 1 {
        random_leaf(rng)
    } else {
        let k = rng.gen_range(1..leaves);
        let l = random_program_with(rng, k, loops);
        let r = random_program_with(rng, leaves - k, loops);
        match rng.gen_range(0..3) {
            0 => Program::seq(l, r),
            1 => Program::choice(l, r),
            _ => Program::par(l, r),
        }
    };
    if loops && rng.gen_bool(0.2) {
        Program::looped(body)
    } else {
        body
    }
}

/// At most six leaves, possibly with loops.
pub fn random_program(rng: &mut StdRng, loops: bool) -> Program {
    let leaves = rng.gen_range(1..=6);
    random_program_with(rng, leaves, loops)
}

/// Positions reachable from `⊥` with every loop index at most `bound`, and
/// the reachability relation among them. Gives up (returns `None`) past
/// `limit` positions.
pub struct Oracle {
    pub prog: Program,
    pub bound: u64,
    pub points: Vec<Position>,
    pub index: HashMap<Position, usize>,
    pub next: Vec<Vec<usize>>,
    reach: Vec<Vec<bool>>,
}

fn within(p: &Position, bound: u64) -> bool {
    p.max_loop_index()
        .is_none_or(|n| *n <= BigUint::from(bound))
}

impl Oracle {
    pub fn new(prog: &Program, bound: u64, limit: usize) -> Option<Oracle> {
        let mut points = vec![Position::Bot];
        let mut index = HashMap::new();
        index.insert(Position::Bot, 0);
        let mut next: Vec<Vec<usize>> = vec![Vec::new()];
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            let succ = successors(prog, &points[i]).expect("reachable positions are valid");
            for q in succ.into_iter().filter(|q| within(q, bound)) {
                let j = match index.get(&q) {
                    Some(&j) => j,
                    None => {
                        if points.len() >= limit {
                            return None;
                        }
                        let j = points.len();
                        index.insert(q.clone(), j);
                        points.push(q);
                        next.push(Vec::new());
                        queue.push_back(j);
                        j
                    }
                };
                next[i].push(j);
            }
        }
        let n = points.len();
        let mut reach = vec![vec![false; n]; n];
        for (s, row) in reach.iter_mut().enumerate() {
            row[s] = true;
            let mut stack = vec![s];
            while let Some(i) = stack.pop() {
                for &j in &next[i] {
                    if !row[j] {
                        row[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
        Some(Oracle {
            prog: prog.clone(),
            bound,
            points,
            index,
            next,
            reach,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn id(&self, p: &Position) -> usize {
        self.index[p]
    }

    /// `q` is reachable from `p`.
    pub fn leq(&self, p: usize, q: usize) -> bool {
        self.reach[p][q]
    }

    pub fn lub(&self, a: usize, b: usize) -> Option<usize> {
        let ups: Vec<usize> = (0..self.len())
            .filter(|&u| self.leq(a, u) && self.leq(b, u))
            .collect();
        ups.iter()
            .copied()
            .find(|&u| ups.iter().all(|&v| self.leq(u, v)))
    }

    pub fn glb(&self, a: usize, b: usize) -> Option<usize> {
        let downs: Vec<usize> = (0..self.len())
            .filter(|&d| self.leq(d, a) && self.leq(d, b))
            .collect();
        downs
            .iter()
            .copied()
            .find(|&d| downs.iter().all(|&v| self.leq(v, d)))
    }

    pub fn maximal(&self, set: &[usize]) -> BTreeSet<Position> {
        set.iter()
            .filter(|&&x| !set.iter().any(|&y| y != x && self.leq(x, y)))
            .map(|&x| self.points[x].clone())
            .collect()
    }

    pub fn minimal(&self, set: &[usize]) -> BTreeSet<Position> {
        set.iter()
            .filter(|&&x| !set.iter().any(|&y| y != x && self.leq(y, x)))
            .map(|&x| self.points[x].clone())
            .collect()
    }

    /// `max{x : x ≱ p}` inside the truncation.
    pub fn max_not_above(&self, p: usize) -> BTreeSet<Position> {
        let set: Vec<usize> = (0..self.len()).filter(|&x| !self.leq(p, x)).collect();
        self.maximal(&set)
    }

    /// `min{x : x ≰ p}` inside the truncation.
    pub fn min_not_below(&self, p: usize) -> BTreeSet<Position> {
        let set: Vec<usize> = (0..self.len()).filter(|&x| !self.leq(x, p)).collect();
        self.minimal(&set)
    }

    /// Positions whose loop indices reach the truncation bound.
    pub fn on_boundary(&self, p: &Position) -> bool {
        p.max_loop_index() == Some(&BigUint::from(self.bound))
    }

    pub fn interval_contains(&self, i: &Interval<Position>, z: usize) -> bool {
        self.leq(self.id(&i.low), z) && self.leq(z, self.id(&i.high))
    }

    pub fn support(&self, r: &Region<Position>) -> BTreeSet<Position> {
        (0..self.len())
            .filter(|&z| r.iter().any(|i| self.interval_contains(i, z)))
            .map(|z| self.points[z].clone())
            .collect()
    }

    pub fn random_region(&self, rng: &mut StdRng, max_intervals: usize) -> Region<Position> {
        let n = rng.gen_range(0..=max_intervals);
        (0..n)
            .map(|_| {
                let a = rng.gen_range(0..self.len());
                let above: Vec<usize> = (0..self.len()).filter(|&b| self.leq(a, b)).collect();
                let b = above[rng.gen_range(0..above.len())];
                Interval::new_unchecked(self.points[a].clone(), self.points[b].clone())
            })
            .collect()
    }

    /// Every maximal path from `⊥` to `⊤`, as lists of steps.
    pub fn total_executions(&self) -> Vec<Vec<(Position, Position)>> {
        let top = self.id(&Position::Top);
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.walk(0, top, &mut path, &mut out);
        out
    }

    fn walk(
        &self,
        at: usize,
        top: usize,
        path: &mut Vec<(Position, Position)>,
        out: &mut Vec<Vec<(Position, Position)>>,
    ) {
        if at == top {
            out.push(path.clone());
            return;
        }
        for &j in &self.next[at] {
            path.push((self.points[at].clone(), self.points[j].clone()));
            self.walk(j, top, path, out);
            path.pop();
        }
    }
}

/// A random run from `⊥` to `⊤`.
pub fn random_execution(prog: &Program, rng: &mut StdRng) -> Vec<(Position, Position)> {
    let mut at = Position::Bot;
    let mut path = Vec::new();
    while !at.is_top() {
        let succ = successors(prog, &at).expect("valid position");
        let q = succ[rng.gen_range(0..succ.len())].clone();
        path.push((at, q.clone()));
        at = q;
    }
    path
}

pub fn random_grid(rng: &mut StdRng) -> Grid {
    let dim = rng.gen_range(1..=3);
    Grid::new((0..dim).map(|_| rng.gen_range(0..=5)).collect()).unwrap()
}

pub fn grid_leq(a: &GridPoint, b: &GridPoint) -> bool {
    a.coords().iter().zip(b.coords()).all(|(x, y)| x <= y)
}

pub fn all_grid_points(g: &Grid) -> Vec<GridPoint> {
    let mut out = vec![Vec::new()];
    for &b in g.bounds() {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=b).map(move |c| {
                    let mut v = prefix.clone();
                    v.push(c);
                    v
                })
            })
            .collect();
    }
    out.into_iter().map(GridPoint::new).collect()
}

pub fn random_grid_interval(g: &Grid, rng: &mut StdRng) -> Interval<GridPoint> {
    let (lo, hi): (Vec<u32>, Vec<u32>) = g
        .bounds()
        .iter()
        .map(|&b| {
            let x = rng.gen_range(0..=b);
            let y = rng.gen_range(x..=b);
            (x, y)
        })
        .unzip();
    Interval::new_unchecked(GridPoint::new(lo), GridPoint::new(hi))
}

pub fn random_grid_region(g: &Grid, rng: &mut StdRng, max_intervals: usize) -> Region<GridPoint> {
    let n = rng.gen_range(0..=max_intervals);
    (0..n).map(|_| random_grid_interval(g, rng)).collect()
}

pub fn grid_support(g: &Grid, r: &Region<GridPoint>) -> BTreeSet<GridPoint> {
    all_grid_points(g)
        .into_iter()
        .filter(|z| {
            r.iter()
                .any(|i| grid_leq(&i.low, z) && grid_leq(z, &i.high))
        })
        .collect()
}

/// Index pairs `(a, b)` of the ⊆-maximal intervals `[a, b]` contained in
/// `inside`, over an `n`-element poset.
pub fn maximal_intervals(
    n: usize,
    leq: impl Fn(usize, usize) -> bool,
    inside: &[bool],
) -> Vec<(usize, usize)> {
    let mut boxes = Vec::new();
    for a in (0..n).filter(|&a| inside[a]) {
        for b in (0..n).filter(|&b| inside[b] && leq(a, b)) {
            if (0..n).all(|z| inside[z] || !(leq(a, z) && leq(z, b))) {
                boxes.push((a, b));
            }
        }
    }
    boxes
        .iter()
        .copied()
        .filter(|&(a, b)| {
            !boxes
                .iter()
                .any(|&(c, d)| (c, d) != (a, b) && leq(c, a) && leq(b, d))
        })
        .collect()
}
