//! State graphs of conservative programs, forbidden and fundamental regions,
//! deadlocks and execution validity.
//!
//! Programs with loops are analyzed through [`unroll_loops`]: the result
//! describes at most `k` iterations of every loop.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::positions::{
    check_valid, enumerate_positions, labeled_successors, Position, ProgramPoset,
};
use crate::regions::{region_complement, Interval, Region};
use crate::resources::{
    check_conservative, position_consumption, step_consumption, ConsumptionMap,
};
use crate::syntax::Program;

/// Reachability graph of all positions, each flagged valid or invalid.
#[derive(Debug, Clone)]
pub struct StateGraph {
    program: Program,
    vertices: Vec<Position>,
    valid: Vec<bool>,
    index: BTreeMap<Position, usize>,
    edges: Vec<(usize, usize)>,
}

impl StateGraph {
    /// The (loop-free) program the graph was built from.
    pub fn program(&self) -> &Program {
        &self.program
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = (&Position, bool)> {
        self.vertices.iter().zip(self.valid.iter().copied())
    }

    /// Edges with their validity flag (both endpoints valid).
    pub fn edges(&self) -> impl Iterator<Item = (&Position, &Position, bool)> {
        self.edges.iter().map(|&(a, b)| {
            (
                &self.vertices[a],
                &self.vertices[b],
                self.valid[a] && self.valid[b],
            )
        })
    }

    pub fn is_valid(&self, p: &Position) -> Option<bool> {
        self.index.get(p).map(|&i| self.valid[i])
    }

    pub fn invalid_positions(&self) -> impl Iterator<Item = &Position> {
        self.vertices().filter(|(_, ok)| !ok).map(|(p, _)| p)
    }

    /// Edges surviving pruning.
    pub fn pruned_edges(&self) -> impl Iterator<Item = (&Position, &Position)> {
        self.edges().filter(|e| e.2).map(|(a, b, _)| (a, b))
    }

    /// Vertices that keep at least one incident edge after pruning.
    pub fn pruned_vertices(&self) -> BTreeSet<&Position> {
        self.pruned_edges().flat_map(|(a, b)| [a, b]).collect()
    }

    fn outgoing(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.vertices.len()];
        for &(a, b) in &self.edges {
            out[a].push(b);
        }
        out
    }

    /// Positions reachable from `⊥` along pruned edges.
    pub fn pruned_reachable(&self) -> BTreeSet<&Position> {
        let out = self.outgoing();
        let start = self.index[&Position::Bot];
        let mut seen = vec![false; self.vertices.len()];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(i) = queue.pop_front() {
            for &j in &out[i] {
                if self.valid[i] && self.valid[j] && !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        (0..self.vertices.len())
            .filter(|&i| seen[i])
            .map(|i| &self.vertices[i])
            .collect()
    }
}

/// Checks conservativity and removes loops, unrolling them `max_iterations`
/// times. Returns the program to analyze and the unroll depth used, if any.
pub fn prepare_program(
    prog: &Program,
    max_iterations: Option<u64>,
) -> Result<(Program, Option<u64>)> {
    check_conservative(prog)?;
    if !prog.has_loop() {
        return Ok((prog.clone(), None));
    }
    let k = max_iterations.ok_or(Error::UnboundedLoop)?;
    Ok((unroll_loops(prog, k), Some(k)))
}

pub fn build_state_graph(prog: &Program, max_iterations: Option<u64>) -> Result<StateGraph> {
    let (program, _) = prepare_program(prog, max_iterations)?;
    graph_of_loop_free(program)
}

fn graph_of_loop_free(program: Program) -> Result<StateGraph> {
    let vertices = enumerate_positions(&program, None)?;
    let index: BTreeMap<Position, usize> = vertices
        .iter()
        .enumerate()
        .map(|(i, p)| (p.clone(), i))
        .collect();
    let valid = vertices
        .iter()
        .map(|p| Ok(position_consumption(&program, p)?.is_within_unit_bounds()))
        .collect::<Result<Vec<bool>>>()?;
    let mut edges = Vec::new();
    for (i, p) in vertices.iter().enumerate() {
        for (q, _) in labeled_successors(&program, p) {
            edges.push((i, index[&q]));
        }
    }
    Ok(StateGraph {
        program,
        vertices,
        valid,
        index,
        edges,
    })
}

fn forbidden_and_fundamental(graph: &StateGraph) -> Result<(Region<Position>, Region<Position>)> {
    let ctx = ProgramPoset::new(&graph.program);
    let seeds: Region<Position> = graph
        .invalid_positions()
        .map(|p| Interval::point(p.clone()))
        .collect();
    // ∁ already yields maximal intervals, so both results are normal forms.
    let fundamental = region_complement(&ctx, &seeds)?;
    let forbidden = region_complement(&ctx, &fundamental)?;
    Ok((forbidden, fundamental))
}

fn deadlocks_of(graph: &StateGraph) -> BTreeSet<Position> {
    let out = graph.outgoing();
    graph
        .pruned_reachable()
        .into_iter()
        .filter(|p| !p.is_top())
        .filter(|p| {
            let i = graph.index[*p];
            graph.valid[i] && out[i].iter().all(|&j| !graph.valid[j])
        })
        .cloned()
        .collect()
}

/// Normal-form region of invalid positions.
pub fn forbidden_region(prog: &Program, max_iterations: Option<u64>) -> Result<Region<Position>> {
    Ok(forbidden_and_fundamental(&build_state_graph(prog, max_iterations)?)?.0)
}

/// Normal-form region of valid positions.
pub fn fundamental_region(prog: &Program, max_iterations: Option<u64>) -> Result<Region<Position>> {
    Ok(forbidden_and_fundamental(&build_state_graph(prog, max_iterations)?)?.1)
}

/// Reachable valid non-final positions from which no valid step exists.
pub fn find_deadlocks(prog: &Program, max_iterations: Option<u64>) -> Result<BTreeSet<Position>> {
    Ok(deadlocks_of(&build_state_graph(prog, max_iterations)?))
}

/// Whether every prefix of a global execution keeps each mutex count in
/// `[0, 1]`.
pub fn validate_execution(prog: &Program, path: &[(Position, Position)]) -> Result<bool> {
    let Some((first, _)) = path.first() else {
        return Ok(true);
    };
    if !first.is_bot() {
        return Err(Error::InvalidStep {
            from: Position::Bot.to_string(),
            to: first.to_string(),
        });
    }
    let mut running = ConsumptionMap::zero();
    let mut ok = true;
    for (k, (from, to)) in path.iter().enumerate() {
        if k > 0 && path[k - 1].1 != *from {
            return Err(Error::InvalidStep {
                from: path[k - 1].1.to_string(),
                to: from.to_string(),
            });
        }
        check_valid(prog, from)?;
        running += step_consumption(prog, from, to)?;
        ok &= running.is_within_unit_bounds();
    }
    Ok(ok)
}

fn fresh_skip_name(prog: &Program) -> String {
    let used = prog.action_names();
    std::iter::once("skip".to_string())
        .chain((1..).map(|i| format!("skip_{i}")))
        .find(|name| !used.contains(name))
        .expect("infinitely many candidates")
}

/// Replace every loop by an explicit choice between stopping and running
/// one more iteration, at most `k` times. Loop-free programs are returned
/// unchanged.
pub fn unroll_loops(prog: &Program, k: u64) -> Program {
    if !prog.has_loop() {
        return prog.clone();
    }
    let skip = fresh_skip_name(prog);
    unroll_with(prog, k, &skip)
}

fn unroll_with(prog: &Program, k: u64, skip: &str) -> Program {
    match prog {
        Program::Action(_) | Program::Lock(_) | Program::Unlock(_) => prog.clone(),
        Program::Seq(l, r) => Program::seq(unroll_with(l, k, skip), unroll_with(r, k, skip)),
        Program::Choice(l, r) => Program::choice(unroll_with(l, k, skip), unroll_with(r, k, skip)),
        Program::Par(l, r) => Program::par(unroll_with(l, k, skip), unroll_with(r, k, skip)),
        Program::Loop(body) => {
            let body = unroll_with(body, k, skip);
            if k == 0 {
                return Program::action(skip);
            }
            let mut acc = Program::choice(Program::action(skip), body.clone());
            for _ in 1..k {
                acc = Program::choice(Program::action(skip), Program::seq(body.clone(), acc));
            }
            acc
        }
    }
}

/// Everything the CLI reports about one program.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub program: Program,
    pub unroll: Option<u64>,
    pub delta: ConsumptionMap,
    pub graph: StateGraph,
    pub forbidden: Region<Position>,
    pub fundamental: Region<Position>,
    pub deadlocks: BTreeSet<Position>,
}

pub fn analyze(prog: &Program, max_iterations: Option<u64>) -> Result<Analysis> {
    let delta = check_conservative(prog)?;
    let (program, unroll) = prepare_program(prog, max_iterations)?;
    let graph = graph_of_loop_free(program.clone())?;
    let (forbidden, fundamental) = forbidden_and_fundamental(&graph)?;
    let deadlocks = deadlocks_of(&graph);
    Ok(Analysis {
        program,
        unroll,
        delta,
        graph,
        forbidden,
        fundamental,
        deadlocks,
    })
}
