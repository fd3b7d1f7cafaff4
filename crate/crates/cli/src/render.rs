use std::collections::BTreeSet;
use std::fmt::Write as _;

use pvspace::positions::{Position, ProgramPoset};
use pvspace::regions::region_member;
use pvspace::statespace::analyze;
use pvspace::syntax::{print_program, Program};
use pvspace::Error;
use serde_json::{json, Value};

/// Two-thread state space projected onto action counts: cell `(i, j)` stands
/// for every position where thread 1 has run `i` actions and thread 2 `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedGrid {
    pub columns: Vec<String>,
    pub rows: Vec<String>,
    pub forbidden: BTreeSet<(usize, usize)>,
    pub deadlocks: BTreeSet<(usize, usize)>,
}

fn actions(p: &Program, out: &mut Vec<String>) -> bool {
    match p {
        Program::Seq(l, r) => actions(l, out) && actions(r, out),
        leaf if leaf.is_leaf() => {
            out.push(print_program(leaf));
            true
        }
        _ => false,
    }
}

fn leaf_count(p: &Program) -> usize {
    match p {
        Program::Seq(l, r) => leaf_count(l) + leaf_count(r),
        _ => 1,
    }
}

fn done(p: &Program, pos: &Position) -> usize {
    match (p, pos) {
        (_, Position::Bot) => 0,
        (_, Position::Top) => leaf_count(p),
        (Program::Seq(l, r), Position::Seq(x, y)) => done(l, x) + done(r, y),
        _ => unreachable!("positions of an action sequence"),
    }
}

/// Projects the forbidden region and deadlocks of `T₁ || T₂`, where both
/// threads are sequences of actions.
pub fn render(prog: &Program) -> Result<RenderedGrid, Error> {
    let (mut columns, mut rows) = (Vec::new(), Vec::new());
    let (left, right) = match prog {
        Program::Par(l, r) if actions(l, &mut columns) && actions(r, &mut rows) => (l, r),
        _ => {
            return Err(Error::UnsupportedShape(format!(
                "render needs two action sequences in parallel, got {prog}"
            )))
        }
    };
    let a = analyze(prog, None)?;
    let ctx = ProgramPoset::new(prog);
    let cell = |p: &Position| match p {
        Position::Par(x, y) => Some((done(left, x), done(right, y))),
        Position::Top => Some((columns.len(), rows.len())),
        _ => None,
    };
    let mut forbidden = BTreeSet::new();
    let mut deadlocks = BTreeSet::new();
    for (p, _) in a.graph.vertices() {
        let Some(c) = cell(p) else { continue };
        if region_member(&ctx, &a.forbidden, p) {
            forbidden.insert(c);
        }
        if a.deadlocks.contains(p) {
            deadlocks.insert(c);
        }
    }
    Ok(RenderedGrid {
        columns,
        rows,
        forbidden,
        deadlocks,
    })
}

impl RenderedGrid {
    pub fn to_json(&self) -> Value {
        let cells = |s: &BTreeSet<(usize, usize)>| -> Value {
            s.iter().map(|&(i, j)| json!([i, j])).collect()
        };
        json!({
            "thread1": self.columns,
            "thread2": self.rows,
            "forbidden": cells(&self.forbidden),
            "deadlocks": cells(&self.deadlocks),
        })
    }

    /// Thread 1 runs left to right, thread 2 bottom to top. `#` marks
    /// forbidden cells and `D` deadlocks.
    pub fn to_text(&self) -> String {
        let (n, m) = (self.columns.len(), self.rows.len());
        let w = n.max(m).to_string().len();
        let mut s = String::new();
        for (name, acts) in [("thread 1", &self.columns), ("thread 2", &self.rows)] {
            let listed: Vec<String> = acts
                .iter()
                .enumerate()
                .map(|(k, a)| format!("{} {a}", k + 1))
                .collect();
            let _ = writeln!(s, "{name}: {}", listed.join("  "));
        }
        for j in (0..=m).rev() {
            let _ = write!(s, "{j:>w$} |");
            for i in 0..=n {
                let mark = if self.deadlocks.contains(&(i, j)) {
                    'D'
                } else if self.forbidden.contains(&(i, j)) {
                    '#'
                } else {
                    '.'
                };
                let _ = write!(s, " {mark:>w$}");
            }
            s.push('\n');
        }
        let _ = writeln!(s, "{:w$} +{}", "", "-".repeat((n + 1) * (w + 1)));
        let _ = write!(s, "{:w$}  ", "");
        let labels: Vec<String> = (0..=n).map(|i| format!("{i:>w$}")).collect();
        let _ = writeln!(s, "{}", labels.join(" "));
        s.push_str("# forbidden, D deadlock\n");
        s
    }
}
