//! Finite products of chains `[0, n₁] × … × [0, n_d]` with the componentwise
//! order.

use std::fmt;

use crate::error::{Error, Result};
use crate::regions::PosetContract;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridPoint(pub Vec<u32>);

impl GridPoint {
    pub fn new(coords: Vec<u32>) -> Self {
        GridPoint(coords)
    }

    pub fn coords(&self) -> &[u32] {
        &self.0
    }
}

impl fmt::Display for GridPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    bounds: Vec<u32>,
}

impl Grid {
    pub fn new(bounds: Vec<u32>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::InvalidGrid("no dimensions".into()));
        }
        Ok(Grid { bounds })
    }

    pub fn bounds(&self) -> &[u32] {
        &self.bounds
    }

    pub fn dimension(&self) -> usize {
        self.bounds.len()
    }

    pub fn contains(&self, p: &GridPoint) -> bool {
        p.0.len() == self.bounds.len() && p.0.iter().zip(&self.bounds).all(|(c, b)| c <= b)
    }

    pub fn point(&self, coords: Vec<u32>) -> Result<GridPoint> {
        let p = GridPoint(coords);
        if self.contains(&p) {
            Ok(p)
        } else {
            Err(Error::InvalidGrid(format!(
                "{p} lies outside the grid {:?}",
                self.bounds
            )))
        }
    }

    fn zip_with(&self, a: &GridPoint, b: &GridPoint, f: fn(u32, u32) -> u32) -> GridPoint {
        GridPoint(a.0.iter().zip(&b.0).map(|(&x, &y)| f(x, y)).collect())
    }
}

impl PosetContract for Grid {
    type Point = GridPoint;

    fn bottom(&self) -> GridPoint {
        GridPoint(vec![0; self.bounds.len()])
    }

    fn top(&self) -> GridPoint {
        GridPoint(self.bounds.clone())
    }

    fn leq(&self, a: &GridPoint, b: &GridPoint) -> bool {
        a.0.iter().zip(&b.0).all(|(x, y)| x <= y)
    }

    fn join(&self, a: &GridPoint, b: &GridPoint) -> GridPoint {
        self.zip_with(a, b, u32::max)
    }

    fn meet(&self, a: &GridPoint, b: &GridPoint) -> GridPoint {
        self.zip_with(a, b, u32::min)
    }

    // x ≱ p iff some coordinate of x is below p's; the largest such points
    // drop one axis by one and saturate the rest.
    fn lower_gen(&self, p: &GridPoint) -> Vec<GridPoint> {
        (0..self.bounds.len())
            .filter(|&i| p.0[i] > 0)
            .map(|i| {
                let mut c = self.bounds.clone();
                c[i] = p.0[i] - 1;
                GridPoint(c)
            })
            .collect()
    }

    fn upper_gen(&self, p: &GridPoint) -> Vec<GridPoint> {
        (0..self.bounds.len())
            .filter(|&i| p.0[i] < self.bounds[i])
            .map(|i| {
                let mut c = vec![0; self.bounds.len()];
                c[i] = p.0[i] + 1;
                GridPoint(c)
            })
            .collect()
    }

    fn is_flc(&self, _p: &GridPoint) -> bool {
        true
    }

    fn enumerate(&self) -> Option<Vec<GridPoint>> {
        let mut out = vec![Vec::with_capacity(self.bounds.len())];
        for &b in &self.bounds {
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<u32>| {
                    (0..=b).map(move |c| {
                        let mut v = prefix.clone();
                        v.push(c);
                        v
                    })
                })
                .collect();
        }
        Some(out.into_iter().map(GridPoint).collect())
    }
}

/// Convenience constructor for [`Grid::new`].
pub fn make_grid(bounds: Vec<u32>) -> Result<Grid> {
    Grid::new(bounds)
}
