//! Intervals and finite regions over a bounded lattice, with the boolean
//! operations and normal forms.
//!
//! Everything here is generic over [`PosetContract`], which is implemented
//! both by integer grids and by the positions of a program.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::Hash;

use crate::error::{Error, Result};

/// A bounded lattice together with generators of point complements.
pub trait PosetContract {
    type Point: Clone + Ord + Hash + fmt::Debug + fmt::Display;

    fn bottom(&self) -> Self::Point;
    fn top(&self) -> Self::Point;
    fn leq(&self, a: &Self::Point, b: &Self::Point) -> bool;
    fn join(&self, a: &Self::Point, b: &Self::Point) -> Self::Point;
    fn meet(&self, a: &Self::Point, b: &Self::Point) -> Self::Point;

    /// `max{x : x ≱ p}`.
    fn lower_gen(&self, p: &Self::Point) -> Vec<Self::Point>;

    /// `min{x : x ≰ p}`.
    fn upper_gen(&self, p: &Self::Point) -> Vec<Self::Point>;

    /// Whether `{x : x ≱ p}` is the down-closure of [`lower_gen`](Self::lower_gen).
    fn is_flc(&self, p: &Self::Point) -> bool;

    /// Every point, when there are finitely many.
    fn enumerate(&self) -> Option<Vec<Self::Point>> {
        None
    }
}

/// A closed interval `[low, high]` with `low ≤ high`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval<T> {
    pub low: T,
    pub high: T,
}

impl<T: fmt::Display> fmt::Display for Interval<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.low, self.high)
    }
}

impl<T> Interval<T> {
    pub fn new<C>(ctx: &C, low: T, high: T) -> Result<Self>
    where
        C: PosetContract<Point = T>,
        T: fmt::Display,
    {
        if !ctx.leq(&low, &high) {
            return Err(Error::InvalidInterval {
                low: low.to_string(),
                high: high.to_string(),
            });
        }
        Ok(Interval { low, high })
    }

    /// Skips the `low ≤ high` check.
    pub fn new_unchecked(low: T, high: T) -> Self {
        Interval { low, high }
    }

    pub fn point(p: T) -> Self
    where
        T: Clone,
    {
        Interval {
            low: p.clone(),
            high: p,
        }
    }
}

/// A finite set of intervals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Region<T: Ord> {
    intervals: BTreeSet<Interval<T>>,
}

impl<T: Ord> Default for Region<T> {
    fn default() -> Self {
        Region {
            intervals: BTreeSet::new(),
        }
    }
}

impl<T: Ord> Region<T> {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Interval<T>> {
        self.intervals.iter()
    }

    pub fn contains_interval(&self, i: &Interval<T>) -> bool {
        self.intervals.contains(i)
    }

    pub fn insert(&mut self, i: Interval<T>) -> bool {
        self.intervals.insert(i)
    }
}

impl<T: Ord> FromIterator<Interval<T>> for Region<T> {
    fn from_iter<I: IntoIterator<Item = Interval<T>>>(iter: I) -> Self {
        Region {
            intervals: iter.into_iter().collect(),
        }
    }
}

impl<T: Ord> IntoIterator for Region<T> {
    type Item = Interval<T>;
    type IntoIter = std::collections::btree_set::IntoIter<Interval<T>>;

    fn into_iter(self) -> Self::IntoIter {
        self.intervals.into_iter()
    }
}

impl<'a, T: Ord> IntoIterator for &'a Region<T> {
    type Item = &'a Interval<T>;
    type IntoIter = std::collections::btree_set::Iter<'a, Interval<T>>;

    fn into_iter(self) -> Self::IntoIter {
        self.intervals.iter()
    }
}

impl<T: Ord + fmt::Display> fmt::Display for Region<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, interval) in self.intervals.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{interval}")?;
        }
        f.write_str("}")
    }
}

pub fn interval_contains<C: PosetContract>(ctx: &C, i: &Interval<C::Point>, z: &C::Point) -> bool {
    ctx.leq(&i.low, z) && ctx.leq(z, &i.high)
}

/// `I ⊆ J` on supports.
pub fn interval_subset<C: PosetContract>(
    ctx: &C,
    i: &Interval<C::Point>,
    j: &Interval<C::Point>,
) -> bool {
    ctx.leq(&j.low, &i.low) && ctx.leq(&i.high, &j.high)
}

/// `(x∨x′, y∧y′)` when non-empty.
pub fn interval_intersection<C: PosetContract>(
    ctx: &C,
    i: &Interval<C::Point>,
    j: &Interval<C::Point>,
) -> Option<Interval<C::Point>> {
    let low = ctx.join(&i.low, &j.low);
    let high = ctx.meet(&i.high, &j.high);
    ctx.leq(&low, &high).then_some(Interval { low, high })
}

pub fn region_member<C: PosetContract>(ctx: &C, r: &Region<C::Point>, z: &C::Point) -> bool {
    r.iter().any(|i| interval_contains(ctx, i, z))
}

/// `R ⪯ S`: every interval of `R` lies inside some interval of `S`.
pub fn region_preceq<C: PosetContract>(
    ctx: &C,
    r: &Region<C::Point>,
    s: &Region<C::Point>,
) -> bool {
    r.iter()
        .all(|i| s.iter().any(|j| interval_subset(ctx, i, j)))
}

/// `R ≤ S`: `R ⪯ S`, and if also `S ⪯ R` then every interval of `S` is in `R`.
pub fn region_leq<C: PosetContract>(ctx: &C, r: &Region<C::Point>, s: &Region<C::Point>) -> bool {
    region_preceq(ctx, r, s)
        && (!region_preceq(ctx, s, r) || s.iter().all(|j| r.contains_interval(j)))
}

pub fn region_union<T: Ord + Clone>(r: &Region<T>, s: &Region<T>) -> Region<T> {
    r.iter().chain(s.iter()).cloned().collect()
}

pub fn region_intersection<C: PosetContract>(
    ctx: &C,
    r: &Region<C::Point>,
    s: &Region<C::Point>,
) -> Region<C::Point> {
    r.iter()
        .flat_map(|i| {
            s.iter()
                .filter_map(move |j| interval_intersection(ctx, i, j))
        })
        .collect()
}

/// Keep only the intervals not strictly contained in another one.
pub fn max_filter<C: PosetContract>(ctx: &C, r: &Region<C::Point>) -> Region<C::Point> {
    let all: Vec<&Interval<C::Point>> = r.iter().collect();
    all.iter()
        .enumerate()
        .filter(|&(k, i)| {
            !all.iter()
                .enumerate()
                .any(|(m, j)| m != k && interval_subset(ctx, i, j))
        })
        .map(|(_, i)| (*i).clone())
        .collect()
}

/// Complement of a single interval `(x, y)`: everything not above `x` or not
/// below `y`.
fn interval_complement<C: PosetContract>(
    ctx: &C,
    i: &Interval<C::Point>,
) -> Result<Region<C::Point>> {
    if !ctx.is_flc(&i.low) {
        return Err(Error::NotFinitelyComplemented(i.to_string()));
    }
    let bottom = ctx.bottom();
    let top = ctx.top();
    let below = ctx.lower_gen(&i.low).into_iter().map(|y| Interval {
        low: bottom.clone(),
        high: y,
    });
    let above = ctx.upper_gen(&i.high).into_iter().map(|x| Interval {
        low: x,
        high: top.clone(),
    });
    Ok(below.chain(above).collect())
}

/// The region whose support is the complement of `[R]`, returned with only
/// its maximal intervals (which makes it the normal form of that support).
///
/// Fails eagerly when some interval's low endpoint is not finitely lower
/// complemented.
pub fn region_complement<C: PosetContract>(
    ctx: &C,
    r: &Region<C::Point>,
) -> Result<Region<C::Point>> {
    let pieces = r
        .iter()
        .map(|i| interval_complement(ctx, i))
        .collect::<Result<Vec<_>>>()?;
    let mut acc: Region<C::Point> = std::iter::once(Interval {
        low: ctx.bottom(),
        high: ctx.top(),
    })
    .collect();
    for piece in &pieces {
        acc = max_filter(ctx, &region_intersection(ctx, &acc, piece));
        if acc.is_empty() {
            break;
        }
    }
    Ok(acc)
}

/// Normal form: the set of all maximal intervals inside `[R]`, obtained as
/// the maximal intervals of the double complement.
pub fn region_normalize<C: PosetContract>(
    ctx: &C,
    r: &Region<C::Point>,
) -> Result<Region<C::Point>> {
    let once = region_complement(ctx, r)?;
    region_complement(ctx, &once)
}

/// Same support, decided by comparing normal forms.
pub fn region_equiv<C: PosetContract>(
    ctx: &C,
    r: &Region<C::Point>,
    s: &Region<C::Point>,
) -> Result<bool> {
    Ok(region_normalize(ctx, r)? == region_normalize(ctx, s)?)
}

/// Reference normal form of an explicit point set, by exhaustive search over
/// all intervals of an enumerable lattice. Returns `None` when the lattice
/// cannot be enumerated.
pub fn brute_force_normal<C: PosetContract>(
    ctx: &C,
    y: &BTreeSet<C::Point>,
) -> Option<Region<C::Point>> {
    let points = ctx.enumerate()?;
    let n = points.len();
    let leq: Vec<Vec<bool>> = points
        .iter()
        .map(|a| points.iter().map(|b| ctx.leq(a, b)).collect())
        .collect();
    let inside: Vec<bool> = points.iter().map(|p| y.contains(p)).collect();

    let mut candidates = Vec::new();
    for a in 0..n {
        if !inside[a] {
            continue;
        }
        for b in 0..n {
            if !inside[b] || !leq[a][b] {
                continue;
            }
            if (0..n).all(|z| !(leq[a][z] && leq[z][b]) || inside[z]) {
                candidates.push((a, b));
            }
        }
    }
    let maximal = candidates.iter().filter(|&&(a, b)| {
        !candidates
            .iter()
            .any(|&(c, d)| (c, d) != (a, b) && leq[c][a] && leq[b][d])
    });
    Some(
        maximal
            .map(|&(a, b)| Interval {
                low: points[a].clone(),
                high: points[b].clone(),
            })
            .collect(),
    )
}

/// Support of a region, for enumerable lattices.
pub fn region_support<C: PosetContract>(
    ctx: &C,
    r: &Region<C::Point>,
) -> Option<BTreeSet<C::Point>> {
    Some(
        ctx.enumerate()?
            .into_iter()
            .filter(|z| region_member(ctx, r, z))
            .collect(),
    )
}
