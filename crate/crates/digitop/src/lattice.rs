//! Points of the integer lattice, `c_u` adjacency relations, and finite
//! digital images.
//!
//! A digital image is a finite set of lattice points together with an
//! adjacency relation; everything else in the crate (paths, homotopies,
//! censuses, searches) is defined on top of the graph this pair induces.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest supported dimension of the ambient lattice.
pub const MAX_DIM: usize = 16;

/// A point of `Z^n`, ordered lexicographically by coordinates.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<i64>);

impl Point {
    pub fn new(coords: Vec<i64>) -> Self {
        Point(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }
}

impl From<Vec<i64>> for Point {
    fn from(coords: Vec<i64>) -> Self {
        Point(coords)
    }
}

impl From<&[i64]> for Point {
    fn from(coords: &[i64]) -> Self {
        Point(coords.to_vec())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// The relation `c_u` on `Z^n`: two distinct points are adjacent when at
/// most `u` coordinates differ, each of those by exactly one.
///
/// Small dimensions have conventional names: `c_1` on `Z` is "2"; `c_1`,
/// `c_2` on `Z^2` are "4" and "8"; `c_1`, `c_2`, `c_3` on `Z^3` are "6",
/// "18" and "26".
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Adjacency {
    n: usize,
    u: usize,
}

impl Adjacency {
    pub fn new(n: usize, u: usize) -> Result<Self> {
        if n == 0 || n > MAX_DIM {
            return Err(Error::InvalidAdjacency(format!(
                "dimension {n} out of range 1..={MAX_DIM}"
            )));
        }
        if u == 0 || u > n {
            return Err(Error::InvalidAdjacency(format!(
                "c_{u} is undefined on Z^{n}"
            )));
        }
        Ok(Adjacency { n, u })
    }

    /// Resolves a conventional name ("2", "4", "8", "6", "18", "26").
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "2" => Adjacency::new(1, 1),
            "4" => Adjacency::new(2, 1),
            "8" => Adjacency::new(2, 2),
            "6" => Adjacency::new(3, 1),
            "18" => Adjacency::new(3, 2),
            "26" => Adjacency::new(3, 3),
            other => Err(Error::InvalidAdjacency(format!("unknown name {other:?}"))),
        }
    }

    /// The conventional name, when one exists.
    pub fn name(&self) -> Option<&'static str> {
        match (self.n, self.u) {
            (1, 1) => Some("2"),
            (2, 1) => Some("4"),
            (2, 2) => Some("8"),
            (3, 1) => Some("6"),
            (3, 2) => Some("18"),
            (3, 3) => Some("26"),
            _ => None,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn u(&self) -> usize {
        self.u
    }

    /// Whether `x` and `y` are adjacent. Points of the wrong dimension are
    /// never adjacent to anything.
    pub fn adjacent(&self, x: &Point, y: &Point) -> bool {
        if x.dim() != self.n || y.dim() != self.n {
            return false;
        }
        let mut changed = 0usize;
        for (a, b) in x.coords().iter().zip(y.coords()) {
            match (a - b).abs() {
                0 => {}
                1 => changed += 1,
                _ => return false,
            }
        }
        changed >= 1 && changed <= self.u
    }

    /// Whether `x` and `y` are equal or adjacent (written `x ⟷= y`).
    pub fn adjacent_or_equal(&self, x: &Point, y: &Point) -> bool {
        x == y || self.adjacent(x, y)
    }

    /// All lattice points adjacent to `x` in `Z^n`, in lexicographic order;
    /// with `closed` the point itself is included.
    pub fn ambient_neighborhood(&self, x: &Point, closed: bool) -> Vec<Point> {
        let mut out = Vec::new();
        let mut delta = vec![0i64; self.n];
        self.walk_deltas(x, &mut delta, 0, 0, closed, &mut out);
        out
    }

    fn walk_deltas(
        &self,
        x: &Point,
        delta: &mut Vec<i64>,
        coord: usize,
        nonzero: usize,
        closed: bool,
        out: &mut Vec<Point>,
    ) {
        if coord == self.n {
            if nonzero >= 1 || closed {
                let p = Point::new(
                    x.coords()
                        .iter()
                        .zip(delta.iter())
                        .map(|(c, d)| c + d)
                        .collect(),
                );
                out.push(p);
            }
            return;
        }
        for d in [-1i64, 0, 1] {
            let next_nonzero = nonzero + usize::from(d != 0);
            if next_nonzero > self.u {
                continue;
            }
            delta[coord] = d;
            self.walk_deltas(x, delta, coord + 1, next_nonzero, closed, out);
            delta[coord] = 0;
        }
    }
}

impl fmt::Display for Adjacency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.name() {
            Some(name) => write!(f, "{name}"),
            None => write!(f, "c_{} on Z^{}", self.u, self.n),
        }
    }
}

impl fmt::Debug for Adjacency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A finite digital image: a set of lattice points with an adjacency.
///
/// Points are stored sorted and deduplicated; an `Image` never changes
/// after construction, so it can be shared freely behind an [`Arc`].
#[derive(Clone, PartialEq, Eq)]
pub struct Image {
    points: Vec<Point>,
    adjacency: Adjacency,
}

impl Image {
    /// Builds an image, sorting the points. Duplicates and points of the
    /// wrong dimension are rejected.
    pub fn new(mut points: Vec<Point>, adjacency: Adjacency) -> Result<Self> {
        for p in &points {
            if p.dim() != adjacency.dim() {
                return Err(Error::DimensionMismatch {
                    expected: adjacency.dim(),
                    found: p.dim(),
                });
            }
        }
        points.sort();
        if let Some(w) = points.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicatePoint(w[0].clone()));
        }
        Ok(Image { points, adjacency })
    }

    /// Same point set under a different adjacency on the same lattice.
    pub fn with_adjacency(&self, adjacency: Adjacency) -> Result<Self> {
        Image::new(self.points.clone(), adjacency)
    }

    pub fn adjacency(&self) -> Adjacency {
        self.adjacency
    }

    pub fn dim(&self) -> usize {
        self.adjacency.dim()
    }

    /// The points, sorted lexicographically.
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.points.binary_search(p).is_ok()
    }

    /// The position of `p` in the sorted point list.
    pub fn index_of(&self, p: &Point) -> Option<usize> {
        self.points.binary_search(p).ok()
    }

    /// Neighbors of `x` within the image, in lexicographic order; with
    /// `closed` the point itself is included. `x` must belong to the image.
    pub fn neighborhood(&self, x: &Point, closed: bool) -> Result<Vec<Point>> {
        if !self.contains(x) {
            return Err(Error::NotInImage(x.clone()));
        }
        let mut out: Vec<Point> = self
            .points
            .iter()
            .filter(|y| self.adjacency.adjacent(x, y))
            .cloned()
            .collect();
        if closed {
            out.push(x.clone());
            out.sort();
        }
        Ok(out)
    }

    /// Neighbors of `x` in the ambient lattice, regardless of membership in
    /// the image. `x` must belong to the image.
    pub fn ambient_neighborhood(&self, x: &Point, closed: bool) -> Result<Vec<Point>> {
        if !self.contains(x) {
            return Err(Error::NotInImage(x.clone()));
        }
        Ok(self.adjacency.ambient_neighborhood(x, closed))
    }

    /// Points of the image with at least one ambient neighbor outside it.
    pub fn boundary(&self) -> Vec<Point> {
        self.points
            .iter()
            .filter(|x| {
                self.adjacency
                    .ambient_neighborhood(x, false)
                    .iter()
                    .any(|y| !self.contains(y))
            })
            .cloned()
            .collect()
    }

    /// Indices of in-image neighbors per point (no self loops), ascending.
    pub fn adjacency_lists(&self) -> Vec<Vec<usize>> {
        let n = self.points.len();
        let mut lists = vec![Vec::new(); n];
        for i in 0..n {
            for j in (i + 1)..n {
                if self.adjacency.adjacent(&self.points[i], &self.points[j]) {
                    lists[i].push(j);
                    lists[j].push(i);
                }
            }
        }
        lists
    }

    /// Connected components as sorted blocks, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<Point>> {
        let lists = self.adjacency_lists();
        let mut seen = vec![false; self.points.len()];
        let mut blocks = Vec::new();
        for start in 0..self.points.len() {
            if seen[start] {
                continue;
            }
            let mut block = Vec::new();
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            while let Some(i) = queue.pop_front() {
                block.push(self.points[i].clone());
                for &j in &lists[i] {
                    if !seen[j] {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                }
            }
            block.sort();
            blocks.push(block);
        }
        // Points are scanned in sorted order, so blocks already come out
        // ordered by their smallest member.
        blocks
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Graph distances from `from` within the image (`None` = unreachable).
    pub fn distances_from(&self, from: &Point) -> Result<BTreeMap<Point, usize>> {
        let start = self.index_of(from).ok_or(Error::NotInImage(from.clone()))?;
        let lists = self.adjacency_lists();
        let mut dist: Vec<Option<usize>> = vec![None; self.points.len()];
        dist[start] = Some(0);
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            let d = dist[i].unwrap();
            for &j in &lists[i] {
                if dist[j].is_none() {
                    dist[j] = Some(d + 1);
                    queue.push_back(j);
                }
            }
        }
        Ok(self
            .points
            .iter()
            .zip(&dist)
            .filter_map(|(p, d)| d.map(|d| (p.clone(), d)))
            .collect())
    }

    /// Constructs the sub-image induced on `points` (same adjacency).
    pub fn sub_image(&self, points: Vec<Point>) -> Result<Image> {
        for p in &points {
            if !self.contains(p) {
                return Err(Error::NotInImage(p.clone()));
            }
        }
        Image::new(points, self.adjacency)
    }
}

impl fmt::Debug for Image {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Image({} points, adjacency {})",
            self.points.len(),
            self.adjacency
        )
    }
}

/// Checks that the assignment `domain.points()[i] ↦ values[i]` is a
/// continuous map into `codomain`: every value lies in the codomain and
/// adjacent points map to equal or adjacent values.
///
/// A value outside the codomain is an error rather than mere discontinuity,
/// so malformed data is distinguishable from a genuinely discontinuous map.
pub fn is_continuous_map(domain: &Image, codomain: &Image, values: &[Point]) -> Result<bool> {
    if values.len() != domain.len() {
        return Err(Error::DimensionMismatch {
            expected: domain.len(),
            found: values.len(),
        });
    }
    for v in values {
        if !codomain.contains(v) {
            return Err(Error::NotInImage(v.clone()));
        }
    }
    let dom = domain.adjacency();
    let cod = codomain.adjacency();
    for i in 0..values.len() {
        for j in (i + 1)..values.len() {
            if dom.adjacent(&domain.points()[i], &domain.points()[j])
                && !cod.adjacent_or_equal(&values[i], &values[j])
            {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Convenience: an image shared behind an [`Arc`].
pub fn shared(image: Image) -> Arc<Image> {
    Arc::new(image)
}

/// The solid box with the given inclusive coordinate ranges.
pub fn box_points(ranges: &[(i64, i64)]) -> Vec<Point> {
    let mut out = vec![Vec::new()];
    for &(lo, hi) in ranges {
        let mut next = Vec::new();
        for prefix in &out {
            for c in lo..=hi {
                let mut p = prefix.clone();
                p.push(c);
                next.push(p);
            }
        }
        out = next;
    }
    out.into_iter().map(Point::new).collect()
}
