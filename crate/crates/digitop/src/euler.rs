//! Clique census, Euler characteristic, disks, and graph isomorphism.
//!
//! The Euler characteristic used throughout is the alternating sum over the
//! full clique census of the adjacency graph: a clique on `q + 1` points
//! counts as a `q`-simplex. A "legacy" vertex/edge/face count (which stops
//! at triangles) is reported alongside it, because the two disagree exactly
//! when the graph contains a clique on four or more points.

use serde::Serialize;
use std::cmp::Reverse;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lattice::{Image, Point};

/// Number of cliques of each size: `alpha[q]` is the count of cliques on
/// `q + 1` points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SimplexCensus {
    pub alpha: Vec<u64>,
}

impl SimplexCensus {
    /// Alternating sum of the census.
    pub fn chi(&self) -> i64 {
        self.alpha
            .iter()
            .enumerate()
            .map(|(q, &a)| if q % 2 == 0 { a as i64 } else { -(a as i64) })
            .sum()
    }

    /// Vertices minus edges plus triangles, ignoring larger cliques.
    pub fn legacy_vef(&self) -> i64 {
        let term = |q: usize| self.alpha.get(q).copied().unwrap_or(0) as i64;
        term(0) - term(1) + term(2)
    }

    /// The highest `q` with a nonzero count, if the image is nonempty.
    pub fn top_dimension(&self) -> Option<usize> {
        self.alpha.iter().rposition(|&a| a > 0)
    }
}

fn grow(
    cand: &[usize],
    depth: usize,
    lists: &[Vec<usize>],
    alpha: &mut Vec<u64>,
    stack: &mut Vec<usize>,
    collect: &mut Option<(usize, &mut Vec<Vec<usize>>)>,
) {
    if alpha.len() <= depth {
        alpha.resize(depth + 1, 0);
    }
    alpha[depth] += 1;
    if let Some((want, out)) = collect {
        if depth == *want {
            out.push(stack.clone());
        }
    }
    for (i, &c) in cand.iter().enumerate() {
        let next: Vec<usize> = cand[i + 1..]
            .iter()
            .copied()
            .filter(|w| lists[c].binary_search(w).is_ok())
            .collect();
        stack.push(c);
        grow(&next, depth + 1, lists, alpha, stack, collect);
        stack.pop();
    }
}

fn census_with(image: &Image, collect_dim: Option<usize>) -> (SimplexCensus, Vec<Vec<usize>>) {
    let lists = image.adjacency_lists();
    let mut alpha = Vec::new();
    let mut found = Vec::new();
    for v in 0..lists.len() {
        let cand: Vec<usize> = lists[v].iter().copied().filter(|&w| w > v).collect();
        let mut stack = vec![v];
        let mut collect = collect_dim.map(|d| (d, &mut found));
        grow(&cand, 0, &lists, &mut alpha, &mut stack, &mut collect);
    }
    (SimplexCensus { alpha }, found)
}

/// Count every clique of the adjacency graph, grouped by size.
pub fn simplex_census(image: &Image) -> SimplexCensus {
    census_with(image, None).0
}

/// All cliques on `q + 1` points, each sorted, listed in lexicographic
/// order.
pub fn enumerate_simplices(image: &Image, q: usize) -> Vec<Vec<Point>> {
    let (_, found) = census_with(image, Some(q));
    found
        .into_iter()
        .map(|ix| ix.into_iter().map(|i| image.points()[i].clone()).collect())
        .collect()
}

/// Census plus the derived characteristics, in one serializable report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChiReport {
    pub alpha: Vec<u64>,
    pub chi: i64,
    pub legacy_vef: i64,
    pub differs: bool,
}

/// Euler characteristic of an image via the full clique census.
pub fn euler_characteristic(image: &Image) -> ChiReport {
    let census = simplex_census(image);
    let chi = census.chi();
    let legacy_vef = census.legacy_vef();
    ChiReport {
        alpha: census.alpha,
        chi,
        legacy_vef,
        differs: legacy_vef != chi,
    }
}

/// The three standard small disks used when gluing images along a curve.
///
/// Each names the adjacency of the disk and the shape of its boundary
/// curve; `chi` is the characteristic of the corresponding filled disk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiskKind {
    /// Six-point closed curve under 8-adjacency with two interior points.
    Oval8,
    /// Four-point diamond curve under 8-adjacency with one interior point.
    Diamond8,
    /// Eight-point square curve under 4-adjacency with one interior point.
    Square4,
}

impl DiskKind {
    /// Euler characteristic of the filled disk of this kind.
    pub fn chi(self) -> i64 {
        match self {
            DiskKind::Oval8 => 1,
            DiskKind::Diamond8 => 1,
            DiskKind::Square4 => -3,
        }
    }
}

/// A filled disk: an image together with a simple closed boundary curve,
/// the rest of the image being the interior.
#[derive(Debug, Clone)]
pub struct DigitalDisk {
    kind: DiskKind,
    image: Arc<Image>,
    curve: Vec<Point>,
    interior: Vec<Point>,
}

impl DigitalDisk {
    /// Validates that `curve` lies in the image and forms a simple closed
    /// curve there: connected, with exactly two curve neighbors at every
    /// curve point.
    pub fn new(kind: DiskKind, image: Arc<Image>, curve: Vec<Point>) -> Result<Self> {
        for p in &curve {
            if !image.contains(p) {
                return Err(Error::NotInImage(p.clone()));
            }
        }
        let curve_image = image.sub_image(curve)?;
        if curve_image.len() < 4 {
            return Err(Error::UnsupportedImage(
                "a simple closed curve needs at least four points".into(),
            ));
        }
        if !curve_image.is_connected() {
            return Err(Error::UnsupportedImage(
                "boundary curve is not connected".into(),
            ));
        }
        for p in curve_image.points() {
            let deg = curve_image.neighborhood(p, false)?.len();
            if deg != 2 {
                return Err(Error::UnsupportedImage(format!(
                    "curve point {p} has {deg} curve neighbors, expected 2"
                )));
            }
        }
        let interior: Vec<Point> = image
            .points()
            .iter()
            .filter(|p| !curve_image.contains(p))
            .cloned()
            .collect();
        Ok(DigitalDisk {
            kind,
            image,
            curve: curve_image.points().to_vec(),
            interior,
        })
    }

    pub fn kind(&self) -> DiskKind {
        self.kind
    }

    pub fn image(&self) -> &Arc<Image> {
        &self.image
    }

    pub fn curve(&self) -> &[Point] {
        &self.curve
    }

    pub fn interior(&self) -> &[Point] {
        &self.interior
    }

    /// The boundary curve as an image of its own.
    pub fn boundary_curve(&self) -> Image {
        self.image
            .sub_image(self.curve.clone())
            .expect("curve was validated at construction")
    }

    /// Characteristic of the whole disk.
    pub fn chi(&self) -> i64 {
        simplex_census(&self.image).chi()
    }
}

/// Euler characteristic of the boundary curve of a disk.
pub fn boundary_curve_chi(disk: &DigitalDisk) -> i64 {
    simplex_census(&disk.boundary_curve()).chi()
}

/// Characteristic of the image obtained by gluing two images along the
/// boundary of a disk of the given kind, removing both interiors:
/// `chi(X) + chi(Y) - 2 * chi(disk)`.
pub fn connected_sum_chi(chi_x: i64, chi_y: i64, kind: DiskKind) -> i64 {
    chi_x + chi_y - 2 * kind.chi()
}

fn adjacency_matrix(image: &Image) -> Vec<Vec<bool>> {
    let lists = image.adjacency_lists();
    let n = lists.len();
    let mut m = vec![vec![false; n]; n];
    for (i, row) in lists.iter().enumerate() {
        for &j in row {
            m[i][j] = true;
        }
    }
    m
}

/// Search for a graph isomorphism between the adjacency graphs of `a` and
/// `b`. Returns a point-to-point dictionary when one exists.
pub fn is_isomorphic(a: &Image, b: &Image) -> Option<Vec<(Point, Point)>> {
    let n = a.len();
    if n != b.len() {
        return None;
    }
    if n == 0 {
        return Some(Vec::new());
    }
    let ma = adjacency_matrix(a);
    let mb = adjacency_matrix(b);
    let deg = |m: &Vec<Vec<bool>>, i: usize| m[i].iter().filter(|&&x| x).count();
    let da: Vec<usize> = (0..n).map(|i| deg(&ma, i)).collect();
    let db: Vec<usize> = (0..n).map(|i| deg(&mb, i)).collect();
    let mut sa = da.clone();
    let mut sb = db.clone();
    sa.sort_unstable();
    sb.sort_unstable();
    if sa != sb {
        return None;
    }

    // Most-constrained-first: map high-degree vertices early.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (Reverse(da[i]), i));

    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];

    fn backtrack(
        k: usize,
        order: &[usize],
        ma: &[Vec<bool>],
        mb: &[Vec<bool>],
        da: &[usize],
        db: &[usize],
        map: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if k == order.len() {
            return true;
        }
        let i = order[k];
        for j in 0..used.len() {
            if used[j] || da[i] != db[j] {
                continue;
            }
            let consistent = order[..k]
                .iter()
                .all(|&prev| ma[i][prev] == mb[j][map[prev]]);
            if !consistent {
                continue;
            }
            map[i] = j;
            used[j] = true;
            if backtrack(k + 1, order, ma, mb, da, db, map, used) {
                return true;
            }
            map[i] = usize::MAX;
            used[j] = false;
        }
        false
    }

    if !backtrack(0, &order, &ma, &mb, &da, &db, &mut map, &mut used) {
        return None;
    }
    Some(
        (0..n)
            .map(|i| (a.points()[i].clone(), b.points()[map[i]].clone()))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{box_points, shared, Adjacency};
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn img(ranges: &[(i64, i64)], name: &str) -> Image {
        Image::new(box_points(ranges), Adjacency::from_name(name).unwrap()).unwrap()
    }

    /// Brute-force census by subset enumeration, for cross-checking.
    fn naive_census(image: &Image) -> Vec<u64> {
        let n = image.len();
        assert!(n <= 16, "oracle is exponential");
        let pts = image.points();
        let adj = image.adjacency();
        let mut alpha = Vec::new();
        for mask in 1u32..(1 << n) {
            let members: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let clique = members.iter().enumerate().all(|(a, &i)| {
                members[a + 1..]
                    .iter()
                    .all(|&j| adj.adjacent(&pts[i], &pts[j]))
            });
            if clique {
                let q = members.len() - 1;
                if alpha.len() <= q {
                    alpha.resize(q + 1, 0);
                }
                alpha[q] += 1;
            }
        }
        alpha
    }

    #[test]
    fn census_of_tiny_boxes() {
        let square4 = simplex_census(&img(&[(0, 1), (0, 1)], "4"));
        assert_eq!(square4.alpha, vec![4, 4]);
        assert_eq!(square4.chi(), 0);

        let square8 = simplex_census(&img(&[(0, 1), (0, 1)], "8"));
        assert_eq!(square8.alpha, vec![4, 6, 4, 1]);
        assert_eq!(square8.chi(), 1);
        assert_eq!(square8.legacy_vef(), 2);
        assert_eq!(square8.top_dimension(), Some(3));

        let point = simplex_census(&img(&[(5, 5)], "2"));
        assert_eq!(point.alpha, vec![1]);
        assert_eq!(point.chi(), 1);
    }

    #[test]
    fn report_flags_disagreement_only_on_large_cliques() {
        let no_big = euler_characteristic(&img(&[(0, 2), (0, 2)], "4"));
        assert!(!no_big.differs);
        assert_eq!(no_big.chi, no_big.legacy_vef);

        let big = euler_characteristic(&img(&[(0, 1), (0, 1)], "8"));
        assert!(big.differs);
        assert_eq!(big.chi, 1);
        assert_eq!(big.legacy_vef, 2);
    }

    #[test]
    fn census_matches_subset_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let all = box_points(&[(0, 2), (0, 2), (0, 1)]);
        for name in ["6", "18", "26"] {
            for _ in 0..8 {
                let mut pts = all.clone();
                pts.shuffle(&mut rng);
                pts.truncate(10);
                let image = Image::new(pts, Adjacency::from_name(name).unwrap()).unwrap();
                assert_eq!(simplex_census(&image).alpha, naive_census(&image));
            }
        }
    }

    #[test]
    fn simplex_enumeration_is_sorted_and_consistent() {
        let image = img(&[(0, 1), (0, 1)], "8");
        let edges = enumerate_simplices(&image, 1);
        assert_eq!(edges.len(), 6);
        let mut sorted = edges.clone();
        sorted.sort();
        assert_eq!(edges, sorted);
        for e in &edges {
            assert!(e[0] < e[1]);
        }
    }

    #[test]
    fn square_disk_validates_and_measures() {
        let image = shared(img(&[(0, 2), (0, 2)], "4"));
        let curve: Vec<Point> = image
            .points()
            .iter()
            .filter(|p| p.coords() != [1, 1])
            .cloned()
            .collect();
        let disk = DigitalDisk::new(DiskKind::Square4, image, curve).unwrap();
        assert_eq!(disk.interior(), &[Point::from(&[1i64, 1][..])]);
        assert_eq!(boundary_curve_chi(&disk), 0);
        assert_eq!(disk.chi(), DiskKind::Square4.chi());
    }

    #[test]
    fn bad_curves_are_rejected() {
        let image = shared(img(&[(0, 2), (0, 2)], "8"));
        // Under 8-adjacency the square boundary has chords, so corner points
        // get more than two curve neighbors.
        let curve: Vec<Point> = image
            .points()
            .iter()
            .filter(|p| p.coords() != [1, 1])
            .cloned()
            .collect();
        assert!(DigitalDisk::new(DiskKind::Square4, image.clone(), curve).is_err());
        // Too-short curves are rejected outright.
        let short = vec![Point::from(&[0i64, 0][..]), Point::from(&[0i64, 1][..])];
        assert!(DigitalDisk::new(DiskKind::Square4, image, short).is_err());
    }

    #[test]
    fn connected_sum_adjusts_by_the_disk() {
        assert_eq!(connected_sum_chi(-22, -22, DiskKind::Square4), -38);
        assert_eq!(connected_sum_chi(-2, -2, DiskKind::Oval8), -6);
        assert_eq!(connected_sum_chi(0, 0, DiskKind::Diamond8), -2);
    }

    #[test]
    fn translated_images_are_isomorphic() {
        let a = img(&[(0, 1), (0, 2)], "8");
        let b = img(&[(10, 11), (5, 7)], "8");
        let map = is_isomorphic(&a, &b).expect("translation is an isomorphism");
        assert_eq!(map.len(), a.len());
        // Every edge must be carried to an edge and every non-edge to a
        // non-edge.
        for (p, fp) in &map {
            for (q, fq) in &map {
                assert_eq!(
                    a.adjacency().adjacent(p, q),
                    b.adjacency().adjacent(fp, fq)
                );
            }
        }
    }

    #[test]
    fn different_graphs_are_not_isomorphic() {
        let path = Image::new(
            vec![
                Point::from(&[0i64][..]),
                Point::from(&[1i64][..]),
                Point::from(&[2i64][..]),
            ],
            Adjacency::from_name("2").unwrap(),
        )
        .unwrap();
        let triangle = Image::new(
            vec![
                Point::from(&[0i64, 0][..]),
                Point::from(&[0i64, 1][..]),
                Point::from(&[1i64, 0][..]),
            ],
            Adjacency::from_name("8").unwrap(),
        )
        .unwrap();
        assert!(is_isomorphic(&path, &triangle).is_none());
        assert!(is_isomorphic(&path, &img(&[(0, 1), (0, 1)], "4")).is_none());
    }
}
