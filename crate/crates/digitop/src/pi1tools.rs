//! Constructive loop contractions.
//!
//! Unlike the bounded searches in [`crate::oracle`], the generators here are
//! direct algorithms: point-avoidance rewriting, coordinate-clamp pipelines
//! for the two cataloged sphere-like surfaces, lifting a contraction through
//! a finer adjacency, folding loops in acyclic images, and turning a
//! loop-preserving contraction into an endpoint-fixed one.  Every generator
//! returns a [`NullhomotopyCertificate`] (or a rewrite trace carrying a grid)
//! that has already been re-verified by the homotopy checkers.

use crate::catalog;
use crate::error::{Error, Result};
use crate::homotopy::{
    trivial_extension_map, CertificateKind, DigitalLoop, GridFlags, HomotopyGrid,
    NullhomotopyCertificate, verify_homotopy,
};
use crate::lattice::{shared, Adjacency, Image, Point};
use crate::oracle::{window_avoid_search, SearchBudget, WindowOutcome};

/// One single-index rewrite: entry `index` changed from `removed` to
/// `replacement`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Substitution {
    pub index: usize,
    pub removed: Point,
    pub replacement: Point,
}

/// The result of rewriting a loop to avoid a point: the rewritten loop and a
/// step-by-step grid from the input to it.
#[derive(Clone, Debug)]
pub struct AvoidRewriteTrace {
    pub input: DigitalLoop,
    /// The rewritten loop.  Same length as the input unless window rewriting
    /// had to pad (each window adds stutters, never removes entries).
    pub output: DigitalLoop,
    /// One record per repaired visit of the forbidden point.
    pub substitutions: Vec<Substitution>,
    /// Endpoint-fixed grid whose first row is a trivial extension of the
    /// input (equal to it when no padding occurred) and whose last row is
    /// the output.
    pub grid: HomotopyGrid,
}

fn cert_flags() -> GridFlags {
    // `pointed_at` would pin every column that starts at the basepoint,
    // including interior revisits, which rewrites may legitimately move.
    GridFlags {
        pointed_at: None,
        loop_preserving: true,
        endpoint_fixed: true,
    }
}

/// First point of the image, in lexicographic order, that is adjacent to
/// `p` (so the swap is a one-step move) and adjacent-or-equal to both
/// flankers (so the row stays continuous).
fn scan_substitution(image: &Image, cur: &[Point], t: usize, p: &Point) -> Option<Point> {
    let adj = image.adjacency();
    image
        .points()
        .iter()
        .find(|c| {
            *c != p
                && adj.adjacent(c, p)
                && adj.adjacent_or_equal(&cur[t - 1], c)
                && adj.adjacent_or_equal(c, &cur[t + 1])
        })
        .cloned()
}

/// Inserts `w` stutters after position `lo` and `w` stutters before position
/// `hi`, duplicating the entries already there.
fn stretch_row(row: &[Point], lo: usize, hi: usize, w: usize) -> Vec<Point> {
    let mut out = Vec::with_capacity(row.len() + 2 * w);
    for (i, p) in row.iter().enumerate() {
        if i == hi {
            for _ in 0..w {
                out.push(row[hi].clone());
            }
        }
        out.push(p.clone());
        if i == lo {
            for _ in 0..w {
                out.push(row[lo].clone());
            }
        }
    }
    out
}

enum Fallback<'a> {
    Fail,
    Window { w: usize, budget: &'a SearchBudget },
}

fn rewrite_avoiding(f: &DigitalLoop, p: &Point, fallback: Fallback) -> Result<AvoidRewriteTrace> {
    if f.basepoint() == p {
        return Err(Error::BasepointForbidden);
    }
    let image = f.image().clone();
    if !image.contains(p) {
        return Err(Error::NotInImage(p.clone()));
    }
    let mut cur: Vec<Point> = f.seq().to_vec();
    let mut rows: Vec<Vec<Point>> = vec![cur.clone()];
    let mut substitutions = Vec::new();
    while let Some(t) = cur.iter().position(|q| q == p) {
        if let Some(c) = scan_substitution(&image, &cur, t, p) {
            substitutions.push(Substitution {
                index: t,
                removed: p.clone(),
                replacement: c.clone(),
            });
            cur[t] = c;
            rows.push(cur.clone());
            continue;
        }
        let Fallback::Window { w, budget } = fallback else {
            return Err(Error::NoSubstitution { index: t });
        };
        if w == 0 {
            return Err(Error::WindowUnsolvable { index: t });
        }
        let m = cur.len() - 1;
        let mut radius = w;
        loop {
            let lo = t.saturating_sub(radius);
            // Both window edges stay pinned during the search, so the right
            // edge must be pushed past any run of the forbidden point (the
            // left edge is clean because t is the first visit; the final
            // entry is the basepoint, so the push terminates).
            let mut hi = (t + radius).min(m);
            while cur[hi] == *p {
                hi += 1;
            }
            let trial = stretch_row(&cur, lo, hi, w);
            let span = hi - lo + 2 * w;
            let visit = t + w;
            match window_avoid_search(&image, &trial[lo..=lo + span], p, budget)? {
                WindowOutcome::Solved(window_rows) => {
                    for row in rows.iter_mut() {
                        *row = stretch_row(row, lo, hi, w);
                    }
                    cur = trial;
                    for wr in window_rows.iter().skip(1) {
                        cur[lo..=lo + span].clone_from_slice(wr);
                        rows.push(cur.clone());
                    }
                    substitutions.push(Substitution {
                        index: visit,
                        removed: p.clone(),
                        replacement: cur[visit].clone(),
                    });
                    break;
                }
                WindowOutcome::Exhausted => {
                    if lo == 0 && hi == m {
                        return Err(Error::WindowUnsolvable { index: t });
                    }
                    radius += 1;
                }
                WindowOutcome::OutOfBudget { states } => {
                    return Err(Error::BudgetExceeded { states });
                }
            }
        }
    }
    let output = DigitalLoop::new(image.clone(), cur)?;
    let grid = HomotopyGrid::new(image, rows, cert_flags())?;
    let trace = AvoidRewriteTrace {
        input: f.clone(),
        output,
        substitutions,
        grid,
    };
    let padded = DigitalLoop::new(trace.input.image().clone(), trace.grid.rows()[0].clone())?;
    let report = verify_homotopy(&trace.grid, padded.as_path(), trace.output.as_path())?;
    if !report.valid() {
        return Err(Error::MalformedGrid(
            "internal error: a rewrite trace failed re-verification".into(),
        ));
    }
    Ok(trace)
}

/// Rewrites `f` so that it never visits `p`, one single-index substitution
/// per visit: at the least `t` with `f(t) = p`, the image is scanned in
/// lexicographic order for a replacement adjacent to `p` and
/// adjacent-or-equal to both neighbors of the visit.  The output has the
/// same length as the input.
pub fn avoid_point(f: &DigitalLoop, p: &Point) -> Result<AvoidRewriteTrace> {
    rewrite_avoiding(f, p, Fallback::Fail)
}

/// Like [`avoid_point`], but when no single-index substitution exists the
/// visit's window `[t-w, t+w]` is padded with `2w` stutters and a bounded
/// endpoint-pinned search looks for any window deformation that avoids `p`.
/// The window never ends on `p` itself (its pinned edge is pushed right
/// past any such run), and a window whose complete deformation closure
/// still contains `p` is retried one position wider until it spans the
/// whole loop.
pub fn window_avoid(
    f: &DigitalLoop,
    p: &Point,
    w: usize,
    budget: &SearchBudget,
) -> Result<AvoidRewriteTrace> {
    rewrite_avoiding(f, p, Fallback::Window { w, budget })
}

/// Whether a clamp stage caps a coordinate from above or raises it from
/// below.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ClampKind {
    Min,
    Max,
}

/// One pointwise stage: replace coordinate `coord` by `min(value, bound)` or
/// `max(value, bound)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ClampStage {
    pub coord: usize,
    pub kind: ClampKind,
    pub bound: i64,
}

impl ClampStage {
    pub fn apply(&self, p: &Point) -> Point {
        let mut coords = p.coords().to_vec();
        let v = coords[self.coord];
        coords[self.coord] = match self.kind {
            ClampKind::Min => v.min(self.bound),
            ClampKind::Max => v.max(self.bound),
        };
        Point::new(coords)
    }
}

/// An ordered sequence of clamp stages followed by one collapse step that
/// sends every remaining point to a single target.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ClampSchedule {
    pub stages: Vec<ClampStage>,
    pub collapse_to: Point,
}

/// Runs an avoidance trace and then a clamp schedule, assembling the full
/// certificate.  Each stage contributes one grid row; the collapse
/// contributes the final constant row.
fn clamp_pipeline(
    f: &DigitalLoop,
    trace: AvoidRewriteTrace,
    schedule: &ClampSchedule,
) -> Result<NullhomotopyCertificate> {
    let image = f.image().clone();
    let mut rows = trace.grid.rows().to_vec();
    let mut cur = trace.output.seq().to_vec();
    for stage in &schedule.stages {
        cur = cur.iter().map(|p| stage.apply(p)).collect();
        rows.push(cur.clone());
    }
    rows.push(vec![schedule.collapse_to.clone(); cur.len()]);
    let padded = DigitalLoop::new(image.clone(), rows[0].clone())?;
    let grid = HomotopyGrid::new(image, rows, cert_flags())?;
    let cert = NullhomotopyCertificate::new(f.clone(), padded, grid, CertificateKind::EndpointFixed)?;
    if !cert.verify()?.valid() {
        return Err(Error::MalformedGrid(
            "internal error: a clamp certificate failed re-verification".into(),
        ));
    }
    Ok(cert)
}

fn require_catalog_surface(f: &DigitalLoop, id: &str) -> Result<catalog::ImageEntry> {
    let entry = catalog::image_entry(id)?;
    if f.image().as_ref() != entry.image.as_ref() {
        return Err(Error::UnsupportedImage(format!(
            "this generator only applies to the catalog image {id}"
        )));
    }
    let base = entry
        .basepoint
        .clone()
        .expect("catalog surfaces carry a basepoint");
    if f.basepoint() != &base {
        return Err(Error::BasepointMismatch {
            expected: base,
            found: f.basepoint().clone(),
        });
    }
    Ok(entry)
}

/// Contracts any loop on the ten-point sphere-like surface (catalog
/// `MSS_18`, adjacency 18) based at `c0`: rewrite to avoid the antipode
/// `c3`, clamp the second coordinate to at most 1 (which lands every point
/// in the closed neighborhood of `c0`), then collapse to `c0`.  The
/// certificate has exactly `substitutions + 2` steps.
pub fn clamp_contract_mss18(f: &DigitalLoop) -> Result<NullhomotopyCertificate> {
    let entry = require_catalog_surface(f, "MSS_18")?;
    let c3 = entry
        .label("c3")
        .expect("MSS_18 labels its points")
        .clone();
    let base = entry.basepoint.clone().expect("MSS_18 has a basepoint");
    let trace = avoid_point(f, &c3)?;
    let schedule = ClampSchedule {
        stages: vec![ClampStage {
            coord: 1,
            kind: ClampKind::Min,
            bound: 1,
        }],
        collapse_to: base,
    };
    clamp_pipeline(f, trace, &schedule)
}

/// Contracts any loop on the punctured-box surface (catalog `MSS_6`,
/// adjacency 6) based at `(0,0,1)`: rewrite to avoid `(1,2,1)` (window
/// search with half-width 2 when single substitutions fail — eliminating
/// that point is what lets the clamps dodge the missing center), clamp the
/// second coordinate to 1 then 0, clamp the first to 1 then 0, and collapse
/// the remaining axis points to `(0,0,1)`.
pub fn clamp_contract_mss6(f: &DigitalLoop) -> Result<NullhomotopyCertificate> {
    let entry = require_catalog_surface(f, "MSS_6")?;
    let base = entry.basepoint.clone().expect("MSS_6 has a basepoint");
    let trace = window_avoid(
        f,
        &Point::new(vec![1, 2, 1]),
        2,
        &SearchBudget::default(),
    )?;
    let schedule = ClampSchedule {
        stages: vec![
            ClampStage {
                coord: 1,
                kind: ClampKind::Min,
                bound: 1,
            },
            ClampStage {
                coord: 1,
                kind: ClampKind::Min,
                bound: 0,
            },
            ClampStage {
                coord: 0,
                kind: ClampKind::Min,
                bound: 1,
            },
            ClampStage {
                coord: 0,
                kind: ClampKind::Min,
                bound: 0,
            },
        ],
        collapse_to: base,
    };
    clamp_pipeline(f, trace, &schedule)
}

/// First point `w` of the image with `x ↔= w ↔= y` under the image's
/// adjacency, scanning lexicographically.
fn two_step_midpoint(image: &Image, x: &Point, y: &Point) -> Option<Point> {
    let adj = image.adjacency();
    image
        .points()
        .iter()
        .find(|w| adj.adjacent_or_equal(x, w) && adj.adjacent_or_equal(w, y))
        .cloned()
}

/// Contracts a loop under a fine adjacency by lifting a contraction from a
/// coarser one.  Requires (checked up front) that every pair adjacent under
/// `kappa` is adjacent under the loop's own adjacency, and that every pair
/// adjacent under the loop's adjacency is joined by a two-step `kappa` path
/// inside the image.  The loop is doubled by stutters, the odd positions are
/// bent to two-step midpoints (one fine-adjacency step), and the resulting
/// coarse loop is contracted by `inner`; the coarse certificate reads back
/// as a fine one.
pub fn adjacency_lift(
    f: &DigitalLoop,
    kappa: Adjacency,
    inner: impl Fn(&DigitalLoop) -> Result<NullhomotopyCertificate>,
) -> Result<NullhomotopyCertificate> {
    let x_fine = f.image().clone();
    let fine = x_fine.adjacency();
    let x_coarse = shared(x_fine.with_adjacency(kappa)?);
    let pts = x_fine.points();
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let (a, b) = (&pts[i], &pts[j]);
            if kappa.adjacent(a, b) && !fine.adjacent(a, b) {
                return Err(Error::HypothesisFailed {
                    a: a.clone(),
                    b: b.clone(),
                });
            }
            if fine.adjacent(a, b) && two_step_midpoint(&x_coarse, a, b).is_none() {
                return Err(Error::HypothesisFailed {
                    a: a.clone(),
                    b: b.clone(),
                });
            }
        }
    }
    let m = f.len();
    let mut doubled = Vec::with_capacity(2 * m + 1);
    for u in 0..m {
        doubled.push(f.seq()[u].clone());
        doubled.push(f.seq()[u].clone());
    }
    doubled.push(f.seq()[m].clone());
    let mut bent = doubled.clone();
    for u in 0..m {
        let w = two_step_midpoint(&x_coarse, &f.seq()[u], &f.seq()[u + 1]).ok_or_else(|| {
            Error::HypothesisFailed {
                a: f.seq()[u].clone(),
                b: f.seq()[u + 1].clone(),
            }
        })?;
        bent[2 * u + 1] = w;
    }
    let coarse_loop = DigitalLoop::new(x_coarse.clone(), bent.clone())?;
    let inner_cert = inner(&coarse_loop)?;
    if inner_cert.original().seq() != coarse_loop.seq()
        || inner_cert.grid().codomain().points() != x_coarse.points()
    {
        return Err(Error::MalformedGrid(
            "the inner generator certified a different loop".into(),
        ));
    }
    let phi = trivial_extension_map(inner_cert.padded().seq(), &bent).ok_or_else(|| {
        Error::MalformedGrid("the inner certificate's first row does not extend its loop".into())
    })?;
    let doubled_padded: Vec<Point> = phi.iter().map(|&i| doubled[i].clone()).collect();
    let mut rows = Vec::with_capacity(1 + inner_cert.grid().rows().len());
    rows.push(doubled_padded.clone());
    rows.extend(inner_cert.grid().rows().iter().cloned());
    let padded = DigitalLoop::new(x_fine.clone(), doubled_padded)?;
    let grid = HomotopyGrid::new(x_fine, rows, cert_flags())?;
    let cert = NullhomotopyCertificate::new(f.clone(), padded, grid, CertificateKind::EndpointFixed)?;
    if !cert.verify()?.valid() {
        return Err(Error::MalformedGrid(
            "internal error: a lifted certificate failed re-verification".into(),
        ));
    }
    Ok(cert)
}

/// Contracts any loop in an acyclic image by repeatedly retracting a
/// farthest-from-basepoint visit onto its predecessor (which, in a tree, is
/// that vertex's unique neighbor towards the basepoint).  Each retraction is
/// a one-step move; the summed distance of the entries strictly decreases,
/// so the fold reaches the constant loop.
pub fn tree_fold_contract(f: &DigitalLoop) -> Result<NullhomotopyCertificate> {
    let image = f.image().clone();
    let edges: usize = image
        .adjacency_lists()
        .iter()
        .map(|l| l.len())
        .sum::<usize>()
        / 2;
    if edges + image.components().len() != image.len() {
        return Err(Error::NotATree);
    }
    let dist = image.distances_from(f.basepoint())?;
    let depth_of = |p: &Point| -> usize {
        *dist
            .get(p)
            .expect("loop entries are connected to the basepoint")
    };
    let mut cur: Vec<Point> = f.seq().to_vec();
    let mut rows = vec![cur.clone()];
    loop {
        let mut far: (&Point, usize) = (&cur[0], 0);
        for p in &cur {
            let d = depth_of(p);
            if d > far.1 || (d == far.1 && p < far.0) {
                far = (p, d);
            }
        }
        if far.1 == 0 {
            break;
        }
        let v = far.0.clone();
        let t = cur.iter().position(|p| p == &v).expect("v was found in cur");
        cur[t] = cur[t - 1].clone();
        rows.push(cur.clone());
    }
    let grid = HomotopyGrid::new(image, rows, cert_flags())?;
    let cert =
        NullhomotopyCertificate::new(f.clone(), f.clone(), grid, CertificateKind::EndpointFixed)?;
    if !cert.verify()?.valid() {
        return Err(Error::MalformedGrid(
            "internal error: a tree-fold certificate failed re-verification".into(),
        ));
    }
    Ok(cert)
}

/// Converts a loop-preserving contraction of `f` into an endpoint-fixed one.
///
/// Let `p(t)` be the track of the rows' basepoints and `M` the number of
/// steps.  Each row `H_t` is conjugated into `p_t · H_t · p_t⁻¹` (walk out
/// along the track, run the row, walk back), which pins both ends at `f`'s
/// basepoint; the grid then continues with `p_t · p̄(t) · p_t⁻¹` for `t`
/// from `M-1` down to `0`, retracting the out-and-back corridor until only
/// the constant loop remains.  The first row is the trivial extension of
/// `f` by `M` stutters on each side.
pub fn basepoint_fix(f: &DigitalLoop, h: &HomotopyGrid) -> Result<NullhomotopyCertificate> {
    let image = f.image().clone();
    if h.codomain().as_ref() != image.as_ref() {
        return Err(Error::ImageMismatch);
    }
    let rows = h.rows();
    if rows[0][0] != *f.basepoint() {
        return Err(Error::BasepointMismatch {
            expected: f.basepoint().clone(),
            found: rows[0][0].clone(),
        });
    }
    if rows[0] != f.seq() {
        return Err(Error::MalformedGrid(
            "the grid's first row is not the given loop".into(),
        ));
    }
    let adj = image.adjacency();
    let width = h.width();
    for (t, row) in rows.iter().enumerate() {
        if row[0] != row[width - 1] {
            return Err(Error::MalformedGrid(format!(
                "row {t} is not a loop; the grid is not loop-preserving"
            )));
        }
        for s in 0..width - 1 {
            if !adj.adjacent_or_equal(&row[s], &row[s + 1]) {
                return Err(Error::MalformedGrid(format!(
                    "row {t} breaks continuity at entry {s}"
                )));
            }
        }
        if t + 1 < rows.len() {
            for s in 0..width {
                if !adj.adjacent_or_equal(&row[s], &rows[t + 1][s]) {
                    return Err(Error::MalformedGrid(format!(
                        "rows {t} and {} are not pointwise close at entry {s}",
                        t + 1
                    )));
                }
            }
        }
    }
    let last = rows.last().expect("grids have at least one row");
    if last.iter().any(|p| p != &last[0]) {
        return Err(Error::MalformedGrid(
            "the grid does not end at a constant row".into(),
        ));
    }
    let steps = h.steps();
    let k = f.len();
    let track: Vec<Point> = rows.iter().map(|r| r[0].clone()).collect();
    let total = 2 * steps + k;
    let conjugated = |t: usize, middle: &dyn Fn(usize) -> Point| -> Vec<Point> {
        (0..=total)
            .map(|s| {
                if s < steps {
                    track[s.min(t)].clone()
                } else if s <= steps + k {
                    middle(s - steps)
                } else {
                    track[(total - s).min(t)].clone()
                }
            })
            .collect()
    };
    let mut out_rows = Vec::with_capacity(2 * steps + 1);
    for t in 0..=steps {
        out_rows.push(conjugated(t, &|s| rows[t][s].clone()));
    }
    for t in (0..steps).rev() {
        out_rows.push(conjugated(t, &|_| track[t].clone()));
    }
    let padded = DigitalLoop::new(image.clone(), out_rows[0].clone())?;
    let grid = HomotopyGrid::new(image, out_rows, cert_flags())?;
    let cert = NullhomotopyCertificate::new(f.clone(), padded, grid, CertificateKind::EndpointFixed)?;
    if !cert.verify()?.valid() {
        return Err(Error::MalformedGrid(
            "internal error: a conjugated certificate failed re-verification".into(),
        ));
    }
    Ok(cert)
}

/// Picks a generator for the loop's image: the clamp pipelines on the two
/// cataloged sphere-like surfaces (lifted through adjacency when the loop
/// uses a finer one), tree folding on acyclic images, and the zero-step
/// certificate for constant loops anywhere.
pub fn contract_auto(f: &DigitalLoop) -> Result<NullhomotopyCertificate> {
    if f.is_constant() {
        return NullhomotopyCertificate::trivial(f);
    }
    let image = f.image();
    let u = image.adjacency().u();
    let adj18 = Adjacency::new(3, 2)?;
    let adj6 = Adjacency::new(3, 1)?;
    if image.dim() == 3 {
        let mss18 = catalog::image_entry("MSS_18")?;
        if image.points() == mss18.image.points() {
            return match u {
                2 => clamp_contract_mss18(f),
                3 => adjacency_lift(f, adj18, clamp_contract_mss18),
                _ => Err(Error::UnsupportedImage(
                    "this point set is only handled under adjacency 18 or 26".into(),
                )),
            };
        }
        let mss6 = catalog::image_entry("MSS_6")?;
        if image.points() == mss6.image.points() {
            return match u {
                1 => clamp_contract_mss6(f),
                2 => adjacency_lift(f, adj6, clamp_contract_mss6),
                3 => adjacency_lift(f, adj18, |g| {
                    adjacency_lift(g, adj6, clamp_contract_mss6)
                }),
                _ => unreachable!("3-dimensional adjacencies have u in 1..=3"),
            };
        }
    }
    let edges: usize = image
        .adjacency_lists()
        .iter()
        .map(|l| l.len())
        .sum::<usize>()
        / 2;
    if edges + image.components().len() == image.len() {
        return tree_fold_contract(f);
    }
    Err(Error::UnsupportedImage(
        "no constructive generator applies to this image; try the bounded explorer".into(),
    ))
}
