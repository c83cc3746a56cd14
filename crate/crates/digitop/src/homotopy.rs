//! Digital paths, loops, and certified homotopies between them.
//!
//! A path of length `m` is a sequence of `m + 1` image points in which
//! consecutive entries are equal or adjacent. A homotopy between two paths
//! is a grid: every row is a path, every column is a path, the first row is
//! the source and the last row the target. Optional side conditions (a held
//! point, matching endpoints per row, pinned endpoints) are recorded as
//! flags and checked on demand.
//!
//! Verification never trusts the producer: [`verify_homotopy`] and
//! [`verify_contraction`] re-check every condition cell by cell and report
//! the first offending cell of each failed condition.

use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lattice::{Image, Point};

/// A finite path: consecutive entries equal or adjacent, all in the image.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DigitalPath {
    image: Arc<Image>,
    seq: Vec<Point>,
}

impl DigitalPath {
    pub fn new(image: Arc<Image>, seq: Vec<Point>) -> Result<Self> {
        if seq.is_empty() {
            return Err(Error::EmptySequence);
        }
        for p in &seq {
            if !image.contains(p) {
                return Err(Error::NotInImage(p.clone()));
            }
        }
        for (i, w) in seq.windows(2).enumerate() {
            if !image.adjacency().adjacent_or_equal(&w[0], &w[1]) {
                return Err(Error::NotAPath { index: i });
            }
        }
        Ok(DigitalPath { image, seq })
    }

    pub fn image(&self) -> &Arc<Image> {
        &self.image
    }

    pub fn seq(&self) -> &[Point] {
        &self.seq
    }

    /// The path length `m`; a one-entry path has length zero.
    pub fn len(&self) -> usize {
        self.seq.len() - 1
    }

    pub fn start(&self) -> &Point {
        self.seq.first().unwrap()
    }

    pub fn end(&self) -> &Point {
        self.seq.last().unwrap()
    }

    pub fn is_constant(&self) -> bool {
        self.seq.iter().all(|p| p == &self.seq[0])
    }

    /// The product path: this one, then `other`, which must start where
    /// this one ends. Lengths add.
    pub fn concat(&self, other: &DigitalPath) -> Result<DigitalPath> {
        if self.image.as_ref() != other.image.as_ref() {
            return Err(Error::ImageMismatch);
        }
        if self.end() != other.start() {
            return Err(Error::NotComposable {
                end: self.end().clone(),
                start: other.start().clone(),
            });
        }
        let mut seq = self.seq.clone();
        seq.extend(other.seq[1..].iter().cloned());
        Ok(DigitalPath {
            image: self.image.clone(),
            seq,
        })
    }

    /// The same walk backwards.
    pub fn reverse(&self) -> DigitalPath {
        let mut seq = self.seq.clone();
        seq.reverse();
        DigitalPath {
            image: self.image.clone(),
            seq,
        }
    }

    /// Stutters the final entry until the path has length `target_len`.
    pub fn pad_to(&self, target_len: usize) -> Result<DigitalPath> {
        if target_len < self.len() {
            return Err(Error::BadBudget(format!(
                "cannot pad a path of length {} down to {}",
                self.len(),
                target_len
            )));
        }
        let mut seq = self.seq.clone();
        seq.resize(target_len + 1, self.end().clone());
        Ok(DigitalPath {
            image: self.image.clone(),
            seq,
        })
    }
}

/// A path whose first and last entries coincide.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DigitalLoop {
    path: DigitalPath,
}

impl DigitalLoop {
    pub fn new(image: Arc<Image>, seq: Vec<Point>) -> Result<Self> {
        DigitalLoop::from_path(DigitalPath::new(image, seq)?)
    }

    pub fn from_path(path: DigitalPath) -> Result<Self> {
        if path.start() != path.end() {
            return Err(Error::NotALoop);
        }
        Ok(DigitalLoop { path })
    }

    /// The constant loop of length `m` at `at`.
    pub fn constant(image: Arc<Image>, at: Point, m: usize) -> Result<Self> {
        DigitalLoop::new(image, vec![at; m + 1])
    }

    pub fn as_path(&self) -> &DigitalPath {
        &self.path
    }

    pub fn image(&self) -> &Arc<Image> {
        self.path.image()
    }

    pub fn seq(&self) -> &[Point] {
        self.path.seq()
    }

    pub fn len(&self) -> usize {
        self.path.len()
    }

    pub fn basepoint(&self) -> &Point {
        self.path.start()
    }

    pub fn is_constant(&self) -> bool {
        self.path.is_constant()
    }

    /// The loop traversed from entry `shift` onwards (same length).
    pub fn rotate(&self, shift: usize) -> DigitalLoop {
        let m = self.len();
        if m == 0 {
            return self.clone();
        }
        let s = shift % m;
        let mut seq = Vec::with_capacity(m + 1);
        for i in 0..=m {
            seq.push(self.path.seq[(s + i) % m].clone());
        }
        seq[m] = seq[0].clone();
        DigitalLoop {
            path: DigitalPath {
                image: self.path.image.clone(),
                seq,
            },
        }
    }

    /// Stutters the basepoint at the end until the loop has length
    /// `target_len`.
    pub fn pad_to(&self, target_len: usize) -> Result<DigitalLoop> {
        Ok(DigitalLoop {
            path: self.path.pad_to(target_len)?,
        })
    }
}

/// Whether `extended` retraces `base` exactly, with pauses: some monotone
/// nondecreasing surjection `φ` with steps in {0, 1}, `φ(0) = 0` and
/// `φ(p) = m`, satisfies `extended(s) = base(φ(s))`.
pub fn is_trivial_extension(extended: &DigitalPath, base: &DigitalPath) -> Result<bool> {
    if extended.image().as_ref() != base.image().as_ref() {
        return Err(Error::ImageMismatch);
    }
    Ok(trivial_extension_map(extended.seq(), base.seq()).is_some())
}

/// A witnessing reparametrization for [`is_trivial_extension`], when one
/// exists: the lexicographically smallest valid `φ`, one value per entry of
/// `extended`.
pub fn trivial_extension_map(extended: &[Point], base: &[Point]) -> Option<Vec<usize>> {
    let p = extended.len();
    let m = base.len();
    if p == 0 || m == 0 || p < m {
        return None;
    }
    // feasible[s][j]: reading extended[s..] can consume base[j..] exactly.
    let mut feasible = vec![vec![false; m]; p];
    feasible[p - 1][m - 1] = extended[p - 1] == base[m - 1];
    for s in (0..p - 1).rev() {
        for j in 0..m {
            if extended[s] != base[j] {
                continue;
            }
            feasible[s][j] =
                feasible[s + 1][j] || (j + 1 < m && feasible[s + 1][j + 1]);
        }
    }
    if !feasible[0][0] {
        return None;
    }
    // Walk forward preferring to pause, which yields the smallest map.
    let mut phi = Vec::with_capacity(p);
    let mut j = 0;
    phi.push(0);
    for s in 1..p {
        if feasible[s][j] {
            phi.push(j);
        } else {
            j += 1;
            phi.push(j);
        }
    }
    Some(phi)
}

/// Side conditions a grid claims to satisfy.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct GridFlags {
    /// A held point: every column that starts at this point stays at it.
    pub pointed_at: Option<Point>,
    /// Every row is itself a loop: `H(0, t) = H(m, t)`.
    pub loop_preserving: bool,
    /// Both endpoint columns are pinned at the basepoint of the first row.
    pub endpoint_fixed: bool,
}

/// A homotopy table: `steps() + 1` rows of equal width over a codomain.
///
/// For homotopies of paths the columns correspond to path indices. For
/// homotopies of an image (contractions) `domain_order` pins which image
/// point each column tracks.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HomotopyGrid {
    codomain: Arc<Image>,
    rows: Vec<Vec<Point>>,
    flags: GridFlags,
    domain_order: Option<Vec<Point>>,
}

impl HomotopyGrid {
    pub fn new(codomain: Arc<Image>, rows: Vec<Vec<Point>>, flags: GridFlags) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::MalformedGrid("grid has no cells".into()));
        }
        let width = rows[0].len();
        for (t, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::MalformedGrid(format!(
                    "row {t} has {} entries, expected {width}",
                    row.len()
                )));
            }
            for (s, p) in row.iter().enumerate() {
                if !codomain.contains(p) {
                    return Err(Error::MalformedGrid(format!(
                        "cell ({s},{t}) holds {p}, which is outside the codomain"
                    )));
                }
            }
        }
        Ok(HomotopyGrid {
            codomain,
            rows,
            flags,
            domain_order: None,
        })
    }

    /// Attaches the column-to-point identification of a contraction grid.
    pub fn with_domain_order(mut self, order: Vec<Point>) -> Result<Self> {
        if order.len() != self.width() {
            return Err(Error::BadDomainOrder);
        }
        self.domain_order = Some(order);
        Ok(self)
    }

    pub fn codomain(&self) -> &Arc<Image> {
        &self.codomain
    }

    pub fn rows(&self) -> &[Vec<Point>] {
        &self.rows
    }

    pub fn flags(&self) -> &GridFlags {
        &self.flags
    }

    pub fn domain_order(&self) -> Option<&[Point]> {
        self.domain_order.as_deref()
    }

    /// Number of homotopy steps `M` (one less than the number of rows).
    pub fn steps(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn width(&self) -> usize {
        self.rows[0].len()
    }

    /// Checks the grid against its own first and last rows; see
    /// [`verify_homotopy`] for checking against externally given paths.
    pub fn self_report(&self) -> HomotopyReport {
        report_on(self, None, None)
    }
}

/// Conditions checked by the verifiers.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// First row equals the source, last row equals the target.
    Endpoints,
    /// Each row is a path in the codomain.
    RowContinuity,
    /// Each column is a path in the codomain.
    ColumnContinuity,
    /// Each row is a continuous self-map (contractions only).
    RowMapContinuity,
    /// First row of a contraction is the identity assignment.
    IdentityStart,
    /// Last row is constant.
    ConstantEnd,
    Pointed,
    LoopPreserving,
    EndpointFixed,
}

/// A failed condition and the first cell `(s, t)` witnessing it,
/// `s` indexing within a row and `t` indexing rows.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Violation {
    pub condition: Condition,
    pub s: usize,
    pub t: usize,
}

/// Outcome of checking a path homotopy. Flag fields are `None` when the
/// grid does not claim the flag.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct HomotopyReport {
    pub endpoints_match: bool,
    pub rows_continuous: bool,
    pub columns_continuous: bool,
    pub pointed: Option<bool>,
    pub loop_preserving: Option<bool>,
    pub endpoint_fixed: Option<bool>,
    pub violations: Vec<Violation>,
}

impl HomotopyReport {
    pub fn valid(&self) -> bool {
        self.endpoints_match
            && self.rows_continuous
            && self.columns_continuous
            && self.pointed.unwrap_or(true)
            && self.loop_preserving.unwrap_or(true)
            && self.endpoint_fixed.unwrap_or(true)
    }
}

/// Checks that `grid` is a homotopy from `f` to `g`: the first row is `f`,
/// the last row is `g`, every row and every column is a path, and every
/// flag the grid claims holds. All conditions are checked; each failed one
/// contributes a violation with its first offending cell.
pub fn verify_homotopy(
    grid: &HomotopyGrid,
    f: &DigitalPath,
    g: &DigitalPath,
) -> Result<HomotopyReport> {
    if f.image().as_ref() != grid.codomain().as_ref()
        || g.image().as_ref() != grid.codomain().as_ref()
    {
        return Err(Error::ImageMismatch);
    }
    if f.seq().len() != grid.width() || g.seq().len() != grid.width() {
        return Err(Error::MalformedGrid(format!(
            "grid width {} does not match path lengths {} and {}",
            grid.width() - 1,
            f.len(),
            g.len()
        )));
    }
    Ok(report_on(grid, Some(f.seq()), Some(g.seq())))
}

fn report_on(grid: &HomotopyGrid, f: Option<&[Point]>, g: Option<&[Point]>) -> HomotopyReport {
    let adj = grid.codomain().adjacency();
    let rows = grid.rows();
    let width = grid.width();
    let last_t = grid.steps();
    let mut violations = Vec::new();

    let mut endpoints_match = true;
    if let Some(f) = f {
        if let Some(s) = (0..width).find(|&s| rows[0][s] != f[s]) {
            endpoints_match = false;
            violations.push(Violation {
                condition: Condition::Endpoints,
                s,
                t: 0,
            });
        }
    }
    if let Some(g) = g {
        if let Some(s) = (0..width).find(|&s| rows[last_t][s] != g[s]) {
            if endpoints_match {
                endpoints_match = false;
                violations.push(Violation {
                    condition: Condition::Endpoints,
                    s,
                    t: last_t,
                });
            }
        }
    }

    let mut rows_continuous = true;
    'rows: for (t, row) in rows.iter().enumerate() {
        for s in 0..width - 1 {
            if !adj.adjacent_or_equal(&row[s], &row[s + 1]) {
                rows_continuous = false;
                violations.push(Violation {
                    condition: Condition::RowContinuity,
                    s,
                    t,
                });
                break 'rows;
            }
        }
    }

    let mut columns_continuous = true;
    'cols: for s in 0..width {
        for t in 0..last_t {
            if !adj.adjacent_or_equal(&rows[t][s], &rows[t + 1][s]) {
                columns_continuous = false;
                violations.push(Violation {
                    condition: Condition::ColumnContinuity,
                    s,
                    t,
                });
                break 'cols;
            }
        }
    }

    let pointed = grid.flags().pointed_at.as_ref().map(|x| {
        let held_columns: Vec<usize> = (0..width).filter(|&s| &rows[0][s] == x).collect();
        if held_columns.is_empty() {
            violations.push(Violation {
                condition: Condition::Pointed,
                s: 0,
                t: 0,
            });
            return false;
        }
        for s in held_columns {
            for t in 1..=last_t {
                if &rows[t][s] != x {
                    violations.push(Violation {
                        condition: Condition::Pointed,
                        s,
                        t,
                    });
                    return false;
                }
            }
        }
        true
    });

    let loop_preserving = grid.flags().loop_preserving.then(|| {
        for (t, row) in rows.iter().enumerate() {
            if row[0] != row[width - 1] {
                violations.push(Violation {
                    condition: Condition::LoopPreserving,
                    s: width - 1,
                    t,
                });
                return false;
            }
        }
        true
    });

    let endpoint_fixed = grid.flags().endpoint_fixed.then(|| {
        let x0 = &rows[0][0];
        for (t, row) in rows.iter().enumerate() {
            if &row[0] != x0 {
                violations.push(Violation {
                    condition: Condition::EndpointFixed,
                    s: 0,
                    t,
                });
                return false;
            }
            if &row[width - 1] != x0 {
                violations.push(Violation {
                    condition: Condition::EndpointFixed,
                    s: width - 1,
                    t,
                });
                return false;
            }
        }
        true
    });

    HomotopyReport {
        endpoints_match,
        rows_continuous,
        columns_continuous,
        pointed,
        loop_preserving,
        endpoint_fixed,
        violations,
    }
}

/// Outcome of checking a contraction grid of an image.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ContractionReport {
    pub identity_start: bool,
    pub constant_end: bool,
    pub rows_continuous: bool,
    pub columns_continuous: bool,
    pub pointed: Option<bool>,
    pub violations: Vec<Violation>,
}

impl ContractionReport {
    pub fn valid(&self) -> bool {
        self.identity_start
            && self.constant_end
            && self.rows_continuous
            && self.columns_continuous
            && self.pointed.unwrap_or(true)
    }
}

/// Checks that `grid` contracts the image `x`: column `i` tracks the point
/// `domain_order[i]`, the first row is the identity, every row is a
/// continuous self-map of `x`, every column is a path, the last row is
/// constant, and (when given) `pointed_at`'s column never moves.
pub fn verify_contraction(
    x: &Image,
    grid: &HomotopyGrid,
    pointed_at: Option<&Point>,
) -> Result<ContractionReport> {
    if grid.codomain().as_ref() != x {
        return Err(Error::ImageMismatch);
    }
    let order = grid.domain_order().ok_or(Error::MissingDomainOrder)?;
    let mut sorted: Vec<&Point> = order.iter().collect();
    sorted.sort();
    if sorted.len() != x.len() || !sorted.iter().map(|p| *p).eq(x.points().iter()) {
        return Err(Error::BadDomainOrder);
    }
    if let Some(p) = pointed_at {
        if !x.contains(p) {
            return Err(Error::NotInImage(p.clone()));
        }
    }

    let adj = x.adjacency();
    let rows = grid.rows();
    let width = grid.width();
    let last_t = grid.steps();
    let mut violations = Vec::new();

    let mut identity_start = true;
    if let Some(s) = (0..width).find(|&s| rows[0][s] != order[s]) {
        identity_start = false;
        violations.push(Violation {
            condition: Condition::IdentityStart,
            s,
            t: 0,
        });
    }

    let mut constant_end = true;
    if let Some(s) = (1..width).find(|&s| rows[last_t][s] != rows[last_t][0]) {
        constant_end = false;
        violations.push(Violation {
            condition: Condition::ConstantEnd,
            s,
            t: last_t,
        });
    }

    let mut rows_continuous = true;
    'rows: for (t, row) in rows.iter().enumerate() {
        for i in 0..width {
            for j in 0..width {
                if i != j
                    && adj.adjacent(&order[i], &order[j])
                    && !adj.adjacent_or_equal(&row[i], &row[j])
                {
                    rows_continuous = false;
                    violations.push(Violation {
                        condition: Condition::RowMapContinuity,
                        s: i,
                        t,
                    });
                    break 'rows;
                }
            }
        }
    }

    let mut columns_continuous = true;
    'cols: for s in 0..width {
        for t in 0..last_t {
            if !adj.adjacent_or_equal(&rows[t][s], &rows[t + 1][s]) {
                columns_continuous = false;
                violations.push(Violation {
                    condition: Condition::ColumnContinuity,
                    s,
                    t,
                });
                break 'cols;
            }
        }
    }

    let pointed = pointed_at.map(|p| {
        let s = order.iter().position(|q| q == p).unwrap();
        for t in 0..=last_t {
            if &rows[t][s] != p {
                violations.push(Violation {
                    condition: Condition::Pointed,
                    s,
                    t,
                });
                return false;
            }
        }
        true
    });

    Ok(ContractionReport {
        identity_start,
        constant_end,
        rows_continuous,
        columns_continuous,
        pointed,
        violations,
    })
}

/// Which side condition a nullhomotopy certificate promises.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    EndpointFixed,
    LoopPreserving,
}

/// A checkable witness that a loop contracts: the loop, a trivial extension
/// of it, and a grid taking the extension to a constant row.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NullhomotopyCertificate {
    original: DigitalLoop,
    padded: DigitalLoop,
    grid: HomotopyGrid,
    kind: CertificateKind,
}

/// Outcome of [`NullhomotopyCertificate::verify`].
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CertificateReport {
    /// The grid's first row is a trivial extension of the original loop.
    pub trivial_extension: bool,
    /// The grid's last row is constant.
    pub final_constant: bool,
    pub grid: HomotopyReport,
}

impl CertificateReport {
    pub fn valid(&self) -> bool {
        self.trivial_extension && self.final_constant && self.grid.valid()
    }
}

impl NullhomotopyCertificate {
    pub fn new(
        original: DigitalLoop,
        padded: DigitalLoop,
        grid: HomotopyGrid,
        kind: CertificateKind,
    ) -> Result<Self> {
        if original.image().as_ref() != grid.codomain().as_ref()
            || padded.image().as_ref() != grid.codomain().as_ref()
        {
            return Err(Error::ImageMismatch);
        }
        if grid.width() != padded.seq().len() {
            return Err(Error::MalformedGrid(format!(
                "grid width {} does not match padded loop length {}",
                grid.width() - 1,
                padded.len()
            )));
        }
        Ok(NullhomotopyCertificate {
            original,
            padded,
            grid,
            kind,
        })
    }

    /// The zero-step certificate for a constant loop.
    pub fn trivial(lp: &DigitalLoop) -> Result<Self> {
        if !lp.is_constant() {
            return Err(Error::MalformedGrid(
                "a zero-step certificate requires a constant loop".into(),
            ));
        }
        let grid = HomotopyGrid::new(
            lp.image().clone(),
            vec![lp.seq().to_vec()],
            GridFlags {
                pointed_at: None,
                loop_preserving: true,
                endpoint_fixed: true,
            },
        )?;
        NullhomotopyCertificate::new(lp.clone(), lp.clone(), grid, CertificateKind::EndpointFixed)
    }

    pub fn original(&self) -> &DigitalLoop {
        &self.original
    }

    pub fn padded(&self) -> &DigitalLoop {
        &self.padded
    }

    pub fn grid(&self) -> &HomotopyGrid {
        &self.grid
    }

    pub fn kind(&self) -> CertificateKind {
        self.kind
    }

    pub fn steps(&self) -> usize {
        self.grid.steps()
    }

    /// Re-checks the whole certificate from scratch.
    pub fn verify(&self) -> Result<CertificateReport> {
        let trivial_extension = is_trivial_extension(self.padded.as_path(), self.original.as_path())?;
        let last = self.grid.rows().last().unwrap();
        let final_constant = last.iter().all(|p| p == &last[0]);
        let target = DigitalPath::new(self.grid.codomain().clone(), last.clone())?;
        let mut grid = verify_homotopy(&self.grid, self.padded.as_path(), &target)?;
        // The certificate's promise must actually be claimed by the grid.
        match self.kind {
            CertificateKind::EndpointFixed => {
                if grid.endpoint_fixed.is_none() {
                    grid.endpoint_fixed = Some(false);
                }
            }
            CertificateKind::LoopPreserving => {
                if grid.loop_preserving.is_none() {
                    grid.loop_preserving = Some(false);
                }
            }
        }
        Ok(CertificateReport {
            trivial_extension,
            final_constant,
            grid,
        })
    }
}
