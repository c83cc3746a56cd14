//! Bounded breadth-first searches over spaces of loops and maps.
//!
//! Every search in this module explores one-step deformations: two loops (or
//! two maps) are one step apart when they differ pointwise by at most one
//! adjacency step and both satisfy the continuity rules.  Searches are exact
//! up to their bounds: a returned certificate is re-verified before it leaves
//! this module, a negative answer is labelled either [`SearchStatus::Exhausted`]
//! (the whole space at this size was enumerated) or
//! [`SearchStatus::BudgetExceeded`] (the search stopped early), and callers are
//! expected to surface that label rather than overstate the result.

use std::collections::HashSet;
use std::rc::Rc;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homotopy::{
    CertificateKind, DigitalLoop, GridFlags, HomotopyGrid, NullhomotopyCertificate,
    verify_contraction,
};
use crate::lattice::{Image, Point};
use crate::walks::random_loop;

/// Hard ceiling on image size for any search in this module: closed
/// neighborhoods are stored as 128-bit masks.
pub const BITSET_CAP: usize = 128;

/// Default cap on image size for map-space searches (`contractibility_search`
/// and the hole checks), whose state spaces grow like |X|^|X|.
pub const DEFAULT_SELF_MAP_CAP: usize = 7;

/// Resource bounds for a search.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Maximum number of distinct states (rows or maps) the search may visit.
    pub max_states: u64,
    /// Maximum number of one-step moves away from the start state.
    pub max_depth: usize,
    /// Length loops are padded to before an endpoint-fixed contraction search.
    pub pad_len: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_states: 10_000_000,
            max_depth: 1_000_000,
            pad_len: 16,
        }
    }
}

impl SearchBudget {
    pub fn validate(&self) -> Result<()> {
        if self.max_states == 0 {
            return Err(Error::BadBudget("max_states must be positive".into()));
        }
        if self.max_depth == 0 {
            return Err(Error::BadBudget("max_depth must be positive".into()));
        }
        if self.pad_len == 0 {
            return Err(Error::BadBudget("pad_len must be positive".into()));
        }
        Ok(())
    }

    pub fn with_max_states(mut self, max_states: u64) -> Self {
        self.max_states = max_states;
        self
    }

    pub fn with_max_depth(mut self, max_depth: usize) -> Self {
        self.max_depth = max_depth;
        self
    }

    pub fn with_pad_len(mut self, pad_len: usize) -> Self {
        self.pad_len = pad_len;
        self
    }
}

/// How a search ended.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStatus {
    /// The target was found; a verified certificate accompanies this status.
    Reached,
    /// The whole state space at this size was enumerated without finding the
    /// target.  Conclusive for the bounded question, not for larger sizes.
    Exhausted,
    /// The state or depth budget ran out first.  Inconclusive.
    BudgetExceeded,
}

/// For non-conclusive outcomes, a short caveat suitable for user-facing
/// output.  `Reached` needs no caveat because its certificate is re-verified.
pub fn bounded_evidence(status: SearchStatus) -> Option<&'static str> {
    match status {
        SearchStatus::Reached => None,
        SearchStatus::Exhausted => Some(
            "bounded evidence: the move space at this size was exhausted; \
             larger deformations are not ruled out",
        ),
        SearchStatus::BudgetExceeded => Some(
            "bounded evidence: the budget ran out before the move space \
             was exhausted; the answer is inconclusive",
        ),
    }
}

/// Statistics and outcome of one search.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ExplorationReport {
    pub status: SearchStatus,
    /// Number of distinct states visited, including the start state.
    pub states_visited: u64,
    /// Depth of the deepest state visited.
    pub frontier_depth: usize,
}

/// Which one-step moves a loop search allows.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    /// Both endpoints of every row are pinned to the start loop's basepoint.
    EndpointFixed,
    /// Every row must be a loop, but its basepoint may move.
    LoopPreserving,
}

// ---------------------------------------------------------------------------
// Indexed image: points as u16 indices, closed neighborhoods as bitmasks.
// ---------------------------------------------------------------------------

struct Indexed<'a> {
    image: &'a Image,
    nstar: Vec<u128>,
}

impl<'a> Indexed<'a> {
    fn new(image: &'a Image, cap: usize) -> Result<Self> {
        if image.is_empty() {
            return Err(Error::UnsupportedImage("the image is empty".into()));
        }
        let cap = cap.min(BITSET_CAP);
        if image.len() > cap {
            return Err(Error::CapExceeded {
                size: image.len(),
                cap,
            });
        }
        let mut nstar = vec![0u128; image.len()];
        for (i, list) in image.adjacency_lists().iter().enumerate() {
            let mut mask = 1u128 << i;
            for &j in list {
                mask |= 1u128 << j;
            }
            nstar[i] = mask;
        }
        Ok(Indexed { image, nstar })
    }

    fn encode(&self, seq: &[Point]) -> Result<Vec<u16>> {
        seq.iter()
            .map(|p| {
                self.image
                    .index_of(p)
                    .map(|i| i as u16)
                    .ok_or_else(|| Error::NotInImage(p.clone()))
            })
            .collect()
    }

    fn decode(&self, state: &[u16]) -> Vec<Point> {
        state
            .iter()
            .map(|&i| self.image.points()[i as usize].clone())
            .collect()
    }

    /// All-pairs hop distances, used to prune loop enumeration.
    fn distance_matrix(&self) -> Vec<Vec<u32>> {
        let n = self.image.len();
        let lists = self.image.adjacency_lists();
        let mut dist = vec![vec![u32::MAX; n]; n];
        for s in 0..n {
            let row = &mut dist[s];
            row[s] = 0;
            let mut queue = std::collections::VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &w in &lists[v] {
                    if row[w] == u32::MAX {
                        row[w] = row[v] + 1;
                        queue.push_back(w);
                    }
                }
            }
        }
        dist
    }
}

// ---------------------------------------------------------------------------
// One-step move generators.
// ---------------------------------------------------------------------------

/// Moves on row vectors (loops, paths, windows): every position may shift by
/// at most one adjacency step, the new row must be continuous, pinned
/// positions keep a fixed value, and `tie_ends` forces last == first.
struct SeqMoves<'a> {
    nstar: &'a [u128],
    pins: Vec<Option<u16>>,
    tie_ends: bool,
}

impl SeqMoves<'_> {
    /// Enumerates one-step neighbors into `out`, at most `limit` of them.
    /// Returns whether the enumeration was complete; a truncated expansion
    /// means the caller may not claim the closure is exhausted.
    fn expand(&self, cur: &[u16], out: &mut Vec<Vec<u16>>, limit: usize) -> bool {
        let mut choice = vec![0u16; cur.len()];
        self.rec(0, cur, &mut choice, out, limit)
    }

    fn rec(
        &self,
        i: usize,
        cur: &[u16],
        choice: &mut Vec<u16>,
        out: &mut Vec<Vec<u16>>,
        limit: usize,
    ) -> bool {
        if i == cur.len() {
            if choice.as_slice() != cur {
                if out.len() >= limit {
                    return false;
                }
                out.push(choice.clone());
            }
            return true;
        }
        let mut cand = self.nstar[cur[i] as usize];
        if i > 0 {
            cand &= self.nstar[choice[i - 1] as usize];
        }
        if let Some(pin) = self.pins[i] {
            cand &= 1u128 << pin;
        }
        if self.tie_ends && i == cur.len() - 1 {
            cand &= 1u128 << choice[0];
        }
        while cand != 0 {
            let b = cand.trailing_zeros() as u16;
            cand &= cand - 1;
            choice[i] = b;
            if !self.rec(i + 1, cur, choice, out, limit) {
                return false;
            }
        }
        true
    }
}

/// Moves on maps into the image: position `i` holds the value at the `i`-th
/// domain point; values shift by at most one step and the map must stay
/// continuous (checked against earlier-indexed domain neighbors).
struct MapMoves<'a> {
    nstar: &'a [u128],
    dom_prev: Vec<Vec<u16>>,
    pin: Option<(usize, u16)>,
}

impl MapMoves<'_> {
    /// Enumerates one-step neighbors into `out`, at most `limit` of them;
    /// returns whether the enumeration was complete (see [`SeqMoves::expand`]).
    fn expand(&self, cur: &[u16], out: &mut Vec<Vec<u16>>, limit: usize) -> bool {
        let mut choice = vec![0u16; cur.len()];
        self.rec(0, cur, &mut choice, out, limit)
    }

    fn rec(
        &self,
        i: usize,
        cur: &[u16],
        choice: &mut Vec<u16>,
        out: &mut Vec<Vec<u16>>,
        limit: usize,
    ) -> bool {
        if i == cur.len() {
            if choice.as_slice() != cur {
                if out.len() >= limit {
                    return false;
                }
                out.push(choice.clone());
            }
            return true;
        }
        let mut cand = self.nstar[cur[i] as usize];
        for &j in &self.dom_prev[i] {
            cand &= self.nstar[choice[j as usize] as usize];
        }
        if let Some((pos, pin)) = self.pin {
            if pos == i {
                cand &= 1u128 << pin;
            }
        }
        while cand != 0 {
            let b = cand.trailing_zeros() as u16;
            cand &= cand - 1;
            choice[i] = b;
            if !self.rec(i + 1, cur, choice, out, limit) {
                return false;
            }
        }
        true
    }
}

// ---------------------------------------------------------------------------
// The breadth-first engine.
// ---------------------------------------------------------------------------

struct Bfs {
    /// (state, parent index, depth) in visit order; entry 0 is the start.
    arena: Vec<(Rc<[u16]>, usize, usize)>,
    goal: Option<usize>,
    deepest: usize,
    complete: bool,
}

impl Bfs {
    fn status(&self) -> SearchStatus {
        if self.goal.is_some() {
            SearchStatus::Reached
        } else if self.complete {
            SearchStatus::Exhausted
        } else {
            SearchStatus::BudgetExceeded
        }
    }

    fn report(&self) -> ExplorationReport {
        ExplorationReport {
            status: self.status(),
            states_visited: self.arena.len() as u64,
            frontier_depth: self.deepest,
        }
    }

    /// The chain of states from the start to the goal, inclusive.
    fn chain(&self) -> Option<Vec<Vec<u16>>> {
        let mut at = self.goal?;
        let mut rev = Vec::new();
        loop {
            rev.push(self.arena[at].0.to_vec());
            if at == 0 {
                break;
            }
            at = self.arena[at].1;
        }
        rev.reverse();
        Some(rev)
    }
}

/// How many neighbors a single expansion may enumerate.  Wide states (long
/// rows, large self-maps) can have astronomically many one-step neighbors;
/// capping the enumeration keeps every search within its state budget while
/// the `complete` flag records that the closure was truncated.
fn expansion_cap(budget: &SearchBudget) -> usize {
    usize::try_from(budget.max_states).unwrap_or(usize::MAX)
}

fn bfs(
    start: Vec<u16>,
    expand: impl Fn(&[u16], &mut Vec<Vec<u16>>) -> bool,
    target: impl Fn(&[u16]) -> bool,
    budget: &SearchBudget,
) -> Bfs {
    let start: Rc<[u16]> = Rc::from(start.into_boxed_slice());
    let hit_start = target(&start);
    let mut arena: Vec<(Rc<[u16]>, usize, usize)> = vec![(start.clone(), usize::MAX, 0)];
    let mut out = Bfs {
        arena: Vec::new(),
        goal: if hit_start { Some(0) } else { None },
        deepest: 0,
        complete: true,
    };
    if hit_start {
        out.arena = arena;
        return out;
    }
    let mut seen: HashSet<Rc<[u16]>> = HashSet::new();
    seen.insert(start);
    let mut head = 0usize;
    let mut buf: Vec<Vec<u16>> = Vec::new();
    'search: while head < arena.len() {
        let (state, _, depth) = arena[head].clone();
        if depth == budget.max_depth {
            // Nodes at the depth cap are recorded but not expanded.
            out.complete = false;
            head += 1;
            continue;
        }
        buf.clear();
        if !expand(&state, &mut buf) {
            // Truncated enumeration: some neighbors of this state were
            // never generated, so no exhaustion claim is possible.
            out.complete = false;
        }
        for nb in buf.drain(..) {
            if seen.contains(nb.as_slice()) {
                continue;
            }
            if arena.len() as u64 >= budget.max_states {
                out.complete = false;
                break 'search;
            }
            let rc: Rc<[u16]> = Rc::from(nb.into_boxed_slice());
            seen.insert(rc.clone());
            arena.push((rc.clone(), head, depth + 1));
            out.deepest = depth + 1;
            if target(&rc) {
                out.goal = Some(arena.len() - 1);
                break 'search;
            }
        }
        head += 1;
    }
    out.arena = arena;
    out
}

// ---------------------------------------------------------------------------
// Loop-space searches.
// ---------------------------------------------------------------------------

fn loop_moves<'a>(idx: &'a Indexed, start: &[u16], kind: MoveKind) -> SeqMoves<'a> {
    let m = start.len();
    let mut pins = vec![None; m];
    let mut tie_ends = false;
    match kind {
        MoveKind::EndpointFixed => {
            pins[0] = Some(start[0]);
            pins[m - 1] = Some(start[0]);
        }
        MoveKind::LoopPreserving => tie_ends = true,
    }
    SeqMoves {
        nstar: &idx.nstar,
        pins,
        tie_ends,
    }
}

/// Enumerates every loop reachable from `f` by one-step moves of the given
/// kind, within budget.  The returned loops are sorted; the report says
/// whether the enumeration is complete (`Exhausted`) or truncated
/// (`BudgetExceeded`).
pub fn loop_reachable_set(
    f: &DigitalLoop,
    moves: MoveKind,
    budget: &SearchBudget,
) -> Result<(Vec<DigitalLoop>, ExplorationReport)> {
    budget.validate()?;
    let image = f.image().clone();
    let idx = Indexed::new(&image, BITSET_CAP)?;
    let start = idx.encode(f.seq())?;
    let gen = loop_moves(&idx, &start, moves);
    let run = bfs(start, |s, out| gen.expand(s, out, expansion_cap(budget)), |_| false, budget);
    let mut loops = Vec::with_capacity(run.arena.len());
    for (state, _, _) in &run.arena {
        loops.push(DigitalLoop::new(image.clone(), idx.decode(state))?);
    }
    loops.sort_by(|a, b| a.seq().cmp(b.seq()));
    Ok((loops, run.report()))
}

/// Pads `f` to the budget's `pad_len` and searches for an endpoint-fixed
/// contraction to the constant loop at the basepoint.  A `Reached` outcome
/// carries a certificate that has already been re-verified.
pub fn is_nullhomotopic_bounded(
    f: &DigitalLoop,
    budget: &SearchBudget,
) -> Result<(Option<NullhomotopyCertificate>, ExplorationReport)> {
    budget.validate()?;
    if f.len() > budget.pad_len {
        return Err(Error::BadBudget(format!(
            "pad_len {} is shorter than the loop length {}",
            budget.pad_len,
            f.len()
        )));
    }
    let padded = f.pad_to(budget.pad_len)?;
    let image = f.image().clone();
    let idx = Indexed::new(&image, BITSET_CAP)?;
    let start = idx.encode(padded.seq())?;
    let base = start[0];
    let gen = loop_moves(&idx, &start, MoveKind::EndpointFixed);
    let run = bfs(
        start,
        |s, out| gen.expand(s, out, expansion_cap(budget)),
        |s| s.iter().all(|&v| v == base),
        budget,
    );
    let report = run.report();
    let Some(chain) = run.chain() else {
        return Ok((None, report));
    };
    let rows: Vec<Vec<Point>> = chain.iter().map(|s| idx.decode(s)).collect();
    // `pointed_at` would pin every column that starts at the basepoint,
    // including interior revisits that the search is free to move; the
    // certificate's claim is endpoint-fixedness.
    let flags = GridFlags {
        pointed_at: None,
        loop_preserving: true,
        endpoint_fixed: true,
    };
    let grid = HomotopyGrid::new(image, rows, flags)?;
    let cert = NullhomotopyCertificate::new(f.clone(), padded, grid, CertificateKind::EndpointFixed)?;
    let check = cert.verify()?;
    if !check.valid() {
        return Err(Error::MalformedGrid(
            "internal error: a search result failed re-verification".into(),
        ));
    }
    Ok((Some(cert), report))
}

// ---------------------------------------------------------------------------
// Map-space searches.
// ---------------------------------------------------------------------------

fn map_moves<'a>(idx: &'a Indexed, domain: &Image, pin: Option<(usize, u16)>) -> MapMoves<'a> {
    let dom_prev = domain
        .adjacency_lists()
        .iter()
        .enumerate()
        .map(|(i, list)| {
            list.iter()
                .filter(|&&j| j < i)
                .map(|&j| j as u16)
                .collect()
        })
        .collect();
    MapMoves {
        nstar: &idx.nstar,
        dom_prev,
        pin,
    }
}

/// Searches for a contraction of the whole image: a chain of one-step map
/// deformations from the identity to a constant map.  With `pointed_at`, the
/// named point must stay fixed throughout.  Only feasible for tiny images;
/// `cap` guards the |X|^|X| blow-up.
pub fn contractibility_search(
    x: &Arc<Image>,
    pointed_at: Option<&Point>,
    cap: usize,
    budget: &SearchBudget,
) -> Result<(Option<HomotopyGrid>, ExplorationReport)> {
    budget.validate()?;
    let idx = Indexed::new(x, cap)?;
    let pin = match pointed_at {
        Some(p) => {
            let i = x
                .index_of(p)
                .ok_or_else(|| Error::NotInImage(p.clone()))?;
            Some((i, i as u16))
        }
        None => None,
    };
    let gen = map_moves(&idx, x, pin);
    let start: Vec<u16> = (0..x.len() as u16).collect();
    let run = bfs(
        start,
        |s, out| gen.expand(s, out, expansion_cap(budget)),
        |s| s.iter().all(|&v| v == s[0]),
        budget,
    );
    let report = run.report();
    let Some(chain) = run.chain() else {
        return Ok((None, report));
    };
    let rows: Vec<Vec<Point>> = chain.iter().map(|s| idx.decode(s)).collect();
    let flags = GridFlags {
        pointed_at: pointed_at.cloned(),
        loop_preserving: false,
        endpoint_fixed: false,
    };
    let grid = HomotopyGrid::new(x.clone(), rows, flags)?
        .with_domain_order(x.points().to_vec())?;
    let check = verify_contraction(x, &grid, pointed_at)?;
    if !check.valid() {
        return Err(Error::MalformedGrid(
            "internal error: a search result failed re-verification".into(),
        ));
    }
    Ok((Some(grid), report))
}

// ---------------------------------------------------------------------------
// Hole detection.
// ---------------------------------------------------------------------------

/// Outcome of [`has_hole_direct`].
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct HoleReport {
    pub has_hole: bool,
    /// A connected subset whose inclusion map does not deform to a constant,
    /// if one was found.
    pub witness: Option<Vec<Point>>,
    pub subsets_checked: u64,
    pub states_visited: u64,
}

/// Decides, by exhaustive enumeration, whether some connected subset's
/// inclusion map fails to deform to a constant within the image.  Exact but
/// exponential in |X|; the cap guards it.  If any inner search runs out of
/// budget before deciding, the whole call errs rather than guess.
pub fn has_hole_direct(x: &Arc<Image>, cap: usize, budget: &SearchBudget) -> Result<HoleReport> {
    budget.validate()?;
    if x.is_empty() {
        return Ok(HoleReport {
            has_hole: false,
            witness: None,
            subsets_checked: 0,
            states_visited: 0,
        });
    }
    let cap = cap.min(BITSET_CAP);
    if x.len() > cap {
        return Err(Error::CapExceeded {
            size: x.len(),
            cap,
        });
    }
    let idx = Indexed::new(x, cap)?;
    let n = x.len();
    let lists = x.adjacency_lists();
    let mut subsets_checked = 0u64;
    let mut states_visited = 0u64;
    for mask in 1u64..(1u64 << n) {
        if !mask_connected(mask, &lists) {
            continue;
        }
        subsets_checked += 1;
        let members: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        // The inclusion map of the subset, deformed through maps into x.
        let dom_prev: Vec<Vec<u16>> = members
            .iter()
            .enumerate()
            .map(|(pos, &i)| {
                members[..pos]
                    .iter()
                    .enumerate()
                    .filter(|&(_, &j)| lists[i].contains(&j))
                    .map(|(q, _)| q as u16)
                    .collect()
            })
            .collect();
        let gen = MapMoves {
            nstar: &idx.nstar,
            dom_prev,
            pin: None,
        };
        let start: Vec<u16> = members.iter().map(|&i| i as u16).collect();
        let run = bfs(
            start,
            |s, out| gen.expand(s, out, expansion_cap(budget)),
            |s| s.iter().all(|&v| v == s[0]),
            budget,
        );
        states_visited += run.arena.len() as u64;
        match run.status() {
            SearchStatus::Reached => {}
            SearchStatus::Exhausted => {
                return Ok(HoleReport {
                    has_hole: true,
                    witness: Some(members.iter().map(|&i| x.points()[i].clone()).collect()),
                    subsets_checked,
                    states_visited,
                });
            }
            SearchStatus::BudgetExceeded => {
                return Err(Error::BudgetExceeded {
                    states: states_visited,
                });
            }
        }
    }
    Ok(HoleReport {
        has_hole: false,
        witness: None,
        subsets_checked,
        states_visited,
    })
}

fn mask_connected(mask: u64, lists: &[Vec<usize>]) -> bool {
    let first = mask.trailing_zeros() as usize;
    let mut seen = 1u64 << first;
    let mut stack = vec![first];
    while let Some(v) = stack.pop() {
        for &w in &lists[v] {
            let bit = 1u64 << w;
            if mask & bit != 0 && seen & bit == 0 {
                seen |= bit;
                stack.push(w);
            }
        }
    }
    seen == mask
}

/// Outcome of [`no_hole_equiv_check`].
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct EquivReport {
    /// Whether "no hole" agreed with "every component contracts" on every
    /// sampled image.
    pub agree: bool,
    pub images_checked: u64,
    pub disagreements: u64,
}

/// Cross-checks two independent characterisations on a sample of tiny images:
/// the direct hole search against component-wise contractibility.
pub fn no_hole_equiv_check(
    sample: &[Arc<Image>],
    cap: usize,
    budget: &SearchBudget,
) -> Result<EquivReport> {
    let mut disagreements = 0u64;
    for x in sample {
        let hole = if x.is_empty() {
            false
        } else {
            has_hole_direct(x, cap, budget)?.has_hole
        };
        let mut all_contract = true;
        for block in x.components() {
            let comp = crate::lattice::shared(x.sub_image(block)?);
            let (found, report) = contractibility_search(&comp, None, cap, budget)?;
            match report.status {
                SearchStatus::Reached => debug_assert!(found.is_some()),
                SearchStatus::Exhausted => all_contract = false,
                SearchStatus::BudgetExceeded => {
                    return Err(Error::BudgetExceeded {
                        states: report.states_visited,
                    });
                }
            }
        }
        if hole != !all_contract {
            disagreements += 1;
        }
    }
    Ok(EquivReport {
        agree: disagreements == 0,
        images_checked: sample.len() as u64,
        disagreements,
    })
}

// ---------------------------------------------------------------------------
// Loophole search: hunting for a loop that refuses to contract.
// ---------------------------------------------------------------------------

/// How candidate loops for [`has_loophole_bounded`] are produced.
#[derive(Clone, Debug)]
pub enum CandidateMode {
    /// Every loop of length at most the bound, one representative per
    /// rotation class (rotations deform into each other, so testing one
    /// suffices).
    Exhaustive,
    /// `count` random loops from seeded walks.  Reproducible per seed.
    Sample { count: u64, seed: u64 },
    /// Caller-supplied loops.
    Given(Vec<DigitalLoop>),
}

/// Outcome of [`has_loophole_bounded`].
#[derive(Clone, Debug)]
pub struct LoopholeReport {
    /// A loop that could not be deformed to any constant at its own length,
    /// if one was found.
    pub witness: Option<DigitalLoop>,
    pub loops_tested: u64,
    /// Candidates whose searches ran out of budget before deciding.
    pub inconclusive: u64,
    /// Whether candidates were randomly sampled rather than enumerated.
    pub sampled: bool,
    pub states_visited: u64,
}

/// Looks for a loop of length at most `loop_len` that cannot be deformed,
/// through loop-preserving moves at its own length, to any constant loop.
/// Finding one is conclusive (the search space was exhausted for that loop);
/// finding none is only evidence at this length bound.
pub fn has_loophole_bounded(
    x: &Arc<Image>,
    loop_len: usize,
    budget: &SearchBudget,
    mode: CandidateMode,
) -> Result<LoopholeReport> {
    budget.validate()?;
    if loop_len == 0 {
        return Err(Error::BadBudget("loop length bound must be positive".into()));
    }
    let idx = Indexed::new(x, BITSET_CAP)?;
    let sampled = matches!(mode, CandidateMode::Sample { .. });
    let candidates: Vec<Vec<u16>> = match mode {
        CandidateMode::Exhaustive => enumerate_loops(&idx, loop_len),
        CandidateMode::Sample { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut out = Vec::new();
            for _ in 0..count {
                let base = x.points()[rng.gen_range(0..x.len())].clone();
                let len = rng.gen_range(1..=loop_len);
                let lp = random_loop(x, &base, len, &mut rng)?;
                out.push(idx.encode(lp.seq())?);
            }
            out
        }
        CandidateMode::Given(loops) => {
            let mut out = Vec::new();
            for lp in &loops {
                if lp.image().as_ref() != x.as_ref() {
                    return Err(Error::ImageMismatch);
                }
                out.push(idx.encode(lp.seq())?);
            }
            out
        }
    };
    let mut report = LoopholeReport {
        witness: None,
        loops_tested: 0,
        inconclusive: 0,
        sampled,
        states_visited: 0,
    };
    for cand in candidates {
        report.loops_tested += 1;
        let gen = loop_moves(&idx, &cand, MoveKind::LoopPreserving);
        let run = bfs(
            cand.clone(),
            |s, out| gen.expand(s, out, expansion_cap(budget)),
            |s| s.iter().all(|&v| v == s[0]),
            budget,
        );
        report.states_visited += run.arena.len() as u64;
        match run.status() {
            SearchStatus::Reached => {}
            SearchStatus::Exhausted => {
                report.witness = Some(DigitalLoop::new(x.clone(), idx.decode(&cand))?);
                return Ok(report);
            }
            SearchStatus::BudgetExceeded => report.inconclusive += 1,
        }
    }
    Ok(report)
}

/// All non-constant loops of length 1..=bound, one lexicographically least
/// representative per rotation class.
fn enumerate_loops(idx: &Indexed, bound: usize) -> Vec<Vec<u16>> {
    let n = idx.image.len();
    let dist = idx.distance_matrix();
    let mut canon: HashSet<Vec<u16>> = HashSet::new();
    let mut out = Vec::new();
    for len in 1..=bound {
        for base in 0..n as u16 {
            let mut walk = vec![base];
            enumerate_walks(idx, &dist, base, len, &mut walk, &mut canon, &mut out);
        }
    }
    out
}

fn enumerate_walks(
    idx: &Indexed,
    dist: &[Vec<u32>],
    base: u16,
    len: usize,
    walk: &mut Vec<u16>,
    canon: &mut HashSet<Vec<u16>>,
    out: &mut Vec<Vec<u16>>,
) {
    if walk.len() == len + 1 {
        if walk[walk.len() - 1] != base || walk.iter().all(|&v| v == base) {
            return;
        }
        let cycle = &walk[..len];
        if let Some(c) = min_rotation(cycle) {
            if canon.insert(c) {
                out.push(walk.clone());
            }
        }
        return;
    }
    let cur = *walk.last().unwrap() as usize;
    let remaining = (len + 1 - walk.len()) as u32;
    let mut cand = idx.nstar[cur];
    while cand != 0 {
        let b = cand.trailing_zeros() as u16;
        cand &= cand - 1;
        if dist[b as usize][base as usize] > remaining {
            continue;
        }
        walk.push(b);
        enumerate_walks(idx, dist, base, len, walk, canon, out);
        walk.pop();
    }
}

/// The lexicographically least rotation of the cycle, or `None` for empty.
fn min_rotation(cycle: &[u16]) -> Option<Vec<u16>> {
    if cycle.is_empty() {
        return None;
    }
    let mut best: Option<Vec<u16>> = None;
    for shift in 0..cycle.len() {
        let rotated: Vec<u16> = cycle[shift..]
            .iter()
            .chain(cycle[..shift].iter())
            .copied()
            .collect();
        if best.as_ref().map_or(true, |b| rotated < *b) {
            best = Some(rotated);
        }
    }
    best
}

// ---------------------------------------------------------------------------
// Window search (used by path rewriting).
// ---------------------------------------------------------------------------

pub(crate) enum WindowOutcome {
    /// The chain of window rows from the input to an avoiding row.
    Solved(Vec<Vec<Point>>),
    Exhausted,
    OutOfBudget { states: u64 },
}

/// Deforms a path segment, endpoints pinned, until no entry equals
/// `forbidden` — or reports that no such deformation exists at this length.
pub(crate) fn window_avoid_search(
    image: &Arc<Image>,
    window: &[Point],
    forbidden: &Point,
    budget: &SearchBudget,
) -> Result<WindowOutcome> {
    budget.validate()?;
    if window.len() < 2 {
        return Err(Error::MalformedGrid(
            "a window needs at least two entries".into(),
        ));
    }
    let idx = Indexed::new(image, BITSET_CAP)?;
    let start = idx.encode(window)?;
    let bad = image
        .index_of(forbidden)
        .map(|i| i as u16)
        .ok_or_else(|| Error::NotInImage(forbidden.clone()))?;
    let mut pins = vec![None; start.len()];
    pins[0] = Some(start[0]);
    let last = start.len() - 1;
    pins[last] = Some(start[last]);
    let gen = SeqMoves {
        nstar: &idx.nstar,
        pins,
        tie_ends: false,
    };
    let run = bfs(
        start,
        |s, out| gen.expand(s, out, expansion_cap(budget)),
        |s| s.iter().all(|&v| v != bad),
        budget,
    );
    match run.status() {
        SearchStatus::Reached => {
            let rows = run.chain().unwrap().iter().map(|s| idx.decode(s)).collect();
            Ok(WindowOutcome::Solved(rows))
        }
        SearchStatus::Exhausted => Ok(WindowOutcome::Exhausted),
        SearchStatus::BudgetExceeded => Ok(WindowOutcome::OutOfBudget {
            states: run.report().states_visited,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{box_points, shared, Adjacency, Image};

    fn pt(c: &[i64]) -> Point {
        Point::new(c.to_vec())
    }

    fn square2() -> Arc<Image> {
        shared(Image::new(box_points(&[(0, 1), (0, 1)]), Adjacency::new(2, 1).unwrap()).unwrap())
    }

    fn ring8() -> Arc<Image> {
        let pts: Vec<Point> = box_points(&[(0, 2), (0, 2)])
            .into_iter()
            .filter(|p| p.coords() != [1, 1])
            .collect();
        shared(Image::new(pts, Adjacency::new(2, 1).unwrap()).unwrap())
    }

    fn ring_loop(ring: &Arc<Image>) -> DigitalLoop {
        let seq = vec![
            pt(&[0, 0]),
            pt(&[1, 0]),
            pt(&[2, 0]),
            pt(&[2, 1]),
            pt(&[2, 2]),
            pt(&[1, 2]),
            pt(&[0, 2]),
            pt(&[0, 1]),
            pt(&[0, 0]),
        ];
        DigitalLoop::new(ring.clone(), seq).unwrap()
    }

    fn square_loop(sq: &Arc<Image>) -> DigitalLoop {
        let seq = vec![pt(&[0, 0]), pt(&[1, 0]), pt(&[1, 1]), pt(&[0, 1]), pt(&[0, 0])];
        DigitalLoop::new(sq.clone(), seq).unwrap()
    }

    #[test]
    fn constant_loop_contracts_at_depth_zero() {
        let sq = square2();
        let f = DigitalLoop::constant(sq, pt(&[0, 0]), 0).unwrap();
        let budget = SearchBudget::default().with_pad_len(4);
        let (cert, report) = is_nullhomotopic_bounded(&f, &budget).unwrap();
        assert_eq!(report.status, SearchStatus::Reached);
        assert_eq!(report.states_visited, 1);
        assert_eq!(report.frontier_depth, 0);
        let cert = cert.unwrap();
        assert!(cert.verify().unwrap().valid());
        assert_eq!(cert.steps(), 0);
    }

    #[test]
    fn square_boundary_loop_contracts_at_its_own_length() {
        let sq = square2();
        let f = square_loop(&sq);
        let budget = SearchBudget::default().with_pad_len(4);
        let (cert, report) = is_nullhomotopic_bounded(&f, &budget).unwrap();
        assert_eq!(report.status, SearchStatus::Reached);
        let cert = cert.unwrap();
        assert!(cert.verify().unwrap().valid());
        assert!(cert.steps() <= 3);
        assert_eq!(cert.original(), &f);
    }

    #[test]
    fn ring_loop_cannot_contract_at_its_own_length() {
        let ring = ring8();
        let f = ring_loop(&ring);
        let budget = SearchBudget::default().with_pad_len(8);
        let (cert, report) = is_nullhomotopic_bounded(&f, &budget).unwrap();
        assert!(cert.is_none());
        assert_eq!(report.status, SearchStatus::Exhausted);
        assert!(bounded_evidence(report.status).unwrap().contains("bounded evidence"));
    }

    #[test]
    fn reachable_sets_are_sorted_complete_and_based() {
        let sq = square2();
        let f = square_loop(&sq);
        let budget = SearchBudget::default();
        let (fixed, report) = loop_reachable_set(&f, MoveKind::EndpointFixed, &budget).unwrap();
        assert_eq!(report.status, SearchStatus::Exhausted);
        assert!(fixed.windows(2).all(|w| w[0].seq() < w[1].seq()));
        assert!(fixed.iter().all(|g| g.basepoint() == f.basepoint()));
        assert!(fixed.iter().any(|g| g.is_constant()));
        let (free, _) = loop_reachable_set(&f, MoveKind::LoopPreserving, &budget).unwrap();
        let free_set: HashSet<&[Point]> = free.iter().map(|g| g.seq()).collect();
        assert!(fixed.iter().all(|g| free_set.contains(g.seq())));
        assert!(free.len() > fixed.len());
    }

    #[test]
    fn the_ring_loop_is_rigid_under_endpoint_fixed_moves() {
        // Each interior entry sits between row-neighbors two hops apart on
        // the ring, so no entry can move: the reachable set is the loop alone.
        let ring = ring8();
        let f = ring_loop(&ring);
        let (loops, report) =
            loop_reachable_set(&f, MoveKind::EndpointFixed, &SearchBudget::default()).unwrap();
        assert_eq!(report.status, SearchStatus::Exhausted);
        assert_eq!(loops.len(), 1);
        assert_eq!(loops[0].seq(), f.seq());
    }

    #[test]
    fn tiny_budget_reports_truncation() {
        let sq = square2();
        let f = square_loop(&sq);
        let budget = SearchBudget::default().with_max_states(5);
        let (loops, report) = loop_reachable_set(&f, MoveKind::EndpointFixed, &budget).unwrap();
        assert_eq!(report.status, SearchStatus::BudgetExceeded);
        assert_eq!(loops.len(), 5);
    }

    #[test]
    fn depth_cap_reports_truncation() {
        let sq = square2();
        let f = square_loop(&sq);
        let budget = SearchBudget::default().with_max_depth(1);
        let (_, report) = loop_reachable_set(&f, MoveKind::EndpointFixed, &budget).unwrap();
        assert_eq!(report.status, SearchStatus::BudgetExceeded);
        assert_eq!(report.frontier_depth, 1);
    }

    #[test]
    fn the_filled_square_contracts() {
        let sq = square2();
        let (grid, report) =
            contractibility_search(&sq, None, DEFAULT_SELF_MAP_CAP, &SearchBudget::default())
                .unwrap();
        assert_eq!(report.status, SearchStatus::Reached);
        let grid = grid.unwrap();
        assert!(verify_contraction(&sq, &grid, None).unwrap().valid());
    }

    #[test]
    fn the_filled_square_contracts_to_a_pinned_corner() {
        let sq = square2();
        let corner = pt(&[0, 0]);
        let (grid, report) =
            contractibility_search(&sq, Some(&corner), DEFAULT_SELF_MAP_CAP, &SearchBudget::default())
                .unwrap();
        assert_eq!(report.status, SearchStatus::Reached);
        let grid = grid.unwrap();
        let check = verify_contraction(&sq, &grid, Some(&corner)).unwrap();
        assert!(check.valid());
        let last = grid.rows().last().unwrap();
        assert!(last.iter().all(|p| p == &corner));
    }

    #[test]
    fn a_four_point_diamond_contracts_under_full_adjacency() {
        let pts = vec![pt(&[0, 1]), pt(&[1, 0]), pt(&[1, 2]), pt(&[2, 1])];
        let x = shared(Image::new(pts, Adjacency::new(2, 2).unwrap()).unwrap());
        let (grid, report) =
            contractibility_search(&x, None, DEFAULT_SELF_MAP_CAP, &SearchBudget::default())
                .unwrap();
        assert_eq!(report.status, SearchStatus::Reached);
        assert!(grid.is_some());
    }

    #[test]
    fn the_eight_point_ring_does_not_contract() {
        let ring = ring8();
        let (grid, report) =
            contractibility_search(&ring, None, 8, &SearchBudget::default()).unwrap();
        assert!(grid.is_none());
        assert_eq!(report.status, SearchStatus::Exhausted);
    }

    #[test]
    fn the_size_cap_is_enforced() {
        let ring = ring8();
        let err = contractibility_search(&ring, None, DEFAULT_SELF_MAP_CAP, &SearchBudget::default())
            .unwrap_err();
        assert!(matches!(err, Error::CapExceeded { size: 8, cap: 7 }));
    }

    #[test]
    fn wide_states_budget_out_instead_of_hanging() {
        // A filled 5x5 box under 8-adjacency is floppy: the identity map
        // alone has far too many one-step neighbors to enumerate.  The
        // per-expansion cap must kick in and the search must come back
        // quickly with a truncation verdict instead of hanging.
        let x = shared(
            Image::new(box_points(&[(0, 4), (0, 4)]), Adjacency::new(2, 2).unwrap()).unwrap(),
        );
        let budget = SearchBudget::default().with_max_states(2_000);
        let (found, report) = contractibility_search(&x, None, 25, &budget).unwrap();
        assert!(found.is_none());
        assert_eq!(report.status, SearchStatus::BudgetExceeded);
        assert!(report.states_visited <= 2_000);
    }

    #[test]
    fn the_rigid_sphere_surface_never_contracts_to_a_map_constant() {
        // The punctured-box sphere is rigid enough that the whole homotopy
        // class of its identity map fits in the default budget.  The closure
        // is complete and contains no constant, which settles that the image
        // does not contract (the map move relation has no length caveat).
        let x = crate::catalog::image_entry("MSS_6").unwrap().image;
        let (found, report) =
            contractibility_search(&x, None, 26, &SearchBudget::default()).unwrap();
        assert!(found.is_none());
        assert_eq!(report.status, SearchStatus::Exhausted);
    }

    #[test]
    fn hole_detection_separates_the_ring_from_the_square() {
        let budget = SearchBudget::default();
        let sq = has_hole_direct(&square2(), 8, &budget).unwrap();
        assert!(!sq.has_hole);
        assert!(sq.subsets_checked > 0);
        let ring = has_hole_direct(&ring8(), 8, &budget).unwrap();
        assert!(ring.has_hole);
        let witness = ring.witness.unwrap();
        assert!(witness.len() >= 4);
    }

    #[test]
    fn hole_and_componentwise_contractibility_agree_on_small_samples() {
        let path3 = shared(
            Image::new(
                vec![pt(&[0, 0]), pt(&[1, 0]), pt(&[2, 0])],
                Adjacency::new(2, 1).unwrap(),
            )
            .unwrap(),
        );
        let two_bits = shared(
            Image::new(
                vec![pt(&[0, 0]), pt(&[3, 3])],
                Adjacency::new(2, 1).unwrap(),
            )
            .unwrap(),
        );
        let sample = vec![square2(), ring8(), path3, two_bits];
        let report = no_hole_equiv_check(&sample, 8, &SearchBudget::default()).unwrap();
        assert!(report.agree);
        assert_eq!(report.images_checked, 4);
        assert_eq!(report.disagreements, 0);
    }

    #[test]
    fn a_given_ring_loop_is_a_loophole_witness() {
        let ring = ring8();
        let f = ring_loop(&ring);
        let report = has_loophole_bounded(
            &ring,
            8,
            &SearchBudget::default(),
            CandidateMode::Given(vec![f.clone()]),
        )
        .unwrap();
        let witness = report.witness.unwrap();
        assert_eq!(witness.seq(), f.seq());
        assert_eq!(report.loops_tested, 1);
        assert_eq!(report.inconclusive, 0);
        assert!(!report.sampled);
    }

    #[test]
    fn short_loops_on_the_ring_all_contract() {
        let ring = ring8();
        let report = has_loophole_bounded(
            &ring,
            4,
            &SearchBudget::default(),
            CandidateMode::Exhaustive,
        )
        .unwrap();
        assert!(report.witness.is_none());
        assert!(report.loops_tested > 0);
        assert_eq!(report.inconclusive, 0);
    }

    #[test]
    fn exhaustive_loopholes_on_the_ring_surface_at_length_eight() {
        let ring = ring8();
        let report = has_loophole_bounded(
            &ring,
            8,
            &SearchBudget::default(),
            CandidateMode::Exhaustive,
        )
        .unwrap();
        let witness = report.witness.unwrap();
        assert_eq!(witness.len(), 8);
    }

    #[test]
    fn sampled_loopholes_are_reproducible() {
        let ring = ring8();
        let mode = CandidateMode::Sample { count: 16, seed: 7 };
        let a = has_loophole_bounded(&ring, 6, &SearchBudget::default(), mode.clone()).unwrap();
        let b = has_loophole_bounded(&ring, 6, &SearchBudget::default(), mode).unwrap();
        assert_eq!(a.loops_tested, b.loops_tested);
        assert_eq!(a.states_visited, b.states_visited);
        assert_eq!(
            a.witness.as_ref().map(|w| w.seq().to_vec()),
            b.witness.as_ref().map(|w| w.seq().to_vec())
        );
        assert!(a.sampled);
    }

    #[test]
    fn window_rewrites_need_enough_room() {
        let window = vec![pt(&[0, 0]), pt(&[1, 0]), pt(&[1, 1])];
        let forbidden = pt(&[1, 0]);
        // Under strict adjacency the corner cannot be bypassed in two steps.
        let strict = square2();
        match window_avoid_search(&strict, &window, &forbidden, &SearchBudget::default()).unwrap()
        {
            WindowOutcome::Exhausted => {}
            _ => panic!("expected exhaustion"),
        }
        // Under full adjacency the opposite corner is one move away.
        let full = shared(
            Image::new(box_points(&[(0, 1), (0, 1)]), Adjacency::new(2, 2).unwrap()).unwrap(),
        );
        match window_avoid_search(&full, &window, &forbidden, &SearchBudget::default()).unwrap() {
            WindowOutcome::Solved(rows) => {
                assert_eq!(rows.first().unwrap(), &window);
                let last = rows.last().unwrap();
                assert!(last.iter().all(|p| p != &forbidden));
                assert_eq!(last[0], window[0]);
                assert_eq!(last[2], window[2]);
            }
            _ => panic!("expected a solution"),
        }
    }

    #[test]
    fn budgets_must_be_positive() {
        let sq = square2();
        let f = square_loop(&sq);
        let bad = SearchBudget::default().with_max_states(0);
        assert!(matches!(
            loop_reachable_set(&f, MoveKind::EndpointFixed, &bad),
            Err(Error::BadBudget(_))
        ));
        let short = SearchBudget::default().with_pad_len(2);
        assert!(matches!(
            is_nullhomotopic_bounded(&f, &short),
            Err(Error::BadBudget(_))
        ));
    }
}
