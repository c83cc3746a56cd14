//! The reproduction suite: ten independent checks covering every headline
//! number and structural claim the library is built around, from the Euler
//! characteristic table to the bounded counterexample searches.  The
//! command-line `reproduce` subcommand prints one pass/fail line per check;
//! the acceptance tests assert each check individually.
//!
//! Every check records its sub-results as stable text lines (no wall-clock
//! values, so machine output is byte-identical across runs with the same
//! seed); elapsed time is reported separately and compared against the
//! fixed caps where a check carries one.

use std::fmt::Debug;
use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::catalog::{self, CatalogItem};
use crate::error::{Error, Result};
use crate::euler::{
    boundary_curve_chi, connected_sum_chi, enumerate_simplices, simplex_census, DiskKind,
};
use crate::homotopy::{
    verify_contraction, CertificateKind, DigitalLoop, NullhomotopyCertificate,
};
use crate::lattice::{box_points, shared, Adjacency, Image, Point};
use crate::oracle::{
    bounded_evidence, contractibility_search, has_hole_direct, has_loophole_bounded,
    is_nullhomotopic_bounded, loop_reachable_set, no_hole_equiv_check, CandidateMode, MoveKind,
    SearchBudget, SearchStatus,
};
use crate::pi1tools::{
    adjacency_lift, clamp_contract_mss18, clamp_contract_mss6, tree_fold_contract,
};
use crate::walks::random_loop;

/// Seed used when the caller does not pick one; pinned so that published
/// outputs are byte-identical everywhere.
pub const DEFAULT_SEED: u64 = 2026;

/// Outcome of one reproduction check.
#[derive(Clone, Debug)]
pub struct CriterionOutcome {
    /// 1-based position in the suite.
    pub index: u32,
    pub name: &'static str,
    pub passed: bool,
    /// One stable line per sub-check ("ok: ..." or "FAIL: ...").
    pub details: Vec<String>,
    /// Wall-clock time of the check.  Not part of machine output.
    pub seconds: f64,
}

struct Checker {
    details: Vec<String>,
    failures: usize,
    started: Instant,
}

impl Checker {
    fn new() -> Self {
        Checker {
            details: Vec::new(),
            failures: 0,
            started: Instant::now(),
        }
    }

    fn check(&mut self, ok: bool, claim: &str) {
        if ok {
            self.details.push(format!("ok: {claim}"));
        } else {
            self.failures += 1;
            self.details.push(format!("FAIL: {claim}"));
        }
    }

    fn eq<T: PartialEq + Debug>(&mut self, claim: &str, expected: &T, got: &T) {
        if expected == got {
            self.details.push(format!("ok: {claim} = {expected:?}"));
        } else {
            self.failures += 1;
            self.details
                .push(format!("FAIL: {claim} — expected {expected:?}, got {got:?}"));
        }
    }

    fn error(&mut self, e: &Error) {
        self.failures += 1;
        self.details.push(format!("FAIL: error while checking: {e}"));
    }

    fn cap(&mut self, limit: Duration, label: &str) {
        self.check(self.started.elapsed() < limit, label);
    }
}

fn census_of(id: &str) -> Result<(Vec<u64>, i64)> {
    let entry = catalog::image_entry(id)?;
    let census = simplex_census(&entry.image);
    let chi = census.chi();
    Ok((census.alpha, chi))
}

fn chi_table(_seed: u64, c: &mut Checker) -> Result<()> {
    let full: [(&str, &[u64], i64); 4] = [
        ("MSS_18", &[10, 20, 8], -2),
        ("MSC8s", &[8, 17, 12, 2], 1),
        ("MSC8ps", &[5, 8, 4], 1),
        ("MSC4s", &[9, 12], -3),
    ];
    for (id, alpha, chi) in full {
        let (got_alpha, got_chi) = census_of(id)?;
        c.eq(&format!("simplex counts of {id}"), &alpha.to_vec(), &got_alpha);
        c.eq(&format!("chi of {id}"), &chi, &got_chi);
    }
    for (id, chi) in [("MSS_18p", 2i64), ("MSS18_SHARP", -6)] {
        let (_, got_chi) = census_of(id)?;
        c.eq(&format!("chi of {id}"), &chi, &got_chi);
    }
    c.cap(Duration::from_secs(1), "the whole table computes within the 1 s cap");
    Ok(())
}

fn sphere_faces(_seed: u64, c: &mut Checker) -> Result<()> {
    let entry = catalog::image_entry("MSS_18")?;
    let labeled = |name: &str| -> Point {
        entry
            .label(name)
            .expect("the ten-point sphere labels all its points")
            .clone()
    };
    let expected_names = [
        ["c0", "c1", "c9"],
        ["c0", "c1", "c6"],
        ["c0", "c5", "c6"],
        ["c0", "c5", "c9"],
        ["c2", "c3", "c7"],
        ["c2", "c3", "c8"],
        ["c3", "c4", "c7"],
        ["c3", "c4", "c8"],
    ];
    let mut expected: Vec<Vec<Point>> = expected_names
        .iter()
        .map(|names| {
            let mut tri: Vec<Point> = names.iter().map(|n| labeled(n)).collect();
            tri.sort();
            tri
        })
        .collect();
    expected.sort();
    let mut got: Vec<Vec<Point>> = enumerate_simplices(&entry.image, 2)
        .into_iter()
        .map(|mut tri| {
            tri.sort();
            tri
        })
        .collect();
    got.sort();
    c.eq("number of triangles on MSS_18", &8usize, &got.len());
    c.check(
        expected == got,
        "the triangles are exactly the eight listed corner patches",
    );
    Ok(())
}

fn connected_sums(_seed: u64, c: &mut Checker) -> Result<()> {
    let (_, chi_mss6) = census_of("MSS_6")?;
    let (_, direct6) = census_of("MSS6_SHARP")?;
    let formula6 = connected_sum_chi(chi_mss6, chi_mss6, DiskKind::Square4);
    c.eq(
        "direct census of MSS6_SHARP vs the gluing formula over the square disk",
        &formula6,
        &direct6,
    );
    c.eq("the common value", &-38i64, &direct6);
    let (_, chi_mss18) = census_of("MSS_18")?;
    let (_, direct18) = census_of("MSS18_SHARP")?;
    let formula18 = connected_sum_chi(chi_mss18, chi_mss18, DiskKind::Diamond8);
    c.eq(
        "direct census of MSS18_SHARP vs the gluing formula over the diamond disk",
        &formula18,
        &direct18,
    );
    c.eq("the common value", &-6i64, &direct18);
    for id in ["MSC8s", "MSC8ps", "MSC4s"] {
        let entry = catalog::image_entry(id)?;
        let disk = entry
            .disk
            .as_ref()
            .expect("the three disk entries carry disk structure");
        c.eq(
            &format!("chi of the boundary curve of {id}"),
            &0i64,
            &boundary_curve_chi(disk),
        );
    }
    Ok(())
}

fn certificate_suite(_seed: u64, c: &mut Checker) -> Result<()> {
    let CatalogItem::Grid {
        grid,
        original: Some(d),
        ..
    } = catalog::item("D_TABLE")?
    else {
        return Err(Error::UnknownCatalogId("D_TABLE".into()));
    };
    let padded = DigitalLoop::new(grid.codomain().clone(), grid.rows()[0].clone())?;
    let cert = NullhomotopyCertificate::new(d, padded, grid, CertificateKind::EndpointFixed)?;
    c.check(
        cert.verify()?.valid(),
        "the seven-row table contracts the equator loop of MSS_6 endpoint-fixed",
    );

    let entry = catalog::image_entry("X_cnp")?;
    let grid = entry
        .attached_grid("deformation")
        .expect("the punctured-box entry carries its deformation grid");
    c.check(
        verify_contraction(&entry.image, grid, None)?.valid(),
        "the seventeen-point box deformation is a valid contraction",
    );
    let x0 = Point::new(vec![0, 0, 1]);
    c.check(
        !verify_contraction(&entry.image, grid, Some(&x0))?.valid(),
        "the same deformation moves the marked basepoint, failing the pointed check",
    );

    let CatalogItem::Grid { grid, .. } = catalog::item("MSS18p_CONTRACTION")? else {
        return Err(Error::UnknownCatalogId("MSS18p_CONTRACTION".into()));
    };
    let entry = catalog::image_entry("MSS_18p")?;
    let origin = Point::new(vec![0, 0, 0]);
    c.check(
        verify_contraction(&entry.image, &grid, Some(&origin))?.valid(),
        "the octahedron contraction verifies pointed at the origin",
    );
    c.cap(Duration::from_secs(1), "all certificates verify within the 1 s cap");
    Ok(())
}

fn contraction_batteries(seed: u64, c: &mut Checker) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mss18 = catalog::image_entry("MSS_18")?;
    let c0 = Point::new(vec![0, 0, 0]);
    let adj18 = Adjacency::new(3, 2)?;
    let adj6 = Adjacency::new(3, 1)?;

    let mut all = true;
    for _ in 0..200 {
        let len = rng.gen_range(1..=20);
        let f = random_loop(&mss18.image, &c0, len, &mut rng)?;
        let cert = clamp_contract_mss18(&f)?;
        all &= cert.kind() == CertificateKind::EndpointFixed && cert.verify()?.valid();
    }
    c.check(all, "200 random loops on MSS_18 contract by coordinate clamping");

    let mss18_26 = shared(mss18.image.with_adjacency(Adjacency::new(3, 3)?)?);
    let mut all = true;
    for _ in 0..200 {
        let len = rng.gen_range(1..=20);
        let f = random_loop(&mss18_26, &c0, len, &mut rng)?;
        let cert = adjacency_lift(&f, adj18, clamp_contract_mss18)?;
        all &= cert.verify()?.valid();
    }
    c.check(
        all,
        "200 random 26-adjacency loops on MSS_18 contract by lifting through 18",
    );

    let mss6 = catalog::image_entry("MSS_6")?;
    let base6 = Point::new(vec![0, 0, 1]);
    let mut all = true;
    for _ in 0..200 {
        let len = rng.gen_range(1..=24);
        let f = random_loop(&mss6.image, &base6, len, &mut rng)?;
        let cert = clamp_contract_mss6(&f)?;
        all &= cert.kind() == CertificateKind::EndpointFixed && cert.verify()?.valid();
    }
    c.check(all, "200 random loops on MSS_6 contract by coordinate clamping");

    let mss6_26 = shared(mss6.image.with_adjacency(Adjacency::new(3, 3)?)?);
    let mut all = true;
    for _ in 0..200 {
        let len = rng.gen_range(1..=24);
        let f = random_loop(&mss6_26, &base6, len, &mut rng)?;
        let cert = adjacency_lift(&f, adj18, |g| adjacency_lift(g, adj6, clamp_contract_mss6))?;
        all &= cert.verify()?.valid();
    }
    c.check(
        all,
        "200 random 26-adjacency loops on MSS_6 contract by the chained lift through 18 and 6",
    );
    c.cap(Duration::from_secs(60), "all batteries finish within the 60 s cap");
    Ok(())
}

fn six_adjacency_components(_seed: u64, c: &mut Checker) -> Result<()> {
    let adj6 = Adjacency::new(3, 1)?;
    for (id, expected) in [("MSS_18", 10usize), ("MSS_18p", 6usize)] {
        let entry = catalog::image_entry(id)?;
        let x = entry.image.with_adjacency(adj6)?;
        let blocks = x.components();
        c.eq(
            &format!("6-adjacency component count of {id}"),
            &expected,
            &blocks.len(),
        );
        c.check(
            blocks.iter().all(|b| b.len() == 1),
            &format!("every 6-adjacency component of {id} is a single point"),
        );
    }
    Ok(())
}

fn seven_point_counterexample(seed: u64, c: &mut Checker) -> Result<()> {
    let fig = catalog::image_entry("FIG48")?;
    let tree = shared(fig.image.with_adjacency(Adjacency::new(2, 1)?)?);
    let edges: usize = tree.adjacency_lists().iter().map(|l| l.len()).sum::<usize>() / 2;
    c.check(
        edges + tree.components().len() == tree.len(),
        "the seven-point figure is acyclic under 4-adjacency",
    );

    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let base = Point::new(vec![0, 0]);
    let mut all = true;
    for _ in 0..50 {
        let len = rng.gen_range(1..=12);
        let f = random_loop(&tree, &base, len, &mut rng)?;
        let cert = tree_fold_contract(&f)?;
        all &= cert.verify()?.valid();
    }
    c.check(all, "50 random loops in the tree fold to the basepoint");

    let cycle = fig
        .attached_loop("7cycle")
        .expect("the figure carries its seven-cycle");
    let budget = SearchBudget::default()
        .with_max_states(1_000_000)
        .with_pad_len(10);
    let (cert, report) = is_nullhomotopic_bounded(cycle, &budget)?;
    c.eq(
        "bounded search over the padded seven-cycle under 8-adjacency",
        &SearchStatus::Exhausted,
        &report.status,
    );
    match cert {
        None => c.check(true, "no constant loop was reached"),
        Some(cert) => c.check(
            false,
            &format!(
                "a constant WAS reached: a {}-step endpoint-fixed contraction exists and its certificate {}",
                cert.steps(),
                if cert.verify()?.valid() {
                    "verifies"
                } else {
                    "does not verify"
                },
            ),
        ),
    }

    let lifted = adjacency_lift(cycle, Adjacency::new(2, 1)?, |g| {
        NullhomotopyCertificate::trivial(g)
    });
    c.check(
        matches!(lifted, Err(Error::HypothesisFailed { .. })),
        "lifting the seven-cycle through 4-adjacency fails its two-step hypothesis",
    );
    Ok(())
}

fn puncture_loop_rotations(_seed: u64, c: &mut Checker) -> Result<()> {
    let entry = catalog::image_entry("LOOPHOLE_X")?;
    let rim = entry
        .attached_loop("rim")
        .expect("the punctured shell carries its rim loop");
    let (set, report) = loop_reachable_set(rim, MoveKind::LoopPreserving, &SearchBudget::default())?;
    c.eq(
        "loops reachable from the rim by loop-preserving moves at fixed length",
        &8usize,
        &set.len(),
    );
    c.check(
        report.status == SearchStatus::Exhausted,
        "the closure is complete, not budget-truncated",
    );
    let mut expected: Vec<Vec<Point>> = (0..rim.len())
        .map(|k| rim.rotate(k).seq().to_vec())
        .collect();
    expected.sort();
    let got: Vec<Vec<Point>> = set.iter().map(|l| l.seq().to_vec()).collect();
    c.check(got == expected, "every reachable loop is a rotation of the rim");
    c.check(
        set.iter().all(|l| !l.is_constant()),
        "no constant loop is reachable, so the rim is a loophole witness",
    );
    c.cap(Duration::from_secs(120), "the closure computes within the 120 s cap");
    Ok(())
}

fn hole_equivalence(_seed: u64, c: &mut Checker) -> Result<()> {
    let pts = box_points(&[(0, 2), (0, 2)]);
    let budget = SearchBudget::default();
    let mut all_59 = true;
    let mut tested_59 = 0u64;
    for u in [1usize, 2] {
        let adjacency = Adjacency::new(2, u)?;
        let mut sample = Vec::new();
        for mask in 1u32..(1 << pts.len()) {
            if mask.count_ones() > 5 {
                continue;
            }
            let subset: Vec<Point> = pts
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, p)| p.clone())
                .collect();
            let image = Image::new(subset, adjacency)?;
            if image.is_connected() {
                sample.push(shared(image));
            }
        }
        let report = no_hole_equiv_check(&sample, 5, &budget)?;
        c.check(
            report.agree && report.disagreements == 0,
            &format!(
                "hole-freeness matches componentwise contractibility on all {} connected subsets under {}-adjacency",
                report.images_checked,
                adjacency.name().unwrap_or("?"),
            ),
        );
        for x in &sample {
            if has_hole_direct(x, 5, &budget)?.has_hole {
                continue;
            }
            let rep = has_loophole_bounded(x, 4, &budget, CandidateMode::Exhaustive)?;
            all_59 &= rep.witness.is_none() && rep.inconclusive == 0;
            tested_59 += 1;
        }
    }
    c.check(
        all_59 && tested_59 > 0,
        "no hole-free subset shows a loophole witness at length bound 4",
    );
    Ok(())
}

fn bounded_evidence_labels(_seed: u64, c: &mut Checker) -> Result<()> {
    c.check(
        bounded_evidence(SearchStatus::Reached).is_none(),
        "a search that reached its target carries no evidence label",
    );

    let fig = catalog::image_entry("FIG48")?;
    let cycle = fig
        .attached_loop("7cycle")
        .expect("the figure carries its seven-cycle");
    let budget = SearchBudget::default()
        .with_max_states(200_000)
        .with_pad_len(8);
    let (cert, report) = is_nullhomotopic_bounded(cycle, &budget)?;
    let labeled = bounded_evidence(report.status)
        .map(|s| s.contains("bounded evidence"))
        .unwrap_or(false);
    c.check(
        cert.is_none() && labeled,
        &format!(
            "the seven-cycle probe stays unresolved and carries the bounded-evidence label (status {:?})",
            report.status
        ),
    );

    let mss6 = catalog::image_entry("MSS_6")?;
    let (found, report) = contractibility_search(
        &mss6.image,
        None,
        mss6.image.len(),
        &SearchBudget::default().with_max_states(20_000),
    )?;
    let labeled = bounded_evidence(report.status)
        .map(|s| s.contains("bounded evidence"))
        .unwrap_or(false);
    c.check(
        found.is_none() && labeled,
        &format!(
            "the sphere surface's failed contraction search is labeled as bounded evidence (status {:?})",
            report.status
        ),
    );

    let xcnp = catalog::image_entry("X_cnp")?;
    let x0 = Point::new(vec![0, 0, 1]);
    let (found, report) = contractibility_search(
        &xcnp.image,
        Some(&x0),
        xcnp.image.len(),
        &SearchBudget::default().with_max_states(20_000),
    )?;
    let labeled = bounded_evidence(report.status)
        .map(|s| s.contains("bounded evidence"))
        .unwrap_or(false);
    c.check(
        found.is_none() && labeled,
        &format!(
            "the pointed contraction search of the punctured box is labeled as bounded evidence (status {:?})",
            report.status
        ),
    );
    Ok(())
}

type Runner = fn(u64, &mut Checker) -> Result<()>;

const SUITE: [(u32, &str, Runner); 10] = [
    (1, "euler-characteristic-table", chi_table),
    (2, "ten-point-sphere-faces", sphere_faces),
    (3, "connected-sum-cross-check", connected_sums),
    (4, "certificate-suite", certificate_suite),
    (5, "random-loop-contraction-batteries", contraction_batteries),
    (6, "six-adjacency-components", six_adjacency_components),
    (7, "seven-point-counterexample", seven_point_counterexample),
    (8, "puncture-loop-rotations", puncture_loop_rotations),
    (9, "hole-contractibility-equivalence", hole_equivalence),
    (10, "bounded-evidence-labels", bounded_evidence_labels),
];

/// Runs one check by its 1-based index.
pub fn run_one(index: u32, seed: u64) -> Option<CriterionOutcome> {
    let (idx, name, runner) = SUITE.iter().find(|(i, _, _)| *i == index)?;
    let mut c = Checker::new();
    if let Err(e) = runner(seed, &mut c) {
        c.error(&e);
    }
    Some(CriterionOutcome {
        index: *idx,
        name,
        passed: c.failures == 0,
        seconds: c.started.elapsed().as_secs_f64(),
        details: c.details,
    })
}

/// Runs the whole suite (or the subset named by `only`) with the given seed.
pub fn run_all(seed: u64, only: Option<&[u32]>) -> Vec<CriterionOutcome> {
    SUITE
        .iter()
        .filter(|(i, _, _)| only.is_none_or(|f| f.contains(i)))
        .map(|(i, _, _)| run_one(*i, seed).expect("suite indices are valid"))
        .collect()
}
