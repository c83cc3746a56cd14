//! `digitop` — digital topology on integer lattices from the command line:
//! clique censuses and Euler characteristics, homotopy-grid verification,
//! constructive loop contraction, bounded loop-space searches, and the
//! built-in reproduction suite.

mod render;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use digitop::catalog::{self, CatalogItem, ImageEntry};
use digitop::error::{Error, Result};
use digitop::euler::{euler_characteristic, is_isomorphic};
use digitop::homotopy::{
    verify_contraction, verify_homotopy, CertificateKind, DigitalLoop, DigitalPath, GridFlags,
    NullhomotopyCertificate,
};
use digitop::io;
use digitop::lattice::{shared, Image};
use digitop::oracle::{
    bounded_evidence, has_hole_direct, is_nullhomotopic_bounded, loop_reachable_set, MoveKind,
    SearchBudget, SearchStatus,
};
use digitop::pi1tools::contract_auto;
use digitop::reproduce::{run_all, DEFAULT_SEED};

const BUDGET_ENV: &str = "DIGITOP_MAX_STATES";

#[derive(Parser)]
#[command(
    name = "digitop",
    version,
    about = "Digital topology on integer lattices",
    after_help = "Exit codes: 0 success; 1 verification or semantic failure; 2 usage; \
                  3 bounded search ended without reaching its target.\n\
                  The environment variable DIGITOP_MAX_STATES sets the default state \
                  budget for `explore` and `nohole`."
)]
struct Cli {
    /// Output format; `human` mirrors the JSON output field-for-field.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,

    /// Upper bound on worker threads. Results are independent of this value.
    #[arg(long, global = true, default_value_t = 1,
          value_parser = clap::value_parser!(u32).range(1..))]
    threads: u32,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Moves {
    /// One-step deformations that pin both endpoints to the basepoint.
    Fixed,
    /// One-step deformations that only keep first and last entries equal.
    Looppres,
}

#[derive(Subcommand)]
enum Command {
    /// Simplex census and Euler characteristic of an image.
    Chi {
        /// Catalog id or image file.
        image: String,
    },
    /// Check a homotopy grid and report what it certifies.
    Verify {
        /// Catalog grid id or homotopy file.
        grid: String,
    },
    /// Build and check a contraction certificate for a loop on a catalog image.
    Contract {
        /// Catalog image id the loop lives on.
        id: String,
        /// Attached loop name, catalog loop id, or path file.
        #[arg(long = "loop")]
        loop_ref: String,
        /// Also write the certificate's grid to this homotopy file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bounded breadth-first search over a loop's one-step deformations.
    Explore {
        /// Catalog id or image file.
        image: String,
        /// Attached loop name, catalog loop id, or path file.
        #[arg(long = "loop")]
        loop_ref: String,
        #[arg(long, value_enum, default_value_t = Moves::Fixed)]
        moves: Moves,
        /// Pad the loop to this length first (default: its own length).
        #[arg(long)]
        pad: Option<usize>,
        /// State budget (default: DIGITOP_MAX_STATES or 10000000).
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Decide hole-freeness of a tiny image by exhaustive search.
    Nohole {
        /// Catalog id or image file.
        image: String,
        /// Largest image size the exhaustive search accepts.
        #[arg(long, default_value_t = 7)]
        cap: usize,
        /// State budget (default: DIGITOP_MAX_STATES or 10000000).
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Test two images for adjacency-preserving isomorphism.
    Iso {
        /// Catalog id or image file.
        a: String,
        /// Catalog id or image file.
        b: String,
    },
    /// The built-in example images, loops, and grids.
    Catalog {
        #[command(subcommand)]
        what: CatalogCmd,
    },
    /// Run the reproduction suite and print one pass/fail entry per check.
    Reproduce {
        /// Seed for the randomized batteries.
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Comma-separated check numbers to run (1-10).
        #[arg(long, value_delimiter = ',',
              value_parser = clap::value_parser!(u32).range(1..=10))]
        only: Option<Vec<u32>>,
    },
}

#[derive(Subcommand)]
enum CatalogCmd {
    /// One line per entry: id, kind, and description.
    List,
    /// Reprint entries as loadable JSON files.
    Dump {
        /// Dump just this entry (default: all, keyed by id).
        id: Option<String>,
    },
}

/// Prints to stdout, tolerating a closed pipe (e.g. `digitop ... | head`).
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_all(text.as_bytes()) {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            panic!("failed printing to stdout: {e}");
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok((value, code)) => {
            match cli.format {
                Format::Json => {
                    let mut text =
                        serde_json::to_string_pretty(&value).expect("report JSON serializes");
                    text.push('\n');
                    emit(&text);
                }
                Format::Human => emit(&render::human(&value)),
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::BudgetExceeded { .. } => 3,
                _ => 1,
            })
        }
    }
}

fn execute(command: &Command) -> Result<(Value, u8)> {
    match command {
        Command::Chi { image } => chi(image),
        Command::Verify { grid } => verify(grid),
        Command::Contract { id, loop_ref, out } => contract(id, loop_ref, out.as_deref()),
        Command::Explore {
            image,
            loop_ref,
            moves,
            pad,
            budget,
        } => explore(image, loop_ref, *moves, *pad, *budget),
        Command::Nohole { image, cap, budget } => nohole(image, *cap, *budget),
        Command::Iso { a, b } => iso(a, b),
        Command::Catalog { what } => match what {
            CatalogCmd::List => catalog_list(),
            CatalogCmd::Dump { id } => catalog_dump(id.as_deref()),
        },
        Command::Reproduce { seed, only } => reproduce(*seed, only.as_deref()),
    }
}

/// A catalog image id, or a path to an image file.
fn resolve_image(arg: &str) -> Result<(Option<ImageEntry>, Arc<Image>)> {
    if catalog::ids().contains(&arg) {
        let entry = catalog::image_entry(arg)?;
        let image = entry.image.clone();
        Ok((Some(entry), image))
    } else {
        Ok((None, shared(io::load_image(Path::new(arg))?)))
    }
}

/// An attached loop name on the entry, a catalog loop id, or a path file;
/// whatever the source, the loop must live on the target image.
fn resolve_loop(entry: Option<&ImageEntry>, image: &Arc<Image>, arg: &str) -> Result<DigitalLoop> {
    if let Some(found) = entry.and_then(|e| e.attached_loop(arg)) {
        return Ok(found.clone());
    }
    let lp = if catalog::ids().contains(&arg) {
        match catalog::item(arg)? {
            CatalogItem::Loop { item, .. } => item,
            _ => {
                return Err(Error::UnknownCatalogId(format!(
                    "{arg} does not name a loop"
                )))
            }
        }
    } else {
        io::load_loop(Path::new(arg))?
    };
    if lp.image().as_ref() != image.as_ref() {
        return Err(Error::ImageMismatch);
    }
    Ok(lp)
}

fn budget_with(states: Option<u64>) -> Result<SearchBudget> {
    let budget = SearchBudget::default();
    let states = match states {
        Some(n) => Some(n),
        None => match std::env::var(BUDGET_ENV) {
            Ok(raw) => Some(raw.parse::<u64>().map_err(|_| {
                Error::BadBudget(format!("{BUDGET_ENV} must be a positive integer, got {raw:?}"))
            })?),
            Err(_) => None,
        },
    };
    Ok(match states {
        Some(n) => budget.with_max_states(n),
        None => budget,
    })
}

fn flags_json(flags: &GridFlags) -> Value {
    json!({
        "endpoint_fixed": flags.endpoint_fixed,
        "loop_preserving": flags.loop_preserving,
        "pointed_at": flags.pointed_at.as_ref().map(|p| p.coords().to_vec()),
    })
}

fn chi(image: &str) -> Result<(Value, u8)> {
    let (_, image) = resolve_image(image)?;
    let report = euler_characteristic(&image);
    Ok((serde_json::to_value(&report).expect("report serializes"), 0))
}

fn verify(grid: &str) -> Result<(Value, u8)> {
    let (grid, original) = if catalog::ids().contains(&grid) {
        match catalog::item(grid)? {
            CatalogItem::Grid { grid, original, .. } => (grid, original),
            _ => {
                return Err(Error::UnknownCatalogId(format!(
                    "{grid} does not name a homotopy grid"
                )))
            }
        }
    } else {
        (io::load_homotopy(Path::new(grid))?, None)
    };
    let flags = grid.flags().clone();
    let steps = grid.steps();
    let width = grid.width();
    let codomain = grid.codomain().clone();
    let rows = grid.rows().to_vec();
    let last = rows.last().expect("grids have rows").clone();
    let last_constant = last.iter().all(|p| p == &last[0]);

    let (certifies, valid) = if let Some(original) = original {
        let padded = DigitalLoop::new(codomain, rows[0].clone())?;
        let kind = if flags.endpoint_fixed {
            CertificateKind::EndpointFixed
        } else {
            CertificateKind::LoopPreserving
        };
        let cert = NullhomotopyCertificate::new(original, padded, grid, kind)?;
        let what = match kind {
            CertificateKind::EndpointFixed => "endpoint-fixed contraction of the attached loop",
            CertificateKind::LoopPreserving => "loop-preserving contraction of the attached loop",
        };
        (what, cert.verify()?.valid())
    } else if grid.domain_order().is_some() {
        let report = verify_contraction(&codomain, &grid, flags.pointed_at.as_ref())?;
        let what = if flags.pointed_at.is_some() {
            "pointed contraction of the identity map to a constant"
        } else {
            "contraction of the identity map to a constant"
        };
        (what, report.valid())
    } else if last_constant && (flags.endpoint_fixed || flags.loop_preserving) {
        let first = DigitalLoop::new(codomain, rows[0].clone())?;
        let kind = if flags.endpoint_fixed {
            CertificateKind::EndpointFixed
        } else {
            CertificateKind::LoopPreserving
        };
        let cert = NullhomotopyCertificate::new(first.clone(), first, grid, kind)?;
        let what = match kind {
            CertificateKind::EndpointFixed => "endpoint-fixed contraction of its first row",
            CertificateKind::LoopPreserving => "loop-preserving contraction of its first row",
        };
        (what, cert.verify()?.valid())
    } else {
        let a = DigitalPath::new(codomain.clone(), rows[0].clone())?;
        let b = DigitalPath::new(codomain, last)?;
        (
            "row-by-row homotopy from its first row to its last",
            verify_homotopy(&grid, &a, &b)?.valid(),
        )
    };
    let value = json!({
        "certifies": certifies,
        "flags": flags_json(&flags),
        "steps": steps,
        "valid": valid,
        "width": width,
    });
    Ok((value, if valid { 0 } else { 1 }))
}

fn contract(id: &str, loop_ref: &str, out: Option<&Path>) -> Result<(Value, u8)> {
    let entry = catalog::image_entry(id)?;
    let f = resolve_loop(Some(&entry), &entry.image, loop_ref)?;
    let cert = contract_auto(&f)?;
    let valid = cert.verify()?.valid();
    if let Some(out) = out {
        io::save_homotopy(cert.grid(), out)?;
    }
    let value = json!({
        "kind": cert.kind(),
        "steps": cert.steps(),
        "verified": valid,
        "width": cert.grid().width(),
    });
    Ok((value, if valid { 0 } else { 1 }))
}

fn explore(
    image: &str,
    loop_ref: &str,
    moves: Moves,
    pad: Option<usize>,
    budget: Option<u64>,
) -> Result<(Value, u8)> {
    let (entry, image) = resolve_image(image)?;
    let f = resolve_loop(entry.as_ref(), &image, loop_ref)?;
    let pad = pad.unwrap_or(f.len());
    let budget = budget_with(budget)?.with_pad_len(pad);
    let (status, report, certificate, extra) = match moves {
        Moves::Fixed => {
            let (cert, report) = is_nullhomotopic_bounded(&f, &budget)?;
            let cert_json = cert.map(|c| {
                serde_json::from_str::<Value>(&io::homotopy_json(c.grid()))
                    .expect("serializer emits valid JSON")
            });
            (report.status, report, cert_json, None)
        }
        Moves::Looppres => {
            let padded = f.pad_to(pad)?;
            let (set, report) = loop_reachable_set(&padded, MoveKind::LoopPreserving, &budget)?;
            let status = if set.iter().any(|l| l.is_constant()) {
                SearchStatus::Reached
            } else {
                report.status
            };
            (status, report, None, Some(set.len()))
        }
    };
    let mut value = json!({
        "certificate": certificate,
        "depth": report.frontier_depth,
        "note": bounded_evidence(status),
        "states": report.states_visited,
        "status": status,
    });
    if let Some(reachable) = extra {
        value["reachable"] = json!(reachable);
    }
    let code = if status == SearchStatus::Reached { 0 } else { 3 };
    Ok((value, code))
}

fn nohole(image: &str, cap: usize, budget: Option<u64>) -> Result<(Value, u8)> {
    let (_, image) = resolve_image(image)?;
    let budget = budget_with(budget)?;
    let report = has_hole_direct(&image, cap, &budget)?;
    let code = if report.has_hole { 1 } else { 0 };
    Ok((serde_json::to_value(&report).expect("report serializes"), code))
}

fn iso(a: &str, b: &str) -> Result<(Value, u8)> {
    let (_, a) = resolve_image(a)?;
    let (_, b) = resolve_image(b)?;
    let matching = is_isomorphic(&a, &b);
    let value = json!({
        "isomorphic": matching.is_some(),
        "matching": matching.map(|pairs| {
            pairs
                .iter()
                .map(|(p, q)| json!([p.coords(), q.coords()]))
                .collect::<Vec<_>>()
        }),
    });
    let code = u8::from(value["isomorphic"] == json!(false));
    Ok((value, code))
}

fn catalog_list() -> Result<(Value, u8)> {
    let mut items = Vec::new();
    for id in catalog::ids() {
        let (kind, note) = match catalog::item(id)? {
            CatalogItem::Image(entry) => ("image", entry.note),
            CatalogItem::Loop { note, .. } => ("loop", note),
            CatalogItem::Grid { note, .. } => ("grid", note),
        };
        items.push(json!({"id": id, "kind": kind, "note": note}));
    }
    Ok((Value::Array(items), 0))
}

fn dump_item(id: &str) -> Result<Value> {
    let text = match catalog::item(id)? {
        CatalogItem::Image(entry) => io::image_json(&entry.image),
        CatalogItem::Loop { item, .. } => io::path_json(item.as_path()),
        CatalogItem::Grid { grid, .. } => io::homotopy_json(&grid),
    };
    Ok(serde_json::from_str(&text).expect("serializer emits valid JSON"))
}

fn catalog_dump(id: Option<&str>) -> Result<(Value, u8)> {
    match id {
        Some(id) => Ok((dump_item(id)?, 0)),
        None => {
            let mut map = serde_json::Map::new();
            for id in catalog::ids() {
                map.insert((*id).into(), dump_item(id)?);
            }
            Ok((Value::Object(map), 0))
        }
    }
}

fn reproduce(seed: u64, only: Option<&[u32]>) -> Result<(Value, u8)> {
    let outcomes = run_all(seed, only);
    let all_passed = outcomes.iter().all(|o| o.passed);
    let value = Value::Array(
        outcomes
            .iter()
            .map(|o| {
                json!({
                    "details": o.details,
                    "index": o.index,
                    "name": o.name,
                    "passed": o.passed,
                })
            })
            .collect(),
    );
    Ok((value, u8::from(!all_passed)))
}
