//! JSON interchange for images, paths, and homotopy grids.
//!
//! Files are UTF-8 JSON with integers in decimal.  Loading re-runs every
//! construction-time invariant, so a value obtained from disk is as trusted
//! as one built in memory.  Images are content-addressed: [`content_hash`]
//! digests the dimension, the adjacency, and the lexicographically sorted
//! point list, so equal images hash equally regardless of the order a file
//! listed their points in.  A path or homotopy file may bind itself to an
//! image by hash; the binding is checked at load time.
//!
//! Formats:
//!
//! - image: `{"dim": n, "adjacency": {"u": u} | "<alias>", "points":
//!   [[ints...], ...]}` — aliases `"2"`, `"4"`, `"8"`, `"6"`, `"18"`,
//!   `"26"` are accepted and normalized;
//! - path: `{"image": <image-ref>, "seq": [[ints...], ...]}`;
//! - homotopy: `{"image": <image-ref>, "rows": [[[ints...], ...], ...],
//!   "flags": {"pointed_at": [ints...] | null, "loop_preserving": bool,
//!   "endpoint_fixed": bool}, "domain_order": [[ints...], ...]}` — the key
//!   `"codomain"` is accepted as a synonym for `"image"` (both name the
//!   image all entries live in), and `"domain_order"` is optional;
//! - an `<image-ref>` is an inline image object, a file path (string,
//!   relative to the referring file), or `{"file": "...", "hash": "..."}`
//!   which loads the file and then insists on the hash.

use std::fs;
use std::path::{Path as FsPath, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::homotopy::{DigitalLoop, DigitalPath, GridFlags, HomotopyGrid};
use crate::lattice::{shared, Adjacency, Image, Point};

/// Content address of an image: the hex SHA-256 of its canonical form,
/// plus the file it was loaded from when there is one.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ContentRef {
    pub hash: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
}

impl ContentRef {
    pub fn of(image: &Image) -> ContentRef {
        ContentRef {
            hash: content_hash(image),
            file: None,
        }
    }
}

/// Hex SHA-256 over the canonical form of an image: dimension, adjacency
/// parameter, then every point in lexicographic order.  Equal images hash
/// equally; the hash is independent of any file layout.
pub fn content_hash(image: &Image) -> String {
    let mut hasher = Sha256::new();
    hasher.update(b"digitop-image-v1\n");
    hasher.update(format!("dim {}\n", image.dim()));
    hasher.update(format!("u {}\n", image.adjacency().u()));
    for p in image.points() {
        let mut line = String::from("p");
        for c in p.coords() {
            line.push(' ');
            line.push_str(&c.to_string());
        }
        line.push('\n');
        hasher.update(line);
    }
    hex::encode(hasher.finalize())
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum AdjacencyField {
    Alias(String),
    Explicit { u: usize },
}

#[derive(Serialize, Deserialize)]
struct RawImage {
    dim: usize,
    adjacency: AdjacencyField,
    points: Vec<Vec<i64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ImageRef {
    File(String),
    Bound {
        file: String,
        hash: String,
    },
    Inline(RawImage),
}

#[derive(Serialize, Deserialize)]
struct RawPathFile {
    image: ImageRef,
    seq: Vec<Vec<i64>>,
}

#[derive(Serialize, Deserialize)]
struct RawFlags {
    pointed_at: Option<Vec<i64>>,
    loop_preserving: bool,
    endpoint_fixed: bool,
}

#[derive(Serialize, Deserialize)]
struct RawHomotopyFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    image: Option<ImageRef>,
    #[serde(skip_serializing_if = "Option::is_none")]
    codomain: Option<ImageRef>,
    rows: Vec<Vec<Vec<i64>>>,
    flags: RawFlags,
    #[serde(skip_serializing_if = "Option::is_none")]
    domain_order: Option<Vec<Vec<i64>>>,
}

fn points_of(raw: &[Vec<i64>]) -> Vec<Point> {
    raw.iter().map(|c| Point::new(c.clone())).collect()
}

fn build_image(raw: RawImage) -> Result<Image> {
    let adjacency = match raw.adjacency {
        AdjacencyField::Alias(name) => Adjacency::from_name(&name)?,
        AdjacencyField::Explicit { u } => Adjacency::new(raw.dim, u)?,
    };
    if adjacency.dim() != raw.dim {
        return Err(Error::Format(format!(
            "the image declares dimension {} but its adjacency alias works in dimension {}",
            raw.dim,
            adjacency.dim()
        )));
    }
    for p in &raw.points {
        if p.len() != raw.dim {
            return Err(Error::Format(format!(
                "the image declares dimension {} but lists the {}-dimensional point {:?}",
                raw.dim,
                p.len(),
                p
            )));
        }
    }
    Image::new(points_of(&raw.points), adjacency)
}

fn resolve_image(r: ImageRef, base_dir: &FsPath) -> Result<Arc<Image>> {
    match r {
        ImageRef::Inline(raw) => Ok(shared(build_image(raw)?)),
        ImageRef::File(rel) => load_image(&base_dir.join(rel)).map(shared),
        ImageRef::Bound { file, hash } => {
            let image = load_image(&base_dir.join(file))?;
            let actual = content_hash(&image);
            if actual != hash {
                return Err(Error::HashMismatch {
                    declared: hash,
                    actual,
                });
            }
            Ok(shared(image))
        }
    }
}

fn parent_of(path: &FsPath) -> PathBuf {
    path.parent()
        .filter(|p| !p.as_os_str().is_empty())
        .map(FsPath::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."))
}

fn read(path: &FsPath) -> Result<String> {
    fs::read_to_string(path).map_err(Error::from)
}

/// Loads and fully validates an image file.
pub fn load_image(path: &FsPath) -> Result<Image> {
    let raw: RawImage = serde_json::from_str(&read(path)?)?;
    build_image(raw)
}

/// Loads and fully validates a path file (every consecutive pair must be
/// adjacent-or-equal in the resolved image).
pub fn load_path(path: &FsPath) -> Result<DigitalPath> {
    let raw: RawPathFile = serde_json::from_str(&read(path)?)?;
    let image = resolve_image(raw.image, &parent_of(path))?;
    DigitalPath::new(image, points_of(&raw.seq))
}

/// Loads a path file whose sequence must additionally close up into a loop.
pub fn load_loop(path: &FsPath) -> Result<DigitalLoop> {
    let raw: RawPathFile = serde_json::from_str(&read(path)?)?;
    let image = resolve_image(raw.image, &parent_of(path))?;
    DigitalLoop::new(image, points_of(&raw.seq))
}

/// Loads and fully validates a homotopy file: the grid is rebuilt through
/// the same constructor used in memory, so every row/column/flag invariant
/// holds, and a declared image hash is enforced.
pub fn load_homotopy(path: &FsPath) -> Result<HomotopyGrid> {
    let raw: RawHomotopyFile = serde_json::from_str(&read(path)?)?;
    let base = parent_of(path);
    let codomain = match (raw.image, raw.codomain) {
        (Some(r), None) | (None, Some(r)) => resolve_image(r, &base)?,
        (Some(a), Some(b)) => {
            let a = resolve_image(a, &base)?;
            let b = resolve_image(b, &base)?;
            if a.as_ref() != b.as_ref() {
                return Err(Error::Format(
                    "the file's \"image\" and \"codomain\" disagree".into(),
                ));
            }
            a
        }
        (None, None) => {
            return Err(Error::Format(
                "a homotopy file needs an \"image\" (or \"codomain\") field".into(),
            ));
        }
    };
    let flags = GridFlags {
        pointed_at: raw.flags.pointed_at.map(Point::new),
        loop_preserving: raw.flags.loop_preserving,
        endpoint_fixed: raw.flags.endpoint_fixed,
    };
    let rows: Vec<Vec<Point>> = raw.rows.iter().map(|r| points_of(r)).collect();
    let grid = HomotopyGrid::new(codomain, rows, flags)?;
    match raw.domain_order {
        Some(order) => grid.with_domain_order(points_of(&order)),
        None => Ok(grid),
    }
}

fn raw_image(image: &Image) -> RawImage {
    let adjacency = match image.adjacency().name() {
        Some(name) => AdjacencyField::Alias(name.to_string()),
        None => AdjacencyField::Explicit {
            u: image.adjacency().u(),
        },
    };
    RawImage {
        dim: image.dim(),
        adjacency,
        points: image.points().iter().map(|p| p.coords().to_vec()).collect(),
    }
}

fn coords_of(seq: &[Point]) -> Vec<Vec<i64>> {
    seq.iter().map(|p| p.coords().to_vec()).collect()
}

/// Canonical image JSON (points in lexicographic order, pretty-printed).
pub fn image_json(image: &Image) -> String {
    serde_json::to_string_pretty(&raw_image(image)).expect("image serialization cannot fail")
}

/// Canonical path JSON with the image inlined.
pub fn path_json(path: &DigitalPath) -> String {
    let raw = RawPathFile {
        image: ImageRef::Inline(raw_image(path.image())),
        seq: coords_of(path.seq()),
    };
    serde_json::to_string_pretty(&raw).expect("path serialization cannot fail")
}

/// Canonical homotopy JSON with the image inlined.
pub fn homotopy_json(grid: &HomotopyGrid) -> String {
    let flags = grid.flags();
    let raw = RawHomotopyFile {
        image: Some(ImageRef::Inline(raw_image(grid.codomain()))),
        codomain: None,
        rows: grid.rows().iter().map(|r| coords_of(r)).collect(),
        flags: RawFlags {
            pointed_at: flags.pointed_at.as_ref().map(|p| p.coords().to_vec()),
            loop_preserving: flags.loop_preserving,
            endpoint_fixed: flags.endpoint_fixed,
        },
        domain_order: grid.domain_order().map(coords_of),
    };
    serde_json::to_string_pretty(&raw).expect("homotopy serialization cannot fail")
}

pub fn save_image(image: &Image, path: &FsPath) -> Result<()> {
    fs::write(path, image_json(image) + "\n").map_err(Error::from)
}

pub fn save_path(p: &DigitalPath, path: &FsPath) -> Result<()> {
    fs::write(path, path_json(p) + "\n").map_err(Error::from)
}

pub fn save_homotopy(grid: &HomotopyGrid, path: &FsPath) -> Result<()> {
    fs::write(path, homotopy_json(grid) + "\n").map_err(Error::from)
}
