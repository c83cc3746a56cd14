//! A small catalog of named images, loops, and homotopy grids.
//!
//! Entries are referred to by stable string ids so that the command line
//! and tests can talk about the same objects. Every entry is rebuilt from
//! scratch on each call; nothing here is cached or mutable.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::euler::{DigitalDisk, DiskKind};
use crate::homotopy::{DigitalLoop, GridFlags, HomotopyGrid};
use crate::lattice::{box_points, shared, Adjacency, Image, Point};

/// An image together with its named artifacts.
#[derive(Debug, Clone)]
pub struct ImageEntry {
    pub id: &'static str,
    pub note: &'static str,
    pub image: Arc<Image>,
    /// Human names for individual points, used in messages and tests.
    pub labels: Vec<(String, Point)>,
    /// Preferred basepoint for loops on this image, when one is customary.
    pub basepoint: Option<Point>,
    /// Named loops living on this image.
    pub loops: Vec<(String, DigitalLoop)>,
    /// Named homotopy or contraction grids with this image as codomain.
    pub grids: Vec<(String, HomotopyGrid)>,
    /// Disk structure (boundary curve plus interior), when the image is one
    /// of the standard filled disks.
    pub disk: Option<DigitalDisk>,
}

impl ImageEntry {
    pub fn label(&self, name: &str) -> Option<&Point> {
        self.labels.iter().find(|(n, _)| n == name).map(|(_, p)| p)
    }

    pub fn attached_loop(&self, name: &str) -> Option<&DigitalLoop> {
        self.loops.iter().find(|(n, _)| n == name).map(|(_, l)| l)
    }

    pub fn attached_grid(&self, name: &str) -> Option<&HomotopyGrid> {
        self.grids.iter().find(|(n, _)| n == name).map(|(_, g)| g)
    }
}

/// Any catalog entry: an image with artifacts, a standalone loop, or a
/// standalone grid.
#[derive(Debug, Clone)]
pub enum CatalogItem {
    Image(Box<ImageEntry>),
    Loop {
        id: &'static str,
        note: &'static str,
        item: DigitalLoop,
    },
    Grid {
        id: &'static str,
        note: &'static str,
        grid: HomotopyGrid,
        /// For certificate-style grids: the unpadded loop the first row
        /// extends.
        original: Option<DigitalLoop>,
    },
}

impl CatalogItem {
    pub fn id(&self) -> &'static str {
        match self {
            CatalogItem::Image(e) => e.id,
            CatalogItem::Loop { id, .. } => id,
            CatalogItem::Grid { id, .. } => id,
        }
    }

    pub fn note(&self) -> &'static str {
        match self {
            CatalogItem::Image(e) => e.note,
            CatalogItem::Loop { note, .. } => note,
            CatalogItem::Grid { note, .. } => note,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CatalogItem::Image(_) => "image",
            CatalogItem::Loop { .. } => "loop",
            CatalogItem::Grid { .. } => "grid",
        }
    }
}

const IDS: [&str; 14] = [
    "MSS_18",
    "MSS_18p",
    "MSS_6",
    "MSC8s",
    "MSC8ps",
    "MSC4s",
    "X_cnp",
    "FIG48",
    "LOOPHOLE_X",
    "MSS6_SHARP",
    "MSS18_SHARP",
    "D_LOOP",
    "D_TABLE",
    "MSS18p_CONTRACTION",
];

/// All catalog ids, in listing order.
pub fn ids() -> &'static [&'static str] {
    &IDS
}

/// Build the entry with the given id.
pub fn item(id: &str) -> Result<CatalogItem> {
    match id {
        "MSS_18" => Ok(CatalogItem::Image(Box::new(mss18()))),
        "MSS_18p" => Ok(CatalogItem::Image(Box::new(mss18p()))),
        "MSS_6" => Ok(CatalogItem::Image(Box::new(mss6()))),
        "MSC8s" => Ok(CatalogItem::Image(Box::new(msc8s()))),
        "MSC8ps" => Ok(CatalogItem::Image(Box::new(msc8ps()))),
        "MSC4s" => Ok(CatalogItem::Image(Box::new(msc4s()))),
        "X_cnp" => Ok(CatalogItem::Image(Box::new(x_cnp()))),
        "FIG48" => Ok(CatalogItem::Image(Box::new(fig48()))),
        "LOOPHOLE_X" => Ok(CatalogItem::Image(Box::new(loophole_x()))),
        "MSS6_SHARP" => Ok(CatalogItem::Image(Box::new(mss6_sharp()))),
        "MSS18_SHARP" => Ok(CatalogItem::Image(Box::new(mss18_sharp()))),
        "D_LOOP" => Ok(CatalogItem::Loop {
            id: "D_LOOP",
            note: "Eight-step square loop around the equator of the punctured box sphere",
            item: d_loop(),
        }),
        "D_TABLE" => Ok(CatalogItem::Grid {
            id: "D_TABLE",
            note: "Seven-row endpoint-fixed contraction of the equator loop of the punctured box sphere",
            grid: d_table(),
            original: Some(d_loop()),
        }),
        "MSS18p_CONTRACTION" => Ok(CatalogItem::Grid {
            id: "MSS18p_CONTRACTION",
            note: "Two-step contraction of the six-point octahedron, pointed at the origin",
            grid: mss18p_contraction(),
            original: None,
        }),
        other => Err(Error::UnknownCatalogId(other.to_string())),
    }
}

/// Build an image entry, rejecting ids that name loops or grids.
pub fn image_entry(id: &str) -> Result<ImageEntry> {
    match item(id)? {
        CatalogItem::Image(e) => Ok(*e),
        _ => Err(Error::UnknownCatalogId(format!(
            "{id} names a loop or grid, not an image"
        ))),
    }
}

fn pt(c: &[i64]) -> Point {
    Point::from(c)
}

fn named(points: Vec<Point>, name: &str) -> Arc<Image> {
    shared(
        Image::new(points, Adjacency::from_name(name).expect("known adjacency name"))
            .expect("catalog image data is valid"),
    )
}

fn attached_loop(image: &Arc<Image>, seq: &[&[i64]]) -> DigitalLoop {
    let seq = seq.iter().map(|c| pt(c)).collect();
    DigitalLoop::new(image.clone(), seq).expect("catalog loop data is valid")
}

fn mss18_points() -> Vec<(String, Point)> {
    let coords: [[i64; 3]; 10] = [
        [0, 0, 0],
        [1, 1, 0],
        [1, 2, 0],
        [0, 3, 0],
        [-1, 2, 0],
        [-1, 1, 0],
        [0, 1, -1],
        [0, 2, -1],
        [0, 2, 1],
        [0, 1, 1],
    ];
    coords
        .iter()
        .enumerate()
        .map(|(i, c)| (format!("c{i}"), pt(c)))
        .collect()
}

fn mss18() -> ImageEntry {
    let labels = mss18_points();
    let image = named(labels.iter().map(|(_, p)| p.clone()).collect(), "18");
    let equator = attached_loop(
        &image,
        &[
            &[0, 0, 0],
            &[1, 1, 0],
            &[1, 2, 0],
            &[0, 3, 0],
            &[-1, 2, 0],
            &[-1, 1, 0],
            &[0, 0, 0],
        ],
    );
    ImageEntry {
        id: "MSS_18",
        note: "Ten-point sphere-like surface under 18-adjacency: a hexagonal equator with two points above and two below",
        basepoint: Some(pt(&[0, 0, 0])),
        labels,
        loops: vec![("equator".into(), equator)],
        grids: vec![],
        disk: None,
        image,
    }
}

fn mss18p_points() -> Vec<Point> {
    [
        [0, 0, 0],
        [1, 1, 0],
        [0, 2, 0],
        [-1, 1, 0],
        [0, 1, -1],
        [0, 1, 1],
    ]
    .iter()
    .map(|c| pt(c))
    .collect()
}

fn mss18p() -> ImageEntry {
    let image = named(mss18p_points(), "18");
    let contraction = mss18p_contraction();
    ImageEntry {
        id: "MSS_18p",
        note: "Six-point octahedron under 18-adjacency; contractible, unlike its ten-point cousin",
        basepoint: Some(pt(&[0, 0, 0])),
        labels: vec![],
        loops: vec![],
        grids: vec![("contraction".into(), contraction)],
        disk: None,
        image,
    }
}

fn mss18p_contraction() -> HomotopyGrid {
    let image = named(mss18p_points(), "18");
    let order: Vec<Point> = image.points().to_vec();
    let step = |p: &Point| -> Point {
        match p.coords() {
            [0, 1, -1] => pt(&[0, 0, 0]),
            [0, 2, 0] => pt(&[0, 1, 1]),
            other => pt(other),
        }
    };
    let row0 = order.clone();
    let row1: Vec<Point> = order.iter().map(step).collect();
    let row2: Vec<Point> = order.iter().map(|_| pt(&[0, 0, 0])).collect();
    let flags = GridFlags {
        pointed_at: Some(pt(&[0, 0, 0])),
        ..GridFlags::default()
    };
    HomotopyGrid::new(image, vec![row0, row1, row2], flags)
        .and_then(|g| g.with_domain_order(order))
        .expect("catalog grid data is valid")
}

fn mss6_points() -> Vec<Point> {
    box_points(&[(0, 2), (0, 2), (0, 2)])
        .into_iter()
        .filter(|p| p.coords() != [1, 1, 1])
        .collect()
}

fn mss6() -> ImageEntry {
    let image = named(mss6_points(), "6");
    let d = attached_loop(
        &image,
        &[
            &[0, 0, 1],
            &[1, 0, 1],
            &[2, 0, 1],
            &[2, 1, 1],
            &[2, 2, 1],
            &[1, 2, 1],
            &[0, 2, 1],
            &[0, 1, 1],
            &[0, 0, 1],
        ],
    );
    ImageEntry {
        id: "MSS_6",
        note: "Surface of the 3x3x3 box with the center removed, under 6-adjacency",
        basepoint: Some(pt(&[0, 0, 1])),
        labels: vec![],
        loops: vec![("d".into(), d)],
        grids: vec![("d_table".into(), d_table())],
        disk: None,
        image,
    }
}

fn d_loop() -> DigitalLoop {
    let image = named(mss6_points(), "6");
    attached_loop(
        &image,
        &[
            &[0, 0, 1],
            &[1, 0, 1],
            &[2, 0, 1],
            &[2, 1, 1],
            &[2, 2, 1],
            &[1, 2, 1],
            &[0, 2, 1],
            &[0, 1, 1],
            &[0, 0, 1],
        ],
    )
}

fn d_table() -> HomotopyGrid {
    let image = named(mss6_points(), "6");
    let rows: [[[i64; 3]; 11]; 7] = [
        [
            [0, 0, 1],
            [0, 0, 1],
            [1, 0, 1],
            [2, 0, 1],
            [2, 1, 1],
            [2, 2, 1],
            [1, 2, 1],
            [0, 2, 1],
            [0, 1, 1],
            [0, 0, 1],
            [0, 0, 1],
        ],
        [
            [0, 0, 1],
            [0, 0, 2],
            [1, 0, 2],
            [2, 0, 2],
            [2, 1, 2],
            [2, 2, 2],
            [1, 2, 2],
            [0, 2, 2],
            [0, 1, 2],
            [0, 0, 2],
            [0, 0, 1],
        ],
        [
            [0, 0, 1],
            [0, 0, 2],
            [1, 0, 2],
            [2, 0, 2],
            [2, 1, 2],
            [2, 1, 2],
            [1, 1, 2],
            [0, 1, 2],
            [0, 1, 2],
            [0, 0, 2],
            [0, 0, 1],
        ],
        [
            [0, 0, 1],
            [0, 0, 2],
            [1, 0, 2],
            [2, 0, 2],
            [2, 0, 2],
            [2, 0, 2],
            [1, 0, 2],
            [0, 0, 2],
            [0, 0, 2],
            [0, 0, 2],
            [0, 0, 1],
        ],
        [
            [0, 0, 1],
            [0, 0, 2],
            [1, 0, 2],
            [1, 0, 2],
            [1, 0, 2],
            [1, 0, 2],
            [1, 0, 2],
            [0, 0, 2],
            [0, 0, 2],
            [0, 0, 2],
            [0, 0, 1],
        ],
        [
            [0, 0, 1],
            [0, 0, 2],
            [0, 0, 2],
            [0, 0, 2],
            [0, 0, 2],
            [0, 0, 2],
            [0, 0, 2],
            [0, 0, 2],
            [0, 0, 2],
            [0, 0, 2],
            [0, 0, 1],
        ],
        [
            [0, 0, 1],
            [0, 0, 1],
            [0, 0, 1],
            [0, 0, 1],
            [0, 0, 1],
            [0, 0, 1],
            [0, 0, 1],
            [0, 0, 1],
            [0, 0, 1],
            [0, 0, 1],
            [0, 0, 1],
        ],
    ];
    let rows: Vec<Vec<Point>> = rows
        .iter()
        .map(|row| row.iter().map(|c| pt(c)).collect())
        .collect();
    let flags = GridFlags {
        pointed_at: None,
        loop_preserving: true,
        endpoint_fixed: true,
    };
    HomotopyGrid::new(image, rows, flags).expect("catalog grid data is valid")
}

fn msc8s() -> ImageEntry {
    let mut points = Vec::new();
    for x in -1..=1 {
        for y in 0..=1 {
            points.push(pt(&[x, y]));
        }
    }
    points.push(pt(&[0, -1]));
    points.push(pt(&[0, 2]));
    let image = named(points, "8");
    let curve: Vec<Point> = image
        .points()
        .iter()
        .filter(|p| p.coords() != [0, 0] && p.coords() != [0, 1])
        .cloned()
        .collect();
    let disk = DigitalDisk::new(DiskKind::Oval8, image.clone(), curve)
        .expect("catalog disk data is valid");
    ImageEntry {
        id: "MSC8s",
        note: "Filled oval under 8-adjacency: a six-point boundary curve with two interior points",
        basepoint: None,
        labels: vec![],
        loops: vec![],
        grids: vec![],
        disk: Some(disk),
        image,
    }
}

fn msc8ps() -> ImageEntry {
    let points = vec![
        pt(&[0, 0]),
        pt(&[1, 0]),
        pt(&[-1, 0]),
        pt(&[0, 1]),
        pt(&[0, -1]),
    ];
    let image = named(points, "8");
    let curve: Vec<Point> = image
        .points()
        .iter()
        .filter(|p| p.coords() != [0, 0])
        .cloned()
        .collect();
    let disk = DigitalDisk::new(DiskKind::Diamond8, image.clone(), curve)
        .expect("catalog disk data is valid");
    ImageEntry {
        id: "MSC8ps",
        note: "Filled diamond under 8-adjacency: a four-point boundary curve around one interior point",
        basepoint: None,
        labels: vec![],
        loops: vec![],
        grids: vec![],
        disk: Some(disk),
        image,
    }
}

fn msc4s() -> ImageEntry {
    let image = named(box_points(&[(0, 2), (0, 2)]), "4");
    let curve: Vec<Point> = image
        .points()
        .iter()
        .filter(|p| p.coords() != [1, 1])
        .cloned()
        .collect();
    let disk = DigitalDisk::new(DiskKind::Square4, image.clone(), curve)
        .expect("catalog disk data is valid");
    ImageEntry {
        id: "MSC4s",
        note: "Filled 3x3 square under 4-adjacency: an eight-point boundary around one interior point",
        basepoint: None,
        labels: vec![],
        loops: vec![],
        grids: vec![],
        disk: Some(disk),
        image,
    }
}

fn x_cnp_points() -> Vec<Point> {
    box_points(&[(0, 2), (0, 2), (0, 1)])
        .into_iter()
        .filter(|p| p.coords() != [1, 1, 1])
        .collect()
}

fn x_cnp() -> ImageEntry {
    let image = named(x_cnp_points(), "6");
    let order: Vec<Point> = image.points().to_vec();
    let stage = |t: usize, p: &Point| -> Point {
        let [a, b, c] = *p.coords() else {
            unreachable!("all points are three-dimensional")
        };
        let coords = match t {
            0 => [a, b, c],
            1 => [a, b, 0],
            2 => [a, (b - 1).max(0), 0],
            3 => [a, (b - 2).max(0), 0],
            4 => [(a - 1).max(0), 0, 0],
            _ => [(a - 2).max(0), 0, 0],
        };
        pt(&coords)
    };
    let rows: Vec<Vec<Point>> = (0..=5)
        .map(|t| order.iter().map(|p| stage(t, p)).collect())
        .collect();
    let grid = HomotopyGrid::new(image.clone(), rows, GridFlags::default())
        .and_then(|g| g.with_domain_order(order))
        .expect("catalog grid data is valid");
    ImageEntry {
        id: "X_cnp",
        note: "Two-layer 3x3 box with one upper point removed; contractible, but not to the point above the hole while keeping it fixed",
        basepoint: Some(pt(&[0, 0, 1])),
        labels: vec![],
        loops: vec![],
        grids: vec![("deformation".into(), grid)],
        disk: None,
        image,
    }
}

fn fig48_points() -> Vec<Point> {
    vec![
        pt(&[0, 0]),
        pt(&[1, 0]),
        pt(&[2, 0]),
        pt(&[0, 1]),
        pt(&[0, 2]),
        pt(&[1, 2]),
        pt(&[2, 1]),
    ]
}

fn fig48() -> ImageEntry {
    let image = named(fig48_points(), "8");
    let cycle7 = attached_loop(
        &image,
        &[
            &[0, 0],
            &[1, 0],
            &[2, 0],
            &[2, 1],
            &[1, 2],
            &[0, 2],
            &[0, 1],
            &[0, 0],
        ],
    );
    ImageEntry {
        id: "FIG48",
        note: "Seven points that form a tree under 4-adjacency but carry a unique seven-step cycle under 8-adjacency",
        basepoint: Some(pt(&[0, 0])),
        labels: vec![],
        loops: vec![("7cycle".into(), cycle7)],
        grids: vec![],
        disk: None,
        image,
    }
}

fn loophole_x_points() -> Vec<Point> {
    let six = Adjacency::from_name("6").expect("known adjacency name");
    let full = Image::new(box_points(&[(0, 4), (0, 4), (0, 4)]), six)
        .expect("catalog image data is valid");
    full.boundary()
        .into_iter()
        .filter(|p| p.coords() != [4, 2, 2])
        .collect()
}

fn loophole_x() -> ImageEntry {
    let image = named(loophole_x_points(), "6");
    let rim = attached_loop(
        &image,
        &[
            &[4, 1, 1],
            &[4, 2, 1],
            &[4, 3, 1],
            &[4, 3, 2],
            &[4, 3, 3],
            &[4, 2, 3],
            &[4, 1, 3],
            &[4, 1, 2],
            &[4, 1, 1],
        ],
    );
    ImageEntry {
        id: "LOOPHOLE_X",
        note: "Surface of the 5x5x5 box with one face point deleted; the rim loop around the hole cannot shrink or grow",
        basepoint: Some(pt(&[4, 1, 1])),
        labels: vec![],
        loops: vec![("rim".into(), rim)],
        grids: vec![],
        disk: None,
        image,
    }
}

fn mss6_sharp() -> ImageEntry {
    let points: Vec<Point> = box_points(&[(0, 4), (0, 2), (0, 2)])
        .into_iter()
        .filter(|p| !matches!(p.coords(), [1..=3, 1, 1]))
        .collect();
    let image = named(points, "6");
    ImageEntry {
        id: "MSS6_SHARP",
        note: "Surface of a 5x3x3 box with the interior removed: two punctured box spheres glued along a square",
        basepoint: None,
        labels: vec![],
        loops: vec![],
        grids: vec![],
        disk: None,
        image,
    }
}

fn mss18_sharp() -> ImageEntry {
    let mut points = Vec::new();
    for y in 1..=3i64 {
        for x in [0i64, 2] {
            points.push(pt(&[y, 1, x]));
        }
    }
    for y in 1..=3i64 {
        for z in [0i64, 2] {
            points.push(pt(&[y, z, 1]));
        }
    }
    points.push(pt(&[0, 1, 1]));
    points.push(pt(&[4, 1, 1]));
    let image = named(points, "18");
    ImageEntry {
        id: "MSS18_SHARP",
        note: "Two ten-point spheres sharing a hexagon pattern, stretched along an axis; fourteen points under 18-adjacency",
        basepoint: None,
        labels: vec![],
        loops: vec![],
        grids: vec![],
        disk: None,
        image,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler::{
        boundary_curve_chi, connected_sum_chi, euler_characteristic, is_isomorphic,
        simplex_census,
    };
    use crate::homotopy::{verify_contraction, NullhomotopyCertificate};

    #[test]
    fn every_id_builds() {
        for id in ids() {
            let entry = item(id).unwrap();
            assert_eq!(entry.id(), *id);
            assert!(!entry.note().is_empty());
        }
        assert!(item("NO_SUCH_ID").is_err());
    }

    #[test]
    fn point_counts_are_stable() {
        let expected = [
            ("MSS_18", 10),
            ("MSS_18p", 6),
            ("MSS_6", 26),
            ("MSC8s", 8),
            ("MSC8ps", 5),
            ("MSC4s", 9),
            ("X_cnp", 17),
            ("FIG48", 7),
            ("LOOPHOLE_X", 97),
            ("MSS6_SHARP", 42),
            ("MSS18_SHARP", 14),
        ];
        for (id, count) in expected {
            assert_eq!(image_entry(id).unwrap().image.len(), count, "{id}");
        }
    }

    #[test]
    fn censuses_of_the_spheres() {
        let cases = [
            ("MSS_18", vec![10, 20, 8], -2),
            ("MSS_18p", vec![6, 12, 8], 2),
            ("MSS_6", vec![26, 48], -22),
            ("MSS6_SHARP", vec![42, 80], -38),
            ("MSS18_SHARP", vec![14, 28, 8], -6),
        ];
        for (id, alpha, chi) in cases {
            let report = euler_characteristic(&image_entry(id).unwrap().image);
            assert_eq!(report.alpha, alpha, "{id}");
            assert_eq!(report.chi, chi, "{id}");
        }
    }

    #[test]
    fn censuses_of_the_disks() {
        let cases = [
            ("MSC8s", vec![8, 17, 12, 2], 1),
            ("MSC8ps", vec![5, 8, 4], 1),
            ("MSC4s", vec![9, 12], -3),
        ];
        for (id, alpha, chi) in cases {
            let entry = image_entry(id).unwrap();
            let report = euler_characteristic(&entry.image);
            assert_eq!(report.alpha, alpha, "{id}");
            assert_eq!(report.chi, chi, "{id}");
            let disk = entry.disk.expect("disk entries carry their curve");
            assert_eq!(disk.kind().chi(), chi, "{id}");
            assert_eq!(boundary_curve_chi(&disk), 0, "{id}");
        }
    }

    #[test]
    fn glued_surfaces_match_the_connected_sum_formula() {
        let chi = |id: &str| euler_characteristic(&image_entry(id).unwrap().image).chi;
        assert_eq!(
            connected_sum_chi(chi("MSS_6"), chi("MSS_6"), DiskKind::Square4),
            chi("MSS6_SHARP")
        );
        assert_eq!(
            connected_sum_chi(chi("MSS_18"), chi("MSS_18"), DiskKind::Oval8),
            chi("MSS18_SHARP")
        );
    }

    #[test]
    fn ten_point_sphere_neighborhood_and_faces() {
        let entry = image_entry("MSS_18").unwrap();
        let c = |name: &str| entry.label(name).unwrap().clone();
        let hood = entry.image.neighborhood(&c("c0"), false).unwrap();
        let mut expected = vec![c("c1"), c("c5"), c("c6"), c("c9")];
        expected.sort();
        assert_eq!(hood, expected);

        let faces = crate::euler::enumerate_simplices(&entry.image, 2);
        let face_names: Vec<Vec<&str>> = faces
            .iter()
            .map(|f| {
                f.iter()
                    .map(|p| {
                        entry
                            .labels
                            .iter()
                            .find(|(_, q)| q == p)
                            .map(|(n, _)| n.as_str())
                            .unwrap()
                    })
                    .collect()
            })
            .collect();
        let mut expected: Vec<Vec<&str>> = vec![
            vec!["c0", "c1", "c9"],
            vec!["c0", "c1", "c6"],
            vec!["c0", "c5", "c6"],
            vec!["c0", "c5", "c9"],
            vec!["c2", "c3", "c7"],
            vec!["c2", "c3", "c8"],
            vec!["c3", "c4", "c7"],
            vec!["c3", "c4", "c8"],
        ];
        let mut got = face_names
            .into_iter()
            .map(|mut f| {
                f.sort();
                f
            })
            .collect::<Vec<_>>();
        got.sort();
        for f in &mut expected {
            f.sort();
        }
        expected.sort();
        assert_eq!(got, expected);
    }

    #[test]
    fn spheres_fall_apart_under_strict_adjacency() {
        // The octahedron has no two points on a common grid axis, so it
        // shatters into singletons.
        let entry = image_entry("MSS_18p").unwrap();
        let strict = entry
            .image
            .with_adjacency(Adjacency::from_name("6").unwrap())
            .unwrap();
        let parts = strict.components();
        assert_eq!(parts.len(), 6);
        assert!(parts.iter().all(|b| b.len() == 1));

        // The ten-point sphere keeps four axis-aligned pairs (c1c2, c4c5,
        // c6c7, c8c9) and isolates c0 and c3.
        let entry = image_entry("MSS_18").unwrap();
        let strict = entry
            .image
            .with_adjacency(Adjacency::from_name("6").unwrap())
            .unwrap();
        let parts = strict.components();
        assert_eq!(parts.len(), 6);
        let singletons = parts.iter().filter(|b| b.len() == 1).count();
        let pairs = parts.iter().filter(|b| b.len() == 2).count();
        assert_eq!((singletons, pairs), (2, 4));
        let c = |name: &str| entry.label(name).unwrap().clone();
        assert!(parts.contains(&vec![c("c0")]));
        assert!(parts.contains(&vec![c("c3")]));
        assert!(parts.contains(&vec![c("c1"), c("c2")]));
    }

    #[test]
    fn octahedron_looks_the_same_under_full_adjacency() {
        let entry = image_entry("MSS_18p").unwrap();
        let full = entry
            .image
            .with_adjacency(Adjacency::from_name("26").unwrap())
            .unwrap();
        assert!(is_isomorphic(&entry.image, &full).is_some());
        let ten = image_entry("MSS_18").unwrap();
        assert!(is_isomorphic(&entry.image, &ten.image).is_none());
    }

    #[test]
    fn equator_table_is_a_valid_certificate() {
        let CatalogItem::Grid { grid, original, .. } = item("D_TABLE").unwrap() else {
            panic!("D_TABLE is a grid entry");
        };
        let d = original.unwrap();
        let padded = DigitalLoop::new(grid.codomain().clone(), grid.rows()[0].clone()).unwrap();
        let cert = NullhomotopyCertificate::new(
            d,
            padded,
            grid,
            crate::homotopy::CertificateKind::EndpointFixed,
        )
        .unwrap();
        let report = cert.verify().unwrap();
        assert!(report.valid(), "{report:?}");
        assert_eq!(cert.steps(), 6);
    }

    #[test]
    fn shuffled_equator_table_fails_column_continuity() {
        let CatalogItem::Grid { grid, .. } = item("D_TABLE").unwrap() else {
            panic!("D_TABLE is a grid entry");
        };
        let mut rows = grid.rows().to_vec();
        rows.swap(3, 4);
        let broken =
            HomotopyGrid::new(grid.codomain().clone(), rows, grid.flags().clone()).unwrap();
        let report = broken.self_report();
        assert!(!report.valid());
        assert!(!report.columns_continuous);
        let first = report
            .violations
            .iter()
            .find(|v| v.condition == crate::homotopy::Condition::ColumnContinuity)
            .unwrap();
        // The reported cell really is a non-adjacent jump between
        // consecutive rows.
        let adj = broken.codomain().adjacency();
        let a = &broken.rows()[first.t][first.s];
        let b = &broken.rows()[first.t + 1][first.s];
        assert!(!adj.adjacent_or_equal(a, b));
    }

    #[test]
    fn two_layer_box_contracts_only_unpointed() {
        let entry = image_entry("X_cnp").unwrap();
        let grid = entry.attached_grid("deformation").unwrap();
        let free = verify_contraction(&entry.image, grid, None).unwrap();
        assert!(free.valid(), "{free:?}");
        let base = entry.basepoint.clone().unwrap();
        let pinned = verify_contraction(&entry.image, grid, Some(&base)).unwrap();
        assert!(!pinned.valid());
        assert_eq!(pinned.pointed, Some(false));
    }

    #[test]
    fn octahedron_contraction_is_pointed() {
        let entry = image_entry("MSS_18p").unwrap();
        let grid = entry.attached_grid("contraction").unwrap();
        let base = entry.basepoint.clone().unwrap();
        let report = verify_contraction(&entry.image, grid, Some(&base)).unwrap();
        assert!(report.valid(), "{report:?}");
        assert_eq!(grid.steps(), 2);
    }

    fn directed_hamiltonian_cycles_from_zero(image: &Image) -> usize {
        let lists = image.adjacency_lists();
        let n = lists.len();
        fn dfs(cur: usize, mask: u32, lists: &[Vec<usize>], n: usize) -> usize {
            if mask == (1 << n) - 1 {
                return usize::from(lists[cur].binary_search(&0).is_ok());
            }
            let mut total = 0;
            for &next in &lists[cur] {
                if mask & (1 << next) == 0 {
                    total += dfs(next, mask | (1 << next), lists, n);
                }
            }
            total
        }
        dfs(0, 1, &lists, n)
    }

    #[test]
    fn seven_point_figure_has_one_cycle_exactly() {
        let entry = image_entry("FIG48").unwrap();
        let under4 = entry
            .image
            .with_adjacency(Adjacency::from_name("4").unwrap())
            .unwrap();
        let edges: usize = under4.adjacency_lists().iter().map(Vec::len).sum::<usize>() / 2;
        assert_eq!(edges, 6);
        assert_eq!(under4.components().len(), 1);

        let edges8: usize = entry.image.adjacency_lists().iter().map(Vec::len).sum::<usize>() / 2;
        assert_eq!(edges8, 10);
        // Each undirected cycle through all seven points appears twice as a
        // directed tour from a fixed start.
        assert_eq!(directed_hamiltonian_cycles_from_zero(&entry.image), 2);
        assert_eq!(entry.attached_loop("7cycle").unwrap().len(), 7);
    }

    #[test]
    fn punctured_box_boundary_is_what_the_builder_says() {
        let entry = image_entry("LOOPHOLE_X").unwrap();
        assert_eq!(entry.image.len(), 97);
        let rim = entry.attached_loop("rim").unwrap();
        assert_eq!(rim.len(), 8);
        assert!(!entry.image.contains(&pt(&[4, 2, 2])));
        assert!(!entry.image.contains(&pt(&[2, 2, 2])));
    }

    #[test]
    fn stretched_sphere_is_the_box_boundary() {
        let entry = image_entry("MSS6_SHARP").unwrap();
        let six = Adjacency::from_name("6").unwrap();
        let full = Image::new(box_points(&[(0, 4), (0, 2), (0, 2)]), six).unwrap();
        let mut boundary = full.boundary();
        boundary.sort();
        assert_eq!(entry.image.points(), &boundary[..]);
        let census = simplex_census(&entry.image);
        assert_eq!(census.alpha, vec![42, 80]);
    }
}
