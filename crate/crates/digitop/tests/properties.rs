//! Randomized invariants, each checked against an independent naive
//! computation or a structural definition.

use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use digitop::euler::{is_isomorphic, simplex_census};
use digitop::homotopy::is_trivial_extension;
use digitop::lattice::{box_points, shared, Adjacency, Image, Point};
use digitop::oracle::{loop_reachable_set, MoveKind, SearchBudget, SearchStatus};
use digitop::walks::random_loop;

fn image_from(coords: BTreeSet<(i64, i64)>, u: usize) -> Image {
    let points: Vec<Point> = coords
        .into_iter()
        .map(|(x, y)| Point::new(vec![x, y]))
        .collect();
    Image::new(points, Adjacency::new(2, u).unwrap()).unwrap()
}

/// Counts cliques of each size by brute-force subset enumeration.
fn naive_census(image: &Image) -> Vec<u64> {
    let pts = image.points();
    let adj = image.adjacency();
    let n = pts.len();
    assert!(n <= 16, "naive census is exponential");
    let mut alpha: Vec<u64> = Vec::new();
    for mask in 1u32..(1 << n) {
        let members: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let clique = members
            .iter()
            .enumerate()
            .all(|(k, &i)| members[k + 1..].iter().all(|&j| adj.adjacent(&pts[i], &pts[j])));
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

fn plane_subset() -> impl Strategy<Value = BTreeSet<(i64, i64)>> {
    prop::collection::btree_set((0i64..=3, 0i64..=3), 1..=12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn census_matches_brute_force(coords in plane_subset(), u in 1usize..=2) {
        let image = image_from(coords, u);
        let census = simplex_census(&image);
        prop_assert_eq!(census.alpha.clone(), naive_census(&image));
    }

    #[test]
    fn one_coordinate_adjacency_never_builds_triangles(coords in plane_subset()) {
        let image = image_from(coords, 1);
        let census = simplex_census(&image);
        prop_assert!(census.alpha.len() <= 2);
    }

    #[test]
    fn components_partition_the_image(coords in plane_subset(), u in 1usize..=2) {
        let image = image_from(coords, u);
        let blocks = image.components();
        let mut seen = BTreeSet::new();
        for block in &blocks {
            let sub = image.sub_image(block.clone()).unwrap();
            prop_assert!(sub.is_connected());
            for p in block {
                prop_assert!(seen.insert(p.clone()), "blocks overlap");
            }
        }
        prop_assert_eq!(seen.len(), image.len());
        let adj = image.adjacency();
        for (i, a) in blocks.iter().enumerate() {
            for b in blocks.iter().skip(i + 1) {
                for p in a {
                    for q in b {
                        prop_assert!(!adj.adjacent(p, q), "edge crosses blocks");
                    }
                }
            }
        }
    }

    #[test]
    fn padding_is_a_trivial_extension(seed in any::<u64>(), len in 1usize..=6, extra in 0usize..=6) {
        let ring: Vec<Point> = box_points(&[(0, 2), (0, 2)])
            .into_iter()
            .filter(|p| p.coords() != [1, 1])
            .collect();
        let image = shared(Image::new(ring, Adjacency::new(2, 2).unwrap()).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_loop(&image, &Point::new(vec![0, 0]), len, &mut rng).unwrap();
        let padded = f.pad_to(len + extra).unwrap();
        prop_assert!(is_trivial_extension(padded.as_path(), f.as_path()).unwrap());
        prop_assert_eq!(padded.len(), len + extra);
        prop_assert_eq!(padded.basepoint(), f.basepoint());
    }

    #[test]
    fn lattice_symmetries_preserve_isomorphism_and_census(
        coords in plane_subset(),
        u in 1usize..=2,
        swap in any::<bool>(),
        flip_x in any::<bool>(),
        flip_y in any::<bool>(),
        dx in -2i64..=2,
        dy in -2i64..=2,
    ) {
        let image = image_from(coords.clone(), u);
        prop_assume!(image.len() <= 10);
        let moved: BTreeSet<(i64, i64)> = coords
            .into_iter()
            .map(|(x, y)| {
                let (x, y) = if swap { (y, x) } else { (x, y) };
                let x = if flip_x { -x } else { x };
                let y = if flip_y { -y } else { y };
                (x + dx, y + dy)
            })
            .collect();
        let twin = image_from(moved, u);
        let matching = is_isomorphic(&image, &twin);
        prop_assert!(matching.is_some());
        let adj = image.adjacency();
        let pairs = matching.unwrap();
        for (i, (a, fa)) in pairs.iter().enumerate() {
            for (b, fb) in pairs.iter().skip(i + 1) {
                prop_assert_eq!(adj.adjacent(a, b), adj.adjacent(fa, fb));
            }
        }
        prop_assert_eq!(simplex_census(&image).alpha, simplex_census(&twin).alpha);
    }

    #[test]
    fn pinned_endpoint_closures_embed_in_loop_preserving_ones(
        seed in any::<u64>(),
        len in 2usize..=4,
    ) {
        let image: Arc<Image> = shared(
            Image::new(box_points(&[(0, 1), (0, 2)]), Adjacency::new(2, 1).unwrap()).unwrap(),
        );
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_loop(&image, &Point::new(vec![0, 0]), len, &mut rng).unwrap();
        let budget = SearchBudget::default().with_max_states(200_000);
        let (fixed, r1) = loop_reachable_set(&f, MoveKind::EndpointFixed, &budget).unwrap();
        let (preserving, r2) = loop_reachable_set(&f, MoveKind::LoopPreserving, &budget).unwrap();
        prop_assert_eq!(r1.status, SearchStatus::Exhausted);
        prop_assert_eq!(r2.status, SearchStatus::Exhausted);
        let wider: BTreeSet<Vec<Point>> =
            preserving.iter().map(|l| l.seq().to_vec()).collect();
        for l in &fixed {
            prop_assert!(wider.contains(l.seq()));
        }
    }
}
