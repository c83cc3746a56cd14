//! Random generation of loops by distance-bounded walks.
//!
//! The walk may pause, advance, or wander, but it is never allowed farther
//! from the basepoint than the remaining step budget, so it always closes
//! into a loop of exactly the requested length.

use rand::Rng;
use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::homotopy::DigitalLoop;
use crate::lattice::{Image, Point};

/// A uniformly sampled distance-bounded loop of length `len` based at
/// `base`. Stutters are possible at every step; the constant loop is the
/// only outcome for `len` 0 and 1.
pub fn random_loop(
    image: &Arc<Image>,
    base: &Point,
    len: usize,
    rng: &mut impl Rng,
) -> Result<DigitalLoop> {
    if !image.contains(base) {
        return Err(Error::NotInImage(base.clone()));
    }
    let dist: BTreeMap<Point, usize> = image.distances_from(base)?;
    let mut seq = Vec::with_capacity(len + 1);
    seq.push(base.clone());
    for i in 1..=len {
        let remaining = len - i;
        let cur = seq.last().unwrap();
        let mut candidates = image.neighborhood(cur, true)?;
        candidates.retain(|y| dist.get(y).is_some_and(|&d| d <= remaining));
        // The walk keeps distance(cur) <= remaining + 1, so stepping back
        // toward the basepoint is always allowed and this never empties.
        let pick = rng.gen_range(0..candidates.len());
        seq.push(candidates.swap_remove(pick));
    }
    DigitalLoop::new(image.clone(), seq)
}
