//! Weighted partial set cover over a ball graph.
//!
//! Both solvers report `total_weight` as the sum of center weights in
//! increasing index order, so the same center set always yields the same
//! float regardless of which solver found it.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::balls::BallGraph;
use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::measures::neumaier_sum;

/// Largest candidate set accepted by the exhaustive solver.
pub const EXACT_CAP: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Stop {
    /// Covered mass strictly above the threshold.
    MassAbove(f64),
    /// Every point covered.
    All,
}

pub(crate) struct RawCover {
    pub centers: Vec<usize>,
    pub total_weight: f64,
    pub covered_mass: f64,
}

pub(crate) fn canonical_weight(weights: &[f64], centers: &[usize]) -> f64 {
    let mut sorted = centers.to_vec();
    sorted.sort_unstable();
    sorted.iter().fold(0.0, |acc, &c| acc + weights[c])
}

/// Compensated sum in increasing index order, as in the independent verifier.
fn canonical_mass(masses: &[f64], covered: &BitSet) -> f64 {
    neumaier_sum(covered.iter().map(|i| masses[i]))
}

#[derive(PartialEq)]
struct Key {
    ratio: f64,
    index: usize,
}

impl Eq for Key {}

impl Ord for Key {
    // reversed: BinaryHeap is a max-heap and we pop the smallest (ratio, index)
    fn cmp(&self, other: &Self) -> Ordering {
        other.ratio.total_cmp(&self.ratio).then(other.index.cmp(&self.index))
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn done(stop: Stop, count: usize, len: usize, mass: f64) -> bool {
    match stop {
        Stop::MassAbove(t) => mass > t,
        Stop::All => count == len,
    }
}

/// Ratio-rule greedy: repeatedly takes the candidate minimizing
/// `weight / newly covered mass`, ties to the lowest index.
///
/// Keys are evaluated lazily; a stale key never exceeds the fresh one, so the
/// selection order equals that of the eager rule.
pub(crate) fn greedy(graph: &BallGraph, weights: &[f64], masses: &[f64], stop: Stop) -> Result<RawCover> {
    let len = graph.len();
    let mut covered = BitSet::new(len);
    let mut count = 0usize;
    let mut mass = 0.0;
    let mut centers = Vec::new();
    let gain = |c: usize, covered: &BitSet| {
        let mut g = 0.0;
        graph.for_each(c, |j| {
            if !covered.contains(j) {
                g += masses[j];
            }
        });
        g
    };
    let mut heap: BinaryHeap<Key> = (0..len)
        .filter_map(|c| {
            let g = gain(c, &covered);
            (g > 0.0).then(|| Key { ratio: weights[c] / g, index: c })
        })
        .collect();
    while !done(stop, count, len, mass) {
        let Some(top) = heap.pop() else {
            return Err(Error::Infeasible);
        };
        let g = gain(top.index, &covered);
        if !(g > 0.0) {
            continue;
        }
        let fresh = Key { ratio: weights[top.index] / g, index: top.index };
        if heap.peek().is_some_and(|next| fresh.cmp(next) == Ordering::Less) {
            heap.push(fresh);
            continue;
        }
        centers.push(top.index);
        graph.for_each(top.index, |j| {
            if covered.insert(j) {
                count += 1;
                mass += masses[j];
            }
        });
        if let Stop::MassAbove(t) = stop {
            if mass > t {
                // the running sum may round differently from the canonical one
                mass = canonical_mass(masses, &covered);
            }
        }
    }
    let covered_mass = canonical_mass(masses, &covered);
    Ok(RawCover { total_weight: canonical_weight(weights, &centers), centers, covered_mass })
}

/// Minimum-weight feasible subset by enumeration of all `2^len` subsets.
pub(crate) fn exhaustive(graph: &BallGraph, weights: &[f64], masses: &[f64], stop: Stop) -> Result<RawCover> {
    let len = graph.len();
    if len > EXACT_CAP {
        return Err(Error::ExactTooLarge { size: len, cap: EXACT_CAP });
    }
    let balls: Vec<u32> = (0..len)
        .map(|i| {
            let mut m = 0u32;
            graph.for_each(i, |j| m |= 1 << j);
            m
        })
        .collect();
    let full: u32 = if len == 32 { u32::MAX } else { (1u32 << len) - 1 };
    let mass_of = |mask: u32| neumaier_sum((0..len).filter(|&i| mask >> i & 1 == 1).map(|i| masses[i]));
    let subsets = 1usize << len;
    let mut cover = vec![0u32; subsets];
    // sums are accumulated in increasing index order, matching `canonical_weight`
    let mut weight = vec![0.0f64; subsets];
    let mut best: Option<(f64, usize)> = None;
    for s in 1..subsets {
        let high = usize::BITS as usize - 1 - s.leading_zeros() as usize;
        let rest = s & !(1 << high);
        cover[s] = cover[rest] | balls[high];
        weight[s] = weight[rest] + weights[high];
        if best.is_some_and(|(w, _)| weight[s] >= w) {
            continue;
        }
        let feasible = match stop {
            Stop::All => cover[s] == full,
            Stop::MassAbove(t) => mass_of(cover[s]) > t,
        };
        if feasible {
            best = Some((weight[s], s));
        }
    }
    let (total_weight, s) = best.ok_or(Error::Infeasible)?;
    let centers: Vec<usize> = (0..len).filter(|&i| s >> i & 1 == 1).collect();
    Ok(RawCover { centers, total_weight, covered_mass: mass_of(cover[s]) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::balls::PreparedPoints;
    use crate::measures::{sample_measure, MeasureSpec};
    use crate::orbit_metrics::MetricKind;
    use crate::systems::DynSystem;

    fn sample(m: usize, seed: u64) -> (DynSystem, Vec<crate::systems::Point>) {
        let t = DynSystem::full_shift(2, 24).unwrap();
        let mu = sample_measure(&MeasureSpec::uniform_bernoulli(2), &t, m, seed).unwrap();
        (t, mu.points().to_vec())
    }

    #[test]
    fn greedy_and_exhaustive_are_valid_and_ordered() {
        for seed in 0..10 {
            let (t, pts) = sample(12, seed);
            let prepared = PreparedPoints::new(&t, &pts, 3, MetricKind::mean(1), 0.2).unwrap();
            let g = BallGraph::build(&prepared);
            let weights: Vec<f64> = (0..12).map(|i| 1.0 + (i % 3) as f64).collect();
            let masses = vec![1.0 / 12.0; 12];
            for stop in [Stop::All, Stop::MassAbove(0.75)] {
                let gr = greedy(&g, &weights, &masses, stop).unwrap();
                let ex = exhaustive(&g, &weights, &masses, stop).unwrap();
                assert!(ex.total_weight <= gr.total_weight);
                assert!(gr.total_weight <= (1.0 + libm::log(12.0)) * ex.total_weight);
                for c in [&gr, &ex] {
                    let mut cov = BitSet::new(12);
                    for &x in &c.centers {
                        g.for_each(x, |j| {
                            cov.insert(j);
                        });
                    }
                    match stop {
                        Stop::All => assert_eq!(cov.count(), 12),
                        Stop::MassAbove(t) => assert!(c.covered_mass > t),
                    }
                }
            }
        }
    }

    #[test]
    fn exhaustive_cap() {
        let (t, pts) = sample(21, 1);
        let prepared = PreparedPoints::new(&t, &pts, 2, MetricKind::bowen(1), 0.5).unwrap();
        let g = BallGraph::build(&prepared);
        let err = exhaustive(&g, &[1.0; 21], &[1.0 / 21.0; 21], Stop::All).err().unwrap();
        assert_eq!(err, Error::ExactTooLarge { size: 21, cap: 20 });
    }

    #[test]
    fn infeasible_threshold() {
        let (t, pts) = sample(4, 2);
        let prepared = PreparedPoints::new(&t, &pts, 2, MetricKind::bowen(1), 0.5).unwrap();
        let g = BallGraph::build(&prepared);
        assert_eq!(greedy(&g, &[1.0; 4], &[0.25; 4], Stop::MassAbove(1.0)).err(), Some(Error::Infeasible));
        assert_eq!(exhaustive(&g, &[1.0; 4], &[0.25; 4], Stop::MassAbove(1.0)).err(), Some(Error::Infeasible));
    }
}
