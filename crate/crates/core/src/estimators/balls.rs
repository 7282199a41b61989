//! Membership of points in each other's orbit-metric balls.
//!
//! For symbolic systems the Bowen metric is an ultrametric, so its open balls
//! partition any set of equal-length words into classes keyed by the symbols
//! at the orbit windows. The FK ball coincides with the Bowen ball whenever
//! `n * radius <= 1` (only the identity match can leave fewer than
//! `radius * n` indices unmatched), so it shares that path. Other
//! combinations fall back to pairwise evaluation, blocked by a prefix key
//! where the first base distance bounds the metric from below.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::bitset::BitSet;
use crate::error::Result;
use crate::orbit_metrics::{required_match, within_kernel, Family, MetricKind, OrbitRef};
use crate::systems::{agreement_length, CirclePoint, DynSystem, Point};

/// Point sets up to this size store dense bit rows.
const DENSE_LIMIT: usize = 16_384;

enum Orbits<'a> {
    Symbolic { words: Vec<&'a [u8]>, step: usize },
    Circle { coords: Vec<CirclePoint>, n: usize },
}

impl Orbits<'_> {
    #[inline]
    fn view(&self, i: usize) -> OrbitRef<'_> {
        match self {
            Orbits::Symbolic { words, step } => OrbitRef::Symbolic { word: words[i], step: *step },
            Orbits::Circle { coords, n } => OrbitRef::Circle(&coords[i * n..(i + 1) * n]),
        }
    }
}

/// Orbits of a point set prepared for repeated ball queries at one `(n, kind, radius)`.
pub struct PreparedPoints<'a> {
    n: usize,
    kind: MetricKind,
    radius: f64,
    orbits: Orbits<'a>,
    blocks: Vec<Vec<u32>>,
    exact_classes: bool,
    /// Circle pairs farther apart than this at time 0 are never within the radius.
    arc_bound: Option<f64>,
}

impl<'a> PreparedPoints<'a> {
    pub fn new(system: &DynSystem, points: &'a [Point], n: usize, kind: MetricKind, radius: f64) -> Result<Self> {
        for p in points {
            system.check_horizon(p, n, kind.q)?;
        }
        let orbits = if system.is_symbolic() {
            Orbits::Symbolic {
                words: points.iter().map(|p| p.as_word().unwrap_or(&[])).collect(),
                step: kind.q,
            }
        } else {
            let mut coords = Vec::with_capacity(points.len() * n);
            for p in points {
                let mut cur = p.as_circle().unwrap_or_default();
                for _ in 0..n {
                    coords.push(cur);
                    cur = system.circle_iterate(cur, kind.q);
                }
            }
            Orbits::Circle { coords, n }
        };
        let (blocks, exact_classes) = match &orbits {
            Orbits::Symbolic { words, step } => symbolic_blocks(words, *step, n, kind, radius),
            Orbits::Circle { .. } => (vec![(0..points.len() as u32).collect()], false),
        };
        let arc_bound = match (&orbits, first_distance_bound(kind.family, n, radius)) {
            // slack covers rounding in the mean; extra candidates are filtered by `within`
            (Orbits::Circle { .. }, Some(b)) if b < 0.5 => Some(b * (1.0 + 1e-9)),
            _ => None,
        };
        Ok(PreparedPoints { n, kind, radius, orbits, blocks, exact_classes, arc_bound })
    }

    pub fn len(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Whether balls are known to be exact equivalence classes.
    pub fn exact_classes(&self) -> bool {
        self.exact_classes
    }

    #[inline]
    fn within(&self, i: usize, j: usize) -> bool {
        within_kernel(&self.orbits.view(i), &self.orbits.view(j), self.n, self.kind.family, self.radius)
    }

    /// Calls `f(i, j)` once for every unordered pair `i != j` that may lie within the radius.
    fn candidate_pairs(&self, mut f: impl FnMut(usize, usize)) {
        if let (Orbits::Circle { coords, n }, Some(bound)) = (&self.orbits, self.arc_bound) {
            let len = self.len();
            let start = |i: u32| coords[i as usize * n].bits();
            let mut order: Vec<u32> = (0..len as u32).collect();
            order.sort_unstable_by_key(|&i| (start(i), i));
            // with bound < 1/2 a close pair is within `bound` going forward from exactly one end
            for a in 0..len {
                let i = order[a];
                for step in 1..len {
                    let j = order[(a + step) % len];
                    let gap = start(j).wrapping_sub(start(i)) as f64 / TWO_POW_64;
                    if gap >= bound {
                        break;
                    }
                    f(i as usize, j as usize);
                }
            }
            return;
        }
        for block in &self.blocks {
            for (a, &i) in block.iter().enumerate() {
                for &j in &block[a + 1..] {
                    f(i as usize, j as usize);
                }
            }
        }
    }
}

const TWO_POW_64: f64 = 18_446_744_073_709_551_616.0;

/// A bound on the time-0 base distance implied by `d < radius`.
fn first_distance_bound(family: Family, n: usize, radius: f64) -> Option<f64> {
    match family {
        Family::Bowen | Family::MaxMean => Some(radius),
        Family::Mean => Some(radius * n as f64),
        Family::FeldmanKatok => None,
    }
}

fn symbolic_blocks(words: &[&[u8]], step: usize, n: usize, kind: MetricKind, radius: f64) -> (Vec<Vec<u32>>, bool) {
    let same_length = words.windows(2).all(|w| w[0].len() == w[1].len());
    let len = words.first().map_or(0, |w| w.len());
    let bowen_like = match kind.family {
        Family::Bowen => true,
        Family::FeldmanKatok => required_match(n, radius) == n,
        _ => false,
    };
    let (positions, exact): (Vec<usize>, bool) = if bowen_like && same_length {
        let agree = agreement_length(radius);
        let mut pos: Vec<usize> = (0..n).flat_map(|i| step * i..step * i + agree).filter(|&p| p < len).collect();
        pos.sort_unstable();
        pos.dedup();
        (pos, true)
    } else {
        match first_distance_bound(kind.family, n, radius) {
            Some(b) => {
                let agree = agreement_length(b);
                let shortest = words.iter().map(|w| w.len()).min().unwrap_or(0);
                ((0..agree.min(shortest)).collect(), false)
            }
            None => (Vec::new(), false),
        }
    };
    let mut ids: BTreeMap<Vec<u8>, u32> = BTreeMap::new();
    let mut blocks: Vec<Vec<u32>> = Vec::new();
    for (i, w) in words.iter().enumerate() {
        let key: Vec<u8> = positions.iter().map(|&p| w[p]).collect();
        let next = blocks.len() as u32;
        let id = *ids.entry(key).or_insert(next);
        if id == next {
            blocks.push(Vec::new());
        }
        blocks[id as usize].push(i as u32);
    }
    (blocks, exact)
}

enum Rows {
    Classes { class_of: Vec<u32>, members: Vec<Vec<u32>> },
    Dense(Vec<BitSet>),
    Sparse(Vec<Vec<u32>>),
}

/// For every point `i`, the indices `j` with `d(x_i, x_j) < radius`.
pub struct BallGraph {
    len: usize,
    rows: Rows,
}

impl BallGraph {
    pub fn build(prepared: &PreparedPoints<'_>) -> Self {
        let len = prepared.len();
        if prepared.exact_classes {
            let mut class_of = vec![0u32; len];
            for (c, block) in prepared.blocks.iter().enumerate() {
                for &i in block {
                    class_of[i as usize] = c as u32;
                }
            }
            return BallGraph { len, rows: Rows::Classes { class_of, members: prepared.blocks.clone() } };
        }
        if len <= DENSE_LIMIT {
            let mut rows: Vec<BitSet> = (0..len).map(|_| BitSet::new(len)).collect();
            for (i, row) in rows.iter_mut().enumerate() {
                row.insert(i);
            }
            prepared.candidate_pairs(|i, j| {
                if prepared.within(i, j) {
                    rows[i].insert(j);
                    rows[j].insert(i);
                }
            });
            BallGraph { len, rows: Rows::Dense(rows) }
        } else {
            let mut rows: Vec<Vec<u32>> = (0..len as u32).map(|i| vec![i]).collect();
            prepared.candidate_pairs(|i, j| {
                if prepared.within(i, j) {
                    rows[i].push(j as u32);
                    rows[j].push(i as u32);
                }
            });
            for r in rows.iter_mut() {
                r.sort_unstable();
            }
            BallGraph { len, rows: Rows::Sparse(rows) }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Calls `f` for every member of the ball around `i`, in increasing order.
    #[inline]
    pub fn for_each(&self, i: usize, mut f: impl FnMut(usize)) {
        match &self.rows {
            Rows::Classes { class_of, members } => {
                for &j in &members[class_of[i] as usize] {
                    f(j as usize);
                }
            }
            Rows::Dense(rows) => rows[i].iter().for_each(f),
            Rows::Sparse(rows) => rows[i].iter().for_each(|&j| f(j as usize)),
        }
    }

    pub fn ball(&self, i: usize) -> Vec<usize> {
        let mut out = Vec::new();
        self.for_each(i, |j| out.push(j));
        out
    }

    pub fn ball_size(&self, i: usize) -> usize {
        match &self.rows {
            Rows::Classes { class_of, members } => members[class_of[i] as usize].len(),
            Rows::Dense(rows) => rows[i].count(),
            Rows::Sparse(rows) => rows[i].len(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{sample_measure, MeasureSpec};
    use crate::orbit_metrics::within;

    fn brute(system: &DynSystem, points: &[Point], n: usize, kind: MetricKind, r: f64) -> Vec<Vec<usize>> {
        (0..points.len())
            .map(|i| {
                (0..points.len())
                    .filter(|&j| within(system, &points[i], &points[j], n, kind, r).unwrap())
                    .collect()
            })
            .collect()
    }

    #[test]
    fn graph_equals_pairwise_evaluation() {
        let shift = DynSystem::full_shift(2, 40).unwrap();
        let words = sample_measure(&MeasureSpec::uniform_bernoulli(2), &shift, 150, 4).unwrap();
        let circle = DynSystem::doubling();
        let coords = sample_measure(&MeasureSpec::LebesgueCircle, &circle, 150, 4).unwrap();
        let rotation = DynSystem::rotation(crate::systems::GOLDEN_CONJUGATE).unwrap();
        let turns = sample_measure(&MeasureSpec::LebesgueCircle, &rotation, 150, 5).unwrap();
        for (system, mu) in [(&shift, &words), (&circle, &coords), (&rotation, &turns)] {
            for family in Family::ALL {
                for (n, q, r) in [(3, 1, 0.3), (5, 2, 0.05), (4, 1, 0.26), (6, 3, 0.6), (8, 1, 0.02), (2, 1, 0.2)] {
                    let kind = MetricKind::new(family, q).unwrap();
                    let prepared = PreparedPoints::new(system, mu.points(), n, kind, r).unwrap();
                    let g = BallGraph::build(&prepared);
                    let expect = brute(system, mu.points(), n, kind, r);
                    for (i, row) in expect.iter().enumerate() {
                        assert_eq!(&g.ball(i), row, "{family} n={n} q={q} r={r} i={i}");
                        assert_eq!(g.ball_size(i), row.len());
                    }
                }
            }
        }
    }

    #[test]
    fn bowen_classes_are_exact() {
        let shift = DynSystem::full_shift(2, 30).unwrap();
        let mu = sample_measure(&MeasureSpec::uniform_bernoulli(2), &shift, 64, 1).unwrap();
        let p = PreparedPoints::new(&shift, mu.points(), 4, MetricKind::bowen(1), 0.125).unwrap();
        assert!(p.exact_classes());
        // FK with n * r <= 1 shares the Bowen classes
        let p = PreparedPoints::new(&shift, mu.points(), 4, MetricKind::fk(1), 0.25).unwrap();
        assert!(p.exact_classes());
        let p = PreparedPoints::new(&shift, mu.points(), 4, MetricKind::fk(1), 0.26).unwrap();
        assert!(!p.exact_classes());
    }
}
