//! Grids of estimates over `(kind, q, eps, n)` with per-`eps` stabilization.
//!
//! Cells are pure functions of the experiment and its seed, so callers may
//! evaluate [`Experiment::cells`] in any order (or concurrently) and hand the
//! results to [`Experiment::summarize`] in canonical order.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{
    cylinder_drift, measure_pressure_estimate, reference_measure_pressure, reference_topological_pressure,
    spanning_pressure, topological_pressure_estimate, CoverMethod, Grid, GridLayout, PressureEstimate, Variant,
};
use crate::error::{Error, Result};
use crate::measures::{sample_measure, EmpiricalMeasure, MeasureSpec};
use crate::orbit_metrics::{Family, MetricKind};
use crate::systems::{DynSystem, Potential};

/// Everything that determines a convergence table.
#[derive(Clone, Debug, PartialEq)]
pub struct Experiment {
    pub variant: Variant,
    pub system: DynSystem,
    pub potential: Potential,
    /// Required for the measure-theoretic variant.
    pub measure: Option<MeasureSpec>,
    pub sample_size: usize,
    pub seed: u64,
    pub n_list: Vec<usize>,
    pub eps_list: Vec<f64>,
    pub q_list: Vec<usize>,
    pub families: Vec<Family>,
    pub method: CoverMethod,
}

/// One grid coordinate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cell {
    pub kind: MetricKind,
    pub eps: f64,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellResult {
    pub cell: Cell,
    pub outcome: Result<PressureEstimate>,
    /// Grid-resolution excess included in the value (cylinder grids, `q = 1`).
    pub drift: Option<f64>,
}

/// Stabilized value at one `(kind, eps)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub kind: MetricKind,
    pub eps: f64,
    /// The successful `n` values averaged into `stabilized`.
    pub n_used: Vec<usize>,
    pub stabilized: Option<f64>,
    pub drift: Option<f64>,
    pub corrected: Option<f64>,
    pub oracle: Option<f64>,
    pub gap: Option<f64>,
}

/// Per kind, the summary at the smallest `eps` that produced a value.
#[derive(Clone, Debug, PartialEq)]
pub struct FinalRow {
    pub kind: MetricKind,
    pub eps: f64,
    pub value: f64,
    pub corrected: f64,
    pub oracle: Option<f64>,
    pub gap: Option<f64>,
    /// The finite grid that produced the value.
    pub label: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub cells: Vec<CellResult>,
    pub summary: Vec<SummaryRow>,
    pub finals: Vec<FinalRow>,
}

impl Table {
    pub fn failures(&self) -> usize {
        self.cells.iter().filter(|c| c.outcome.is_err()).count()
    }
}

/// Shared state sampled once per experiment.
pub struct PreparedExperiment {
    measure: Option<EmpiricalMeasure>,
}

impl Experiment {
    pub fn validate(&self) -> Result<()> {
        if self.n_list.is_empty() || self.eps_list.is_empty() || self.q_list.is_empty() || self.families.is_empty() {
            return Err(Error::invalid("n, eps, q and kind lists must be non-empty"));
        }
        if self.n_list.contains(&0) || self.q_list.contains(&0) {
            return Err(Error::invalid("n and q values must be >= 1"));
        }
        if let Some(e) = self.eps_list.iter().find(|&&e| !(e > 0.0 && e < 1.0)) {
            return Err(Error::invalid(format!("eps must lie in (0, 1), got {e}")));
        }
        if self.variant == Variant::MeasureTheoretic {
            if self.measure.is_none() {
                return Err(Error::invalid("the measure variant needs a measure"));
            }
            if self.sample_size == 0 {
                return Err(Error::invalid("sample size must be >= 1"));
            }
        }
        Ok(())
    }

    fn kinds(&self) -> Vec<MetricKind> {
        if self.variant == Variant::TopologicalSpanning {
            return alloc::vec![MetricKind::bowen(1)];
        }
        let mut kinds: Vec<MetricKind> = self
            .families
            .iter()
            .flat_map(|&f| self.q_list.iter().map(move |&q| MetricKind { family: f, q }))
            .collect();
        kinds.sort_by_key(|k| (k.family, k.q));
        kinds.dedup();
        kinds
    }

    /// All cells, sorted by `(kind, q, eps, n)`.
    pub fn cells(&self) -> Vec<Cell> {
        let mut eps = self.eps_list.clone();
        eps.sort_by(f64::total_cmp);
        eps.dedup();
        let mut ns = self.n_list.clone();
        ns.sort_unstable();
        ns.dedup();
        let mut out = Vec::new();
        for kind in self.kinds() {
            for &e in &eps {
                for &n in &ns {
                    out.push(Cell { kind, eps: e, n });
                }
            }
        }
        out
    }

    pub fn prepare(&self) -> Result<PreparedExperiment> {
        self.validate()?;
        let measure = match (&self.variant, &self.measure) {
            (Variant::MeasureTheoretic, Some(spec)) => {
                Some(sample_measure(spec, &self.system, self.sample_size, self.seed)?)
            }
            _ => None,
        };
        Ok(PreparedExperiment { measure })
    }

    pub fn evaluate(&self, prepared: &PreparedExperiment, cell: &Cell) -> CellResult {
        let Cell { kind, eps, n } = *cell;
        let mut drift = None;
        let outcome = match self.variant {
            Variant::MeasureTheoretic => match &prepared.measure {
                Some(mu) => measure_pressure_estimate(&self.system, &self.potential, mu, n, eps, kind, self.method),
                None => Err(Error::invalid("experiment was not prepared with a measure")),
            },
            Variant::TopologicalCover | Variant::TopologicalSpanning => {
                Grid::builtin(&self.system, n, kind.q, eps).and_then(|grid| {
                    if let GridLayout::Cylinders { cylinder_len } = grid.layout() {
                        if kind.q == 1 {
                            drift = cylinder_drift(&self.system, n, cylinder_len - n);
                        }
                    }
                    if self.variant == Variant::TopologicalSpanning {
                        spanning_pressure(&self.system, &self.potential, n, eps, &grid)
                    } else {
                        topological_pressure_estimate(&self.system, &self.potential, n, eps, kind, &grid, self.method)
                    }
                })
            }
        };
        CellResult { cell: *cell, outcome, drift }
    }

    fn oracle(&self) -> Option<f64> {
        match self.variant {
            Variant::MeasureTheoretic => reference_measure_pressure(&self.system, &self.potential, self.measure.as_ref()?),
            _ => reference_topological_pressure(&self.system, &self.potential),
        }
    }

    /// Stabilized values (mean over the two largest successful `n`) per
    /// `(kind, eps)`, drift-corrected where a drift is known.
    pub fn summarize(&self, cells: Vec<CellResult>) -> Table {
        let oracle = self.oracle();
        let mut summary: Vec<SummaryRow> = Vec::new();
        let mut start = 0;
        while start < cells.len() {
            let head = cells[start].cell;
            let mut end = start;
            while end < cells.len() && cells[end].cell.kind == head.kind && cells[end].cell.eps == head.eps {
                end += 1;
            }
            let ok: Vec<(usize, f64, Option<f64>)> = cells[start..end]
                .iter()
                .filter_map(|c| c.outcome.as_ref().ok().map(|e| (c.cell.n, e.value, c.drift)))
                .collect();
            let last = &ok[ok.len().saturating_sub(2)..];
            let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
            let stabilized = (!last.is_empty()).then(|| mean(&last.iter().map(|t| t.1).collect::<Vec<_>>()));
            let drift = if !last.is_empty() && last.iter().all(|t| t.2.is_some()) {
                Some(mean(&last.iter().map(|t| t.2.unwrap_or(0.0)).collect::<Vec<_>>()))
            } else {
                None
            };
            let corrected = stabilized.map(|s| s - drift.unwrap_or(0.0));
            summary.push(SummaryRow {
                kind: head.kind,
                eps: head.eps,
                n_used: last.iter().map(|t| t.0).collect(),
                stabilized,
                drift,
                corrected,
                oracle,
                gap: corrected.zip(oracle).map(|(c, o)| (c - o).abs()),
            });
            start = end;
        }
        let mut finals: Vec<FinalRow> = Vec::new();
        for row in &summary {
            let (Some(value), Some(corrected)) = (row.stabilized, row.corrected) else { continue };
            let label = format!(
                "eps={} n={}",
                row.eps,
                row.n_used.iter().map(|n| format!("{n}")).collect::<Vec<_>>().join("+")
            );
            let candidate = FinalRow { kind: row.kind, eps: row.eps, value, corrected, oracle: row.oracle, gap: row.gap, label };
            match finals.iter_mut().find(|f| f.kind == row.kind) {
                Some(f) if row.eps < f.eps => *f = candidate,
                Some(_) => {}
                None => finals.push(candidate),
            }
        }
        Table { cells, summary, finals }
    }
}

/// Sequential evaluation of every cell followed by [`Experiment::summarize`].
pub fn convergence_table(experiment: &Experiment) -> Result<Table> {
    let prepared = experiment.prepare()?;
    let cells = experiment.cells().iter().map(|c| experiment.evaluate(&prepared, c)).collect();
    Ok(experiment.summarize(cells))
}
