//! The six commands, each turning a resolved [`RunSpec`] into a [`Report`].

use std::time::Instant;

use orbit_pressure_core::estimators::{CellResult, Experiment, Variant};
use orbit_pressure_core::measures::{ball_mass, brin_katok_summary, sample_measure};
use orbit_pressure_core::systems::parse_word;
use orbit_pressure_core::{orbit_distance, DynSystem, EmpiricalMeasure, Family, MetricKind, Point};

use crate::config::{Command, RunSpec};
use crate::error::{CliError, CliResult};
use crate::output::{Field, Record, Report, RESULT_COLUMNS, SCHEMA_VERSION};
use crate::parallel::map_ordered;
use crate::verify::{run_suite, VerifyOptions};

/// A report plus, for `verify`, the names of violated properties.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub report: Report,
    pub violated: Vec<String>,
}

pub fn execute(spec: &RunSpec) -> CliResult<Outcome> {
    let report = match spec.command {
        Command::Dist => dist(spec)?,
        Command::Entropy | Command::Pressure | Command::Table => table(spec)?,
        Command::BrinKatok => brin_katok(spec)?,
        Command::Verify => return verify(spec),
    };
    Ok(Outcome { report, violated: Vec::new() })
}

/// One result row; unset fields render empty.
#[derive(Clone, Debug, Default)]
struct Row {
    system: String,
    potential: String,
    measure: String,
    kind: Option<MetricKind>,
    n: Option<usize>,
    eps: Option<f64>,
    m: Option<usize>,
    seed: Option<u64>,
    method: String,
    value: Option<f64>,
    covered_mass: Option<f64>,
    centers: Option<usize>,
    walltime_ms: u64,
    status: String,
}

impl Row {
    fn record(self, command: Command) -> Record {
        let int = |x: Option<usize>| x.map_or(Field::Empty, |v| Field::Int(v as u64));
        vec![
            ("schema_version", Field::Int(SCHEMA_VERSION as u64)),
            ("command", Field::str(command.name())),
            ("system", Field::Str(self.system)),
            ("potential", Field::Str(self.potential)),
            ("measure", Field::Str(self.measure)),
            ("kind", self.kind.map_or(Field::Empty, |k| Field::str(k.family.name()))),
            ("q", int(self.kind.map(|k| k.q))),
            ("n", int(self.n)),
            ("eps", Field::opt_num(self.eps)),
            ("M", int(self.m)),
            ("seed", self.seed.map_or(Field::Empty, Field::Int)),
            ("method", Field::Str(self.method)),
            ("value", Field::opt_num(self.value)),
            ("covered_mass", Field::opt_num(self.covered_mass)),
            ("centers", int(self.centers)),
            ("walltime_ms", Field::Int(self.walltime_ms)),
            ("status", Field::Str(self.status)),
        ]
    }
}

fn status_of<T>(r: &orbit_pressure_core::Result<T>) -> String {
    match r {
        Ok(_) => "ok".into(),
        Err(e) => format!("error:{}", e.code()),
    }
}

fn elapsed_ms(start: Instant, timing: bool) -> u64 {
    if timing {
        start.elapsed().as_millis() as u64
    } else {
        0
    }
}

fn kinds(spec: &RunSpec) -> CliResult<Vec<MetricKind>> {
    let mut out = Vec::new();
    for &f in &spec.kinds {
        for &q in &spec.q {
            out.push(MetricKind::new(f, q)?);
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

fn sorted_eps(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn inline_point(system: &DynSystem, text: &str) -> CliResult<Point> {
    let p = match system.alphabet_size() {
        Some(k) => Point::symbolic(parse_word(text)?, k)?,
        None => {
            let x: f64 = text.trim().parse().map_err(|_| CliError::usage(format!("cannot parse point {text:?}")))?;
            Point::circle(x)?
        }
    };
    system.check_point(&p)?;
    Ok(p)
}

fn describe(p: &Point) -> String {
    match p {
        Point::Symbolic(w) => orbit_pressure_core::systems::format_word(w),
        Point::Circle(c) => crate::output::round12(c.to_f64()).unwrap_or(0.0).to_string(),
    }
}

fn dist(spec: &RunSpec) -> CliResult<Report> {
    let system = spec.build_system()?;
    let mut sampled = None;
    let mut sample = |count: usize| -> CliResult<Vec<Point>> {
        let mspec = spec.build_measure(&system)?;
        sampled = Some(mspec.id());
        Ok(sample_measure(&mspec, &system, count, spec.seed)?.points().to_vec())
    };
    let (x, y) = match (&spec.x, &spec.y, spec.x_equals_y) {
        (Some(x), _, true) => {
            let x = inline_point(&system, x)?;
            (x.clone(), x)
        }
        (None, _, true) => {
            let x = sample(1)?.remove(0);
            (x.clone(), x)
        }
        (Some(x), Some(y), false) => (inline_point(&system, x)?, inline_point(&system, y)?),
        (None, None, false) => {
            let mut p = sample(2)?;
            let y = p.remove(1);
            (p.remove(0), y)
        }
        _ => return Err(CliError::usage("give both --x and --y, neither, or --x-equals-y")),
    };
    let mut report = Report::new(spec.echo(), &RESULT_COLUMNS);
    let mut ns = spec.n.clone();
    ns.sort_unstable();
    ns.dedup();
    for kind in kinds(spec)? {
        for &n in &ns {
            let start = Instant::now();
            let d = orbit_distance(&system, &x, &y, n, kind);
            report.rows.push(
                Row {
                    system: system.id(),
                    potential: "none".into(),
                    measure: sampled.clone().unwrap_or_else(|| "none".into()),
                    kind: Some(kind),
                    n: Some(n),
                    seed: sampled.as_ref().map(|_| spec.seed),
                    value: d.as_ref().ok().copied(),
                    walltime_ms: elapsed_ms(start, spec.timing),
                    status: status_of(&d),
                    ..Row::default()
                }
                .record(spec.command),
            );
        }
    }
    report.summary.push(vec![("point", Field::str("x")), ("value", Field::Str(describe(&x)))]);
    report.summary.push(vec![("point", Field::str("y")), ("value", Field::Str(describe(&y)))]);
    Ok(report)
}

fn experiment(spec: &RunSpec) -> CliResult<Experiment> {
    let system = spec.build_system()?;
    let potential = spec.build_potential(&system)?;
    let measure = match spec.variant {
        Variant::MeasureTheoretic => Some(spec.build_measure(&system)?),
        _ => None,
    };
    Ok(Experiment {
        variant: spec.variant,
        system,
        potential,
        measure,
        sample_size: spec.m,
        seed: spec.seed,
        n_list: spec.n.clone(),
        eps_list: spec.eps.clone(),
        q_list: spec.q.clone(),
        families: spec.kinds.clone(),
        method: spec.method,
    })
}

fn cell_row(spec: &RunSpec, exp: &Experiment, c: &CellResult, walltime_ms: u64) -> Record {
    let est = c.outcome.as_ref().ok();
    let measure_variant = exp.variant == Variant::MeasureTheoretic;
    Row {
        system: exp.system.id(),
        potential: exp.potential.id(),
        measure: match (est, &exp.measure) {
            (Some(e), _) => e.target.clone(),
            (None, Some(m)) if measure_variant => m.id(),
            _ => "none".into(),
        },
        kind: Some(c.cell.kind),
        n: Some(c.cell.n),
        eps: Some(c.cell.eps),
        m: if measure_variant { Some(exp.sample_size) } else { est.map(|e| e.sample_size) },
        seed: measure_variant.then_some(exp.seed),
        method: est.map_or(exp.method, |e| e.method).name().into(),
        value: est.map(|e| e.value),
        covered_mass: est.map(|e| e.covered_mass),
        centers: est.map(|e| e.centers),
        walltime_ms,
        status: status_of(&c.outcome),
    }
    .record(spec.command)
}

fn table(spec: &RunSpec) -> CliResult<Report> {
    let exp = experiment(spec)?;
    let prepared = exp.prepare()?;
    let cells = exp.cells();
    let evaluated = map_ordered(&cells, |cell| {
        let start = Instant::now();
        let r = exp.evaluate(&prepared, cell);
        (r, elapsed_ms(start, spec.timing))
    })?;
    let mut report = Report::new(spec.echo(), &RESULT_COLUMNS);
    for (c, ms) in &evaluated {
        report.rows.push(cell_row(spec, &exp, c, *ms));
    }
    let results: Vec<CellResult> = evaluated.into_iter().map(|(c, _)| c).collect();
    let sweeps = q_sweeps(&results);
    let table = exp.summarize(results);
    for s in &table.summary {
        let used: Vec<String> = s.n_used.iter().map(|n| n.to_string()).collect();
        report.summary.push(vec![
            ("summary", Field::str("stabilized")),
            ("kind", Field::str(s.kind.family.name())),
            ("q", Field::Int(s.kind.q as u64)),
            ("eps", Field::Num(s.eps)),
            ("n_used", Field::Str(if used.is_empty() { "none".into() } else { used.join("+") })),
            ("value", Field::opt_num(s.stabilized)),
            ("drift", Field::opt_num(s.drift)),
            ("corrected", Field::opt_num(s.corrected)),
            ("oracle", Field::opt_num(s.oracle)),
            ("gap", Field::opt_num(s.gap)),
        ]);
    }
    for f in &table.finals {
        report.summary.push(vec![
            ("summary", Field::str("final")),
            ("kind", Field::str(f.kind.family.name())),
            ("q", Field::Int(f.kind.q as u64)),
            ("grid", Field::Str(f.label.replace(' ', ";"))),
            ("value", Field::Num(f.value)),
            ("corrected", Field::Num(f.corrected)),
            ("oracle", Field::opt_num(f.oracle)),
            ("gap", Field::opt_num(f.gap)),
        ]);
    }
    if spec.q.len() > 1 {
        report.summary.extend(sweeps);
    }
    report.summary.push(vec![
        ("summary", Field::str("cells")),
        ("total", Field::Int(table.cells.len() as u64)),
        ("failed", Field::Int(table.failures() as u64)),
    ]);
    Ok(report)
}

/// Per `(family, eps, n)`, the minimum over the evaluated `q` and its spread.
fn q_sweeps(results: &[CellResult]) -> Vec<Record> {
    let mut keys: Vec<(Family, u64, usize)> =
        results.iter().map(|c| (c.cell.kind.family, c.cell.eps.to_bits(), c.cell.n)).collect();
    keys.sort_by(|a, b| (a.0, f64::from_bits(a.1), a.2).partial_cmp(&(b.0, f64::from_bits(b.1), b.2)).unwrap());
    keys.dedup();
    let mut out = Vec::new();
    for (family, eps_bits, n) in keys {
        let group: Vec<(usize, f64)> = results
            .iter()
            .filter(|c| c.cell.kind.family == family && c.cell.eps.to_bits() == eps_bits && c.cell.n == n)
            .filter_map(|c| c.outcome.as_ref().ok().map(|e| (c.cell.kind.q, e.value)))
            .collect();
        let Some(&(mut best_q, mut best)) = group.first() else { continue };
        let (mut lo, mut hi) = (best, best);
        for &(q, v) in &group {
            if v < best {
                best = v;
                best_q = q;
            }
            lo = lo.min(v);
            hi = hi.max(v);
        }
        out.push(vec![
            ("summary", Field::str("inf_over_q")),
            ("kind", Field::str(family.name())),
            ("eps", Field::Num(f64::from_bits(eps_bits))),
            ("n", Field::Int(n as u64)),
            ("q_evaluated", Field::Int(group.len() as u64)),
            ("argmin_q", Field::Int(best_q as u64)),
            ("value", Field::Num(best)),
            ("spread", Field::Num(hi - lo)),
        ]);
    }
    out
}

/// Seed offset for Brin-Katok centers, so they are independent of the sample.
const CENTER_SEED_SALT: u64 = 0x5eed_c3e7_7e25_0001;

fn brin_katok(spec: &RunSpec) -> CliResult<Report> {
    let system = spec.build_system()?;
    let mspec = spec.build_measure(&system)?;
    let mu: EmpiricalMeasure = sample_measure(&mspec, &system, spec.m, spec.seed)?;
    let centers = sample_measure(&mspec, &system, spec.centers, spec.seed ^ CENTER_SEED_SALT)?.points().to_vec();
    let mut report = Report::new(spec.echo(), &RESULT_COLUMNS);
    let mut ns = spec.n.clone();
    ns.sort_unstable();
    ns.dedup();
    let eps = sorted_eps(&spec.eps);
    let ks = kinds(spec)?;
    let mut jobs: Vec<(MetricKind, f64, usize)> = Vec::new();
    for &kind in &ks {
        for &delta in &eps {
            for &n in &ns {
                jobs.push((kind, delta, n));
            }
        }
    }
    let results = map_ordered(&jobs, |&(kind, delta, n)| {
        let start = Instant::now();
        let s = brin_katok_summary(&mu, &system, &centers, n, delta, kind);
        (s, elapsed_ms(start, spec.timing))
    })?;
    let uniform = match (&mspec, system.alphabet_size()) {
        (orbit_pressure_core::MeasureSpec::Bernoulli(p), Some(k)) if p.iter().all(|&v| v == 1.0 / k as f64) => {
            Some((k as f64).ln())
        }
        _ => None,
    };
    for (&(kind, delta, n), (s, ms)) in jobs.iter().zip(&results) {
        let status = match s.median {
            Some(_) => "ok".to_string(),
            None => s
                .estimates
                .iter()
                .find_map(|e| e.as_ref().err().map(|e| format!("error:{}", e.code())))
                .unwrap_or_else(|| "error:EMPTY_BALL".into()),
        };
        report.rows.push(
            Row {
                system: system.id(),
                potential: "zero".into(),
                measure: mspec.id(),
                kind: Some(kind),
                n: Some(n),
                eps: Some(delta),
                m: Some(spec.m),
                seed: Some(spec.seed),
                method: "median".into(),
                value: s.median,
                centers: Some(centers.len() - s.failures()),
                walltime_ms: *ms,
                status,
                ..Row::default()
            }
            .record(spec.command),
        );
        // finite-n Bowen value for uniform Bernoulli: the ball is a cylinder
        let finite = match (kind.family, kind.q, uniform) {
            (Family::Bowen, 1, Some(lnk)) => Some((n - 1 + agreement_length(delta)) as f64 / n as f64 * lnk),
            _ => None,
        };
        report.summary.push(vec![
            ("summary", Field::str("brin_katok")),
            ("kind", Field::str(kind.family.name())),
            ("q", Field::Int(kind.q as u64)),
            ("eps", Field::Num(delta)),
            ("n", Field::Int(n as u64)),
            ("median", Field::opt_num(s.median)),
            ("q1", Field::opt_num(s.q1)),
            ("q3", Field::opt_num(s.q3)),
            ("iqr", Field::opt_num(s.iqr())),
            ("failures", Field::Int(s.failures() as u64)),
            ("finite_n_oracle", Field::opt_num(finite)),
            ("entropy", Field::opt_num(mspec.shift_entropy())),
        ]);
    }
    let (checked, violations) = ball_monotonicity(&mu, &system, &centers, &ns, &eps, &spec.q)?;
    report.summary.push(vec![
        ("summary", Field::str("ball_monotonicity")),
        ("checked", Field::Int(checked as u64)),
        ("violations", Field::Int(violations as u64)),
    ]);
    Ok(report)
}

/// Smallest `j` with `2^-j < radius`.
fn agreement_length(radius: f64) -> usize {
    let mut j = 0;
    while 0.5f64.powi(j as i32) >= radius && j < 2000 {
        j += 1;
    }
    j
}

/// Counts `(center, radius)` evaluations where Bowen <= MaxMean <= Mean and
/// Bowen <= FK ball masses fail.
fn ball_monotonicity(
    mu: &EmpiricalMeasure,
    system: &DynSystem,
    centers: &[Point],
    ns: &[usize],
    radii: &[f64],
    qs: &[usize],
) -> CliResult<(usize, usize)> {
    let mut jobs = Vec::new();
    for &q in qs {
        for &n in ns {
            for &r in radii {
                for c in centers {
                    jobs.push((q, n, r, c));
                }
            }
        }
    }
    let res = map_ordered(&jobs, |&(q, n, r, c)| -> orbit_pressure_core::Result<bool> {
        let m = |kind| ball_mass(mu, system, c, r, n, kind);
        let (b, mm, me, fk) =
            (m(MetricKind::bowen(q))?, m(MetricKind::max_mean(q))?, m(MetricKind::mean(q))?, m(MetricKind::fk(q))?);
        Ok(b <= mm && mm <= me && b <= fk)
    })?;
    let mut violations = 0;
    for r in res {
        if !r? {
            violations += 1;
        }
    }
    Ok((jobs.len(), violations))
}

fn verify(spec: &RunSpec) -> CliResult<Outcome> {
    let opts = VerifyOptions { n_max: spec.n_max, seed: spec.seed, inject_fault: spec.inject_fault };
    let columns = ["suite", "property", "status", "cases", "failures", "worst_violation", "detail"];
    let mut report = Report::new(spec.echo(), &columns);
    let mut violated = Vec::new();
    let suites = map_ordered(&spec.suite, |name| run_suite(name, &opts))?;
    for results in suites {
        for r in results? {
            if !r.passed() {
                violated.push(format!("{}: {}", r.suite, r.property));
            }
            report.rows.push(vec![
                ("suite", Field::str(r.suite)),
                ("property", Field::str(r.property)),
                ("status", Field::str(if r.passed() { "pass" } else { "fail" })),
                ("cases", Field::Int(r.cases as u64)),
                ("failures", Field::Int(r.failures as u64)),
                ("worst_violation", Field::Num(r.worst)),
                ("detail", Field::Str(r.detail)),
            ]);
        }
    }
    report.summary.push(vec![
        ("summary", Field::str("verify")),
        ("properties", Field::Int(report.rows.len() as u64)),
        ("failed", Field::Int(violated.len() as u64)),
    ]);
    Ok(Outcome { report, violated })
}
