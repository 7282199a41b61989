//! Plain-text run configuration.
//!
//! Grammar, one setting per line:
//!
//! ```text
//! line    := blank | comment | setting [comment]
//! comment := '#' any-text
//! setting := key '=' value
//! key     := [A-Za-z0-9_-]+        (case-insensitive, '-' and '_' equivalent)
//! value   := any text up to a comment, surrounding whitespace removed
//! ```
//!
//! Lists are comma separated and may be wrapped in `[...]`. A key may appear
//! at most once per file; command-line flags override file settings.

use std::path::PathBuf;

use orbit_pressure_core::estimators::{CoverMethod, Variant};
use orbit_pressure_core::systems::GOLDEN_CONJUGATE;
use orbit_pressure_core::{
    CircleFn, DynSystem, Family, MeasureSpec, Potential, SystemKind, TransitionMatrix,
};

use crate::error::{CliError, CliResult};

/// Where a setting came from, for error reporting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    File { line: usize, col: usize },
    Flag,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Setting {
    pub key: String,
    pub value: String,
    pub origin: Origin,
}

impl Setting {
    pub fn flag(key: &str, value: impl Into<String>) -> Self {
        Setting { key: key.to_string(), value: value.into(), origin: Origin::Flag }
    }

    fn error(&self, msg: impl std::fmt::Display) -> CliError {
        match self.origin {
            Origin::File { line, col } => CliError::Config { line, col, msg: format!("{}: {msg}", self.key) },
            Origin::Flag => CliError::Usage(format!("--{}: {msg}", self.key.replace('_', "-"))),
        }
    }
}

const KEYS: &[&str] = &[
    "command", "system", "k", "transitions", "word_length", "alpha", "potential", "measure", "variant", "n",
    "eps", "q", "q_max", "kinds", "m", "seed", "method", "format", "output", "centers", "x", "y", "x_equals_y",
    "suite", "n_max", "inject_fault", "timing",
];

fn canonical_key(raw: &str) -> Option<&'static str> {
    let k = raw.trim().to_ascii_lowercase().replace('-', "_");
    let k = match k.as_str() {
        "metric" | "metrics" | "kind" => "kinds",
        "sample_size" => "m",
        "delta" => "eps",
        other => other,
    };
    KEYS.iter().copied().find(|&key| key == k)
}

/// Parses config text into settings, reporting the first error by line and column.
pub fn parse_config(text: &str) -> CliResult<Vec<Setting>> {
    let mut out: Vec<Setting> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        let key_col = body.len() - body.trim_start().len() + 1;
        let Some(eq) = body.find('=') else {
            return Err(CliError::Config { line, col: key_col, msg: "expected key=value".into() });
        };
        let raw_key = body[..eq].trim();
        if raw_key.is_empty() || !raw_key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return Err(CliError::Config { line, col: key_col, msg: format!("malformed key {raw_key:?}") });
        }
        let Some(key) = canonical_key(raw_key) else {
            return Err(CliError::Config { line, col: key_col, msg: format!("unknown key {raw_key:?}") });
        };
        if out.iter().any(|s| s.key == key) {
            return Err(CliError::Config { line, col: key_col, msg: format!("duplicate key {key:?}") });
        }
        let after = &body[eq + 1..];
        let value_col = eq + 2 + (after.len() - after.trim_start().len());
        out.push(Setting {
            key: key.to_string(),
            value: after.trim().to_string(),
            origin: Origin::File { line, col: value_col },
        });
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Dist,
    Entropy,
    Pressure,
    BrinKatok,
    Table,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Dist => "dist",
            Command::Entropy => "entropy",
            Command::Pressure => "pressure",
            Command::BrinKatok => "brin-katok",
            Command::Table => "table",
            Command::Verify => "verify",
        }
    }

    fn parse(s: &str) -> Option<Command> {
        [Command::Dist, Command::Entropy, Command::Pressure, Command::BrinKatok, Command::Table, Command::Verify]
            .into_iter()
            .find(|c| c.name() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Names of the property suites run by `verify`.
pub const SUITES: &[&str] =
    &["chain", "pseudometric", "fk-oracle", "fk-infimum", "cover-sandwich", "cover-validity", "potential-shift"];

/// A fully resolved run: every default filled in.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSpec {
    pub command: Command,
    pub system: String,
    pub k: usize,
    pub transitions: Option<String>,
    pub word_length: usize,
    pub alpha: String,
    pub potential: String,
    pub measure: String,
    pub variant: Variant,
    pub n: Vec<usize>,
    pub eps: Vec<f64>,
    pub q: Vec<usize>,
    pub q_max: Option<usize>,
    pub kinds: Vec<Family>,
    pub m: usize,
    pub seed: u64,
    pub method: CoverMethod,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub centers: usize,
    pub x: Option<String>,
    pub y: Option<String>,
    pub x_equals_y: bool,
    pub suite: Vec<String>,
    pub n_max: usize,
    pub inject_fault: bool,
    pub timing: bool,
}

fn list_items(s: &Setting) -> CliResult<Vec<&str>> {
    let v = s.value.trim();
    let v = v.strip_prefix('[').and_then(|v| v.strip_suffix(']')).unwrap_or(v);
    let items: Vec<&str> = v.split(',').map(str::trim).filter(|x| !x.is_empty()).collect();
    if items.is_empty() {
        return Err(s.error("list is empty"));
    }
    Ok(items)
}

fn parse_list<T: std::str::FromStr>(s: &Setting) -> CliResult<Vec<T>> {
    list_items(s)?
        .into_iter()
        .map(|x| x.parse::<T>().map_err(|_| s.error(format!("cannot parse {x:?}"))))
        .collect()
}

fn parse_one<T: std::str::FromStr>(s: &Setting) -> CliResult<T> {
    s.value.trim().parse::<T>().map_err(|_| s.error(format!("cannot parse {:?}", s.value)))
}

fn parse_bool(s: &Setting) -> CliResult<bool> {
    match s.value.trim() {
        "" | "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(s.error(format!("expected a boolean, got {other:?}"))),
    }
}

/// Splits `fullshift3` into (`fullshift`, Some(3)).
fn split_system(name: &str) -> (String, Option<usize>) {
    let name = name.trim().to_ascii_lowercase();
    if let Some(rest) = name.strip_prefix("fullshift") {
        if !rest.is_empty() {
            if let Ok(k) = rest.parse() {
                return ("fullshift".into(), Some(k));
            }
        }
    }
    (name, None)
}

impl RunSpec {
    /// Applies `settings` in order (later ones win) on top of the command defaults.
    pub fn resolve(command: Command, settings: &[Setting]) -> CliResult<RunSpec> {
        let symbolic_default = 256;
        let mut spec = RunSpec {
            command,
            system: "fullshift".into(),
            k: 2,
            transitions: None,
            word_length: symbolic_default,
            alpha: "golden".into(),
            potential: "zero".into(),
            measure: String::new(),
            variant: Variant::MeasureTheoretic,
            n: match command {
                Command::Entropy | Command::Pressure | Command::Table => vec![8, 12],
                _ => vec![8],
            },
            eps: vec![if command == Command::BrinKatok { 0.125 } else { 0.1 }],
            q: vec![1],
            q_max: None,
            kinds: Family::ALL.to_vec(),
            m: 2000,
            seed: 1,
            method: CoverMethod::Greedy,
            format: Format::Csv,
            output: None,
            centers: 25,
            x: None,
            y: None,
            x_equals_y: false,
            suite: Vec::new(),
            n_max: 8,
            inject_fault: false,
            timing: false,
        };
        let mut measure: Option<String> = None;
        let mut k_set = false;
        for s in settings {
            match s.key.as_str() {
                "command" => {
                    if Command::parse(s.value.trim()) != Some(command) {
                        return Err(s.error(format!("config is for command {:?}, not {:?}", s.value, command.name())));
                    }
                }
                "system" => {
                    let (name, k) = split_system(&s.value);
                    if !["fullshift", "golden", "sft", "doubling", "rotation"].contains(&name.as_str()) {
                        return Err(s.error(format!("unknown system {:?}", s.value)));
                    }
                    spec.system = name;
                    if let Some(k) = k {
                        spec.k = k;
                        k_set = true;
                    }
                }
                "k" => {
                    spec.k = parse_one(s)?;
                    k_set = true;
                }
                "transitions" => spec.transitions = Some(s.value.trim().to_string()),
                "word_length" => spec.word_length = parse_one(s)?,
                "alpha" => spec.alpha = s.value.trim().to_string(),
                "potential" => spec.potential = s.value.trim().to_string(),
                "measure" => measure = Some(s.value.trim().to_string()),
                "variant" => spec.variant = s.value.trim().parse().map_err(|e| s.error(e))?,
                "n" => spec.n = parse_list(s)?,
                "eps" => spec.eps = parse_list(s)?,
                "q" => spec.q = parse_list(s)?,
                "q_max" => spec.q_max = Some(parse_one(s)?),
                "kinds" => {
                    spec.kinds = list_items(s)?
                        .into_iter()
                        .map(|x| x.parse::<Family>().map_err(|e| s.error(e)))
                        .collect::<CliResult<_>>()?;
                }
                "m" => spec.m = parse_one(s)?,
                "seed" => spec.seed = parse_one(s)?,
                "method" => spec.method = s.value.trim().parse().map_err(|e| s.error(e))?,
                "format" => {
                    spec.format = match s.value.trim() {
                        "csv" => Format::Csv,
                        "json" => Format::Json,
                        other => return Err(s.error(format!("unknown format {other:?}"))),
                    }
                }
                "output" => spec.output = Some(PathBuf::from(s.value.trim())),
                "centers" => spec.centers = parse_one(s)?,
                "x" => spec.x = Some(s.value.trim().to_string()),
                "y" => spec.y = Some(s.value.trim().to_string()),
                "x_equals_y" => spec.x_equals_y = parse_bool(s)?,
                "suite" => {
                    spec.suite = list_items(s)?.into_iter().map(String::from).collect();
                    if let Some(bad) = spec.suite.iter().find(|x| !SUITES.contains(&x.as_str())) {
                        return Err(s.error(format!("unknown suite {bad:?}; known: {}", SUITES.join(", "))));
                    }
                }
                "n_max" => spec.n_max = parse_one(s)?,
                "inject_fault" => spec.inject_fault = parse_bool(s)?,
                "timing" => spec.timing = parse_bool(s)?,
                other => return Err(s.error(format!("unhandled key {other:?}"))),
            }
            let bad_list = match s.key.as_str() {
                "n" => spec.n.contains(&0),
                "q" => spec.q.contains(&0),
                "q_max" => spec.q_max == Some(0),
                "m" => spec.m == 0,
                "centers" => spec.centers == 0,
                _ => false,
            };
            if bad_list {
                return Err(s.error("values must be >= 1"));
            }
            if s.key == "eps" && spec.eps.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
                return Err(s.error("values must lie in (0, 1)"));
            }
        }
        if (spec.system == "golden" || spec.system == "sft") && !k_set {
            spec.k = match (&spec.system[..], &spec.transitions) {
                ("sft", Some(t)) => t.split(',').count(),
                _ => 2,
            };
        }
        if command == Command::Entropy {
            spec.potential = "zero".into();
        }
        if let Some(q_max) = spec.q_max {
            spec.q = (1..=q_max).collect();
        }
        spec.measure = match measure {
            Some(m) => m,
            None => match spec.system.as_str() {
                "fullshift" => "bernoulli".into(),
                "golden" | "sft" => "parry".into(),
                _ => "lebesgue".into(),
            },
        };
        if spec.suite.is_empty() {
            spec.suite = SUITES.iter().map(|s| s.to_string()).collect();
        }
        Ok(spec)
    }

    pub fn build_system(&self) -> CliResult<DynSystem> {
        let sys = match self.system.as_str() {
            "fullshift" => DynSystem::full_shift(self.k, self.word_length)?,
            "golden" => DynSystem::golden_mean(self.word_length)?,
            "sft" => {
                let text = self
                    .transitions
                    .as_deref()
                    .ok_or_else(|| CliError::usage("system=sft needs transitions=ROW,ROW,..."))?;
                DynSystem::sft(parse_transitions(text)?, self.word_length)?
            }
            "doubling" => DynSystem::doubling(),
            "rotation" => {
                let alpha = match self.alpha.as_str() {
                    "golden" => GOLDEN_CONJUGATE,
                    a => a.parse::<f64>().map_err(|_| CliError::usage(format!("alpha: cannot parse {a:?}")))?,
                };
                DynSystem::rotation(alpha)?
            }
            other => return Err(CliError::usage(format!("unknown system {other:?}"))),
        };
        Ok(sys)
    }

    pub fn build_potential(&self, system: &DynSystem) -> CliResult<Potential> {
        let phi = parse_potential(&self.potential)?;
        let ok = match (&phi, system.is_symbolic()) {
            (Potential::FirstSymbol(t), true) => Some(t.len()) == system.alphabet_size(),
            (Potential::FirstSymbol(_), false) | (Potential::Circle { .. }, true) => false,
            _ => true,
        };
        if !ok {
            return Err(CliError::usage(format!("potential {:?} does not fit system {}", self.potential, system.id())));
        }
        Ok(phi)
    }

    pub fn build_measure(&self, system: &DynSystem) -> CliResult<MeasureSpec> {
        parse_measure(&self.measure, system)
    }

    /// Resolved settings in a fixed order, as echoed into output headers.
    pub fn echo(&self) -> Vec<(String, String)> {
        fn join<T: ToString>(xs: &[T]) -> String {
            xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
        }
        let mut out: Vec<(String, String)> = vec![("command".into(), self.command.name().into())];
        if self.command != Command::Verify {
            out.push(("system".into(), self.system.clone()));
        }
        let system = if self.command == Command::Verify { "" } else { self.system.as_str() };
        match system {
            "fullshift" | "golden" | "sft" => {
                out.push(("k".into(), self.k.to_string()));
                if let Some(t) = &self.transitions {
                    out.push(("transitions".into(), t.clone()));
                }
                out.push(("word_length".into(), self.word_length.to_string()));
            }
            "rotation" => out.push(("alpha".into(), self.alpha.clone())),
            _ => {}
        }
        let kinds: Vec<&str> = self.kinds.iter().map(|f| f.name()).collect();
        match self.command {
            Command::Dist => {
                out.push(("n".into(), join(&self.n)));
                out.push(("q".into(), join(&self.q)));
                out.push(("kinds".into(), kinds.join(",")));
                out.push(("x".into(), self.x.clone().unwrap_or_else(|| "sampled".into())));
                out.push(("y".into(), self.y.clone().unwrap_or_else(|| "sampled".into())));
                out.push(("x_equals_y".into(), self.x_equals_y.to_string()));
                out.push(("measure".into(), self.measure.clone()));
                out.push(("seed".into(), self.seed.to_string()));
            }
            Command::Verify => {
                out.push(("suite".into(), self.suite.join(",")));
                out.push(("n_max".into(), self.n_max.to_string()));
                out.push(("seed".into(), self.seed.to_string()));
                out.push(("inject_fault".into(), self.inject_fault.to_string()));
            }
            _ => {
                out.push(("potential".into(), self.potential.clone()));
                if self.command == Command::BrinKatok || self.variant == Variant::MeasureTheoretic {
                    out.push(("measure".into(), self.measure.clone()));
                    out.push(("m".into(), self.m.to_string()));
                    out.push(("seed".into(), self.seed.to_string()));
                }
                if self.command != Command::BrinKatok {
                    out.push(("variant".into(), self.variant.name().into()));
                    out.push(("method".into(), self.method.name().into()));
                } else {
                    out.push(("centers".into(), self.centers.to_string()));
                }
                out.push(("n".into(), join(&self.n)));
                out.push(("eps".into(), join(&self.eps)));
                out.push(("q".into(), join(&self.q)));
                if let Some(q) = self.q_max {
                    out.push(("q_max".into(), q.to_string()));
                }
                out.push(("kinds".into(), kinds.join(",")));
            }
        }
        out.push(("format".into(), self.format.name().into()));
        out
    }
}

pub fn parse_transitions(text: &str) -> CliResult<TransitionMatrix> {
    let rows: Vec<Vec<u8>> = text
        .split(',')
        .map(|row| {
            row.trim()
                .chars()
                .map(|c| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    _ => Err(CliError::usage(format!("transitions: invalid entry {c:?}"))),
                })
                .collect()
        })
        .collect::<CliResult<_>>()?;
    Ok(TransitionMatrix::from_rows(&rows)?)
}

fn num(text: &str, what: &str) -> CliResult<f64> {
    text.trim().parse::<f64>().map_err(|_| CliError::usage(format!("{what}: cannot parse {text:?}")))
}

fn nums(text: &str, what: &str) -> CliResult<Vec<f64>> {
    text.split(',').map(|t| num(t, what)).collect()
}

/// `zero | const:C | first_symbol:A,B,.. | identity[+C] | cos:A[+C]`
pub fn parse_potential(text: &str) -> CliResult<Potential> {
    let text = text.trim();
    let (head, rest) = text.split_once(':').unwrap_or((text, ""));
    let with_offset = |func: CircleFn, offset: Option<&str>| -> CliResult<Potential> {
        let offset = match offset {
            Some(o) => num(o, "potential offset")?,
            None => 0.0,
        };
        Ok(Potential::Circle { func, offset })
    };
    match head {
        "zero" => Ok(Potential::Zero),
        "const" => Ok(Potential::Constant(num(rest, "const")?)),
        "first_symbol" => Ok(Potential::FirstSymbol(nums(rest, "first_symbol")?)),
        "identity" => with_offset(CircleFn::Identity, None),
        _ if head.starts_with("identity+") => with_offset(CircleFn::Identity, head.strip_prefix("identity+")),
        "cos" => {
            // a leading sign belongs to the amplitude
            let sign_len = usize::from(rest.starts_with('-') || rest.starts_with('+'));
            let (amp, offset) = match rest[sign_len..].split_once('+') {
                Some((a, o)) => (&rest[..sign_len + a.len()], Some(o)),
                None => (rest, None),
            };
            with_offset(CircleFn::Cosine { amplitude: num(amp, "cos amplitude")? }, offset)
        }
        _ => Err(CliError::usage(format!("unknown potential {text:?}"))),
    }
}

/// `bernoulli[:P,..] | markov:ROW;ROW.. | parry | lebesgue`
pub fn parse_measure(text: &str, system: &DynSystem) -> CliResult<MeasureSpec> {
    let text = text.trim();
    let (head, rest) = text.split_once(':').unwrap_or((text, ""));
    let spec = match head {
        "bernoulli" if rest.is_empty() => {
            let k = system
                .alphabet_size()
                .ok_or_else(|| CliError::usage("bernoulli needs a symbolic system"))?;
            MeasureSpec::uniform_bernoulli(k)
        }
        "bernoulli" => MeasureSpec::bernoulli(nums(rest, "bernoulli")?)?,
        "markov" => {
            let rows: Vec<Vec<f64>> = rest.split(';').map(|r| nums(r, "markov")).collect::<CliResult<_>>()?;
            MeasureSpec::markov(&rows)?
        }
        "parry" => match system.kind() {
            SystemKind::Sft(a) => MeasureSpec::parry(a)?,
            SystemKind::FullShift { k } => MeasureSpec::uniform_bernoulli(*k),
            _ => return Err(CliError::usage("parry needs a symbolic system")),
        },
        "lebesgue" => MeasureSpec::LebesgueCircle,
        _ => return Err(CliError::usage(format!("unknown measure {text:?}"))),
    };
    Ok(spec)
}
