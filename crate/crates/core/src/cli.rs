//! Command-line front end.
//!
//! Every subcommand shares one flag set. A flat TOML file given with
//! `--config` supplies defaults using the same key names; flags on the
//! command line take precedence.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Deserializer, Serialize};
use serde_json::json;

use crate::bounds::{self, AsymptoticBound, DEFAULT_EPSILON};
use crate::components::connected_components;
use crate::error::{param, Error, Result};
use crate::experiments::{self, ExperimentConfig, Overlays, SweepAxis};
use crate::graph::{construct_r_type, delete_random_nodes, GraphParams, GraphView};
use crate::oracle::{self, EXHAUSTIVE_MAX_N};
use crate::rng::seeded;
use crate::validate::{self, Level};

#[derive(Debug, Parser)]
#[command(name = "koutlab", version, about = "Inhomogeneous random K-out graph laboratory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample one graph (optionally with deletion) and report its components.
    Sample(Flags),
    /// Monte-Carlo sweep over one parameter; writes CSV plus a JSON mirror.
    Sweep(Flags),
    /// Evaluate closed-form bounds over an M or x grid.
    Bounds(Flags),
    /// Exact finite-n cut probabilities and union-bound sums.
    Oracle(Flags),
    /// Run the self-check suites.
    Validate(Flags),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundArg {
    /// Undeleted two-class tail bound.
    T1,
    /// Deleted-graph bound with two geometric tails.
    T2,
    /// Single-tail deleted bound.
    Alt,
    /// r-class undeleted bound (needs --mu-vec and --k-vec).
    R,
    /// Erdős–Rényi giant fraction for mean degree --c.
    Er,
    /// Heuristic giant-size floor n − d − d/(⟨K⟩−1).
    Heuristic,
    /// Expected mean degree of the undeleted graph.
    MeanDegree,
    /// Mean selections ⟨K⟩.
    Avg,
    /// Finite-n union-bound sum for the undeleted graph.
    Union,
    /// Finite-n union-bound sum after deleting d nodes.
    UnionDel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    Mu,
    K,
    D,
    N,
}

/// A number list as typed by the user: `60`, `20,40,60`, `2..10`,
/// `0.1..0.9:0.1`, or any comma-separated mix.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct NumList(String);

impl FromStr for NumList {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        parse_floats(s).map_err(|e| e.to_string())?;
        Ok(NumList(s.trim().to_string()))
    }
}

impl fmt::Display for NumList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for NumList {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Float(f64),
            Str(String),
            List(Vec<Raw>),
        }
        fn flatten(r: Raw) -> String {
            match r {
                Raw::Int(i) => i.to_string(),
                Raw::Float(f) => f.to_string(),
                Raw::Str(s) => s,
                Raw::List(v) => v.into_iter().map(flatten).collect::<Vec<_>>().join(","),
            }
        }
        let s = flatten(Raw::deserialize(de)?);
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl NumList {
    pub fn floats(&self) -> Result<Vec<f64>> {
        parse_floats(&self.0)
    }

    pub fn integers(&self) -> Result<Vec<u64>> {
        self.floats()?
            .into_iter()
            .map(|v| {
                if v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64 {
                    Ok(v as u64)
                } else {
                    Err(param(format!("expected a nonnegative integer, got {v} in '{}'", self.0)))
                }
            })
            .collect()
    }
}

fn parse_floats(s: &str) -> Result<Vec<f64>> {
    let num = |t: &str| -> Result<f64> {
        t.trim()
            .parse::<f64>()
            .map_err(|_| param(format!("cannot parse '{t}' as a number")))
    };
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        match item.split_once("..") {
            None => out.push(num(item)?),
            Some((lo, rest)) => {
                let (hi, step) = match rest.split_once(':') {
                    Some((hi, step)) => (num(hi)?, num(step)?),
                    None => (num(rest)?, 1.0),
                };
                let lo = num(lo)?;
                if step.is_nan() || step <= 0.0 || hi < lo {
                    return Err(param(format!("range '{item}' needs lo <= hi and a positive step")));
                }
                let count = ((hi - lo) / step + 1e-9).floor() as u64;
                out.extend((0..=count).map(|i| ((lo + i as f64 * step) * 1e12).round() / 1e12));
            }
        }
    }
    if out.is_empty() {
        return Err(param(format!("empty number list '{s}'")));
    }
    Ok(out)
}

/// Flags shared by all subcommands. Also the schema of `--config` files.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields, default)]
pub struct Flags {
    /// Flat TOML file with defaults for any of these flags.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Number of nodes.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Probability of a type-1 node (two-class ensembles).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    /// Class probabilities for r classes, comma-separated.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu_vec: Option<Vec<f64>>,
    /// Selections made by type-2 nodes.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Per-class selection counts, comma-separated and increasing.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_vec: Option<Vec<usize>>,
    /// Number of deleted nodes.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    /// Outside-count threshold grid (undeleted bounds).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<NumList>,
    /// Outside-count threshold grid (deleted bounds).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<NumList>,
    /// Trade-off parameter of the deleted bounds.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    /// Mean degree for `--kind er`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    /// Cut size for `oracle`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    /// Bound to evaluate.
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<BoundArg>,
    /// Parameter varied by `sweep`.
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepParam>,
    /// Values of the swept parameter.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<NumList>,
    /// Bound overlays for `sweep`: t1, t2, heuristic.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub overlay: Option<Vec<String>>,
    /// Monte-Carlo trials per point.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    /// Master seed; random when omitted.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Output file.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    /// Suite level for `validate`.
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<Level>,
}

impl Flags {
    /// Fills unset flags from `--config`, if given.
    pub fn resolve(self) -> Result<Flags> {
        let Some(path) = &self.config else {
            return Ok(self);
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| param(format!("cannot read config {}: {e}", path.display())))?;
        let file: Flags = toml::from_str(&text)
            .map_err(|e| param(format!("bad config {}: {e}", path.display())))?;
        Ok(self.or(file))
    }

    fn or(self, o: Flags) -> Flags {
        Flags {
            config: self.config,
            n: self.n.or(o.n),
            mu: self.mu.or(o.mu),
            mu_vec: self.mu_vec.or(o.mu_vec),
            k: self.k.or(o.k),
            k_vec: self.k_vec.or(o.k_vec),
            d: self.d.or(o.d),
            m: self.m.or(o.m),
            x: self.x.or(o.x),
            eps: self.eps.or(o.eps),
            c: self.c.or(o.c),
            r: self.r.or(o.r),
            kind: self.kind.or(o.kind),
            sweep: self.sweep.or(o.sweep),
            values: self.values.or(o.values),
            overlay: self.overlay.or(o.overlay),
            trials: self.trials.or(o.trials),
            seed: self.seed.or(o.seed),
            out: self.out.or(o.out),
            format: self.format.or(o.format),
            level: self.level.or(o.level),
        }
    }

    fn need<T: Clone>(v: &Option<T>, flag: &str, cmd: &str) -> Result<T> {
        v.clone()
            .ok_or_else(|| param(format!("--{flag} is required for {cmd}")))
    }

    fn format(&self) -> Format {
        self.format.unwrap_or(Format::Csv)
    }
}

/// How a successful run ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// Names of the suites that failed.
    ValidationFailed(Vec<String>),
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        match self {
            Outcome::Success => 0,
            Outcome::ValidationFailed(_) => 3,
        }
    }
}

/// Exit status for an error: every library error is a parameter-class error.
pub fn error_exit_code(_: &Error) -> u8 {
    2
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<Outcome> {
    match cli.command {
        Command::Sample(f) => cmd_sample(f.resolve()?, stdout),
        Command::Sweep(f) => cmd_sweep(f.resolve()?, stdout),
        Command::Bounds(f) => cmd_bounds(f.resolve()?, stdout),
        Command::Oracle(f) => cmd_oracle(f.resolve()?, stdout),
        Command::Validate(f) => cmd_validate(f.resolve()?, stdout),
    }
}

fn fix_seed(f: &mut Flags) -> u64 {
    let seed = *f.seed.get_or_insert_with(rand::random);
    eprintln!("seed: {seed}");
    seed
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| Error::Output {
            path: path.to_path_buf(),
            source,
        })
}

fn output_err(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |source| Error::Output {
        path: path.to_path_buf(),
        source,
    }
}

fn graph_params(f: &Flags, cmd: &str) -> Result<GraphParams> {
    let n = Flags::need(&f.n, "n", cmd)?;
    match (&f.mu_vec, &f.k_vec) {
        (Some(mu), Some(k)) => GraphParams::new(n, mu.clone(), k.clone()),
        (None, None) => {
            let k = Flags::need(&f.k, "k", cmd)?;
            GraphParams::two_type(n, f.mu.unwrap_or(0.5), k)
        }
        _ => Err(param("--mu-vec and --k-vec must be given together")),
    }
}

pub fn cmd_sample(mut f: Flags, stdout: &mut dyn Write) -> Result<Outcome> {
    let seed = fix_seed(&mut f);
    let params = graph_params(&f, "sample")?;
    let d = f.d.unwrap_or(0);
    let mut rng = seeded(seed);
    let g = construct_r_type(&params, &mut rng)?;
    let (deleted, report) = if d > 0 {
        let (spec, sub) = delete_random_nodes(&g, d, &mut rng)?;
        (spec.deleted, connected_components(&sub)?)
    } else {
        (Vec::new(), connected_components(&g)?)
    };
    let types: Vec<u32> = g.node_types().iter().map(|&t| t as u32 + 1).collect();

    let write_dump = |w: &mut dyn Write| -> std::io::Result<()> {
        match f.format() {
            Format::Json => {
                let doc = json!({
                    "config": &f,
                    "seed": seed,
                    "params": &params,
                    "types": &types,
                    "selections": (0..g.n()).map(|v| g.selections(v)).collect::<Vec<_>>(),
                    "deleted": &deleted,
                    "edges": g.edges().map(|(u, v)| [u, v]).collect::<Vec<_>>(),
                    "report": &report,
                });
                serde_json::to_writer_pretty(&mut *w, &doc)?;
                writeln!(w)
            }
            Format::Csv => {
                let join = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(" ");
                let sizes: Vec<u32> = report.component_sizes.iter().map(|&s| s as u32).collect();
                writeln!(w, "# koutlab sample")?;
                writeln!(w, "# config: {}", serde_json::to_string(&f)?)?;
                writeln!(w, "# seed: {seed}")?;
                writeln!(w, "# params: {}", serde_json::to_string(&params)?)?;
                writeln!(w, "# types: {}", join(&types))?;
                writeln!(w, "# deleted: {}", join(&deleted))?;
                writeln!(w, "# n_effective: {}", report.n_effective)?;
                writeln!(w, "# cmax: {}", report.cmax)?;
                writeln!(w, "# outside_count: {}", report.outside_count)?;
                writeln!(w, "# component_sizes: {}", join(&sizes))?;
                for (u, v) in g.edges() {
                    writeln!(w, "{u} {v}")?;
                }
                Ok(())
            }
        }
    };
    match &f.out {
        Some(path) => {
            let mut w = create(path)?;
            write_dump(&mut w)
                .and_then(|_| w.flush())
                .map_err(output_err(path))?;
            writeln!(
                stdout,
                "n_effective={} cmax={} outside_count={} components={} -> {}",
                report.n_effective,
                report.cmax,
                report.outside_count,
                report.component_count(),
                path.display()
            )?;
        }
        None => write_dump(stdout)?,
    }
    Ok(Outcome::Success)
}

pub fn cmd_sweep(mut f: Flags, stdout: &mut dyn Write) -> Result<Outcome> {
    let seed = fix_seed(&mut f);
    let which = f.sweep.unwrap_or(SweepParam::Mu);
    let values = match (&f.values, which) {
        (Some(v), _) => v.clone(),
        (None, SweepParam::Mu) => NumList("0.1..0.9:0.1".into()),
        (None, SweepParam::K) => NumList("2..10".into()),
        (None, _) => return Err(param("--values is required when sweeping d or n")),
    };
    let ints = |v: &NumList| -> Result<Vec<usize>> {
        Ok(v.integers()?.into_iter().map(|x| x as usize).collect())
    };
    let axis = match which {
        SweepParam::Mu => SweepAxis::Mu(values.floats()?),
        SweepParam::K => SweepAxis::K(ints(&values)?),
        SweepParam::D => SweepAxis::D(ints(&values)?),
        SweepParam::N => SweepAxis::N(ints(&values)?),
    };
    let mut overlays = Overlays::default();
    for o in f.overlay.iter().flatten() {
        match o.as_str() {
            "t1" => overlays.theorem1 = true,
            "t2" => overlays.theorem2_eps = Some(f.eps.unwrap_or(DEFAULT_EPSILON)),
            "heuristic" => overlays.heuristic = true,
            other => return Err(param(format!("unknown overlay '{other}' (expected t1, t2, heuristic)"))),
        }
    }
    let config = ExperimentConfig {
        axis,
        n: f.n.unwrap_or(1000),
        mu: f.mu.unwrap_or(0.9),
        k: f.k.unwrap_or(2),
        d: f.d.unwrap_or(0),
        trials: f.trials.unwrap_or(10_000),
        seed,
        out: f.out.clone(),
        overlays,
        threads: None,
    };
    let report = experiments::run_sweep(&config)?;
    match &f.out {
        Some(path) => {
            for s in report.summaries() {
                writeln!(
                    stdout,
                    "{}={} avg_cmax={:.3} min_cmax={} max_outside={}",
                    config.axis.name(),
                    s.value,
                    s.avg_cmax,
                    s.min_cmax,
                    s.max_outside
                )?;
            }
            writeln!(
                stdout,
                "wrote {} and {}",
                path.display(),
                experiments::json_path(path).display()
            )?;
        }
        None => match f.format() {
            Format::Csv => experiments::write_csv(&report, &mut *stdout)?,
            Format::Json => experiments::write_json(&report, &mut *stdout)?,
        },
    }
    Ok(Outcome::Success)
}

#[derive(Debug, Serialize)]
struct Row {
    kind: String,
    grid_param: &'static str,
    grid_value: Option<u64>,
    value: f64,
    notes: String,
}

impl Row {
    fn scalar(kind: &str, value: f64) -> Row {
        Row {
            kind: kind.into(),
            grid_param: "",
            grid_value: None,
            value,
            notes: String::new(),
        }
    }

    fn from_bound(kind: &str, grid_param: &'static str, at: u64, b: AsymptoticBound) -> Row {
        Row {
            kind: kind.into(),
            grid_param,
            grid_value: Some(at),
            value: b.value,
            notes: b.regime_notes.join("; "),
        }
    }
}

fn emit_rows(f: &Flags, rows: &[Row], stdout: &mut dyn Write) -> Result<()> {
    let mut sink: Box<dyn Write + '_> = match &f.out {
        Some(path) => Box::new(create(path)?),
        None => Box::new(&mut *stdout),
    };
    let io = |e: std::io::Error| match &f.out {
        Some(path) => Error::Output {
            path: path.clone(),
            source: e,
        },
        None => Error::Io(e),
    };
    match f.format() {
        Format::Json => {
            let doc = json!({ "config": f, "rows": rows });
            serde_json::to_writer_pretty(&mut sink, &doc)?;
            writeln!(sink).map_err(io)?;
        }
        Format::Csv => {
            writeln!(sink, "# config: {}", serde_json::to_string(f)?).map_err(io)?;
            let mut w = csv::Writer::from_writer(&mut sink);
            for row in rows {
                w.serialize(row)?;
            }
            w.flush().map_err(io)?;
        }
    }
    sink.flush().map_err(io)?;
    Ok(())
}

pub fn cmd_bounds(f: Flags, stdout: &mut dyn Write) -> Result<Outcome> {
    let kind = Flags::need(&f.kind, "kind", "bounds")?;
    let cmd = "bounds";
    let mu = || Flags::need(&f.mu, "mu", cmd);
    let k = || Flags::need(&f.k, "k", cmd);
    let n = || Flags::need(&f.n, "n", cmd);
    let d = || Flags::need(&f.d, "d", cmd);
    let eps = f.eps.unwrap_or(DEFAULT_EPSILON);
    let grid = |flag: &Option<NumList>, name: &str| -> Result<Vec<u64>> {
        Flags::need(flag, name, cmd)?.integers()
    };
    let label = kind
        .to_possible_value()
        .map(|v| v.get_name().to_string())
        .unwrap_or_default();
    let label = label.as_str();

    let rows: Vec<Row> = match kind {
        BoundArg::T1 => grid(&f.m, "m")?
            .into_iter()
            .map(|m| Ok(Row::from_bound(label, "M", m, bounds::theorem1_bound(mu()?, k()?, m)?)))
            .collect::<Result<_>>()?,
        BoundArg::T2 => grid(&f.x, "x")?
            .into_iter()
            .map(|x| {
                let b = bounds::theorem2_bound(mu()?, k()?, d()? as u64, x, eps)?;
                Ok(Row::from_bound(label, "x", x, b))
            })
            .collect::<Result<_>>()?,
        BoundArg::Alt => grid(&f.x, "x")?
            .into_iter()
            .map(|x| {
                let b = bounds::alt_deleted_bound(mu()?, d()? as u64, x, eps)?;
                Ok(Row::from_bound(label, "x", x, b))
            })
            .collect::<Result<_>>()?,
        BoundArg::R => {
            let mv = Flags::need(&f.mu_vec, "mu-vec", cmd)?;
            let kv = Flags::need(&f.k_vec, "k-vec", cmd)?;
            grid(&f.m, "m")?
                .into_iter()
                .map(|m| Ok(Row::from_bound(label, "M", m, bounds::corollary_r_bound(&mv, &kv, m)?)))
                .collect::<Result<_>>()?
        }
        BoundArg::Er => {
            let c = Flags::need(&f.c, "c", cmd)?;
            vec![Row::scalar(label, bounds::er_giant_fraction(c)?)]
        }
        BoundArg::Heuristic => {
            let v = bounds::heuristic_giant_lower_bound(n()?, mu()?, k()?, d()?)?;
            vec![Row::scalar(label, v as f64)]
        }
        BoundArg::MeanDegree => vec![Row::scalar(label, bounds::mean_degree(n()?, mu()?, k()?)?)],
        BoundArg::Avg => vec![Row::scalar(label, bounds::avg_selections(mu()?, k()?)?)],
        BoundArg::Union => grid(&f.m, "m")?
            .into_iter()
            .map(|m| {
                let e = oracle::union_bound_sum(n()?, mu()?, k()?, m as usize)?;
                Ok(union_row(label, "M", m, e))
            })
            .collect::<Result<_>>()?,
        BoundArg::UnionDel => grid(&f.x, "x")?
            .into_iter()
            .map(|x| {
                let e = oracle::union_bound_sum_deleted(n()?, mu()?, k()?, d()?, x as usize)?;
                Ok(union_row(label, "x", x, e))
            })
            .collect::<Result<_>>()?,
    };
    emit_rows(&f, &rows, stdout)?;
    Ok(Outcome::Success)
}

fn union_row(kind: &str, grid_param: &'static str, at: u64, e: oracle::BoundEvaluation) -> Row {
    Row {
        kind: kind.into(),
        grid_param,
        grid_value: Some(at),
        value: e.value,
        notes: format!("raw sum {:e} over r >= {}", e.raw_sum, e.first_r),
    }
}

pub fn cmd_oracle(f: Flags, stdout: &mut dyn Write) -> Result<Outcome> {
    let cmd = "oracle";
    let n = Flags::need(&f.n, "n", cmd)?;
    let mu = Flags::need(&f.mu, "mu", cmd)?;
    let k = Flags::need(&f.k, "k", cmd)?;
    let d = f.d.unwrap_or(0);
    let mut rows = Vec::new();
    if let Some(r) = f.r {
        let p = oracle::exact_cut_probability_deleted(n, mu, k, d, r)?;
        rows.push(Row {
            kind: "exact-cut".into(),
            grid_param: "r",
            grid_value: Some(r as u64),
            value: p,
            notes: String::new(),
        });
        if n <= EXHAUSTIVE_MAX_N {
            let enumerated = oracle::exhaustive_event_probability(n, mu, k, d, |g| {
                let s = g.first_survivors(r);
                let dead = g.deleted_mask();
                (0..n).filter(|&v| !g.is_deleted(v)).all(|v| {
                    let sel = g.selection_mask(v);
                    if s >> v & 1 == 1 {
                        sel & !(s | dead) == 0
                    } else {
                        sel & s == 0
                    }
                })
            });
            match enumerated {
                Ok(q) => rows.push(Row {
                    kind: "enumerated-cut".into(),
                    grid_param: "r",
                    grid_value: Some(r as u64),
                    value: q,
                    notes: format!("abs difference {:e}", (p - q).abs()),
                }),
                Err(Error::Budget(msg)) => log::info!("skipping enumeration: {msg}"),
                Err(e) => return Err(e),
            }
        }
    }
    if let Some(m) = &f.m {
        for m in m.integers()? {
            let e = oracle::union_bound_sum_deleted(n, mu, k, d, m as usize)?;
            rows.push(union_row("union", "M", m, e));
        }
    }
    if let Some(x) = &f.x {
        for x in x.integers()? {
            let e = oracle::union_bound_sum_deleted(n, mu, k, d, x as usize)?;
            rows.push(union_row("union", "x", x, e));
        }
    }
    if rows.is_empty() {
        return Err(param("oracle needs --r, --m or --x"));
    }
    emit_rows(&f, &rows, stdout)?;
    Ok(Outcome::Success)
}

pub fn cmd_validate(mut f: Flags, stdout: &mut dyn Write) -> Result<Outcome> {
    let seed = fix_seed(&mut f);
    let level = f.level.unwrap_or(Level::Quick);
    let outcomes = validate::run(level, seed)?;
    let failed: Vec<String> = outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| o.name.to_string())
        .collect();
    match f.format() {
        Format::Json => {
            let doc = json!({ "config": &f, "seed": seed, "suites": &outcomes });
            serde_json::to_writer_pretty(&mut *stdout, &doc)?;
            writeln!(stdout)?;
        }
        Format::Csv => {
            writeln!(stdout, "# config: {}", serde_json::to_string(&f)?)?;
            for o in &outcomes {
                let tag = if o.passed { "PASS" } else { "FAIL" };
                writeln!(stdout, "{tag} {}: {}", o.name, o.detail)?;
            }
        }
    }
    if failed.is_empty() {
        Ok(Outcome::Success)
    } else {
        eprintln!("failed suites: {}", failed.join(", "));
        Ok(Outcome::ValidationFailed(failed))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_lists() {
        assert_eq!(parse_floats("60").unwrap(), vec![60.0]);
        assert_eq!(parse_floats("2..5").unwrap(), vec![2.0, 3.0, 4.0, 5.0]);
        assert_eq!(parse_floats("20..60:20,100").unwrap(), vec![20.0, 40.0, 60.0, 100.0]);
        let mus = parse_floats("0.1..0.9:0.1").unwrap();
        assert_eq!(mus.len(), 9);
        assert_eq!(mus[2], 0.3);
        assert_eq!(mus[8], 0.9);
        assert!(parse_floats("5..2").is_err());
        assert!(parse_floats("a").is_err());
        assert!(NumList("1.5".into()).integers().is_err());
    }

    #[test]
    fn config_file_fills_missing_flags() {
        let file: Flags = toml::from_str("n = 50\nmu = 0.3\nk = 3\nm = [4, 5]\nvalues = \"2..4\"").unwrap();
        let cli = Flags {
            n: Some(80),
            ..Flags::default()
        };
        let merged = cli.or(file);
        assert_eq!(merged.n, Some(80));
        assert_eq!(merged.mu, Some(0.3));
        assert_eq!(merged.m.unwrap().integers().unwrap(), vec![4, 5]);
        assert_eq!(merged.values.unwrap().integers().unwrap(), vec![2, 3, 4]);
        assert!(toml::from_str::<Flags>("bogus = 1").is_err());
    }
}
