//! Experiment drivers behind the `coalesce-mst` subcommands, and the CSV
//! result table they produce.
//!
//! A table is written as `# key=value` metadata lines (config echo, crate
//! version, column schema, wall time) followed by an ordinary CSV body.

use std::fmt;
use std::io::{BufRead, Write};
use std::time::Instant;

use rayon::prelude::*;

use crate::closed_form::{
    gelation_residual, gelation_time, mst_limit_bipartite, mst_limit_bipartite_with_budget,
    mst_limit_complete, zeta_bi, zeta_k, BipartiteParams, GelationKernel,
};
use crate::coalescent::{graph_coupled_simulate, simulate, ClusterMass, KernelSpec};
use crate::error::{domain, Error, Result};
use crate::graph_mst::{mc_mean_mst, mean_and_se, GraphSpec};
use crate::seeding::{derive_seed, replicate_rng};
use crate::smoluchowski::{
    integrate, moments_bi, moments_mono, IntegratorConfig, TruncatedDensity1D, TruncatedDensity2D,
};

pub const WALL_TIME_KEY: &str = "wall_time_s";
const SCHEMA_KEY: &str = "schema";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    Int,
    Real,
    Text,
}

impl ColumnKind {
    fn as_str(self) -> &'static str {
        match self {
            ColumnKind::Int => "int",
            ColumnKind::Real => "real",
            ColumnKind::Text => "text",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "int" => Ok(ColumnKind::Int),
            "real" => Ok(ColumnKind::Real),
            "text" => Ok(ColumnKind::Text),
            other => Err(Error::Format(format!("unknown column kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
}

impl Column {
    pub fn new(name: impl Into<String>, kind: ColumnKind) -> Self {
        Self {
            name: name.into(),
            kind,
        }
    }
}

#[derive(Debug, Clone)]
pub enum Value {
    Int(i64),
    Real(f64),
    Text(String),
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => a == b,
            (Value::Real(a), Value::Real(b)) => a.to_bits() == b.to_bits(),
            (Value::Text(a), Value::Text(b)) => a == b,
            _ => false,
        }
    }
}

impl Value {
    fn kind(&self) -> ColumnKind {
        match self {
            Value::Int(_) => ColumnKind::Int,
            Value::Real(_) => ColumnKind::Real,
            Value::Text(_) => ColumnKind::Text,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Value::Int(i) => Some(i as f64),
            Value::Real(x) => Some(x),
            Value::Text(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            // shortest round-trip representation either way
            Value::Real(x) if *x != 0.0 && x.is_finite() && !(1e-4..1e15).contains(&x.abs()) => {
                write!(f, "{x:e}")
            }
            Value::Real(x) => write!(f, "{x}"),
            Value::Text(s) => write!(f, "{s}"),
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Real(x)
    }
}

impl From<i64> for Value {
    fn from(i: i64) -> Self {
        Value::Int(i)
    }
}

impl From<u64> for Value {
    fn from(i: u64) -> Self {
        Value::Int(i as i64)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_string())
    }
}

/// Rectangular, typed result table with a metadata block.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    metadata: Vec<(String, String)>,
    columns: Vec<Column>,
    rows: Vec<Vec<Value>>,
}

impl ResultTable {
    pub fn new(command: &str, columns: Vec<Column>) -> Self {
        Self {
            metadata: vec![
                ("command".into(), command.into()),
                ("version".into(), env!("CARGO_PKG_VERSION").into()),
            ],
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push_meta(&mut self, key: impl Into<String>, value: impl ToString) -> Result<()> {
        let key = key.into();
        let value = value.to_string();
        if key.is_empty() || key.contains(['=', '\n', '\r']) || value.contains(['\n', '\r']) {
            return Err(Error::Format(format!("bad metadata entry {key:?}")));
        }
        if let Some(slot) = self.metadata.iter_mut().find(|(k, _)| *k == key) {
            slot.1 = value;
        } else {
            self.metadata.push((key, value));
        }
        Ok(())
    }

    pub fn push_row(&mut self, row: Vec<Value>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Format(format!(
                "row has {} cells, schema has {}",
                row.len(),
                self.columns.len()
            )));
        }
        for (cell, col) in row.iter().zip(&self.columns) {
            if cell.kind() != col.kind {
                return Err(Error::Format(format!(
                    "column {} expects {}",
                    col.name,
                    col.kind.as_str()
                )));
            }
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn metadata(&self) -> &[(String, String)] {
        &self.metadata
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Numeric cell by row index and column name.
    pub fn get_f64(&self, row: usize, column: &str) -> Option<f64> {
        let c = self.column_index(column)?;
        self.rows.get(row)?.get(c)?.as_f64()
    }

    /// All numeric values of one column.
    pub fn column_f64(&self, column: &str) -> Option<Vec<f64>> {
        let c = self.column_index(column)?;
        self.rows.iter().map(|r| r[c].as_f64()).collect()
    }

    /// Rectangularity and per-cell kind check.
    pub fn check_schema(&self) -> Result<()> {
        for row in &self.rows {
            if row.len() != self.columns.len()
                || row
                    .iter()
                    .zip(&self.columns)
                    .any(|(v, c)| v.kind() != c.kind)
            {
                return Err(Error::Format("row does not match schema".into()));
            }
        }
        Ok(())
    }

    /// Equality ignoring the wall-time metadata entry.
    pub fn same_content(&self, other: &Self) -> bool {
        let strip = |t: &Self| -> Vec<(String, String)> {
            t.metadata
                .iter()
                .filter(|(k, _)| k != WALL_TIME_KEY)
                .cloned()
                .collect()
        };
        self.columns == other.columns && self.rows == other.rows && strip(self) == strip(other)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        for (k, v) in &self.metadata {
            writeln!(out, "# {k}={v}")?;
        }
        let schema: Vec<String> = self
            .columns
            .iter()
            .map(|c| format!("{}:{}", c.name, c.kind.as_str()))
            .collect();
        writeln!(out, "# {SCHEMA_KEY}={}", schema.join(","))?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.columns.iter().map(|c| c.name.as_str()))?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("table content is UTF-8")
    }

    pub fn read_csv<R: BufRead>(mut input: R) -> Result<Self> {
        let mut metadata = Vec::new();
        let mut schema = None;
        let mut header = String::new();
        loop {
            let mut line = String::new();
            if input.read_line(&mut line)? == 0 {
                break;
            }
            let Some(entry) = line.strip_prefix('#') else {
                header = line;
                break;
            };
            let entry = entry.trim_end_matches(['\n', '\r']);
            let entry = entry.strip_prefix(' ').unwrap_or(entry);
            let (k, v) = entry
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("metadata line without '=': {entry:?}")))?;
            if k == SCHEMA_KEY {
                schema = Some(v.to_string());
            } else {
                metadata.push((k.to_string(), v.to_string()));
            }
        }
        let schema = schema.ok_or_else(|| Error::Format("missing schema line".into()))?;
        let columns: Vec<Column> = schema
            .split(',')
            .map(|spec| {
                let (name, kind) = spec
                    .split_once(':')
                    .ok_or_else(|| Error::Format(format!("bad schema entry {spec:?}")))?;
                Ok(Column::new(name, ColumnKind::parse(kind)?))
            })
            .collect::<Result<_>>()?;

        let mut body = header.into_bytes();
        input.read_to_end(&mut body)?;
        let mut reader = csv::Reader::from_reader(body.as_slice());
        let names: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
        if names.len() != columns.len() || names.iter().zip(&columns).any(|(n, c)| *n != c.name) {
            return Err(Error::Format("header does not match schema".into()));
        }
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record?;
            let row = record
                .iter()
                .zip(&columns)
                .map(|(cell, col)| parse_cell(cell, col))
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        let table = Self {
            metadata,
            columns,
            rows,
        };
        table.check_schema()?;
        Ok(table)
    }
}

fn parse_cell(cell: &str, col: &Column) -> Result<Value> {
    let bad = || Error::Format(format!("cannot parse {cell:?} in column {}", col.name));
    Ok(match col.kind {
        ColumnKind::Int => Value::Int(cell.parse().map_err(|_| bad())?),
        ColumnKind::Real => Value::Real(cell.parse().map_err(|_| bad())?),
        ColumnKind::Text => Value::Text(cell.to_string()),
    })
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn real(name: &str) -> Column {
    Column::new(name, ColumnKind::Real)
}

fn int(name: &str) -> Column {
    Column::new(name, ColumnKind::Int)
}

fn text(name: &str) -> Column {
    Column::new(name, ColumnKind::Text)
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return domain("time grid is empty");
    }
    if times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
        return domain("times must be finite and nonnegative");
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return domain("time grid must be strictly increasing");
    }
    Ok(())
}

fn finish(mut table: ResultTable, start: Instant) -> Result<ResultTable> {
    table.push_meta(
        WALL_TIME_KEY,
        format!("{:.6}", start.elapsed().as_secs_f64()),
    )?;
    Ok(table)
}

// ---------------------------------------------------------------- limits

#[derive(Debug, Clone, PartialEq)]
pub struct LimitsConfig {
    pub gammas: Vec<f64>,
    pub tol: f64,
    /// Anti-diagonal budget for each bipartite series.
    pub max_diagonal: usize,
}

/// Rows `(graph, gamma, limit, tail_bound, terms)`: the complete-graph limit,
/// the `γ = 1` bipartite reference, then every requested `γ`.
pub fn cmd_limits(cfg: &LimitsConfig) -> Result<ResultTable> {
    let start = Instant::now();
    if cfg.gammas.iter().any(|g| !(*g > 0.0 && g.is_finite())) {
        return domain("gamma values must be positive");
    }
    if !(cfg.tol > 0.0) {
        return domain("tolerance must be positive");
    }
    let mut table = ResultTable::new(
        "limits",
        vec![
            text("graph"),
            real("gamma"),
            real("limit"),
            real("tail_bound"),
            int("terms"),
        ],
    );
    table.push_meta("gammas", join(&cfg.gammas))?;
    table.push_meta("tol", cfg.tol)?;
    table.push_meta("max_diagonal", cfg.max_diagonal)?;

    let c = mst_limit_complete();
    table.push_row(vec![
        "complete".into(),
        f64::NAN.into(),
        c.value.into(),
        c.tail_bound.into(),
        (c.terms_used as u64).into(),
    ])?;
    let mut gammas = vec![1.0];
    gammas.extend(cfg.gammas.iter().copied().filter(|&g| g != 1.0));
    for g in gammas {
        let s = mst_limit_bipartite_with_budget(g, cfg.tol, cfg.max_diagonal)?;
        table.push_row(vec![
            "bipartite".into(),
            g.into(),
            s.value.into(),
            s.tail_bound.into(),
            (s.terms_used as u64).into(),
        ])?;
    }
    finish(table, start)
}

// ---------------------------------------------------------------- ode

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OdeSystem {
    Mono {
        truncation: usize,
    },
    Bi {
        k1: usize,
        k2: usize,
        alpha: f64,
        beta: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct OdeConfig {
    pub system: OdeSystem,
    pub times: Vec<f64>,
    /// Largest mass (per coordinate for the bipartite system) given its own
    /// column.
    pub track: usize,
    /// Fixed RK4 step; adaptive Dormand–Prince when `None`.
    pub rk4_step: Option<f64>,
}

/// Rows `(t, masses, max_abs_delta, ζ columns)`, where `max_abs_delta` is the
/// largest deviation from the closed form over the whole truncated state.
pub fn cmd_ode(cfg: &OdeConfig) -> Result<ResultTable> {
    let start = Instant::now();
    check_times(&cfg.times)?;
    let t_end = *cfg.times.last().expect("nonempty");
    let integrator = match cfg.rk4_step {
        Some(h) => IntegratorConfig::rk4(h, t_end),
        None => IntegratorConfig::adaptive(t_end),
    };
    let method = match cfg.rk4_step {
        Some(h) => format!("rk4:{h}"),
        None => "dopri5".to_string(),
    };
    let table = match cfg.system {
        OdeSystem::Mono { truncation } => {
            let track = cfg.track.min(truncation);
            let mut cols = vec![real("t"), real("mass"), real("max_abs_delta")];
            cols.extend((1..=track).map(|k| real(&format!("zeta_{k}"))));
            let mut table = ResultTable::new("ode", cols);
            table.push_meta("system", "mono")?;
            table.push_meta("truncation", truncation)?;
            table.push_meta("times", join(&cfg.times))?;
            table.push_meta("track", cfg.track)?;
            table.push_meta("method", method)?;
            let init = TruncatedDensity1D::monodisperse(truncation)?;
            for state in integrate(&init, &integrator, &cfg.times)? {
                let t = state.time();
                let mut delta: f64 = 0.0;
                for k in 1..=truncation {
                    delta = delta.max((state.get(k) - zeta_k(k as u64, t)?).abs());
                }
                let mut row = vec![t.into(), moments_mono(&state).mass.into(), delta.into()];
                row.extend((1..=track).map(|k| Value::Real(state.get(k))));
                table.push_row(row)?;
            }
            table
        }
        OdeSystem::Bi {
            k1,
            k2,
            alpha,
            beta,
        } => {
            let params = BipartiteParams::new(alpha, beta)?;
            let shown: Vec<(usize, usize)> = (0..=cfg.track.min(k1))
                .flat_map(|i| (0..=cfg.track.min(k2)).map(move |j| (i, j)))
                .filter(|&(i, j)| (i > 0 && j > 0) || i + j == 1)
                .collect();
            let mut cols = vec![
                real("t"),
                real("left_mass"),
                real("right_mass"),
                real("max_abs_delta"),
            ];
            cols.extend(shown.iter().map(|(i, j)| real(&format!("zeta_{i}_{j}"))));
            let mut table = ResultTable::new("ode", cols);
            table.push_meta("system", "bi")?;
            table.push_meta("k1", k1)?;
            table.push_meta("k2", k2)?;
            table.push_meta("alpha", alpha)?;
            table.push_meta("beta", beta)?;
            table.push_meta("times", join(&cfg.times))?;
            table.push_meta("track", cfg.track)?;
            table.push_meta("method", method)?;
            let init = TruncatedDensity2D::initial(k1, k2, params)?;
            for state in integrate(&init, &integrator, &cfg.times)? {
                let t = state.time();
                let mut delta: f64 = 0.0;
                for ((i, j), z) in state.grid().iter() {
                    delta = delta.max((z - zeta_bi(i as u64, j as u64, t, &params)?).abs());
                }
                let m = moments_bi(&state);
                let mut row = vec![
                    t.into(),
                    m.left_mass.into(),
                    m.right_mass.into(),
                    delta.into(),
                ];
                row.extend(shown.iter().map(|&(i, j)| Value::Real(state.get(i, j))));
                table.push_row(row)?;
            }
            table
        }
    };
    finish(table, start)
}

// ---------------------------------------------------------------- simulation

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelChoice {
    Multiplicative,
    Cross { alpha: f64, beta: f64 },
}

impl KernelChoice {
    pub fn spec(&self, n: u64) -> Result<KernelSpec> {
        match *self {
            KernelChoice::Multiplicative => {
                let spec = KernelSpec::Multiplicative { n };
                crate::coalescent::init_monodisperse(spec)?;
                Ok(spec)
            }
            KernelChoice::Cross { alpha, beta } => KernelSpec::cross_proportional(alpha, beta, n),
        }
    }

    /// Small masses to report: `1..=max` or `(i1, i2)` with both coordinates
    /// at most `max` (pure masses above 1 never occur).
    pub fn masses(&self, max: u64) -> Vec<ClusterMass> {
        match self {
            KernelChoice::Multiplicative => (1..=max).map(ClusterMass::mono).collect(),
            KernelChoice::Cross { .. } => (0..=max)
                .flat_map(|i| (0..=max).map(move |j| ClusterMass::cross(i, j)))
                .filter(|m| (m.left > 0 && m.right > 0) || m.total() == 1)
                .collect(),
        }
    }

    /// Limiting density of `mass` at time `t`.
    pub fn density(&self, mass: ClusterMass, t: f64) -> Result<f64> {
        match *self {
            KernelChoice::Multiplicative => {
                if mass.right != 0 {
                    return domain("multiplicative masses are scalar");
                }
                zeta_k(mass.left, t)
            }
            KernelChoice::Cross { alpha, beta } => zeta_bi(
                mass.left,
                mass.right,
                t,
                &BipartiteParams::new(alpha, beta)?,
            ),
        }
    }

    fn describe(&self) -> String {
        match self {
            KernelChoice::Multiplicative => "multiplicative".into(),
            KernelChoice::Cross { alpha, beta } => format!("cross:{alpha}:{beta}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampler {
    Gillespie,
    GraphCoupled,
}

impl fmt::Display for Sampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sampler::Gillespie => "gillespie",
            Sampler::GraphCoupled => "graph-coupled",
        })
    }
}

/// Replicate means and standard errors of normalized counts, indexed
/// `[time][mass]`. Also keeps the per-replicate values.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    pub mean: Vec<Vec<f64>>,
    pub std_error: Vec<Vec<f64>>,
    /// `samples[replicate][time][mass]`
    pub samples: Vec<Vec<Vec<f64>>>,
}

/// Run `replicates` independent trajectories (replicate `i` on stream
/// `(seed, i)`) in parallel and summarize `count/n` for each mass and time.
pub fn ensemble_counts(
    kernel: KernelSpec,
    sampler: Sampler,
    times: &[f64],
    masses: &[ClusterMass],
    replicates: u64,
    seed: u64,
) -> Result<EnsembleStats> {
    if replicates == 0 {
        return domain("need at least one replicate");
    }
    let t_end = times.last().copied().unwrap_or(0.0);
    let samples: Vec<Vec<Vec<f64>>> = (0..replicates)
        .into_par_iter()
        .map(|i| {
            let mut rng = replicate_rng(seed, i);
            let tr = match sampler {
                Sampler::Gillespie => simulate(kernel, t_end, times, &mut rng)?,
                Sampler::GraphCoupled => graph_coupled_simulate(kernel, t_end, times, &mut rng)?,
            };
            Ok((0..times.len())
                .map(|s| masses.iter().map(|&m| tr.normalized(s, m)).collect())
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut mean = vec![vec![0.0; masses.len()]; times.len()];
    let mut std_error = mean.clone();
    let mut column = Vec::with_capacity(samples.len());
    for s in 0..times.len() {
        for m in 0..masses.len() {
            column.clear();
            column.extend(samples.iter().map(|r| r[s][m]));
            let (mu, se) = mean_and_se(&column);
            mean[s][m] = mu;
            std_error[s][m] = se;
        }
    }
    Ok(EnsembleStats {
        mean,
        std_error,
        samples,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateConfig {
    pub kernel: KernelChoice,
    pub n: u64,
    pub times: Vec<f64>,
    pub max_mass: u64,
    pub replicates: u64,
    pub sampler: Sampler,
    pub seed: u64,
}

/// Rows `(t, i1, i2, mean, std_error, closed_form)` over replicate trajectories.
pub fn cmd_simulate(cfg: &SimulateConfig) -> Result<ResultTable> {
    let start = Instant::now();
    check_times(&cfg.times)?;
    let spec = cfg.kernel.spec(cfg.n)?;
    let masses = cfg.kernel.masses(cfg.max_mass);
    let stats = ensemble_counts(
        spec,
        cfg.sampler,
        &cfg.times,
        &masses,
        cfg.replicates,
        cfg.seed,
    )?;
    let mut table = ResultTable::new(
        "simulate",
        vec![
            real("t"),
            int("i1"),
            int("i2"),
            real("mean"),
            real("std_error"),
            real("closed_form"),
        ],
    );
    table.push_meta("kernel", cfg.kernel.describe())?;
    table.push_meta("n", cfg.n)?;
    table.push_meta("times", join(&cfg.times))?;
    table.push_meta("max_mass", cfg.max_mass)?;
    table.push_meta("replicates", cfg.replicates)?;
    table.push_meta("sampler", cfg.sampler)?;
    table.push_meta("seed", cfg.seed)?;
    for (s, &t) in cfg.times.iter().enumerate() {
        for (m, &mass) in masses.iter().enumerate() {
            table.push_row(vec![
                t.into(),
                mass.left.into(),
                mass.right.into(),
                stats.mean[s][m].into(),
                stats.std_error[s][m].into(),
                cfg.kernel.density(mass, t)?.into(),
            ])?;
        }
    }
    finish(table, start)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HydroConfig {
    pub kernel: KernelChoice,
    pub ns: Vec<u64>,
    pub times: Vec<f64>,
    pub max_mass: u64,
    pub replicates: u64,
    pub seed: u64,
}

/// Rows `(n, i1, i2, sup_deviation, std_error, t_at_sup)`: the largest
/// deviation over the time grid of the replicate mean of `count/n` from the
/// limiting density, with the standard error at the maximizing time.
pub fn cmd_hydro(cfg: &HydroConfig) -> Result<ResultTable> {
    let start = Instant::now();
    check_times(&cfg.times)?;
    if cfg.ns.is_empty() {
        return domain("need at least one n");
    }
    let masses = cfg.kernel.masses(cfg.max_mass);
    let mut table = ResultTable::new(
        "hydro",
        vec![
            int("n"),
            int("i1"),
            int("i2"),
            real("sup_deviation"),
            real("std_error"),
            real("t_at_sup"),
        ],
    );
    table.push_meta("kernel", cfg.kernel.describe())?;
    table.push_meta("ns", join(&cfg.ns))?;
    table.push_meta("times", join(&cfg.times))?;
    table.push_meta("max_mass", cfg.max_mass)?;
    table.push_meta("replicates", cfg.replicates)?;
    table.push_meta("seed", cfg.seed)?;
    for &n in &cfg.ns {
        let spec = cfg.kernel.spec(n)?;
        let stats = ensemble_counts(
            spec,
            Sampler::Gillespie,
            &cfg.times,
            &masses,
            cfg.replicates,
            derive_seed(cfg.seed, n),
        )?;
        for (m, &mass) in masses.iter().enumerate() {
            let mut best = (0.0f64, f64::NAN, cfg.times[0]);
            for (s, &t) in cfg.times.iter().enumerate() {
                let dev = (stats.mean[s][m] - cfg.kernel.density(mass, t)?).abs();
                if s == 0 || dev > best.0 {
                    best = (dev, stats.std_error[s][m], t);
                }
            }
            table.push_row(vec![
                n.into(),
                mass.left.into(),
                mass.right.into(),
                best.0.into(),
                best.1.into(),
                best.2.into(),
            ])?;
        }
    }
    finish(table, start)
}

// ---------------------------------------------------------------- mst

#[derive(Debug, Clone, PartialEq)]
pub struct MstConfig {
    pub graphs: Vec<GraphSpec>,
    pub replicates: u64,
    pub tol: f64,
    pub seed: u64,
}

/// Largest tolerated `|κ-integral − 1 − L|` on any sample.
pub const IDENTITY_TOL: f64 = 1e-9;

/// Rows `(graph, a, b, mean, std_error, limit, limit_tail_bound, gap,
/// max_identity_gap)`. Fails if any sample breaks the component-count
/// identity.
pub fn cmd_mst(cfg: &MstConfig) -> Result<ResultTable> {
    let start = Instant::now();
    if cfg.graphs.is_empty() {
        return domain("need at least one graph");
    }
    let mut table = ResultTable::new(
        "mst",
        vec![
            text("graph"),
            int("a"),
            int("b"),
            real("mean"),
            real("std_error"),
            real("limit"),
            real("limit_tail_bound"),
            real("gap"),
            real("max_identity_gap"),
        ],
    );
    let names: Vec<String> = cfg.graphs.iter().map(graph_label).collect();
    table.push_meta("graphs", names.join(","))?;
    table.push_meta("replicates", cfg.replicates)?;
    table.push_meta("tol", cfg.tol)?;
    table.push_meta("seed", cfg.seed)?;
    for (idx, &g) in cfg.graphs.iter().enumerate() {
        g.validate()?;
        let est = mc_mean_mst(g, cfg.replicates, derive_seed(cfg.seed, idx as u64))?;
        if !(est.max_identity_gap <= IDENTITY_TOL) {
            return Err(Error::Invariant(format!(
                "kappa integral deviates from 1 + L by {:e} on {}",
                est.max_identity_gap,
                graph_label(&g)
            )));
        }
        let (kind, a, b, limit) = match g {
            GraphSpec::Complete(n) => ("complete", n, 0, mst_limit_complete()),
            GraphSpec::Bipartite(a, b) => (
                "bipartite",
                a,
                b,
                mst_limit_bipartite(a as f64 / b as f64, cfg.tol)?,
            ),
        };
        table.push_row(vec![
            kind.into(),
            a.into(),
            b.into(),
            est.mean.into(),
            est.std_error.into(),
            limit.value.into(),
            limit.tail_bound.into(),
            (est.mean - limit.value).into(),
            est.max_identity_gap.into(),
        ])?;
    }
    finish(table, start)
}

fn graph_label(g: &GraphSpec) -> String {
    match g {
        GraphSpec::Complete(n) => format!("complete:{n}"),
        GraphSpec::Bipartite(a, b) => format!("bipartite:{a}:{b}"),
    }
}

// ---------------------------------------------------------------- gelation

#[derive(Debug, Clone, PartialEq)]
pub struct GelationConfig {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
}

/// Rows `(kernel, alpha, beta, t_gel, residual)`; the multiplicative row
/// leaves `alpha` and `beta` as NaN.
pub fn cmd_gelation(cfg: &GelationConfig) -> Result<ResultTable> {
    let start = Instant::now();
    let mut table = ResultTable::new(
        "gelation",
        vec![
            text("kernel"),
            real("alpha"),
            real("beta"),
            real("t_gel"),
            real("residual"),
        ],
    );
    table.push_meta("alphas", join(&cfg.alphas))?;
    table.push_meta("betas", join(&cfg.betas))?;
    let t = gelation_time(&GelationKernel::Multiplicative)?;
    table.push_row(vec![
        "multiplicative".into(),
        f64::NAN.into(),
        f64::NAN.into(),
        t.into(),
        (1.0 - t + t.ln()).abs().into(),
    ])?;
    for &alpha in &cfg.alphas {
        for &beta in &cfg.betas {
            let t = gelation_time(&GelationKernel::Cross { alpha, beta })?;
            table.push_row(vec![
                "cross".into(),
                alpha.into(),
                beta.into(),
                t.into(),
                gelation_residual(alpha, beta, t).abs().into(),
            ])?;
        }
    }
    finish(table, start)
}

// ---------------------------------------------------------------- fluctuations

#[derive(Debug, Clone, PartialEq)]
pub struct FluctuationsConfig {
    pub kernel: KernelChoice,
    pub ns: Vec<u64>,
    pub t: f64,
    pub mass: ClusterMass,
    pub replicates: u64,
    pub seed: u64,
}

/// Rows `(n, mean_scaled, std_dev, std_dev_se, rel_spread, n_stable)` for
/// `√n (count/n − ζ(t))`. `rel_spread` is `(max − min)/min` of the std dev
/// column; `n_stable` is 1 when every pair of std devs agrees within 3
/// combined standard errors. Both are repeated on each row.
pub fn cmd_fluctuations(cfg: &FluctuationsConfig) -> Result<ResultTable> {
    let start = Instant::now();
    if cfg.replicates < 2 {
        return domain("need at least 2 replicates to estimate a standard deviation");
    }
    if cfg.ns.is_empty() {
        return domain("need at least one n");
    }
    check_times(&[cfg.t])?;
    let limit = cfg.kernel.density(cfg.mass, cfg.t)?;
    let mut per_n = Vec::new();
    for &n in &cfg.ns {
        let spec = cfg.kernel.spec(n)?;
        let stats = ensemble_counts(
            spec,
            Sampler::Gillespie,
            &[cfg.t],
            &[cfg.mass],
            cfg.replicates,
            derive_seed(cfg.seed, n),
        )?;
        let scaled: Vec<f64> = stats
            .samples
            .iter()
            .map(|r| (n as f64).sqrt() * (r[0][0] - limit))
            .collect();
        let (mean, se) = mean_and_se(&scaled);
        let sd = se * (cfg.replicates as f64).sqrt();
        let sd_se = sd / (2.0 * (cfg.replicates as f64 - 1.0)).sqrt();
        per_n.push((n, mean, sd, sd_se));
    }
    let max = per_n.iter().map(|r| r.2).fold(f64::MIN, f64::max);
    let min = per_n.iter().map(|r| r.2).fold(f64::MAX, f64::min);
    let rel_spread = if max == 0.0 { 0.0 } else { (max - min) / min };
    let stable = per_n.iter().all(|x| {
        per_n
            .iter()
            .all(|y| (x.2 - y.2).abs() <= 3.0 * (x.3 * x.3 + y.3 * y.3).sqrt())
    });

    let mut table = ResultTable::new(
        "fluctuations",
        vec![
            int("n"),
            real("mean_scaled"),
            real("std_dev"),
            real("std_dev_se"),
            real("rel_spread"),
            int("n_stable"),
        ],
    );
    table.push_meta("kernel", cfg.kernel.describe())?;
    table.push_meta("ns", join(&cfg.ns))?;
    table.push_meta("t", cfg.t)?;
    table.push_meta("mass", cfg.mass)?;
    table.push_meta("replicates", cfg.replicates)?;
    table.push_meta("seed", cfg.seed)?;
    for (n, mean, sd, sd_se) in per_n {
        table.push_row(vec![
            n.into(),
            mean.into(),
            sd.into(),
            sd_se.into(),
            rel_spread.into(),
            (stable as i64).into(),
        ])?;
    }
    finish(table, start)
}
