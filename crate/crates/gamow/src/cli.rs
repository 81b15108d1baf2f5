//! Command-line front end: JSON configuration, command dispatch and table
//! output. The `gamow` binary is a thin wrapper around [`main_with_args`].

use crate::barrier::{find_resonances, resonance_norm_by_quadrature, BarrierParams, PoleTable, Rect};
use crate::cxmath::faddeeva_w;
use crate::error::{GamowError, Result};
use crate::evolution::{
    large_time_pair, psi_t, stationary_limit, sum_rule_residual, sum_rule_residual_averaged, ExpansionForm,
    SeriesControl, SumRule, TimePoint,
};
use crate::greenfn::{green_closed, green_dx, green_pole_series, green_subtracted_series};
use crate::laplace::{p_psi_bar_subtracted, psi_bar_direct, psi_bar_green, Region, ResonanceSet, DEFAULT_ORDER};
use crate::oracle::{causality_check, count_zeros, oracle_psi, ContourSpec};
use crate::stationary::{reflection, transmission, ScatteringKind, ScatteringSolution};
use clap::{Parser, Subcommand, ValueEnum};
use log::{debug, info, warn};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Exit statuses.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub format: Format,
    /// File to write; standard output when absent.
    pub path: Option<PathBuf>,
}

/// Evaluation grids. Not every command uses every list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Grid {
    /// positions (evolve, oracle, psibar, limits; green uses those in [0, L])
    pub x: Vec<f64>,
    /// second Green-function argument
    pub y: Vec<f64>,
    pub t: Vec<f64>,
    /// real Laplace momenta (green, psibar)
    pub p: Vec<f64>,
    /// incident momenta (transmission)
    pub k: Vec<f64>,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            x: vec![-1.5, -0.5, 0.0, 0.3, 0.5, 0.7, 1.0, 1.5, 2.5],
            y: vec![0.0, 0.3, 0.7, 1.0],
            t: vec![0.05, 0.2, 1.0],
            p: vec![0.5, 1.5, 2.5, 3.5, 5.0],
            k: (1..=12).map(|j| 0.5 * j as f64).collect(),
        }
    }
}

/// Everything a run needs. Every field has a default, so `{}` is a valid
/// configuration (the canonical barrier m = 0.5, V = 10, L = 1 with k = 3).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub params: BarrierParams,
    pub k: f64,
    /// pole pairs listed by `poles`
    pub poles: usize,
    pub series: SeriesControl,
    pub contour: ContourSpec,
    pub grid: Grid,
    pub output: OutputSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            params: BarrierParams::cfg0(),
            k: 3.0,
            poles: 40,
            series: SeriesControl::default(),
            contour: ContourSpec::default(),
            grid: Grid::default(),
            output: OutputSpec::default(),
        }
    }
}

fn config_error(field: impl Into<String>, message: impl Into<String>) -> GamowError {
    GamowError::Config { field: field.into(), message: message.into() }
}

impl RunConfig {
    /// Parses JSON, reporting the path of the offending field.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            config_error(if path == "." { "<root>".to_string() } else { path }, e.inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| GamowError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        BarrierParams::new(self.params.m, self.params.v, self.params.l).map_err(|e| match e {
            GamowError::Config { field, message } => config_error(format!("params.{field}"), message),
            other => other,
        })?;
        if !(self.k.is_finite() && self.k > 0.0) {
            return Err(config_error("k", "must be positive"));
        }
        if self.poles == 0 {
            return Err(config_error("poles", "must be at least 1"));
        }
        if self.series.pairs == 0 {
            return Err(config_error("series.pairs", "must be at least 1"));
        }
        if !(self.series.tail_tolerance >= 0.0) {
            return Err(config_error("series.tail_tolerance", "must be non-negative"));
        }
        if let Some(t) = self.series.tau_min {
            if !(t >= 0.0) {
                return Err(config_error("series.tau_min", "must be non-negative"));
            }
        }
        let lists: [(&str, &Vec<f64>); 5] = [
            ("grid.x", &self.grid.x),
            ("grid.y", &self.grid.y),
            ("grid.t", &self.grid.t),
            ("grid.p", &self.grid.p),
            ("grid.k", &self.grid.k),
        ];
        for (name, list) in lists {
            if list.is_empty() {
                return Err(config_error(name, "grid must not be empty"));
            }
            for (i, v) in list.iter().enumerate() {
                if !v.is_finite() {
                    return Err(config_error(format!("{name}[{i}]"), "must be finite"));
                }
            }
        }
        for (i, t) in self.grid.t.iter().enumerate() {
            if *t <= 0.0 {
                return Err(config_error(format!("grid.t[{i}]"), "times must be positive"));
            }
        }
        for (i, k) in self.grid.k.iter().enumerate() {
            if *k <= 0.0 {
                return Err(config_error(format!("grid.k[{i}]"), "momenta must be positive"));
            }
        }
        Ok(())
    }
}

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            // Both `Display` and `LowerExp` print the shortest string that
            // parses back to the same f64.
            Cell::Num(v) if *v == 0.0 || (1e-4..1e15).contains(&v.abs()) => format!("{v}"),
            Cell::Num(v) => format!("{v:e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Num(v) => serde_json::json!(v),
            Cell::Int(v) => serde_json::json!(v),
            Cell::Text(s) => serde_json::json!(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i32> for Cell {
    fn from(v: i32) -> Self {
        Cell::Int(v as i64)
    }
}

/// A rectangular result table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table { columns: columns.to_vec(), rows: Vec::new() }
    }

    /// Appends a row, refusing non-finite numbers.
    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        debug_assert_eq!(row.len(), self.columns.len());
        for (c, name) in row.iter().zip(&self.columns) {
            if let Cell::Num(v) = c {
                if !v.is_finite() {
                    return Err(GamowError::Overflow(format!("non-finite value in column `{name}`")));
                }
            }
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| GamowError::Io(e.to_string());
        w.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(io)?;
        }
        w.into_inner().map_err(|e| GamowError::Io(e.to_string()))
    }

    pub fn to_json(&self) -> Result<Vec<u8>> {
        let rows: Vec<Vec<serde_json::Value>> =
            self.rows.iter().map(|r| r.iter().map(Cell::json).collect()).collect();
        let doc = serde_json::json!({ "columns": self.columns, "rows": rows });
        let mut out = serde_json::to_vec_pretty(&doc).map_err(|e| GamowError::Io(e.to_string()))?;
        out.push(b'\n');
        Ok(out)
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "gamow", version, about = "Plane wave on a square barrier: resonance expansions and checks")]
pub struct Cli {
    /// JSON configuration; defaults apply to omitted fields
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// overrides output.format
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// overrides output.path
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Clone)]
pub enum Command {
    /// Resonance momenta, norms and residuals (±n rows)
    Poles {
        #[arg(long)]
        count: Option<usize>,
    },
    /// Green function on the (x, y, p) grid against its pole series
    Green {
        #[arg(long)]
        pairs: Option<usize>,
    },
    /// Laplace-domain solution by the matching, Green and series routes
    Psibar {
        #[arg(long)]
        pairs: Option<usize>,
    },
    /// ψ(x, t) from the resonance expansion
    Evolve {
        #[arg(long)]
        pairs: Option<usize>,
        /// directory for per-time columnar files (x, |ψ|², Re ψ, Im ψ)
        #[arg(long)]
        plot_data: Option<PathBuf>,
    },
    /// ψ(x, t) by numerical Laplace inversion, with error estimates
    Oracle {
        #[arg(long)]
        plot_data: Option<PathBuf>,
    },
    /// Short- and long-time limits and the resonant sum rules
    Limits {
        #[arg(long, default_value_t = 50.0)]
        large_time: f64,
    },
    /// T(k) and R(k) on the k grid
    Transmission,
    /// Runs the invariant suite and prints a pass/fail report
    Validate,
}

/// Maps an error onto the documented exit status.
pub fn exit_code(e: &GamowError) -> i32 {
    match e {
        GamowError::Config { .. } => EXIT_CONFIG,
        GamowError::Io(_) => EXIT_IO,
        _ => EXIT_NUMERICAL,
    }
}

fn init_logging() {
    let level = match std::env::var("GAMOW_LOG").as_deref() {
        Ok("quiet") => log::LevelFilter::Off,
        Ok("debug") => log::LevelFilter::Debug,
        Ok("info") => log::LevelFilter::Info,
        _ => log::LevelFilter::Warn,
    };
    let _ = env_logger::Builder::new().filter_level(level).format_timestamp(None).try_init();
}

/// Entry point used by the binary; returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    init_logging();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match run_cli(&cli) {
        Ok(true) => EXIT_OK,
        Ok(false) => {
            eprintln!("error: one or more checks failed");
            EXIT_NUMERICAL
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn run_cli(cli: &Cli) -> Result<bool> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::from_path(p)?,
        None => RunConfig::default(),
    };
    if let Some(f) = cli.format {
        cfg.output.format = f;
    }
    if let Some(p) = &cli.output {
        cfg.output.path = Some(p.clone());
    }
    let mut cmd = cli.command.clone();
    apply_overrides(&mut cmd, &mut cfg)?;
    info!("running {:?}", cmd);
    let outcome = run(&cmd, &cfg)?;
    emit(&outcome.table, &cfg.output)?;
    for (name, data) in &outcome.files {
        write_file(name, data)?;
    }
    Ok(outcome.ok)
}

fn apply_overrides(cmd: &mut Command, cfg: &mut RunConfig) -> Result<()> {
    match cmd {
        Command::Poles { count: Some(c) } => cfg.poles = *c,
        Command::Green { pairs: Some(n) } | Command::Psibar { pairs: Some(n) } | Command::Evolve { pairs: Some(n), .. } => {
            cfg.series.pairs = *n
        }
        Command::Limits { large_time } if !(*large_time > 0.0) => {
            return Err(config_error("--large-time", "must be positive"));
        }
        _ => {}
    }
    cfg.validate()
}

/// A command's result: the main table, extra files and an overall verdict
/// (only `validate` can report failure without an error).
#[derive(Debug, Clone)]
pub struct Outcome {
    pub table: Table,
    pub files: Vec<(PathBuf, Vec<u8>)>,
    pub ok: bool,
}

impl From<Table> for Outcome {
    fn from(table: Table) -> Self {
        Outcome { table, files: Vec::new(), ok: true }
    }
}

fn emit(table: &Table, out: &OutputSpec) -> Result<()> {
    let bytes = table.render(out.format)?;
    match &out.path {
        Some(p) => write_file(p, &bytes),
        None => std::io::stdout().write_all(&bytes).map_err(GamowError::from),
    }
}

fn write_file(path: &Path, data: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| GamowError::Io(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, data).map_err(|e| GamowError::Io(format!("{}: {e}", path.display())))
}

/// Runs one command without touching the file system.
pub fn run(cmd: &Command, cfg: &RunConfig) -> Result<Outcome> {
    match cmd {
        Command::Poles { .. } => poles(cfg).map(Into::into),
        Command::Green { .. } => green(cfg).map(Into::into),
        Command::Psibar { .. } => psibar(cfg).map(Into::into),
        Command::Evolve { plot_data, .. } => evolve(cfg, plot_data.as_deref()),
        Command::Oracle { plot_data } => oracle(cfg, plot_data.as_deref()),
        Command::Limits { large_time } => limits(cfg, *large_time).map(Into::into),
        Command::Transmission => transmission_table(cfg).map(Into::into),
        Command::Validate => validate(cfg),
    }
}

fn pole_table(cfg: &RunConfig, pairs: usize) -> Result<PoleTable> {
    let start = std::time::Instant::now();
    let table = find_resonances(&cfg.params, pairs)?;
    debug!("{pairs} pole pairs in {:.2?}", start.elapsed());
    Ok(table)
}

fn poles(cfg: &RunConfig) -> Result<Table> {
    let table = pole_table(cfg, cfg.poles)?;
    let mut out = Table::new(&["n", "re_p", "im_p", "re_norm", "im_norm", "residual"]);
    for p in &table.poles {
        out.push(vec![p.n.into(), p.p.re.into(), p.p.im.into(), p.norm.re.into(), p.norm.im.into(), p.residual.into()])?;
    }
    Ok(out)
}

fn green(cfg: &RunConfig) -> Result<Table> {
    let prm = &cfg.params;
    let pairs = cfg.series.pairs;
    let table = pole_table(cfg, pairs)?;
    let inside: Vec<f64> = cfg.grid.x.iter().copied().filter(|x| (0.0..=prm.l).contains(x)).collect();
    if inside.len() < cfg.grid.x.len() {
        warn!("green: skipping {} grid.x points outside [0, L]", cfg.grid.x.len() - inside.len());
    }
    let mut out = Table::new(&[
        "x", "y", "p", "re_g", "im_g", "re_series", "im_series", "series_deviation", "series",
    ]);
    for &x in &inside {
        for &y in &cfg.grid.y {
            for &p in &cfg.grid.p {
                let pc = Complex64::from(p);
                let g = green_closed(prm, x, y, pc)?;
                let exceptional = (x == 0.0 && y == 0.0) || (x == prm.l && y == prm.l);
                let (s, kind) = if exceptional {
                    (green_subtracted_series(prm, x, y, pc, &table.poles, pairs)?, "subtracted")
                } else {
                    (green_pole_series(prm, x, y, pc, &table.poles, pairs)?, "plain")
                };
                out.push(vec![
                    x.into(), y.into(), p.into(), g.re.into(), g.im.into(), s.re.into(), s.im.into(),
                    (s - g).norm().into(), kind.into(),
                ])?;
            }
        }
    }
    Ok(out)
}

fn psibar(cfg: &RunConfig) -> Result<Table> {
    let prm = &cfg.params;
    let pairs = cfg.series.pairs;
    let set = ResonanceSet::from_table(&pole_table(cfg, pairs)?, cfg.k)?;
    let order = match cfg.series.form {
        ExpansionForm::Subtracted { order } => order,
        ExpansionForm::Printed => DEFAULT_ORDER,
    };
    let mut out = Table::new(&[
        "region", "x", "p", "re_direct", "im_direct", "re_green", "im_green", "route_deviation", "re_series",
        "im_series", "series_deviation",
    ]);
    for &x in &cfg.grid.x {
        for &p in &cfg.grid.p {
            let pc = Complex64::from(p);
            let direct = psi_bar_direct(prm, cfg.k, x, pc)?;
            let series = if p != 0.0 { p_psi_bar_subtracted(&set, x, pc, pairs, order)? / pc } else { direct };
            let scale = direct.norm().max(1e-300);
            let region = Region::of(prm, x);
            // The Green route is defined through G on [0, L]; outside it
            // reuses the edge values, so it is available everywhere.
            let via_green = psi_bar_green(prm, cfg.k, x, pc)?;
            out.push(vec![
                region.label().into(), x.into(), p.into(), direct.re.into(), direct.im.into(), via_green.re.into(),
                via_green.im.into(), ((via_green - direct).norm() / scale).into(), series.re.into(),
                series.im.into(), ((series - direct).norm() / scale).into(),
            ])?;
        }
    }
    Ok(out)
}

const WAVE_COLUMNS: [&str; 7] = ["region", "x", "t", "re_psi", "im_psi", "abs2", "tail_estimate"];

fn plot_files(dir: &Path, prefix: &str, samples: &[(f64, f64, Complex64)], times: &[f64]) -> Result<Vec<(PathBuf, Vec<u8>)>> {
    let mut files = Vec::new();
    for (i, &t) in times.iter().enumerate() {
        let mut tab = Table::new(&["x", "abs2", "re_psi", "im_psi"]);
        let mut pts: Vec<_> = samples.iter().filter(|s| s.1 == t).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (x, _, psi) in pts {
            tab.push(vec![(*x).into(), psi.norm_sqr().into(), psi.re.into(), psi.im.into()])?;
        }
        files.push((dir.join(format!("{prefix}_t{i:02}.csv")), tab.to_csv()?));
    }
    Ok(files)
}

fn evolve(cfg: &RunConfig, plot: Option<&Path>) -> Result<Outcome> {
    let prm = &cfg.params;
    let set = ResonanceSet::from_table(&pole_table(cfg, cfg.series.pairs)?, cfg.k)?;
    let mut table = Table::new(&WAVE_COLUMNS);
    let mut samples = Vec::new();
    for &t in &cfg.grid.t {
        let time = TimePoint::new(prm, t)?;
        for &x in &cfg.grid.x {
            let s = psi_t(&set, x, time, &cfg.series)?;
            debug!("x = {x}, t = {t}: {} pairs, {:?}", s.pairs_used, s.quality);
            table.push(vec![
                s.region.label().into(), x.into(), t.into(), s.psi.re.into(), s.psi.im.into(),
                s.psi.norm_sqr().into(), s.tail_estimate.into(),
            ])?;
            samples.push((x, t, s.psi));
        }
    }
    let files = match plot {
        Some(dir) => plot_files(dir, "evolve", &samples, &cfg.grid.t)?,
        None => Vec::new(),
    };
    Ok(Outcome { table, files, ok: true })
}

fn oracle(cfg: &RunConfig, plot: Option<&Path>) -> Result<Outcome> {
    let prm = &cfg.params;
    let mut cols = WAVE_COLUMNS.to_vec();
    cols.push("error_estimate");
    let mut table = Table::new(&cols);
    let mut samples = Vec::new();
    for &t in &cfg.grid.t {
        for &x in &cfg.grid.x {
            let o = oracle_psi(prm, cfg.k, x, t, &cfg.contour)?;
            debug!("x = {x}, t = {t}: {} evaluations", o.evaluations);
            table.push(vec![
                Region::of(prm, x).label().into(), x.into(), t.into(), o.value.re.into(), o.value.im.into(),
                o.value.norm_sqr().into(), 0.0.into(), o.error.into(),
            ])?;
            samples.push((x, t, o.value));
        }
    }
    let files = match plot {
        Some(dir) => plot_files(dir, "oracle", &samples, &cfg.grid.t)?,
        None => Vec::new(),
    };
    Ok(Outcome { table, files, ok: true })
}

fn limits(cfg: &RunConfig, large_time: f64) -> Result<Table> {
    let prm = &cfg.params;
    let k = cfg.k;
    let pairs = cfg.series.pairs.max(800);
    let set = ResonanceSet::from_table(&pole_table(cfg, pairs)?, k)?;
    let control = SeriesControl { pairs: cfg.series.pairs, ..cfg.series };
    let mut out = Table::new(&["quantity", "x", "t", "pairs", "value"]);
    for &x in &cfg.grid.x {
        for t in [1e-1, 1e-2, 1e-3] {
            let s = psi_t(&set, x, TimePoint::new(prm, t)?, &control)?;
            let dev = (s.psi - Complex64::from_polar(1.0, k * x)).norm();
            out.push(vec!["short_time_deviation".into(), x.into(), t.into(), s.pairs_used.into(), dev.into()])?;
        }
        let time = TimePoint::new(prm, large_time)?;
        let s = psi_t(&set, x, time, &control)?;
        let st = stationary_limit(prm, k, x, time)?;
        out.push(vec![
            "large_time_relative_deviation".into(), x.into(), large_time.into(), s.pairs_used.into(),
            ((s.psi - st).norm() / st.norm()).into(),
        ])?;
        if x > prm.l {
            let c = large_time_pair(prm, k, x, time)?;
            out.push(vec!["c2_c4_remainder".into(), x.into(), large_time.into(), 0usize.into(), c.norm().into()])?;
        }
    }
    let xm = 0.5 * prm.l;
    for n in [400, 800] {
        let rows: [(&str, f64); 5] = [
            ("sum_rule_b_partial", sum_rule_residual(&set, SumRule::B, xm, n)?),
            ("sum_rule_b_cesaro", sum_rule_residual_averaged(&set, SumRule::B, xm, n)?),
            ("sum_rule_s_cesaro", sum_rule_residual_averaged(&set, SumRule::S, xm, n)?),
            ("delta_partial", sum_rule_residual(&set, SumRule::Delta, xm, n)?),
            ("delta_moment", sum_rule_residual(&set, SumRule::DeltaMoment, xm, n)?),
        ];
        for (name, v) in rows {
            out.push(vec![name.into(), xm.into(), 0.0.into(), n.into(), v.into()])?;
        }
    }
    Ok(out)
}

fn transmission_table(cfg: &RunConfig) -> Result<Table> {
    let mut out = Table::new(&["k", "re_t", "im_t", "abs_t2", "abs_r2"]);
    for &k in &cfg.grid.k {
        let t = transmission(&cfg.params, k)?;
        let r = reflection(&cfg.params, k)?;
        out.push(vec![k.into(), t.re.into(), t.im.into(), t.norm_sqr().into(), r.norm_sqr().into()])?;
    }
    Ok(out)
}

/// One line of the `validate` report.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub measured: f64,
    pub threshold: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.measured <= self.threshold
    }
}

/// The invariants the library guarantees, each as (measured, threshold).
pub fn invariant_suite(cfg: &RunConfig) -> Result<Vec<Check>> {
    let prm = &cfg.params;
    let k = cfg.k;
    let mut checks = Vec::new();
    let mut add = |name, measured: f64, threshold| checks.push(Check { name, measured, threshold });

    let table = pole_table(cfg, 800)?;
    let first = table.truncated(40)?;
    add("pole residual |D|/scale (40 pairs)", first.iter().map(|p| p.residual).fold(0.0, f64::max), 1e-10);
    let sector = first
        .iter()
        .step_by(2)
        .map(|p| {
            let a = p.p.arg();
            if a < 0.0 && a > -std::f64::consts::FRAC_PI_4 { 0.0 } else { 1.0 }
        })
        .sum::<f64>();
    add("poles outside −π/4 < arg p < 0", sector, 0.0);
    let p40 = table.get(40).p;
    let deepest = first.iter().map(|p| p.p.im).fold(0.0, f64::min);
    let count = count_zeros(prm, &Rect::new(0.0, p40.re + 0.5 * std::f64::consts::PI / prm.l, deepest - 1.0, -1e-3))?;
    add("argument-principle count − 40", (count as f64 - 40.0).abs(), 0.0);
    let norm_dev = table
        .positive()
        .take(10)
        .map(|p| (resonance_norm_by_quadrature(prm, p, 64) - p.norm).norm() / p.norm.norm())
        .fold(0.0, f64::max);
    add("complex norm: closed form vs quadrature", norm_dev, 1e-9);

    let pc = Complex64::new(2.0, 0.3);
    let mut sym: f64 = 0.0;
    let mut rbc: f64 = 0.0;
    let mut jump: f64 = 0.0;
    for &(x, y) in &[(0.2, 0.7), (0.5, 0.9), (0.1, 0.4)] {
        sym = sym.max((green_closed(prm, x, y, pc)? - green_closed(prm, y, x, pc)?).norm());
        rbc = rbc.max((green_dx(prm, 0.0, y, pc, false)? + Complex64::i() * pc * green_closed(prm, 0.0, y, pc)?).norm());
        rbc = rbc.max((green_dx(prm, prm.l, y, pc, true)? - Complex64::i() * pc * green_closed(prm, prm.l, y, pc)?).norm());
        jump = jump.max((green_dx(prm, y, y, pc, true)? - green_dx(prm, y, y, pc, false)? - 1.0).norm());
    }
    add("Green function symmetry", sym, 1e-12);
    add("Green function outgoing boundary conditions", rbc, 1e-8);
    add("Green function derivative jump", jump, 1e-6);

    let set = ResonanceSet::from_table(&table, k)?;
    let mut route: f64 = 0.0;
    for x in [-0.5, 0.3, 0.7, 1.5] {
        for p in [0.5, 2.5, 5.0] {
            let pc = Complex64::from(p);
            let d = psi_bar_direct(prm, k, x, pc)?;
            route = route.max((psi_bar_green(prm, k, x, pc)? - d).norm() / d.norm());
        }
    }
    add("ψ̄ matching route vs Green route (relative)", route, 1e-9);

    let mut flux: f64 = 0.0;
    let mut t_routes: f64 = 0.0;
    for kk in [1.0, 3.0, 5.0] {
        let s = ScatteringSolution::new(prm, ScatteringKind::InR, kk)?;
        flux = flux.max((s.reflection().norm_sqr() + s.transmission().norm_sqr() - 1.0).abs());
        t_routes = t_routes.max((transmission(prm, kk)? - s.transmission()).norm());
    }
    add("flux |R|² + |T|² − 1", flux, 1e-12);
    add("T from G(0, L, k) vs matching amplitude", t_routes, 1e-11);
    add("w(0) − 1", (faddeeva_w(Complex64::new(0.0, 0.0))? - 1.0).norm(), 1e-14);

    let time = TimePoint::new(prm, 0.2)?;
    let series = psi_t(&set, 1.5, time, &cfg.series)?;
    let brute = oracle_psi(prm, k, 1.5, 0.2, &cfg.contour)?;
    add("ψ(1.5, 0.2): expansion vs Laplace inversion", (series.psi - brute.value).norm(), 1e-3);
    let causal = causality_check(prm, k, 1.5, -0.1, &cfg.contour)?;
    add("|ψ(1.5, −0.1)| (causality)", causal.psi.value.norm(), 1e-6);

    let late = TimePoint::new(prm, 50.0)?;
    let mut lim: f64 = 0.0;
    for x in [-0.5, 0.5, 1.5] {
        let st = stationary_limit(prm, k, x, late)?;
        lim = lim.max((psi_t(&set, x, late, &cfg.series)?.psi - st).norm() / st.norm());
    }
    add("t = 50 vs stationary state (relative)", lim, 1e-3);
    add("δ moment rule at x = L/2, 800 pairs", sum_rule_residual(&set, SumRule::DeltaMoment, 0.5 * prm.l, 800)?, 5e-2);
    add(
        "Cesàro-summed u_n(L)u_n(x) rule, 800 pairs",
        sum_rule_residual_averaged(&set, SumRule::B, 0.5 * prm.l, 800)?,
        1e-2,
    );
    Ok(checks)
}

fn validate(cfg: &RunConfig) -> Result<Outcome> {
    let checks = invariant_suite(cfg)?;
    let mut table = Table::new(&["status", "check", "measured", "threshold"]);
    for c in &checks {
        table.push(vec![
            if c.passed() { "PASS" } else { "FAIL" }.into(),
            c.name.into(),
            c.measured.into(),
            c.threshold.into(),
        ])?;
    }
    let ok = checks.iter().all(Check::passed);
    Ok(Outcome { table, files: Vec::new(), ok })
}
