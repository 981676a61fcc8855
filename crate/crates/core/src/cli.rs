//! Command-line front end: `synth`, `plot`, `analyze` and `compare`.
//!
//! Exit codes: 0 success (and aligned, for `compare`), 1 usage or
//! configuration error, 2 data error, 3 misalignment detected.
//!
//! Settings come from an optional TOML or JSON config file, and flags
//! override it. Relative file globs in a config file are resolved against
//! the directory holding the config file.

use std::ffi::OsString;
use std::fs;
use std::io::{self, IsTerminal, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::compare::{
    stats_compare, stats_compare_pw, CompareResult, PairwiseTable, TVariant, TestKind,
    TestSelection, TestSpec,
};
use crate::error::{Error, Result};
use crate::focal::{stats_gather, ExtractorSpec, FmMatrix};
use crate::ingest::{expand_glob, load_run_set_with, Delimiter, ReadOptions, RunSet};
use crate::render::{
    dist_plot_per_fm, dist_table_per_fm, dist_table_per_setup, emit_pgf, emit_svg, output_plot,
    stats_compare_plot, stats_compare_table, stats_table_per_setup, CompareRow, PlotMode, Render,
    TableDoc, TableFormat,
};
use crate::stats::{stats_analyze, SummaryStats, DEFAULT_ALPHA};
use crate::synth::{read_sidecar, write_synth, SynthModel, SynthParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_MISALIGNED: i32 = 3;

/// Environment variable that disables terminal colors when set.
pub const NO_COLOR_ENV: &str = "SIMOUT_NO_COLOR";

#[derive(Parser, Debug)]
#[command(
    name = "simout",
    version,
    about = "Statistical analysis of stochastic simulation output"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate seeded synthetic simulation output
    Synth(SynthArgs),
    /// Plot output dynamics across runs
    Plot(PlotArgs),
    /// Extract focal measures and summarize their distributions
    Analyze(AnalyzeArgs),
    /// Test whether setups (model implementations) produce the same focal measures
    Compare(CompareArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ModelArg {
    Logistic,
    PredatorPrey,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum FormatArg {
    Json,
    Text,
    Latex,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ModeArg {
    Superimposed,
    Extremes,
    Movavg,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum VariantArg {
    Pooled,
    Welch,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum PlotFormat {
    Svg,
    Pgf,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long, value_enum, default_value = "predator-prey")]
    model: ModelArg,
    #[arg(long, default_value_t = 30)]
    runs: usize,
    /// Iterations per run
    #[arg(long, default_value_t = 100)]
    iters: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Intrinsic growth rate (model default when omitted)
    #[arg(long)]
    growth: Option<f64>,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Setup as TAG=GLOB (repeatable); replaces setups from the config file
    #[arg(long = "setup", value_name = "TAG=GLOB")]
    setups: Vec<String>,
    /// TOML or JSON configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Leading rows to drop from every file
    #[arg(long)]
    skip_rows: Option<usize>,
    /// Field delimiter (inferred when omitted)
    #[arg(long)]
    delimiter: Option<char>,
    /// Outputs to use, by name or 0-based index (comma-separated)
    #[arg(long, value_delimiter = ',')]
    outputs: Option<Vec<String>>,
    /// Output directory for artifacts
    #[arg(long)]
    out: Option<PathBuf>,
    /// Figure formats to write
    #[arg(long, value_enum, value_delimiter = ',')]
    plot_formats: Option<Vec<PlotFormat>>,
}

#[derive(Args, Debug)]
struct ExtractArgs {
    /// Steady-state truncation iteration (0-based)
    #[arg(long, conflicts_with = "iters")]
    ss_idx: Option<usize>,
    /// Take output values at these iterations instead (comma-separated, 0-based)
    #[arg(long, value_delimiter = ',')]
    iters: Option<Vec<usize>>,
    /// Significance level
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
}

#[derive(Args, Debug)]
struct PlotArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value = "superimposed")]
    mode: ModeArg,
    /// Moving-average half-window
    #[arg(long, default_value_t = 10)]
    w: usize,
    /// Runs to plot, by 0-based index (comma-separated; default all)
    #[arg(long, value_delimiter = ',')]
    runs: Option<Vec<usize>>,
    /// Print figure models instead of file names
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    extract: ExtractArgs,
    /// Also write LaTeX tables
    #[arg(long)]
    latex: bool,
    /// Also write distribution figures
    #[arg(long)]
    plots: bool,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    extract: ExtractArgs,
    /// p (parametric), np (non-parametric), or a comma-separated list with one entry per focal measure
    #[arg(long)]
    tests: Option<String>,
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
    /// Also report failed-test counts for every pair of setups
    #[arg(long)]
    pairwise: bool,
    /// Also write the p-value table as LaTeX
    #[arg(long)]
    latex: bool,
    /// Also write PDF/CDF overlay figures
    #[arg(long)]
    plots: bool,
}

/// Configuration file contents. Every field is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub setups: Vec<SetupConfig>,
    pub extractor: Option<ExtractorSpec>,
    pub outputs: Option<Vec<String>>,
    pub output_names: Option<Vec<String>>,
    pub alpha: Option<f64>,
    pub tests: Option<TestsConfig>,
    pub skip_rows: Option<usize>,
    pub delimiter: Option<char>,
    pub render: Option<RenderConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetupConfig {
    pub tag: String,
    pub files: FilesConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum FilesConfig {
    Glob(String),
    List(Vec<String>),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestsConfig {
    pub tests: Option<TestsValue>,
    pub variant: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum TestsValue {
    One(String),
    List(Vec<String>),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenderConfig {
    pub out: Option<PathBuf>,
    pub formats: Option<Vec<String>>,
}

impl RunConfig {
    /// Reads a config file; `.json` files are parsed as JSON, anything else as TOML.
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut cfg: RunConfig = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        } else {
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        };
        let base = path.parent().unwrap_or(Path::new(""));
        for s in &mut cfg.setups {
            let rebase = |p: &str| {
                if Path::new(p).is_absolute() {
                    p.to_string()
                } else {
                    base.join(p).to_string_lossy().into_owned()
                }
            };
            s.files = match &s.files {
                FilesConfig::Glob(g) => FilesConfig::Glob(rebase(g)),
                FilesConfig::List(l) => FilesConfig::List(l.iter().map(|p| rebase(p)).collect()),
            };
        }
        if let Some(r) = &mut cfg.render {
            if let Some(o) = &r.out {
                if o.is_relative() {
                    r.out = Some(base.join(o));
                }
            }
        }
        Ok(cfg)
    }
}

/// Parses `p`, `np` or a per-focal-measure list such as `p,np,p`.
pub fn parse_tests(s: &str) -> Result<TestSelection> {
    let one = |t: &str| match t.trim() {
        "p" | "parametric" => Ok(TestKind::Parametric),
        "np" | "nonparametric" | "non_parametric" | "non-parametric" => Ok(TestKind::NonParametric),
        other => Err(Error::Config(format!(
            "unknown test family {other:?} (use p or np)"
        ))),
    };
    if s.contains(',') {
        Ok(TestSelection::PerFm(
            s.split(',').map(one).collect::<Result<_>>()?,
        ))
    } else {
        Ok(TestSelection::All(one(s)?))
    }
}

fn parse_variant(s: &str) -> Result<TVariant> {
    match s {
        "pooled" => Ok(TVariant::Pooled),
        "welch" => Ok(TVariant::Welch),
        other => Err(Error::Config(format!("unknown t-test variant {other:?}"))),
    }
}

struct Setup {
    tag: String,
    paths: Vec<PathBuf>,
}

/// Settings after merging the config file and flags.
struct Resolved {
    cfg: RunConfig,
    setups: Vec<Setup>,
    read: ReadOptions,
    out: Option<PathBuf>,
    plot_formats: Vec<PlotFormat>,
}

fn resolve_input(input: &InputArgs) -> Result<Resolved> {
    let cfg = match &input.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let mut setups = Vec::new();
    if input.setups.is_empty() {
        for s in &cfg.setups {
            let paths = match &s.files {
                FilesConfig::Glob(g) => expand_glob(g)?,
                FilesConfig::List(l) => l.iter().map(PathBuf::from).collect(),
            };
            setups.push(Setup {
                tag: s.tag.clone(),
                paths,
            });
        }
    } else {
        for s in &input.setups {
            let (tag, glob) = s
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("--setup expects TAG=GLOB, got {s:?}")))?;
            if tag.is_empty() {
                return Err(Error::Config(format!("empty tag in --setup {s:?}")));
            }
            setups.push(Setup {
                tag: tag.to_string(),
                paths: expand_glob(glob)?,
            });
        }
    }
    if setups.is_empty() {
        return Err(Error::Config(
            "no setups given (use --setup TAG=GLOB or a config file)".into(),
        ));
    }
    let delimiter = match input.delimiter.or(cfg.delimiter) {
        Some(c) => Some(
            Delimiter::from_char(c)
                .ok_or_else(|| Error::Config(format!("unsupported delimiter {c:?}")))?,
        ),
        None => None,
    };
    let read = ReadOptions {
        delimiter,
        skip_rows: input.skip_rows.or(cfg.skip_rows).unwrap_or(0),
    };
    let render = cfg.render.clone().unwrap_or_default();
    let out = input.out.clone().or(render.out);
    let plot_formats = match (&input.plot_formats, &render.formats) {
        (Some(f), _) => f.clone(),
        (None, Some(f)) => f
            .iter()
            .map(|s| {
                PlotFormat::from_str(s, true)
                    .map_err(|_| Error::Config(format!("unknown figure format {s:?}")))
            })
            .collect::<Result<_>>()?,
        (None, None) => vec![PlotFormat::Svg, PlotFormat::Pgf],
    };
    Ok(Resolved {
        cfg,
        setups,
        read,
        out,
        plot_formats,
    })
}

impl Resolved {
    fn load(&self, setup: &Setup) -> Result<RunSet> {
        let mut rs = load_run_set_with(&setup.paths, &setup.tag, &self.read)?;
        let names = self
            .cfg
            .output_names
            .clone()
            .or_else(|| read_sidecar(&setup.paths[0]).map(|m| m.output_names));
        if let Some(n) = names {
            if n.len() == rs.n_outputs() {
                rs.set_output_names(n)?;
            } else if self.cfg.output_names.is_some() {
                return Err(Error::Config(format!(
                    "{} output names given for {} outputs",
                    n.len(),
                    rs.n_outputs()
                )));
            }
        }
        Ok(rs)
    }

    fn load_all(&self) -> Result<Vec<RunSet>> {
        self.setups.iter().map(|s| self.load(s)).collect()
    }

    fn output_indices(
        &self,
        flag: &Option<Vec<String>>,
        rs: &RunSet,
    ) -> Result<Option<Vec<usize>>> {
        let Some(sel) = flag.as_ref().or(self.cfg.outputs.as_ref()) else {
            return Ok(None);
        };
        sel.iter()
            .map(|s| output_index(s, rs))
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    fn out_dir(&self) -> Result<Option<&Path>> {
        if let Some(d) = &self.out {
            fs::create_dir_all(d)?;
        }
        Ok(self.out.as_deref())
    }

    fn write_figure(
        &self,
        fig: &impl Render,
        dir: &Path,
        stem: &str,
        written: &mut Vec<PathBuf>,
    ) -> Result<()> {
        for f in &self.plot_formats {
            let path = match f {
                PlotFormat::Svg => dir.join(format!("{stem}.svg")),
                PlotFormat::Pgf => dir.join(format!("{stem}.tex")),
            };
            match f {
                PlotFormat::Svg => emit_svg(fig, &path)?,
                PlotFormat::Pgf => emit_pgf(fig, &path)?,
            }
            written.push(path);
        }
        Ok(())
    }
}

fn output_index(s: &str, rs: &RunSet) -> Result<usize> {
    if let Some(i) = rs.output_names().iter().position(|n| n == s) {
        return Ok(i);
    }
    match s.parse::<usize>() {
        Ok(i) if i < rs.n_outputs() => Ok(i),
        _ => Err(Error::Config(format!(
            "unknown output {s:?} (available: {})",
            rs.output_names().join(", ")
        ))),
    }
}

fn extractor(args: &ExtractArgs, cfg: &RunConfig) -> ExtractorSpec {
    if let Some(iters) = &args.iters {
        ExtractorSpec::AtIterations {
            iters: iters.clone(),
        }
    } else if let Some(ss_idx) = args.ss_idx {
        ExtractorSpec::SteadyStateSixpack { ss_idx }
    } else {
        cfg.extractor
            .clone()
            .unwrap_or(ExtractorSpec::SteadyStateSixpack { ss_idx: 0 })
    }
}

fn alpha(args: &ExtractArgs, cfg: &RunConfig) -> Result<f64> {
    let a = args.alpha.or(cfg.alpha).unwrap_or(DEFAULT_ALPHA);
    if a > 0.0 && a < 1.0 {
        Ok(a)
    } else {
        Err(Error::Config(format!("--alpha must be in (0,1), got {a}")))
    }
}

/// File-name-safe version of a tag or label.
fn file_stem(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '-' | '_') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn gather_all(
    res: &Resolved,
    rss: &[RunSet],
    args: &ExtractArgs,
    outputs: &Option<Vec<String>>,
) -> Result<Vec<FmMatrix>> {
    let spec = extractor(args, &res.cfg);
    rss.iter()
        .map(|rs| {
            let sel = res.output_indices(outputs, rs)?;
            stats_gather(rs, &spec, sel.as_deref(), rs.tag())
        })
        .collect()
}

/// Summary statistics of one focal measure, as reported by `analyze`.
#[derive(Debug, Clone, Serialize)]
pub struct FmReport {
    pub fm: String,
    pub stats: SummaryStats,
}

#[derive(Debug, Clone, Serialize)]
pub struct SetupReport {
    pub tag: String,
    pub n_runs: usize,
    pub n_iters: usize,
    pub extractor: ExtractorSpec,
    pub focal_measures: Vec<FmReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyzeReport {
    pub alpha: f64,
    pub setups: Vec<SetupReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareReport {
    pub extractor: ExtractorSpec,
    pub result: CompareResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairwise: Option<PairwiseTable>,
}

fn json(v: &impl Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    color: bool,
}

fn cmd_synth(a: &SynthArgs, io: &mut Io) -> Result<i32> {
    let model = match a.model {
        ModelArg::Logistic => SynthModel::Logistic,
        ModelArg::PredatorPrey => SynthModel::PredatorPrey,
    };
    let mut p = SynthParams::new(model, a.runs, a.iters, a.seed);
    if let Some(g) = a.growth {
        p = p.with_growth(g);
    }
    let paths = write_synth(&p, &a.out)?;
    writeln!(io.out, "wrote {} runs to {}", paths.len(), a.out.display())?;
    Ok(EXIT_OK)
}

fn cmd_plot(a: &PlotArgs, io: &mut Io) -> Result<i32> {
    let res = resolve_input(&a.input)?;
    let mode = match a.mode {
        ModeArg::Superimposed => PlotMode::Superimposed,
        ModeArg::Extremes => PlotMode::Extremes,
        ModeArg::Movavg => PlotMode::MovingAvg(a.w),
    };
    let mode_name = match a.mode {
        ModeArg::Superimposed => "superimposed",
        ModeArg::Extremes => "extremes",
        ModeArg::Movavg => "movavg",
    };
    let dir = res.out_dir()?.map(Path::to_path_buf);
    let mut figures = Vec::new();
    let mut written = Vec::new();
    for rs in res.load_all()? {
        let outputs = res
            .output_indices(&a.input.outputs, &rs)?
            .unwrap_or_else(|| (0..rs.n_outputs()).collect());
        for o in outputs {
            let fig = output_plot(&rs, o, mode, a.runs.as_deref())?;
            if let Some(d) = &dir {
                let stem = file_stem(&format!(
                    "{}_{}_{mode_name}",
                    rs.tag(),
                    rs.output_names()[o]
                ));
                res.write_figure(&fig, d, &stem, &mut written)?;
            }
            figures.push(fig);
        }
    }
    match a.format {
        FormatArg::Json => write!(io.out, "{}", json(&figures)?)?,
        _ if dir.is_none() => {
            writeln!(
                io.err,
                "note: no --out directory given, figures were not written"
            )?;
        }
        _ => {
            for p in written {
                writeln!(io.out, "{}", p.display())?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn table_format(f: FormatArg) -> TableFormat {
    if f == FormatArg::Latex {
        TableFormat::Latex
    } else {
        TableFormat::PlainText
    }
}

fn cmd_analyze(a: &AnalyzeArgs, io: &mut Io) -> Result<i32> {
    let res = resolve_input(&a.input)?;
    let alpha = alpha(&a.extract, &res.cfg)?;
    let rss = res.load_all()?;
    let fms = gather_all(&res, &rss, &a.extract, &a.input.outputs)?;
    let spec = extractor(&a.extract, &res.cfg);

    let mut report = AnalyzeReport {
        alpha,
        setups: Vec::new(),
    };
    let mut stats_tables = Vec::new();
    let mut all_stats = Vec::new();
    for (rs, fm) in rss.iter().zip(&fms) {
        let stats = stats_analyze(fm, alpha)?;
        stats_tables.push(stats_table_per_setup(fm.tag(), fm.fm_names(), &stats)?);
        report.setups.push(SetupReport {
            tag: fm.tag().to_string(),
            n_runs: rs.len(),
            n_iters: rs.n_iters(),
            extractor: spec.clone(),
            focal_measures: fm
                .fm_names()
                .iter()
                .zip(&stats)
                .map(|(n, s)| FmReport {
                    fm: n.label(),
                    stats: s.clone(),
                })
                .collect(),
        });
        all_stats.push(stats);
    }

    let report_json = json(&report)?;
    match a.extract.format {
        FormatArg::Json => write!(io.out, "{report_json}")?,
        f => {
            for t in &stats_tables {
                write!(io.out, "{}", t.render(table_format(f)))?;
                writeln!(io.out)?;
            }
        }
    }

    let Some(dir) = res.out_dir()? else {
        return Ok(EXIT_OK);
    };
    fs::write(dir.join("analysis.json"), &report_json)?;
    for fm in &fms {
        fs::write(
            dir.join(format!("{}_fm.csv", file_stem(fm.tag()))),
            fm.to_delimited(),
        )?;
    }
    if a.latex {
        for ((fm, stats), t) in fms.iter().zip(&all_stats).zip(&stats_tables) {
            let stem = file_stem(fm.tag());
            fs::write(dir.join(format!("{stem}_stats.tex")), t.to_latex())?;
            fs::write(
                dir.join(format!("{stem}_dist.tex")),
                dist_table_per_setup(fm, stats)?.to_latex(),
            )?;
        }
        let mut merged: Option<TableDoc> = None;
        for j in 0..fms[0].m() {
            let t = dist_table_per_fm(
                &per_setup_samples(&fms, j),
                &fms[0].fm_names()[j].label(),
                alpha,
            )?;
            match &mut merged {
                Some(m) => m.merge(&t)?,
                None => merged = Some(t),
            }
        }
        if let Some(m) = merged {
            fs::write(dir.join("dist_per_fm.tex"), m.to_latex())?;
        }
    }
    if a.plots {
        let mut written = Vec::new();
        for j in 0..fms[0].m() {
            let label = fms[0].fm_names()[j].label();
            let grid = dist_plot_per_fm(&per_setup_samples(&fms, j), &label, alpha)?;
            res.write_figure(
                &grid,
                dir,
                &format!("dist_{}", file_stem(&label)),
                &mut written,
            )?;
        }
    }
    Ok(EXIT_OK)
}

/// Column `j` of every matrix, tagged; matrices may have different FM sets
/// only if they came from different extractors, which the CLI never does.
fn per_setup_samples(fms: &[FmMatrix], j: usize) -> Vec<(String, Vec<f64>)> {
    fms.iter()
        .map(|f| (f.tag().to_string(), f.column(j)))
        .collect()
}

fn cmd_compare(a: &CompareArgs, io: &mut Io) -> Result<i32> {
    let res = resolve_input(&a.input)?;
    if res.setups.len() < 2 {
        return Err(Error::Config("compare needs at least two setups".into()));
    }
    let alpha = alpha(&a.extract, &res.cfg)?;
    let tests_cfg = res.cfg.tests.clone().unwrap_or_default();
    let tests = match (&a.tests, &tests_cfg.tests) {
        (Some(s), _) => parse_tests(s)?,
        (None, Some(TestsValue::One(s))) => parse_tests(s)?,
        (None, Some(TestsValue::List(l))) => parse_tests(&l.join(","))?,
        (None, None) => TestSelection::All(TestKind::Parametric),
    };
    let variant = match (a.variant, &tests_cfg.variant) {
        (Some(VariantArg::Pooled), _) => TVariant::Pooled,
        (Some(VariantArg::Welch), _) => TVariant::Welch,
        (None, Some(v)) => parse_variant(v)?,
        (None, None) => TVariant::Pooled,
    };
    let spec = TestSpec {
        tests,
        variant,
        alpha,
    };

    let rss = res.load_all()?;
    let fms = gather_all(&res, &rss, &a.extract, &a.input.outputs)?;
    let result = stats_compare(&fms, &spec)?;
    let pairwise = if a.pairwise {
        Some(stats_compare_pw(&fms, &spec)?)
    } else {
        None
    };
    let table = stats_compare_table(&[CompareRow::new(result.clone())])?;
    let report = CompareReport {
        extractor: extractor(&a.extract, &res.cfg),
        result: result.clone(),
        pairwise: pairwise.clone(),
    };
    let report_json = json(&report)?;

    match a.extract.format {
        FormatArg::Json => write!(io.out, "{report_json}")?,
        f => {
            write!(io.out, "{}", table.render(table_format(f)))?;
            if let Some(pw) = &pairwise {
                writeln!(io.out)?;
                write!(io.out, "{}", pw.to_text(io.color))?;
            }
            let verdict = if result.n_failed == 0 {
                "aligned: no test failed".to_string()
            } else {
                format!(
                    "misaligned: {} of {} tests failed",
                    result.n_failed,
                    result.p_values.len()
                )
            };
            writeln!(io.out, "{}", paint(&verdict, result.n_failed > 0, io.color))?;
        }
    }

    if let Some(dir) = res.out_dir()? {
        fs::write(dir.join("compare.json"), &report_json)?;
        if let Some(pw) = &pairwise {
            fs::write(dir.join("pairwise.txt"), pw.to_text(false))?;
        }
        if a.latex {
            fs::write(dir.join("compare_table.tex"), table.to_latex())?;
        }
        if a.plots {
            let mut written = Vec::new();
            for (j, name) in result.fm_names.iter().enumerate() {
                let label = name.label();
                match stats_compare_plot(&per_setup_samples(&fms, j), &label) {
                    Ok((pdf, cdf)) => {
                        let stem = file_stem(&label);
                        res.write_figure(&pdf, dir, &format!("compare_{stem}_pdf"), &mut written)?;
                        res.write_figure(&cdf, dir, &format!("compare_{stem}_cdf"), &mut written)?;
                    }
                    Err(e) => writeln!(io.err, "note: no comparison plot for {label}: {e}")?,
                }
            }
        }
    }
    Ok(if result.n_failed > 0 {
        EXIT_MISALIGNED
    } else {
        EXIT_OK
    })
}

fn paint(s: &str, bad: bool, color: bool) -> String {
    if !color {
        return s.to_string();
    }
    let code = if bad { 31 } else { 32 };
    format!("\x1b[{code}m{s}\x1b[0m")
}

/// Exit code for an error raised while running a command.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => EXIT_USAGE,
        _ => EXIT_DATA,
    }
}

/// Runs the CLI with explicit streams and returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write, color: bool) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = if color {
                e.render().ansi().to_string()
            } else {
                e.render().to_string()
            };
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    let mut io = Io { out, err, color };
    let r = match &cli.command {
        Command::Synth(a) => cmd_synth(a, &mut io),
        Command::Plot(a) => cmd_plot(a, &mut io),
        Command::Analyze(a) => cmd_analyze(a, &mut io),
        Command::Compare(a) => cmd_compare(a, &mut io),
    };
    match r {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(io.err, "{} {e}", paint("error:", true, color));
            exit_code(&e)
        }
    }
}

/// Runs the CLI on the process streams. Colors are used only on a terminal
/// and when `SIMOUT_NO_COLOR` is unset.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let color = std::env::var_os(NO_COLOR_ENV).is_none() && io::stdout().is_terminal();
    let stdout = io::stdout();
    let stderr = io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    let code = run_with(args, &mut out, &mut err, color);
    let _ = out.flush();
    code
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_cli(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with(
            std::iter::once("simout").chain(args.iter().copied()),
            &mut out,
            &mut err,
            false,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run_cli(&[]).0, EXIT_USAGE);
        assert_eq!(run_cli(&["analyze", "--bogus"]).0, EXIT_USAGE);
        assert_eq!(run_cli(&["analyze"]).0, EXIT_USAGE);
        assert_eq!(run_cli(&["--help"]).0, EXIT_OK);
        assert_eq!(run_cli(&["compare", "--setup", "noequals"]).0, EXIT_USAGE);
    }

    #[test]
    fn tests_flag_parsing() {
        assert_eq!(
            parse_tests("p").unwrap(),
            TestSelection::All(TestKind::Parametric)
        );
        assert_eq!(
            parse_tests("np").unwrap(),
            TestSelection::All(TestKind::NonParametric)
        );
        assert_eq!(
            parse_tests("p,np").unwrap(),
            TestSelection::PerFm(vec![TestKind::Parametric, TestKind::NonParametric])
        );
        assert!(parse_tests("x").is_err());
    }

    #[test]
    fn analyze_reports_undefined_with_reason() {
        let dir = tempfile::tempdir().unwrap();
        for (i, body) in ["1,5\n2,5\n3,5\n", "2,5\n2,5\n4,5\n", "1,5\n3,5\n2,5\n"]
            .iter()
            .enumerate()
        {
            fs::write(dir.path().join(format!("r{i}.csv")), body).unwrap();
        }
        let glob = format!("a={}/r*.csv", dir.path().display());
        let (code, out, _) = run_cli(&[
            "analyze", "--setup", &glob, "--iters", "0,2", "--format", "json",
        ]);
        assert_eq!(code, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        let fms = &v["setups"][0]["focal_measures"];
        assert_eq!(fms.as_array().unwrap().len(), 4);
        assert_eq!(fms[2]["fm"], "out1.it0");
        assert!(fms[2]["stats"]["skewness"]["undefined"].is_string());
    }

    #[test]
    fn data_errors_exit_two() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("bad.csv"), "1,2\n3\n").unwrap();
        let glob = format!("a={}/*.csv", dir.path().display());
        let (code, _, err) = run_cli(&["analyze", "--setup", &glob]);
        assert_eq!(code, EXIT_DATA);
        assert!(err.contains("ragged"), "{err}");
        let empty = format!("a={}/*.none", dir.path().display());
        assert_eq!(run_cli(&["analyze", "--setup", &empty]).0, EXIT_DATA);
    }

    #[test]
    fn config_file_setups() {
        let dir = tempfile::tempdir().unwrap();
        fs::create_dir(dir.path().join("d")).unwrap();
        for i in 0..3 {
            fs::write(
                dir.path().join(format!("d/{i}.csv")),
                format!("{i}\n{}\n", i * 2),
            )
            .unwrap();
        }
        fs::write(
            dir.path().join("cfg.toml"),
            "alpha = 0.1\noutput_names = [\"x\"]\n[extractor]\nkind = \"at_iterations\"\niters = [1]\n\n[[setups]]\ntag = \"s\"\nfiles = \"d/*.csv\"\n",
        )
        .unwrap();
        let cfg = dir.path().join("cfg.toml");
        let (code, out, err) = run_cli(&[
            "analyze",
            "--config",
            cfg.to_str().unwrap(),
            "--format",
            "json",
        ]);
        assert_eq!(code, EXIT_OK, "{err}");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["alpha"], 0.1);
        assert_eq!(v["setups"][0]["focal_measures"][0]["fm"], "x.it1");
        fs::write(dir.path().join("bad.toml"), "unknown_key = 1\n").unwrap();
        let bad = dir.path().join("bad.toml");
        assert_eq!(
            run_cli(&["analyze", "--config", bad.to_str().unwrap()]).0,
            EXIT_USAGE
        );
    }
}
