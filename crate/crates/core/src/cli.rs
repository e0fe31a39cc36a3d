//! Command-line front end.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::approx::ratio_identities;
use crate::concord::{sign_disagreement_grid, GridMode, SplitPlan};
use crate::csvio::{fmt_full, fmt_opt, read_dataset_path, write_dataset, write_table, CsvSpec};
use crate::dataset::Dataset;
use crate::equiv::{
    generate_dataset, ic_from_table, predictive_from_table, replicate_links, structural_sim,
    Design, GenConfig,
};
use crate::error::{Error, Result};
use crate::fit::{fit_mle, FitOptions, FitResult, ModelSpec};
use crate::links::{logistic_normal_scale, LinkKind};
use crate::par::Jobs;
use crate::stats::SummaryStats;

const ALL_LINKS: &str = "probit,compit,cauchit,logit";

#[derive(Debug, Parser)]
#[command(
    name = "linkequiv",
    version,
    about = "Binary regression link comparison toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit one or more links to a CSV dataset and print coefficients and ratios.
    Fit(FitArgs),
    /// Probit-on-logit slope regressions over simulated datasets.
    Structural(StructuralArgs),
    /// Replicated test error of each link over random train/test splits.
    Predictive(ReplicationArgs),
    /// Pairwise sign disagreement of the links on a grid of linear predictors.
    Concordance(ConcordanceArgs),
    /// Replicated AIC and BIC of each link's training fits.
    Ic(ReplicationArgs),
    /// Write a simulated dataset as CSV.
    Gen(GenArgs),
    /// Write densities and CDFs of the links on a grid as CSV.
    Cdfgrid(CdfgridArgs),
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Input CSV with a header row.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Response column.
    #[arg(long, default_value = "y")]
    pub response: String,
    /// Predictor columns (default: every column except the response).
    #[arg(long, value_delimiter = ',')]
    pub columns: Option<Vec<String>>,
    /// Response value to treat as 1; without it the response must be 0/1.
    #[arg(long)]
    pub positive: Option<String>,
}

impl InputArgs {
    fn load(&self) -> Result<Option<Dataset>> {
        let Some(path) = &self.input else {
            return Ok(None);
        };
        let spec = CsvSpec {
            response: self.response.clone(),
            columns: self.columns.clone(),
            positive: self.positive.clone(),
        };
        read_dataset_path(path, &spec).map(Some)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DesignKind {
    Equispaced,
    Gaussian,
}

/// Data-generating process; unset fields take the subcommand's defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct GenFlags {
    #[arg(long, value_enum)]
    pub design: Option<DesignKind>,
    /// Equispaced design bounds.
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
    pub interval: Option<Vec<f64>>,
    /// Gaussian design mean.
    #[arg(long, allow_negative_numbers = true)]
    pub mean: Option<f64>,
    /// Gaussian design standard deviation.
    #[arg(long)]
    pub sd: Option<f64>,
    /// Link of the true model.
    #[arg(long)]
    pub truth: Option<LinkKind>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta1: Option<f64>,
    /// Observations per dataset.
    #[arg(long)]
    pub n: Option<usize>,
}

impl GenFlags {
    pub fn resolve(&self, default: GenConfig) -> Result<GenConfig> {
        let kind = self.design.unwrap_or(match default.design {
            Design::Equispaced { .. } => DesignKind::Equispaced,
            Design::Gaussian { .. } => DesignKind::Gaussian,
        });
        let design = match kind {
            DesignKind::Equispaced => {
                let (a0, b0) = match default.design {
                    Design::Equispaced { a, b } => (a, b),
                    Design::Gaussian { .. } => (0.0, 1.0),
                };
                let (a, b) = match self.interval.as_deref() {
                    Some([a, b]) => (*a, *b),
                    _ => (a0, b0),
                };
                Design::Equispaced { a, b }
            }
            DesignKind::Gaussian => {
                let (m0, s0) = match default.design {
                    Design::Gaussian { mean, sd } => (mean, sd),
                    Design::Equispaced { .. } => (0.0, 1.0),
                };
                Design::Gaussian {
                    mean: self.mean.unwrap_or(m0),
                    sd: self.sd.unwrap_or(s0),
                }
            }
        };
        let cfg = GenConfig {
            design,
            truth: self.truth.unwrap_or(default.truth),
            beta0: self.beta0.unwrap_or(default.beta0),
            beta1: self.beta1.unwrap_or(default.beta1),
            n: self.n.unwrap_or(default.n),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunFlags {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Largest tolerated fraction of invalid replicates before exiting nonzero.
    #[arg(long, default_value_t = 0.01)]
    pub max_invalid_frac: f64,
}

impl RunFlags {
    fn jobs(&self) -> Result<Jobs> {
        match self.jobs {
            Some(0) => Err(Error::Argument("--jobs must be at least 1".into())),
            j => Ok(Jobs(j)),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(
        long,
        visible_alias = "link",
        value_delimiter = ',',
        default_value = "probit,logit"
    )]
    pub links: Vec<LinkKind>,
    /// Fit without an intercept.
    #[arg(long)]
    pub no_intercept: bool,
    /// Coefficient table as CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct StructuralArgs {
    #[command(flatten)]
    pub gen: GenFlags,
    #[command(flatten)]
    pub run: RunFlags,
    /// Outer replicates.
    #[arg(short = 'R', long = "reps", default_value_t = 99)]
    pub reps: usize,
    /// Datasets per replicate.
    #[arg(short = 'S', long = "inner", default_value_t = 199)]
    pub inner: usize,
    /// Per-replicate theta/tau/rho/R^2 CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Every (logit, probit) slope pair as CSV.
    #[arg(long)]
    pub pairs_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ReplicationArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub gen: GenFlags,
    #[command(flatten)]
    pub run: RunFlags,
    #[arg(long, visible_alias = "link", value_delimiter = ',', default_value = ALL_LINKS)]
    pub links: Vec<LinkKind>,
    #[arg(short = 'R', long = "reps", default_value_t = 1000)]
    pub reps: usize,
    #[arg(long, default_value_t = 2.0 / 3.0)]
    pub train_frac: f64,
    /// Raw per-replicate values as CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeKind {
    Equispaced,
    Random,
}

#[derive(Debug, Clone, Args)]
pub struct ConcordanceArgs {
    #[arg(long, visible_alias = "link", value_delimiter = ',', default_value = ALL_LINKS)]
    pub links: Vec<LinkKind>,
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true, default_values_t = [-15.0, 15.0])]
    pub interval: Vec<f64>,
    /// Number of points.
    #[arg(short = 's', long = "points", default_value_t = 10_000)]
    pub points: usize,
    #[arg(long, value_enum, default_value_t = ModeKind::Equispaced)]
    pub mode: ModeKind,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub gen: GenFlags,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output path (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CdfgridArgs {
    #[arg(long, visible_alias = "link", value_delimiter = ',', default_value = ALL_LINKS)]
    pub links: Vec<LinkKind>,
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true, default_values_t = [-5.0, 5.0])]
    pub interval: Vec<f64>,
    #[arg(short = 's', long = "points", default_value_t = 1001)]
    pub points: usize,
    /// Output path (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// How a completed command went.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// Output was written, but more replicates were invalid than allowed.
    TooManyInvalid,
}

pub fn run<W: Write>(cli: &Cli, out: &mut W) -> Result<Status> {
    match &cli.command {
        Command::Fit(a) => cmd_fit(a, out),
        Command::Structural(a) => cmd_structural(a, out),
        Command::Predictive(a) => cmd_replication(a, Experiment::Predictive, out),
        Command::Concordance(a) => cmd_concordance(a, out),
        Command::Ic(a) => cmd_replication(a, Experiment::Ic, out),
        Command::Gen(a) => cmd_gen(a, out),
        Command::Cdfgrid(a) => cmd_cdfgrid(a, out),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Argument(format!("cannot create {}: {e}", path.display())))
}

fn write_csv(path: &Path, header: &[String], rows: Vec<Vec<String>>) -> Result<()> {
    let mut w = create(path)?;
    write_table(&mut w, header, rows)?;
    w.flush()?;
    Ok(())
}

/// Right-aligned plain-text table with a left-aligned first column.
fn render<W: Write>(out: &mut W, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let cols = header.len();
    let width: Vec<usize> = (0..cols)
        .map(|j| {
            rows.iter()
                .map(|r| r[j].len())
                .chain(std::iter::once(header[j].len()))
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: &[String]| {
        cells
            .iter()
            .enumerate()
            .map(|(j, c)| {
                if j == 0 {
                    format!("{c:<w$}", w = width[j])
                } else {
                    format!("{c:>w$}", w = width[j])
                }
            })
            .collect::<Vec<_>>()
            .join("  ")
    };
    writeln!(out, "{}", line(header))?;
    for r in rows {
        writeln!(out, "{}", line(r))?;
    }
    Ok(())
}

fn fmt_fixed(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| "NA".into(), |x| format!("{x:.digits$}"))
}

fn summary_rows(summaries: &[SummaryStats], digits: usize) -> Vec<Vec<String>> {
    SummaryStats::LABELS
        .iter()
        .enumerate()
        .map(|(i, label)| {
            std::iter::once(label.to_string())
                .chain(summaries.iter().map(|s| fmt_fixed(s.values()[i], digits)))
                .collect()
        })
        .collect()
}

fn term_names(data: &Dataset, intercept: bool) -> Vec<String> {
    intercept
        .then(|| "(Intercept)".to_string())
        .into_iter()
        .chain(data.names().iter().cloned())
        .collect()
}

fn cmd_fit<W: Write>(a: &FitArgs, out: &mut W) -> Result<Status> {
    let data = a
        .input
        .load()?
        .ok_or_else(|| Error::Argument("fit needs --input".into()))?;
    if a.links.is_empty() {
        return Err(Error::Argument("no links given".into()));
    }
    let intercept = !a.no_intercept;
    let fits = a
        .links
        .iter()
        .map(|&link| {
            fit_mle(
                &ModelSpec::new(link, intercept),
                &data,
                &FitOptions::default(),
            )
        })
        .collect::<Result<Vec<FitResult>>>()?;

    let terms = term_names(&data, intercept);
    let ratio = fits.len() >= 2;
    let mut header = vec!["term".to_string()];
    header.extend(a.links.iter().map(|l| l.to_string()));
    if ratio {
        header.push(format!("ratio {}/{}", a.links[0], a.links[1]));
    }
    let coef_rows = |fmt: &dyn Fn(f64) -> String| -> Vec<Vec<String>> {
        terms
            .iter()
            .enumerate()
            .map(|(j, t)| {
                let mut row = vec![t.clone()];
                row.extend(fits.iter().map(|f| fmt(f.coefficients[j])));
                if ratio {
                    row.push(fmt(fits[0].coefficients[j] / fits[1].coefficients[j]));
                }
                row
            })
            .collect()
    };

    writeln!(out, "n = {}, p = {}", data.n(), data.p())?;
    render(out, &header, &coef_rows(&|v| format!("{v:.4}")))?;
    writeln!(out)?;
    let mut fit_header = vec!["".to_string()];
    fit_header.extend(a.links.iter().map(|l| l.to_string()));
    let stat_row = |label: &str, f: &dyn Fn(&FitResult) -> String| {
        std::iter::once(label.to_string())
            .chain(fits.iter().map(f))
            .collect::<Vec<_>>()
    };
    let stats = vec![
        stat_row("loglik", &|f| format!("{:.4}", f.loglik)),
        stat_row("AIC", &|f| format!("{:.4}", f.aic)),
        stat_row("BIC", &|f| format!("{:.4}", f.bic)),
        stat_row("iterations", &|f| f.iterations.to_string()),
        stat_row("converged", &|f| f.converged.to_string()),
    ];
    render(out, &fit_header, &stats)?;
    for f in &fits {
        for w in &f.warnings {
            writeln!(out, "warning ({}): {w:?}", f.spec.link)?;
        }
    }
    if let Some(path) = &a.out {
        write_csv(path, &header, coef_rows(&fmt_full))?;
    }
    Ok(Status::Ok)
}

fn invalid_status(invalid: usize, total: usize, max_frac: f64) -> Status {
    if invalid as f64 > max_frac * total as f64 {
        Status::TooManyInvalid
    } else {
        Status::Ok
    }
}

fn cmd_structural<W: Write>(a: &StructuralArgs, out: &mut W) -> Result<Status> {
    let cfg = a.gen.resolve(GenConfig::equispaced_cauchit())?;
    let report = structural_sim(&cfg, a.reps, a.inner, a.run.seed, a.run.jobs()?)?;

    if let Some(path) = &a.out {
        let header: Vec<String> = ["replicate", "theta", "tau", "rho", "r2", "dropped"]
            .map(String::from)
            .to_vec();
        let mut rows = report.rows.iter().peekable();
        let mut table = Vec::with_capacity(a.reps);
        for r in 0..a.reps {
            match rows.next_if(|row| row.replicate == r) {
                Some(row) => table.push(vec![
                    r.to_string(),
                    fmt_full(row.fit.theta),
                    fmt_full(row.fit.tau),
                    fmt_full(row.fit.rho),
                    fmt_full(row.fit.r2),
                    row.dropped.to_string(),
                ]),
                None => table.push(
                    std::iter::once(r.to_string())
                        .chain(std::iter::repeat_n("NA".to_string(), 5))
                        .collect(),
                ),
            }
        }
        write_csv(path, &header, table)?;
    }
    if let Some(path) = &a.pairs_out {
        let header: Vec<String> = ["replicate", "sample", "logit", "probit"]
            .map(String::from)
            .to_vec();
        let rows = report
            .rows
            .iter()
            .flat_map(|row| {
                row.pairs.iter().enumerate().map(move |(s, (l, p))| {
                    vec![
                        row.replicate.to_string(),
                        s.to_string(),
                        fmt_full(*l),
                        fmt_full(*p),
                    ]
                })
            })
            .collect();
        write_csv(path, &header, rows)?;
    }

    let thetas = report.theta_hats();
    let mut r2 = report.r_squared();
    r2.sort_by(f64::total_cmp);
    writeln!(
        out,
        "replicates: {} valid, {} invalid; failed fits dropped: {}",
        report.rows.len(),
        report.invalid.len(),
        report.dropped_fits()
    )?;
    match &report.theta_summary {
        Some(s) => {
            render(
                out,
                &["theta".into(), "value".into()],
                &summary_rows(std::slice::from_ref(s), 4),
            )?;
        }
        None => writeln!(out, "theta = {:.4}", thetas[0])?,
    }
    writeln!(
        out,
        "median R^2 = {:.4}",
        crate::stats::quantile_sorted(&r2, 0.5)
    )?;
    writeln!(
        out,
        "reference: sqrt(pi/8) = {:.4}, closed-form probit/logit = {:.4}",
        logistic_normal_scale(),
        ratio_identities().probit_over_logit
    )?;
    Ok(invalid_status(
        report.invalid.len(),
        a.reps,
        a.run.max_invalid_frac,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Experiment {
    Predictive,
    Ic,
}

fn cmd_replication<W: Write>(a: &ReplicationArgs, kind: Experiment, out: &mut W) -> Result<Status> {
    let data = match a.input.load()? {
        Some(d) => d,
        None => {
            let cfg = a.gen.resolve(GenConfig::gaussian_cauchit(500))?;
            generate_dataset(&cfg, a.run.seed, 0)?
        }
    };
    let plan = SplitPlan {
        train_fraction: a.train_frac,
        replications: a.reps,
        seed: a.run.seed,
    };
    let table = replicate_links(&data, &a.links, &plan, true, a.run.jobs()?)?;
    let invalid = table.invalid_replicates();
    let link_header =
        |prefix: &str| -> Vec<String> { a.links.iter().map(|l| format!("{prefix}{l}")).collect() };

    writeln!(
        out,
        "n = {}, p = {}, R = {}, train fraction = {:.4}, seed = {}",
        data.n(),
        data.p(),
        a.reps,
        a.train_frac,
        a.run.seed
    )?;
    match kind {
        Experiment::Predictive => {
            let report = predictive_from_table(table)?;
            if let Some(path) = &a.out {
                let mut header = vec!["replicate".to_string()];
                header.extend(link_header(""));
                let cols: Vec<Vec<Option<f64>>> =
                    (0..a.links.len()).map(|l| report.test_errors(l)).collect();
                let rows = (0..a.reps)
                    .map(|r| {
                        std::iter::once(r.to_string())
                            .chain(cols.iter().map(|c| fmt_opt(c[r])))
                            .collect()
                    })
                    .collect();
                write_csv(path, &header, rows)?;
            }
            let mut header = vec!["test error".to_string()];
            header.extend(link_header(""));
            render(out, &header, &summary_rows(&report.summaries, 2))?;
            failures(out, &report.table)?;
        }
        Experiment::Ic => {
            let report = ic_from_table(table)?;
            if let Some(path) = &a.out {
                let mut header = vec!["replicate".to_string()];
                header.extend(link_header("aic_"));
                header.extend(link_header("bic_"));
                let cols: Vec<Vec<Option<f64>>> = (0..a.links.len())
                    .map(|l| report.aic(l))
                    .chain((0..a.links.len()).map(|l| report.bic(l)))
                    .collect();
                let rows = (0..a.reps)
                    .map(|r| {
                        std::iter::once(r.to_string())
                            .chain(cols.iter().map(|c| fmt_opt(c[r])))
                            .collect()
                    })
                    .collect();
                write_csv(path, &header, rows)?;
            }
            let mut header = vec!["AIC".to_string()];
            header.extend(link_header(""));
            render(out, &header, &summary_rows(&report.aic_summaries, 2))?;
            writeln!(out)?;
            header[0] = "BIC".into();
            render(out, &header, &summary_rows(&report.bic_summaries, 2))?;
            failures(out, &report.table)?;
        }
    }
    Ok(invalid_status(invalid, a.reps, a.run.max_invalid_frac))
}

fn failures<W: Write>(out: &mut W, table: &crate::equiv::ReplicationTable) -> Result<()> {
    for (l, link) in table.links.iter().enumerate() {
        let f = table.failed(l);
        if f > 0 {
            writeln!(out, "{link}: {f} failed fits excluded")?;
        }
    }
    Ok(())
}

fn interval(v: &[f64]) -> Result<(f64, f64)> {
    match v {
        [a, b] => Ok((*a, *b)),
        _ => Err(Error::Argument("--interval takes two values".into())),
    }
}

fn cmd_concordance<W: Write>(a: &ConcordanceArgs, out: &mut W) -> Result<Status> {
    let (lo, hi) = interval(&a.interval)?;
    let mode = match a.mode {
        ModeKind::Equispaced => GridMode::Equispaced,
        ModeKind::Random => GridMode::UniformRandom { seed: a.seed },
    };
    let m = sign_disagreement_grid(&a.links, lo, hi, a.points, mode)?;
    let mut header = vec!["".to_string()];
    header.extend(m.links.iter().map(|l| l.to_string()));
    let rows = |fmt: &dyn Fn(f64) -> String| -> Vec<Vec<String>> {
        m.links
            .iter()
            .zip(&m.rates)
            .map(|(l, r)| {
                std::iter::once(l.to_string())
                    .chain(r.iter().map(|&v| fmt(v)))
                    .collect()
            })
            .collect()
    };
    writeln!(
        out,
        "{} points on [{lo}, {hi}], mode = {}",
        m.points,
        mode.name()
    )?;
    render(out, &header, &rows(&|v| format!("{v:.4}")))?;
    if let Some(path) = &a.out {
        header[0] = "link".into();
        write_csv(path, &header, rows(&fmt_full))?;
    }
    Ok(Status::Ok)
}

fn cmd_gen<W: Write>(a: &GenArgs, out: &mut W) -> Result<Status> {
    let cfg = a.gen.resolve(GenConfig::equispaced_cauchit())?;
    let data = generate_dataset(&cfg, a.seed, 0)?;
    match &a.out {
        Some(path) => {
            let mut w = create(path)?;
            write_dataset(&mut w, &data)?;
            w.flush()?;
        }
        None => write_dataset(out, &data)?,
    }
    Ok(Status::Ok)
}

fn cmd_cdfgrid<W: Write>(a: &CdfgridArgs, out: &mut W) -> Result<Status> {
    let (lo, hi) = interval(&a.interval)?;
    let points = crate::concord::grid_points(lo, hi, a.points, GridMode::Equispaced)?;
    let lam = logistic_normal_scale();
    let mut header = vec!["u".to_string()];
    header.extend(a.links.iter().map(|l| format!("density_{l}")));
    header.extend(a.links.iter().map(|l| format!("cdf_{l}")));
    header.push("cdf_probit_scaled".into());
    let rows = points
        .iter()
        .map(|&u| -> Result<Vec<String>> {
            let mut row = vec![fmt_full(u)];
            for l in &a.links {
                row.push(fmt_full(l.density(u)?));
            }
            for l in &a.links {
                row.push(fmt_full(l.cdf(u)?));
            }
            row.push(fmt_full(LinkKind::Probit.cdf(lam * u)?));
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    match &a.out {
        Some(path) => write_csv(path, &header, rows)?,
        None => write_table(out, &header, rows)?,
    }
    Ok(Status::Ok)
}
