mod plot;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lensrank::composite::{
    fit_linear_loocv, predict, select_diverse_views, sort_scored, LinearModel, MeasureConfig, Samples, ScoredPairs, ScoredView,
    SubsetStrategy,
};
use lensrank::dataset::{enumerate_pairs, make_view, AxisPair, CsvOptions, ExprPair, LabeledDataset, Provenance};
use lensrank::expr::{self, Expr};
use lensrank::parallel::Execution;
use lensrank::report::{self, ExprRow, ScoreRow, SearchRow, SelectionRow};
use lensrank::search::{search_projections, SearchConfig};

/// Rank 2D projections of labelled data by predicted readability.
#[derive(Parser)]
#[command(name = "lensrank", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the ten measures and the predicted rating for each view.
    Measures {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        views: ViewArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        measure: MeasureArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score every view and list the best ones first.
    Rank {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        views: ViewArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        measure: MeasureArgs,
        #[arg(long, default_value_t = 10)]
        top: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pick views that differ in which measures they score well on.
    Select {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        views: ViewArgs,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Equi-width bins over [0, 1].
        #[arg(long, default_value_t = 5)]
        bins: usize,
        #[arg(long, default_value_t = 2)]
        per_bin: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Complexity attributes and semantic rating of expressions.
    ExprScore {
        exprs: Vec<String>,
        #[arg(long)]
        expr_file: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw one view as an SVG scatter plot.
    Render {
        #[command(flatten)]
        data: DataArgs,
        /// Axis pair as `x:y`, by column index or name.
        #[arg(long, conflicts_with_all = ["x", "y"])]
        pairs: Option<String>,
        #[arg(long, requires = "y")]
        x: Option<String>,
        #[arg(long, requires = "x")]
        y: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Search for expression axes that make a readable view.
    Search {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        measure: MeasureArgs,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = 5)]
        beam: usize,
        #[arg(long, default_value_t = 7)]
        max_size: usize,
        #[arg(long, default_value_t = 10)]
        top: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit a linear model with leave-one-out diagnostics.
    Fit {
        samples: PathBuf,
        #[arg(long)]
        target: String,
        /// Drop attributes greedily while LOOCV error does not grow.
        #[arg(long)]
        greedy: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct DataArgs {
    data: PathBuf,
    #[arg(long, default_value = "class")]
    label_col: String,
    /// Skip rows with empty or non-numeric cells.
    #[arg(long)]
    drop_incomplete: bool,
}

#[derive(Args)]
struct ViewArgs {
    /// Comma-separated `x:y` pairs by column index or name; default is every pair.
    #[arg(long, conflicts_with = "expr_file")]
    pairs: Option<String>,
    /// One expression per line; views are all pairs of listed expressions.
    #[arg(long)]
    expr_file: Option<PathBuf>,
}

#[derive(Args)]
struct ModelArgs {
    /// `builtin` or a model file.
    #[arg(long, default_value = "builtin")]
    model: String,
}

#[derive(Args)]
struct MeasureArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Histogram grid size per axis.
    #[arg(long, default_value_t = 100)]
    bins: usize,
}

impl MeasureArgs {
    fn config(&self) -> Result<MeasureConfig, Failure> {
        if self.bins == 0 {
            return Err(Failure::User("--bins must be at least 1".into()));
        }
        Ok(MeasureConfig {
            seed: self.seed,
            bins: self.bins,
            ..MeasureConfig::default()
        })
    }
}

enum Failure {
    User(String),
    Internal(String),
}

impl From<lensrank::Error> for Failure {
    fn from(e: lensrank::Error) -> Self {
        Failure::User(e.to_string())
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> Failure + '_ {
    move |e| Failure::User(format!("{}: {e}", path.display()))
}

fn load(d: &DataArgs) -> Result<LabeledDataset, Failure> {
    let opts = CsvOptions {
        drop_incomplete: d.drop_incomplete,
    };
    Ok(LabeledDataset::load_csv(&d.data, &d.label_col, opts)?)
}

fn column(ds: &LabeledDataset, token: &str) -> Result<usize, Failure> {
    let token = token.trim();
    if let Some(i) = ds.feature_index(token) {
        return Ok(i);
    }
    match token.parse::<usize>() {
        Ok(i) if i < ds.n_features() => Ok(i),
        Ok(i) => Err(Failure::User(format!(
            "column {i} out of range for {} features",
            ds.n_features()
        ))),
        Err(_) => Err(Failure::User(format!("no feature column named `{token}`"))),
    }
}

fn parse_pairs(ds: &LabeledDataset, spec: &str) -> Result<Vec<AxisPair>, Failure> {
    spec.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|item| {
            let (a, b) = item
                .split_once(':')
                .ok_or_else(|| Failure::User(format!("pair `{item}` is not of the form x:y")))?;
            let (x, y) = (column(ds, a)?, column(ds, b)?);
            if x == y {
                return Err(Failure::User(format!("pair `{item}` uses the same column twice")));
            }
            Ok(AxisPair { x, y })
        })
        .collect()
}

fn read_expr_file(path: &Path) -> Result<Vec<Expr>, Failure> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let e = expr::parse(line).map_err(|e| Failure::User(format!("{}:{}: {e}", path.display(), i + 1)))?;
        out.push(e);
    }
    Ok(out)
}

fn provenances(ds: &LabeledDataset, v: &ViewArgs) -> Result<Vec<Provenance>, Failure> {
    if let Some(spec) = &v.pairs {
        let pairs = parse_pairs(ds, spec)?;
        if pairs.is_empty() {
            return Err(Failure::User("--pairs lists no pairs".into()));
        }
        return Ok(pairs.into_iter().map(Provenance::Axes).collect());
    }
    if let Some(path) = &v.expr_file {
        let exprs = read_expr_file(path)?;
        if exprs.len() < 2 {
            return Err(Failure::User(format!("{}: need at least 2 expressions", path.display())));
        }
        let mut out = Vec::new();
        for i in 0..exprs.len() {
            for j in i + 1..exprs.len() {
                out.push(Provenance::Exprs(ExprPair {
                    x: exprs[i].clone(),
                    y: exprs[j].clone(),
                }));
            }
        }
        return Ok(out);
    }
    Ok(enumerate_pairs(ds)?.into_iter().map(Provenance::Axes).collect())
}

fn load_model(m: &ModelArgs) -> Result<LinearModel, Failure> {
    if m.model == "builtin" {
        return Ok(LinearModel::published_visual());
    }
    let path = Path::new(&m.model);
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    LinearModel::from_text(&text).map_err(|e| Failure::User(format!("{}: {e}", path.display())))
}

fn emit(out: &Option<PathBuf>, bytes: &[u8]) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, bytes).map_err(io_err(p)),
        None => io::stdout()
            .write_all(bytes)
            .map_err(|e| Failure::Internal(format!("stdout: {e}"))),
    }
}

fn score(
    ds: &LabeledDataset,
    views: &ViewArgs,
    cfg: &MeasureConfig,
) -> Result<ScoredPairs, Failure> {
    let provs = provenances(ds, views)?;
    let (scored, skipped) = lensrank::composite::score_provenances(ds, &provs, cfg, Execution::default())?;
    for (p, why) in &skipped {
        eprintln!("skipped view {}: {why}", view_label(p, ds));
    }
    if scored.is_empty() {
        return Err(Failure::User("no view could be built".into()));
    }
    Ok(scored)
}

fn view_label(p: &Provenance, ds: &LabeledDataset) -> String {
    let (x, y) = p.labels(ds.feature_names());
    format!("({x}, {y})")
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Measures {
            data,
            views,
            model,
            measure,
            out,
        } => {
            let ds = load(&data)?;
            let model = load_model(&model)?;
            let scored = score(&ds, &views, &measure.config()?)?;
            let rows: Vec<ScoreRow> = scored
                .iter()
                .map(|(p, mv)| {
                    let (x, y) = p.labels(ds.feature_names());
                    ScoreRow::new(x, y, mv, predict(&model, mv).ok())
                })
                .collect();
            let mut buf = Vec::new();
            report::write_scores(&mut buf, &rows)?;
            emit(&out, &buf)
        }
        Command::Rank {
            data,
            views,
            model,
            measure,
            top,
            out,
        } => {
            let ds = load(&data)?;
            let model = load_model(&model)?;
            let scored = score(&ds, &views, &measure.config()?)?;
            let mut ranked = scored
                .into_iter()
                .map(|(provenance, measures)| {
                    let phr = predict(&model, &measures)?;
                    Ok(ScoredView {
                        provenance,
                        measures,
                        phr,
                    })
                })
                .collect::<Result<Vec<_>, lensrank::Error>>()?;
            sort_scored(&mut ranked);
            ranked.truncate(top);
            let rows: Vec<ScoreRow> = ranked
                .iter()
                .map(|v| {
                    let (x, y) = v.provenance.labels(ds.feature_names());
                    ScoreRow::new(x, y, &v.measures, Some(v.phr))
                })
                .collect();
            let mut buf = Vec::new();
            report::write_scores(&mut buf, &rows)?;
            emit(&out, &buf)
        }
        Command::Select {
            data,
            views,
            seed,
            bins,
            per_bin,
            out,
        } => {
            let ds = load(&data)?;
            let cfg = MeasureConfig {
                seed,
                ..MeasureConfig::default()
            };
            let scored = score(&ds, &views, &cfg)?;
            let mvs: Vec<_> = scored.iter().map(|(_, mv)| mv.clone()).collect();
            let picks = select_diverse_views(&mvs, bins, per_bin)?;
            let rows: Vec<SelectionRow> = picks
                .iter()
                .map(|s| {
                    let (x, y) = scored[s.view].0.labels(ds.feature_names());
                    SelectionRow {
                        bin: s.bin,
                        x,
                        y,
                        count: s.count,
                    }
                })
                .collect();
            let mut buf = Vec::new();
            report::write_selection(&mut buf, &rows)?;
            emit(&out, &buf)
        }
        Command::ExprScore { exprs, expr_file, out } => {
            let mut parsed = Vec::new();
            for text in &exprs {
                parsed.push(expr::parse(text).map_err(|e| Failure::User(format!("`{text}`: {e}")))?);
            }
            if let Some(p) = &expr_file {
                parsed.extend(read_expr_file(p)?);
            }
            if parsed.is_empty() {
                return Err(Failure::User("no expressions given".into()));
            }
            let rows: Vec<ExprRow> = parsed
                .iter()
                .map(|e| {
                    let m = expr::metrics(e);
                    ExprRow {
                        expression: expr::render_linearized(e),
                        phr: expr::phr_semantic(&m),
                        metrics: m,
                    }
                })
                .collect();
            let mut buf = Vec::new();
            report::write_expr_scores(&mut buf, &rows)?;
            emit(&out, &buf)
        }
        Command::Render { data, pairs, x, y, out } => {
            let ds = load(&data)?;
            let prov = match (pairs, x, y) {
                (Some(spec), _, _) => {
                    let pairs = parse_pairs(&ds, &spec)?;
                    match pairs.as_slice() {
                        [p] => Provenance::Axes(*p),
                        _ => return Err(Failure::User("render takes exactly one pair".into())),
                    }
                }
                (None, Some(x), Some(y)) => {
                    let parse = |t: &str| expr::parse(t).map_err(|e| Failure::User(format!("`{t}`: {e}")));
                    Provenance::Exprs(ExprPair {
                        x: parse(&x)?,
                        y: parse(&y)?,
                    })
                }
                _ => return Err(Failure::User("give --pairs x:y or both --x and --y".into())),
            };
            let view = make_view(&ds, &prov)?;
            let (xl, yl) = prov.labels(ds.feature_names());
            let svg = plot::render_svg(&view, &xl, &yl, ds.class_names());
            fs::write(&out, svg).map_err(io_err(&out))
        }
        Command::Search {
            data,
            measure,
            alpha,
            beam,
            max_size,
            top,
            out,
        } => {
            let ds = load(&data)?;
            let mc = measure.config()?;
            let cfg = SearchConfig {
                alpha,
                beam_width: beam,
                max_total_size: max_size,
                seed: mc.seed,
                bins: mc.bins,
                ..SearchConfig::default()
            };
            let outcome = search_projections(&ds, &cfg, Execution::default())?;
            if let Some(why) = &outcome.empty_reason {
                return Err(Failure::User(format!("search found no view: {why}")));
            }
            if !outcome.rejected.is_empty() {
                eprintln!("rejected {} candidate views", outcome.rejected.len());
            }
            let mut rows = SearchRow::from_results(&outcome.results);
            rows.truncate(top);
            let mut buf = Vec::new();
            report::write_search(&mut buf, &rows)?;
            emit(&out, &buf)
        }
        Command::Fit {
            samples,
            target,
            greedy,
            out,
        } => {
            let file = fs::File::open(&samples).map_err(io_err(&samples))?;
            let s = Samples::read_csv(file, &target)?;
            let strategy = if greedy {
                SubsetStrategy::GreedyBackward
            } else {
                SubsetStrategy::All
            };
            let model = fit_linear_loocv(&s, strategy)?;
            let d = model
                .diagnostics
                .as_ref()
                .ok_or_else(|| Failure::Internal("fit returned no diagnostics".into()))?;
            let opt = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{v:?}"));
            let mut text = String::new();
            text.push_str(&format!("# n={} p={} dof={}\n", d.n, d.p, d.dof));
            text.push_str(&format!("# r2={:?} adj_r2={}\n", d.r2, opt(d.adj_r2)));
            text.push_str(&format!("# sse={:?} rmse={} loocv_sse={}\n", d.sse, opt(d.rmse), opt(d.loocv_sse)));
            text.push_str(&format!("# f={} p_value={}\n", opt(d.f_stat), opt(d.p_value)));
            text.push_str(&model.to_text());
            emit(&out, text.as_bytes())
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("LENSRANK_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::User(format!("LENSRANK_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Internal(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = std::panic::catch_unwind(|| configure_threads().and_then(|_| run(cli)));
    match result {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(Failure::User(msg))) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Ok(Err(Failure::Internal(msg))) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(2)
        }
        Err(_) => ExitCode::from(2),
    }
}
