//! Beam search over pairs of projection expressions, scored by a weighted
//! sum of the visual and semantic predicted ratings.

use std::collections::BTreeSet;

use crate::classifiers::DEFAULT_SEED;
use crate::composite::{measure_view, normalize_collection, phr_visual, MeasureConfig, MeasureVector};
use crate::dataset::{make_view_with, Bindings, ExprPair, LabeledDataset, Provenance};
use crate::error::{Error, Result};
use crate::expr::{metrics, phr_semantic, render_linearized, BinOp, Expr, Func};
use crate::parallel::Execution;

/// One way of growing an expression by a single operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowOp {
    /// `e op v` for every bound variable `v`.
    Binary(BinOp),
    /// `f(e)`.
    Unary(Func),
    /// `e^2`.
    Square,
}

pub const DEFAULT_GROW_OPS: [GrowOp; 6] = [
    GrowOp::Binary(BinOp::Add),
    GrowOp::Binary(BinOp::Sub),
    GrowOp::Binary(BinOp::Mul),
    GrowOp::Binary(BinOp::Div),
    GrowOp::Unary(Func::Log),
    GrowOp::Unary(Func::Sqrt),
];

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    /// Weight of the visual rating; `1 - alpha` goes to the semantic one.
    pub alpha: f64,
    pub beam_width: usize,
    pub max_total_size: usize,
    /// Variables to grow from. Empty means every feature under its own name.
    pub bindings: Bindings,
    pub seed: u64,
    pub bins: usize,
    pub ops: Vec<GrowOp>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            beam_width: 5,
            max_total_size: 7,
            bindings: Bindings::default(),
            seed: DEFAULT_SEED,
            bins: crate::visual::DEFAULT_BINS,
            ops: DEFAULT_GROW_OPS.to_vec(),
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::Config(format!("alpha {} is outside [0, 1]", self.alpha)));
        }
        if self.beam_width == 0 {
            return Err(Error::Config("beam width must be at least 1".into()));
        }
        if self.max_total_size < 2 {
            return Err(Error::Config("max total size must be at least 2".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub pair: ExprPair,
    pub visual: f64,
    /// Mean semantic rating of the two axis expressions.
    pub semantic: f64,
    pub combined: f64,
    pub measures: MeasureVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    /// Ascending by combined score.
    pub results: Vec<SearchResult>,
    /// Candidate pairs whose view could not be built, with the reason.
    pub rejected: Vec<(String, String)>,
    /// Set when no candidate could be scored.
    pub empty_reason: Option<String>,
}

/// `alpha * visual + (1 - alpha) * semantic`.
pub fn combine(alpha: f64, visual: f64, semantic: f64) -> f64 {
    alpha * visual + (1.0 - alpha) * semantic
}

pub fn semantic_score(pair: &ExprPair) -> f64 {
    (phr_semantic(&metrics(&pair.x)) + phr_semantic(&metrics(&pair.y))) / 2.0
}

fn variables(ds: &LabeledDataset, cfg: &SearchConfig) -> Result<Vec<(String, usize)>> {
    let bindings = if cfg.bindings.0.is_empty() { ds.bindings() } else { cfg.bindings.clone() };
    let mut vars = Vec::new();
    for (name, &col) in &bindings.0 {
        if col >= ds.n_features() {
            return Err(Error::AxisOutOfRange {
                index: col,
                n_features: ds.n_features(),
            });
        }
        // only names the expression grammar reads back as a variable
        if crate::expr::parse(name).ok() == Some(Expr::var(name.as_str())) {
            vars.push((name.clone(), col));
        } else if !cfg.bindings.0.is_empty() {
            return Err(Error::UnboundVariable(name.clone()));
        }
    }
    vars.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
    if vars.len() < 2 {
        return Err(Error::Config(format!(
            "search needs at least two usable variables, found {}",
            vars.len()
        )));
    }
    Ok(vars)
}

fn grow(e: &Expr, vars: &[(String, usize)], ops: &[GrowOp], max: usize) -> Vec<Expr> {
    let size = metrics(e).total_size;
    let mut out = Vec::new();
    for op in ops {
        match *op {
            GrowOp::Binary(b) if size + 2 <= max => {
                for (v, _) in vars {
                    out.push(Expr::binary(b, e.clone(), Expr::var(v.as_str())));
                }
            }
            GrowOp::Unary(f) if size < max => out.push(Expr::unary(f, e.clone())),
            GrowOp::Square if size < max => out.push(Expr::pow(e.clone(), 2)),
            _ => {}
        }
    }
    out
}

/// Text form with the operands of `+` and `*` in sorted order, so that
/// `x * y` and `y * x` share one key.
fn canonical_text(e: &Expr) -> String {
    match e {
        Expr::Var(v) => v.clone(),
        Expr::Lit(l) => format!("{l:?}"),
        Expr::Unary { func, arg } => format!("{}({})", func.name(), canonical_text(arg)),
        Expr::Pow { base, exponent } => format!("({})^{exponent}", canonical_text(base)),
        Expr::Binary { op, lhs, rhs } => {
            let (mut a, mut b) = (canonical_text(lhs), canonical_text(rhs));
            if matches!(op, BinOp::Add | BinOp::Mul) && b < a {
                std::mem::swap(&mut a, &mut b);
            }
            format!("({a}{}{b})", op.symbol())
        }
    }
}

fn key(pair: &ExprPair) -> (String, String) {
    let (a, b) = (canonical_text(&pair.x), canonical_text(&pair.y));
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

struct Evaluated {
    pair: ExprPair,
    measures: MeasureVector,
    semantic: f64,
}

fn rank(pool: &[Evaluated], alpha: f64) -> Result<Vec<SearchResult>> {
    let mut vectors: Vec<MeasureVector> = pool.iter().map(|e| e.measures.clone()).collect();
    normalize_collection(&mut vectors);
    let mut out = pool
        .iter()
        .zip(vectors)
        .map(|(e, mv)| {
            let visual = phr_visual(&mv)?;
            Ok(SearchResult {
                pair: e.pair.clone(),
                visual,
                semantic: e.semantic,
                combined: combine(alpha, visual, e.semantic),
                measures: mv,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| {
        a.combined
            .total_cmp(&b.combined)
            .then(a.semantic.total_cmp(&b.semantic))
            .then_with(|| key(&a.pair).cmp(&key(&b.pair)))
    });
    Ok(out)
}

/// Beam search from all pairs of distinct single variables. Each generation
/// grows one axis of every beam member by one operator; the best
/// `beam_width` new pairs seed the next generation. Davies-Bouldin and Dunn
/// are normalized over every pair evaluated so far.
pub fn search_projections(ds: &LabeledDataset, cfg: &SearchConfig, exec: Execution) -> Result<SearchOutcome> {
    cfg.validate()?;
    let vars = variables(ds, cfg)?;
    let mut bindings = Bindings::default();
    for (name, col) in &vars {
        bindings.bind(name.clone(), *col);
    }
    let mcfg = MeasureConfig {
        seed: cfg.seed,
        bins: cfg.bins,
        ..MeasureConfig::default()
    };

    let mut seen = BTreeSet::new();
    let mut pool: Vec<Evaluated> = Vec::new();
    let mut rejected = Vec::new();
    let mut frontier: Vec<ExprPair> = Vec::new();
    for (i, (a, _)) in vars.iter().enumerate() {
        for (b, _) in &vars[i + 1..] {
            frontier.push(ExprPair {
                x: Expr::var(a.as_str()),
                y: Expr::var(b.as_str()),
            });
        }
    }

    while !frontier.is_empty() {
        // a pair with the same expression on both axes is a line, not a view
        let fresh: Vec<ExprPair> = frontier
            .into_iter()
            .filter(|p| {
                let k = key(p);
                k.0 != k.1 && seen.insert(k)
            })
            .collect();
        let scored = exec.map(&fresh, |pair| {
            let view = make_view_with(ds, &Provenance::Exprs(pair.clone()), &bindings)?;
            measure_view(&view, &mcfg)
        });
        let mut generation = Vec::new();
        for (pair, res) in fresh.into_iter().zip(scored) {
            match res {
                Ok(measures) => {
                    let semantic = semantic_score(&pair);
                    generation.push(pool.len());
                    pool.push(Evaluated {
                        pair,
                        measures,
                        semantic,
                    });
                }
                Err(e @ (Error::DegenerateView(_) | Error::NonFinite { .. })) => {
                    let (x, y) = (render_linearized(&pair.x), render_linearized(&pair.y));
                    rejected.push((format!("{x} | {y}"), e.to_string()));
                }
                Err(e) => return Err(e),
            }
        }
        if generation.is_empty() || pool.len() < 2 {
            break;
        }
        let ranked = rank(&pool, cfg.alpha)?;
        let fresh_keys: BTreeSet<(String, String)> = generation.iter().map(|&i| key(&pool[i].pair)).collect();
        let beam: Vec<ExprPair> = ranked
            .iter()
            .filter(|r| fresh_keys.contains(&key(&r.pair)))
            .take(cfg.beam_width)
            .map(|r| r.pair.clone())
            .collect();
        frontier = Vec::new();
        for pair in &beam {
            for x in grow(&pair.x, &vars, &cfg.ops, cfg.max_total_size) {
                frontier.push(ExprPair { x, y: pair.y.clone() });
            }
            for y in grow(&pair.y, &vars, &cfg.ops, cfg.max_total_size) {
                frontier.push(ExprPair { x: pair.x.clone(), y });
            }
        }
    }

    if pool.len() < 2 {
        let reason = if pool.is_empty() {
            "no candidate pair produced a valid non-degenerate view".to_string()
        } else {
            "only one valid view; visual scores need at least two for normalization".to_string()
        };
        return Ok(SearchOutcome {
            results: Vec::new(),
            rejected,
            empty_reason: Some(reason),
        });
    }
    Ok(SearchOutcome {
        results: rank(&pool, cfg.alpha)?,
        rejected,
        empty_reason: None,
    })
}
