//! The ten-measure vector of a view, the published composite model, view
//! ranking and diverse-view selection.

mod regression;

pub use regression::{
    fit_linear_loocv, loocv_sse, regression_report, Diagnostics, LinearModel, Samples, SubsetStrategy,
};

use std::fmt;

use crate::classifiers::{self, FoldPlan, DEFAULT_FOLDS, DEFAULT_SEED};
use crate::cluster::{self, RawIndex};
use crate::dataset::{enumerate_pairs, make_view, LabeledDataset, Provenance, View2D};
use crate::error::{Error, Result};
use crate::parallel::Execution;
use crate::visual::{self, DEFAULT_BINS};

/// Intercept and `(measure, coefficient)` terms of the published visual model.
pub const VISUAL_MODEL: (f64, [(&str, f64); 6]) = (
    0.3606,
    [
        ("j48", -0.7772),
        ("smo", 0.8155),
        ("i_c", -0.4305),
        ("i_db", -0.4588),
        ("ccm", 0.6586),
        ("hdm2d", 0.3285),
    ],
);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Measure {
    Knn,
    J48,
    NaiveBayes,
    Smo,
    CIndex,
    DaviesBouldin,
    Dunn,
    Lda,
    Ccm,
    Hdm2d,
}

impl Measure {
    pub const ALL: [Measure; 10] = [
        Measure::Knn,
        Measure::J48,
        Measure::NaiveBayes,
        Measure::Smo,
        Measure::CIndex,
        Measure::DaviesBouldin,
        Measure::Dunn,
        Measure::Lda,
        Measure::Ccm,
        Measure::Hdm2d,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Knn => "knn",
            Measure::J48 => "j48",
            Measure::NaiveBayes => "nb",
            Measure::Smo => "smo",
            Measure::CIndex => "i_c",
            Measure::DaviesBouldin => "i_db",
            Measure::Dunn => "i_dunn",
            Measure::Lda => "i_lda",
            Measure::Ccm => "ccm",
            Measure::Hdm2d => "hdm2d",
        }
    }

    pub fn from_name(name: &str) -> Option<Measure> {
        Measure::ALL.into_iter().find(|m| m.name() == name)
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Status of one measure slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MeasureFlag {
    #[default]
    Ok,
    /// The defining quantities collapsed; the value is the documented default.
    Degenerate,
    /// Collection-normalized measure scored without a collection.
    NeedsCollection,
    /// The SMO solver hit its iteration budget.
    Unconverged,
}

impl MeasureFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            MeasureFlag::Ok => "ok",
            MeasureFlag::Degenerate => "degenerate",
            MeasureFlag::NeedsCollection => "needs-collection",
            MeasureFlag::Unconverged => "unconverged",
        }
    }

    pub fn parse(s: &str) -> Option<MeasureFlag> {
        [
            MeasureFlag::Ok,
            MeasureFlag::Degenerate,
            MeasureFlag::NeedsCollection,
            MeasureFlag::Unconverged,
        ]
        .into_iter()
        .find(|f| f.as_str() == s)
    }
}

/// The ten measures of one view in `[0, 1]`. All are smaller-is-better
/// except `i_db`, which keeps the orientation of its min-ratio formula.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureVector {
    /// Indexed in [`Measure::ALL`] order; `None` only for
    /// [`MeasureFlag::NeedsCollection`] slots.
    pub values: [Option<f64>; 10],
    pub flags: [MeasureFlag; 10],
    /// Raw larger-is-better Davies-Bouldin and Dunn values.
    pub raw_db: RawIndex,
    pub raw_dunn: RawIndex,
}

impl MeasureVector {
    pub fn get(&self, m: Measure) -> Option<f64> {
        self.values[m.index()]
    }

    pub fn flag(&self, m: Measure) -> MeasureFlag {
        self.flags[m.index()]
    }

    pub fn by_name(&self, name: &str) -> Option<f64> {
        Measure::from_name(name).and_then(|m| self.get(m))
    }

    pub fn any_degenerate(&self) -> bool {
        self.flags.contains(&MeasureFlag::Degenerate)
    }

    fn set(&mut self, m: Measure, value: f64, degenerate: bool) {
        self.values[m.index()] = Some(value);
        self.flags[m.index()] = if degenerate { MeasureFlag::Degenerate } else { MeasureFlag::Ok };
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeasureConfig {
    pub seed: u64,
    pub folds: usize,
    pub bins: usize,
}

impl Default for MeasureConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            folds: DEFAULT_FOLDS,
            bins: DEFAULT_BINS,
        }
    }
}

/// All ten measures of one view. Davies-Bouldin and Dunn are left
/// unnormalized and flagged until [`normalize_collection`] runs. Views with
/// fewer points than folds are cross-validated with one fold per point.
pub fn measure_view(view: &View2D, cfg: &MeasureConfig) -> Result<MeasureVector> {
    let view = view.canonical();
    let folds = cfg.folds.min(view.len());
    let plan = FoldPlan::stratified(&view, folds, cfg.seed)?;
    // classifiers still run on a collapsed axis; their slots carry the flag
    let trainable = View2D {
        degenerate: false,
        ..view.clone()
    };
    let mut mv = MeasureVector {
        values: [None; 10],
        flags: [MeasureFlag::Ok; 10],
        raw_db: cluster::davies_bouldin(&view),
        raw_dunn: cluster::dunn(&view),
    };
    let degenerate = view.degenerate;
    for (m, score) in [
        (Measure::Knn, classifiers::knn_score(&trainable, &plan)?),
        (Measure::J48, classifiers::j48_score(&trainable, &plan)?),
        (Measure::NaiveBayes, classifiers::nb_score(&trainable, &plan)?),
        (Measure::Smo, classifiers::smo_score(&trainable, &plan)?),
    ] {
        mv.set(m, score.error_rate, degenerate);
        if !score.converged && !degenerate {
            mv.flags[m.index()] = MeasureFlag::Unconverged;
        }
    }
    let c = cluster::c_index(&view);
    mv.set(Measure::CIndex, c.value, c.degenerate || degenerate);
    mv.flags[Measure::DaviesBouldin.index()] = MeasureFlag::NeedsCollection;
    mv.flags[Measure::Dunn.index()] = MeasureFlag::NeedsCollection;
    let lda = visual::lda_index(&view);
    mv.set(Measure::Lda, lda.value, lda.degenerate || degenerate);
    let ccm = visual::ccm(&view);
    mv.set(Measure::Ccm, ccm.value, ccm.degenerate || degenerate);
    let hdm = visual::hdm2d(&view, cfg.bins);
    mv.set(Measure::Hdm2d, hdm.value, hdm.degenerate || degenerate);
    Ok(mv)
}

/// Normalizes Davies-Bouldin (plain min-max) and Dunn (inverted min-max)
/// across `vectors`. A single vector keeps its needs-collection flags.
pub fn normalize_collection(vectors: &mut [MeasureVector]) {
    if vectors.len() < 2 {
        return;
    }
    let db = cluster::collection_minmax(&vectors.iter().map(|v| v.raw_db.value).collect::<Vec<_>>());
    let dunn = cluster::collection_badness(&vectors.iter().map(|v| v.raw_dunn.value).collect::<Vec<_>>());
    for ((v, b), d) in vectors.iter_mut().zip(db).zip(dunn) {
        let (db_flag, dunn_flag) = (v.raw_db.degenerate, v.raw_dunn.degenerate);
        v.set(Measure::DaviesBouldin, b, db_flag);
        v.set(Measure::Dunn, d, dunn_flag);
    }
}

/// Scores every view and normalizes across the whole set.
pub fn measure_collection(views: &[View2D], cfg: &MeasureConfig, exec: Execution) -> Result<Vec<MeasureVector>> {
    let mut out = exec.map(views, |v| measure_view(v, cfg)).into_iter().collect::<Result<Vec<_>>>()?;
    normalize_collection(&mut out);
    Ok(out)
}

/// Measures of `view`, with Davies-Bouldin and Dunn normalized against
/// `view` together with `collection`.
pub fn measure_all(view: &View2D, collection: &[View2D], cfg: &MeasureConfig) -> Result<MeasureVector> {
    let mut mv = measure_view(view, cfg)?;
    if collection.is_empty() {
        return Ok(mv);
    }
    let mut raw_db = vec![mv.raw_db.value];
    let mut raw_dunn = vec![mv.raw_dunn.value];
    for v in collection {
        let v = v.canonical();
        raw_db.push(cluster::davies_bouldin(&v).value);
        raw_dunn.push(cluster::dunn(&v).value);
    }
    let (db_flag, dunn_flag) = (mv.raw_db.degenerate, mv.raw_dunn.degenerate);
    mv.set(Measure::DaviesBouldin, cluster::collection_minmax(&raw_db)[0], db_flag);
    mv.set(Measure::Dunn, cluster::collection_badness(&raw_dunn)[0], dunn_flag);
    Ok(mv)
}

/// The published visual model applied to a measure vector.
pub fn phr_visual(mv: &MeasureVector) -> Result<f64> {
    let (intercept, terms) = VISUAL_MODEL;
    let mut acc = intercept;
    for (name, coef) in terms {
        let m = Measure::from_name(name).expect("model terms are measure names");
        let v = mv.get(m).ok_or_else(|| Error::MissingMeasure(missing_reason(mv, m)))?;
        acc += coef * v;
    }
    Ok(acc)
}

fn missing_reason(mv: &MeasureVector, m: Measure) -> String {
    match mv.flag(m) {
        MeasureFlag::NeedsCollection => format!("{m} (needs a collection of at least two views)"),
        _ => m.name().to_string(),
    }
}

/// Applies any linear model whose terms name measures.
pub fn predict(model: &LinearModel, mv: &MeasureVector) -> Result<f64> {
    let mut acc = model.intercept;
    for (name, coef) in &model.terms {
        let m = Measure::from_name(name).ok_or_else(|| Error::MissingMeasure(name.clone()))?;
        let v = mv.get(m).ok_or_else(|| Error::MissingMeasure(missing_reason(mv, m)))?;
        acc += coef * v;
    }
    Ok(acc)
}

/// One view chosen for a value bin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Selection {
    pub bin: usize,
    pub view: usize,
    /// Measures of the view falling in the bin.
    pub count: usize,
}

/// Number of `mv`'s present measures whose value falls in bin `bin` of
/// `bins` equal-width bins over `[0, 1]`.
pub fn bin_count(mv: &MeasureVector, bin: usize, bins: usize) -> usize {
    mv.values
        .iter()
        .flatten()
        .filter(|&&v| (0.0..=1.0).contains(&v) && visual::bin_of(v, bins) == bin)
        .count()
}

/// For each bin in turn, picks up to `per_bin` not yet chosen views with the
/// most measures in that bin (lower index first on ties, views with no
/// measure in the bin skipped).
pub fn select_diverse_views(scored: &[MeasureVector], bins: usize, per_bin: usize) -> Result<Vec<Selection>> {
    if bins == 0 || per_bin == 0 {
        return Err(Error::Config("bins and per-bin must be positive".into()));
    }
    let needed = bins * per_bin;
    if scored.len() < needed {
        return Err(Error::InsufficientViews {
            needed,
            available: scored.len(),
        });
    }
    let mut taken = vec![false; scored.len()];
    let mut out = Vec::new();
    for bin in 0..bins {
        let mut cands: Vec<(usize, usize)> = scored
            .iter()
            .enumerate()
            .filter(|&(i, _)| !taken[i])
            .map(|(i, mv)| (i, bin_count(mv, bin, bins)))
            .filter(|&(_, c)| c > 0)
            .collect();
        cands.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        for &(view, count) in cands.iter().take(per_bin) {
            taken[view] = true;
            out.push(Selection { bin, view, count });
        }
    }
    Ok(out)
}

/// Views that were scored, in request order.
pub type ScoredPairs = Vec<(Provenance, MeasureVector)>;
/// Views that could not be built, with the reason.
pub type SkippedViews = Vec<(Provenance, String)>;

/// A view with its measures and predicted rating.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredView {
    pub provenance: Provenance,
    pub measures: MeasureVector,
    pub phr: f64,
}

/// Measures every axis pair of `ds`, skipping pairs with a constant axis.
/// Returns the scored views in pair order together with the skipped pairs.
pub fn score_pairs(
    ds: &LabeledDataset,
    cfg: &MeasureConfig,
    exec: Execution,
) -> Result<(ScoredPairs, SkippedViews)> {
    let provs: Vec<Provenance> = enumerate_pairs(ds)?.into_iter().map(Provenance::Axes).collect();
    score_provenances(ds, &provs, cfg, exec)
}

/// As [`score_pairs`] for arbitrary provenances.
pub fn score_provenances(
    ds: &LabeledDataset,
    provs: &[Provenance],
    cfg: &MeasureConfig,
    exec: Execution,
) -> Result<(ScoredPairs, SkippedViews)> {
    let mut views = Vec::new();
    let mut skipped = Vec::new();
    for (prov, built) in provs.iter().zip(exec.map(provs, |p| make_view(ds, p))) {
        match built {
            Ok(v) => views.push(v),
            Err(Error::DegenerateView(why)) => skipped.push((prov.clone(), why)),
            Err(e) => return Err(e),
        }
    }
    let measures = measure_collection(&views, cfg, exec)?;
    Ok((views.into_iter().map(|v| v.provenance).zip(measures).collect(), skipped))
}

/// Sorts ascending by PHR, ties by provenance.
pub fn sort_scored(views: &mut [ScoredView]) {
    views.sort_by(|a, b| a.phr.total_cmp(&b.phr).then_with(|| a.provenance.sort_key().cmp(&b.provenance.sort_key())));
}

/// All axis pairs of `ds` scored by `model`, best (smallest PHR) first,
/// truncated to `top`.
pub fn rank_views(
    ds: &LabeledDataset,
    model: &LinearModel,
    top: usize,
    cfg: &MeasureConfig,
    exec: Execution,
) -> Result<Vec<ScoredView>> {
    let (scored, _) = score_pairs(ds, cfg, exec)?;
    let mut out = scored
        .into_iter()
        .map(|(provenance, measures)| {
            let phr = predict(model, &measures)?;
            Ok(ScoredView {
                provenance,
                measures,
                phr,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    sort_scored(&mut out);
    out.truncate(top);
    Ok(out)
}
