//! Labeled tabular data and the 2D views built from it.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::expr::{render_linearized, BoundExpr, Expr};

/// Offset applied to normalized columns before evaluating expressions that
/// contain a logarithm or a division.
pub const DOMAIN_EPSILON: f64 = 1e-9;

/// Numeric features with one class label per row.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    columns: Vec<Vec<f64>>,
    labels: Vec<usize>,
    feature_names: Vec<String>,
    class_names: Vec<String>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CsvOptions {
    /// Drop rows with empty or non-numeric feature cells instead of failing.
    pub drop_incomplete: bool,
}

impl LabeledDataset {
    /// Builds a dataset from row-major features.
    pub fn new(
        rows: Vec<Vec<f64>>,
        labels: Vec<usize>,
        feature_names: Vec<String>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if rows.len() != labels.len() {
            return Err(Error::InvalidDataset(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        let n_features = feature_names.len();
        let mut columns = vec![Vec::with_capacity(rows.len()); n_features];
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n_features {
                return Err(Error::InvalidDataset(format!(
                    "row {r} has {} values, expected {n_features}",
                    row.len()
                )));
            }
            for (c, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::InvalidDataset(format!("non-finite value at row {r}, column {c}")));
                }
                columns[c].push(v);
            }
        }
        let mut present = vec![false; class_names.len()];
        for &l in &labels {
            if l >= class_names.len() {
                return Err(Error::InvalidDataset(format!("label {l} out of range")));
            }
            present[l] = true;
        }
        if let Some(empty) = present.iter().position(|p| !p) {
            return Err(Error::InvalidDataset(format!(
                "class `{}` has no members",
                class_names[empty]
            )));
        }
        Ok(Self {
            columns,
            labels,
            feature_names,
            class_names,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.columns.len()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn column(&self, i: usize) -> &[f64] {
        &self.columns[i]
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.feature_names.iter().position(|n| n == name)
    }

    /// Reads a header-first CSV; `label_column` holds the class of each row.
    /// Labels are encoded in first-appearance order.
    pub fn load_csv(path: impl AsRef<Path>, label_column: &str, opts: CsvOptions) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::read_csv(file, label_column, opts)
    }

    pub fn read_csv(reader: impl std::io::Read, label_column: &str, opts: CsvOptions) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let label_idx = header
            .iter()
            .position(|h| h == label_column)
            .ok_or_else(|| Error::MissingLabelColumn(label_column.to_string()))?;
        let feature_names: Vec<String> = header
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != label_idx)
            .map(|(_, h)| h.clone())
            .collect();

        let mut rows = Vec::new();
        let mut labels = Vec::new();
        let mut class_names: Vec<String> = Vec::new();
        'records: for (k, record) in rdr.records().enumerate() {
            let record = record?;
            // header is line 1
            let line = k + 2;
            let mut row = Vec::with_capacity(feature_names.len());
            for (i, cell) in record.iter().enumerate() {
                if i == label_idx {
                    continue;
                }
                match cell.parse::<f64>() {
                    Ok(v) if v.is_finite() => row.push(v),
                    _ if opts.drop_incomplete => continue 'records,
                    _ => {
                        return Err(Error::NonNumeric {
                            row: line,
                            column: header[i].clone(),
                            value: cell.to_string(),
                        })
                    }
                }
            }
            let class = &record[label_idx];
            if class.is_empty() {
                if opts.drop_incomplete {
                    continue;
                }
                return Err(Error::NonNumeric {
                    row: line,
                    column: header[label_idx].clone(),
                    value: String::new(),
                });
            }
            let label = match class_names.iter().position(|c| c == class) {
                Some(l) => l,
                None => {
                    class_names.push(class.to_string());
                    class_names.len() - 1
                }
            };
            rows.push(row);
            labels.push(label);
        }
        if rows.is_empty() {
            return Err(Error::EmptyDataset);
        }
        Self::new(rows, labels, feature_names, class_names)
    }

    /// Writes features at 17 significant digits followed by the label column.
    pub fn write_csv(&self, writer: impl std::io::Write, label_column: &str) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = self.feature_names.clone();
        header.push(label_column.to_string());
        w.write_record(&header)?;
        for r in 0..self.n_rows() {
            let mut record: Vec<String> = self.columns.iter().map(|c| format!("{:.16e}", c[r])).collect();
            record.push(self.class_names[self.labels[r]].clone());
            w.write_record(&record)?;
        }
        w.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }

    /// Column min-max normalized to `[0, 1]`; a constant column maps to zeros.
    pub fn normalized_column(&self, i: usize) -> Vec<f64> {
        min_max(&self.columns[i]).unwrap_or_else(|| vec![0.0; self.n_rows()])
    }

    /// Default expression bindings: every feature under its own name.
    pub fn bindings(&self) -> Bindings {
        Bindings(
            self.feature_names
                .iter()
                .enumerate()
                .map(|(i, n)| (n.clone(), i))
                .collect(),
        )
    }
}

fn min_max(values: &[f64]) -> Option<Vec<f64>> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = hi - lo;
    if !(range > 0.0) || !range.is_finite() {
        return None;
    }
    Some(values.iter().map(|&v| ((v - lo) / range).clamp(0.0, 1.0)).collect())
}

/// All `N(N-1)/2` feature pairs `(i, j)` with `i < j` in lexicographic order.
pub fn enumerate_pairs(ds: &LabeledDataset) -> Result<Vec<AxisPair>> {
    pairs_for(ds.n_features())
}

pub fn pairs_for(n_features: usize) -> Result<Vec<AxisPair>> {
    if n_features < 2 {
        return Err(Error::TooFewFeatures(n_features));
    }
    Ok((0..n_features)
        .flat_map(|x| (x + 1..n_features).map(move |y| AxisPair { x, y }))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AxisPair {
    pub x: usize,
    pub y: usize,
}

/// Expression variable to dataset column mapping.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Bindings(pub BTreeMap<String, usize>);

impl Bindings {
    pub fn bind(&mut self, variable: impl Into<String>, column: usize) -> &mut Self {
        self.0.insert(variable.into(), column);
        self
    }

    pub fn column(&self, variable: &str) -> Option<usize> {
        self.0.get(variable).copied()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExprPair {
    pub x: Expr,
    pub y: Expr,
}

/// Where a view's coordinates came from.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Axes(AxisPair),
    Exprs(ExprPair),
    /// Points supplied directly.
    Raw,
}

impl Provenance {
    /// Axis labels, resolved against feature names when available.
    pub fn labels(&self, feature_names: &[String]) -> (String, String) {
        match self {
            Provenance::Axes(p) => {
                let name = |i: usize| feature_names.get(i).cloned().unwrap_or_else(|| format!("#{i}"));
                (name(p.x), name(p.y))
            }
            Provenance::Exprs(p) => (render_linearized(&p.x), render_linearized(&p.y)),
            Provenance::Raw => ("x".into(), "y".into()),
        }
    }

    /// Total order used for deterministic tie-breaking: axis pairs first by
    /// index, then expression pairs by rendered text.
    pub fn sort_key(&self) -> (u8, usize, usize, String, String) {
        match self {
            Provenance::Axes(p) => (0, p.x, p.y, String::new(), String::new()),
            Provenance::Exprs(p) => (1, 0, 0, render_linearized(&p.x), render_linearized(&p.y)),
            Provenance::Raw => (2, 0, 0, String::new(), String::new()),
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Axes(p) => write!(f, "({}, {})", p.x, p.y),
            Provenance::Exprs(p) => write!(f, "({}, {})", render_linearized(&p.x), render_linearized(&p.y)),
            Provenance::Raw => f.write_str("raw"),
        }
    }
}

/// Points in the plane with one class label each.
#[derive(Debug, Clone, PartialEq)]
pub struct View2D {
    pub points: Vec<[f64; 2]>,
    pub labels: Vec<usize>,
    pub n_classes: usize,
    pub provenance: Provenance,
    /// Expression inputs were shifted to `[DOMAIN_EPSILON, 1]`.
    pub shifted_domain: bool,
    /// An axis was constant when normalized.
    pub degenerate: bool,
}

impl View2D {
    /// A view over raw points. `n_classes` is one past the largest label.
    pub fn from_points(points: Vec<[f64; 2]>, labels: Vec<usize>) -> Result<Self> {
        if points.len() != labels.len() {
            return Err(Error::InvalidDataset(format!(
                "{} points but {} labels",
                points.len(),
                labels.len()
            )));
        }
        if points.len() < 2 {
            return Err(Error::DegenerateView("a view needs at least 2 points".into()));
        }
        if points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidDataset("non-finite coordinate".into()));
        }
        let n_classes = labels.iter().max().map_or(0, |m| m + 1);
        Ok(Self {
            points,
            labels,
            n_classes,
            provenance: Provenance::Raw,
            shifted_domain: false,
            degenerate: false,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Point counts per class.
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.n_classes];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// Per-axis min-max normalization to `[0, 1]`. A constant axis is set to
    /// zero and the view is flagged degenerate.
    pub fn normalized(&self) -> View2D {
        let mut out = self.clone();
        for axis in 0..2 {
            let values: Vec<f64> = self.points.iter().map(|p| p[axis]).collect();
            match min_max(&values) {
                Some(scaled) => {
                    for (p, v) in out.points.iter_mut().zip(scaled) {
                        p[axis] = v;
                    }
                }
                None => {
                    for p in &mut out.points {
                        p[axis] = 0.0;
                    }
                    out.degenerate = true;
                }
            }
        }
        out
    }

    /// The same view with points sorted by `(x, y, label)`. Measures that
    /// depend on row order run on this form.
    pub fn canonical(&self) -> View2D {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| {
            let (pa, pb) = (self.points[a], self.points[b]);
            pa[0]
                .total_cmp(&pb[0])
                .then(pa[1].total_cmp(&pb[1]))
                .then(self.labels[a].cmp(&self.labels[b]))
        });
        View2D {
            points: order.iter().map(|&i| self.points[i]).collect(),
            labels: order.iter().map(|&i| self.labels[i]).collect(),
            ..self.clone()
        }
    }
}

/// Builds the normalized view of a dataset for an axis pair or an expression
/// pair, binding expression variables to columns by feature name.
pub fn make_view(ds: &LabeledDataset, prov: &Provenance) -> Result<View2D> {
    make_view_with(ds, prov, &ds.bindings())
}

pub fn make_view_with(ds: &LabeledDataset, prov: &Provenance, bindings: &Bindings) -> Result<View2D> {
    let (xs, ys, shifted) = match prov {
        Provenance::Axes(p) => {
            for &i in &[p.x, p.y] {
                if i >= ds.n_features() {
                    return Err(Error::AxisOutOfRange {
                        index: i,
                        n_features: ds.n_features(),
                    });
                }
            }
            (ds.column(p.x).to_vec(), ds.column(p.y).to_vec(), false)
        }
        Provenance::Exprs(pair) => evaluate_pair(ds, pair, bindings)?,
        Provenance::Raw => {
            return Err(Error::InvalidDataset("raw provenance has no dataset source".into()))
        }
    };
    let view = View2D {
        points: xs.into_iter().zip(ys).map(|(x, y)| [x, y]).collect(),
        labels: ds.labels().to_vec(),
        n_classes: ds.n_classes(),
        provenance: prov.clone(),
        shifted_domain: shifted,
        degenerate: false,
    };
    if view.len() < 2 {
        return Err(Error::DegenerateView("a view needs at least 2 points".into()));
    }
    let normalized = view.normalized();
    if normalized.degenerate {
        return Err(Error::DegenerateView(format!("constant axis in view {prov}")));
    }
    Ok(normalized)
}

fn evaluate_pair(ds: &LabeledDataset, pair: &ExprPair, bindings: &Bindings) -> Result<(Vec<f64>, Vec<f64>, bool)> {
    let resolve = |name: &str| bindings.column(name).filter(|&c| c < ds.n_features());
    let bx = BoundExpr::bind(&pair.x, &resolve)?;
    let by = BoundExpr::bind(&pair.y, &resolve)?;
    let shifted = pair.x.needs_positive_domain() || pair.y.needs_positive_domain();

    let mut used: Vec<usize> = bindings.0.values().copied().filter(|&c| c < ds.n_features()).collect();
    used.sort_unstable();
    used.dedup();
    let mut columns = vec![Vec::new(); ds.n_features()];
    for &c in &used {
        let mut col = ds.normalized_column(c);
        if shifted {
            for v in &mut col {
                *v = DOMAIN_EPSILON + (1.0 - DOMAIN_EPSILON) * *v;
            }
        }
        columns[c] = col;
    }

    let mut row = vec![0.0; ds.n_features()];
    let mut xs = Vec::with_capacity(ds.n_rows());
    let mut ys = Vec::with_capacity(ds.n_rows());
    for r in 0..ds.n_rows() {
        for &c in &used {
            row[c] = columns[c][r];
        }
        for (bound, expr, out) in [(&bx, &pair.x, &mut xs), (&by, &pair.y, &mut ys)] {
            let v = bound.eval(&row);
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    expr: render_linearized(expr),
                    row: r,
                });
            }
            out.push(v);
        }
    }
    Ok((xs, ys, shifted))
}
