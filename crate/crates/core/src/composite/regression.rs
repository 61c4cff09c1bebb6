//! Ordinary least squares with leave-one-out cross-validation, fit
//! diagnostics and a plain-text model format.

use std::fmt::Write as _;

use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use crate::error::{Error, Result};

const RIDGE: f64 = 1e-10;
const PIVOT_FLOOR: f64 = 1e-12;

/// Named attribute columns plus a target, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    pub names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub target: Vec<f64>,
}

impl Samples {
    pub fn new(names: Vec<String>, rows: Vec<Vec<f64>>, target: Vec<f64>) -> Result<Self> {
        if rows.len() != target.len() {
            return Err(Error::Regression(format!("{} rows but {} targets", rows.len(), target.len())));
        }
        if let Some(bad) = rows.iter().position(|r| r.len() != names.len()) {
            return Err(Error::Regression(format!(
                "row {bad} has {} values for {} attributes",
                rows[bad].len(),
                names.len()
            )));
        }
        Ok(Self { names, rows, target })
    }

    /// Reads a headed CSV of numeric columns; `target` names the response
    /// and every other column becomes an attribute.
    pub fn read_csv(input: impl std::io::Read, target: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let header: Vec<String> = r.headers()?.iter().map(|h| h.trim().to_string()).collect();
        let t = header
            .iter()
            .position(|h| h == target)
            .ok_or_else(|| Error::MissingLabelColumn(target.to_string()))?;
        let names: Vec<String> = header.iter().enumerate().filter(|&(i, _)| i != t).map(|(_, h)| h.clone()).collect();
        let (mut rows, mut ys) = (Vec::new(), Vec::new());
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            let mut row = Vec::with_capacity(names.len());
            for (c, cell) in rec.iter().enumerate() {
                let v: f64 = cell.trim().parse().map_err(|_| Error::NonNumeric {
                    row: i + 2,
                    column: header[c].clone(),
                    value: cell.to_string(),
                })?;
                if c == t {
                    ys.push(v);
                } else {
                    row.push(v);
                }
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::EmptyDataset);
        }
        Self::new(names, rows, ys)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Design rows restricted to `cols`, without the intercept column.
    fn select(&self, cols: &[usize]) -> Vec<Vec<f64>> {
        self.rows.iter().map(|r| cols.iter().map(|&c| r[c]).collect()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubsetStrategy {
    All,
    /// Repeatedly drop the attribute whose removal lowers the LOOCV SSE most.
    GreedyBackward,
}

/// Fit statistics of a linear model on a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub n: usize,
    /// Number of attributes, not counting the intercept.
    pub p: usize,
    pub sse: f64,
    pub r2: f64,
    /// `None` when `n <= p + 1`.
    pub adj_r2: Option<f64>,
    /// `sqrt(SSE / (n - p - 1))`; `None` when `n <= p + 1`.
    pub rmse: Option<f64>,
    pub f_stat: Option<f64>,
    pub p_value: Option<f64>,
    /// Residual degrees of freedom `n - p - 1`.
    pub dof: usize,
    pub residuals: Vec<f64>,
    pub loocv_sse: Option<f64>,
}

/// `intercept + sum coefficient * value` over named terms.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub terms: Vec<(String, f64)>,
    pub intercept: f64,
    pub diagnostics: Option<Diagnostics>,
}

impl LinearModel {
    pub fn new(terms: Vec<(String, f64)>, intercept: f64) -> Self {
        Self {
            terms,
            intercept,
            diagnostics: None,
        }
    }

    /// The published visual model over six of the ten measures.
    pub fn published_visual() -> Self {
        let (intercept, terms) = super::VISUAL_MODEL;
        Self::new(terms.iter().map(|&(n, c)| (n.to_string(), c)).collect(), intercept)
    }

    /// The published semantic model over expression metrics.
    pub fn published_semantic() -> Self {
        let (intercept, coefs) = crate::expr::SEMANTIC_MODEL;
        let names = ["tree_depth", "n_blocks", "avg_block_size", "total_size"];
        Self::new(names.iter().zip(coefs).map(|(n, c)| (n.to_string(), c)).collect(), intercept)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().map(|(n, _)| n.as_str())
    }

    pub fn predict_with(&self, lookup: impl Fn(&str) -> Option<f64>) -> Result<f64> {
        let mut acc = self.intercept;
        for (name, coef) in &self.terms {
            let v = lookup(name).ok_or_else(|| Error::MissingMeasure(name.clone()))?;
            acc += coef * v;
        }
        Ok(acc)
    }

    /// Prediction for one row of `samples`-shaped data.
    pub fn predict_row(&self, names: &[String], row: &[f64]) -> Result<f64> {
        self.predict_with(|n| names.iter().position(|m| m == n).map(|i| row[i]))
    }

    /// One `name=value` line per term, then `intercept=value`. Values use the
    /// shortest representation that parses back to the same bits.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (name, coef) in &self.terms {
            let _ = writeln!(out, "{name}={coef:?}");
        }
        let _ = writeln!(out, "intercept={:?}", self.intercept);
        out
    }

    /// Parses [`LinearModel::to_text`] output. Blank lines and `#` comments
    /// are skipped.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut terms: Vec<(String, f64)> = Vec::new();
        let mut intercept = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| Error::ModelFormat { line: i + 1, message };
            let (name, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected name=coefficient, got {line:?}")))?;
            let (name, value) = (name.trim(), value.trim());
            if name.is_empty() {
                return Err(err("empty term name".into()));
            }
            let value: f64 = value
                .parse()
                .map_err(|_| err(format!("coefficient {value:?} is not a number")))?;
            if !value.is_finite() {
                return Err(err(format!("coefficient for {name} is not finite")));
            }
            if name == "intercept" {
                if intercept.replace(value).is_some() {
                    return Err(err("intercept given twice".into()));
                }
            } else if terms.iter().any(|(n, _)| n == name) {
                return Err(err(format!("term {name} given twice")));
            } else {
                terms.push((name.to_string(), value));
            }
        }
        let intercept = intercept.ok_or(Error::ModelFormat {
            line: text.lines().count(),
            message: "missing intercept line".into(),
        })?;
        Ok(Self::new(terms, intercept))
    }
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting. Returns
/// `None` when a pivot collapses.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = (0..n).map(|i| a[i][i].abs()).fold(0.0, f64::max).max(1.0);
    for col in 0..n {
        let piv = (col..n).max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))?;
        if a[piv][col].abs() <= PIVOT_FLOOR * scale {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Gram matrix `Z'Z` of the design with a leading intercept column.
fn gram(x: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let q = x.first().map_or(0, Vec::len) + 1;
    let mut g = vec![vec![0.0; q]; q];
    for row in x {
        let z: Vec<f64> = std::iter::once(1.0).chain(row.iter().copied()).collect();
        for i in 0..q {
            for j in i..q {
                g[i][j] += z[i] * z[j];
            }
        }
    }
    for i in 0..q {
        for j in 0..i {
            g[i][j] = g[j][i];
        }
    }
    g
}

struct Fit {
    /// Intercept first.
    beta: Vec<f64>,
    /// `(Z'Z)^-1`, possibly ridge-regularized.
    inverse: Vec<Vec<f64>>,
}

fn fit_ols(x: &[Vec<f64>], y: &[f64]) -> Result<Fit> {
    let mut g = gram(x);
    let q = g.len();
    let mut zty = vec![0.0; q];
    for (row, &t) in x.iter().zip(y) {
        zty[0] += t;
        for (k, v) in row.iter().enumerate() {
            zty[k + 1] += v * t;
        }
    }
    let beta = match solve(g.clone(), zty.clone()) {
        Some(b) => b,
        None => {
            for (i, r) in g.iter_mut().enumerate() {
                r[i] += RIDGE;
            }
            solve(g.clone(), zty).ok_or_else(|| Error::Regression("singular normal equations".into()))?
        }
    };
    let mut inverse = vec![vec![0.0; q]; q];
    for k in 0..q {
        let mut e = vec![0.0; q];
        e[k] = 1.0;
        let col = solve(g.clone(), e).ok_or_else(|| Error::Regression("singular normal equations".into()))?;
        for (r, v) in col.into_iter().enumerate() {
            inverse[r][k] = v;
        }
    }
    Ok(Fit { beta, inverse })
}

fn predict(beta: &[f64], row: &[f64]) -> f64 {
    beta[0] + row.iter().zip(&beta[1..]).map(|(v, b)| v * b).sum::<f64>()
}

fn check_shape(n: usize, p: usize, y: &[f64]) -> Result<()> {
    if n < 3 {
        return Err(Error::Regression(format!("need at least 3 rows, got {n}")));
    }
    if n <= p {
        return Err(Error::Regression(format!("{n} rows cannot determine {p} attributes")));
    }
    if y.iter().all(|&v| v == y[0]) {
        return Err(Error::Regression("target is constant".into()));
    }
    Ok(())
}

/// Leave-one-out prediction error sum of squares. Uses the hat-matrix
/// shortcut, refitting explicitly for high-leverage rows.
pub fn loocv_sse(x: &[Vec<f64>], y: &[f64]) -> Result<f64> {
    let fit = fit_ols(x, y)?;
    let mut press = 0.0;
    for (i, row) in x.iter().enumerate() {
        let z: Vec<f64> = std::iter::once(1.0).chain(row.iter().copied()).collect();
        let h: f64 = (0..z.len())
            .map(|a| (0..z.len()).map(|b| z[a] * fit.inverse[a][b] * z[b]).sum::<f64>())
            .sum();
        let resid = y[i] - predict(&fit.beta, row);
        let err = if 1.0 - h > 1e-8 {
            resid / (1.0 - h)
        } else {
            let (xs, ys): (Vec<Vec<f64>>, Vec<f64>) = x
                .iter()
                .zip(y)
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, (r, &t))| (r.clone(), t))
                .unzip();
            y[i] - predict(&fit_ols(&xs, &ys)?.beta, row)
        };
        press += err * err;
    }
    Ok(press)
}

/// Diagnostics of `model` on `samples`, using the model's own coefficients.
pub fn regression_report(model: &LinearModel, samples: &Samples) -> Result<Diagnostics> {
    let n = samples.len();
    let p = model.terms.len();
    let mut residuals = Vec::with_capacity(n);
    for (row, &t) in samples.rows.iter().zip(&samples.target) {
        residuals.push(t - model.predict_row(&samples.names, row)?);
    }
    let mean = samples.target.iter().sum::<f64>() / n as f64;
    let sst: f64 = samples.target.iter().map(|t| (t - mean).powi(2)).sum();
    let sse: f64 = residuals.iter().map(|r| r * r).sum();
    let r2 = 1.0 - sse / sst;
    let dof = n.saturating_sub(p + 1);
    let (adj_r2, rmse, f_stat, p_value) = if dof == 0 {
        (None, None, None, None)
    } else {
        let adj = 1.0 - (1.0 - r2) * (n as f64 - 1.0) / dof as f64;
        let rmse = (sse / dof as f64).sqrt();
        let (f, pv) = if p == 0 {
            (None, None)
        } else if sse <= 0.0 {
            (Some(f64::INFINITY), Some(0.0))
        } else {
            let f = ((sst - sse) / p as f64) / (sse / dof as f64);
            let dist = FisherSnedecor::new(p as f64, dof as f64)
                .map_err(|e| Error::Regression(format!("F distribution: {e}")))?;
            (Some(f), Some(dist.sf(f.max(0.0))))
        };
        (Some(adj), Some(rmse), f, pv)
    };
    Ok(Diagnostics {
        n,
        p,
        sse,
        r2,
        adj_r2,
        rmse,
        f_stat,
        p_value,
        dof,
        residuals,
        loocv_sse: None,
    })
}

/// Fits OLS on the chosen attribute subset and attaches diagnostics,
/// including the LOOCV SSE of the final subset.
pub fn fit_linear_loocv(samples: &Samples, strategy: SubsetStrategy) -> Result<LinearModel> {
    let y = &samples.target;
    check_shape(samples.len(), samples.names.len(), y)?;
    let mut kept: Vec<usize> = (0..samples.names.len()).collect();
    if strategy == SubsetStrategy::GreedyBackward {
        let mean = y.iter().sum::<f64>() / y.len() as f64;
        let tol = 1e-9 * y.iter().map(|t| (t - mean).powi(2)).sum::<f64>();
        let mut current = loocv_sse(&samples.select(&kept), y)?;
        while kept.len() > 1 {
            let mut best: Option<(usize, f64)> = None;
            for drop in 0..kept.len() {
                let trial: Vec<usize> = kept.iter().enumerate().filter(|&(i, _)| i != drop).map(|(_, &c)| c).collect();
                let score = loocv_sse(&samples.select(&trial), y)?;
                if best.is_none_or(|(_, s)| score < s) {
                    best = Some((drop, score));
                }
            }
            match best {
                Some((drop, score)) if score <= current + tol => {
                    kept.remove(drop);
                    current = score;
                }
                _ => break,
            }
        }
    }
    let x = samples.select(&kept);
    let fit = fit_ols(&x, y)?;
    let terms = kept
        .iter()
        .zip(&fit.beta[1..])
        .map(|(&c, &b)| (samples.names[c].clone(), b))
        .collect();
    let mut model = LinearModel::new(terms, fit.beta[0]);
    let mut diag = regression_report(&model, samples)?;
    diag.loocv_sse = Some(loocv_sse(&x, y)?);
    model.diagnostics = Some(diag);
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn planted(n: usize) -> Samples {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let a = (i as f64 * 0.37).sin();
                let b = (i as f64 * 0.91).cos();
                let c = ((i * i) % 7) as f64 / 7.0;
                vec![a, b, c]
            })
            .collect();
        let target = rows.iter().map(|r| 2.0 * r[0] - r[1] + 0.5).collect();
        Samples::new(vec!["a".into(), "b".into(), "c".into()], rows, target).unwrap()
    }

    #[test]
    fn recovers_planted_model() {
        let m = fit_linear_loocv(&planted(30), SubsetStrategy::All).unwrap();
        let coef: Vec<f64> = m.terms.iter().map(|t| t.1).collect();
        for (got, want) in coef.iter().zip([2.0, -1.0, 0.0]) {
            assert!((got - want).abs() < 1e-8, "{coef:?}");
        }
        assert!((m.intercept - 0.5).abs() < 1e-8);
        let d = m.diagnostics.unwrap();
        assert!(d.r2 > 1.0 - 1e-12);
        assert!(d.p_value.unwrap() < 1e-10);
        assert!(d.loocv_sse.unwrap() <= d.sse + 1e-8);
    }

    #[test]
    fn greedy_drops_the_irrelevant_column() {
        let m = fit_linear_loocv(&planted(30), SubsetStrategy::GreedyBackward).unwrap();
        let names: Vec<&str> = m.names().collect();
        assert_eq!(names, ["a", "b"]);
    }

    #[test]
    fn constant_target_is_rejected() {
        let mut s = planted(10);
        s.target = vec![1.0; 10];
        assert!(matches!(fit_linear_loocv(&s, SubsetStrategy::All), Err(Error::Regression(_))));
    }

    #[test]
    fn loocv_matches_explicit_refits() {
        let s = planted(12);
        let mut s = s.clone();
        for (i, t) in s.target.iter_mut().enumerate() {
            *t += ((i * 5) % 3) as f64 * 0.1;
        }
        let x = s.select(&[0, 1, 2]);
        let mut explicit = 0.0;
        for i in 0..x.len() {
            let xs: Vec<Vec<f64>> = x.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, r)| r.clone()).collect();
            let ys: Vec<f64> = s.target.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &t)| t).collect();
            let b = fit_ols(&xs, &ys).unwrap().beta;
            explicit += (s.target[i] - predict(&b, &x[i])).powi(2);
        }
        assert!((loocv_sse(&x, &s.target).unwrap() - explicit).abs() < 1e-10);
    }

    #[test]
    fn single_attribute_diagnostics_by_hand() {
        let s = Samples::new(
            vec!["x".into()],
            vec![vec![1.0], vec![2.0], vec![3.0], vec![4.0]],
            vec![1.0, 3.0, 2.0, 5.0],
        )
        .unwrap();
        let m = fit_linear_loocv(&s, SubsetStrategy::All).unwrap();
        // slope 1.1, intercept 0; residuals -0.1 0.8 -1.3 0.6
        assert!((m.terms[0].1 - 1.1).abs() < 1e-12);
        assert!(m.intercept.abs() < 1e-12);
        let d = m.diagnostics.unwrap();
        assert!((d.sse - 2.7).abs() < 1e-12);
        assert!((d.r2 - (1.0 - 2.7 / 8.75)).abs() < 1e-12);
        assert!((d.rmse.unwrap() - (2.7f64 / 2.0).sqrt()).abs() < 1e-12);
        assert_eq!(d.dof, 2);
    }

    #[test]
    fn model_text_round_trips_bit_exactly() {
        let m = LinearModel::new(vec![("a".into(), 0.1 + 0.2), ("b".into(), -1e-300)], std::f64::consts::PI);
        let back = LinearModel::from_text(&m.to_text()).unwrap();
        assert_eq!(back, m);
        assert_eq!(LinearModel::from_text(&LinearModel::published_visual().to_text()).unwrap(), LinearModel::published_visual());
    }

    #[test]
    fn malformed_model_text() {
        for (text, line) in [("a=1\nb 2\nintercept=0", 2), ("a=x\nintercept=0", 1), ("a=1\na=2\nintercept=0", 2), ("a=1", 1)] {
            match LinearModel::from_text(text) {
                Err(Error::ModelFormat { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }
}
