//! The bundled expression study: 30 expressions with their published
//! structural attributes, median ratings, writing times and correct counts.

use super::{metrics, parse, ExprMetrics};
use crate::error::{Error, Result};

const STUDY: &str = include_str!("../../data/expressions.tsv");
const DIVERGENCES: &str = include_str!("../../data/divergences.tsv");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StudySet {
    Calibration,
    Assessment,
}

/// One published row. Attributes the source table omits are `None`.
#[derive(Debug, Clone)]
pub struct StudyExpression {
    pub set: StudySet,
    pub row: usize,
    pub text: String,
    pub n_operands: usize,
    pub n_operators: usize,
    pub tree_depth: usize,
    pub n_blocks: usize,
    pub avg_block_size: Option<f64>,
    pub total_size: usize,
    pub median_rating: Option<f64>,
    pub median_write_seconds: Option<f64>,
    pub correct: Option<u32>,
}

/// A documented disagreement between computed and published attributes.
#[derive(Debug, Clone, PartialEq)]
pub struct Divergence {
    pub set: StudySet,
    pub row: usize,
    pub attribute: String,
    pub published: f64,
    pub computed: f64,
}

fn parse_set(s: &str) -> Result<StudySet> {
    match s {
        "calibration" => Ok(StudySet::Calibration),
        "assessment" => Ok(StudySet::Assessment),
        other => Err(Error::InvalidDataset(format!("unknown study set `{other}`"))),
    }
}

fn field<T: std::str::FromStr>(s: &str) -> Result<Option<T>> {
    if s == "-" {
        return Ok(None);
    }
    s.parse()
        .map(Some)
        .map_err(|_| Error::InvalidDataset(format!("bad fixture value `{s}`")))
}

fn required<T: std::str::FromStr>(s: &str) -> Result<T> {
    field(s)?.ok_or_else(|| Error::InvalidDataset("missing required fixture value".into()))
}

fn data_lines(text: &str) -> impl Iterator<Item = Vec<&str>> {
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| l.split('\t').collect())
}

pub fn study_expressions() -> Result<Vec<StudyExpression>> {
    data_lines(STUDY)
        .map(|cols| {
            if cols.len() != 12 {
                return Err(Error::InvalidDataset(format!(
                    "fixture row has {} columns",
                    cols.len()
                )));
            }
            Ok(StudyExpression {
                set: parse_set(cols[0])?,
                row: required(cols[1])?,
                text: cols[2].to_string(),
                n_operands: required(cols[3])?,
                n_operators: required(cols[4])?,
                tree_depth: required(cols[5])?,
                n_blocks: required(cols[6])?,
                avg_block_size: field(cols[7])?,
                total_size: required(cols[8])?,
                median_rating: field(cols[9])?,
                median_write_seconds: field(cols[10])?,
                correct: field(cols[11])?,
            })
        })
        .collect()
}

pub fn known_divergences() -> Result<Vec<Divergence>> {
    data_lines(DIVERGENCES)
        .map(|cols| {
            if cols.len() != 5 {
                return Err(Error::InvalidDataset("divergence row needs 5 columns".into()));
            }
            Ok(Divergence {
                set: parse_set(cols[0])?,
                row: required(cols[1])?,
                attribute: cols[2].to_string(),
                published: required(cols[3])?,
                computed: required(cols[4])?,
            })
        })
        .collect()
}

impl StudyExpression {
    pub fn computed_metrics(&self) -> Result<ExprMetrics> {
        Ok(metrics(&parse(&self.text)?))
    }

    /// Attributes whose computed value differs from the published one
    /// (block size compared to two decimals, as printed).
    pub fn divergences(&self) -> Result<Vec<Divergence>> {
        let m = self.computed_metrics()?;
        let mut out = Vec::new();
        let mut check = |attribute: &str, published: f64, computed: f64, tol: f64| {
            if (published - computed).abs() > tol {
                out.push(Divergence {
                    set: self.set,
                    row: self.row,
                    attribute: attribute.to_string(),
                    published,
                    computed,
                });
            }
        };
        check("operands", self.n_operands as f64, m.n_operands as f64, 0.0);
        check("operators", self.n_operators as f64, m.n_operators as f64, 0.0);
        check("depth", self.tree_depth as f64, m.tree_depth as f64, 0.0);
        check("blocks", self.n_blocks as f64, m.n_blocks as f64, 0.0);
        if let Some(avg) = self.avg_block_size {
            let rounded = (m.avg_block_size * 100.0).round() / 100.0;
            check("avg_block_size", avg, rounded, 0.01);
        }
        check("total_size", self.total_size as f64, m.total_size as f64, 0.0);
        Ok(out)
    }
}
