//! CSV files written by the command-line tool, each with a reader.
//!
//! Numbers are written in Rust's shortest round-trip form, so reading a file
//! back yields bit-identical values.

use std::io::{Read, Write};

use crate::composite::{Measure, MeasureFlag, MeasureVector};
use crate::error::{Error, Result};
use crate::search::SearchResult;
use crate::expr::{render_linearized, ExprMetrics};

/// One line of a scores file.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRow {
    pub x: String,
    pub y: String,
    pub values: [Option<f64>; 10],
    pub phr: Option<f64>,
    pub degenerate: bool,
    /// Measures whose flag is not `ok`.
    pub flags: Vec<(Measure, MeasureFlag)>,
}

impl ScoreRow {
    pub fn new(x: String, y: String, mv: &MeasureVector, phr: Option<f64>) -> Self {
        let flags = Measure::ALL
            .into_iter()
            .map(|m| (m, mv.flag(m)))
            .filter(|(_, f)| *f != MeasureFlag::Ok)
            .collect();
        Self {
            x,
            y,
            values: mv.values,
            phr,
            degenerate: mv.any_degenerate(),
            flags,
        }
    }
}

fn header() -> Vec<String> {
    let mut h = vec!["x".to_string(), "y".to_string()];
    h.extend(Measure::ALL.iter().map(|m| m.name().to_string()));
    h.extend(["phr", "degenerate", "flags"].map(String::from));
    h
}

fn num(v: Option<f64>) -> String {
    v.map_or(String::new(), |v| format!("{v:?}"))
}

fn parse_num(s: &str, line: usize, column: &str) -> Result<Option<f64>> {
    if s.is_empty() {
        return Ok(None);
    }
    s.parse().map(Some).map_err(|_| Error::NonNumeric {
        row: line,
        column: column.to_string(),
        value: s.to_string(),
    })
}

pub fn write_scores(out: impl Write, rows: &[ScoreRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header())?;
    for r in rows {
        let mut rec = vec![r.x.clone(), r.y.clone()];
        rec.extend(r.values.iter().map(|v| num(*v)));
        rec.push(num(r.phr));
        rec.push(format!("degenerate={}", r.degenerate));
        rec.push(
            r.flags
                .iter()
                .map(|(m, f)| format!("{}={}", m.name(), f.as_str()))
                .collect::<Vec<_>>()
                .join(";"),
        );
        w.write_record(rec)?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

pub fn read_scores(input: impl Read) -> Result<Vec<ScoreRow>> {
    let mut r = csv::Reader::from_reader(input);
    let want = header();
    let got: Vec<String> = r.headers()?.iter().map(String::from).collect();
    if got != want {
        return Err(Error::InvalidDataset(format!("unexpected scores header {got:?}")));
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let mut values = [None; 10];
        for (k, m) in Measure::ALL.iter().enumerate() {
            values[k] = parse_num(&rec[2 + k], line, m.name())?;
        }
        let degenerate = match &rec[13] {
            "degenerate=true" => true,
            "degenerate=false" => false,
            other => {
                return Err(Error::NonNumeric {
                    row: line,
                    column: "degenerate".into(),
                    value: other.into(),
                })
            }
        };
        let mut flags = Vec::new();
        for item in rec[14].split(';').filter(|s| !s.is_empty()) {
            let parsed = item
                .split_once('=')
                .and_then(|(m, f)| Some((Measure::from_name(m)?, MeasureFlag::parse(f)?)));
            flags.push(parsed.ok_or_else(|| Error::NonNumeric {
                row: line,
                column: "flags".into(),
                value: item.into(),
            })?);
        }
        rows.push(ScoreRow {
            x: rec[0].to_string(),
            y: rec[1].to_string(),
            values,
            phr: parse_num(&rec[12], line, "phr")?,
            degenerate,
            flags,
        });
    }
    Ok(rows)
}

/// One line of a search results file.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchRow {
    pub rank: usize,
    pub expr_x: String,
    pub expr_y: String,
    pub visual_phr: f64,
    pub semantic_phr: f64,
    pub combined: f64,
}

impl SearchRow {
    pub fn from_results(results: &[SearchResult]) -> Vec<SearchRow> {
        results
            .iter()
            .enumerate()
            .map(|(i, r)| SearchRow {
                rank: i + 1,
                expr_x: render_linearized(&r.pair.x),
                expr_y: render_linearized(&r.pair.y),
                visual_phr: r.visual,
                semantic_phr: r.semantic,
                combined: r.combined,
            })
            .collect()
    }
}

const SEARCH_HEADER: [&str; 6] = ["rank", "expr_x", "expr_y", "visual_phr", "semantic_phr", "combined"];

pub fn write_search(out: impl Write, rows: &[SearchRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SEARCH_HEADER)?;
    for r in rows {
        w.write_record([
            r.rank.to_string(),
            r.expr_x.clone(),
            r.expr_y.clone(),
            format!("{:?}", r.visual_phr),
            format!("{:?}", r.semantic_phr),
            format!("{:?}", r.combined),
        ])?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

pub fn read_search(input: impl Read) -> Result<Vec<SearchRow>> {
    let mut r = csv::Reader::from_reader(input);
    let got: Vec<String> = r.headers()?.iter().map(String::from).collect();
    if got != SEARCH_HEADER {
        return Err(Error::InvalidDataset(format!("unexpected search header {got:?}")));
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let field = |k: usize| -> Result<f64> {
            parse_num(&rec[k], line, SEARCH_HEADER[k])?.ok_or_else(|| Error::NonNumeric {
                row: line,
                column: SEARCH_HEADER[k].into(),
                value: String::new(),
            })
        };
        rows.push(SearchRow {
            rank: rec[0].parse().map_err(|_| Error::NonNumeric {
                row: line,
                column: "rank".into(),
                value: rec[0].to_string(),
            })?,
            expr_x: rec[1].to_string(),
            expr_y: rec[2].to_string(),
            visual_phr: field(3)?,
            semantic_phr: field(4)?,
            combined: field(5)?,
        });
    }
    Ok(rows)
}

/// One line of a diverse-view selection file.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionRow {
    pub bin: usize,
    pub x: String,
    pub y: String,
    pub count: usize,
}

const SELECTION_HEADER: [&str; 4] = ["bin", "x", "y", "count"];

pub fn write_selection(out: impl Write, rows: &[SelectionRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SELECTION_HEADER)?;
    for r in rows {
        w.write_record([r.bin.to_string(), r.x.clone(), r.y.clone(), r.count.to_string()])?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

fn parse_usize(s: &str, line: usize, column: &str) -> Result<usize> {
    s.parse().map_err(|_| Error::NonNumeric {
        row: line,
        column: column.to_string(),
        value: s.to_string(),
    })
}

pub fn read_selection(input: impl Read) -> Result<Vec<SelectionRow>> {
    let mut r = csv::Reader::from_reader(input);
    let got: Vec<String> = r.headers()?.iter().map(String::from).collect();
    if got != SELECTION_HEADER {
        return Err(Error::InvalidDataset(format!("unexpected selection header {got:?}")));
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        rows.push(SelectionRow {
            bin: parse_usize(&rec[0], line, "bin")?,
            x: rec[1].to_string(),
            y: rec[2].to_string(),
            count: parse_usize(&rec[3], line, "count")?,
        });
    }
    Ok(rows)
}

/// One line of an expression metrics table.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprRow {
    pub expression: String,
    pub metrics: ExprMetrics,
    pub phr: f64,
}

const EXPR_HEADER: [&str; 8] = [
    "expression",
    "operands",
    "operators",
    "depth",
    "blocks",
    "avg_block_size",
    "total_size",
    "phr",
];

pub fn write_expr_scores(out: impl Write, rows: &[ExprRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(EXPR_HEADER)?;
    for r in rows {
        let m = &r.metrics;
        w.write_record([
            r.expression.clone(),
            m.n_operands.to_string(),
            m.n_operators.to_string(),
            m.tree_depth.to_string(),
            m.n_blocks.to_string(),
            format!("{:?}", m.avg_block_size),
            m.total_size.to_string(),
            format!("{:?}", r.phr),
        ])?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

pub fn read_expr_scores(input: impl Read) -> Result<Vec<ExprRow>> {
    let mut r = csv::Reader::from_reader(input);
    let got: Vec<String> = r.headers()?.iter().map(String::from).collect();
    if got != EXPR_HEADER {
        return Err(Error::InvalidDataset(format!("unexpected expression header {got:?}")));
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let float = |k: usize| -> Result<f64> {
            parse_num(&rec[k], line, EXPR_HEADER[k])?.ok_or_else(|| Error::NonNumeric {
                row: line,
                column: EXPR_HEADER[k].into(),
                value: String::new(),
            })
        };
        rows.push(ExprRow {
            expression: rec[0].to_string(),
            metrics: ExprMetrics {
                n_operands: parse_usize(&rec[1], line, "operands")?,
                n_operators: parse_usize(&rec[2], line, "operators")?,
                tree_depth: parse_usize(&rec[3], line, "depth")?,
                n_blocks: parse_usize(&rec[4], line, "blocks")?,
                avg_block_size: float(5)?,
                total_size: parse_usize(&rec[6], line, "total_size")?,
            },
            phr: float(7)?,
        });
    }
    Ok(rows)
}
