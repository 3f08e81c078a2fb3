use std::collections::BTreeMap;

use super::{format_sci, reference, GradeRow};
use crate::error::{Error, Result};
use crate::stats::{summarize, synthetic_sample, wilcoxon_rank_sum, Sign, Summary, Tally, WilcoxonResult, ALPHA};

/// Sample size used when rebuilding samples from summary rows.
pub const SYNTHETIC_RUNS: usize = 51;

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub function: usize,
    pub dimension: usize,
    pub local: Summary,
    pub reference: Summary,
    pub result: WilcoxonResult,
    /// Sign reported in the published tables for this function.
    pub published: Option<Sign>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
    pub tally: Tally,
}

impl Comparison {
    fn from_rows(rows: Vec<ComparisonRow>) -> Self {
        let tally = rows.iter().map(|r| r.result.sign).collect();
        Self { rows, tally }
    }

    /// Plain-text report: one line per function plus the tally line.
    pub fn render(&self, title: &str) -> String {
        let mut out = format!("{title}\n");
        out.push_str(&format!(
            "{:<4} {:>4}  {:>9} {:>9}  {:>9} {:>9}  {:>9}  {:>4} {:>9}\n",
            "F", "D", "mean", "median", "ref mean", "ref med", "p", "sign", "published"
        ));
        for r in &self.rows {
            out.push_str(&format!(
                "{:<4} {:>4}  {:>9} {:>9}  {:>9} {:>9}  {:>9}  {:>4} {:>9}\n",
                r.function,
                r.dimension,
                format_sci(r.local.mean),
                format_sci(r.local.median),
                format_sci(r.reference.mean),
                format_sci(r.reference.median),
                format_sci(r.result.p_value),
                r.result.sign.symbol(),
                r.published.map_or('?', Sign::symbol),
            ));
        }
        out.push_str(&format!("tally {}\n", self.tally));
        out
    }
}

/// Compares summary rows against reference rows by rebuilding
/// [`SYNTHETIC_RUNS`]-point samples from each row. Rows are matched on
/// `(function, dimension)`; unmatched local rows are skipped.
pub fn compare_summaries(local: &[GradeRow], reference_rows: &[GradeRow]) -> Result<Comparison> {
    let mut rows = Vec::new();
    for l in local {
        let Some(r) = reference_rows
            .iter()
            .find(|r| r.function == l.function && r.dimension == l.dimension)
        else {
            continue;
        };
        let a = synthetic_sample(&l.summary, SYNTHETIC_RUNS);
        let b = synthetic_sample(&r.summary, SYNTHETIC_RUNS);
        rows.push(ComparisonRow {
            function: l.function,
            dimension: l.dimension,
            local: l.summary,
            reference: r.summary,
            result: wilcoxon_rank_sum(&a, &b, ALPHA)?,
            published: reference::published_sign(l.function),
        });
    }
    if rows.is_empty() {
        return Err(Error::Parse("no rows in common with the reference".into()));
    }
    Ok(Comparison::from_rows(rows))
}

/// Compares raw final-cost samples per function.
pub fn compare_samples(
    local: &BTreeMap<usize, Vec<f64>>,
    other: &BTreeMap<usize, Vec<f64>>,
    dimension: usize,
) -> Result<Comparison> {
    let mut rows = Vec::new();
    for (&f, a) in local {
        let Some(b) = other.get(&f) else { continue };
        rows.push(ComparisonRow {
            function: f,
            dimension,
            local: summarize(a)?,
            reference: summarize(b)?,
            result: wilcoxon_rank_sum(a, b, ALPHA)?,
            published: reference::published_sign(f),
        });
    }
    if rows.is_empty() {
        return Err(Error::Parse("no functions in common".into()));
    }
    Ok(Comparison::from_rows(rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::reference::{rows, Source};

    #[test]
    fn published_rows_reproduce_published_tally() {
        let manet = rows(Source::Manet, 30).unwrap();
        let jso = rows(Source::Jso, 30).unwrap();
        let cmp = compare_summaries(&manet, &jso).unwrap();
        assert_eq!(cmp.tally.to_string(), "+:4 =:2 -:3");
        for r in &cmp.rows {
            assert_eq!(Some(r.result.sign), r.published, "F{}", r.function);
        }
    }

    #[test]
    fn table_against_itself_is_all_equal() {
        let manet = rows(Source::Manet, 50).unwrap();
        let cmp = compare_summaries(&manet, &manet).unwrap();
        assert!(cmp.rows.iter().all(|r| r.result.sign == Sign::Equal));
        assert!(cmp.render("self").ends_with("tally +:0 =:9 -:0\n"));
    }
}
