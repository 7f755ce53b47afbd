//! Rank tables, summaries, and their on-disk rendering.

use std::fmt::Write as _;
use std::path::Path;

use super::wilcoxon::wilcoxon_signed_rank;
use crate::data_model::access;
use crate::error::{Error, Result};
use crate::metafeatures::quantile_sorted;

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionRecord {
    pub pair_id: String,
    pub selected: String,
    pub true_rank: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub method: String,
    pub records: Vec<SelectionRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiveNumber {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl FiveNumber {
    pub fn of(values: &[f64]) -> Self {
        let mut s = values.to_vec();
        s.sort_by(f64::total_cmp);
        Self {
            min: s[0],
            q1: quantile_sorted(&s, 0.25),
            median: quantile_sorted(&s, 0.5),
            q3: quantile_sorted(&s, 0.75),
            max: s[s.len() - 1],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankReport {
    pub methods: Vec<String>,
    pub pair_ids: Vec<String>,
    /// `ranks[pair][method]`
    pub ranks: Vec<Vec<f64>>,
    pub mean_rank: Vec<f64>,
    pub summaries: Vec<FiveNumber>,
    pub reference: String,
    /// Signed-rank p of the reference against each method; `None` for the
    /// reference itself.
    pub p_values: Vec<Option<f64>>,
    /// Worst possible rank (number of candidate models), fixing the plot axis.
    pub rank_max: usize,
}

pub fn rank_report(results: &[SelectionResult], reference: &str, rank_max: usize) -> Result<RankReport> {
    let first = results.first().ok_or_else(|| Error::invalid("rank report needs at least one method"))?;
    let pair_ids: Vec<String> = first.records.iter().map(|r| r.pair_id.clone()).collect();
    if pair_ids.is_empty() {
        return Err(Error::invalid("rank report needs at least one pair"));
    }
    for r in results {
        let ids: Vec<&String> = r.records.iter().map(|x| &x.pair_id).collect();
        if ids.len() != pair_ids.len() || ids.iter().zip(&pair_ids).any(|(a, b)| *a != b) {
            return Err(Error::invalid(format!("method {} covers different pairs", r.method)));
        }
    }
    let ref_idx = results
        .iter()
        .position(|r| r.method == reference)
        .ok_or_else(|| Error::invalid(format!("reference method {reference} not in results")))?;
    let columns: Vec<Vec<f64>> = results.iter().map(|r| r.records.iter().map(|x| x.true_rank).collect()).collect();
    let ranks = (0..pair_ids.len()).map(|i| columns.iter().map(|c| c[i]).collect()).collect();
    let mean_rank = columns.iter().map(|c| c.iter().sum::<f64>() / c.len() as f64).collect();
    let summaries = columns.iter().map(|c| FiveNumber::of(c)).collect();
    let p_values =
        columns
            .iter()
            .enumerate()
            .map(|(k, c)| {
                if k == ref_idx {
                    Ok(None)
                } else {
                    Ok(Some(wilcoxon_signed_rank(&columns[ref_idx], c)?.p_two_sided))
                }
            })
            .collect::<Result<_>>()?;
    Ok(RankReport {
        methods: results.iter().map(|r| r.method.clone()).collect(),
        pair_ids,
        ranks,
        mean_rank,
        summaries,
        reference: reference.to_string(),
        p_values,
        rank_max: rank_max.max(1),
    })
}

impl RankReport {
    pub fn method_index(&self, method: &str) -> Option<usize> {
        self.methods.iter().position(|m| m == method)
    }

    pub fn ranks_csv(&self) -> String {
        let mut s = format!("pair_id,{}\n", self.methods.join(","));
        for (id, row) in self.pair_ids.iter().zip(&self.ranks) {
            s.push_str(id);
            for v in row {
                write!(s, ",{v}").unwrap();
            }
            s.push('\n');
        }
        s
    }

    pub fn summary_csv(&self) -> String {
        let mut s = String::from("method,mean_rank,min,q1,median,q3,max,p_vs_reference\n");
        for (k, m) in self.methods.iter().enumerate() {
            let f = &self.summaries[k];
            write!(
                s,
                "{m},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},",
                self.mean_rank[k], f.min, f.q1, f.median, f.q3, f.max
            )
            .unwrap();
            if let Some(p) = self.p_values[k] {
                write!(s, "{p:.6}").unwrap();
            }
            s.push('\n');
        }
        s
    }

    /// Box plot of per-pair ranks, rank 1 at the top.
    pub fn boxplot_svg(&self) -> String {
        const W: f64 = 800.0;
        const H: f64 = 400.0;
        const LEFT: f64 = 60.0;
        const RIGHT: f64 = 20.0;
        const TOP: f64 = 30.0;
        const BOTTOM: f64 = 60.0;
        let plot_w = W - LEFT - RIGHT;
        let plot_h = H - TOP - BOTTOM;
        let span = (self.rank_max.max(2) - 1) as f64;
        let y = |r: f64| TOP + (r - 1.0) / span * plot_h;
        let slot = plot_w / self.methods.len() as f64;
        let mut s = String::new();
        writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="800" height="400" viewBox="0 0 800 400">"#)
            .unwrap();
        writeln!(s, r#"<rect x="0" y="0" width="800" height="400" fill="white"/>"#).unwrap();
        writeln!(s, r#"<line x1="{LEFT:.2}" y1="{TOP:.2}" x2="{LEFT:.2}" y2="{:.2}" stroke="black"/>"#, TOP + plot_h)
            .unwrap();
        for r in 1..=self.rank_max.max(2) {
            let yy = y(r as f64);
            writeln!(s, r##"<line x1="{:.2}" y1="{yy:.2}" x2="{LEFT:.2}" y2="{yy:.2}" stroke="black"/>"##, LEFT - 5.0)
                .unwrap();
            writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{r}</text>"#,
                LEFT - 8.0,
                yy + 4.0
            )
            .unwrap();
        }
        writeln!(
            s,
            r#"<text x="15.00" y="{:.2}" font-size="12" transform="rotate(-90 15.00 {:.2})" text-anchor="middle">rank</text>"#,
            TOP + plot_h / 2.0,
            TOP + plot_h / 2.0
        )
        .unwrap();
        for (k, m) in self.methods.iter().enumerate() {
            let f = &self.summaries[k];
            let cx = LEFT + (k as f64 + 0.5) * slot;
            let half = slot * 0.25;
            writeln!(
                s,
                r#"<line x1="{cx:.2}" y1="{:.2}" x2="{cx:.2}" y2="{:.2}" stroke="black"/>"#,
                y(f.min),
                y(f.max)
            )
            .unwrap();
            writeln!(
                s,
                r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#9ecae1" stroke="black"/>"##,
                cx - half,
                y(f.q1),
                2.0 * half,
                y(f.q3) - y(f.q1)
            )
            .unwrap();
            writeln!(
                s,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black" stroke-width="2"/>"#,
                cx - half,
                y(f.median),
                cx + half,
                y(f.median)
            )
            .unwrap();
            writeln!(s, r#"<circle cx="{cx:.2}" cy="{:.2}" r="3" fill="red"/>"#, y(self.mean_rank[k])).unwrap();
            writeln!(
                s,
                r#"<text x="{cx:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"#,
                TOP + plot_h + 20.0,
                xml_escape(m)
            )
            .unwrap();
        }
        s.push_str("</svg>\n");
        s
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn emit_report(report: &RankReport, out_dir: &Path) -> Result<()> {
    access::write_bytes(&out_dir.join("ranks.csv"), report.ranks_csv().as_bytes())?;
    access::write_bytes(&out_dir.join("summary.csv"), report.summary_csv().as_bytes())?;
    access::write_bytes(&out_dir.join("boxplot.svg"), report.boxplot_svg().as_bytes())
}

/// `(methods, pair_ids, ranks)` as stored in `ranks.csv`.
pub type RanksTable = (Vec<String>, Vec<String>, Vec<Vec<f64>>);

pub fn read_ranks_csv(text: &str) -> Result<RanksTable> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::CorruptFile("empty ranks.csv".into()))?;
    let mut cols = header.split(',');
    if cols.next() != Some("pair_id") {
        return Err(Error::CorruptFile("ranks.csv must start with pair_id".into()));
    }
    let methods: Vec<String> = cols.map(str::to_string).collect();
    let mut ids = Vec::new();
    let mut ranks = Vec::new();
    for line in lines.filter(|l| !l.is_empty()) {
        let mut f = line.split(',');
        ids.push(f.next().unwrap_or_default().to_string());
        let row = f
            .map(|v| v.parse::<f64>().map_err(|_| Error::CorruptFile(format!("bad rank {v:?}"))))
            .collect::<Result<Vec<_>>>()?;
        if row.len() != methods.len() {
            return Err(Error::CorruptFile("ragged ranks.csv row".into()));
        }
        ranks.push(row);
    }
    Ok((methods, ids, ranks))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result(method: &str, ranks: &[f64]) -> SelectionResult {
        SelectionResult {
            method: method.into(),
            records: ranks
                .iter()
                .enumerate()
                .map(|(i, &r)| SelectionRecord { pair_id: format!("p{i}"), selected: "x".into(), true_rank: r })
                .collect(),
        }
    }

    #[test]
    fn single_method() {
        let r = rank_report(&[result("A", &[1.0, 2.0])], "A", 9).unwrap();
        assert_eq!(r.methods, vec!["A"]);
        assert_eq!(r.p_values, vec![None]);
    }

    #[test]
    fn reference_dominates() {
        let r = rank_report(&[result("R", &[1.0; 6]), result("O", &[2.0; 6])], "R", 9).unwrap();
        assert_eq!(r.mean_rank[0], 1.0);
        assert_eq!(r.p_values[1], Some(0.03125));
    }

    #[test]
    fn mean_matches_table() {
        let rs = [result("A", &[1.0, 4.5, 2.0, 9.0]), result("B", &[3.0, 3.0, 1.5, 2.0])];
        let r = rank_report(&rs, "A", 9).unwrap();
        for k in 0..2 {
            let m = r.ranks.iter().map(|row| row[k]).sum::<f64>() / 4.0;
            assert!((m - r.mean_rank[k]).abs() <= 1e-12);
        }
        assert_eq!(r.summaries[0], FiveNumber { min: 1.0, q1: 1.75, median: 3.25, q3: 5.625, max: 9.0 });
    }

    #[test]
    fn mismatched_pairs_and_empty() {
        assert!(rank_report(&[], "A", 9).is_err());
        let mut b = result("B", &[1.0, 2.0]);
        b.records[1].pair_id = "other".into();
        assert!(rank_report(&[result("A", &[1.0, 2.0]), b], "A", 9).is_err());
    }

    #[test]
    fn csv_and_svg_are_stable() {
        let rs = [result("M3OOD", &[1.0, 2.5, 1.0]), result("Random", &[5.0, 3.0, 7.0])];
        let r = rank_report(&rs, "M3OOD", 9).unwrap();
        let (m, ids, ranks) = read_ranks_csv(&r.ranks_csv()).unwrap();
        assert_eq!((m, ids, ranks), (r.methods.clone(), r.pair_ids.clone(), r.ranks.clone()));
        assert_eq!(r.boxplot_svg(), rank_report(&rs, "M3OOD", 9).unwrap().boxplot_svg());
        assert!(r.boxplot_svg().starts_with("<svg"));
        let summary = r.summary_csv();
        assert!(summary.starts_with("method,mean_rank,min,q1,median,q3,max,p_vs_reference\n"));
        assert!(summary.contains("\nM3OOD,1.500000,"));
    }
}
