use std::fmt::Write;

use super::workload_split;
use crate::engine::Outcome;
use crate::pattern::Pattern;

pub const CSV_HEADER: &str = "pattern,seed,decided,correct,ticks_to_decision,violations,corrections,mislabel_rate,human_direct,human_indirect,agent_direct";

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub pattern: String,
    pub seed: u64,
    pub decided: bool,
    pub correct: bool,
    pub ticks_to_decision: Option<u64>,
    pub violations: u32,
    pub corrections: u32,
    pub mislabel_rate: f64,
    pub human_direct: u32,
    pub human_indirect: u32,
    pub agent_direct: u32,
}

impl ResultRow {
    pub fn new(name: &str, seed: u64, p: &Pattern, o: &Outcome) -> Self {
        let (human_direct, human_indirect, agent_direct) = workload_split(p, o);
        Self {
            pattern: name.to_string(),
            seed,
            decided: o.decided,
            correct: o.correct,
            ticks_to_decision: o.metrics.ticks_to_decision,
            violations: o.metrics.violations,
            corrections: o.metrics.corrections_issued,
            mislabel_rate: o.metrics.mislabel_rate_final,
            human_direct,
            human_indirect,
            agent_direct,
        }
    }

    /// Numeric columns after `seed`; `None` is an empty cell.
    fn values(&self) -> [Option<f64>; 9] {
        [
            Some(self.decided as u8 as f64),
            Some(self.correct as u8 as f64),
            self.ticks_to_decision.map(|t| t as f64),
            Some(self.violations as f64),
            Some(self.corrections as f64),
            Some(self.mislabel_rate),
            Some(self.human_direct as f64),
            Some(self.human_indirect as f64),
            Some(self.agent_direct as f64),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultsTable {
    /// Pattern names in declaration order.
    pub patterns: Vec<String>,
    pub rows: Vec<ResultRow>,
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

fn sample_std(xs: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let m = mean(xs)?;
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    Some((ss / (xs.len() - 1) as f64).sqrt())
}

/// `printf("%g")`: six significant digits, trailing zeros removed.
pub fn format_g(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mant, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mant.to_string()), exp.abs())
    }
}

fn trim(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn cell(v: Option<f64>) -> String {
    v.map(format_g).unwrap_or_default()
}

impl ResultsTable {
    pub fn rows_for<'a>(&'a self, pattern: &'a str) -> impl Iterator<Item = &'a ResultRow> + 'a {
        self.rows.iter().filter(move |r| r.pattern == pattern)
    }

    /// Per-column mean and sample std over one pattern's rows. Empty cells
    /// are left out of both.
    pub fn aggregate(&self, pattern: &str) -> (Vec<Option<f64>>, Vec<Option<f64>>) {
        let rows: Vec<[Option<f64>; 9]> = self.rows_for(pattern).map(ResultRow::values).collect();
        (0..9)
            .map(|c| {
                let xs: Vec<f64> = rows.iter().filter_map(|r| r[c]).collect();
                (mean(&xs), sample_std(&xs))
            })
            .unzip()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(CSV_HEADER);
        out.push('\n');
        for p in &self.patterns {
            for r in self.rows_for(p) {
                let cells: Vec<String> = r.values().iter().map(|v| cell(*v)).collect();
                let _ = writeln!(out, "{},{},{}", r.pattern, r.seed, cells.join(","));
            }
        }
        for p in &self.patterns {
            let (m, s) = self.aggregate(p);
            for (label, vals) in [("mean", m), ("std", s)] {
                let cells: Vec<String> = vals.into_iter().map(cell).collect();
                let _ = writeln!(out, "{p},{label},{}", cells.join(","));
            }
        }
        out
    }
}
