//! Scoring model outputs into the RQ1–RQ3 statistics table.
//!
//! Rules, per row of category 1–4 (category 5 is excluded everywhere):
//!
//! * RQ1 asks whether the method's verdict "the description fits the task"
//!   is acceptable: category 1 expects yes, categories 3 and 4 expect no,
//!   and category 2 accepts either answer. M1 reads the verdict from the
//!   yes/no text; M2 and M3 derive it from equivalence of the model's
//!   representation with the reference. An `ERROR` label counts as "does not
//!   fit".
//! * RQ2 counts semantically correct representations: the annotation when
//!   present, otherwise equivalence with the reference for category-1 rows.
//! * RQ3 counts representations that are semantically correct and annotated
//!   as a syntactic match.
//!
//! Grammar outputs (context-free tasks) are never parsed; their RQ1
//! verdict comes from the `m2MatchesReference` annotation.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use nile::automata::{compile_dfa, determinize, eliminate_positions, parse_regex, shortest_in_sym_diff};
use nile::equivalence::{default_bound, equiv, EquivOptions, Status};
use nile::eval::Evaluator;
use nile::parser::parse;
use nile::syntax::{expand_sugar, validate, Alphabet, CoreExpr};
use serde::Serialize;

use crate::dataset::DatasetRow;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Rq1M1,
    Rq1M2,
    Rq1M3,
    Rq2M2,
    Rq2M3,
    Rq3M2,
    Rq3M3,
}

impl Metric {
    pub const ALL: [Metric; 7] =
        [Metric::Rq1M1, Metric::Rq1M2, Metric::Rq1M3, Metric::Rq2M2, Metric::Rq2M3, Metric::Rq3M2, Metric::Rq3M3];

    pub fn key(self) -> &'static str {
        match self {
            Metric::Rq1M1 => "rq1_m1",
            Metric::Rq1M2 => "rq1_m2",
            Metric::Rq1M3 => "rq1_m3",
            Metric::Rq2M2 => "rq2_m2",
            Metric::Rq2M3 => "rq2_m3",
            Metric::Rq3M2 => "rq3_m2",
            Metric::Rq3M3 => "rq3_m3",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Metric::Rq1M1 => "RQ1 (M1) directly",
            Metric::Rq1M2 => "RQ1 (M2) via RE / CFG",
            Metric::Rq1M3 => "RQ1 (M3) via NILE",
            Metric::Rq2M2 => "RQ2 (M2) RE / CFG",
            Metric::Rq2M3 => "RQ2 (M3) NILE",
            Metric::Rq3M2 => "RQ3 (M2) RE / CFG",
            Metric::Rq3M3 => "RQ3 (M3) NILE",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cell {
    pub count: usize,
    pub denominator: usize,
    /// `100 * count / denominator`, rounded to two decimals; 0 when empty.
    pub percent: f64,
}

impl Cell {
    fn new(count: usize, denominator: usize) -> Self {
        let percent =
            if denominator == 0 { 0.0 } else { (10000.0 * count as f64 / denominator as f64).round() / 100.0 };
        Cell { count, denominator, percent }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatsRow {
    pub metric: Metric,
    pub cells: Vec<Cell>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatsTable {
    /// `all`, `regular`, `context-free`, then task ids in sorted order.
    pub columns: Vec<String>,
    /// Scored rows (categories 1–4) per column.
    pub totals: Vec<usize>,
    pub rows: Vec<StatsRow>,
    /// Category-5 rows left out of every denominator.
    pub excluded: usize,
    /// Outputs that were present but did not parse, keyed `m2` / `m3`.
    pub parse_failures: BTreeMap<String, usize>,
    /// Outputs that were missing, keyed `m1` / `m2` / `m3`.
    pub unanswered: BTreeMap<String, usize>,
}

impl StatsTable {
    pub fn cell(&self, metric: Metric, column: &str) -> Option<&Cell> {
        let c = self.columns.iter().position(|x| x == column)?;
        self.rows.iter().find(|r| r.metric == metric).map(|r| &r.cells[c])
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::from("|");
        for c in &self.columns {
            out.push_str(&format!(" {c} # | {c} % |"));
        }
        out = format!("| |{}\n|---|{}\n", &out[1..], "---:|".repeat(2 * self.columns.len()));
        out.push_str("| all descriptions |");
        for t in &self.totals {
            out.push_str(&format!(" {t} | 100.00% |"));
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!("| {} |", row.metric.title()));
            for cell in &row.cells {
                out.push_str(&format!(" {} | {:.2}% |", cell.count, cell.percent));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["metric".to_string()];
        for c in &self.columns {
            header.push(format!("{c}_count"));
            header.push(format!("{c}_percent"));
        }
        w.write_record(&header).expect("in-memory write");
        let mut all = vec!["all_descriptions".to_string()];
        for t in &self.totals {
            all.push(t.to_string());
            all.push("100.00".into());
        }
        w.write_record(&all).expect("in-memory write");
        for row in &self.rows {
            let mut rec = vec![row.metric.key().to_string()];
            for cell in &row.cells {
                rec.push(cell.count.to_string());
                rec.push(format!("{:.2}", cell.percent));
            }
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
    }
}

/// Verdict of one method on one row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Judged {
    Fits(bool),
    Missing,
    Unparseable,
}

fn is_error_label(text: &str) -> bool {
    text.trim().to_ascii_uppercase().starts_with("ERROR")
}

/// Reads a yes/no answer from the first word of the text.
pub fn parse_yes_no(text: &str) -> Option<bool> {
    let first: String = text.trim().chars().take_while(|c| c.is_alphabetic()).collect::<String>().to_lowercase();
    match first.as_str() {
        "yes" | "true" => Some(true),
        "no" | "false" => Some(false),
        _ => None,
    }
}

fn compile_nile(text: &str, sigma: &Alphabet) -> Result<CoreExpr, String> {
    let e = parse(text).map_err(|e| e.to_string())?;
    validate(&e, sigma).map_err(|ds| ds.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))?;
    expand_sugar(&e, sigma).map_err(|e| e.to_string())
}

struct Task {
    sigma: Alphabet,
    reference: CoreExpr,
}

impl Task {
    fn new(row: &DatasetRow) -> Option<Task> {
        let sigma = Alphabet::parse_list(&row.alphabet.join(",")).ok()?;
        let reference = compile_nile(&row.reference_nile, &sigma).ok()?;
        Some(Task { sigma, reference })
    }

    fn nile_equivalent(&self, text: &str) -> Option<bool> {
        let cand = compile_nile(text, &self.sigma).ok()?;
        let v = equiv(&self.reference, &cand, &self.sigma, &EquivOptions::default()).ok()?;
        Some(matches!(v.status, Status::Equivalent | Status::BoundedEquivalent(_)))
    }

    fn regex_equivalent(&self, text: &str) -> Option<bool> {
        let nfa = parse_regex(text, &self.sigma).ok()?;
        let limit = nile::automata::DEFAULT_STATE_BUDGET;
        let re = determinize(&nfa, limit).ok()?;
        match compile_dfa(&eliminate_positions(&self.reference, &self.sigma), &self.sigma, limit) {
            Ok(reference) => Some(shortest_in_sym_diff(&reference, &re).is_none()),
            Err(_) => {
                let ev = Evaluator::new(&self.reference, &self.sigma);
                let words = self.sigma.words_up_to(default_bound(&self.sigma));
                Some(words.iter().all(|w| ev.accepts(w).ok() == Some(re.accepts(w))))
            }
        }
    }
}

fn judge_representation(output: Option<&str>, check: impl FnOnce(&str) -> Option<bool>) -> Judged {
    match output {
        None => Judged::Missing,
        Some(t) if is_error_label(t) => Judged::Fits(false),
        Some(t) => check(t).map_or(Judged::Unparseable, Judged::Fits),
    }
}

/// Per-row outcome of every metric.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RowScore {
    pub hits: [bool; 7],
    pub m2_unparseable: bool,
    pub m3_unparseable: bool,
    pub missing: [bool; 3],
}

fn acceptable(category: u8, fits: Judged) -> bool {
    match fits {
        Judged::Fits(f) => category == 2 || f == (category == 1),
        Judged::Missing | Judged::Unparseable => false,
    }
}

/// Scores rows, remembering equivalence verdicts per task and output text.
/// Datasets repeat outputs a lot, and a bounded check can take seconds.
#[derive(Debug, Default)]
pub struct Scorer {
    cache: Mutex<HashMap<(Vec<String>, String, bool, String), Option<bool>>>,
}

impl Scorer {
    fn cached(&self, row: &DatasetRow, regex: bool, text: &str, check: impl FnOnce() -> Option<bool>) -> Option<bool> {
        let key = (row.alphabet.clone(), row.reference_nile.clone(), regex, text.to_string());
        if let Some(v) = self.cache.lock().expect("cache lock").get(&key) {
            return *v;
        }
        let v = check();
        self.cache.lock().expect("cache lock").insert(key, v);
        v
    }

    /// Scores a single row of category 1–4.
    pub fn score_row(&self, row: &DatasetRow) -> RowScore {
        let outputs = row.model_outputs.clone().unwrap_or_default();
        let ann = row.annotations.clone().unwrap_or_default();
        let task = Task::new(row);
        let c = row.category;

        let m1 = match outputs.m1.as_deref() {
            None => Judged::Missing,
            Some(t) => parse_yes_no(t).map_or(Judged::Unparseable, Judged::Fits),
        };
        let m3 = judge_representation(outputs.m3.as_deref(), |t| {
            self.cached(row, false, t, || task.as_ref()?.nile_equivalent(t))
        });
        let m2 = if row.is_regular() {
            judge_representation(outputs.m2.as_deref(), |t| {
                self.cached(row, true, t, || task.as_ref()?.regex_equivalent(t))
            })
        } else {
            match (outputs.m2.as_deref(), ann.m2_matches_reference) {
                (None, _) => Judged::Missing,
                (Some(t), _) if is_error_label(t) => Judged::Fits(false),
                (Some(_), Some(b)) => Judged::Fits(b),
                (Some(_), None) => Judged::Unparseable,
            }
        };

        let semantic =
            |annotated: Option<bool>, fits: Judged| annotated.unwrap_or(c == 1 && fits == Judged::Fits(true));
        let rq2_m2 = semantic(ann.m2_semantic_correct, m2) && outputs.m2.is_some();
        let rq2_m3 = semantic(ann.semantic_correct, m3) && outputs.m3.is_some();
        let rq3_m2 = rq2_m2 && ann.m2_syntactic_match == Some(true);
        let rq3_m3 = rq2_m3 && ann.syntactic_match == Some(true);

        RowScore {
            hits: [acceptable(c, m1), acceptable(c, m2), acceptable(c, m3), rq2_m2, rq2_m3, rq3_m2, rq3_m3],
            m2_unparseable: row.is_regular() && m2 == Judged::Unparseable,
            m3_unparseable: m3 == Judged::Unparseable,
            missing: [outputs.m1.is_none(), outputs.m2.is_none(), outputs.m3.is_none()],
        }
    }
}

/// Scores a single row of category 1–4.
pub fn score_row(row: &DatasetRow) -> RowScore {
    Scorer::default().score_row(row)
}

/// Builds the statistics table; the result does not depend on row order.
pub fn score(rows: &[DatasetRow]) -> StatsTable {
    Scorer::default().score(rows)
}

impl Scorer {
    pub fn score(&self, rows: &[DatasetRow]) -> StatsTable {
        let mut tasks: Vec<String> = rows.iter().map(|r| r.task_id.clone()).collect();
        tasks.sort();
        tasks.dedup();
        let mut columns = vec!["all".to_string(), "regular".to_string(), "context-free".to_string()];
        columns.extend(tasks);

        let mut totals = vec![0usize; columns.len()];
        let mut counts = vec![vec![0usize; columns.len()]; Metric::ALL.len()];
        let mut excluded = 0;
        let mut parse_failures: BTreeMap<String, usize> = [("m2".into(), 0), ("m3".into(), 0)].into();
        let mut unanswered: BTreeMap<String, usize> = [("m1".into(), 0), ("m2".into(), 0), ("m3".into(), 0)].into();

        for row in rows {
            if row.category == 5 {
                excluded += 1;
                continue;
            }
            let s = self.score_row(row);
            let class = if row.is_regular() { 1 } else { 2 };
            let task = columns.iter().position(|c| *c == row.task_id).expect("task column");
            for col in [0, class, task] {
                totals[col] += 1;
                for (m, hit) in s.hits.iter().enumerate() {
                    counts[m][col] += usize::from(*hit);
                }
            }
            *parse_failures.get_mut("m2").expect("key") += usize::from(s.m2_unparseable);
            *parse_failures.get_mut("m3").expect("key") += usize::from(s.m3_unparseable);
            for (k, key) in ["m1", "m2", "m3"].iter().enumerate() {
                *unanswered.get_mut(*key).expect("key") += usize::from(s.missing[k]);
            }
        }

        let rows = Metric::ALL
            .iter()
            .enumerate()
            .map(|(m, &metric)| StatsRow {
                metric,
                cells: counts[m].iter().zip(&totals).map(|(&c, &d)| Cell::new(c, d)).collect(),
            })
            .collect();
        StatsTable { columns, totals, rows, excluded, parse_failures, unanswered }
    }
}
