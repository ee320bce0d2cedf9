//! Grading façade over the `nile` toolchain: one JSON request in, one JSON
//! verdict out. Used by the `nile` command line tool and the HTTP service in
//! [`service`].
//!
//! Every failure is reported in-band as `status: "error"` with diagnostics,
//! so callers never have to distinguish transport errors from bad input.

use std::time::Instant;

use nile::equivalence::{equiv, EquivOptions, Fallback, Method, Status};
use nile::explain::{explain_verdict, FindingCode, Side};
use nile::parser::{parse, ParseError};
use nile::syntax::{expand_sugar, validate, Alphabet, Expr};
use serde::{Deserialize, Serialize};

pub mod service;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Budgets {
    /// Cap on automaton states per construction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<usize>,
    /// Cap on Presburger formula size.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formula: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GradeOptions {
    /// Word-length bound for the bounded fallback.
    #[serde(default, rename = "boundL", skip_serializing_if = "Option::is_none")]
    pub bound_l: Option<usize>,
    #[serde(default = "yes")]
    pub explain: bool,
    #[serde(default)]
    pub budgets: Budgets,
}

fn yes() -> bool {
    true
}

impl Default for GradeOptions {
    fn default() -> Self {
        GradeOptions { bound_l: None, explain: true, budgets: Budgets::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GradeRequest {
    pub alphabet: Vec<String>,
    pub reference: String,
    pub candidate: String,
    #[serde(default)]
    pub options: GradeOptions,
}

impl GradeRequest {
    pub fn new(alphabet: &[&str], reference: &str, candidate: &str) -> Self {
        GradeRequest {
            alphabet: alphabet.iter().map(|s| s.to_string()).collect(),
            reference: reference.into(),
            candidate: candidate.into(),
            options: GradeOptions::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradeStatus {
    Equivalent,
    Different,
    BoundedEquivalent,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GradeCounterexample {
    pub word: String,
    pub in_reference: bool,
    pub in_candidate: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GradeFinding {
    pub code: String,
    /// `candidate` or `reference`: the expression `path` points into.
    pub side: String,
    pub path: Vec<usize>,
    pub message: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticSource {
    Request,
    Reference,
    Candidate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GradeDiagnostic {
    pub source: DiagnosticSource,
    /// `request`, `parse`, `validate` or `internal`.
    pub kind: String,
    pub message: String,
    /// Byte range in the offending text, for parse errors.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub span: Option<[usize; 2]>,
    /// Node path, for validation errors.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<Vec<usize>>,
}

/// Wall-clock milliseconds per phase.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Timings {
    pub parse: f64,
    pub validate: f64,
    pub equiv: f64,
    pub explain: f64,
    pub total: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GradeResponse {
    pub status: GradeStatus,
    pub method: Option<Method>,
    /// Longest word length compared, for `bounded_equivalent`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<usize>,
    /// Why no exact method was used, when the bounded check ran.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fallback: Option<Fallback>,
    pub counterexample: Option<GradeCounterexample>,
    pub findings: Vec<GradeFinding>,
    pub diagnostics: Vec<GradeDiagnostic>,
    pub timings: Timings,
}

impl GradeResponse {
    pub fn error(diagnostics: Vec<GradeDiagnostic>) -> Self {
        GradeResponse {
            status: GradeStatus::Error,
            method: None,
            bound: None,
            fallback: None,
            counterexample: None,
            findings: Vec::new(),
            diagnostics,
            timings: Timings::default(),
        }
    }
}

fn ms(since: Instant) -> f64 {
    (since.elapsed().as_secs_f64() * 1e6).round() / 1e3
}

pub fn request_diagnostic(message: impl Into<String>) -> GradeDiagnostic {
    GradeDiagnostic {
        source: DiagnosticSource::Request,
        kind: "request".into(),
        message: message.into(),
        span: None,
        path: None,
    }
}

/// Builds the alphabet from a symbol list such as `["a", "b"]`.
pub fn alphabet_from(symbols: &[String]) -> Result<Alphabet, String> {
    if symbols.is_empty() {
        return Err("alphabet must not be empty".into());
    }
    if let Some(bad) = symbols.iter().find(|s| s.chars().count() != 1) {
        return Err(format!("alphabet symbol {bad:?} is not a single character"));
    }
    Alphabet::parse_list(&symbols.join(",")).map_err(|e| e.to_string())
}

pub fn parse_diagnostic(source: DiagnosticSource, e: &ParseError) -> GradeDiagnostic {
    GradeDiagnostic {
        source,
        kind: "parse".into(),
        message: e.to_string(),
        span: Some([e.span.start, e.span.end]),
        path: None,
    }
}

/// Parses one expression text; empty texts are parse errors.
pub fn parse_text(source: DiagnosticSource, text: &str) -> Result<Expr, Vec<GradeDiagnostic>> {
    if text.trim().is_empty() {
        return Err(vec![GradeDiagnostic {
            source,
            kind: "parse".into(),
            message: "expression text is empty".into(),
            span: Some([0, text.len()]),
            path: None,
        }]);
    }
    parse(text).map_err(|e| vec![parse_diagnostic(source, &e)])
}

pub fn validate_expr(source: DiagnosticSource, e: Expr, sigma: &Alphabet) -> Result<Expr, Vec<GradeDiagnostic>> {
    match validate(&e, sigma) {
        Ok(()) => Ok(e),
        Err(ds) => Err(ds
            .into_iter()
            .map(|d| GradeDiagnostic {
                source,
                kind: "validate".into(),
                message: d.message,
                span: None,
                path: Some(d.path.0),
            })
            .collect()),
    }
}

/// Parses and validates one expression text.
pub fn check_text(source: DiagnosticSource, text: &str, sigma: &Alphabet) -> Result<Expr, Vec<GradeDiagnostic>> {
    validate_expr(source, parse_text(source, text)?, sigma)
}

fn internal(message: String) -> GradeResponse {
    GradeResponse::error(vec![GradeDiagnostic {
        source: DiagnosticSource::Request,
        kind: "internal".into(),
        message,
        span: None,
        path: None,
    }])
}

/// Grades a candidate expression against a reference. Deterministic for
/// fixed inputs and budgets, apart from `timings`.
pub fn grade(req: &GradeRequest) -> GradeResponse {
    let start = Instant::now();
    let sigma = match alphabet_from(&req.alphabet) {
        Ok(s) => s,
        Err(e) => {
            let mut r = GradeResponse::error(vec![request_diagnostic(e)]);
            r.timings.total = ms(start);
            return r;
        }
    };

    let t = Instant::now();
    let sides = [DiagnosticSource::Reference, DiagnosticSource::Candidate];
    let parsed = [parse_text(sides[0], &req.reference), parse_text(sides[1], &req.candidate)];
    let parse_ms = ms(t);
    let t = Instant::now();
    let [r, c] = parsed;
    let reference = r.and_then(|e| validate_expr(sides[0], e, &sigma));
    let candidate = c.and_then(|e| validate_expr(sides[1], e, &sigma));
    let validate_ms = ms(t);
    let (reference, candidate) = match (reference, candidate) {
        (Ok(r), Ok(c)) => (r, c),
        (r, c) => {
            let mut diags = r.err().unwrap_or_default();
            diags.extend(c.err().unwrap_or_default());
            let mut resp = GradeResponse::error(diags);
            resp.timings = Timings { parse: parse_ms, validate: validate_ms, total: ms(start), ..Timings::default() };
            return resp;
        }
    };

    let t = Instant::now();
    let mut opts = EquivOptions { bound_len: req.options.bound_l, ..EquivOptions::default() };
    if let Some(s) = req.options.budgets.states {
        opts.state_budget = s;
    }
    if let Some(f) = req.options.budgets.formula {
        opts.formula_budget = f;
    }
    let verdict = expand_sugar(&reference, &sigma)
        .map_err(|e| e.to_string())
        .and_then(|r| Ok((r, expand_sugar(&candidate, &sigma).map_err(|e| e.to_string())?)))
        .and_then(|(r, c)| equiv(&r, &c, &sigma, &opts).map_err(|e| e.to_string()));
    let equiv_ms = ms(t);
    let verdict = match verdict {
        Ok(v) => v,
        Err(message) => {
            let mut resp = internal(message);
            resp.timings = Timings { parse: parse_ms, validate: validate_ms, equiv: equiv_ms, ..Timings::default() };
            resp.timings.total = ms(start);
            return resp;
        }
    };

    let (status, bound) = match verdict.status {
        Status::Equivalent => (GradeStatus::Equivalent, None),
        Status::Different => (GradeStatus::Different, None),
        Status::BoundedEquivalent(l) => (GradeStatus::BoundedEquivalent, Some(l)),
    };
    let method = verdict.method;
    let fallback = if method == Method::Bounded { verdict.fallback } else { None };

    let t = Instant::now();
    let report = explain_verdict(&reference, &candidate, verdict);
    let findings = if req.options.explain {
        report
            .findings
            .iter()
            .map(|f| GradeFinding {
                code: FindingCode::as_str(f.code).to_string(),
                side: match f.side {
                    Side::Candidate => "candidate".into(),
                    Side::Reference => "reference".into(),
                },
                path: f.path.clone(),
                message: f.message.clone(),
            })
            .collect()
    } else {
        Vec::new()
    };
    let explain_ms = ms(t);

    GradeResponse {
        status,
        method: Some(method),
        bound,
        fallback,
        counterexample: report.counterexample.map(|c| GradeCounterexample {
            word: c.word,
            in_reference: c.in_reference,
            in_candidate: c.in_candidate,
        }),
        findings,
        diagnostics: Vec::new(),
        timings: Timings {
            parse: parse_ms,
            validate: validate_ms,
            equiv: equiv_ms,
            explain: explain_ms,
            total: ms(start),
        },
    }
}
