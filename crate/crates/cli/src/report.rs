//! Query reports and their text and JSON renderings.

use std::fmt::Write as _;

use serde_json::{json, Map, Number, Value};

use qreider::criteria::{TraceEntry, Verdict};
use qreider::rational::{approx, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Established,
    NotEstablished,
    /// A computed value rather than a criterion.
    Value,
    /// The configuration is partially log-canonical at the point.
    Plc,
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Established => "established",
            Status::NotEstablished => "not-established",
            Status::Value => "value",
            Status::Plc => "plc",
            Status::Error => "error",
        }
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Established
        } else {
            Status::NotEstablished
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub query: String,
    pub line: Option<usize>,
    pub status: Status,
    pub rule: Option<String>,
    pub trace: Vec<TraceEntry>,
    pub witness: Vec<(String, Q)>,
    pub values: Vec<(String, Q)>,
    pub notes: Vec<String>,
    pub error: Option<String>,
    /// Sub-reports, one per step of a composite query.
    pub steps: Vec<Report>,
    pub elapsed_ms: f64,
}

impl Report {
    pub fn new(query: impl Into<String>, status: Status) -> Self {
        Self {
            query: query.into(),
            line: None,
            status,
            rule: None,
            trace: Vec::new(),
            witness: Vec::new(),
            values: Vec::new(),
            notes: Vec::new(),
            error: None,
            steps: Vec::new(),
            elapsed_ms: 0.0,
        }
    }

    pub fn error(query: impl Into<String>, msg: impl Into<String>) -> Self {
        let mut r = Self::new(query, Status::Error);
        r.error = Some(msg.into());
        r
    }

    pub fn from_verdict(query: impl Into<String>, v: &Verdict) -> Self {
        let mut r = Self::new(query, Status::from_bool(v.established()));
        r.rule = Some(v.rule.id().to_string());
        r.trace = v.trace.clone();
        if let Some(w) = &v.witness {
            r.witness = w.roles().into_iter().map(|(k, x)| (k.to_string(), x.clone())).collect();
        }
        r.notes = v.notes.clone();
        r
    }

    pub fn value(&mut self, name: impl Into<String>, x: Q) -> &mut Self {
        self.values.push((name.into(), x));
        self
    }

    pub fn is_error(&self) -> bool {
        self.status == Status::Error || self.steps.iter().any(Report::is_error)
    }
}

/// `7/3 (approx 2.333333)`; integers are printed alone.
pub fn show(x: &Q) -> String {
    if x.is_integer() {
        x.to_string()
    } else {
        format!("{x} (approx {:.6})", approx(x))
    }
}

fn text_into(out: &mut String, r: &Report, indent: &str) {
    let _ = write!(out, "{indent}{}", r.query);
    if let Some(l) = r.line {
        let _ = write!(out, "  [line {l}]");
    }
    out.push('\n');
    let _ = write!(out, "{indent}  status: {}", r.status.as_str());
    if let Some(rule) = &r.rule {
        let _ = write!(out, " ({rule})");
    }
    out.push('\n');
    if let Some(e) = &r.error {
        let _ = writeln!(out, "{indent}  error: {e}");
    }
    for (k, v) in &r.values {
        let _ = writeln!(out, "{indent}  {k} = {}", show(v));
    }
    if !r.witness.is_empty() {
        let parts: Vec<String> = r.witness.iter().map(|(k, v)| format!("{k} = {v}")).collect();
        let _ = writeln!(out, "{indent}  witness: {}", parts.join(", "));
    }
    if !r.trace.is_empty() {
        let _ = writeln!(out, "{indent}  trace:");
        for t in &r.trace {
            let mark = if t.holds { "ok  " } else { "FAIL" };
            let _ = writeln!(
                out,
                "{indent}    [{mark}] {}: {} {} {}",
                t.label,
                show(&t.lhs),
                t.rel.symbol(),
                show(&t.rhs)
            );
        }
    }
    for n in &r.notes {
        let _ = writeln!(out, "{indent}  note: {n}");
    }
    for s in &r.steps {
        text_into(out, s, &format!("{indent}  "));
    }
}

pub fn to_text(reports: &[Report]) -> String {
    let mut out = String::new();
    for (i, r) in reports.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        text_into(&mut out, r, "");
        let _ = writeln!(out, "  elapsed: {:.1} ms", r.elapsed_ms);
    }
    out
}

fn big(n: &num_bigint::BigInt) -> Value {
    Value::Number(n.to_string().parse::<Number>().expect("decimal integer"))
}

/// `{"num": 7, "den": 3, "approx": 2.33}` with exact integers of any size.
pub fn rational_json(x: &Q) -> Value {
    json!({ "num": big(x.numer()), "den": big(x.denom()), "approx": approx(x) })
}

fn named(list: &[(String, Q)]) -> Value {
    Value::Array(
        list.iter()
            .map(|(k, v)| json!({ "name": k, "value": rational_json(v) }))
            .collect(),
    )
}

pub fn report_json(r: &Report) -> Value {
    let mut m = Map::new();
    m.insert("query".into(), json!(r.query));
    m.insert("line".into(), r.line.map_or(Value::Null, |l| json!(l)));
    m.insert("status".into(), json!(r.status.as_str()));
    m.insert("rule".into(), r.rule.as_ref().map_or(Value::Null, |s| json!(s)));
    let trace: Vec<Value> = r
        .trace
        .iter()
        .map(|t| {
            json!({
                "label": t.label,
                "lhs": rational_json(&t.lhs),
                "rel": t.rel.symbol(),
                "rhs": rational_json(&t.rhs),
                "holds": t.holds,
            })
        })
        .collect();
    m.insert("trace".into(), Value::Array(trace));
    m.insert("witness".into(), if r.witness.is_empty() { Value::Null } else { named(&r.witness) });
    m.insert("values".into(), named(&r.values));
    m.insert("notes".into(), json!(r.notes));
    m.insert("error".into(), r.error.as_ref().map_or(Value::Null, |e| json!(e)));
    m.insert("steps".into(), Value::Array(r.steps.iter().map(report_json).collect()));
    m.insert("elapsed_ms".into(), json!(r.elapsed_ms));
    Value::Object(m)
}

pub fn to_json(reports: &[Report]) -> Value {
    json!({
        "version": env!("CARGO_PKG_VERSION"),
        "reports": reports.iter().map(report_json).collect::<Vec<_>>(),
    })
}
