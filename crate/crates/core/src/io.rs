//! File formats: the JSON problem document (rationals as exact strings),
//! trajectory and value-table CSV, and certificate JSON.

use crate::certificates::PeriodCertificate;
use crate::dp::ValueTable;
use crate::problem::LdoLcProblem;
use crate::rational::{format_rat, parse_rat, Rat};
use crate::sequence::{Tail, TailedSequence};
use crate::trajectory::Trajectory;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TailDoc {
    Zero,
    Geometric { first: String, ratio: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceDoc {
    pub prefix: Vec<String>,
    pub tail: TailDoc,
}

/// Optional per-file run defaults the CLI honors unless overridden by
/// flags.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct RunDefaults {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relaxed: Option<bool>,
}

impl RunDefaults {
    pub fn is_empty(&self) -> bool {
        self.eps.is_none() && self.horizon.is_none() && self.relaxed.is_none()
    }
}

/// On-disk problem schema: `{"b": "1", "p": {"prefix": ["1/2"], "tail":
/// {"kind": "geometric", "first": "-1/8", "ratio": "1/2"}}, ...}` with an
/// optional `"defaults"` block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemDocument {
    pub b: String,
    pub p: SequenceDoc,
    pub c: SequenceDoc,
    pub a: SequenceDoc,
    #[serde(default, skip_serializing_if = "skip_defaults")]
    pub defaults: Option<RunDefaults>,
}

fn skip_defaults(d: &Option<RunDefaults>) -> bool {
    d.as_ref().map_or(true, RunDefaults::is_empty)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("field {field}: {message}")]
    Field { field: String, message: String },
}

fn sequence_to_doc(seq: &TailedSequence) -> SequenceDoc {
    SequenceDoc {
        prefix: seq.prefix().iter().map(format_rat).collect(),
        tail: match seq.tail() {
            Tail::Zero => TailDoc::Zero,
            Tail::Geometric { first, ratio } => TailDoc::Geometric {
                first: format_rat(first),
                ratio: format_rat(ratio),
            },
        },
    }
}

fn parse_field(field: &str, s: &str) -> Result<Rat, IoError> {
    parse_rat(s).map_err(|e| IoError::Field {
        field: field.to_string(),
        message: e.to_string(),
    })
}

fn doc_to_sequence(field: &str, doc: &SequenceDoc) -> Result<TailedSequence, IoError> {
    let prefix = doc
        .prefix
        .iter()
        .enumerate()
        .map(|(i, s)| parse_field(&format!("{field}.prefix[{i}]"), s))
        .collect::<Result<Vec<_>, _>>()?;
    match &doc.tail {
        TailDoc::Zero => Ok(TailedSequence::zero_tailed(prefix)),
        TailDoc::Geometric { first, ratio } => {
            let first = parse_field(&format!("{field}.tail.first"), first)?;
            let ratio = parse_field(&format!("{field}.tail.ratio"), ratio)?;
            TailedSequence::geometric(prefix, first, ratio).map_err(|e| IoError::Field {
                field: format!("{field}.tail"),
                message: e.to_string(),
            })
        }
    }
}

pub fn problem_to_document(problem: &LdoLcProblem) -> ProblemDocument {
    ProblemDocument {
        b: format_rat(problem.bound()),
        p: sequence_to_doc(problem.p()),
        c: sequence_to_doc(problem.c()),
        a: sequence_to_doc(problem.a()),
        defaults: None,
    }
}

pub fn document_to_problem(doc: &ProblemDocument) -> Result<LdoLcProblem, IoError> {
    let b = parse_field("b", &doc.b)?;
    let p = doc_to_sequence("p", &doc.p)?;
    let c = doc_to_sequence("c", &doc.c)?;
    let a = doc_to_sequence("a", &doc.a)?;
    Ok(LdoLcProblem::new(b, p, c, a))
}

pub fn problem_to_json(problem: &LdoLcProblem) -> String {
    serde_json::to_string_pretty(&problem_to_document(problem)).expect("document serializes")
}

pub fn problem_from_json(json: &str) -> Result<(LdoLcProblem, RunDefaults), IoError> {
    let doc: ProblemDocument =
        serde_json::from_str(json).map_err(|e| IoError::Json(e.to_string()))?;
    let problem = document_to_problem(&doc)?;
    Ok((problem, doc.defaults.unwrap_or_default()))
}

/// `t,x` rows over the head; the zero tail is implicit.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::from("t,x\n");
    for (i, x) in traj.head().iter().enumerate() {
        out.push_str(&format!("{},{}\n", traj.start() + i, format_rat(x)));
    }
    out
}

/// `t,x,V` rows listing every breakpoint of every value function in the
/// table.
pub fn value_table_csv(table: &ValueTable) -> String {
    let mut out = String::from("t,x,V\n");
    for t in table.start()..=table.horizon() {
        for (x, v) in table.function_at(t).breakpoints() {
            out.push_str(&format!("{t},{},{}\n", format_rat(x), format_rat(v)));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateDoc {
    pub t: usize,
    pub lambda: String,
    pub mu: String,
    pub gamma: String,
}

pub fn certificates_to_json(certs: &[PeriodCertificate]) -> String {
    let docs: Vec<CertificateDoc> = certs
        .iter()
        .map(|c| CertificateDoc {
            t: c.t,
            lambda: format_rat(&c.lambda),
            mu: format_rat(&c.mu),
            gamma: format_rat(&c.gamma),
        })
        .collect();
    serde_json::to_string_pretty(&docs).expect("certificates serialize")
}
