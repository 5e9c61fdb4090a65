//! Text formats: MWIS instances, warm-start vectors, graph6 records, reference
//! tables, solution files and solve results.
//!
//! Parsers are pure functions over `&str`; reading files is the caller's job.
//! All line endings are accepted on input, LF is written.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{GammaSchedule, ScheduleMode, StartOutcome};
use crate::graph::{GraphError, SimpleGraph, WeightedGraph};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IoError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing problem line")]
    MissingProblemLine,
    #[error("missing weight for vertex {0}")]
    MissingWeight(usize),
    #[error("{what} count mismatch: problem line declares {expected}, found {got}")]
    CountMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("expected {expected} values, found {got} lines")]
    LineCount { expected: usize, got: usize },
    #[error("line {0}: value is not finite")]
    NonFinite(usize),
    #[error("graph6: {0}")]
    Graph6(String),
    #[error("result: {0}")]
    Result(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn syntax(line: usize, message: impl Into<String>) -> IoError {
    IoError::Syntax {
        line,
        message: message.into(),
    }
}

fn numbered(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

/// Parses the `p mwis` instance format; file vertex ids are 1-based.
///
/// ```text
/// c comment
/// p mwis <n> <m>
/// n <id> <weight>
/// e <u> <v>
/// ```
pub fn parse_instance(text: &str) -> Result<WeightedGraph, IoError> {
    let mut header: Option<(usize, usize)> = None;
    let mut weights: Vec<Option<f64>> = Vec::new();
    let mut edges = Vec::new();
    for (line, content) in numbered(text) {
        let mut tokens = content.split_whitespace();
        let kind = tokens.next().unwrap_or_default();
        let fields: Vec<&str> = tokens.collect();
        match kind {
            "c" => continue,
            "p" => {
                if header.is_some() {
                    return Err(syntax(line, "duplicate problem line"));
                }
                if fields.len() != 3 || fields[0] != "mwis" {
                    return Err(syntax(line, "expected `p mwis <n> <m>`"));
                }
                let n = parse_count(line, fields[1])?;
                let m = parse_count(line, fields[2])?;
                weights = vec![None; n];
                header = Some((n, m));
            }
            "n" | "e" => {
                let (n, _) = header.ok_or_else(|| syntax(line, "data line before problem line"))?;
                if fields.len() != 2 {
                    return Err(syntax(line, format!("expected `{kind}` followed by two fields")));
                }
                let u = parse_vertex(line, fields[0], n)?;
                if kind == "n" {
                    let w: f64 = fields[1]
                        .parse()
                        .map_err(|_| syntax(line, format!("invalid weight `{}`", fields[1])))?;
                    if weights[u].replace(w).is_some() {
                        return Err(syntax(line, format!("duplicate weight for vertex {}", u + 1)));
                    }
                } else {
                    edges.push((u, parse_vertex(line, fields[1], n)?));
                }
            }
            other => return Err(syntax(line, format!("unknown line type `{other}`"))),
        }
    }
    let (n, m) = header.ok_or(IoError::MissingProblemLine)?;
    if edges.len() != m {
        return Err(IoError::CountMismatch {
            what: "edge",
            expected: m,
            got: edges.len(),
        });
    }
    let weights = weights
        .into_iter()
        .enumerate()
        .map(|(i, w)| w.ok_or(IoError::MissingWeight(i + 1)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(WeightedGraph::new(n, &edges, &weights)?)
}

fn parse_count(line: usize, token: &str) -> Result<usize, IoError> {
    token
        .parse()
        .map_err(|_| syntax(line, format!("invalid count `{token}`")))
}

fn parse_vertex(line: usize, token: &str, n: usize) -> Result<usize, IoError> {
    match token.parse::<usize>() {
        Ok(id) if (1..=n).contains(&id) => Ok(id - 1),
        Ok(id) => Err(IoError::CountMismatch {
            what: "vertex",
            expected: n,
            got: id,
        }),
        Err(_) => Err(syntax(line, format!("invalid vertex id `{token}`"))),
    }
}

/// Renders `g` in the instance format; edges as `u < v`, ascending.
pub fn write_instance(g: &WeightedGraph) -> String {
    let edges = g.edges();
    let mut out = format!("p mwis {} {}\n", g.n(), edges.len());
    for (i, w) in g.weights().iter().enumerate() {
        out.push_str(&format!("n {} {}\n", i + 1, w));
    }
    for (u, v) in edges {
        out.push_str(&format!("e {} {}\n", u + 1, v + 1));
    }
    out
}

/// One finite number per non-empty line, exactly `n` of them.
pub fn parse_warm_start(text: &str, n: usize) -> Result<Vec<f64>, IoError> {
    let lines: Vec<_> = numbered(text).collect();
    if lines.len() != n {
        return Err(IoError::LineCount {
            expected: n,
            got: lines.len(),
        });
    }
    lines
        .into_iter()
        .map(|(line, s)| {
            let value: f64 = s.parse().map_err(|_| syntax(line, format!("invalid number `{s}`")))?;
            if value.is_finite() {
                Ok(value)
            } else {
                Err(IoError::NonFinite(line))
            }
        })
        .collect()
}

const GRAPH6_HEADER: &str = ">>graph6<<";
/// Largest order encoded with a single size byte.
pub const GRAPH6_MAX_N: usize = 62;

fn graph6_payload_len(n: usize) -> usize {
    (n * n.saturating_sub(1) / 2).div_ceil(6)
}

/// Decodes one graph6 record (short form, `n ≤ 62`); an optional `>>graph6<<` header is skipped.
pub fn parse_graph6(record: &str) -> Result<SimpleGraph, IoError> {
    let record = record.trim_end_matches(['\r', '\n']);
    let record = record.strip_prefix(GRAPH6_HEADER).unwrap_or(record);
    let bytes = record.as_bytes();
    if let Some(&b) = bytes.iter().find(|&&b| !(63..=126).contains(&b)) {
        return Err(IoError::Graph6(format!("byte {b} outside [63, 126]")));
    }
    let (&size, payload) = bytes
        .split_first()
        .ok_or_else(|| IoError::Graph6("empty record".into()))?;
    if size == 126 {
        return Err(IoError::Graph6(format!(
            "invalid size byte: orders above {GRAPH6_MAX_N} are not supported"
        )));
    }
    let n = (size - 63) as usize;
    let expected = graph6_payload_len(n);
    if payload.len() != expected {
        return Err(IoError::Graph6(format!(
            "payload length {} does not match {expected} for {n} vertices",
            payload.len()
        )));
    }
    let mut g = SimpleGraph::empty(n)?;
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            if (payload[k / 6] - 63) >> (5 - k % 6) & 1 == 1 {
                g.add_edge(i, j)?;
            }
            k += 1;
        }
    }
    Ok(g)
}

/// Encodes `g` as a graph6 record without header or newline.
pub fn write_graph6(g: &SimpleGraph) -> Result<String, IoError> {
    let n = g.n();
    if n > GRAPH6_MAX_N {
        return Err(IoError::Graph6(format!("order {n} exceeds {GRAPH6_MAX_N}")));
    }
    let mut payload = vec![0u8; graph6_payload_len(n)];
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            if g.has_edge(i, j) {
                payload[k / 6] |= 1 << (5 - k % 6);
            }
            k += 1;
        }
    }
    let mut out = String::with_capacity(payload.len() + 1);
    out.push((63 + n as u8) as char);
    out.extend(payload.into_iter().map(|b| (b + 63) as char));
    Ok(out)
}

/// One graph6 record per non-empty line.
pub fn parse_graph6_stream(text: &str) -> Result<Vec<SimpleGraph>, IoError> {
    numbered(text)
        .map(|(line, record)| {
            parse_graph6(record).map_err(|e| syntax(line, e.to_string()))
        })
        .collect()
}

/// Two-column `name,objective` table; a non-numeric first row is taken as a header.
pub fn parse_reference_csv(text: &str) -> Result<BTreeMap<String, f64>, IoError> {
    let mut out = BTreeMap::new();
    for (index, (line, row)) in numbered(text).enumerate() {
        let fields: Vec<&str> = row.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(syntax(line, "expected two comma-separated columns"));
        }
        let value = match fields[1].parse::<f64>() {
            Ok(v) if v.is_finite() => v,
            Ok(_) => return Err(IoError::NonFinite(line)),
            Err(_) if index == 0 => continue,
            Err(_) => return Err(syntax(line, format!("invalid objective `{}`", fields[1]))),
        };
        if out.insert(fields[0].to_string(), value).is_some() {
            return Err(syntax(line, format!("duplicate instance `{}`", fields[0])));
        }
    }
    Ok(out)
}

/// 0-based member indices separated by commas or whitespace, optionally in braces.
pub fn parse_solution(text: &str) -> Result<Vec<usize>, IoError> {
    let mut members = Vec::new();
    for (line, content) in numbered(text) {
        let content = content.trim_start_matches('{').trim_end_matches('}');
        for token in content.split(|c: char| c == ',' || c.is_whitespace()) {
            let token = token.trim_matches(|c| c == '{' || c == '}');
            if token.is_empty() {
                continue;
            }
            members.push(
                token
                    .parse()
                    .map_err(|_| syntax(line, format!("invalid vertex index `{token}`")))?,
            );
        }
    }
    Ok(members)
}

/// Rounds to 12 significant digits; the canonical rendering of result floats.
pub fn round_sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

mod sig12 {
    use serde::Serializer;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(super::round_sig12(*x))
    }
}

mod sig12_opt {
    use serde::Serializer;

    pub fn serialize<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(x) => s.serialize_some(&super::round_sig12(*x)),
            None => s.serialize_none(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleRecord {
    #[serde(serialize_with = "sig12::serialize")]
    pub gamma0: f64,
    #[serde(serialize_with = "sig12::serialize")]
    pub gamma1: f64,
    pub iterations: usize,
    pub mode: String,
}

impl From<&GammaSchedule> for ScheduleRecord {
    fn from(s: &GammaSchedule) -> Self {
        Self {
            gamma0: s.gamma0,
            gamma1: s.gamma1,
            iterations: s.iterations,
            mode: match s.mode {
                ScheduleMode::Constant => "constant",
                ScheduleMode::Linear => "linear",
            }
            .to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StartRecord {
    /// `seed:<seed>/<index>` or `warm:<id>`.
    pub start: String,
    #[serde(serialize_with = "sig12::serialize")]
    pub objective: f64,
    pub valid: bool,
    pub maximal: bool,
    pub iterations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none", serialize_with = "sig12_opt::serialize")]
    pub wall_time_ms: Option<f64>,
    pub fallback_events: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub instance: String,
    pub n: usize,
    pub edges: usize,
    pub starts: Vec<StartRecord>,
    #[serde(serialize_with = "sig12::serialize")]
    pub best_objective: f64,
    pub best_members: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none", serialize_with = "sig12_opt::serialize")]
    pub reference_objective: Option<f64>,
    /// Best Gap.
    #[serde(default, skip_serializing_if = "Option::is_none", serialize_with = "sig12_opt::serialize")]
    pub gap_percent: Option<f64>,
    /// E[Gap]: mean gap over successful starts.
    #[serde(default, skip_serializing_if = "Option::is_none", serialize_with = "sig12_opt::serialize")]
    pub expected_gap_percent: Option<f64>,
    pub schedule: ScheduleRecord,
    pub version: String,
}

/// `(reference − objective) / reference · 100`, defined for positive references.
pub fn gap_percent(reference: f64, objective: f64) -> Option<f64> {
    (reference > 0.0).then(|| (reference - objective) / reference * 100.0)
}

impl SolveResult {
    /// Collects per-start outcomes; `with_timing = false` drops wall times for
    /// byte-reproducible output.
    pub fn assemble(
        instance: &str,
        g: &WeightedGraph,
        schedule: &GammaSchedule,
        outcomes: &[StartOutcome],
        reference: Option<f64>,
        with_timing: bool,
    ) -> Self {
        let mut best: Option<(f64, Vec<usize>)> = None;
        let starts = outcomes
            .iter()
            .map(|o| match &o.result {
                Ok((run, mis)) => {
                    if mis.independent && best.as_ref().is_none_or(|(w, _)| mis.weight > *w) {
                        best = Some((mis.weight, mis.members.clone()));
                    }
                    StartRecord {
                        start: o.label.clone(),
                        objective: mis.weight,
                        valid: mis.independent,
                        maximal: mis.maximal,
                        iterations: run.iterations,
                        wall_time_ms: with_timing.then_some(o.elapsed.as_secs_f64() * 1e3),
                        fallback_events: run.fallback_events,
                        error: None,
                    }
                }
                Err(e) => StartRecord {
                    start: o.label.clone(),
                    objective: 0.0,
                    valid: false,
                    maximal: false,
                    iterations: 0,
                    wall_time_ms: with_timing.then_some(o.elapsed.as_secs_f64() * 1e3),
                    fallback_events: 0,
                    error: Some(e.to_string()),
                },
            })
            .collect::<Vec<_>>();
        let (best_objective, best_members) = best.unwrap_or((0.0, Vec::new()));
        let gaps: Vec<f64> = reference
            .map(|r| {
                starts
                    .iter()
                    .filter(|s| s.error.is_none() && s.valid)
                    .filter_map(|s| gap_percent(r, s.objective))
                    .collect()
            })
            .unwrap_or_default();
        Self {
            instance: instance.to_string(),
            n: g.n(),
            edges: g.edge_count(),
            starts,
            best_objective,
            best_members,
            reference_objective: reference,
            gap_percent: reference.and_then(|r| gap_percent(r, best_objective)),
            expected_gap_percent: (!gaps.is_empty()).then(|| gaps.iter().sum::<f64>() / gaps.len() as f64),
            schedule: schedule.into(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    /// True iff every start produced a valid maximal independent set.
    pub fn all_valid(&self) -> bool {
        self.starts.iter().all(|s| s.error.is_none() && s.valid && s.maximal)
    }

    pub fn fallback_events(&self) -> usize {
        self.starts.iter().map(|s| s.fallback_events).sum()
    }

    /// Mean wall time per start, when timing was recorded.
    pub fn mean_wall_time_ms(&self) -> Option<f64> {
        let times: Vec<f64> = self.starts.iter().filter_map(|s| s.wall_time_ms).collect();
        (!times.is_empty()).then(|| times.iter().sum::<f64>() / times.len() as f64)
    }
}

/// Pretty-printed JSON with a trailing newline.
pub fn write_result(result: &SolveResult) -> String {
    let mut out = serde_json::to_string_pretty(result).expect("result serializes");
    out.push('\n');
    out
}

pub fn parse_result(text: &str) -> Result<SolveResult, IoError> {
    serde_json::from_str(text).map_err(|e| IoError::Result(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_examples() {
        let g = parse_instance("p mwis 2 1\nn 1 4\nn 2 1\ne 1 2\n").unwrap();
        assert_eq!((g.n(), g.weights(), g.edges()), (2, &[4.0, 1.0][..], vec![(0, 1)]));
        let g = parse_instance("c hello\nc world\r\np mwis 2 1\r\nn 1 4\r\nn 2 1\r\ne 2 1\r\n").unwrap();
        assert_eq!(g.edges(), vec![(0, 1)]);
        assert_eq!(parse_instance("p mwis 2 1\nn 1 4\ne 1 2\n"), Err(IoError::MissingWeight(2)));
    }

    #[test]
    fn instance_errors() {
        assert!(matches!(parse_instance("x 1\n"), Err(IoError::Syntax { line: 1, .. })));
        assert_eq!(parse_instance("c only\n"), Err(IoError::MissingProblemLine));
        assert!(matches!(
            parse_instance("p mwis 2 2\nn 1 1\nn 2 1\ne 1 2\n"),
            Err(IoError::CountMismatch { what: "edge", .. })
        ));
        assert!(matches!(
            parse_instance("p mwis 2 1\nn 1 1\nn 3 1\ne 1 2\n"),
            Err(IoError::CountMismatch { what: "vertex", .. })
        ));
        assert!(matches!(parse_instance("p mwis 1 0\nn 1 -2\n"), Err(IoError::Graph(_))));
        assert!(matches!(parse_instance("p mwis 2 1\nn 1 1\nn 2 1\ne 1 1\n"), Err(IoError::Graph(_))));
    }

    #[test]
    fn instance_round_trip() {
        let g = WeightedGraph::new(3, &[(2, 1), (0, 1)], &[0.1, 2.5, 1e-7]).unwrap();
        let text = write_instance(&g);
        assert_eq!(text, "p mwis 3 2\nn 1 0.1\nn 2 2.5\nn 3 0.0000001\ne 1 2\ne 2 3\n");
        assert_eq!(parse_instance(&text).unwrap(), g);
    }

    #[test]
    fn warm_start() {
        assert_eq!(parse_warm_start("0.5\n0.25\n", 2).unwrap(), vec![0.5, 0.25]);
        assert_eq!(parse_warm_start("0.5\n", 2), Err(IoError::LineCount { expected: 2, got: 1 }));
        assert_eq!(parse_warm_start("nan\n0.1\n", 2), Err(IoError::NonFinite(1)));
        assert!(parse_warm_start("abc\n0.1\n", 2).is_err());
    }

    #[test]
    fn graph6_examples() {
        assert_eq!(parse_graph6("A_").unwrap(), SimpleGraph::complete(2).unwrap());
        assert_eq!(parse_graph6("A?").unwrap(), SimpleGraph::empty(2).unwrap());
        assert!(matches!(parse_graph6("B"), Err(IoError::Graph6(_))));
        assert!(parse_graph6("A\x7f").is_err());
        assert!(parse_graph6(">>graph6<<A_\r\n").is_ok());
        assert_eq!(write_graph6(&SimpleGraph::complete(2).unwrap()).unwrap(), "A_");
        // C₅ labeled around the cycle.
        assert_eq!(write_graph6(&SimpleGraph::cycle(5).unwrap()).unwrap(), "Dhc");
        assert_eq!(parse_graph6_stream("").unwrap(), Vec::new());
    }

    #[test]
    fn reference_and_solution() {
        let refs = parse_reference_csv("name,objective\nk2,4\nbig, 12.5\n").unwrap();
        assert_eq!(refs.get("big"), Some(&12.5));
        assert_eq!(refs.len(), 2);
        assert!(parse_reference_csv("a,1\nb\n").is_err());
        assert_eq!(parse_solution("{0,2}\n").unwrap(), vec![0, 2]);
        assert_eq!(parse_solution("1 3\n4").unwrap(), vec![1, 3, 4]);
        assert_eq!(parse_solution("{}").unwrap(), Vec::<usize>::new());
        assert!(parse_solution("{a}").is_err());
    }

    fn toy_result(reference: Option<f64>) -> SolveResult {
        SolveResult {
            instance: "toy".into(),
            n: 2,
            edges: 1,
            starts: vec![StartRecord {
                start: "seed:0/0".into(),
                objective: 99.0,
                valid: true,
                maximal: true,
                iterations: 1000,
                wall_time_ms: Some(1.0 / 3.0),
                fallback_events: 0,
                error: None,
            }],
            best_objective: 99.0,
            best_members: vec![0],
            reference_objective: reference,
            gap_percent: reference.and_then(|r| gap_percent(r, 99.0)),
            expected_gap_percent: None,
            schedule: (&GammaSchedule::pursuit_default()).into(),
            version: "0".into(),
        }
    }

    #[test]
    fn result_rendering() {
        let with = toy_result(Some(100.0));
        assert_eq!(with.gap_percent, Some(1.0));
        let text = write_result(&with);
        assert!(text.contains("\"gap_percent\": 1.0"));
        assert!(text.contains("\"wall_time_ms\": 0.333333333333"));
        let again = write_result(&parse_result(&text).unwrap());
        assert_eq!(text, again);
        let without = write_result(&toy_result(None));
        assert!(!without.contains("gap_percent"));
        assert!(!without.contains("reference_objective"));
    }
}
