//! Results documents: JSON and CSV rendering and parsing.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::stats::{rank_test, summarize, SummaryStats, MIN_RANK_SAMPLE};
use super::{fitness_by_heuristic, ExperimentSpec, HarnessError, RunRecord};
use crate::heuristics::Heuristic;

pub const SIGNIFICANT_DIGITS: usize = 6;
pub const CSV_HEADER: [&str; 6] = [
    "heuristic",
    "run",
    "seed",
    "best_fitness",
    "evaluations",
    "wall_ms",
];
pub const RANK_TEST_METHOD: &str =
    "two-sided Mann-Whitney U, normal approximation with tie and continuity correction";

/// Rounds to [`SIGNIFICANT_DIGITS`]; non-finite values pass through.
pub fn round_significant(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses")
}

/// Finite reals as numbers, anything else as `null`; `null` reads back as −∞.
pub mod fitness_repr {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NEG_INFINITY))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PValue(#[serde(with = "fitness_repr")] pub f64);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ResultsDocument {
    pub spec: ExperimentSpec,
    pub records: Vec<RunRecord>,
    pub summaries: Summaries,
    /// Keyed `a-b` for every pair of heuristics with enough runs.
    pub p_values: PValues,
    pub rank_test: String,
}

fn round_summary(s: SummaryStats) -> SummaryStats {
    SummaryStats {
        avg: round_significant(s.avg),
        max: round_significant(s.max),
        var: round_significant(s.var),
        n: s.n,
    }
}

pub type Summaries = BTreeMap<String, SummaryStats>;
pub type PValues = BTreeMap<String, PValue>;

/// Summaries per heuristic and pairwise p-values, from already rounded records.
pub fn statistics(records: &[RunRecord]) -> Result<(Summaries, PValues), HarnessError> {
    let groups = fitness_by_heuristic(records);
    let mut summaries = BTreeMap::new();
    for (h, values) in &groups {
        summaries.insert(h.name().to_string(), round_summary(summarize(values)?));
    }
    let mut p_values = BTreeMap::new();
    let present: Vec<(&Heuristic, &Vec<f64>)> = groups.iter().collect();
    for (i, (ha, a)) in present.iter().enumerate() {
        for (hb, b) in &present[i + 1..] {
            if a.len() >= MIN_RANK_SAMPLE && b.len() >= MIN_RANK_SAMPLE {
                let p = round_significant(rank_test(a, b)?);
                p_values.insert(format!("{}-{}", ha.name(), hb.name()), PValue(p));
            }
        }
    }
    Ok((summaries, p_values))
}

impl ResultsDocument {
    pub fn new(spec: ExperimentSpec, mut records: Vec<RunRecord>) -> Result<Self, HarnessError> {
        for r in &mut records {
            r.best_fitness = round_significant(r.best_fitness);
        }
        let (summaries, p_values) = statistics(&records)?;
        Ok(ResultsDocument {
            spec,
            records,
            summaries,
            p_values,
            rank_test: RANK_TEST_METHOD.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("results serialize");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(text).map_err(|e| HarnessError::Parse(e.to_string()))
    }

    pub fn to_csv(&self) -> String {
        records_to_csv(&self.records)
    }

    /// The JSON with every `wallMs` zeroed, for determinism comparisons.
    pub fn without_wall_clock(&self) -> Self {
        let mut doc = self.clone();
        doc.records.iter_mut().for_each(|r| r.wall_ms = 0);
        doc
    }
}

fn render_number(x: f64) -> String {
    if x.is_finite() {
        round_significant(x).to_string()
    } else {
        String::new()
    }
}

pub fn records_to_csv(records: &[RunRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in records {
        w.write_record([
            r.heuristic.name().to_string(),
            r.run.to_string(),
            r.seed.to_string(),
            render_number(r.best_fitness),
            r.evaluations.to_string(),
            r.wall_ms.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

/// CSV rows carry no trees; `best_tree` comes back empty. An empty
/// fitness cell reads as −∞.
pub fn records_from_csv(text: &str) -> Result<Vec<RunRecord>, HarnessError> {
    let parse_err = |e: &dyn std::fmt::Display| HarnessError::Parse(e.to_string());
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| parse_err(&e))?;
    if header.iter().ne(CSV_HEADER) {
        return Err(HarnessError::Parse(format!(
            "unexpected CSV header {:?}",
            header.iter().collect::<Vec<_>>()
        )));
    }
    let mut records = Vec::new();
    for (line, row) in reader.records().enumerate() {
        let row = row.map_err(|e| parse_err(&e))?;
        let field = |i: usize| row.get(i).unwrap_or("").trim();
        let bad = |i: usize| {
            HarnessError::Parse(format!(
                "row {}: bad {} {:?}",
                line + 1,
                CSV_HEADER[i],
                field(i)
            ))
        };
        let heuristic: Heuristic = field(0).parse().map_err(|_| bad(0))?;
        let best_fitness = match field(3) {
            "" => f64::NEG_INFINITY,
            v => v.parse().map_err(|_| bad(3))?,
        };
        records.push(RunRecord {
            heuristic,
            run: field(1).parse().map_err(|_| bad(1))?,
            seed: field(2).parse().map_err(|_| bad(2))?,
            best_fitness,
            best_tree: String::new(),
            evaluations: field(4).parse().map_err(|_| bad(4))?,
            wall_ms: field(5).parse().map_err(|_| bad(5))?,
        });
    }
    Ok(records)
}

/// Records from a results file, JSON or CSV by content.
pub fn records_from_text(text: &str) -> Result<Vec<RunRecord>, HarnessError> {
    if text.trim_start().starts_with('{') {
        Ok(ResultsDocument::from_json(text)?.records)
    } else {
        records_from_csv(text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(HarnessError::InvalidParameter {
                key: "format".into(),
                value: s.to_string(),
                reason: "expected json or csv".into(),
            }),
        }
    }
}

pub fn emit_results(
    doc: &ResultsDocument,
    format: Format,
    out: &mut dyn Write,
) -> Result<(), HarnessError> {
    let text = match format {
        Format::Json => doc.to_json(),
        Format::Csv => doc.to_csv(),
    };
    out.write_all(text.as_bytes())
        .map_err(|e| HarnessError::Io(e.to_string()))
}
