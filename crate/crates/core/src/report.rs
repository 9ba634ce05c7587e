//! Structured reports for classification runs and catalog sweeps.

use std::fmt::Write as _;
use std::time::Duration;

use serde::Serialize;

use crate::catalog::{family_params, FamilySpec};
use crate::chirality::{chirality_invariant, ChiralityData};
use crate::group::{Case, Classification, FiniteGroup, Witness};

pub const SCHEMA: u32 = 1;

/// Round to 12 decimals and drop negative zero, so that printed floats are
/// stable across platforms.
pub fn tidy(x: f64) -> f64 {
    let r = (x * 1e12).round() / 1e12;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputEcho {
    pub name: String,
    pub generators: Vec<String>,
    pub max_order: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum WitnessReport {
    Vector([f64; 4]),
    Element(String),
    Conjugator(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ElementRow {
    pub element: String,
    pub trace: f64,
    pub det: i8,
    pub order: usize,
    pub has_invariant_line: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiralRow {
    pub element: String,
    #[serde(flatten)]
    pub data: ChiralityData,
}

/// Result of classifying one group.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema: u32,
    pub input: InputEcho,
    pub order: usize,
    pub case: Case,
    pub witness: Option<WitnessReport>,
    pub elements: Vec<ElementRow>,
    pub chirality: Vec<ChiralRow>,
    /// Excluded from determinism comparisons.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

impl Report {
    pub fn new(input: InputEcho, group: &FiniteGroup, classification: &Classification, elapsed: Option<Duration>) -> Report {
        let witness = match &classification.witness {
            Witness::InvariantLine { vector, .. } => {
                Some(WitnessReport::Vector([tidy(vector[0]), tidy(vector[1]), tidy(vector[2]), tidy(vector[3])]))
            }
            Witness::ChiralElement(e) => Some(WitnessReport::Element(e.to_string())),
            Witness::GroupK { conjugator } => conjugator.as_ref().map(|h| WitnessReport::Conjugator(h.to_string())),
        };
        let elements = group
            .elements()
            .iter()
            .zip(group.element_orders())
            .map(|(e, &order)| ElementRow {
                element: e.to_string(),
                trace: tidy(e.trace()),
                det: e.det().round() as i8,
                order,
                has_invariant_line: e.has_invariant_line(),
            })
            .collect();
        let chirality = group
            .elements()
            .iter()
            .filter(|e| !e.has_invariant_line())
            .filter_map(|e| {
                chirality_invariant(e).ok().map(|data| ChiralRow {
                    element: e.to_string(),
                    data,
                })
            })
            .collect();
        Report {
            schema: SCHEMA,
            input,
            order: group.order(),
            case: classification.case(),
            witness,
            elements,
            chirality,
            timing_ms: elapsed.map(|d| d.as_secs_f64() * 1e3),
        }
    }

    /// The report with timing removed.
    pub fn canonical(&self) -> Report {
        Report {
            timing_ms: None,
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Human-readable form.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "schema: {}", self.schema);
        let _ = writeln!(out, "name: {}", self.input.name);
        let _ = writeln!(out, "generators: {}", self.input.generators.join(" ; "));
        let _ = writeln!(out, "order: {}", self.order);
        let _ = writeln!(out, "case: {}", self.case);
        match &self.witness {
            Some(WitnessReport::Vector(v)) => {
                let _ = writeln!(out, "witness: invariant line ({}, {}, {}, {})", v[0], v[1], v[2], v[3]);
            }
            Some(WitnessReport::Element(e)) => {
                let _ = writeln!(out, "witness: element without invariant line {e}");
            }
            Some(WitnessReport::Conjugator(h)) => {
                let _ = writeln!(out, "witness: conjugator to K {h}");
            }
            None => {
                let _ = writeln!(out, "witness: none");
            }
        }
        let _ = writeln!(out, "elements:");
        for row in &self.elements {
            let _ = writeln!(
                out,
                "  {:<48} trace {:>8.4} det {:>2} order {:>4} line {}",
                row.element, row.trace, row.det, row.order, row.has_invariant_line
            );
        }
        if !self.chirality.is_empty() {
            let _ = writeln!(out, "chirality:");
            for row in &self.chirality {
                let d = &row.data;
                let _ = writeln!(
                    out,
                    "  {:<48} m {} a ({}, {}) isoclinic {} lk {:+} class {}",
                    row.element, d.m, d.a1, d.a2, d.isoclinic, d.lk_sign, d.lk_class
                );
            }
        }
        if let Some(ms) = self.timing_ms {
            let _ = writeln!(out, "timing_ms: {ms:.3}");
        }
        out
    }
}

/// One row of a catalog sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub spec: String,
    pub family: String,
    pub params: Vec<(String, i64)>,
    pub order: Option<usize>,
    /// `None` when classification failed; see `error`.
    pub case: Option<Case>,
    pub expected: Option<Case>,
    pub matches: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl SweepRow {
    pub fn run(spec: &FamilySpec, max_order: usize) -> SweepRow {
        let names = family_params(spec.family()).expect("catalog families are known");
        let params = names.iter().map(|n| n.to_string()).zip(spec.params()).collect();
        let expected = spec.expected_classification();
        let (order, case, error) = match spec.group(max_order) {
            Err(e) => (None, None, Some(e.to_string())),
            Ok(g) => match g.classify() {
                Ok(c) => (Some(g.order()), Some(c.case()), None),
                Err(e) => (Some(g.order()), None, Some(e.to_string())),
            },
        };
        let matches = match (case, expected) {
            (Some(c), Some(e)) => Some(c == e),
            _ => None,
        };
        SweepRow {
            spec: spec.to_string(),
            family: spec.family().to_string(),
            params,
            order,
            case,
            expected,
            matches,
            error,
        }
    }

    pub fn label(&self) -> &str {
        &self.spec
    }
}

/// Counts over a sweep.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SweepSummary {
    pub groups: usize,
    pub invariant_line: usize,
    pub chiral_element: usize,
    pub group_k: usize,
    pub errors: usize,
    pub mismatches: usize,
}

impl SweepSummary {
    pub fn of(rows: &[SweepRow]) -> SweepSummary {
        let mut s = SweepSummary {
            groups: rows.len(),
            ..Default::default()
        };
        for row in rows {
            match row.case {
                Some(Case::InvariantLine) => s.invariant_line += 1,
                Some(Case::ChiralElement) => s.chiral_element += 1,
                Some(Case::GroupK) => s.group_k += 1,
                None => s.errors += 1,
            }
            if row.matches == Some(false) {
                s.mismatches += 1;
            }
        }
        s
    }

    pub fn line(&self) -> String {
        format!(
            "groups {} | InvariantLine {} | ChiralElement {} | GroupK {} | errors {} | mismatches {}",
            self.groups, self.invariant_line, self.chiral_element, self.group_k, self.errors, self.mismatches
        )
    }
}

/// A sweep with its summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub schema: u32,
    pub rows: Vec<SweepRow>,
    pub summary: SweepSummary,
}

impl SweepReport {
    pub fn new(rows: Vec<SweepRow>) -> SweepReport {
        let summary = SweepSummary::of(&rows);
        SweepReport {
            schema: SCHEMA,
            rows,
            summary,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            let case = row.case.map_or_else(|| format!("error: {}", row.error.as_deref().unwrap_or("")), |c| c.to_string());
            let expected = row.expected.map_or("-".to_string(), |c| c.to_string());
            let flag = match row.matches {
                Some(true) => "ok",
                Some(false) => "MISMATCH",
                None => "",
            };
            let order = row.order.map_or("-".to_string(), |o| o.to_string());
            let _ = writeln!(out, "{:<44} order {:>5}  {:<14} expected {:<14} {}", row.label(), order, case, expected, flag);
        }
        let _ = writeln!(out, "{}", self.summary.line());
        out
    }
}
