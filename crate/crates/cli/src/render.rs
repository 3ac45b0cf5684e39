//! Report rendering: a stable JSON document (`version: 1`) and a
//! one-finding-per-line text form.

use serde::{Deserialize, Serialize};

use ajlint_core::classifier::{
    AdviceFinding, ClassificationReport, InvasivenessPattern, StructuralFinding,
};
use ajlint_core::span::Span;

#[derive(Clone, Copy, Debug, Eq, PartialEq)]
pub enum OutputFormat {
    Text,
    Json,
}

pub fn render_report(report: &ClassificationReport, format: OutputFormat, map: bool) -> String {
    match format {
        OutputFormat::Json => {
            let doc = ReportDoc::from_report(report, map);
            let mut text = serde_json::to_string_pretty(&doc)
                .expect("report serialization cannot fail");
            text.push('\n');
            text
        }
        OutputFormat::Text => render_text(report),
    }
}

fn pattern_label(finding: &AdviceFinding, pattern: InvasivenessPattern) -> String {
    if pattern == InvasivenessPattern::Replacement {
        if let Some(flavor) = finding.classification.flavor {
            return format!("Replacement({})", flavor.as_str());
        }
    }
    pattern.as_str().to_string()
}

fn render_text(report: &ClassificationReport) -> String {
    let mut out = String::new();
    for finding in &report.findings {
        let patterns: Vec<String> = finding
            .classification
            .patterns
            .iter()
            .map(|p| pattern_label(finding, *p))
            .collect();
        out.push_str(&format!(
            "{}:{}: {}.advice{}({}) -> {}\n",
            finding.span.file,
            finding.span.start.line,
            finding.id.aspect,
            finding.id.ordinal + 1,
            finding.kind,
            patterns.join(",")
        ));
    }
    for s in &report.structural {
        out.push_str(&format!(
            "{}:{}: {} -> {} ({})\n",
            s.span.file, s.span.start.line, s.aspect, s.pattern, s.detail
        ));
    }
    out
}

// --- JSON document ------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct ReportDoc {
    pub version: u32,
    pub findings: Vec<FindingDoc>,
    pub structural: Vec<StructuralDoc>,
    pub summary: SummaryDoc,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct FindingDoc {
    pub file: String,
    pub aspect: String,
    pub advice: AdviceDoc,
    pub patterns: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flavor: Option<String>,
    pub evidence: Vec<EvidenceDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coarse: Option<CoarseDoc>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct AdviceDoc {
    pub kind: String,
    pub ordinal: usize,
    pub span: SpanDoc,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "camelCase")]
pub struct SpanDoc {
    pub line: u32,
    pub column: u32,
    pub end_line: u32,
    pub end_column: u32,
}

impl SpanDoc {
    fn from_span(span: &Span) -> SpanDoc {
        SpanDoc {
            line: span.start.line,
            column: span.start.column,
            end_line: span.end.line,
            end_column: span.end.column,
        }
    }
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct EvidenceDoc {
    pub pattern: String,
    pub span: SpanDoc,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "camelCase")]
pub struct CoarseDoc {
    pub katz: String,
    pub clifton_leavens: String,
    pub note: String,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct StructuralDoc {
    pub file: String,
    pub aspect: String,
    pub pattern: String,
    pub target: String,
    pub detail: String,
    pub span: SpanDoc,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct SummaryDoc {
    pub counts: CountsDoc,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct CountsDoc {
    #[serde(rename = "Augmentation")]
    pub augmentation: u64,
    #[serde(rename = "Replacement")]
    pub replacement: u64,
    #[serde(rename = "ConditionalReplacement")]
    pub conditional_replacement: u64,
    #[serde(rename = "Multiple")]
    pub multiple: u64,
    #[serde(rename = "Crossing")]
    pub crossing: u64,
    #[serde(rename = "Read")]
    pub read: u64,
    #[serde(rename = "Write")]
    pub write: u64,
    #[serde(rename = "ArgumentPassing")]
    pub argument_passing: u64,
    #[serde(rename = "Hierarchy")]
    pub hierarchy: u64,
    #[serde(rename = "FieldAddition")]
    pub field_addition: u64,
    #[serde(rename = "OperationAddition")]
    pub operation_addition: u64,
}

impl ReportDoc {
    pub fn from_report(report: &ClassificationReport, map: bool) -> ReportDoc {
        let findings = report
            .findings
            .iter()
            .map(|f| FindingDoc {
                file: f.span.file.to_string(),
                aspect: f.id.aspect.clone(),
                advice: AdviceDoc {
                    kind: f.kind.as_str().to_string(),
                    ordinal: f.id.ordinal + 1,
                    span: SpanDoc::from_span(&f.span),
                },
                patterns: f
                    .classification
                    .patterns
                    .iter()
                    .map(|p| p.as_str().to_string())
                    .collect(),
                flavor: f.classification.flavor.map(|fl| fl.as_str().to_string()),
                evidence: f
                    .classification
                    .evidence
                    .iter()
                    .map(|(p, span)| EvidenceDoc {
                        pattern: p.as_str().to_string(),
                        span: SpanDoc::from_span(span),
                    })
                    .collect(),
                coarse: map.then(|| CoarseDoc {
                    katz: f.classification.coarse.katz.as_str().to_string(),
                    clifton_leavens: f.classification.coarse.clifton_leavens.as_str().to_string(),
                    note: "heuristic mapping".to_string(),
                }),
            })
            .collect();
        let structural = report
            .structural
            .iter()
            .map(|s: &StructuralFinding| StructuralDoc {
                file: s.span.file.to_string(),
                aspect: s.aspect.clone(),
                pattern: s.pattern.as_str().to_string(),
                target: s.target.clone(),
                detail: s.detail.clone(),
                span: SpanDoc::from_span(&s.span),
            })
            .collect();
        let g = |p: InvasivenessPattern| report.summary.get(p);
        ReportDoc {
            version: 1,
            findings,
            structural,
            summary: SummaryDoc {
                counts: CountsDoc {
                    augmentation: g(InvasivenessPattern::Augmentation),
                    replacement: g(InvasivenessPattern::Replacement),
                    conditional_replacement: g(InvasivenessPattern::ConditionalReplacement),
                    multiple: g(InvasivenessPattern::Multiple),
                    crossing: g(InvasivenessPattern::Crossing),
                    read: g(InvasivenessPattern::Read),
                    write: g(InvasivenessPattern::Write),
                    argument_passing: g(InvasivenessPattern::ArgumentPassing),
                    hierarchy: g(InvasivenessPattern::Hierarchy),
                    field_addition: g(InvasivenessPattern::FieldAddition),
                    operation_addition: g(InvasivenessPattern::OperationAddition),
                },
            },
        }
    }
}
