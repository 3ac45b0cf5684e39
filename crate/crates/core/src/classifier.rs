//! Maps advice facts and aspect structure onto the invasiveness-pattern
//! taxonomy, enforces its compatibility rules, and assembles the
//! classification report with coarse mappings to related taxonomies.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::flowanalysis::{advice_facts, AdviceFacts};
use crate::model::{AdviceId, AspectDecl, ProgramModel};
use crate::span::{Diagnostic, Span};
use crate::syntax::ast::AdviceKind;

/// The eleven invasiveness patterns. Control-flow and data-access
/// patterns attach to advices; structural patterns attach to aspects.
#[derive(Clone, Copy, Debug, Eq, PartialEq, Ord, PartialOrd, Hash)]
pub enum InvasivenessPattern {
    Augmentation,
    Replacement,
    ConditionalReplacement,
    Multiple,
    Crossing,
    Read,
    Write,
    ArgumentPassing,
    Hierarchy,
    FieldAddition,
    OperationAddition,
}

impl InvasivenessPattern {
    pub const ALL: [InvasivenessPattern; 11] = [
        InvasivenessPattern::Augmentation,
        InvasivenessPattern::Replacement,
        InvasivenessPattern::ConditionalReplacement,
        InvasivenessPattern::Multiple,
        InvasivenessPattern::Crossing,
        InvasivenessPattern::Read,
        InvasivenessPattern::Write,
        InvasivenessPattern::ArgumentPassing,
        InvasivenessPattern::Hierarchy,
        InvasivenessPattern::FieldAddition,
        InvasivenessPattern::OperationAddition,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            InvasivenessPattern::Augmentation => "Augmentation",
            InvasivenessPattern::Replacement => "Replacement",
            InvasivenessPattern::ConditionalReplacement => "ConditionalReplacement",
            InvasivenessPattern::Multiple => "Multiple",
            InvasivenessPattern::Crossing => "Crossing",
            InvasivenessPattern::Read => "Read",
            InvasivenessPattern::Write => "Write",
            InvasivenessPattern::ArgumentPassing => "ArgumentPassing",
            InvasivenessPattern::Hierarchy => "Hierarchy",
            InvasivenessPattern::FieldAddition => "FieldAddition",
            InvasivenessPattern::OperationAddition => "OperationAddition",
        }
    }

    pub fn from_str(s: &str) -> Option<InvasivenessPattern> {
        Self::ALL.iter().copied().find(|p| p.as_str() == s)
    }

    pub fn is_control_flow_exclusive(&self) -> bool {
        matches!(
            self,
            InvasivenessPattern::Augmentation
                | InvasivenessPattern::Replacement
                | InvasivenessPattern::ConditionalReplacement
        )
    }
}

impl fmt::Display for InvasivenessPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, Eq, PartialEq, Ord, PartialOrd)]
pub enum ReplacementFlavor {
    Full,
    Result,
}

impl ReplacementFlavor {
    pub fn as_str(&self) -> &'static str {
        match self {
            ReplacementFlavor::Full => "full",
            ReplacementFlavor::Result => "result",
        }
    }
}

#[derive(Clone, Copy, Debug, Eq, PartialEq, Ord, PartialOrd)]
pub enum Katz {
    Spectative,
    Regulatory,
    Invasive,
}

impl Katz {
    pub fn as_str(&self) -> &'static str {
        match self {
            Katz::Spectative => "Spectative",
            Katz::Regulatory => "Regulatory",
            Katz::Invasive => "Invasive",
        }
    }
}

#[derive(Clone, Copy, Debug, Eq, PartialEq, Ord, PartialOrd)]
pub enum CliftonLeavens {
    Spectator,
    Assistant,
}

impl CliftonLeavens {
    pub fn as_str(&self) -> &'static str {
        match self {
            CliftonLeavens::Spectator => "Spectator",
            CliftonLeavens::Assistant => "Assistant",
        }
    }
}

/// Heuristic projections of the fine-grained patterns onto the coarse
/// taxonomies from related work.
#[derive(Clone, Copy, Debug, Eq, PartialEq)]
pub struct CoarseMapping {
    pub katz: Katz,
    pub clifton_leavens: CliftonLeavens,
}

#[derive(Clone, Debug)]
pub struct AdviceClassification {
    pub patterns: BTreeSet<InvasivenessPattern>,
    pub flavor: Option<ReplacementFlavor>,
    /// Every pattern maps to at least one source span.
    pub evidence: Vec<(InvasivenessPattern, Span)>,
    pub coarse: CoarseMapping,
}

#[derive(Clone, Debug, Error)]
#[error("internal classifier inconsistency: {message}")]
pub struct InternalInconsistency {
    pub message: String,
}

/// Assigns invasiveness patterns to one advice from its static facts.
///
/// Exactly one of Augmentation / Replacement / ConditionalReplacement is
/// chosen; data-access patterns co-occur freely with it.
pub fn classify_advice(facts: &AdviceFacts) -> Result<AdviceClassification, InternalInconsistency> {
    let mut patterns = BTreeSet::new();
    let mut evidence: Vec<(InvasivenessPattern, Span)> = Vec::new();
    let add = |patterns: &mut BTreeSet<InvasivenessPattern>,
                   evidence: &mut Vec<(InvasivenessPattern, Span)>,
                   pattern: InvasivenessPattern,
                   spans: &[Span]| {
        patterns.insert(pattern);
        let fallback = [facts.advice_span.clone()];
        let spans = if spans.is_empty() { &fallback[..] } else { spans };
        for span in spans {
            if !evidence.contains(&(pattern, span.clone())) {
                evidence.push((pattern, span.clone()));
            }
        }
    };

    let mut flavor = None;
    match facts.kind {
        AdviceKind::Before | AdviceKind::After => {
            add(&mut patterns, &mut evidence, InvasivenessPattern::Augmentation, &[]);
        }
        AdviceKind::Around => {
            if facts.interval.max.is_zero() {
                flavor = Some(ReplacementFlavor::Full);
                add(&mut patterns, &mut evidence, InvasivenessPattern::Replacement, &[]);
            } else if facts.interval.min >= 1 && facts.replaces_result {
                flavor = Some(ReplacementFlavor::Result);
                add(
                    &mut patterns,
                    &mut evidence,
                    InvasivenessPattern::Replacement,
                    &facts.result_replacement_spans,
                );
            } else if facts.interval.min >= 1 {
                add(
                    &mut patterns,
                    &mut evidence,
                    InvasivenessPattern::Augmentation,
                    &facts.proceed_spans,
                );
            } else {
                add(
                    &mut patterns,
                    &mut evidence,
                    InvasivenessPattern::ConditionalReplacement,
                    &facts.proceed_spans,
                );
            }
        }
    }

    if facts.interval.max.at_least(2) {
        let spans = if facts.looped_proceed_spans.is_empty() {
            facts.proceed_spans.clone()
        } else {
            facts.looped_proceed_spans.clone()
        };
        add(&mut patterns, &mut evidence, InvasivenessPattern::Multiple, &spans);
    }
    if !facts.external_calls.is_empty() {
        let spans: Vec<Span> =
            facts.external_calls.values().flat_map(|v| v.iter().cloned()).collect();
        add(&mut patterns, &mut evidence, InvasivenessPattern::Crossing, &spans);
    }
    if !facts.fields_read.is_empty() {
        let spans: Vec<Span> =
            facts.fields_read.values().flat_map(|v| v.iter().cloned()).collect();
        add(&mut patterns, &mut evidence, InvasivenessPattern::Read, &spans);
    }
    if !facts.fields_written.is_empty() {
        let spans: Vec<Span> =
            facts.fields_written.values().flat_map(|v| v.iter().cloned()).collect();
        add(&mut patterns, &mut evidence, InvasivenessPattern::Write, &spans);
    }
    if facts.modifies_proceed_args {
        add(
            &mut patterns,
            &mut evidence,
            InvasivenessPattern::ArgumentPassing,
            &facts.arg_passing_spans,
        );
    }

    let exclusive = patterns.iter().filter(|p| p.is_control_flow_exclusive()).count();
    if exclusive != 1 {
        return Err(InternalInconsistency {
            message: format!(
                "expected exactly one control-flow pattern, found {exclusive} in {patterns:?}"
            ),
        });
    }

    let coarse = coarse_mapping(&patterns);
    Ok(AdviceClassification { patterns, flavor, evidence, coarse })
}

/// Katz: Spectative advices observe only (Augmentation/Read, no external
/// calls); Regulatory advices steer control flow without touching data;
/// everything that writes fields or swaps arguments is Invasive.
/// Clifton–Leavens: Spectator coincides with Spectative, else Assistant.
pub fn coarse_mapping(patterns: &BTreeSet<InvasivenessPattern>) -> CoarseMapping {
    let spectative = patterns
        .iter()
        .all(|p| matches!(p, InvasivenessPattern::Augmentation | InvasivenessPattern::Read));
    let katz = if spectative {
        Katz::Spectative
    } else if !patterns.contains(&InvasivenessPattern::Write)
        && !patterns.contains(&InvasivenessPattern::ArgumentPassing)
    {
        Katz::Regulatory
    } else {
        Katz::Invasive
    };
    let clifton_leavens =
        if spectative { CliftonLeavens::Spectator } else { CliftonLeavens::Assistant };
    CoarseMapping { katz, clifton_leavens }
}

/// One structural pattern instance attached to an aspect.
#[derive(Clone, Debug)]
pub struct StructuralFinding {
    pub aspect: String,
    pub pattern: InvasivenessPattern,
    pub target: String,
    pub detail: String,
    pub span: Span,
}

/// Structural patterns: one finding per declare-parents, inter-type
/// field, and inter-type method declaration.
pub fn classify_structural(aspect: &AspectDecl) -> Vec<StructuralFinding> {
    let mut findings = Vec::new();
    for p in &aspect.parent_decls {
        findings.push(StructuralFinding {
            aspect: aspect.name.clone(),
            pattern: InvasivenessPattern::Hierarchy,
            target: p.target.clone(),
            detail: format!("{} implements {}", p.target, p.interface),
            span: p.span.clone(),
        });
    }
    for f in &aspect.inter_type_fields {
        findings.push(StructuralFinding {
            aspect: aspect.name.clone(),
            pattern: InvasivenessPattern::FieldAddition,
            target: f.target.clone(),
            detail: format!("{}.{}", f.target, f.name),
            span: f.span.clone(),
        });
    }
    for m in &aspect.inter_type_methods {
        findings.push(StructuralFinding {
            aspect: aspect.name.clone(),
            pattern: InvasivenessPattern::OperationAddition,
            target: m.target.clone(),
            detail: format!("{}.{}", m.target, m.name),
            span: m.span.clone(),
        });
    }
    findings
}

/// Per-pattern totals over a whole report.
#[derive(Clone, Debug, Default, Eq, PartialEq)]
pub struct SummaryCounts {
    counts: BTreeMap<InvasivenessPattern, u64>,
}

impl SummaryCounts {
    pub fn add(&mut self, pattern: InvasivenessPattern) {
        *self.counts.entry(pattern).or_insert(0) += 1;
    }

    pub fn get(&self, pattern: InvasivenessPattern) -> u64 {
        self.counts.get(&pattern).copied().unwrap_or(0)
    }

    /// All eleven patterns in canonical order, including zero counts.
    pub fn entries(&self) -> Vec<(InvasivenessPattern, u64)> {
        InvasivenessPattern::ALL.iter().map(|p| (*p, self.get(*p))).collect()
    }
}

/// One classified advice, positioned in its source file.
#[derive(Clone, Debug)]
pub struct AdviceFinding {
    pub id: AdviceId,
    pub kind: AdviceKind,
    pub span: Span,
    pub classification: AdviceClassification,
}

#[derive(Clone, Debug, Default)]
pub struct ClassificationReport {
    /// Advice findings in deterministic order: file, then source position.
    pub findings: Vec<AdviceFinding>,
    pub structural: Vec<StructuralFinding>,
    pub summary: SummaryCounts,
}

/// Assembles the deterministic report from per-advice classifications.
pub fn build_report(
    model: &ProgramModel,
    classifications: &BTreeMap<AdviceId, AdviceClassification>,
) -> ClassificationReport {
    let mut findings = Vec::new();
    for advice in model.advices_in_order() {
        if let Some(classification) = classifications.get(&advice.id) {
            findings.push(AdviceFinding {
                id: advice.id.clone(),
                kind: advice.kind,
                span: advice.span.clone(),
                classification: classification.clone(),
            });
        }
    }
    findings.sort_by(|a, b| {
        (a.span.file.as_ref(), a.span.start).cmp(&(b.span.file.as_ref(), b.span.start))
    });

    let mut structural = Vec::new();
    for name in &model.aspect_order {
        if let Some(aspect) = model.aspects.get(name) {
            structural.extend(classify_structural(aspect));
        }
    }
    structural.sort_by(|a, b| {
        (a.span.file.as_ref(), a.span.start).cmp(&(b.span.file.as_ref(), b.span.start))
    });

    let mut summary = SummaryCounts::default();
    for finding in &findings {
        for p in &finding.classification.patterns {
            summary.add(*p);
        }
    }
    for s in &structural {
        summary.add(s.pattern);
    }

    ClassificationReport { findings, structural, summary }
}

/// Full static analysis of a resolved model: facts, classifications, and
/// the assembled report, plus non-fatal warnings (empty shadow sets).
#[derive(Clone, Debug)]
pub struct Analysis {
    pub facts: BTreeMap<AdviceId, AdviceFacts>,
    pub classifications: BTreeMap<AdviceId, AdviceClassification>,
    pub report: ClassificationReport,
    pub warnings: Vec<Diagnostic>,
}

pub fn analyze_model(model: &ProgramModel) -> Result<Analysis, InternalInconsistency> {
    let mut facts = BTreeMap::new();
    let mut classifications = BTreeMap::new();
    let mut warnings = Vec::new();
    for advice in model.advices_in_order() {
        let f = advice_facts(advice, model);
        if f.shadow_set.is_empty() {
            warnings.push(Diagnostic::warning(
                format!("pointcut of {} matches no join-point shadow", advice.id),
                advice.pointcut_span.clone(),
            ));
        }
        let c = classify_advice(&f)?;
        facts.insert(advice.id.clone(), f);
        classifications.insert(advice.id.clone(), c);
    }
    let report = build_report(model, &classifications);
    Ok(Analysis { facts, classifications, report, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flowanalysis::{Extent, ProceedInterval};
    use crate::pointcuts::ShadowSet;
    use crate::span::{LineCol, Span};

    fn dummy_span() -> Span {
        Span::new("test.ajml".into(), LineCol::new(1, 1), LineCol::new(1, 2))
    }

    fn base_facts(kind: AdviceKind, interval: ProceedInterval) -> AdviceFacts {
        AdviceFacts {
            kind,
            advice_span: dummy_span(),
            interval,
            replaces_result: false,
            modifies_proceed_args: false,
            fields_read: BTreeMap::new(),
            fields_written: BTreeMap::new(),
            external_calls: BTreeMap::new(),
            shadow_set: ShadowSet::default(),
            proceed_spans: vec![dummy_span()],
            looped_proceed_spans: Vec::new(),
            arg_passing_spans: Vec::new(),
            result_replacement_spans: Vec::new(),
        }
    }

    #[test]
    fn before_advice_is_augmentation() {
        let facts = base_facts(AdviceKind::Before, ProceedInterval::fixed_one());
        let c = classify_advice(&facts).unwrap();
        assert!(c.patterns.contains(&InvasivenessPattern::Augmentation));
        assert_eq!(c.coarse.katz, Katz::Spectative);
        assert_eq!(c.coarse.clifton_leavens, CliftonLeavens::Spectator);
    }

    #[test]
    fn replacement_result_takes_precedence_over_augmentation() {
        let mut facts = base_facts(AdviceKind::Around, ProceedInterval::exactly(1));
        facts.replaces_result = true;
        facts.result_replacement_spans = vec![dummy_span()];
        let c = classify_advice(&facts).unwrap();
        assert!(c.patterns.contains(&InvasivenessPattern::Replacement));
        assert!(!c.patterns.contains(&InvasivenessPattern::Augmentation));
        assert_eq!(c.flavor, Some(ReplacementFlavor::Result));
    }

    #[test]
    fn exactly_one_control_flow_pattern_over_fact_lattice() {
        // Exhaustive sweep over the classifier's input dimensions.
        let intervals = [
            ProceedInterval::exactly(0),
            ProceedInterval::exactly(1),
            ProceedInterval::exactly(2),
            ProceedInterval::new(0, Extent::Fin(1)),
            ProceedInterval::new(0, Extent::Many),
            ProceedInterval::new(1, Extent::Many),
            ProceedInterval::new(2, Extent::Fin(3)),
        ];
        let kinds = [AdviceKind::Before, AdviceKind::After, AdviceKind::Around];
        for kind in kinds {
            for interval in intervals {
                for replaces in [false, true] {
                    for args in [false, true] {
                        for read in [false, true] {
                            for write in [false, true] {
                                for crossing in [false, true] {
                                    let mut facts = match kind {
                                        AdviceKind::Around => base_facts(kind, interval),
                                        _ => base_facts(kind, ProceedInterval::fixed_one()),
                                    };
                                    if kind == AdviceKind::Around {
                                        facts.replaces_result = replaces;
                                        facts.modifies_proceed_args = args;
                                    }
                                    if read {
                                        facts
                                            .fields_read
                                            .entry(crate::model::FieldRef::new("C", "f"))
                                            .or_default()
                                            .push(dummy_span());
                                    }
                                    if write {
                                        facts
                                            .fields_written
                                            .entry(crate::model::FieldRef::new("C", "f"))
                                            .or_default()
                                            .push(dummy_span());
                                    }
                                    if crossing {
                                        facts
                                            .external_calls
                                            .entry(crate::model::MethodRef::new("C", "m"))
                                            .or_default()
                                            .push(dummy_span());
                                    }
                                    let c = classify_advice(&facts).unwrap();
                                    let exclusive = c
                                        .patterns
                                        .iter()
                                        .filter(|p| p.is_control_flow_exclusive())
                                        .count();
                                    assert_eq!(exclusive, 1, "facts: {facts:?}");
                                    for p in &c.patterns {
                                        assert!(
                                            c.evidence.iter().any(|(ep, _)| ep == p),
                                            "pattern {p} lacks evidence"
                                        );
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn write_always_maps_to_invasive() {
        for crossing in [false, true] {
            for read in [false, true] {
                let mut patterns: BTreeSet<InvasivenessPattern> =
                    [InvasivenessPattern::Augmentation, InvasivenessPattern::Write]
                        .into_iter()
                        .collect();
                if crossing {
                    patterns.insert(InvasivenessPattern::Crossing);
                }
                if read {
                    patterns.insert(InvasivenessPattern::Read);
                }
                assert_eq!(coarse_mapping(&patterns).katz, Katz::Invasive);
            }
        }
    }

    #[test]
    fn augmentation_read_only_is_spectative() {
        let patterns: BTreeSet<InvasivenessPattern> =
            [InvasivenessPattern::Augmentation, InvasivenessPattern::Read].into_iter().collect();
        let coarse = coarse_mapping(&patterns);
        assert_eq!(coarse.katz, Katz::Spectative);
        assert_eq!(coarse.clifton_leavens, CliftonLeavens::Spectator);
    }

    #[test]
    fn crossing_excludes_spectative() {
        let patterns: BTreeSet<InvasivenessPattern> =
            [InvasivenessPattern::Augmentation, InvasivenessPattern::Crossing]
                .into_iter()
                .collect();
        let coarse = coarse_mapping(&patterns);
        assert_eq!(coarse.katz, Katz::Regulatory);
        assert_eq!(coarse.clifton_leavens, CliftonLeavens::Assistant);
    }

    #[test]
    fn spectator_boundary_agrees_with_katz() {
        // Sweep all subsets of a representative pattern set.
        let universe = [
            InvasivenessPattern::Augmentation,
            InvasivenessPattern::Multiple,
            InvasivenessPattern::Crossing,
            InvasivenessPattern::Read,
            InvasivenessPattern::Write,
            InvasivenessPattern::ArgumentPassing,
        ];
        for mask in 0u32..(1 << universe.len()) {
            let patterns: BTreeSet<InvasivenessPattern> = universe
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, p)| *p)
                .collect();
            let coarse = coarse_mapping(&patterns);
            assert_eq!(
                coarse.katz == Katz::Spectative,
                coarse.clifton_leavens == CliftonLeavens::Spectator
            );
        }
    }
}
