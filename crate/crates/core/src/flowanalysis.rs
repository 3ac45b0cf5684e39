//! Per-advice body analyses: the proceed-count interval, result
//! replacement, argument passing, field access sets, and external
//! (crossing) calls. These are the raw facts the classifier consumes.
//!
//! Branch conditions are never evaluated: every branch is considered
//! feasible, so the interval over-approximates in the sound direction.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::model::{
    AdviceDecl, CalleeKind, FieldRef, MethodRef, ProgramModel, RBlock, RBody, RExpr, RExprKind,
    RStmt, RTarget,
};
use crate::pointcuts::{shadows_of, ShadowSet};
use crate::span::Span;
use crate::syntax::ast::AdviceKind;

/// Upper bound of a proceed interval: a finite count or "many".
#[derive(Clone, Copy, Debug, Eq, PartialEq)]
pub enum Extent {
    Fin(u64),
    Many,
}

impl Extent {
    fn saturating_add(self, n: u64) -> Extent {
        match self {
            Extent::Fin(m) => Extent::Fin(m.saturating_add(n)),
            Extent::Many => Extent::Many,
        }
    }

    fn join(self, other: Extent) -> Extent {
        match (self, other) {
            (Extent::Fin(a), Extent::Fin(b)) => Extent::Fin(a.max(b)),
            _ => Extent::Many,
        }
    }

    pub fn at_least(self, n: u64) -> bool {
        match self {
            Extent::Fin(m) => m >= n,
            Extent::Many => true,
        }
    }

    pub fn is_zero(self) -> bool {
        matches!(self, Extent::Fin(0))
    }
}

impl fmt::Display for Extent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extent::Fin(n) => write!(f, "{n}"),
            Extent::Many => write!(f, "many"),
        }
    }
}

/// Bounds on how many times an around advice executes the intercepted
/// body over a single activation. `MANY` compares greater than every
/// finite count; any sum involving it saturates to `MANY`.
#[derive(Clone, Copy, Debug, Eq, PartialEq)]
pub struct ProceedInterval {
    pub min: u64,
    pub max: Extent,
}

impl ProceedInterval {
    pub fn new(min: u64, max: Extent) -> Self {
        ProceedInterval { min, max }
    }

    pub fn exactly(n: u64) -> Self {
        ProceedInterval { min: n, max: Extent::Fin(n) }
    }

    /// Fixed interval for before/after advice: the intercepted body runs
    /// exactly once per activation.
    pub fn fixed_one() -> Self {
        ProceedInterval::exactly(1)
    }

    pub fn contains(&self, n: u64) -> bool {
        self.min <= n && self.max.at_least(n)
    }

    fn shift(&self, n: u64) -> ProceedInterval {
        ProceedInterval { min: self.min.saturating_add(n), max: self.max.saturating_add(n) }
    }

    fn join(&self, other: &ProceedInterval) -> ProceedInterval {
        ProceedInterval { min: self.min.min(other.min), max: self.max.join(other.max) }
    }
}

impl fmt::Display for ProceedInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.min, self.max)
    }
}

/// Everything the classifier needs to know about one advice.
#[derive(Clone, Debug)]
pub struct AdviceFacts {
    pub kind: AdviceKind,
    pub advice_span: Span,
    pub interval: ProceedInterval,
    pub replaces_result: bool,
    pub modifies_proceed_args: bool,
    pub fields_read: BTreeMap<FieldRef, Vec<Span>>,
    pub fields_written: BTreeMap<FieldRef, Vec<Span>>,
    pub external_calls: BTreeMap<MethodRef, Vec<Span>>,
    pub shadow_set: ShadowSet,
    /// Spans of all `proceed` expressions in the body.
    pub proceed_spans: Vec<Span>,
    /// Spans of proceeds that execute inside a loop (evidence for Multiple).
    pub looped_proceed_spans: Vec<Span>,
    pub arg_passing_spans: Vec<Span>,
    pub result_replacement_spans: Vec<Span>,
}

/// Computes all static facts for one advice.
pub fn advice_facts(advice: &AdviceDecl, model: &ProgramModel) -> AdviceFacts {
    let shadow_set = shadows_of(advice, model);
    let (fields_read, fields_written) = detect_field_access(&advice.body);
    let external_calls = detect_crossing(&advice.body, &shadow_set);
    let mut proceed_spans = Vec::new();
    let mut looped = Vec::new();
    collect_proceed_spans(&advice.body.block, false, &mut proceed_spans, &mut looped);

    if advice.kind != AdviceKind::Around {
        return AdviceFacts {
            kind: advice.kind,
            advice_span: advice.span.clone(),
            interval: ProceedInterval::fixed_one(),
            replaces_result: false,
            modifies_proceed_args: false,
            fields_read,
            fields_written,
            external_calls,
            shadow_set,
            proceed_spans,
            looped_proceed_spans: looped,
            arg_passing_spans: Vec::new(),
            result_replacement_spans: Vec::new(),
        };
    }

    let interval = proceed_interval(&advice.body);
    let (replaces_result, result_replacement_spans) =
        detect_result_replacement(&advice.body, &interval, &advice.span);
    let (modifies_proceed_args, arg_passing_spans) = detect_argument_passing(&advice.body);
    AdviceFacts {
        kind: advice.kind,
        advice_span: advice.span.clone(),
        interval,
        replaces_result,
        modifies_proceed_args,
        fields_read,
        fields_written,
        external_calls,
        shadow_set,
        proceed_spans,
        looped_proceed_spans: looped,
        arg_passing_spans,
        result_replacement_spans,
    }
}

// --- proceed interval --------------------------------------------------------

/// Abstract execution state: the interval of paths still flowing plus
/// the joined interval of paths that already returned.
#[derive(Clone, Copy, Debug)]
struct FlowState {
    ongoing: Option<ProceedInterval>,
    returned: Option<ProceedInterval>,
}

impl FlowState {
    fn merge_returned(&mut self, interval: ProceedInterval) {
        self.returned = Some(match self.returned {
            Some(r) => r.join(&interval),
            None => interval,
        });
    }
}

fn join_opt(a: Option<ProceedInterval>, b: Option<ProceedInterval>) -> Option<ProceedInterval> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.join(&y)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

/// Computes the (min, max) bound on proceed executions for an around
/// advice body by structural recursion with early-return handling.
pub fn proceed_interval(body: &RBody) -> ProceedInterval {
    let state = flow_block(
        &body.block,
        FlowState { ongoing: Some(ProceedInterval::exactly(0)), returned: None },
    );
    join_opt(state.ongoing, state.returned).unwrap_or_else(|| ProceedInterval::exactly(0))
}

fn flow_block(block: &RBlock, mut state: FlowState) -> FlowState {
    for stmt in &block.stmts {
        if state.ongoing.is_none() {
            break;
        }
        state = flow_stmt(stmt, state);
    }
    state
}

fn flow_stmt(stmt: &RStmt, mut state: FlowState) -> FlowState {
    let ongoing = state.ongoing.expect("flow_stmt requires a live path");
    match stmt {
        RStmt::Local { init, .. } => {
            let n = init.as_ref().map_or(0, expr_proceeds);
            state.ongoing = Some(ongoing.shift(n));
            state
        }
        RStmt::Expr { expr, .. } => {
            state.ongoing = Some(ongoing.shift(expr_proceeds(expr)));
            state
        }
        RStmt::Assign { target, value, .. } => {
            let mut n = expr_proceeds(value);
            if let RTarget::ClassField { recv, .. } = target {
                n += expr_proceeds(recv);
            }
            state.ongoing = Some(ongoing.shift(n));
            state
        }
        RStmt::Return { value, .. } => {
            let n = value.as_ref().map_or(0, expr_proceeds);
            state.merge_returned(ongoing.shift(n));
            state.ongoing = None;
            state
        }
        RStmt::If { cond, then_block, else_block, .. } => {
            let at_branch = ongoing.shift(expr_proceeds(cond));
            let then_state =
                flow_block(then_block, FlowState { ongoing: Some(at_branch), returned: None });
            let else_state = match else_block {
                Some(b) => flow_block(b, FlowState { ongoing: Some(at_branch), returned: None }),
                None => FlowState { ongoing: Some(at_branch), returned: None },
            };
            if let Some(r) = then_state.returned {
                state.merge_returned(r);
            }
            if let Some(r) = else_state.returned {
                state.merge_returned(r);
            }
            state.ongoing = join_opt(then_state.ongoing, else_state.ongoing);
            state
        }
        RStmt::While { cond, body, .. } => {
            let n = expr_proceeds(cond);
            let body_state = flow_block(
                body,
                FlowState { ongoing: Some(ProceedInterval::exactly(0)), returned: None },
            );
            // Paths that exit normally: the condition is evaluated once
            // per iteration plus once to exit.
            let exit_contrib = match body_state.ongoing {
                // Every body path returns: at most the single exit check runs.
                None => ProceedInterval::exactly(n),
                Some(full) => {
                    if n == 0 && full.max.is_zero() {
                        ProceedInterval::exactly(0)
                    } else {
                        ProceedInterval::new(n, Extent::Many)
                    }
                }
            };
            state.ongoing =
                Some(ProceedInterval::new(
                    ongoing.min.saturating_add(exit_contrib.min),
                    match exit_contrib.max {
                        Extent::Many => Extent::Many,
                        Extent::Fin(m) => ongoing.max.saturating_add(m),
                    },
                ));
            // Paths that return from inside the body.
            if let Some(br) = body_state.returned {
                let min = ongoing.min.saturating_add(n).saturating_add(br.min);
                let max = match body_state.ongoing {
                    None => match br.max {
                        Extent::Fin(b) => ongoing.max.saturating_add(n).saturating_add(b),
                        Extent::Many => Extent::Many,
                    },
                    Some(full) => {
                        if n == 0 && full.max.is_zero() && br.max.is_zero() {
                            ongoing.max
                        } else {
                            Extent::Many
                        }
                    }
                };
                state.merge_returned(ProceedInterval::new(min, max));
            }
            state
        }
    }
}

/// Number of `proceed` occurrences in an expression; every occurrence
/// executes exactly once when the expression is evaluated.
fn expr_proceeds(expr: &RExpr) -> u64 {
    let mut count = 0;
    walk_expr(expr, &mut |e| {
        if matches!(e.kind, RExprKind::Proceed { .. }) {
            count += 1;
        }
    });
    count
}

// --- result replacement -------------------------------------------------------

/// Reaching-definition lattice for a local slot: the last assignment on
/// every path was a `proceed(...)` result, something else, or a mix.
#[derive(Clone, Copy, Debug, Eq, PartialEq)]
enum DefState {
    ProceedResult,
    Other,
    Mixed,
}

impl DefState {
    fn merge(a: DefState, b: DefState) -> DefState {
        if a == b {
            a
        } else {
            DefState::Mixed
        }
    }
}

#[derive(Clone, Debug)]
struct DefEnv {
    slots: Vec<DefState>,
}

impl DefEnv {
    fn merge(a: &DefEnv, b: &DefEnv) -> DefEnv {
        DefEnv {
            slots: a
                .slots
                .iter()
                .zip(&b.slots)
                .map(|(x, y)| DefState::merge(*x, *y))
                .collect(),
        }
    }
}

/// True when the advice executes the original body (`min >= 1`) and some
/// return yields a value that is not a direct `proceed(...)` result nor a
/// local whose reaching definition is one. A body that can fall off the
/// end (or `return;` with no value) yields null in place of the proceed
/// result, which counts as replacing it.
pub fn detect_result_replacement(
    body: &RBody,
    interval: &ProceedInterval,
    advice_span: &Span,
) -> (bool, Vec<Span>) {
    if interval.min < 1 {
        return (false, Vec::new());
    }
    let mut spans = Vec::new();
    let env = DefEnv { slots: vec![DefState::Other; body.slot_names.len()] };
    let exit = scan_returns(&body.block, env, &mut spans);
    if exit.is_some() {
        // Some path reaches the end of the body without returning.
        spans.push(advice_span.clone());
    }
    (!spans.is_empty(), spans)
}

fn classify_def(expr: &RExpr) -> DefState {
    match &expr.kind {
        RExprKind::Proceed { .. } => DefState::ProceedResult,
        _ => DefState::Other,
    }
}

/// Walks the block tracking reaching definitions; records the spans of
/// returns whose value is not proceed-derived. Returns the environment
/// at the block's fall-through exit, or None when every path returns.
fn scan_returns(block: &RBlock, mut env: DefEnv, spans: &mut Vec<Span>) -> Option<DefEnv> {
    for stmt in &block.stmts {
        match stmt {
            RStmt::Local { slot, init, .. } => {
                let state = init.as_ref().map_or(DefState::Other, classify_def);
                if *slot < env.slots.len() {
                    env.slots[*slot] = state;
                }
            }
            RStmt::Assign { target, value, .. } => {
                if let RTarget::Slot { slot, .. } = target {
                    if *slot < env.slots.len() {
                        env.slots[*slot] = classify_def(value);
                    }
                }
            }
            RStmt::Expr { .. } => {}
            RStmt::Return { value, span } => {
                let derived = match value {
                    Some(e) => match &e.kind {
                        RExprKind::Proceed { .. } => true,
                        RExprKind::Slot { slot } => {
                            env.slots.get(*slot) == Some(&DefState::ProceedResult)
                        }
                        _ => false,
                    },
                    None => false,
                };
                if !derived {
                    spans.push(span.clone());
                }
                return None;
            }
            RStmt::If { then_block, else_block, .. } => {
                let then_env = scan_returns(then_block, env.clone(), spans);
                let else_env = match else_block {
                    Some(b) => scan_returns(b, env.clone(), spans),
                    None => Some(env.clone()),
                };
                env = match (then_env, else_env) {
                    (Some(a), Some(b)) => DefEnv::merge(&a, &b),
                    (Some(a), None) | (None, Some(a)) => a,
                    (None, None) => return None,
                };
            }
            RStmt::While { body, .. } => {
                // Two passes expose loop-carried definitions; returns in
                // the second pass that duplicate the first are harmless
                // (spans deduplicated by the caller's use).
                let mut probe = Vec::new();
                if let Some(after) = scan_returns(body, env.clone(), &mut probe) {
                    env = DefEnv::merge(&env, &after);
                }
                if let Some(after) = scan_returns(body, env.clone(), &mut probe) {
                    env = DefEnv::merge(&env, &after);
                }
                // Record each distinct offending return inside the loop once.
                for span in probe {
                    if !spans.contains(&span) {
                        spans.push(span);
                    }
                }
            }
        }
    }
    Some(env)
}

// --- argument passing ----------------------------------------------------------

/// True when some `proceed` passes an argument that is not the
/// identically-named bound parameter in the same position, or a bound
/// parameter is reassigned before a proceed that passes it.
pub fn detect_argument_passing(body: &RBody) -> (bool, Vec<Span>) {
    let mut spans = Vec::new();
    let mut reassigned = BTreeSet::new();
    scan_proceed_args(&body.block, body.param_count, &mut reassigned, &mut spans);
    (!spans.is_empty(), spans)
}

fn scan_proceed_args(
    block: &RBlock,
    param_count: usize,
    reassigned: &mut BTreeSet<usize>,
    spans: &mut Vec<Span>,
) {
    for stmt in &block.stmts {
        // Check proceeds in this statement's expressions against the
        // reassignment state before the statement takes effect.
        for expr in stmt_exprs(stmt) {
            check_proceed_args(expr, param_count, reassigned, spans);
        }
        match stmt {
            RStmt::Assign { target: RTarget::Slot { slot, .. }, .. } if *slot < param_count => {
                reassigned.insert(*slot);
            }
            RStmt::If { then_block, else_block, .. } => {
                let mut then_set = reassigned.clone();
                scan_proceed_args(then_block, param_count, &mut then_set, spans);
                let mut else_set = reassigned.clone();
                if let Some(b) = else_block {
                    scan_proceed_args(b, param_count, &mut else_set, spans);
                }
                reassigned.extend(then_set);
                reassigned.extend(else_set);
            }
            RStmt::While { body, .. } => {
                // Second pass catches parameters reassigned on a previous
                // iteration and passed on the next.
                let mut first = reassigned.clone();
                scan_proceed_args(body, param_count, &mut first, spans);
                let mut second = first.clone();
                scan_proceed_args(body, param_count, &mut second, spans);
                reassigned.extend(second);
            }
            _ => {}
        }
    }
}

fn check_proceed_args(
    expr: &RExpr,
    param_count: usize,
    reassigned: &BTreeSet<usize>,
    spans: &mut Vec<Span>,
) {
    walk_expr(expr, &mut |e| {
        if let RExprKind::Proceed { args } = &e.kind {
            for (position, arg) in args.iter().enumerate() {
                let identity = matches!(
                    &arg.kind,
                    RExprKind::Slot { slot } if *slot == position && *slot < param_count
                );
                let stale = matches!(&arg.kind, RExprKind::Slot { slot } if reassigned.contains(slot));
                if !identity || stale {
                    if !spans.contains(&e.span) {
                        spans.push(e.span.clone());
                    }
                }
            }
        }
    });
}

// --- field access -----------------------------------------------------------------

type FieldSpans = BTreeMap<FieldRef, Vec<Span>>;

/// Collects base-class fields read and written by the body. Compound
/// updates contribute to both sets; aspect-local state never appears.
pub fn detect_field_access(body: &RBody) -> (FieldSpans, FieldSpans) {
    let mut reads = FieldSpans::new();
    let mut writes = FieldSpans::new();
    scan_fields(&body.block, &mut reads, &mut writes);
    (reads, writes)
}

fn scan_fields(block: &RBlock, reads: &mut FieldSpans, writes: &mut FieldSpans) {
    for stmt in &block.stmts {
        for expr in stmt_exprs(stmt) {
            collect_field_reads(expr, reads);
        }
        match stmt {
            RStmt::Assign { target: RTarget::ClassField { recv, field, span }, .. } => {
                collect_field_reads(recv, reads);
                writes.entry(field.clone()).or_default().push(span.clone());
            }
            RStmt::If { then_block, else_block, .. } => {
                scan_fields(then_block, reads, writes);
                if let Some(b) = else_block {
                    scan_fields(b, reads, writes);
                }
            }
            RStmt::While { body, .. } => scan_fields(body, reads, writes),
            _ => {}
        }
    }
}

fn collect_field_reads(expr: &RExpr, reads: &mut FieldSpans) {
    walk_expr(expr, &mut |e| {
        if let RExprKind::ClassField { field, .. } = &e.kind {
            reads.entry(field.clone()).or_default().push(e.span.clone());
        }
    });
}

// --- crossing -----------------------------------------------------------------------

/// Declared class methods called by the body that the advice does not
/// crosscut. Intrinsics and the declaring aspect's own helpers are
/// excluded by construction.
pub fn detect_crossing(body: &RBody, shadow_set: &ShadowSet) -> BTreeMap<MethodRef, Vec<Span>> {
    let mut crossing: BTreeMap<MethodRef, Vec<Span>> = BTreeMap::new();
    let mut visit = |e: &RExpr| {
        if let RExprKind::Call { method, callee: CalleeKind::ClassMethod, .. } = &e.kind {
            if !shadow_set.executions.contains(method) {
                crossing.entry(method.clone()).or_default().push(e.span.clone());
            }
        }
    };
    walk_block(&body.block, &mut visit);
    crossing
}

// --- generic walkers -----------------------------------------------------------------

fn stmt_exprs(stmt: &RStmt) -> Vec<&RExpr> {
    match stmt {
        RStmt::Local { init, .. } => init.iter().collect(),
        RStmt::Assign { value, .. } => vec![value],
        RStmt::If { cond, .. } => vec![cond],
        RStmt::While { cond, .. } => vec![cond],
        RStmt::Return { value, .. } => value.iter().collect(),
        RStmt::Expr { expr, .. } => vec![expr],
    }
}

fn walk_block(block: &RBlock, visit: &mut impl FnMut(&RExpr)) {
    for stmt in &block.stmts {
        for expr in stmt_exprs(stmt) {
            walk_expr(expr, visit);
        }
        match stmt {
            RStmt::Assign { target: RTarget::ClassField { recv, .. }, .. } => {
                walk_expr(recv, visit);
            }
            RStmt::If { then_block, else_block, .. } => {
                walk_block(then_block, visit);
                if let Some(b) = else_block {
                    walk_block(b, visit);
                }
            }
            RStmt::While { body, .. } => walk_block(body, visit),
            _ => {}
        }
    }
}

fn walk_expr(expr: &RExpr, visit: &mut impl FnMut(&RExpr)) {
    visit(expr);
    match &expr.kind {
        RExprKind::ClassField { recv, .. } => walk_expr(recv, visit),
        RExprKind::Call { recv, args, .. } => {
            if let Some(r) = recv {
                walk_expr(r, visit);
            }
            for a in args {
                walk_expr(a, visit);
            }
        }
        RExprKind::Intrinsic { args, .. } | RExprKind::Proceed { args } => {
            for a in args {
                walk_expr(a, visit);
            }
        }
        RExprKind::Binary { lhs, rhs, .. } => {
            walk_expr(lhs, visit);
            walk_expr(rhs, visit);
        }
        RExprKind::Not { operand } => walk_expr(operand, visit),
        _ => {}
    }
}

fn collect_proceed_spans(
    block: &RBlock,
    in_loop: bool,
    all: &mut Vec<Span>,
    looped: &mut Vec<Span>,
) {
    fn record(expr: &RExpr, in_loop: bool, all: &mut Vec<Span>, looped: &mut Vec<Span>) {
        let mut spans = Vec::new();
        walk_expr(expr, &mut |e| {
            if matches!(e.kind, RExprKind::Proceed { .. }) {
                spans.push(e.span.clone());
            }
        });
        for span in spans {
            all.push(span.clone());
            if in_loop {
                looped.push(span);
            }
        }
    }
    for stmt in &block.stmts {
        // A while condition re-evaluates every iteration, so its
        // proceeds count as looped along with the body's.
        if let RStmt::While { cond, body, .. } = stmt {
            record(cond, true, all, looped);
            collect_proceed_spans(body, true, all, looped);
            continue;
        }
        for expr in stmt_exprs(stmt) {
            record(expr, in_loop, all, looped);
        }
        if let RStmt::If { then_block, else_block, .. } = stmt {
            collect_proceed_spans(then_block, in_loop, all, looped);
            if let Some(b) = else_block {
                collect_proceed_spans(b, in_loop, all, looped);
            }
        }
    }
}
