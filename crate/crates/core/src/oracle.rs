//! A small weaving interpreter used as the dynamic oracle for the
//! static analyses. It executes a designated entry method with aspects
//! woven at method-execution join points, records a trace, and derives
//! per-activation observations that `check_containment` compares
//! against the static advice facts.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::flowanalysis::AdviceFacts;
use crate::model::{
    AdviceId, CalleeKind, FieldRef, Intrinsic, Literal, MethodRef, ProgramModel, RBlock, RExpr,
    RExprKind, RStmt, RTarget,
};
use crate::pointcuts::shadows_of;
use crate::span::Span;
use crate::syntax::ast::{AdviceKind, BinOp, TypeName};

pub const DEFAULT_FUEL: u64 = 100_000;

/// Runtime value. Classes are singletons, so an instance value is just
/// the class name; its fields live in the interpreter state.
#[derive(Clone, Debug, Eq, PartialEq)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Str(String),
    Null,
    Instance(String),
}

impl Value {
    pub fn render(&self) -> String {
        match self {
            Value::Int(n) => n.to_string(),
            Value::Bool(b) => b.to_string(),
            Value::Str(s) => s.clone(),
            Value::Null => "null".to_string(),
            Value::Instance(c) => format!("<{c}>"),
        }
    }
}

#[derive(Clone, Copy, Debug, Eq, PartialEq, Ord, PartialOrd)]
pub enum TraceEventKind {
    MethodBodyEnter,
    MethodBodyExit,
    FieldRead,
    FieldWrite,
    AdviceEnter,
    ProceedInvoked,
    CallInvoked,
}

#[derive(Clone, Debug, Eq, PartialEq, Ord, PartialOrd)]
pub enum Subject {
    Method(MethodRef),
    Field(FieldRef),
    Advice(AdviceId),
}

impl Subject {
    /// Owner type name (class or aspect) of the subject.
    pub fn owner(&self) -> &str {
        match self {
            Subject::Method(m) => &m.owner,
            Subject::Field(f) => &f.owner,
            Subject::Advice(a) => &a.aspect,
        }
    }
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Method(m) => write!(f, "{m}"),
            Subject::Field(r) => write!(f, "{r}"),
            Subject::Advice(a) => write!(f, "{a}"),
        }
    }
}

/// One trace event, stamped with the advice activation it belongs to
/// (0 for base-program code).
#[derive(Clone, Debug, Eq, PartialEq)]
pub struct TraceEvent {
    pub kind: TraceEventKind,
    pub subject: Subject,
    pub activation: u64,
}

/// Bookkeeping for one advice activation, filled in as it executes.
#[derive(Clone, Debug, Eq, PartialEq)]
pub struct ActivationRecord {
    pub id: u64,
    pub advice: AdviceId,
    pub kind: AdviceKind,
    pub shadow: MethodRef,
    pub entry_args: Vec<Value>,
    pub proceed_count: u64,
    pub args_modified: bool,
    pub last_proceed_result: Option<Value>,
    pub result: Option<Value>,
    pub completed: bool,
}

#[derive(Clone, Debug, Default, Eq, PartialEq)]
pub struct Trace {
    pub events: Vec<TraceEvent>,
    pub activations: Vec<ActivationRecord>,
    /// Captured `print`/`log` intrinsic output.
    pub output: Vec<String>,
}

impl Trace {
    /// Base-program events: method body and field events executed in
    /// base-class code (activation context 0).
    pub fn base_events(&self, model: &ProgramModel) -> Vec<(TraceEventKind, Subject)> {
        self.events
            .iter()
            .filter(|e| {
                e.activation == 0
                    && matches!(
                        e.kind,
                        TraceEventKind::MethodBodyEnter
                            | TraceEventKind::MethodBodyExit
                            | TraceEventKind::FieldRead
                            | TraceEventKind::FieldWrite
                    )
                    && model.classes.contains_key(e.subject.owner())
            })
            .map(|e| (e.kind, e.subject.clone()))
            .collect()
    }
}

#[derive(Debug, Error)]
pub enum InterpError {
    #[error("fuel exhausted after {limit} steps")]
    FuelExhausted { limit: u64, trace: Trace },
    #[error("runtime fault: {message}{}", span_suffix(.span))]
    RuntimeFault { message: String, span: Option<Span>, trace: Trace },
    #[error("{0}")]
    Entry(String),
}

fn span_suffix(span: &Option<Span>) -> String {
    match span {
        Some(s) => format!(" at {s}"),
        None => String::new(),
    }
}

impl InterpError {
    /// The trace prefix recorded before the failure, when there is one.
    pub fn trace(&self) -> Option<&Trace> {
        match self {
            InterpError::FuelExhausted { trace, .. } | InterpError::RuntimeFault { trace, .. } => {
                Some(trace)
            }
            InterpError::Entry(_) => None,
        }
    }
}

/// Runs `entry` (a zero-parameter method) with aspects woven in.
pub fn interpret(model: &ProgramModel, entry: &str, fuel: u64) -> Result<Trace, InterpError> {
    interpret_with(model, entry, fuel, true)
}

/// Runs `entry` with weaving disabled: the base program alone.
pub fn interpret_unwoven(model: &ProgramModel, entry: &str, fuel: u64) -> Result<Trace, InterpError> {
    interpret_with(model, entry, fuel, false)
}

fn interpret_with(
    model: &ProgramModel,
    entry: &str,
    fuel: u64,
    weaving: bool,
) -> Result<Trace, InterpError> {
    if model.has_errors() {
        return Err(InterpError::Entry(
            "cannot interpret a model with semantic errors".to_string(),
        ));
    }
    if fuel == 0 {
        return Err(InterpError::Entry("fuel budget must be positive".to_string()));
    }
    let entry_ref = model.find_entry(entry).map_err(InterpError::Entry)?;

    let mut chains: BTreeMap<MethodRef, Chain> = BTreeMap::new();
    if weaving {
        for advice in model.advices_in_order() {
            let shadows = shadows_of(advice, model);
            for method in &shadows.executions {
                let chain = chains.entry(method.clone()).or_default();
                match advice.kind {
                    AdviceKind::Before => chain.befores.push(advice.id.clone()),
                    AdviceKind::Around => chain.arounds.push(advice.id.clone()),
                    AdviceKind::After => chain.afters.push(advice.id.clone()),
                }
            }
        }
    }

    let mut interp = Interp {
        model,
        chains,
        class_fields: init_fields(model),
        aspect_fields: init_aspect_fields(model),
        trace: Trace::default(),
        fuel_left: fuel,
        context: vec![0],
        next_activation: 1,
    };

    match interp.exec_join_point(&entry_ref, Vec::new()) {
        Ok(_) => Ok(interp.trace),
        Err(Fault::Fuel) => Err(InterpError::FuelExhausted { limit: fuel, trace: interp.trace }),
        Err(Fault::Runtime { message, span }) => {
            Err(InterpError::RuntimeFault { message, span, trace: interp.trace })
        }
    }
}

fn default_value(ty: &TypeName) -> Value {
    match ty {
        TypeName::Int => Value::Int(0),
        TypeName::Boolean => Value::Bool(false),
        _ => Value::Null,
    }
}

fn literal_value(lit: &Literal) -> Value {
    match lit {
        Literal::Int(n) => Value::Int(*n),
        Literal::Str(s) => Value::Str(s.clone()),
        Literal::Bool(b) => Value::Bool(*b),
        Literal::Null => Value::Null,
    }
}

fn init_fields(model: &ProgramModel) -> BTreeMap<FieldRef, Value> {
    let mut fields = BTreeMap::new();
    for class in model.classes.values() {
        for field in &class.fields {
            let value = field
                .init
                .as_ref()
                .map(literal_value)
                .unwrap_or_else(|| default_value(&field.ty));
            fields.insert(FieldRef::new(class.name.clone(), field.name.clone()), value);
        }
    }
    fields
}

fn init_aspect_fields(model: &ProgramModel) -> BTreeMap<FieldRef, Value> {
    let mut fields = BTreeMap::new();
    for aspect in model.aspects.values() {
        for field in &aspect.fields {
            let value = field
                .init
                .as_ref()
                .map(literal_value)
                .unwrap_or_else(|| default_value(&field.ty));
            fields.insert(FieldRef::new(aspect.name.clone(), field.name.clone()), value);
        }
    }
    fields
}

#[derive(Clone, Debug, Default)]
struct Chain {
    befores: Vec<AdviceId>,
    arounds: Vec<AdviceId>,
    afters: Vec<AdviceId>,
}

enum Fault {
    Fuel,
    Runtime { message: String, span: Option<Span> },
}

impl Fault {
    fn runtime(message: impl Into<String>, span: &Span) -> Fault {
        Fault::Runtime { message: message.into(), span: Some(span.clone()) }
    }
}

enum Flow {
    Normal,
    Return(Value),
}

struct Frame {
    slots: Vec<Value>,
    /// Present only while an around advice body runs.
    proceed: Option<ProceedCtx>,
}

#[derive(Clone)]
struct ProceedCtx {
    remaining_arounds: Vec<AdviceId>,
    method: MethodRef,
    original_args: Vec<Value>,
    activation: u64,
    has_bound_params: bool,
}

struct Interp<'m> {
    model: &'m ProgramModel,
    chains: BTreeMap<MethodRef, Chain>,
    class_fields: BTreeMap<FieldRef, Value>,
    aspect_fields: BTreeMap<FieldRef, Value>,
    trace: Trace,
    fuel_left: u64,
    context: Vec<u64>,
    next_activation: u64,
}

impl<'m> Interp<'m> {
    fn step(&mut self) -> Result<(), Fault> {
        if self.fuel_left == 0 {
            return Err(Fault::Fuel);
        }
        self.fuel_left -= 1;
        Ok(())
    }

    fn ctx(&self) -> u64 {
        *self.context.last().expect("context stack never empty")
    }

    fn emit(&mut self, kind: TraceEventKind, subject: Subject) {
        let activation = self.ctx();
        self.trace.events.push(TraceEvent { kind, subject, activation });
    }

    fn emit_at(&mut self, kind: TraceEventKind, subject: Subject, activation: u64) {
        self.trace.events.push(TraceEvent { kind, subject, activation });
    }

    /// Executes a method-execution join point: matching before advices,
    /// then the around chain wrapping the body, then after advices.
    fn exec_join_point(&mut self, method: &MethodRef, args: Vec<Value>) -> Result<Value, Fault> {
        self.step()?;
        let chain = self.chains.get(method).cloned().unwrap_or_default();
        for advice_id in &chain.befores {
            self.run_advice(advice_id, method, args.clone(), None)?;
        }
        let result = self.run_around_chain(chain.arounds.clone(), method, args.clone())?;
        for advice_id in &chain.afters {
            self.run_advice(advice_id, method, args.clone(), None)?;
        }
        Ok(result)
    }

    fn run_around_chain(
        &mut self,
        arounds: Vec<AdviceId>,
        method: &MethodRef,
        args: Vec<Value>,
    ) -> Result<Value, Fault> {
        match arounds.split_first() {
            None => self.exec_method_body(method, args),
            Some((head, rest)) => {
                self.run_advice(head, method, args, Some(rest.to_vec()))
            }
        }
    }

    /// Runs one advice activation. For around advice, `continuation`
    /// carries the remaining inner arounds for proceed.
    fn run_advice(
        &mut self,
        advice_id: &AdviceId,
        method: &MethodRef,
        args: Vec<Value>,
        continuation: Option<Vec<AdviceId>>,
    ) -> Result<Value, Fault> {
        self.step()?;
        let advice = self
            .model
            .advice(advice_id)
            .expect("weave table only references existing advices")
            .clone();
        let id = self.next_activation;
        self.next_activation += 1;
        self.trace.activations.push(ActivationRecord {
            id,
            advice: advice_id.clone(),
            kind: advice.kind,
            shadow: method.clone(),
            entry_args: args.clone(),
            proceed_count: 0,
            args_modified: false,
            last_proceed_result: None,
            result: None,
            completed: false,
        });
        self.context.push(id);
        self.emit_at(TraceEventKind::AdviceEnter, Subject::Advice(advice_id.clone()), id);

        let bound = advice.bound_params.len();
        let mut slots: Vec<Value> = Vec::with_capacity(advice.body.slot_names.len());
        for i in 0..advice.body.slot_names.len() {
            if i < bound {
                slots.push(args.get(i).cloned().unwrap_or(Value::Null));
            } else {
                slots.push(Value::Null);
            }
        }
        let proceed = continuation.map(|remaining| ProceedCtx {
            remaining_arounds: remaining,
            method: method.clone(),
            original_args: args.clone(),
            activation: id,
            has_bound_params: bound > 0,
        });
        let mut frame = Frame { slots, proceed };

        let flow = self.exec_block(&advice.body.block, &mut frame)?;
        let result = match flow {
            Flow::Return(v) => v,
            Flow::Normal => Value::Null,
        };

        let record = self
            .trace
            .activations
            .iter_mut()
            .find(|r| r.id == id)
            .expect("activation record exists");
        record.result = Some(result.clone());
        record.completed = true;
        self.context.pop();
        Ok(result)
    }

    fn exec_method_body(&mut self, method: &MethodRef, args: Vec<Value>) -> Result<Value, Fault> {
        self.step()?;
        let decl = self
            .model
            .class_method(method)
            .or_else(|| self.model.aspect_method(method))
            .expect("resolved model guarantees callee exists")
            .clone();
        if args.len() != decl.params.len() {
            return Err(Fault::Runtime {
                message: format!(
                    "arity mismatch invoking {method}: expected {}, got {}",
                    decl.params.len(),
                    args.len()
                ),
                span: Some(decl.span.clone()),
            });
        }
        self.context.push(0);
        self.emit(TraceEventKind::MethodBodyEnter, Subject::Method(method.clone()));
        let mut slots: Vec<Value> = Vec::with_capacity(decl.body.slot_names.len());
        for i in 0..decl.body.slot_names.len() {
            if i < args.len() {
                slots.push(args[i].clone());
            } else {
                slots.push(Value::Null);
            }
        }
        let mut frame = Frame { slots, proceed: None };
        let flow = self.exec_block(&decl.body.block, &mut frame);
        match flow {
            Ok(flow) => {
                let value = match flow {
                    Flow::Return(v) => v,
                    Flow::Normal => Value::Null,
                };
                self.emit(TraceEventKind::MethodBodyExit, Subject::Method(method.clone()));
                self.context.pop();
                Ok(value)
            }
            Err(fault) => {
                self.context.pop();
                Err(fault)
            }
        }
    }

    fn exec_block(&mut self, block: &RBlock, frame: &mut Frame) -> Result<Flow, Fault> {
        for stmt in &block.stmts {
            match self.exec_stmt(stmt, frame)? {
                Flow::Normal => {}
                ret => return Ok(ret),
            }
        }
        Ok(Flow::Normal)
    }

    fn exec_stmt(&mut self, stmt: &RStmt, frame: &mut Frame) -> Result<Flow, Fault> {
        self.step()?;
        match stmt {
            RStmt::Local { slot, init, .. } => {
                if let Some(init) = init {
                    let value = self.eval(init, frame)?;
                    frame.slots[*slot] = value;
                }
                Ok(Flow::Normal)
            }
            RStmt::Assign { target, value, .. } => {
                let value = self.eval(value, frame)?;
                self.assign(target, value, frame)?;
                Ok(Flow::Normal)
            }
            RStmt::If { cond, then_block, else_block, span } => {
                let cond = self.eval(cond, frame)?;
                match cond {
                    Value::Bool(true) => self.exec_block(then_block, frame),
                    Value::Bool(false) => match else_block {
                        Some(b) => self.exec_block(b, frame),
                        None => Ok(Flow::Normal),
                    },
                    other => Err(Fault::runtime(
                        format!("if condition must be boolean, got {}", other.render()),
                        span,
                    )),
                }
            }
            RStmt::While { cond, body, span } => {
                loop {
                    self.step()?;
                    let c = self.eval(cond, frame)?;
                    match c {
                        Value::Bool(true) => match self.exec_block(body, frame)? {
                            Flow::Normal => {}
                            ret => return Ok(ret),
                        },
                        Value::Bool(false) => break,
                        other => {
                            return Err(Fault::runtime(
                                format!("while condition must be boolean, got {}", other.render()),
                                span,
                            ))
                        }
                    }
                }
                Ok(Flow::Normal)
            }
            RStmt::Return { value, .. } => {
                let v = match value {
                    Some(e) => self.eval(e, frame)?,
                    None => Value::Null,
                };
                Ok(Flow::Return(v))
            }
            RStmt::Expr { expr, .. } => {
                self.eval(expr, frame)?;
                Ok(Flow::Normal)
            }
        }
    }

    fn assign(&mut self, target: &RTarget, value: Value, frame: &mut Frame) -> Result<(), Fault> {
        match target {
            RTarget::Slot { slot, span } => {
                if *slot >= frame.slots.len() {
                    return Err(Fault::runtime("assignment to unresolved place", span));
                }
                frame.slots[*slot] = value;
                Ok(())
            }
            RTarget::AspectField { aspect, name, .. } => {
                let key = FieldRef::new(aspect.clone(), name.clone());
                self.emit(TraceEventKind::FieldWrite, Subject::Field(key.clone()));
                self.aspect_fields.insert(key, value);
                Ok(())
            }
            RTarget::ClassField { recv, field, span } => {
                let instance = self.eval(recv, frame)?;
                let class = match instance {
                    Value::Instance(c) => c,
                    Value::Null => {
                        return Err(Fault::runtime(
                            format!("null receiver writing field '{}'", field.name),
                            span,
                        ))
                    }
                    other => {
                        return Err(Fault::runtime(
                            format!(
                                "field write target must be an instance, got {}",
                                other.render()
                            ),
                            span,
                        ))
                    }
                };
                let key = FieldRef::new(class.clone(), field.name.clone());
                if !self.class_fields.contains_key(&key) {
                    return Err(Fault::runtime(format!("no field '{key}'"), span));
                }
                self.emit(TraceEventKind::FieldWrite, Subject::Field(key.clone()));
                self.class_fields.insert(key, value);
                Ok(())
            }
        }
    }

    fn eval(&mut self, expr: &RExpr, frame: &mut Frame) -> Result<Value, Fault> {
        self.step()?;
        match &expr.kind {
            RExprKind::Slot { slot } => frame
                .slots
                .get(*slot)
                .cloned()
                .ok_or_else(|| Fault::runtime("read of unresolved place", &expr.span)),
            RExprKind::AspectField { aspect, name } => {
                let key = FieldRef::new(aspect.clone(), name.clone());
                let value = self
                    .aspect_fields
                    .get(&key)
                    .cloned()
                    .ok_or_else(|| Fault::runtime(format!("no field '{key}'"), &expr.span))?;
                self.emit(TraceEventKind::FieldRead, Subject::Field(key));
                Ok(value)
            }
            RExprKind::ClassField { recv, field } => {
                let instance = self.eval(recv, frame)?;
                let class = match instance {
                    Value::Instance(c) => c,
                    Value::Null => {
                        return Err(Fault::runtime(
                            format!("null receiver reading field '{}'", field.name),
                            &expr.span,
                        ))
                    }
                    other => {
                        return Err(Fault::runtime(
                            format!("field read target must be an instance, got {}", other.render()),
                            &expr.span,
                        ))
                    }
                };
                let key = FieldRef::new(class, field.name.clone());
                let value = self
                    .class_fields
                    .get(&key)
                    .cloned()
                    .ok_or_else(|| Fault::runtime(format!("no field '{key}'"), &expr.span))?;
                self.emit(TraceEventKind::FieldRead, Subject::Field(key));
                Ok(value)
            }
            RExprKind::Singleton { class } => Ok(Value::Instance(class.clone())),
            RExprKind::Int(n) => Ok(Value::Int(*n)),
            RExprKind::Str(s) => Ok(Value::Str(s.clone())),
            RExprKind::Bool(b) => Ok(Value::Bool(*b)),
            RExprKind::Null => Ok(Value::Null),
            RExprKind::Call { recv, method, callee, args } => {
                if let Some(r) = recv {
                    let instance = self.eval(r, frame)?;
                    match instance {
                        Value::Instance(_) => {}
                        Value::Null => {
                            return Err(Fault::runtime(
                                format!("null receiver calling '{}'", method.name),
                                &expr.span,
                            ))
                        }
                        other => {
                            return Err(Fault::runtime(
                                format!("call receiver must be an instance, got {}", other.render()),
                                &expr.span,
                            ))
                        }
                    }
                }
                let mut values = Vec::with_capacity(args.len());
                for a in args {
                    values.push(self.eval(a, frame)?);
                }
                self.emit(TraceEventKind::CallInvoked, Subject::Method(method.clone()));
                match callee {
                    CalleeKind::ClassMethod => self.exec_join_point(method, values),
                    CalleeKind::AspectHelper => self.exec_method_body(method, values),
                }
            }
            RExprKind::Intrinsic { which, args } => {
                let mut rendered = Vec::new();
                for a in args {
                    let v = self.eval(a, frame)?;
                    rendered.push(v.render());
                }
                let line = rendered.join(" ");
                match which {
                    Intrinsic::Print => self.trace.output.push(line),
                    Intrinsic::Log => self.trace.output.push(format!("[log] {line}")),
                }
                Ok(Value::Null)
            }
            RExprKind::Proceed { args } => {
                let ctx = match &frame.proceed {
                    Some(ctx) => ctx.clone(),
                    None => {
                        return Err(Fault::runtime(
                            "proceed invoked outside an around advice",
                            &expr.span,
                        ))
                    }
                };
                let effective = if ctx.has_bound_params {
                    let mut values = Vec::with_capacity(args.len());
                    for a in args {
                        values.push(self.eval(a, frame)?);
                    }
                    values
                } else {
                    ctx.original_args.clone()
                };
                self.emit_at(
                    TraceEventKind::ProceedInvoked,
                    Subject::Method(ctx.method.clone()),
                    ctx.activation,
                );
                let modified = effective != ctx.original_args;
                let result =
                    self.run_around_chain(ctx.remaining_arounds.clone(), &ctx.method, effective)?;
                let record = self
                    .trace
                    .activations
                    .iter_mut()
                    .find(|r| r.id == ctx.activation)
                    .expect("activation record exists");
                record.proceed_count += 1;
                record.args_modified |= modified;
                record.last_proceed_result = Some(result.clone());
                Ok(result)
            }
            RExprKind::Binary { op, lhs, rhs } => {
                let l = self.eval(lhs, frame)?;
                let r = self.eval(rhs, frame)?;
                self.binary(*op, l, r, &expr.span)
            }
            RExprKind::Not { operand } => match self.eval(operand, frame)? {
                Value::Bool(b) => Ok(Value::Bool(!b)),
                other => Err(Fault::runtime(
                    format!("'!' requires a boolean, got {}", other.render()),
                    &expr.span,
                )),
            },
        }
    }

    fn binary(&mut self, op: BinOp, l: Value, r: Value, span: &Span) -> Result<Value, Fault> {
        use BinOp::*;
        match op {
            Eq => Ok(Value::Bool(l == r)),
            Ne => Ok(Value::Bool(l != r)),
            Add => match (&l, &r) {
                (Value::Int(a), Value::Int(b)) => Ok(Value::Int(a.wrapping_add(*b))),
                (Value::Str(_), _) | (_, Value::Str(_)) => {
                    Ok(Value::Str(format!("{}{}", l.render(), r.render())))
                }
                _ => Err(Fault::runtime(
                    format!("'+' requires integers or strings, got {} and {}", l.render(), r.render()),
                    span,
                )),
            },
            Sub | Mul | Div | Lt | Le | Gt | Ge => match (&l, &r) {
                (Value::Int(a), Value::Int(b)) => match op {
                    Sub => Ok(Value::Int(a.wrapping_sub(*b))),
                    Mul => Ok(Value::Int(a.wrapping_mul(*b))),
                    Div => {
                        if *b == 0 {
                            Err(Fault::runtime("division by zero", span))
                        } else {
                            Ok(Value::Int(a.wrapping_div(*b)))
                        }
                    }
                    Lt => Ok(Value::Bool(a < b)),
                    Le => Ok(Value::Bool(a <= b)),
                    Gt => Ok(Value::Bool(a > b)),
                    Ge => Ok(Value::Bool(a >= b)),
                    _ => unreachable!(),
                },
                _ => Err(Fault::runtime(
                    format!(
                        "'{}' requires integers, got {} and {}",
                        op.as_str(),
                        l.render(),
                        r.render()
                    ),
                    span,
                )),
            },
        }
    }
}

// --- observations -------------------------------------------------------------

/// What one advice activation actually did, derived from the trace.
#[derive(Clone, Debug, Eq, PartialEq)]
pub struct Observation {
    pub advice: AdviceId,
    pub activation: u64,
    pub kind: AdviceKind,
    pub shadow: MethodRef,
    pub proceed_count: u64,
    pub args_modified: bool,
    pub result_modified: bool,
    pub fields_read: BTreeSet<FieldRef>,
    pub fields_written: BTreeSet<FieldRef>,
    pub calls_invoked: BTreeSet<MethodRef>,
}

#[derive(Clone, Debug, Error)]
#[error("malformed trace: {message}")]
pub struct MalformedTrace {
    pub message: String,
}

/// Derives one observation per advice activation. For before/after
/// advice the proceed count is 1 by definition: such advice never
/// suppresses the intercepted body.
///
/// `result_modified` compares the value an around activation returned
/// against what its own last proceed returned; when it never proceeded
/// there is no original result to compare.
pub fn observe(trace: &Trace, model: &ProgramModel) -> Result<Vec<Observation>, MalformedTrace> {
    let known: BTreeSet<u64> = trace.activations.iter().map(|r| r.id).collect();
    for event in &trace.events {
        if event.kind == TraceEventKind::AdviceEnter && !known.contains(&event.activation) {
            return Err(MalformedTrace {
                message: format!("advice-enter event for unknown activation {}", event.activation),
            });
        }
        if event.kind == TraceEventKind::ProceedInvoked
            && event.activation != 0
            && !known.contains(&event.activation)
        {
            return Err(MalformedTrace {
                message: format!("proceed event for unknown activation {}", event.activation),
            });
        }
    }

    let mut observations = Vec::new();
    for record in &trace.activations {
        let proceed_events = trace
            .events
            .iter()
            .filter(|e| e.kind == TraceEventKind::ProceedInvoked && e.activation == record.id)
            .count() as u64;
        if proceed_events != record.proceed_count {
            return Err(MalformedTrace {
                message: format!(
                    "activation {} records {} proceeds but the trace has {}",
                    record.id, record.proceed_count, proceed_events
                ),
            });
        }
        let mut fields_read = BTreeSet::new();
        let mut fields_written = BTreeSet::new();
        let mut calls_invoked = BTreeSet::new();
        for event in trace.events.iter().filter(|e| e.activation == record.id) {
            match (&event.kind, &event.subject) {
                (TraceEventKind::FieldRead, Subject::Field(f))
                    if model.classes.contains_key(&f.owner) =>
                {
                    fields_read.insert(f.clone());
                }
                (TraceEventKind::FieldWrite, Subject::Field(f))
                    if model.classes.contains_key(&f.owner) =>
                {
                    fields_written.insert(f.clone());
                }
                (TraceEventKind::CallInvoked, Subject::Method(m))
                    if model.classes.contains_key(&m.owner) =>
                {
                    calls_invoked.insert(m.clone());
                }
                _ => {}
            }
        }
        let proceed_count = match record.kind {
            AdviceKind::Around => record.proceed_count,
            AdviceKind::Before | AdviceKind::After => 1,
        };
        let result_modified = record.kind == AdviceKind::Around
            && record.completed
            && record.proceed_count >= 1
            && record.last_proceed_result.as_ref() != record.result.as_ref();
        observations.push(Observation {
            advice: record.advice.clone(),
            activation: record.id,
            kind: record.kind,
            shadow: record.shadow.clone(),
            proceed_count,
            args_modified: record.args_modified,
            result_modified,
            fields_read,
            fields_written,
            calls_invoked,
        });
    }
    Ok(observations)
}

// --- containment ---------------------------------------------------------------

#[derive(Clone, Debug, Eq, PartialEq)]
pub struct ContainmentViolation {
    pub advice: AdviceId,
    pub activation: u64,
    pub message: String,
}

impl fmt::Display for ContainmentViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (activation {}): {}", self.advice, self.activation, self.message)
    }
}

/// Checks every observation against the static facts: the proceed count
/// must lie in the advice's interval, and every observed field access,
/// external call, and argument/result modification must be predicted.
pub fn check_containment(
    observations: &[Observation],
    facts: &BTreeMap<AdviceId, AdviceFacts>,
) -> Vec<ContainmentViolation> {
    let mut violations = Vec::new();
    for obs in observations {
        let violation = |message: String| ContainmentViolation {
            advice: obs.advice.clone(),
            activation: obs.activation,
            message,
        };
        let f = match facts.get(&obs.advice) {
            Some(f) => f,
            None => {
                violations.push(violation("no static facts for this advice".to_string()));
                continue;
            }
        };
        if !f.interval.contains(obs.proceed_count) {
            violations.push(violation(format!(
                "observed proceed count {} outside static interval {}",
                obs.proceed_count, f.interval
            )));
        }
        for field in &obs.fields_read {
            if !f.fields_read.contains_key(field) {
                violations.push(violation(format!(
                    "observed read of '{field}' not predicted by static facts"
                )));
            }
        }
        for field in &obs.fields_written {
            if !f.fields_written.contains_key(field) {
                violations.push(violation(format!(
                    "observed write of '{field}' not predicted by static facts"
                )));
            }
        }
        for callee in &obs.calls_invoked {
            if f.shadow_set.executions.contains(callee) {
                continue;
            }
            if !f.external_calls.contains_key(callee) {
                violations.push(violation(format!(
                    "observed external call to '{callee}' not predicted by static facts"
                )));
            }
        }
        if obs.args_modified && !f.modifies_proceed_args {
            violations.push(violation(
                "observed proceed-argument modification not predicted by static facts".to_string(),
            ));
        }
        if obs.result_modified && f.interval.min >= 1 && !f.replaces_result {
            violations.push(violation(
                "observed result replacement not predicted by static facts".to_string(),
            ));
        }
    }
    violations
}
