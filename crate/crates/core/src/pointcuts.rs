//! Pointcut evaluation over the static join-point shadows of a program:
//! method executions and call sites. Matching is purely static; the
//! interpreter later weaves advice at execution shadows.

use std::collections::BTreeSet;

use crate::model::{AdviceDecl, MethodDecl, MethodRef, ProgramModel};
use crate::syntax::ast::{NamePattern, Param, ParamsPattern, SignaturePattern, TypeName};

/// A resolved pointcut expression; named references have been inlined.
#[derive(Clone, Debug, Eq, PartialEq)]
pub enum Pointcut {
    Execution(SignaturePattern),
    Call(SignaturePattern),
    Args(Vec<String>),
    Not(Box<Pointcut>),
    And(Box<Pointcut>, Box<Pointcut>),
    Or(Box<Pointcut>, Box<Pointcut>),
}

/// The shadows an advice crosscuts: method executions plus
/// (caller, callee) call sites.
#[derive(Clone, Debug, Default, Eq, PartialEq)]
pub struct ShadowSet {
    pub executions: BTreeSet<MethodRef>,
    pub calls: BTreeSet<(MethodRef, MethodRef)>,
}

impl ShadowSet {
    pub fn is_empty(&self) -> bool {
        self.executions.is_empty() && self.calls.is_empty()
    }

    fn intersect(&self, other: &ShadowSet) -> ShadowSet {
        ShadowSet {
            executions: self.executions.intersection(&other.executions).cloned().collect(),
            calls: self.calls.intersection(&other.calls).cloned().collect(),
        }
    }

    fn union(&self, other: &ShadowSet) -> ShadowSet {
        ShadowSet {
            executions: self.executions.union(&other.executions).cloned().collect(),
            calls: self.calls.union(&other.calls).cloned().collect(),
        }
    }

    fn complement(&self, universe: &ShadowSet) -> ShadowSet {
        ShadowSet {
            executions: universe.executions.difference(&self.executions).cloned().collect(),
            calls: universe.calls.difference(&self.calls).cloned().collect(),
        }
    }

    pub fn is_subset(&self, other: &ShadowSet) -> bool {
        self.executions.is_subset(&other.executions) && self.calls.is_subset(&other.calls)
    }
}

/// True when the pattern matches the method's return type, declaring
/// class, name, and parameter list. `*` matches exactly one segment;
/// `..` matches any (possibly empty) parameter tail.
pub fn match_signature(pattern: &SignaturePattern, method: &MethodDecl) -> bool {
    if !pattern.return_type.matches(method.return_type.as_str()) {
        return false;
    }
    if !pattern.class.matches(&method.owner) {
        return false;
    }
    if !pattern.name.matches(&method.name) {
        return false;
    }
    match &pattern.params {
        ParamsPattern::Exact(list) => {
            method.params.len() == list.len()
                && list
                    .iter()
                    .zip(&method.params)
                    .all(|(pat, param)| param_matches(pat, &param.ty))
        }
        ParamsPattern::Prefix(list) => {
            method.params.len() >= list.len()
                && list
                    .iter()
                    .zip(&method.params)
                    .all(|(pat, param)| param_matches(pat, &param.ty))
        }
    }
}

fn param_matches(pattern: &NamePattern, ty: &TypeName) -> bool {
    pattern.matches(ty.as_str())
}

/// A bound parameter of declared type `T` is compatible with a method
/// parameter of type exactly `T` or the wildcard type `Object`.
fn params_compatible(bound: &[Param], method: &MethodDecl) -> bool {
    if method.params.len() != bound.len() {
        return false;
    }
    bound.iter().zip(&method.params).all(|(b, m)| {
        m.ty == b.ty || m.ty == TypeName::Named("Object".to_string())
    })
}

/// The full static shadow universe of a program model. Execution
/// shadows are all class methods (declared and introduced); aspect
/// helper methods are not join points.
pub fn shadow_universe(model: &ProgramModel) -> ShadowSet {
    let mut universe = ShadowSet::default();
    for class in model.classes.values() {
        for method in &class.methods {
            universe.executions.insert(method.method_ref());
        }
    }
    for site in &model.call_sites {
        universe.calls.insert((site.caller.clone(), site.callee.clone()));
    }
    universe
}

/// Computes the shadows an advice crosscuts. When the advice binds
/// parameters, every matched method must be arity/type compatible with
/// them, since parameters bind positionally to join-point arguments.
pub fn shadows_of(advice: &AdviceDecl, model: &ProgramModel) -> ShadowSet {
    let universe = shadow_universe(model);
    let mut set = eval(&advice.pointcut, &universe, &advice.bound_params, model);
    if !advice.bound_params.is_empty() {
        set = set.intersect(&compatible_set(&universe, &advice.bound_params, model));
    }
    set
}

fn compatible_set(universe: &ShadowSet, bound: &[Param], model: &ProgramModel) -> ShadowSet {
    ShadowSet {
        executions: universe
            .executions
            .iter()
            .filter(|m| {
                model.class_method(m).map(|d| params_compatible(bound, d)).unwrap_or(false)
            })
            .cloned()
            .collect(),
        calls: universe
            .calls
            .iter()
            .filter(|(_, callee)| {
                model
                    .class_method(callee)
                    .map(|d| params_compatible(bound, d))
                    .unwrap_or(false)
            })
            .cloned()
            .collect(),
    }
}

fn eval(
    pc: &Pointcut,
    universe: &ShadowSet,
    bound: &[Param],
    model: &ProgramModel,
) -> ShadowSet {
    match pc {
        Pointcut::Execution(pattern) => ShadowSet {
            executions: universe
                .executions
                .iter()
                .filter(|m| {
                    model.class_method(m).map(|d| match_signature(pattern, d)).unwrap_or(false)
                })
                .cloned()
                .collect(),
            calls: BTreeSet::new(),
        },
        Pointcut::Call(pattern) => ShadowSet {
            executions: BTreeSet::new(),
            calls: universe
                .calls
                .iter()
                .filter(|(_, callee)| {
                    model
                        .class_method(callee)
                        .map(|d| match_signature(pattern, d))
                        .unwrap_or(false)
                })
                .cloned()
                .collect(),
        },
        Pointcut::Args(_) => compatible_set(universe, bound, model),
        Pointcut::Not(inner) => eval(inner, universe, bound, model).complement(universe),
        Pointcut::And(l, r) => {
            eval(l, universe, bound, model).intersect(&eval(r, universe, bound, model))
        }
        Pointcut::Or(l, r) => {
            eval(l, universe, bound, model).union(&eval(r, universe, bound, model))
        }
    }
}
