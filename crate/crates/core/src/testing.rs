//! Test-only support: an independent brute-force path enumerator for
//! proceed counts, a deterministic random body generator, and fixture
//! helpers. Enabled by the `testing` feature; nothing here is used by
//! the analyses themselves.

use std::collections::BTreeSet;
use std::path::PathBuf;

use crate::model::{build_model, ProgramModel, RBlock, RBody, RExpr, RExprKind, RStmt, RTarget};
use crate::syntax::parse_source;

/// Enumerates the exact proceed counts of every acyclic path through the
/// body, unrolling each loop at most `unroll` times. Counts are tracked
/// as sets, independently of the interval arithmetic under test.
pub fn enumerate_proceed_counts(body: &RBody, unroll: usize) -> BTreeSet<u64> {
    let mut returned = BTreeSet::new();
    let flowing = enum_block(&body.block, [0u64].into_iter().collect(), &mut returned, unroll);
    let mut all = returned;
    all.extend(flowing);
    all
}

fn enum_block(
    block: &RBlock,
    mut states: BTreeSet<u64>,
    returned: &mut BTreeSet<u64>,
    unroll: usize,
) -> BTreeSet<u64> {
    for stmt in &block.stmts {
        if states.is_empty() {
            break;
        }
        states = enum_stmt(stmt, states, returned, unroll);
    }
    states
}

fn shift(states: &BTreeSet<u64>, n: u64) -> BTreeSet<u64> {
    states.iter().map(|c| c.saturating_add(n)).collect()
}

fn enum_stmt(
    stmt: &RStmt,
    states: BTreeSet<u64>,
    returned: &mut BTreeSet<u64>,
    unroll: usize,
) -> BTreeSet<u64> {
    match stmt {
        RStmt::Local { init, .. } => {
            let n = init.as_ref().map_or(0, count_proceeds);
            shift(&states, n)
        }
        RStmt::Expr { expr, .. } => shift(&states, count_proceeds(expr)),
        RStmt::Assign { target, value, .. } => {
            let mut n = count_proceeds(value);
            if let RTarget::ClassField { recv, .. } = target {
                n += count_proceeds(recv);
            }
            shift(&states, n)
        }
        RStmt::Return { value, .. } => {
            let n = value.as_ref().map_or(0, count_proceeds);
            returned.extend(shift(&states, n));
            BTreeSet::new()
        }
        RStmt::If { cond, then_block, else_block, .. } => {
            let at_branch = shift(&states, count_proceeds(cond));
            let mut out = enum_block(then_block, at_branch.clone(), returned, unroll);
            match else_block {
                Some(b) => out.extend(enum_block(b, at_branch, returned, unroll)),
                None => out.extend(at_branch),
            }
            out
        }
        RStmt::While { cond, body, .. } => {
            let n = count_proceeds(cond);
            let mut exits = BTreeSet::new();
            let mut current = states;
            for iteration in 0..=unroll {
                let after_cond = shift(&current, n);
                exits.extend(after_cond.clone());
                if iteration < unroll {
                    current = enum_block(body, after_cond, returned, unroll);
                    if current.is_empty() {
                        break;
                    }
                }
            }
            exits
        }
    }
}

fn count_proceeds(expr: &RExpr) -> u64 {
    let mut n = match &expr.kind {
        RExprKind::Proceed { .. } => 1,
        _ => 0,
    };
    match &expr.kind {
        RExprKind::ClassField { recv, .. } => n += count_proceeds(recv),
        RExprKind::Call { recv, args, .. } => {
            if let Some(r) = recv {
                n += count_proceeds(r);
            }
            for a in args {
                n += count_proceeds(a);
            }
        }
        RExprKind::Intrinsic { args, .. } | RExprKind::Proceed { args } => {
            for a in args {
                n += count_proceeds(a);
            }
        }
        RExprKind::Binary { lhs, rhs, .. } => {
            n += count_proceeds(lhs);
            n += count_proceeds(rhs);
        }
        RExprKind::Not { operand } => n += count_proceeds(operand),
        _ => {}
    }
    n
}

// --- deterministic random body generation ---------------------------------------

/// Minimal linear congruential generator so test inputs are reproducible
/// without pulling in an RNG dependency.
pub struct Lcg {
    state: u64,
}

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Lcg { state: seed.wrapping_mul(2862933555777941757).wrapping_add(3037000493) }
    }

    pub fn next(&mut self) -> u64 {
        self.state = self
            .state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        self.state >> 33
    }

    pub fn pick(&mut self, n: u64) -> u64 {
        self.next() % n
    }
}

/// Generates a random around-advice body (source text) over a bound
/// parameter `o`. Shapes are chosen to stress the interval analysis:
/// proceeds in plain statements, conditions, loops, and returns.
pub fn random_advice_body_source(seed: u64) -> String {
    let mut rng = Lcg::new(seed);
    let mut locals = 0usize;
    let mut out = String::new();
    gen_block(&mut rng, &mut locals, 0, &mut out);
    out.push_str("        return null;\n");
    out
}

fn gen_block(rng: &mut Lcg, locals: &mut usize, depth: usize, out: &mut String) {
    let stmts = rng.pick(4);
    for _ in 0..stmts {
        gen_stmt(rng, locals, depth, out);
    }
}

fn gen_stmt(rng: &mut Lcg, locals: &mut usize, depth: usize, out: &mut String) {
    let max_choice = if depth < 2 { 8 } else { 6 };
    match rng.pick(max_choice) {
        0 => out.push_str("        proceed(o);\n"),
        1 => {
            *locals += 1;
            out.push_str(&format!("        Object v{} = proceed(o);\n", locals));
        }
        2 => out.push_str("        print(\"step\");\n"),
        3 => match rng.pick(3) {
            0 => out.push_str("        return proceed(o);\n"),
            1 => out.push_str("        return null;\n"),
            _ => out.push_str("        return;\n"),
        },
        4 => {
            *locals += 1;
            out.push_str(&format!("        Object v{} = null;\n", locals));
        }
        5 => out.push_str("        proceed(o); proceed(o);\n"),
        6 => {
            let cond = if rng.pick(4) == 0 { "proceed(o) == null" } else { "o == null" };
            out.push_str(&format!("        if ({cond}) {{\n"));
            gen_block(rng, locals, depth + 1, out);
            if rng.pick(2) == 0 {
                out.push_str("        } else {\n");
                gen_block(rng, locals, depth + 1, out);
            }
            out.push_str("        }\n");
        }
        _ => {
            let cond = if rng.pick(4) == 0 { "proceed(o) == null" } else { "o == null" };
            out.push_str(&format!("        while ({cond}) {{\n"));
            gen_block(rng, locals, depth + 1, out);
            out.push_str("        }\n");
        }
    }
}

/// Wraps a generated body in a one-advice program and resolves it.
pub fn model_for_generated_body(body_source: &str) -> ProgramModel {
    let source = format!(
        "class C {{\n    public Object m(Object a) {{ return a; }}\n}}\naspect A {{\n    Object around(Object o): execution(* C.m(..)) && args(o) {{\n{body_source}    }}\n}}\n"
    );
    parse_and_model(&[("generated.ajml", &source)])
}

// --- fixture helpers --------------------------------------------------------------

/// Parses and resolves a set of sources, panicking on syntax errors.
pub fn parse_and_model(sources: &[(&str, &str)]) -> ProgramModel {
    let trees: Vec<_> = sources
        .iter()
        .map(|(name, text)| {
            parse_source(name, text).unwrap_or_else(|e| panic!("parse failure in {name}: {e}"))
        })
        .collect();
    build_model(&trees)
}

/// Like `parse_and_model`, but asserts the model resolved cleanly.
pub fn clean_model(sources: &[(&str, &str)]) -> ProgramModel {
    let model = parse_and_model(sources);
    assert!(
        !model.has_errors(),
        "model has unexpected errors: {:?}",
        model.errors().collect::<Vec<_>>()
    );
    model
}

/// Repository root (the workspace directory containing `corpus/`).
pub fn workspace_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .parent()
        .and_then(|p| p.parent())
        .expect("crate lives two levels under the workspace root")
        .to_path_buf()
}

/// The corpus as a list of named programs, each a list of `.ajml` files
/// forming one compilation-unit set. The fixture directory is one
/// program; every file under `corpus/programs` is a standalone program.
pub fn corpus_programs() -> Vec<(String, Vec<PathBuf>)> {
    let root = workspace_root().join("corpus");
    let mut programs = Vec::new();

    let fixture_dir = root.join("fixture");
    let mut fixture_files: Vec<PathBuf> = std::fs::read_dir(&fixture_dir)
        .unwrap_or_else(|e| panic!("missing corpus fixture dir {fixture_dir:?}: {e}"))
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().and_then(|s| s.to_str()) == Some("ajml"))
        .collect();
    fixture_files.sort();
    programs.push(("fixture".to_string(), fixture_files));

    let programs_dir = root.join("programs");
    let mut singles: Vec<PathBuf> = std::fs::read_dir(&programs_dir)
        .unwrap_or_else(|e| panic!("missing corpus programs dir {programs_dir:?}: {e}"))
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().and_then(|s| s.to_str()) == Some("ajml"))
        .collect();
    singles.sort();
    for path in singles {
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("program").to_string();
        programs.push((name, vec![path]));
    }
    programs
}

/// Loads one corpus program into a resolved model, panicking on any
/// syntax or semantic error.
pub fn load_program(paths: &[PathBuf]) -> ProgramModel {
    let sources: Vec<(String, String)> = paths
        .iter()
        .map(|p| {
            let text = std::fs::read_to_string(p)
                .unwrap_or_else(|e| panic!("cannot read corpus file {p:?}: {e}"));
            let name = p
                .strip_prefix(workspace_root())
                .unwrap_or(p)
                .to_string_lossy()
                .replace('\\', "/");
            (name, text)
        })
        .collect();
    let refs: Vec<(&str, &str)> =
        sources.iter().map(|(n, t)| (n.as_str(), t.as_str())).collect();
    clean_model(&refs)
}
