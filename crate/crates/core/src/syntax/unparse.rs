//! Canonical pretty-printer. Round-tripping parse → unparse → parse
//! must preserve structure; tests compare the unparsed forms.

use crate::syntax::ast::*;

pub fn unparse(tree: &SyntaxTree) -> String {
    let mut p = Printer { out: String::new(), indent: 0 };
    for decl in &tree.decls {
        match decl {
            Decl::Class(c) => p.class(c),
            Decl::Aspect(a) => p.aspect(a),
        }
        p.out.push('\n');
    }
    p.out
}

struct Printer {
    out: String,
    indent: usize,
}

impl Printer {
    fn line(&mut self, text: &str) {
        for _ in 0..self.indent {
            self.out.push_str("    ");
        }
        self.out.push_str(text);
        self.out.push('\n');
    }

    fn class(&mut self, c: &ClassNode) {
        self.line(&format!("class {} {{", c.name.name));
        self.indent += 1;
        for m in &c.members {
            match m {
                ClassMember::Field(f) => self.field(f, None),
                ClassMember::Method(m) => self.method(m, None),
            }
        }
        self.indent -= 1;
        self.line("}");
    }

    fn aspect(&mut self, a: &AspectNode) {
        let head = if a.privileged {
            format!("privileged aspect {} {{", a.name.name)
        } else {
            format!("aspect {} {{", a.name.name)
        };
        self.line(&head);
        self.indent += 1;
        for m in &a.members {
            match m {
                AspectMember::Pointcut(p) => {
                    self.line(&format!(
                        "pointcut {}({}): {};",
                        p.name.name,
                        params(&p.params),
                        pointcut(&p.expr)
                    ));
                }
                AspectMember::Advice(adv) => self.advice(adv),
                AspectMember::InterTypeField(f) => {
                    let mut s = String::new();
                    if f.visibility == Visibility::Private {
                        s.push_str("private ");
                    }
                    s.push_str(&format!("{} {}.{}", f.ty, f.target.name, f.name.name));
                    if let Some(init) = &f.init {
                        s.push_str(&format!(" = {}", expr(init)));
                    }
                    s.push(';');
                    self.line(&s);
                }
                AspectMember::InterTypeMethod(m) => {
                    let mut s = String::new();
                    if m.visibility == Visibility::Private {
                        s.push_str("private ");
                    }
                    s.push_str(&format!(
                        "{} {}.{}({}) {{",
                        m.return_type,
                        m.target.name,
                        m.name.name,
                        params(&m.params)
                    ));
                    self.line(&s);
                    self.block_body(&m.body);
                    self.line("}");
                }
                AspectMember::DeclareParents(d) => {
                    self.line(&format!(
                        "declare parents : {} implements {};",
                        d.target.name, d.interface.name
                    ));
                }
                AspectMember::Field(f) => self.field(f, None),
                AspectMember::Method(m) => self.method(m, None),
            }
        }
        self.indent -= 1;
        self.line("}");
    }

    fn field(&mut self, f: &FieldNode, _ctx: Option<()>) {
        let mut s = String::new();
        if f.visibility == Visibility::Private {
            s.push_str("private ");
        }
        s.push_str(&format!("{} {}", f.ty, f.name.name));
        if let Some(init) = &f.init {
            s.push_str(&format!(" = {}", expr(init)));
        }
        s.push(';');
        self.line(&s);
    }

    fn method(&mut self, m: &MethodNode, _ctx: Option<()>) {
        let mut s = String::new();
        if m.visibility == Visibility::Private {
            s.push_str("private ");
        }
        s.push_str(&format!("{} {}({}) {{", m.return_type, m.name.name, params(&m.params)));
        self.line(&s);
        self.block_body(&m.body);
        self.line("}");
    }

    fn advice(&mut self, adv: &AdviceNode) {
        let head = match adv.kind {
            AdviceKind::Before => format!("before({})", params(&adv.params)),
            AdviceKind::After => format!("after({})", params(&adv.params)),
            AdviceKind::Around => format!(
                "{} around({})",
                adv.return_type.as_ref().expect("around advice carries a return type"),
                params(&adv.params)
            ),
        };
        self.line(&format!("{}: {} {{", head, pointcut(&adv.pointcut)));
        self.block_body(&adv.body);
        self.line("}");
    }

    fn block_body(&mut self, block: &Block) {
        self.indent += 1;
        for s in &block.stmts {
            self.stmt(s);
        }
        self.indent -= 1;
    }

    fn stmt(&mut self, s: &Stmt) {
        match s {
            Stmt::Local { ty, name, init, .. } => {
                let mut line = format!("{} {}", ty, name.name);
                if let Some(e) = init {
                    line.push_str(&format!(" = {}", expr(e)));
                }
                line.push(';');
                self.line(&line);
            }
            Stmt::Assign { target, value, .. } => {
                let t = match target {
                    AssignTarget::Name(id) => id.name.clone(),
                    AssignTarget::Field { recv, name, .. } => {
                        format!("{}.{}", expr(recv), name.name)
                    }
                };
                self.line(&format!("{} = {};", t, expr(value)));
            }
            Stmt::If { cond, then_block, else_block, .. } => {
                self.line(&format!("if ({}) {{", expr(cond)));
                self.block_body(then_block);
                if let Some(e) = else_block {
                    self.line("} else {");
                    self.block_body(e);
                }
                self.line("}");
            }
            Stmt::While { cond, body, .. } => {
                self.line(&format!("while ({}) {{", expr(cond)));
                self.block_body(body);
                self.line("}");
            }
            Stmt::Return { value, .. } => match value {
                Some(e) => self.line(&format!("return {};", expr(e))),
                None => self.line("return;"),
            },
            Stmt::Expr { expr: e, .. } => self.line(&format!("{};", expr(e))),
        }
    }
}

fn params(list: &[Param]) -> String {
    list.iter()
        .map(|p| format!("{} {}", p.ty, p.name.name))
        .collect::<Vec<_>>()
        .join(", ")
}

fn pointcut(pc: &PointcutExprNode) -> String {
    match pc {
        PointcutExprNode::Execution(sig, _) => format!("execution({sig})"),
        PointcutExprNode::Call(sig, _) => format!("call({sig})"),
        PointcutExprNode::Args(ids, _) => {
            let names: Vec<&str> = ids.iter().map(|i| i.name.as_str()).collect();
            format!("args({})", names.join(", "))
        }
        PointcutExprNode::Not(inner, _) => format!("!({})", pointcut(inner)),
        PointcutExprNode::And(l, r, _) => format!("({} && {})", pointcut(l), pointcut(r)),
        PointcutExprNode::Or(l, r, _) => format!("({} || {})", pointcut(l), pointcut(r)),
        PointcutExprNode::Named { name, args, .. } => {
            let names: Vec<&str> = args.iter().map(|i| i.name.as_str()).collect();
            format!("{}({})", name.name, names.join(", "))
        }
    }
}

fn expr(e: &Expr) -> String {
    match e {
        Expr::Name(id) => id.name.clone(),
        Expr::IntLit { value, .. } => value.to_string(),
        Expr::StrLit { value, .. } => format!("{:?}", value),
        Expr::BoolLit { value, .. } => value.to_string(),
        Expr::NullLit { .. } => "null".to_string(),
        Expr::Field { recv, name, .. } => format!("{}.{}", expr(recv), name.name),
        Expr::Call { recv, name, args, .. } => {
            let list = args.iter().map(expr).collect::<Vec<_>>().join(", ");
            match recv {
                Some(r) => format!("{}.{}({})", expr(r), name.name, list),
                None => format!("{}({})", name.name, list),
            }
        }
        Expr::Proceed { args, .. } => {
            let list = args.iter().map(expr).collect::<Vec<_>>().join(", ");
            format!("proceed({list})")
        }
        Expr::Binary { op, lhs, rhs, .. } => {
            format!("({} {} {})", expr(lhs), op.as_str(), expr(rhs))
        }
        Expr::Not { operand, .. } => format!("!({})", expr(operand)),
    }
}
