//! Canonical source rendering for parsed units.
//!
//! `pretty_print` emits syntactically valid text that re-parses to a
//! structurally equal unit. Expressions are printed with minimal parentheses
//! derived from the same precedence table the parser uses.

use super::ast::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PrintError {
    #[error("unit `{path}` has {count} diagnostic(s); refusing to print a degraded tree")]
    Degraded { path: String, count: usize },
}

/// Render a diagnostic-free unit back to source text.
pub fn pretty_print(unit: &SourceUnit) -> Result<String, PrintError> {
    if !unit.diagnostics.is_empty() {
        return Err(PrintError::Degraded {
            path: unit.path.clone(),
            count: unit.diagnostics.len(),
        });
    }
    let mut out = String::new();
    for p in &unit.pragmas {
        out.push_str("pragma ");
        out.push_str(p);
        out.push_str(";\n");
    }
    for i in &unit.imports {
        out.push_str(&format!("import \"{}\";\n", i));
    }
    if !unit.pragmas.is_empty() || !unit.imports.is_empty() {
        out.push('\n');
    }
    for (idx, c) in unit.contracts.iter().enumerate() {
        if idx > 0 {
            out.push('\n');
        }
        print_contract(&mut out, c);
    }
    Ok(out)
}

fn print_contract(out: &mut String, c: &ContractDef) {
    let kw = match c.kind {
        ContractKind::Contract => "contract",
        ContractKind::AbstractContract => "abstract contract",
        ContractKind::Interface => "interface",
        ContractKind::Library => "library",
    };
    out.push_str(kw);
    out.push(' ');
    out.push_str(&c.name);
    if !c.bases.is_empty() {
        out.push_str(" is ");
        out.push_str(&c.bases.join(", "));
    }
    out.push_str(" {\n");
    for v in &c.state_vars {
        out.push_str("    ");
        print_state_var(out, v);
        out.push('\n');
    }
    if !c.state_vars.is_empty() && !c.functions.is_empty() {
        out.push('\n');
    }
    for (idx, f) in c.functions.iter().enumerate() {
        if idx > 0 {
            out.push('\n');
        }
        print_function(out, f, 1);
    }
    out.push_str("}\n");
}

fn print_state_var(out: &mut String, v: &StateVarDecl) {
    out.push_str(&v.declared_type);
    match v.visibility {
        Visibility::Public => out.push_str(" public"),
        Visibility::Internal => out.push_str(" internal"),
        Visibility::Private => out.push_str(" private"),
        Visibility::External | Visibility::Default => {}
    }
    match v.mutability {
        Mutability::Constant => out.push_str(" constant"),
        Mutability::Immutable => out.push_str(" immutable"),
        Mutability::None => {}
    }
    out.push(' ');
    out.push_str(&v.name);
    if let Some(init) = &v.initializer {
        out.push_str(" = ");
        out.push_str(&expr_to_string(init));
    }
    out.push(';');
}

fn print_function(out: &mut String, f: &FunctionDef, indent: usize) {
    let pad = "    ".repeat(indent);
    out.push_str(&pad);
    match f.kind {
        FunctionKind::Function => {
            out.push_str("function ");
            out.push_str(&f.name);
        }
        FunctionKind::Constructor => out.push_str("constructor"),
        FunctionKind::Modifier => {
            out.push_str("modifier ");
            out.push_str(&f.name);
        }
        FunctionKind::Receive => out.push_str("receive"),
        FunctionKind::Fallback => out.push_str("fallback"),
    }
    out.push('(');
    out.push_str(
        &f.params
            .iter()
            .map(print_param)
            .collect::<Vec<_>>()
            .join(", "),
    );
    out.push(')');
    match f.visibility {
        Visibility::Public => out.push_str(" public"),
        Visibility::Internal => out.push_str(" internal"),
        Visibility::Private => out.push_str(" private"),
        Visibility::External => out.push_str(" external"),
        Visibility::Default => {}
    }
    if f.kind == FunctionKind::Receive {
        // keep the common form valid under real compilers
        out.push_str(" payable");
    }
    for m in &f.modifiers {
        out.push(' ');
        out.push_str(&expr_to_string(m));
    }
    match &f.body {
        None => out.push_str(";\n"),
        Some(b) => {
            out.push(' ');
            print_block(out, b, indent);
            out.push('\n');
        }
    }
}

fn print_param(p: &Param) -> String {
    let mut s = p.type_text.clone();
    match p.location {
        DataLocation::Memory => s.push_str(" memory"),
        DataLocation::Storage => s.push_str(" storage"),
        DataLocation::Calldata => s.push_str(" calldata"),
        DataLocation::None => {}
    }
    if !p.name.is_empty() {
        s.push(' ');
        s.push_str(&p.name);
    }
    s
}

fn print_block(out: &mut String, b: &Block, indent: usize) {
    out.push_str("{\n");
    for s in &b.statements {
        print_statement(out, s, indent + 1);
    }
    out.push_str(&"    ".repeat(indent));
    out.push('}');
}

fn print_statement(out: &mut String, s: &Statement, indent: usize) {
    let pad = "    ".repeat(indent);
    out.push_str(&pad);
    print_statement_bare(out, s, indent);
    out.push('\n');
}

fn print_statement_bare(out: &mut String, s: &Statement, indent: usize) {
    match &s.kind {
        StatementKind::Block(b) => print_block(out, b, indent),
        StatementKind::If {
            cond,
            then_branch,
            else_branch,
        } => {
            out.push_str("if (");
            out.push_str(&expr_to_string(cond));
            out.push_str(") ");
            print_statement_inline(out, then_branch, indent);
            if let Some(e) = else_branch {
                out.push_str(" else ");
                print_statement_inline(out, e, indent);
            }
        }
        StatementKind::While { cond, body } => {
            out.push_str("while (");
            out.push_str(&expr_to_string(cond));
            out.push_str(") ");
            print_statement_inline(out, body, indent);
        }
        StatementKind::DoWhile { body, cond } => {
            out.push_str("do ");
            print_statement_inline(out, body, indent);
            out.push_str(" while (");
            out.push_str(&expr_to_string(cond));
            out.push_str(");");
        }
        StatementKind::For {
            init,
            cond,
            update,
            body,
        } => {
            out.push_str("for (");
            if let Some(i) = init {
                print_statement_bare_no_semi(out, i, indent);
            }
            out.push_str("; ");
            if let Some(c) = cond {
                out.push_str(&expr_to_string(c));
            }
            out.push_str("; ");
            if let Some(u) = update {
                out.push_str(&expr_to_string(u));
            }
            out.push_str(") ");
            print_statement_inline(out, body, indent);
        }
        StatementKind::Return(v) => {
            out.push_str("return");
            if let Some(v) = v {
                out.push(' ');
                out.push_str(&expr_to_string(v));
            }
            out.push(';');
        }
        StatementKind::Emit(e) => {
            out.push_str("emit ");
            out.push_str(&expr_to_string(e));
            out.push(';');
        }
        StatementKind::Revert(v) => {
            out.push_str("revert");
            if let Some(v) = v {
                out.push(' ');
                out.push_str(&expr_to_string(v));
            }
            out.push(';');
        }
        StatementKind::Break => out.push_str("break;"),
        StatementKind::Continue => out.push_str("continue;"),
        StatementKind::Unchecked(b) => {
            out.push_str("unchecked ");
            print_block(out, b, indent);
        }
        StatementKind::Try {
            expr,
            returns,
            body,
            catches,
        } => {
            out.push_str("try ");
            out.push_str(&expr_to_string(expr));
            if !returns.is_empty() {
                out.push_str(" returns (");
                out.push_str(
                    &returns
                        .iter()
                        .map(print_param)
                        .collect::<Vec<_>>()
                        .join(", "),
                );
                out.push(')');
            }
            out.push(' ');
            print_block(out, body, indent);
            for c in catches {
                out.push_str(" catch ");
                if let Some(id) = &c.ident {
                    out.push_str(id);
                }
                if !c.params.is_empty() || c.ident.is_some() {
                    out.push('(');
                    out.push_str(
                        &c.params
                            .iter()
                            .map(print_param)
                            .collect::<Vec<_>>()
                            .join(", "),
                    );
                    out.push_str(") ");
                } else {
                    out.push(' ');
                }
                print_block(out, &c.body, indent);
            }
        }
        StatementKind::Assembly { raw } => {
            out.push_str("assembly {");
            out.push_str(raw);
            out.push('}');
        }
        StatementKind::VarDecl(_) => {
            print_statement_bare_no_semi(out, s, indent);
            out.push(';');
        }
        StatementKind::Expr(_) => {
            print_statement_bare_no_semi(out, s, indent);
            out.push(';');
        }
        StatementKind::Degraded { raw } => {
            // Re-emit the raw text so nothing is lost; it will degrade again.
            out.push_str(raw);
        }
        StatementKind::Placeholder => out.push_str("_;"),
    }
}

/// Declaration/expression statements without the trailing semicolon
/// (for-loop initializers).
fn print_statement_bare_no_semi(out: &mut String, s: &Statement, _indent: usize) {
    match &s.kind {
        StatementKind::VarDecl(v) => {
            if v.tuple {
                out.push('(');
                let parts: Vec<String> = v
                    .declarations
                    .iter()
                    .map(|d| match d {
                        None => String::new(),
                        Some(d) => print_local_decl(d),
                    })
                    .collect();
                out.push_str(&parts.join(", "));
                out.push(')');
            } else if let Some(Some(d)) = v.declarations.first() {
                out.push_str(&print_local_decl(d));
            }
            if let Some(init) = &v.initializer {
                out.push_str(" = ");
                out.push_str(&expr_to_string(init));
            }
        }
        StatementKind::Expr(e) => out.push_str(&expr_to_string(e)),
        _ => {}
    }
}

fn print_local_decl(d: &LocalDecl) -> String {
    let mut s = d.type_text.clone();
    match d.location {
        DataLocation::Memory => s.push_str(" memory"),
        DataLocation::Storage => s.push_str(" storage"),
        DataLocation::Calldata => s.push_str(" calldata"),
        DataLocation::None => {}
    }
    s.push(' ');
    s.push_str(&d.name);
    s
}

fn print_statement_inline(out: &mut String, s: &Statement, indent: usize) {
    match &s.kind {
        StatementKind::Block(b) => print_block(out, b, indent),
        _ => print_statement_bare(out, s, indent),
    }
}

// ---- expressions ----------------------------------------------------------

/// Precedence of an expression node for parenthesization; higher binds
/// tighter. Mirrors the parser's table.
fn expr_precedence(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Assign { .. } => 1,
        ExprKind::Ternary { .. } => 2,
        ExprKind::Binary { op, .. } => match op.as_str() {
            "||" => 3,
            "&&" => 4,
            "==" | "!=" => 5,
            "<" | ">" | "<=" | ">=" => 6,
            "|" => 7,
            "^" => 8,
            "&" => 9,
            "<<" | ">>" => 10,
            "+" | "-" => 11,
            "*" | "/" | "%" => 12,
            "**" => 13,
            _ => 13,
        },
        ExprKind::Unary { prefix: true, .. } => 14,
        ExprKind::Unary { prefix: false, .. }
        | ExprKind::Member { .. }
        | ExprKind::Index { .. }
        | ExprKind::Call { .. }
        | ExprKind::CallOptions { .. } => 15,
        _ => 16,
    }
}

pub fn expr_to_string(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e);
    s
}

fn write_child(out: &mut String, child: &Expr, min_prec: u8) {
    if expr_precedence(child) < min_prec {
        out.push('(');
        write_expr(out, child);
        out.push(')');
    } else {
        write_expr(out, child);
    }
}

fn write_expr(out: &mut String, e: &Expr) {
    match &e.kind {
        ExprKind::Ident(n) => out.push_str(n),
        ExprKind::Number(n) => out.push_str(n),
        ExprKind::StringLit(s) => out.push_str(s),
        ExprKind::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        ExprKind::ElementaryType(t) => out.push_str(t),
        ExprKind::Member { object, member } => {
            write_child(out, object, 15);
            out.push('.');
            out.push_str(member);
        }
        ExprKind::Index { object, index } => {
            write_child(out, object, 15);
            out.push('[');
            if let Some(i) = index {
                write_expr(out, i);
            }
            out.push(']');
        }
        ExprKind::Call { callee, args } => {
            write_child(out, callee, 15);
            out.push('(');
            out.push_str(&args.iter().map(expr_to_string).collect::<Vec<_>>().join(", "));
            out.push(')');
        }
        ExprKind::CallOptions { callee, options } => {
            write_child(out, callee, 15);
            out.push('{');
            out.push_str(
                &options
                    .iter()
                    .map(|(n, v)| format!("{}: {}", n, expr_to_string(v)))
                    .collect::<Vec<_>>()
                    .join(", "),
            );
            out.push('}');
        }
        ExprKind::Unary { op, expr, prefix } => {
            if *prefix {
                out.push_str(op);
                if op == "delete" {
                    out.push(' ');
                }
                write_child(out, expr, 14);
            } else {
                write_child(out, expr, 15);
                out.push_str(op);
            }
        }
        ExprKind::Binary { op, lhs, rhs } => {
            let prec = expr_precedence(e);
            let right_assoc = op == "**";
            if right_assoc {
                write_child(out, lhs, prec + 1);
            } else {
                write_child(out, lhs, prec);
            }
            out.push(' ');
            out.push_str(op);
            out.push(' ');
            if right_assoc {
                write_child(out, rhs, prec);
            } else {
                write_child(out, rhs, prec + 1);
            }
        }
        ExprKind::Assign { op, target, value } => {
            write_child(out, target, 2);
            out.push(' ');
            out.push_str(op);
            out.push(' ');
            write_child(out, value, 1);
        }
        ExprKind::Ternary { cond, yes, no } => {
            write_child(out, cond, 3);
            out.push_str(" ? ");
            write_child(out, yes, 2);
            out.push_str(" : ");
            write_child(out, no, 2);
        }
        ExprKind::Tuple(items) => {
            out.push('(');
            out.push_str(
                &items
                    .iter()
                    .map(|i| i.as_ref().map(expr_to_string).unwrap_or_default())
                    .collect::<Vec<_>>()
                    .join(", "),
            );
            out.push(')');
        }
        ExprKind::ArrayLit(items) => {
            out.push('[');
            out.push_str(&items.iter().map(expr_to_string).collect::<Vec<_>>().join(", "));
            out.push(']');
        }
        ExprKind::New(t) => {
            out.push_str("new ");
            out.push_str(t);
        }
    }
}
