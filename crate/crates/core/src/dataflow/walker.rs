//! Intra-procedural walk of one function body: scope tracking, read/write
//! resolution, storage-alias tainting, and call classification.

use super::{AccessEvent, AccessKind, Confidence, FunctionId, FunctionSummary, InternalCallSite};
use crate::frontend::lexer::is_elementary_type;
use crate::frontend::printer::expr_to_string;
use crate::frontend::{
    Block, ContractKind, DataLocation, Expr, ExprKind, FunctionDef, FunctionKind, Statement,
    StatementKind,
};
use crate::model::{ProjectModel, StateVarId};
use std::collections::{BTreeMap, BTreeSet};

const BUILTIN_FUNCTIONS: &[&str] = &[
    "addmod", "assert", "blockhash", "ecrecover", "gasleft", "keccak256", "mulmod", "require",
    "ripemd160", "selfdestruct", "sha256", "type",
];

const BUILTIN_OBJECTS: &[&str] = &["abi", "block", "msg", "tx"];

const LOW_LEVEL_MEMBERS: &[&str] = &["call", "delegatecall", "send", "staticcall", "transfer"];

#[derive(Debug, Clone, Default)]
struct LocalInfo {
    type_text: String,
    location: DataLocation,
    /// State variables this storage local aliases (transitively).
    alias_vars: BTreeSet<StateVarId>,
    /// Storage-parameter indexes this local aliases.
    alias_params: BTreeSet<usize>,
    /// Storage local whose root could not be determined; writes through it
    /// blanket the contract.
    alias_unknown: bool,
}

pub(super) fn walk_function(
    model: &ProjectModel,
    contract_key: &str,
    file: &str,
    func: &FunctionDef,
) -> FunctionSummary {
    let mut w = Walker {
        model,
        contract_key,
        file,
        function: FunctionId {
            contract: contract_key.to_string(),
            signature: func.signature(),
        },
        in_constructor: func.kind == FunctionKind::Constructor,
        scopes: vec![BTreeMap::new()],
        param_positions: BTreeMap::new(),
        seq: 0,
        summary: FunctionSummary::default(),
    };
    for (idx, p) in func.params.iter().enumerate() {
        if p.name.is_empty() {
            continue;
        }
        let mut info = LocalInfo {
            type_text: p.type_text.clone(),
            location: p.location,
            ..Default::default()
        };
        if p.location == DataLocation::Storage {
            info.alias_params.insert(idx);
        }
        w.param_positions.insert(p.name.clone(), idx);
        w.scopes[0].insert(p.name.clone(), info);
    }
    // Modifier invocations evaluate before the body (seq 0).
    for m in &func.modifiers {
        match &m.kind {
            ExprKind::Call { callee, args } => {
                if let ExprKind::Ident(name) = &callee.kind {
                    w.record_call_site(name.clone(), None, args, m.line, m.column);
                }
                for a in args {
                    w.walk_expr(a, false);
                }
            }
            ExprKind::Ident(name) => {
                w.record_call_site(name.clone(), None, &[], m.line, m.column);
            }
            _ => {}
        }
    }
    if let Some(body) = &func.body {
        w.walk_block(body);
    }
    w.summary
}

struct Walker<'m> {
    model: &'m ProjectModel,
    contract_key: &'m str,
    file: &'m str,
    function: FunctionId,
    in_constructor: bool,
    scopes: Vec<BTreeMap<String, LocalInfo>>,
    param_positions: BTreeMap<String, usize>,
    seq: u32,
    summary: FunctionSummary,
}

impl<'m> Walker<'m> {
    fn lookup_local(&self, name: &str) -> Option<&LocalInfo> {
        self.scopes.iter().rev().find_map(|s| s.get(name))
    }

    fn declare_local(&mut self, name: &str, info: LocalInfo) {
        self.scopes
            .last_mut()
            .expect("scope stack never empty")
            .insert(name.to_string(), info);
    }

    fn push_event(
        &mut self,
        kind: AccessKind,
        subject: Option<StateVarId>,
        line: u32,
        column: u32,
        confidence: Confidence,
        in_guard: bool,
        callee: Option<String>,
    ) {
        self.summary.events.push(AccessEvent {
            kind,
            subject,
            function: self.function.clone(),
            seq: self.seq,
            file: self.file.to_string(),
            line,
            column,
            confidence,
            in_guard,
            in_constructor: self.in_constructor,
            callee,
        });
    }

    fn resolve_var(&self, name: &str) -> Option<StateVarId> {
        self.model.resolve_state_var(self.contract_key, name)
    }

    fn blanket_write(&mut self, line: u32, column: u32) {
        for var in self.model.visible_state_vars(self.contract_key) {
            self.push_event(
                AccessKind::Write,
                Some(var),
                line,
                column,
                Confidence::Conservative,
                false,
                None,
            );
        }
    }

    fn record_call_site(
        &mut self,
        callee_name: String,
        hint: Option<String>,
        args: &[Expr],
        line: u32,
        column: u32,
    ) {
        let arg_roots = args.iter().map(|a| self.single_root(a)).collect();
        self.summary.calls.push(InternalCallSite {
            caller: self.function.clone(),
            caller_contract: self.contract_key.to_string(),
            callee_name,
            callee_contract_hint: hint,
            arity: args.len(),
            arg_roots,
            seq: self.seq,
            file: self.file.to_string(),
            line,
            column,
            in_constructor: self.in_constructor,
        });
    }

    // ---- statements --------------------------------------------------

    fn walk_block(&mut self, block: &Block) {
        self.scopes.push(BTreeMap::new());
        for s in &block.statements {
            self.walk_statement(s);
        }
        self.scopes.pop();
    }

    fn walk_statement(&mut self, s: &Statement) {
        self.seq += 1;
        match &s.kind {
            StatementKind::Block(b) => self.walk_block(b),
            StatementKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                self.walk_expr(cond, true);
                self.walk_statement(then_branch);
                if let Some(e) = else_branch {
                    self.walk_statement(e);
                }
            }
            StatementKind::While { cond, body } => {
                self.walk_expr(cond, true);
                self.walk_statement(body);
            }
            StatementKind::DoWhile { body, cond } => {
                self.walk_statement(body);
                self.walk_expr(cond, true);
            }
            StatementKind::For {
                init,
                cond,
                update,
                body,
            } => {
                // loop variable scope spans the whole statement
                self.scopes.push(BTreeMap::new());
                if let Some(i) = init {
                    self.walk_statement(i);
                }
                if let Some(c) = cond {
                    self.walk_expr(c, true);
                }
                if let Some(u) = update {
                    self.walk_expr(u, false);
                }
                self.walk_statement(body);
                self.scopes.pop();
            }
            StatementKind::Return(v) => {
                if let Some(v) = v {
                    self.walk_expr(v, false);
                }
            }
            StatementKind::Emit(e) => {
                if let ExprKind::Call { args, .. } = &e.kind {
                    for a in args {
                        self.walk_expr(a, false);
                    }
                } else {
                    self.walk_expr(e, false);
                }
            }
            StatementKind::Revert(v) => {
                if let Some(v) = v {
                    if let ExprKind::Call { args, .. } = &v.kind {
                        for a in args {
                            self.walk_expr(a, false);
                        }
                    } else {
                        self.walk_expr(v, false);
                    }
                }
            }
            StatementKind::Break | StatementKind::Continue | StatementKind::Placeholder => {}
            StatementKind::Unchecked(b) => self.walk_block(b),
            StatementKind::Try {
                expr,
                returns,
                body,
                catches,
            } => {
                self.walk_expr(expr, false);
                self.scopes.push(BTreeMap::new());
                for p in returns {
                    if !p.name.is_empty() {
                        self.declare_local(
                            &p.name,
                            LocalInfo {
                                type_text: p.type_text.clone(),
                                location: p.location,
                                ..Default::default()
                            },
                        );
                    }
                }
                self.walk_block(body);
                self.scopes.pop();
                for c in catches {
                    self.scopes.push(BTreeMap::new());
                    for p in &c.params {
                        if !p.name.is_empty() {
                            self.declare_local(
                                &p.name,
                                LocalInfo {
                                    type_text: p.type_text.clone(),
                                    location: p.location,
                                    ..Default::default()
                                },
                            );
                        }
                    }
                    self.walk_block(&c.body);
                    self.scopes.pop();
                }
            }
            StatementKind::Assembly { raw } => {
                if contains_word(raw, "sstore") {
                    self.blanket_write(s.line, s.column);
                }
            }
            StatementKind::Degraded { .. } => {
                // Unknown code: assume it may write anything in the contract.
                self.blanket_write(s.line, s.column);
            }
            StatementKind::VarDecl(decl) => {
                if let Some(init) = &decl.initializer {
                    self.walk_expr(init, false);
                }
                let inits: Vec<Option<&Expr>> = if decl.tuple {
                    match decl.initializer.as_ref().map(|e| &e.kind) {
                        Some(ExprKind::Tuple(items)) if items.len() == decl.declarations.len() => {
                            items.iter().map(|i| i.as_ref()).collect()
                        }
                        _ => vec![None; decl.declarations.len()],
                    }
                } else {
                    vec![decl.initializer.as_ref(); decl.declarations.len()]
                };
                for (d, init) in decl.declarations.iter().zip(inits) {
                    let Some(d) = d else { continue };
                    let mut info = LocalInfo {
                        type_text: d.type_text.clone(),
                        location: d.location,
                        ..Default::default()
                    };
                    if d.location == DataLocation::Storage {
                        match init {
                            Some(e) => {
                                let root = self.expr_root(e);
                                info.alias_vars = root.vars;
                                info.alias_params = root.params;
                                info.alias_unknown = root.unknown;
                            }
                            // Uninitialized storage pointer (old Solidity):
                            // nothing known; writes blanket the contract.
                            None => info.alias_unknown = true,
                        }
                    }
                    self.declare_local(&d.name, info);
                }
            }
            StatementKind::Expr(e) => self.walk_expr(e, false),
        }
    }

    // ---- expressions ---------------------------------------------------

    fn walk_expr(&mut self, e: &Expr, guard: bool) {
        match &e.kind {
            ExprKind::Ident(name) => {
                if self.lookup_local(name).is_some() || is_builtin_object(name) {
                    return;
                }
                if let Some(id) = self.resolve_var(name) {
                    self.push_event(
                        AccessKind::Read,
                        Some(id),
                        e.line,
                        e.column,
                        Confidence::Exact,
                        guard,
                        None,
                    );
                }
            }
            ExprKind::Number(_)
            | ExprKind::StringLit(_)
            | ExprKind::Bool(_)
            | ExprKind::ElementaryType(_)
            | ExprKind::New(_) => {}
            ExprKind::Member { object, .. } => self.walk_expr(object, guard),
            ExprKind::Index { object, index } => {
                self.walk_expr(object, guard);
                if let Some(i) = index {
                    self.walk_expr(i, guard);
                }
            }
            ExprKind::Call { callee, args } => self.walk_call(e, callee, args, guard),
            ExprKind::CallOptions { callee, options } => {
                self.walk_expr(callee, guard);
                for (_, v) in options {
                    self.walk_expr(v, guard);
                }
            }
            ExprKind::Unary { op, expr, .. } => match op.as_str() {
                "delete" => self.write_target(expr, false),
                "++" | "--" => self.write_target(expr, true),
                _ => self.walk_expr(expr, guard),
            },
            ExprKind::Binary { lhs, rhs, .. } => {
                self.walk_expr(lhs, guard);
                self.walk_expr(rhs, guard);
            }
            ExprKind::Assign { op, target, value } => {
                self.walk_expr(value, guard);
                self.write_target(target, op != "=");
            }
            ExprKind::Ternary { cond, yes, no } => {
                self.walk_expr(cond, true);
                self.walk_expr(yes, guard);
                self.walk_expr(no, guard);
            }
            ExprKind::Tuple(items) => {
                for i in items.iter().flatten() {
                    self.walk_expr(i, guard);
                }
            }
            ExprKind::ArrayLit(items) => {
                for i in items {
                    self.walk_expr(i, guard);
                }
            }
        }
    }

    /// Record the write implied by an assignment-like operation on `target`.
    /// Index expressions along the access chain are reads; the chain root
    /// decides what is written.
    fn write_target(&mut self, target: &Expr, also_read: bool) {
        let mut current = target;
        loop {
            match &current.kind {
                ExprKind::Member { object, .. } => current = object,
                ExprKind::Index { object, index } => {
                    if let Some(i) = index {
                        self.walk_expr(i, false);
                    }
                    current = object;
                }
                _ => break,
            }
        }
        match &current.kind {
            ExprKind::Ident(name) => {
                if let Some(local) = self.lookup_local(name).cloned() {
                    if local.location == DataLocation::Storage {
                        self.write_through_alias(&local, current.line, current.column);
                    }
                    return;
                }
                if let Some(id) = self.resolve_var(name) {
                    if also_read {
                        self.push_event(
                            AccessKind::Read,
                            Some(id.clone()),
                            current.line,
                            current.column,
                            Confidence::Exact,
                            false,
                            None,
                        );
                    }
                    self.push_event(
                        AccessKind::Write,
                        Some(id),
                        current.line,
                        current.column,
                        Confidence::Exact,
                        false,
                        None,
                    );
                }
            }
            ExprKind::Tuple(items) => {
                for i in items.iter().flatten() {
                    self.write_target(i, also_read);
                }
            }
            _ => self.walk_expr(current, false),
        }
    }

    fn write_through_alias(&mut self, local: &LocalInfo, line: u32, column: u32) {
        for var in &local.alias_vars {
            self.push_event(
                AccessKind::Write,
                Some(var.clone()),
                line,
                column,
                Confidence::Conservative,
                false,
                None,
            );
        }
        for p in &local.alias_params {
            self.summary.written_storage_params.insert(*p);
        }
        if local.alias_unknown {
            self.blanket_write(line, column);
        }
    }

    fn walk_call(&mut self, whole: &Expr, callee: &Expr, args: &[Expr], guard: bool) {
        // Peel call options; their values are evaluated either way.
        let (callee, _options) = match &callee.kind {
            ExprKind::CallOptions {
                callee: inner,
                options,
            } => {
                for (_, v) in options {
                    self.walk_expr(v, guard);
                }
                (inner.as_ref(), Some(options))
            }
            _ => (callee, None),
        };

        match &callee.kind {
            ExprKind::Ident(name) => {
                if name == "require" || name == "assert" {
                    if let Some(first) = args.first() {
                        self.walk_expr(first, true);
                    }
                    for a in args.iter().skip(1) {
                        self.walk_expr(a, false);
                    }
                    return;
                }
                if BUILTIN_FUNCTIONS.contains(&name.as_str()) {
                    for a in args {
                        self.walk_expr(a, guard);
                    }
                    return;
                }
                // Bare call: internal (or unresolvable, which is still not an
                // external interaction).
                self.record_call_site(name.clone(), None, args, callee.line, callee.column);
                for a in args {
                    self.walk_expr(a, guard);
                }
            }
            ExprKind::ElementaryType(_) => {
                for a in args {
                    self.walk_expr(a, guard);
                }
            }
            ExprKind::New(t) => {
                self.push_event(
                    AccessKind::ExternalCall,
                    None,
                    whole.line,
                    whole.column,
                    Confidence::Exact,
                    false,
                    Some(format!("new {}", t)),
                );
                for a in args {
                    self.walk_expr(a, guard);
                }
            }
            ExprKind::Member { object, member } => {
                self.walk_member_call(whole, callee, object, member, args, guard);
            }
            _ => {
                self.walk_expr(callee, guard);
                for a in args {
                    self.walk_expr(a, guard);
                }
            }
        }
    }

    fn walk_member_call(
        &mut self,
        whole: &Expr,
        callee: &Expr,
        object: &Expr,
        member: &str,
        args: &[Expr],
        guard: bool,
    ) {
        let walk_rest = |w: &mut Self| {
            w.walk_expr(object, guard);
            for a in args {
                w.walk_expr(a, guard);
            }
        };

        if let ExprKind::Ident(name) = &object.kind {
            if name == "super" {
                self.record_call_site(
                    member.to_string(),
                    Some("super".to_string()),
                    args,
                    callee.line,
                    callee.column,
                );
                for a in args {
                    self.walk_expr(a, guard);
                }
                return;
            }
            if BUILTIN_OBJECTS.contains(&name.as_str()) {
                for a in args {
                    self.walk_expr(a, guard);
                }
                return;
            }
            if name == "this" {
                self.push_event(
                    AccessKind::ExternalCall,
                    None,
                    whole.line,
                    whole.column,
                    Confidence::Exact,
                    false,
                    Some(expr_to_string(callee)),
                );
                for a in args {
                    self.walk_expr(a, guard);
                }
                return;
            }
            // Qualified calls on a contract *name* (not an instance):
            // library calls and explicit base calls are internal.
            if self.lookup_local(name).is_none() && self.resolve_var(name).is_none() {
                if let Some(keys) = self.model.by_name.get(name) {
                    let key = keys[0].clone();
                    let kind = self.model.contract_kind(&key);
                    let in_lineage = self
                        .model
                        .linearizations
                        .get(self.contract_key)
                        .is_some_and(|l| l.contains(&key));
                    if kind == Some(ContractKind::Library) || in_lineage {
                        self.record_call_site(
                            member.to_string(),
                            Some(key),
                            args,
                            callee.line,
                            callee.column,
                        );
                    }
                    for a in args {
                        self.walk_expr(a, guard);
                    }
                    return;
                }
            }
        }
        if let ExprKind::ElementaryType(_) = &object.kind {
            // bytes.concat, string.concat, type-level members
            for a in args {
                self.walk_expr(a, guard);
            }
            return;
        }

        // Storage array mutators write the chain root.
        if member == "push" || member == "pop" {
            self.write_target(object, false);
            for a in args {
                self.walk_expr(a, guard);
            }
            return;
        }

        if LOW_LEVEL_MEMBERS.contains(&member) {
            self.push_event(
                AccessKind::ExternalCall,
                None,
                whole.line,
                whole.column,
                Confidence::Exact,
                false,
                Some(expr_to_string(callee)),
            );
            walk_rest(self);
            return;
        }

        match self.receiver_class(object) {
            ReceiverClass::Value | ReceiverClass::Library => {
                // using-for / library-style call on a value: internal.
                walk_rest(self);
            }
            ReceiverClass::ContractLike => {
                self.push_event(
                    AccessKind::ExternalCall,
                    None,
                    whole.line,
                    whole.column,
                    Confidence::Exact,
                    false,
                    Some(expr_to_string(callee)),
                );
                walk_rest(self);
            }
            ReceiverClass::Unknown => {
                self.push_event(
                    AccessKind::ExternalCall,
                    None,
                    whole.line,
                    whole.column,
                    Confidence::Conservative,
                    false,
                    Some(expr_to_string(callee)),
                );
                walk_rest(self);
            }
        }
    }

    fn receiver_class(&self, object: &Expr) -> ReceiverClass {
        match self.receiver_type_text(object) {
            Some(t) => self.classify_type_text(&t),
            None => ReceiverClass::Unknown,
        }
    }

    fn receiver_type_text(&self, object: &Expr) -> Option<String> {
        match &object.kind {
            ExprKind::Ident(name) => {
                if let Some(local) = self.lookup_local(name) {
                    return Some(local.type_text.clone());
                }
                if let Some(id) = self.resolve_var(name) {
                    return self
                        .model
                        .state_var_index
                        .get(&id)
                        .map(|m| m.decl.declared_type.clone());
                }
                None
            }
            ExprKind::Index { object, .. } => {
                let t = self.receiver_type_text(object)?;
                strip_container_layer(&t)
            }
            ExprKind::Call { callee, .. } => match &callee.kind {
                ExprKind::Ident(t) => {
                    if self.model.by_name.contains_key(t) || self.model.value_types.contains(t) {
                        Some(t.clone())
                    } else {
                        None
                    }
                }
                ExprKind::ElementaryType(t) => Some(t.clone()),
                ExprKind::New(t) => Some(t.clone()),
                _ => None,
            },
            ExprKind::CallOptions { callee, .. } => self.receiver_type_text(callee),
            _ => None,
        }
    }

    fn classify_type_text(&self, t: &str) -> ReceiverClass {
        if t == "address" || t == "address payable" || t == "payable" {
            return ReceiverClass::ContractLike;
        }
        if t.starts_with("mapping(") || t.ends_with(']') || t.starts_with("function(") {
            return ReceiverClass::Value;
        }
        let head = t.split_whitespace().next().unwrap_or(t);
        if is_elementary_type(head) {
            return ReceiverClass::Value;
        }
        let bare = head.rsplit('.').next().unwrap_or(head);
        if self.model.value_types.contains(bare) {
            return ReceiverClass::Value;
        }
        match self.model.by_name.get(bare) {
            Some(keys) => match self.model.contract_kind(&keys[0]) {
                Some(ContractKind::Library) => ReceiverClass::Library,
                _ => ReceiverClass::ContractLike,
            },
            // An identifier type that resolves to nothing in the project:
            // an opaque imported contract type.
            None => ReceiverClass::ContractLike,
        }
    }

    /// Root state variable of an expression, if it is uniquely rooted at one
    /// (used for call-argument escape analysis and alias initialization).
    fn single_root(&self, e: &Expr) -> Option<StateVarId> {
        let root = self.expr_root(e);
        if root.vars.len() == 1 && !root.unknown {
            root.vars.into_iter().next()
        } else {
            None
        }
    }

    fn expr_root(&self, e: &Expr) -> RootInfo {
        match &e.kind {
            ExprKind::Ident(name) => {
                if let Some(local) = self.lookup_local(name) {
                    if local.location == DataLocation::Storage {
                        return RootInfo {
                            vars: local.alias_vars.clone(),
                            params: local.alias_params.clone(),
                            unknown: local.alias_unknown,
                        };
                    }
                    return RootInfo::default();
                }
                if is_builtin_object(name) {
                    return RootInfo::default();
                }
                match self.resolve_var(name) {
                    Some(id) => RootInfo {
                        vars: BTreeSet::from([id]),
                        ..Default::default()
                    },
                    None => RootInfo::default(),
                }
            }
            ExprKind::Member { object, .. } => self.expr_root(object),
            ExprKind::Index { object, .. } => self.expr_root(object),
            ExprKind::Call { .. } | ExprKind::CallOptions { .. } => RootInfo {
                unknown: true,
                ..Default::default()
            },
            ExprKind::Ternary { yes, no, .. } => {
                let mut a = self.expr_root(yes);
                let b = self.expr_root(no);
                a.vars.extend(b.vars);
                a.params.extend(b.params);
                a.unknown |= b.unknown;
                a
            }
            _ => RootInfo::default(),
        }
    }
}

#[derive(Debug, Clone, Default)]
struct RootInfo {
    vars: BTreeSet<StateVarId>,
    params: BTreeSet<usize>,
    unknown: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ReceiverClass {
    /// Value-typed receiver: using-for style call, internal.
    Value,
    Library,
    /// Contract, interface, address, or opaque imported type: external.
    ContractLike,
    Unknown,
}

fn is_builtin_object(name: &str) -> bool {
    BUILTIN_OBJECTS.contains(&name) || name == "this" || name == "super" || name == "now"
}

fn contains_word(haystack: &str, word: &str) -> bool {
    haystack
        .split(|c: char| !c.is_alphanumeric() && c != '_')
        .any(|w| w == word)
}

/// Peel one container layer off a type text: `T[]`/`T[3]` yields `T`,
/// `mapping(K => V)` yields `V`.
fn strip_container_layer(t: &str) -> Option<String> {
    if t.ends_with(']') {
        let open = t.rfind('[')?;
        return Some(t[..open].trim_end().to_string());
    }
    if let Some(inner) = t.strip_prefix("mapping(").and_then(|s| s.strip_suffix(')')) {
        let mut depth = 0usize;
        let bytes = inner.as_bytes();
        for i in 0..bytes.len().saturating_sub(1) {
            match bytes[i] {
                b'(' => depth += 1,
                b')' => depth = depth.saturating_sub(1),
                b'=' if depth == 0 && bytes[i + 1] == b'>' => {
                    return Some(inner[i + 2..].trim().to_string());
                }
                _ => {}
            }
        }
        return None;
    }
    None
}
