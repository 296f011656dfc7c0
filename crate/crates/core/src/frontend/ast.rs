//! AST for the supported Solidity subset.
//!
//! Locations are 1-based line/column pairs. Structural equality (used by the
//! round-trip tests) compares two trees with all locations erased; see
//! [`SourceUnit::structurally_equal`].

use serde::Serialize;

/// A parse problem. A unit with no diagnostics parsed completely.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub message: String,
    pub line: u32,
    pub column: u32,
}

/// A comment line kept for suppression-annotation scanning.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommentLine {
    pub line: u32,
    pub text: String,
}

/// One parsed `.sol` file.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceUnit {
    pub path: String,
    pub pragmas: Vec<String>,
    pub imports: Vec<String>,
    pub contracts: Vec<ContractDef>,
    pub diagnostics: Vec<Diagnostic>,
    pub comments: Vec<CommentLine>,
    /// Names of structs/enums declared anywhere in the file. Their bodies are
    /// not modeled; the names matter for call-receiver classification.
    pub value_type_names: Vec<String>,
}

impl SourceUnit {
    /// Compare two units ignoring locations, comments, and the value-type
    /// name side table (struct/enum bodies are not part of the tree).
    pub fn structurally_equal(&self, other: &SourceUnit) -> bool {
        let mut a = self.clone();
        let mut b = other.clone();
        a.erase_locations();
        b.erase_locations();
        a.comments.clear();
        b.comments.clear();
        a.value_type_names.clear();
        b.value_type_names.clear();
        a == b
    }

    pub fn erase_locations(&mut self) {
        for d in &mut self.diagnostics {
            d.line = 0;
            d.column = 0;
        }
        for c in &mut self.comments {
            c.line = 0;
        }
        for c in &mut self.contracts {
            c.erase_locations();
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ContractKind {
    Contract,
    AbstractContract,
    Interface,
    Library,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractDef {
    pub name: String,
    pub kind: ContractKind,
    /// Base names in declaration order (leftmost first, as written).
    pub bases: Vec<String>,
    pub state_vars: Vec<StateVarDecl>,
    pub functions: Vec<FunctionDef>,
    pub line: u32,
    pub column: u32,
}

impl ContractDef {
    fn erase_locations(&mut self) {
        self.line = 0;
        self.column = 0;
        for v in &mut self.state_vars {
            v.line = 0;
            v.column = 0;
            if let Some(init) = &mut v.initializer {
                init.erase_locations();
            }
        }
        for f in &mut self.functions {
            f.erase_locations();
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Visibility {
    Public,
    Internal,
    Private,
    External,
    Default,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mutability {
    None,
    Constant,
    Immutable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVarDecl {
    pub name: String,
    pub declared_type: String,
    pub visibility: Visibility,
    pub mutability: Mutability,
    pub initializer: Option<Expr>,
    pub line: u32,
    pub column: u32,
}

impl StateVarDecl {
    pub fn has_initializer(&self) -> bool {
        self.initializer.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FunctionKind {
    Function,
    Constructor,
    Modifier,
    Receive,
    Fallback,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DataLocation {
    #[default]
    None,
    Memory,
    Storage,
    Calldata,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub name: String,
    pub type_text: String,
    pub location: DataLocation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionDef {
    /// Empty for constructor/receive/fallback.
    pub name: String,
    pub kind: FunctionKind,
    pub params: Vec<Param>,
    pub visibility: Visibility,
    /// Modifier invocations attached to the header, e.g. `onlyOwner` or
    /// `costs(fee)`. Their argument expressions are evaluated in the
    /// function's context.
    pub modifiers: Vec<Expr>,
    /// Absent for unimplemented functions and interface members.
    pub body: Option<Block>,
    pub line: u32,
    pub column: u32,
}

impl FunctionDef {
    /// `name(arity)` - enough to tell functions of one contract apart for
    /// this analysis.
    pub fn signature(&self) -> String {
        match self.kind {
            FunctionKind::Constructor => format!("constructor({})", self.params.len()),
            FunctionKind::Receive => "receive()".to_string(),
            FunctionKind::Fallback => "fallback()".to_string(),
            _ => format!("{}({})", self.name, self.params.len()),
        }
    }

    fn erase_locations(&mut self) {
        self.line = 0;
        self.column = 0;
        for m in &mut self.modifiers {
            m.erase_locations();
        }
        if let Some(b) = &mut self.body {
            b.erase_locations();
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Block {
    pub statements: Vec<Statement>,
}

impl Block {
    fn erase_locations(&mut self) {
        for s in &mut self.statements {
            s.erase_locations();
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statement {
    pub kind: StatementKind,
    pub line: u32,
    pub column: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StatementKind {
    Block(Block),
    If {
        cond: Expr,
        then_branch: Box<Statement>,
        else_branch: Option<Box<Statement>>,
    },
    While {
        cond: Expr,
        body: Box<Statement>,
    },
    DoWhile {
        body: Box<Statement>,
        cond: Expr,
    },
    For {
        init: Option<Box<Statement>>,
        cond: Option<Expr>,
        update: Option<Expr>,
        body: Box<Statement>,
    },
    Return(Option<Expr>),
    Emit(Expr),
    Revert(Option<Expr>),
    Break,
    Continue,
    Unchecked(Block),
    Try {
        expr: Expr,
        returns: Vec<Param>,
        body: Block,
        catches: Vec<CatchClause>,
    },
    /// Inline assembly, captured as opaque text between the braces.
    Assembly {
        raw: String,
    },
    VarDecl(VarDeclStatement),
    Expr(Expr),
    /// A statement that failed to parse; raw text retained, treated
    /// conservatively downstream.
    Degraded {
        raw: String,
    },
    /// `_;` inside a modifier body.
    Placeholder,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatchClause {
    pub ident: Option<String>,
    pub params: Vec<Param>,
    pub body: Block,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarDeclStatement {
    /// One entry per tuple slot; `None` for skipped slots as in
    /// `(uint a, , uint c) = f();`.
    pub declarations: Vec<Option<LocalDecl>>,
    pub initializer: Option<Expr>,
    pub tuple: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalDecl {
    pub name: String,
    pub type_text: String,
    pub location: DataLocation,
}

impl Statement {
    fn erase_locations(&mut self) {
        self.line = 0;
        self.column = 0;
        match &mut self.kind {
            StatementKind::Block(b) | StatementKind::Unchecked(b) => b.erase_locations(),
            StatementKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                cond.erase_locations();
                then_branch.erase_locations();
                if let Some(e) = else_branch {
                    e.erase_locations();
                }
            }
            StatementKind::While { cond, body } | StatementKind::DoWhile { body, cond } => {
                cond.erase_locations();
                body.erase_locations();
            }
            StatementKind::For {
                init,
                cond,
                update,
                body,
            } => {
                if let Some(i) = init {
                    i.erase_locations();
                }
                if let Some(c) = cond {
                    c.erase_locations();
                }
                if let Some(u) = update {
                    u.erase_locations();
                }
                body.erase_locations();
            }
            StatementKind::Return(e) | StatementKind::Revert(e) => {
                if let Some(e) = e {
                    e.erase_locations();
                }
            }
            StatementKind::Emit(e) | StatementKind::Expr(e) => e.erase_locations(),
            StatementKind::Try {
                expr,
                body,
                catches,
                ..
            } => {
                expr.erase_locations();
                body.erase_locations();
                for c in catches {
                    c.body.erase_locations();
                }
            }
            StatementKind::VarDecl(v) => {
                if let Some(e) = &mut v.initializer {
                    e.erase_locations();
                }
            }
            StatementKind::Assembly { .. }
            | StatementKind::Degraded { .. }
            | StatementKind::Break
            | StatementKind::Continue
            | StatementKind::Placeholder => {}
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub line: u32,
    pub column: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Ident(String),
    Number(String),
    StringLit(String),
    Bool(bool),
    /// `uint256`, `address payable`, ... appearing in expression position
    /// (casts, `type(...)` arguments).
    ElementaryType(String),
    Member {
        object: Box<Expr>,
        member: String,
    },
    Index {
        object: Box<Expr>,
        index: Option<Box<Expr>>,
    },
    Call {
        callee: Box<Expr>,
        args: Vec<Expr>,
    },
    /// `<callee>{value: v, gas: g}` - call options attached before the
    /// argument list.
    CallOptions {
        callee: Box<Expr>,
        options: Vec<(String, Expr)>,
    },
    Unary {
        op: String,
        expr: Box<Expr>,
        prefix: bool,
    },
    Binary {
        op: String,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Assign {
        op: String,
        target: Box<Expr>,
        value: Box<Expr>,
    },
    Ternary {
        cond: Box<Expr>,
        yes: Box<Expr>,
        no: Box<Expr>,
    },
    Tuple(Vec<Option<Expr>>),
    ArrayLit(Vec<Expr>),
    New(String),
}

impl Expr {
    pub fn erase_locations(&mut self) {
        self.line = 0;
        self.column = 0;
        match &mut self.kind {
            ExprKind::Member { object, .. } => object.erase_locations(),
            ExprKind::Index { object, index } => {
                object.erase_locations();
                if let Some(i) = index {
                    i.erase_locations();
                }
            }
            ExprKind::Call { callee, args } => {
                callee.erase_locations();
                for a in args {
                    a.erase_locations();
                }
            }
            ExprKind::CallOptions { callee, options } => {
                callee.erase_locations();
                for (_, e) in options {
                    e.erase_locations();
                }
            }
            ExprKind::Unary { expr, .. } => expr.erase_locations(),
            ExprKind::Binary { lhs, rhs, .. } => {
                lhs.erase_locations();
                rhs.erase_locations();
            }
            ExprKind::Assign { target, value, .. } => {
                target.erase_locations();
                value.erase_locations();
            }
            ExprKind::Ternary { cond, yes, no } => {
                cond.erase_locations();
                yes.erase_locations();
                no.erase_locations();
            }
            ExprKind::Tuple(items) => {
                for e in items.iter_mut().flatten() {
                    e.erase_locations();
                }
            }
            ExprKind::ArrayLit(items) => {
                for e in items {
                    e.erase_locations();
                }
            }
            ExprKind::Ident(_)
            | ExprKind::Number(_)
            | ExprKind::StringLit(_)
            | ExprKind::Bool(_)
            | ExprKind::ElementaryType(_)
            | ExprKind::New(_) => {}
        }
    }
}
