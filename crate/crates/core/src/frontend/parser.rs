//! Recursive-descent parser for the supported Solidity subset.
//!
//! The parser never aborts: statement-level failures skip to the next `;` or
//! the enclosing `}` and leave a degraded statement carrying the raw text;
//! top-level failures skip the offending item. Every failure is recorded as a
//! diagnostic on the returned unit.

use super::ast::*;
use super::lexer::{self, Token, TokenKind};
use super::printer;

const MAX_DEPTH: u32 = 150;

struct Fail {
    message: String,
    line: u32,
    column: u32,
}

type PResult<T> = Result<T, Fail>;

/// Parse one file. `source` must be the text `tokens` were produced from; it
/// is used to capture raw slices for assembly blocks and degraded statements.
pub fn parse_source_unit(tokens: &[Token], source: &str, path: &str) -> SourceUnit {
    let mut comments = Vec::new();
    let mut diagnostics = Vec::new();
    let mut toks: Vec<&Token> = Vec::with_capacity(tokens.len());
    for t in tokens {
        match t.kind {
            TokenKind::Comment => comments.push(CommentLine {
                line: t.line,
                text: t.text.clone(),
            }),
            TokenKind::Error => {
                let what = if t.text.starts_with("/*") {
                    "unterminated comment"
                } else {
                    "unterminated string"
                };
                diagnostics.push(Diagnostic {
                    message: what.to_string(),
                    line: t.line,
                    column: t.column,
                });
            }
            _ => toks.push(t),
        }
    }
    let mut parser = Parser {
        toks,
        src: source,
        pos: 0,
        diags: diagnostics,
        depth: 0,
        value_types: Vec::new(),
    };
    let (pragmas, imports, contracts) = parser.parse_unit();
    SourceUnit {
        path: path.to_string(),
        pragmas,
        imports,
        contracts,
        diagnostics: parser.diags,
        comments,
        value_type_names: parser.value_types,
    }
}

/// Convenience wrapper: tokenize and parse in one step.
pub fn parse_source(source: &str, path: &str) -> SourceUnit {
    let tokens = lexer::tokenize(source);
    parse_source_unit(&tokens, source, path)
}

struct Parser<'a> {
    toks: Vec<&'a Token>,
    src: &'a str,
    pos: usize,
    diags: Vec<Diagnostic>,
    depth: u32,
    value_types: Vec<String>,
}

impl<'a> Parser<'a> {
    fn cur(&self) -> &'a Token {
        self.toks[self.pos.min(self.toks.len() - 1)]
    }

    fn at_eof(&self) -> bool {
        self.cur().kind == TokenKind::Eof
    }

    fn advance(&mut self) -> &'a Token {
        let t = self.cur();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn at(&self, text: &str) -> bool {
        let t = self.cur();
        t.kind != TokenKind::Eof && t.text == text
    }

    fn peek_is(&self, n: usize, text: &str) -> bool {
        self.toks
            .get(self.pos + n)
            .is_some_and(|t| t.kind != TokenKind::Eof && t.text == text)
    }

    fn eat(&mut self, text: &str) -> bool {
        if self.at(text) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, text: &str) -> PResult<&'a Token> {
        if self.at(text) {
            Ok(self.advance())
        } else {
            Err(self.fail_here(&format!("expected `{}`", text)))
        }
    }

    fn fail_here(&self, what: &str) -> Fail {
        let t = self.cur();
        let found = if t.kind == TokenKind::Eof {
            "end of input".to_string()
        } else {
            format!("`{}`", t.text)
        };
        Fail {
            message: format!("{}, found {}", what, found),
            line: t.line,
            column: t.column,
        }
    }

    fn diag_from(&mut self, f: Fail) {
        self.diags.push(Diagnostic {
            message: f.message,
            line: f.line,
            column: f.column,
        });
    }

    fn enter(&mut self) -> PResult<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            Err(self.fail_here("nesting too deep"))
        } else {
            Ok(())
        }
    }

    fn leave(&mut self) {
        self.depth -= 1;
    }

    fn ident(&mut self) -> PResult<&'a Token> {
        if self.cur().kind == TokenKind::Identifier {
            Ok(self.advance())
        } else {
            Err(self.fail_here("expected identifier"))
        }
    }

    // ---- top level -------------------------------------------------------

    fn parse_unit(&mut self) -> (Vec<String>, Vec<String>, Vec<ContractDef>) {
        let mut pragmas = Vec::new();
        let mut imports = Vec::new();
        let mut contracts: Vec<ContractDef> = Vec::new();
        while !self.at_eof() {
            let start = self.pos;
            if self.at("pragma") {
                self.advance();
                let from = self.cur().offset;
                let mut to = from;
                while !self.at(";") && !self.at_eof() {
                    to = self.advance().end_offset();
                }
                self.eat(";");
                pragmas.push(self.src[from..to.max(from)].trim().to_string());
            } else if self.at("import") {
                match self.parse_import() {
                    Ok(p) => imports.push(p),
                    Err(f) => {
                        self.diag_from(f);
                        self.skip_to_semicolon();
                    }
                }
            } else if self.at("contract")
                || self.at("interface")
                || self.at("library")
                || (self.at("abstract") && self.peek_is(1, "contract"))
            {
                match self.parse_contract() {
                    Ok(c) => {
                        if contracts.iter().any(|e| e.name == c.name) {
                            self.diags.push(Diagnostic {
                                message: format!("duplicate contract name `{}` in file", c.name),
                                line: c.line,
                                column: c.column,
                            });
                        } else {
                            contracts.push(c);
                        }
                    }
                    Err(f) => {
                        self.diag_from(f);
                        self.recover_top_level();
                    }
                }
            } else if self.at("using") || self.at("event") || self.at("error") || self.at("type") {
                // File-level items with no bearing on the analysis.
                self.skip_to_semicolon();
            } else if self.at("struct") || self.at("enum") {
                self.advance();
                if let Ok(name) = self.ident() {
                    self.value_types.push(name.text.clone());
                }
                self.skip_balanced_braces();
            } else if self.at("function") {
                // Free functions: parse and drop.
                if let Err(f) = self.parse_function(FunctionKind::Function) {
                    self.diag_from(f);
                    self.recover_top_level();
                }
            } else if self.at(";") {
                self.advance();
            } else if (self.cur().kind == TokenKind::Keyword && is_type_keyword(&self.cur().text))
                || self.cur().kind == TokenKind::Identifier
            {
                // File-level constants: parse and drop (not contract state).
                if let Err(f) = self.parse_state_var() {
                    self.diag_from(f);
                    self.recover_top_level();
                }
            } else {
                let f = self.fail_here("unexpected token at top level");
                self.diag_from(f);
                self.recover_top_level();
            }
            if self.pos == start && !self.at_eof() {
                self.advance();
            }
        }
        (pragmas, imports, contracts)
    }

    fn parse_import(&mut self) -> PResult<String> {
        self.expect("import")?;
        let path = if self.cur().kind == TokenKind::Str {
            let p = self.advance().text.clone();
            if self.eat("as") {
                self.ident()?;
            }
            p
        } else if self.at("{") || self.at("*") {
            while !self.at("from") && !self.at(";") && !self.at_eof() {
                self.advance();
            }
            self.expect("from")?;
            if self.cur().kind != TokenKind::Str {
                return Err(self.fail_here("expected import path string"));
            }
            self.advance().text.clone()
        } else {
            return Err(self.fail_here("expected import path"));
        };
        self.expect(";")?;
        Ok(strip_quotes(&path))
    }

    fn recover_top_level(&mut self) {
        while !self.at_eof() {
            if self.at("{") {
                self.skip_balanced_braces();
                return;
            }
            if self.at(";") {
                self.advance();
                return;
            }
            if self.at("contract")
                || self.at("interface")
                || self.at("library")
                || self.at("abstract")
                || self.at("pragma")
                || self.at("import")
            {
                return;
            }
            self.advance();
        }
    }

    fn skip_to_semicolon(&mut self) {
        while !self.at_eof() && !self.at(";") {
            if self.at("{") {
                self.skip_balanced_braces();
                continue;
            }
            self.advance();
        }
        self.eat(";");
    }

    fn skip_balanced_braces(&mut self) {
        while !self.at_eof() && !self.at("{") {
            self.advance();
        }
        let mut depth = 0usize;
        while !self.at_eof() {
            if self.at("{") {
                depth += 1;
            } else if self.at("}") {
                depth -= 1;
                if depth == 0 {
                    self.advance();
                    return;
                }
            }
            self.advance();
        }
    }

    // ---- contracts -------------------------------------------------------

    fn parse_contract(&mut self) -> PResult<ContractDef> {
        let abstract_kw = self.eat("abstract");
        let kw = self.advance();
        let kind = match kw.text.as_str() {
            "contract" if abstract_kw => ContractKind::AbstractContract,
            "contract" => ContractKind::Contract,
            "interface" => ContractKind::Interface,
            "library" => ContractKind::Library,
            _ => return Err(self.fail_here("expected contract, interface, or library")),
        };
        let name_tok = self.ident().map_err(|_| Fail {
            message: "contract is missing a name".to_string(),
            line: kw.line,
            column: kw.column,
        })?;
        let mut bases = Vec::new();
        if self.eat("is") {
            loop {
                let base = self.parse_dotted_name()?;
                if self.at("(") {
                    self.skip_balanced_parens()?;
                }
                bases.push(base);
                if !self.eat(",") {
                    break;
                }
            }
        }
        self.expect("{")?;
        let mut def = ContractDef {
            name: name_tok.text.clone(),
            kind,
            bases,
            state_vars: Vec::new(),
            functions: Vec::new(),
            line: kw.line,
            column: kw.column,
        };
        while !self.at("}") && !self.at_eof() {
            let start = self.pos;
            if let Err(f) = self.parse_member(&mut def) {
                self.diag_from(f);
                self.recover_member();
            }
            if self.pos == start && !self.at("}") && !self.at_eof() {
                self.advance();
            }
        }
        self.expect("}")?;
        Ok(def)
    }

    fn parse_member(&mut self, def: &mut ContractDef) -> PResult<()> {
        if self.at("function") && !self.function_type_ahead() {
            let f = self.parse_function(FunctionKind::Function)?;
            def.functions.push(f);
        } else if self.at("constructor") {
            let f = self.parse_function(FunctionKind::Constructor)?;
            def.functions.push(f);
        } else if self.at("modifier") {
            let f = self.parse_function(FunctionKind::Modifier)?;
            def.functions.push(f);
        } else if self.at("receive") {
            let f = self.parse_function(FunctionKind::Receive)?;
            def.functions.push(f);
        } else if self.at("fallback") {
            let f = self.parse_function(FunctionKind::Fallback)?;
            def.functions.push(f);
        } else if self.at("event") || self.at("error") || self.at("using") || self.at("type") {
            self.skip_to_semicolon();
        } else if self.at("struct") || self.at("enum") {
            self.advance();
            let name = self.ident()?;
            self.value_types.push(name.text.clone());
            self.skip_balanced_braces();
        } else if self.at(";") {
            self.advance();
        } else {
            let var = self.parse_state_var()?;
            if def.kind == ContractKind::Interface {
                self.diags.push(Diagnostic {
                    message: format!(
                        "state variable `{}` is not allowed in an interface",
                        var.name
                    ),
                    line: var.line,
                    column: var.column,
                });
            } else {
                def.state_vars.push(var);
            }
        }
        Ok(())
    }

    /// Distinguishes a function-typed state variable
    /// (`function(uint) external returns (bool) internal handler;`) from a
    /// function definition: after the parameter list of a definition comes a
    /// name or `(`, never another `(`-free type position... in practice a
    /// definition has an identifier (or keyword like `receive`) right after
    /// `function`, a function type has `(`.
    fn function_type_ahead(&self) -> bool {
        self.peek_is(1, "(")
    }

    fn recover_member(&mut self) {
        let mut depth = 0usize;
        while !self.at_eof() {
            if self.at("{") {
                depth += 1;
            } else if self.at("}") {
                if depth == 0 {
                    return; // contract's closing brace
                }
                depth -= 1;
                if depth == 0 {
                    self.advance();
                    return;
                }
            } else if self.at(";") && depth == 0 {
                self.advance();
                return;
            }
            self.advance();
        }
    }

    fn parse_state_var(&mut self) -> PResult<StateVarDecl> {
        let type_text = self.parse_type_name()?;
        let mut visibility = Visibility::Default;
        let mut mutability = Mutability::None;
        loop {
            if self.at("public") {
                visibility = Visibility::Public;
            } else if self.at("internal") {
                visibility = Visibility::Internal;
            } else if self.at("private") {
                visibility = Visibility::Private;
            } else if self.at("constant") {
                mutability = Mutability::Constant;
            } else if self.at("immutable") {
                mutability = Mutability::Immutable;
            } else if self.at("transient") {
                // Transient storage: mutability-wise ordinary.
            } else if self.at("override") {
                self.advance();
                if self.at("(") {
                    self.skip_balanced_parens()?;
                }
                continue;
            } else if self.at("virtual") {
            } else {
                break;
            }
            self.advance();
        }
        let name_tok = self.ident()?;
        let initializer = if self.eat("=") {
            Some(self.parse_expr()?)
        } else {
            None
        };
        self.expect(";")?;
        let mut decl = StateVarDecl {
            name: name_tok.text.clone(),
            declared_type: type_text,
            visibility,
            mutability,
            initializer,
            line: name_tok.line,
            column: name_tok.column,
        };
        if decl.mutability == Mutability::Constant && decl.initializer.is_none() {
            self.diags.push(Diagnostic {
                message: format!("constant `{}` is missing an initializer", decl.name),
                line: decl.line,
                column: decl.column,
            });
            decl.mutability = Mutability::None;
        }
        Ok(decl)
    }

    // ---- types -----------------------------------------------------------

    fn parse_type_name(&mut self) -> PResult<String> {
        self.enter()?;
        let r = self.parse_type_name_inner();
        self.leave();
        r
    }

    fn parse_type_name_inner(&mut self) -> PResult<String> {
        let mut text;
        if self.at("mapping") {
            self.advance();
            self.expect("(")?;
            let key = self.parse_type_name()?;
            if self.cur().kind == TokenKind::Identifier {
                self.advance(); // optional key name (0.8.18+)
            }
            self.expect("=>")?;
            let value = self.parse_type_name()?;
            if self.cur().kind == TokenKind::Identifier {
                self.advance();
            }
            self.expect(")")?;
            text = format!("mapping({} => {})", key, value);
        } else if self.at("function") {
            self.advance();
            let params = self.parse_param_list()?;
            let mut attrs = Vec::new();
            loop {
                if self.at("internal")
                    || self.at("external")
                    || self.at("pure")
                    || self.at("view")
                    || self.at("payable")
                {
                    attrs.push(self.advance().text.clone());
                } else if self.at("returns") {
                    self.advance();
                    let rets = self.parse_param_list()?;
                    attrs.push(format!(
                        "returns ({})",
                        rets.iter()
                            .map(|p| p.type_text.clone())
                            .collect::<Vec<_>>()
                            .join(", ")
                    ));
                } else {
                    break;
                }
            }
            text = format!(
                "function({})",
                params
                    .iter()
                    .map(|p| p.type_text.clone())
                    .collect::<Vec<_>>()
                    .join(", ")
            );
            if !attrs.is_empty() {
                text.push(' ');
                text.push_str(&attrs.join(" "));
            }
        } else if self.cur().kind == TokenKind::Keyword && is_type_keyword(&self.cur().text) {
            text = self.advance().text.clone();
            if text == "address" && self.at("payable") {
                self.advance();
                text.push_str(" payable");
            }
        } else if self.cur().kind == TokenKind::Identifier {
            text = self.parse_dotted_name()?;
        } else {
            return Err(self.fail_here("expected type name"));
        }
        while self.at("[") {
            self.advance();
            if self.eat("]") {
                text.push_str("[]");
            } else {
                let len = self.parse_expr()?;
                self.expect("]")?;
                text.push('[');
                text.push_str(&printer::expr_to_string(&len));
                text.push(']');
            }
        }
        Ok(text)
    }

    fn parse_dotted_name(&mut self) -> PResult<String> {
        let mut name = self.ident()?.text.clone();
        while self.at(".") && self.toks.get(self.pos + 1).is_some_and(|t| t.kind == TokenKind::Identifier)
        {
            self.advance();
            name.push('.');
            name.push_str(&self.advance().text);
        }
        Ok(name)
    }

    // ---- functions -------------------------------------------------------

    fn parse_function(&mut self, kind: FunctionKind) -> PResult<FunctionDef> {
        let kw = self.advance(); // function | constructor | modifier | receive | fallback
        let mut name = String::new();
        if kind == FunctionKind::Function || kind == FunctionKind::Modifier {
            // receive/fallback declared via `function receive()` style is rare
            // and ignored here; regular names only.
            if self.cur().kind == TokenKind::Identifier {
                name = self.advance().text.clone();
            } else if kind == FunctionKind::Function {
                return Err(self.fail_here("expected function name"));
            }
        }
        let params = if self.at("(") {
            self.parse_param_list()?
        } else if kind == FunctionKind::Modifier {
            Vec::new()
        } else {
            return Err(self.fail_here("expected parameter list"));
        };
        let mut visibility = Visibility::Default;
        let mut modifiers = Vec::new();
        loop {
            if self.at("public") {
                visibility = Visibility::Public;
                self.advance();
            } else if self.at("internal") {
                visibility = Visibility::Internal;
                self.advance();
            } else if self.at("private") {
                visibility = Visibility::Private;
                self.advance();
            } else if self.at("external") {
                visibility = Visibility::External;
                self.advance();
            } else if self.at("pure") || self.at("view") || self.at("payable") || self.at("constant")
                || self.at("virtual")
            {
                self.advance();
            } else if self.at("override") {
                self.advance();
                if self.at("(") {
                    self.skip_balanced_parens()?;
                }
            } else if self.at("returns") {
                self.advance();
                self.parse_param_list()?;
            } else if self.cur().kind == TokenKind::Identifier {
                // Modifier invocation, optionally with arguments.
                let tok = self.cur();
                let (line, column) = (tok.line, tok.column);
                let base = self.parse_dotted_name()?;
                let callee = Expr {
                    kind: ExprKind::Ident(base),
                    line,
                    column,
                };
                if self.at("(") {
                    let args = self.parse_call_args()?;
                    modifiers.push(Expr {
                        kind: ExprKind::Call {
                            callee: Box::new(callee),
                            args,
                        },
                        line,
                        column,
                    });
                } else {
                    modifiers.push(callee);
                }
            } else {
                break;
            }
        }
        let body = if self.eat(";") {
            None
        } else if self.at("{") {
            Some(self.parse_block()?)
        } else {
            return Err(self.fail_here("expected function body or `;`"));
        };
        Ok(FunctionDef {
            name,
            kind,
            params,
            visibility,
            modifiers,
            body,
            line: kw.line,
            column: kw.column,
        })
    }

    fn parse_param_list(&mut self) -> PResult<Vec<Param>> {
        self.expect("(")?;
        let mut params = Vec::new();
        if self.eat(")") {
            return Ok(params);
        }
        loop {
            params.push(self.parse_param()?);
            if !self.eat(",") {
                break;
            }
        }
        self.expect(")")?;
        Ok(params)
    }

    fn parse_param(&mut self) -> PResult<Param> {
        let type_text = self.parse_type_name()?;
        let mut location = DataLocation::None;
        loop {
            if self.at("memory") {
                location = DataLocation::Memory;
            } else if self.at("storage") {
                location = DataLocation::Storage;
            } else if self.at("calldata") {
                location = DataLocation::Calldata;
            } else if self.at("indexed") {
                // event parameter attribute; irrelevant here
            } else {
                break;
            }
            self.advance();
        }
        let name = if self.cur().kind == TokenKind::Identifier {
            self.advance().text.clone()
        } else {
            String::new()
        };
        Ok(Param {
            name,
            type_text,
            location,
        })
    }

    fn skip_balanced_parens(&mut self) -> PResult<()> {
        self.expect("(")?;
        let mut depth = 1usize;
        while depth > 0 {
            if self.at_eof() {
                return Err(self.fail_here("unbalanced parentheses"));
            }
            if self.at("(") {
                depth += 1;
            } else if self.at(")") {
                depth -= 1;
            }
            self.advance();
        }
        Ok(())
    }

    // ---- statements ------------------------------------------------------

    fn parse_block(&mut self) -> PResult<Block> {
        self.enter()?;
        let r = self.parse_block_inner();
        self.leave();
        r
    }

    fn parse_block_inner(&mut self) -> PResult<Block> {
        self.expect("{")?;
        let mut statements = Vec::new();
        while !self.at("}") && !self.at_eof() {
            let start = self.pos;
            let start_tok = self.cur();
            match self.parse_statement() {
                Ok(s) => statements.push(s),
                Err(f) => {
                    self.diag_from(f);
                    let raw = self.recover_statement(start_tok.offset);
                    statements.push(Statement {
                        kind: StatementKind::Degraded { raw },
                        line: start_tok.line,
                        column: start_tok.column,
                    });
                }
            }
            if self.pos == start && !self.at("}") && !self.at_eof() {
                self.advance();
            }
        }
        self.expect("}")?;
        Ok(Block { statements })
    }

    /// Skip to the next `;` at depth zero or to the enclosing `}` (left for
    /// the block parser to consume). Returns the raw text skipped, starting
    /// at `start_offset`.
    fn recover_statement(&mut self, start_offset: usize) -> String {
        let mut brace_depth = 0usize;
        let mut paren_depth = 0usize;
        let mut end = start_offset;
        while !self.at_eof() {
            let t = self.cur();
            match t.text.as_str() {
                "{" => brace_depth += 1,
                "}" => {
                    if brace_depth == 0 {
                        break;
                    }
                    brace_depth -= 1;
                    if brace_depth == 0 {
                        end = t.end_offset();
                        self.advance();
                        break;
                    }
                }
                "(" | "[" => paren_depth += 1,
                ")" | "]" => paren_depth = paren_depth.saturating_sub(1),
                ";" if brace_depth == 0 && paren_depth == 0 => {
                    end = t.end_offset();
                    self.advance();
                    break;
                }
                _ => {}
            }
            end = t.end_offset();
            self.advance();
        }
        self.src[start_offset..end.max(start_offset)].to_string()
    }

    fn parse_statement(&mut self) -> PResult<Statement> {
        self.enter()?;
        let r = self.parse_statement_inner();
        self.leave();
        r
    }

    fn parse_statement_inner(&mut self) -> PResult<Statement> {
        let tok = self.cur();
        let (line, column) = (tok.line, tok.column);
        let stmt = |kind| Statement { kind, line, column };

        if self.at("{") {
            return Ok(stmt(StatementKind::Block(self.parse_block()?)));
        }
        if self.at("if") {
            self.advance();
            self.expect("(")?;
            let cond = self.parse_expr()?;
            self.expect(")")?;
            let then_branch = Box::new(self.parse_statement()?);
            let else_branch = if self.eat("else") {
                Some(Box::new(self.parse_statement()?))
            } else {
                None
            };
            return Ok(stmt(StatementKind::If {
                cond,
                then_branch,
                else_branch,
            }));
        }
        if self.at("while") {
            self.advance();
            self.expect("(")?;
            let cond = self.parse_expr()?;
            self.expect(")")?;
            let body = Box::new(self.parse_statement()?);
            return Ok(stmt(StatementKind::While { cond, body }));
        }
        if self.at("do") {
            self.advance();
            let body = Box::new(self.parse_statement()?);
            self.expect("while")?;
            self.expect("(")?;
            let cond = self.parse_expr()?;
            self.expect(")")?;
            self.expect(";")?;
            return Ok(stmt(StatementKind::DoWhile { body, cond }));
        }
        if self.at("for") {
            self.advance();
            self.expect("(")?;
            let init = if self.at(";") {
                None
            } else {
                Some(Box::new(self.parse_simple_statement()?))
            };
            self.expect(";")?;
            let cond = if self.at(";") {
                None
            } else {
                Some(self.parse_expr()?)
            };
            self.expect(";")?;
            let update = if self.at(")") {
                None
            } else {
                Some(self.parse_expr()?)
            };
            self.expect(")")?;
            let body = Box::new(self.parse_statement()?);
            return Ok(stmt(StatementKind::For {
                init,
                cond,
                update,
                body,
            }));
        }
        if self.at("return") {
            self.advance();
            let value = if self.at(";") {
                None
            } else {
                Some(self.parse_expr()?)
            };
            self.expect(";")?;
            return Ok(stmt(StatementKind::Return(value)));
        }
        if self.at("emit") {
            self.advance();
            let event = self.parse_expr()?;
            self.expect(";")?;
            return Ok(stmt(StatementKind::Emit(event)));
        }
        if self.at("revert") {
            self.advance();
            let value = if self.at(";") {
                None
            } else {
                Some(self.parse_expr()?)
            };
            self.expect(";")?;
            return Ok(stmt(StatementKind::Revert(value)));
        }
        if self.at("break") {
            self.advance();
            self.expect(";")?;
            return Ok(stmt(StatementKind::Break));
        }
        if self.at("continue") {
            self.advance();
            self.expect(";")?;
            return Ok(stmt(StatementKind::Continue));
        }
        if self.at("unchecked") {
            self.advance();
            return Ok(stmt(StatementKind::Unchecked(self.parse_block()?)));
        }
        if self.at("try") {
            self.advance();
            let expr = self.parse_expr()?;
            let returns = if self.eat("returns") {
                self.parse_param_list()?
            } else {
                Vec::new()
            };
            let body = self.parse_block()?;
            let mut catches = Vec::new();
            while self.eat("catch") {
                let ident = if self.cur().kind == TokenKind::Identifier && !self.at("(") {
                    Some(self.advance().text.clone())
                } else {
                    None
                };
                let params = if self.at("(") {
                    self.parse_param_list()?
                } else {
                    Vec::new()
                };
                let body = self.parse_block()?;
                catches.push(CatchClause {
                    ident,
                    params,
                    body,
                });
            }
            return Ok(stmt(StatementKind::Try {
                expr,
                returns,
                body,
                catches,
            }));
        }
        if self.at("assembly") {
            self.advance();
            if self.cur().kind == TokenKind::Str {
                self.advance(); // dialect, e.g. "memory-safe"
            }
            if self.at("(") {
                self.skip_balanced_parens()?; // assembly flags
            }
            let open = self.expect("{")?;
            let mut depth = 1usize;
            let mut end = open.end_offset();
            while depth > 0 {
                if self.at_eof() {
                    return Err(self.fail_here("unterminated assembly block"));
                }
                let t = self.advance();
                if t.text == "{" {
                    depth += 1;
                } else if t.text == "}" {
                    depth -= 1;
                    if depth == 0 {
                        end = t.offset;
                        break;
                    }
                }
            }
            let raw = self.src[open.end_offset()..end].to_string();
            return Ok(stmt(StatementKind::Assembly { raw }));
        }
        if tok.text == "_" && self.peek_is(1, ";") {
            self.advance();
            self.advance();
            return Ok(stmt(StatementKind::Placeholder));
        }

        let simple = self.parse_simple_statement()?;
        self.expect(";")?;
        Ok(simple)
    }

    /// A declaration or expression statement, without the trailing `;`
    /// (shared with `for` initializers).
    fn parse_simple_statement(&mut self) -> PResult<Statement> {
        let tok = self.cur();
        let (line, column) = (tok.line, tok.column);
        if let Some(decl) = self.try_parse_var_decl()? {
            return Ok(Statement {
                kind: StatementKind::VarDecl(decl),
                line,
                column,
            });
        }
        let expr = self.parse_expr()?;
        Ok(Statement {
            kind: StatementKind::Expr(expr),
            line,
            column,
        })
    }

    /// Backtracking attempt at a local variable declaration.
    fn try_parse_var_decl(&mut self) -> PResult<Option<VarDeclStatement>> {
        let save = self.pos;
        // Tuple declaration: `(uint a, , uint c) = expr`
        if self.at("(") {
            if let Some(decl) = self.try_parse_tuple_decl()? {
                return Ok(Some(decl));
            }
            self.pos = save;
            return Ok(None);
        }
        let looks_like_type = self.at("mapping")
            || (self.at("function") && self.peek_is(1, "("))
            || (self.cur().kind == TokenKind::Keyword && is_type_keyword(&self.cur().text))
            || self.cur().kind == TokenKind::Identifier;
        if !looks_like_type {
            return Ok(None);
        }
        let type_text = match self.parse_type_name_quiet() {
            Some(t) => t,
            None => {
                self.pos = save;
                return Ok(None);
            }
        };
        let mut location = DataLocation::None;
        if self.at("memory") {
            location = DataLocation::Memory;
            self.advance();
        } else if self.at("storage") {
            location = DataLocation::Storage;
            self.advance();
        } else if self.at("calldata") {
            location = DataLocation::Calldata;
            self.advance();
        }
        if self.cur().kind != TokenKind::Identifier {
            self.pos = save;
            return Ok(None);
        }
        let name = self.advance().text.clone();
        // Must be followed by `=`, `;`, or the `)` of a for-init.
        let initializer = if self.at("=") {
            self.advance();
            Some(self.parse_expr()?)
        } else if self.at(";") || self.at(")") {
            None
        } else {
            self.pos = save;
            return Ok(None);
        };
        Ok(Some(VarDeclStatement {
            declarations: vec![Some(LocalDecl {
                name,
                type_text,
                location,
            })],
            initializer,
            tuple: false,
        }))
    }

    fn try_parse_tuple_decl(&mut self) -> PResult<Option<VarDeclStatement>> {
        let save = self.pos;
        self.advance(); // '('
        let mut slots: Vec<Option<LocalDecl>> = Vec::new();
        let mut any_decl = false;
        loop {
            if self.at(",") {
                slots.push(None);
                self.advance();
                continue;
            }
            if self.at(")") {
                break;
            }
            let type_text = match self.parse_type_name_quiet() {
                Some(t) => t,
                None => {
                    self.pos = save;
                    return Ok(None);
                }
            };
            let mut location = DataLocation::None;
            if self.at("memory") {
                location = DataLocation::Memory;
                self.advance();
            } else if self.at("storage") {
                location = DataLocation::Storage;
                self.advance();
            } else if self.at("calldata") {
                location = DataLocation::Calldata;
                self.advance();
            }
            if self.cur().kind != TokenKind::Identifier {
                self.pos = save;
                return Ok(None);
            }
            let name = self.advance().text.clone();
            slots.push(Some(LocalDecl {
                name,
                type_text,
                location,
            }));
            any_decl = true;
            if self.at(",") {
                self.advance();
                continue;
            }
            break;
        }
        if !self.eat(")") || !any_decl {
            self.pos = save;
            return Ok(None);
        }
        if !self.at("=") {
            self.pos = save;
            return Ok(None);
        }
        self.advance();
        let initializer = Some(self.parse_expr()?);
        Ok(Some(VarDeclStatement {
            declarations: slots,
            initializer,
            tuple: true,
        }))
    }

    fn parse_type_name_quiet(&mut self) -> Option<String> {
        let save = self.pos;
        let save_depth = self.depth;
        match self.parse_type_name() {
            Ok(t) => Some(t),
            Err(_) => {
                self.pos = save;
                self.depth = save_depth;
                None
            }
        }
    }

    // ---- expressions -----------------------------------------------------

    fn parse_expr(&mut self) -> PResult<Expr> {
        self.enter()?;
        let r = self.parse_assignment();
        self.leave();
        r
    }

    fn parse_expr_list(&mut self) -> PResult<Vec<Expr>> {
        let mut list = vec![self.parse_expr()?];
        while self.eat(",") {
            list.push(self.parse_expr()?);
        }
        Ok(list)
    }

    fn parse_assignment(&mut self) -> PResult<Expr> {
        let lhs = self.parse_ternary()?;
        const ASSIGN_OPS: &[&str] = &[
            "=", "+=", "-=", "*=", "/=", "%=", "|=", "&=", "^=", "<<=", ">>=",
        ];
        let cur = self.cur();
        if cur.kind == TokenKind::Punct && ASSIGN_OPS.contains(&cur.text.as_str()) {
            let op = self.advance().text.clone();
            let value = self.parse_expr()?;
            let (line, column) = (lhs.line, lhs.column);
            return Ok(Expr {
                kind: ExprKind::Assign {
                    op,
                    target: Box::new(lhs),
                    value: Box::new(value),
                },
                line,
                column,
            });
        }
        Ok(lhs)
    }

    fn parse_ternary(&mut self) -> PResult<Expr> {
        let cond = self.parse_binary(0)?;
        if self.at("?") {
            self.advance();
            let yes = self.parse_ternary()?;
            self.expect(":")?;
            let no = self.parse_ternary()?;
            let (line, column) = (cond.line, cond.column);
            return Ok(Expr {
                kind: ExprKind::Ternary {
                    cond: Box::new(cond),
                    yes: Box::new(yes),
                    no: Box::new(no),
                },
                line,
                column,
            });
        }
        Ok(cond)
    }

    fn parse_binary(&mut self, min_prec: u8) -> PResult<Expr> {
        self.enter()?;
        let r = self.parse_binary_inner(min_prec);
        self.leave();
        r
    }

    fn parse_binary_inner(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.parse_unary()?;
        loop {
            let cur = self.cur();
            if cur.kind != TokenKind::Punct {
                break;
            }
            let (prec, right_assoc) = match binary_precedence(&cur.text) {
                Some(p) => p,
                None => break,
            };
            if prec < min_prec {
                break;
            }
            let op = self.advance().text.clone();
            let next_min = if right_assoc { prec } else { prec + 1 };
            let rhs = self.parse_binary(next_min)?;
            let (line, column) = (lhs.line, lhs.column);
            lhs = Expr {
                kind: ExprKind::Binary {
                    op,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                },
                line,
                column,
            };
        }
        Ok(lhs)
    }

    fn parse_unary(&mut self) -> PResult<Expr> {
        let tok = self.cur();
        let (line, column) = (tok.line, tok.column);
        let is_prefix = matches!(tok.text.as_str(), "!" | "~" | "-" | "+" | "++" | "--")
            && tok.kind == TokenKind::Punct
            || tok.is("delete");
        if is_prefix {
            let op = self.advance().text.clone();
            self.enter()?;
            let expr = self.parse_unary();
            self.leave();
            return Ok(Expr {
                kind: ExprKind::Unary {
                    op,
                    expr: Box::new(expr?),
                    prefix: true,
                },
                line,
                column,
            });
        }
        self.parse_postfix()
    }

    fn parse_postfix(&mut self) -> PResult<Expr> {
        let mut expr = self.parse_primary()?;
        loop {
            let (line, column) = (expr.line, expr.column);
            if self.at("(") {
                let args = self.parse_call_args()?;
                expr = Expr {
                    kind: ExprKind::Call {
                        callee: Box::new(expr),
                        args,
                    },
                    line,
                    column,
                };
            } else if self.at("[") {
                self.advance();
                let index = if self.at("]") {
                    None
                } else {
                    Some(Box::new(self.parse_expr()?))
                };
                self.expect("]")?;
                expr = Expr {
                    kind: ExprKind::Index {
                        object: Box::new(expr),
                        index,
                    },
                    line,
                    column,
                };
            } else if self.at(".") {
                self.advance();
                let t = self.cur();
                if t.kind != TokenKind::Identifier && t.kind != TokenKind::Keyword {
                    return Err(self.fail_here("expected member name"));
                }
                let member = self.advance().text.clone();
                expr = Expr {
                    kind: ExprKind::Member {
                        object: Box::new(expr),
                        member,
                    },
                    line,
                    column,
                };
            } else if self.at("{") && self.call_options_ahead() {
                self.advance();
                let mut options = Vec::new();
                while !self.at("}") && !self.at_eof() {
                    let name = self.advance().text.clone();
                    self.expect(":")?;
                    let value = self.parse_expr()?;
                    options.push((name, value));
                    if !self.eat(",") {
                        break;
                    }
                }
                self.expect("}")?;
                expr = Expr {
                    kind: ExprKind::CallOptions {
                        callee: Box::new(expr),
                        options,
                    },
                    line,
                    column,
                };
            } else if self.at("++") || self.at("--") {
                let op = self.advance().text.clone();
                expr = Expr {
                    kind: ExprKind::Unary {
                        op,
                        expr: Box::new(expr),
                        prefix: false,
                    },
                    line,
                    column,
                };
            } else {
                break;
            }
        }
        Ok(expr)
    }

    /// `{` starts call options only when followed by `ident :`.
    fn call_options_ahead(&self) -> bool {
        self.toks
            .get(self.pos + 1)
            .is_some_and(|t| t.kind == TokenKind::Identifier)
            && self.peek_is(2, ":")
    }

    fn parse_call_args(&mut self) -> PResult<Vec<Expr>> {
        self.expect("(")?;
        if self.eat(")") {
            return Ok(Vec::new());
        }
        // Named arguments: f({a: 1, b: 2})
        if self.at("{") {
            self.advance();
            let mut args = Vec::new();
            while !self.at("}") && !self.at_eof() {
                self.ident()?;
                self.expect(":")?;
                args.push(self.parse_expr()?);
                if !self.eat(",") {
                    break;
                }
            }
            self.expect("}")?;
            self.expect(")")?;
            return Ok(args);
        }
        let args = self.parse_expr_list()?;
        self.expect(")")?;
        Ok(args)
    }

    fn parse_primary(&mut self) -> PResult<Expr> {
        let tok = self.cur();
        let (line, column) = (tok.line, tok.column);
        let expr = |kind| Expr { kind, line, column };
        match tok.kind {
            TokenKind::Number => {
                let mut text = self.advance().text.clone();
                const UNITS: &[&str] = &[
                    "wei", "gwei", "ether", "seconds", "minutes", "hours", "days", "weeks",
                ];
                if UNITS.contains(&self.cur().text.as_str()) && self.cur().kind == TokenKind::Keyword
                {
                    text.push(' ');
                    text.push_str(&self.advance().text);
                }
                Ok(expr(ExprKind::Number(text)))
            }
            TokenKind::Str => {
                let mut text = self.advance().text.clone();
                // Adjacent string literals concatenate.
                while self.cur().kind == TokenKind::Str {
                    text.push(' ');
                    text.push_str(&self.advance().text);
                }
                Ok(expr(ExprKind::StringLit(text)))
            }
            TokenKind::Identifier => {
                let name = self.advance().text.clone();
                Ok(expr(ExprKind::Ident(name)))
            }
            TokenKind::Keyword => {
                let text = tok.text.clone();
                if text == "true" || text == "false" {
                    self.advance();
                    return Ok(expr(ExprKind::Bool(text == "true")));
                }
                if text == "new" {
                    self.advance();
                    let t = self.parse_type_name()?;
                    return Ok(expr(ExprKind::New(t)));
                }
                if text == "payable" || text == "type" || lexer::is_elementary_type(&text) {
                    self.advance();
                    return Ok(expr(ExprKind::ElementaryType(text)));
                }
                Err(self.fail_here("expected expression"))
            }
            TokenKind::Punct => {
                if self.at("(") {
                    self.advance();
                    let mut items: Vec<Option<Expr>> = Vec::new();
                    let mut expecting_item = true;
                    loop {
                        if self.at(")") {
                            if expecting_item && !items.is_empty() {
                                items.push(None);
                            }
                            break;
                        }
                        if self.at(",") {
                            self.advance();
                            if expecting_item {
                                items.push(None);
                            }
                            expecting_item = true;
                            continue;
                        }
                        items.push(Some(self.parse_expr()?));
                        expecting_item = false;
                    }
                    self.expect(")")?;
                    if items.len() == 1 {
                        if let Some(Some(e)) = items.into_iter().next() {
                            return Ok(e);
                        }
                        return Err(self.fail_here("expected expression"));
                    }
                    return Ok(expr(ExprKind::Tuple(items)));
                }
                if self.at("[") {
                    self.advance();
                    let mut items = Vec::new();
                    while !self.at("]") && !self.at_eof() {
                        items.push(self.parse_expr()?);
                        if !self.eat(",") {
                            break;
                        }
                    }
                    self.expect("]")?;
                    return Ok(expr(ExprKind::ArrayLit(items)));
                }
                Err(self.fail_here("expected expression"))
            }
            TokenKind::Eof | TokenKind::Comment | TokenKind::Error => {
                Err(self.fail_here("expected expression"))
            }
        }
    }
}

fn is_type_keyword(text: &str) -> bool {
    lexer::is_elementary_type(text) || text == "mapping"
}

fn binary_precedence(op: &str) -> Option<(u8, bool)> {
    let p = match op {
        "||" => (1, false),
        "&&" => (2, false),
        "==" | "!=" => (3, false),
        "<" | ">" | "<=" | ">=" => (4, false),
        "|" => (5, false),
        "^" => (6, false),
        "&" => (7, false),
        "<<" | ">>" => (8, false),
        "+" | "-" => (9, false),
        "*" | "/" | "%" => (10, false),
        "**" => (11, true),
        _ => return None,
    };
    Some(p)
}

fn strip_quotes(s: &str) -> String {
    let s = s
        .strip_prefix('"')
        .or_else(|| s.strip_prefix('\''))
        .unwrap_or(s);
    let s = s
        .strip_suffix('"')
        .or_else(|| s.strip_suffix('\''))
        .unwrap_or(s);
    s.to_string()
}
