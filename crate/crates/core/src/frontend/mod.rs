//! Lexing and parsing of Solidity source into an AST, with recoverable
//! diagnostics.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod printer;

pub use ast::*;
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::{parse_source, parse_source_unit};
pub use printer::{pretty_print, PrintError};

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_contract() {
        let unit = parse_source("contract C { uint x; }", "c.sol");
        assert!(unit.diagnostics.is_empty(), "{:?}", unit.diagnostics);
        assert_eq!(unit.contracts.len(), 1);
        let c = &unit.contracts[0];
        assert_eq!(c.name, "C");
        assert_eq!(c.state_vars.len(), 1);
        let v = &c.state_vars[0];
        assert_eq!(v.name, "x");
        assert_eq!(v.mutability, Mutability::None);
        assert!(!v.has_initializer());
    }

    #[test]
    fn contract_missing_name() {
        let unit = parse_source("contract { uint x; }", "c.sol");
        assert_eq!(unit.contracts.len(), 0);
        assert!(!unit.diagnostics.is_empty());
    }

    #[test]
    fn pragma_and_import() {
        let unit = parse_source(
            "pragma solidity ^0.8.17;\nimport \"./Other.sol\";\nimport {A, B} from \"./ab.sol\";\ncontract C {}",
            "c.sol",
        );
        assert!(unit.diagnostics.is_empty(), "{:?}", unit.diagnostics);
        assert_eq!(unit.pragmas, vec!["solidity ^0.8.17"]);
        assert_eq!(unit.imports, vec!["./Other.sol", "./ab.sol"]);
    }

    #[test]
    fn inheritance_order_preserved() {
        let unit = parse_source("contract D is B, C {}", "d.sol");
        assert_eq!(unit.contracts[0].bases, vec!["B", "C"]);
    }

    #[test]
    fn state_var_modifiers() {
        let src = r#"
            contract C {
                uint256 public constant MAX = 1000;
                address internal immutable owner;
                mapping(address => uint256) private balances;
                uint256[] public prices;
            }
        "#;
        let unit = parse_source(src, "c.sol");
        assert!(unit.diagnostics.is_empty(), "{:?}", unit.diagnostics);
        let vars = &unit.contracts[0].state_vars;
        assert_eq!(vars[0].mutability, Mutability::Constant);
        assert!(vars[0].has_initializer());
        assert_eq!(vars[1].mutability, Mutability::Immutable);
        assert_eq!(vars[2].declared_type, "mapping(address => uint256)");
        assert_eq!(vars[3].declared_type, "uint256[]");
    }

    #[test]
    fn constant_without_initializer_degrades() {
        let unit = parse_source("contract C { uint constant x; }", "c.sol");
        assert!(!unit.diagnostics.is_empty());
        // invariant: constant implies initializer, so the modifier is dropped
        assert_eq!(unit.contracts[0].state_vars[0].mutability, Mutability::None);
    }

    #[test]
    fn interface_rejects_state_vars() {
        let unit = parse_source("interface I { uint x; function f() external; }", "i.sol");
        assert!(unit.contracts[0].state_vars.is_empty());
        assert!(!unit.diagnostics.is_empty());
        assert_eq!(unit.contracts[0].functions.len(), 1);
        assert!(unit.contracts[0].functions[0].body.is_none());
    }

    #[test]
    fn functions_and_kinds() {
        let src = r#"
            contract C {
                constructor(uint a) { x = a; }
                function f(uint b) public returns (uint) { return b; }
                modifier only(address who) { _; }
                receive() external payable {}
                fallback() external {}
                uint x;
            }
        "#;
        let unit = parse_source(src, "c.sol");
        assert!(unit.diagnostics.is_empty(), "{:?}", unit.diagnostics);
        let funcs = &unit.contracts[0].functions;
        assert_eq!(funcs.len(), 5);
        assert_eq!(funcs[0].kind, FunctionKind::Constructor);
        assert_eq!(funcs[0].name, "");
        assert_eq!(funcs[1].kind, FunctionKind::Function);
        assert_eq!(funcs[2].kind, FunctionKind::Modifier);
        assert_eq!(funcs[3].kind, FunctionKind::Receive);
        assert_eq!(funcs[4].kind, FunctionKind::Fallback);
    }

    #[test]
    fn statement_failure_degrades_not_aborts() {
        let src = "contract C { uint x; function f() public { x = = 2; x = 3; } }";
        let unit = parse_source(src, "c.sol");
        assert_eq!(unit.contracts.len(), 1);
        assert!(!unit.diagnostics.is_empty());
        let body = unit.contracts[0].functions[0].body.as_ref().unwrap();
        assert!(body
            .statements
            .iter()
            .any(|s| matches!(s.kind, StatementKind::Degraded { .. })));
        // the statement after the bad one still parses
        assert!(body
            .statements
            .iter()
            .any(|s| matches!(s.kind, StatementKind::Expr(_))));
    }

    #[test]
    fn assembly_raw_capture() {
        let src = "contract C { function f() public { assembly { sstore(0, 1) { } } } }";
        let unit = parse_source(src, "c.sol");
        assert!(unit.diagnostics.is_empty(), "{:?}", unit.diagnostics);
        let body = unit.contracts[0].functions[0].body.as_ref().unwrap();
        match &body.statements[0].kind {
            StatementKind::Assembly { raw } => {
                assert!(raw.contains("sstore"));
                assert!(raw.contains("{ }"));
            }
            other => panic!("expected assembly, got {:?}", other),
        }
    }

    #[test]
    fn tuple_declaration_and_assignment() {
        let src = r#"
            contract C {
                uint a; uint b;
                function f() public {
                    (uint x, , uint z) = (1, 2, 3);
                    (a, b) = (b, a);
                }
            }
        "#;
        let unit = parse_source(src, "c.sol");
        assert!(unit.diagnostics.is_empty(), "{:?}", unit.diagnostics);
        let body = unit.contracts[0].functions[0].body.as_ref().unwrap();
        match &body.statements[0].kind {
            StatementKind::VarDecl(v) => {
                assert!(v.tuple);
                assert_eq!(v.declarations.len(), 3);
                assert!(v.declarations[1].is_none());
            }
            other => panic!("expected tuple decl, got {:?}", other),
        }
        assert!(matches!(body.statements[1].kind, StatementKind::Expr(_)));
    }

    #[test]
    fn comments_collected_for_suppression() {
        let src = "contract C {\n  uint x; // state-sentinel: allow R1\n}";
        let unit = parse_source(src, "c.sol");
        assert_eq!(unit.comments.len(), 1);
        assert_eq!(unit.comments[0].line, 2);
        assert!(unit.comments[0].text.contains("state-sentinel: allow R1"));
    }

    #[test]
    fn roundtrip_minimal() {
        let unit = parse_source("contract C{uint x;}", "c.sol");
        let printed = pretty_print(&unit).unwrap();
        let reparsed = parse_source(&printed, "c.sol");
        assert!(
            unit.structurally_equal(&reparsed),
            "printed:\n{printed}\nreparsed: {reparsed:#?}"
        );
    }

    #[test]
    fn roundtrip_inheritance_base_order() {
        let unit = parse_source("contract D is B, C {}", "d.sol");
        let printed = pretty_print(&unit).unwrap();
        let reparsed = parse_source(&printed, "d.sol");
        assert_eq!(reparsed.contracts[0].bases, vec!["B", "C"]);
        assert!(unit.structurally_equal(&reparsed));
    }

    #[test]
    fn print_refuses_degraded_units() {
        let unit = parse_source("contract { }", "c.sol");
        assert!(pretty_print(&unit).is_err());
    }

    #[test]
    fn roundtrip_rich_contract() {
        let src = r#"
            pragma solidity ^0.8.0;
            contract Vault is Base {
                uint256 public totalShares;
                mapping(address => uint256) internal shares;
                uint256 constant FEE_BPS = 30;

                constructor(uint256 seed) {
                    totalShares = seed;
                }

                function deposit(uint256 amount) public payable returns (uint256 minted) {
                    uint256 fee = amount * FEE_BPS / 10000;
                    if (totalShares == 0) {
                        minted = amount - fee;
                    } else {
                        minted = (amount - fee) * totalShares / address(this).balance;
                    }
                    shares[msg.sender] += minted;
                    totalShares += minted;
                    for (uint i = 0; i < 3; i++) {
                        emit Tick(i);
                    }
                    while (fee > 0) {
                        fee--;
                    }
                    do {
                        fee++;
                    } while (fee < 1);
                    unchecked {
                        totalShares += 0;
                    }
                    try this.poke() returns (bool ok) {
                        require(ok, "poke");
                    } catch {
                        delete shares[msg.sender];
                    }
                    return minted;
                }

                function poke() external returns (bool) {
                    (bool ok, ) = msg.sender.call{value: 0}("");
                    return ok ? true : !false;
                }
            }
        "#;
        let unit = parse_source(src, "vault.sol");
        assert!(unit.diagnostics.is_empty(), "{:?}", unit.diagnostics);
        let printed = pretty_print(&unit).unwrap();
        let reparsed = parse_source(&printed, "vault.sol");
        assert!(reparsed.diagnostics.is_empty(), "{:?}\n{printed}", reparsed.diagnostics);
        assert!(unit.structurally_equal(&reparsed), "printed:\n{printed}");
    }

    #[test]
    fn parse_is_total_on_junk() {
        for junk in [
            "",
            "}{",
            "contract",
            "contract C is {}",
            "\u{0}\u{1}\u{2}",
            "pragma",
            "((((((((((((((((",
            "contract C { function f() public { ((((((((( } }",
        ] {
            let _ = parse_source(junk, "junk.sol");
        }
    }
}
