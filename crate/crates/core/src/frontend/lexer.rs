//! Hand-written Solidity lexer.
//!
//! Tokens carry their exact source slice and byte offset, so concatenating
//! token texts plus the skipped whitespace gaps reproduces the input
//! byte-for-byte. Unterminated strings and comments become `Error` tokens;
//! lexing resumes at the next line and never fails.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Keyword,
    Identifier,
    Number,
    Str,
    Punct,
    Comment,
    /// Unterminated string or comment; the text prefix tells which.
    Error,
    Eof,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    /// 1-based.
    pub line: u32,
    /// 1-based, counted in characters.
    pub column: u32,
    /// Byte offset of the first character in the source.
    pub offset: usize,
}

impl Token {
    pub fn is(&self, text: &str) -> bool {
        self.text == text && matches!(self.kind, TokenKind::Keyword | TokenKind::Punct)
    }

    pub fn end_offset(&self) -> usize {
        self.offset + self.text.len()
    }
}

const KEYWORDS: &[&str] = &[
    "abstract", "address", "anonymous", "as", "assembly", "bool", "break", "bytes", "calldata",
    "catch", "constant", "constructor", "continue", "contract", "days", "delete", "do", "else",
    "emit", "enum", "error", "ether", "event", "external", "fallback", "false", "for", "function",
    "gwei", "hours", "if", "immutable", "import", "indexed", "int", "interface", "internal", "is",
    "library", "mapping", "memory", "minutes", "modifier", "new", "override", "payable", "pragma",
    "private", "public", "pure", "receive", "return", "returns", "revert", "seconds", "storage",
    "string", "struct", "transient", "true", "try", "type", "uint", "unchecked", "using", "view",
    "virtual", "weeks", "wei", "while",
];

/// `uint8..uint256`, `int*`, `bytes1..bytes32`, `fixed`/`ufixed` variants.
pub fn is_sized_elementary(word: &str) -> bool {
    for prefix in ["uint", "int", "bytes", "fixed", "ufixed"] {
        if let Some(rest) = word.strip_prefix(prefix) {
            if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit() || b == b'x') {
                return true;
            }
        }
    }
    false
}

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.binary_search(&word).is_ok() || is_sized_elementary(word)
}

/// Elementary (value) type names, used to tell casts and using-for library
/// calls apart from contract interactions.
pub fn is_elementary_type(word: &str) -> bool {
    matches!(word, "address" | "bool" | "string" | "bytes" | "uint" | "int" | "fixed" | "ufixed")
        || is_sized_elementary(word)
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    line: u32,
    column: u32,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src,
            bytes: src.as_bytes(),
            pos: 0,
            line: 1,
            column: 1,
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn peek2(&self) -> Option<u8> {
        self.bytes.get(self.pos + 1).copied()
    }

    /// Advance over one char, maintaining line/column.
    fn bump(&mut self) {
        if let Some(c) = self.src[self.pos..].chars().next() {
            if c == '\n' {
                self.line += 1;
                self.column = 1;
            } else {
                self.column += 1;
            }
            self.pos += c.len_utf8();
        }
    }

    fn skip_whitespace(&mut self) {
        while let Some(b) = self.peek() {
            if b.is_ascii_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn token(&self, kind: TokenKind, start: usize, line: u32, column: u32) -> Token {
        Token {
            kind,
            text: self.src[start..self.pos].to_string(),
            line,
            column,
            offset: start,
        }
    }

    fn next_token(&mut self) -> Token {
        self.skip_whitespace();
        let (start, line, column) = (self.pos, self.line, self.column);
        let b = match self.peek() {
            None => {
                return Token {
                    kind: TokenKind::Eof,
                    text: String::new(),
                    line,
                    column,
                    offset: start,
                }
            }
            Some(b) => b,
        };

        if b == b'/' && self.peek2() == Some(b'/') {
            while let Some(c) = self.peek() {
                if c == b'\n' {
                    break;
                }
                self.bump();
            }
            return self.token(TokenKind::Comment, start, line, column);
        }
        if b == b'/' && self.peek2() == Some(b'*') {
            self.bump();
            self.bump();
            loop {
                match self.peek() {
                    None => return self.token(TokenKind::Error, start, line, column),
                    Some(b'*') if self.peek2() == Some(b'/') => {
                        self.bump();
                        self.bump();
                        return self.token(TokenKind::Comment, start, line, column);
                    }
                    _ => self.bump(),
                }
            }
        }
        if b == b'"' || b == b'\'' {
            let quote = b;
            self.bump();
            loop {
                match self.peek() {
                    None | Some(b'\n') => {
                        // Unterminated: consume up to end of line, resume there.
                        return self.token(TokenKind::Error, start, line, column);
                    }
                    Some(b'\\') => {
                        self.bump();
                        if self.peek().is_some() && self.peek() != Some(b'\n') {
                            self.bump();
                        }
                    }
                    Some(c) if c == quote => {
                        self.bump();
                        return self.token(TokenKind::Str, start, line, column);
                    }
                    _ => self.bump(),
                }
            }
        }
        if b.is_ascii_digit() {
            if b == b'0' && matches!(self.peek2(), Some(b'x') | Some(b'X')) {
                self.bump();
                self.bump();
                while let Some(c) = self.peek() {
                    if c.is_ascii_hexdigit() || c == b'_' {
                        self.bump();
                    } else {
                        break;
                    }
                }
            } else {
                while let Some(c) = self.peek() {
                    if c.is_ascii_digit() || c == b'_' {
                        self.bump();
                    } else {
                        break;
                    }
                }
                if self.peek() == Some(b'.') && self.peek2().is_some_and(|c| c.is_ascii_digit()) {
                    self.bump();
                    while let Some(c) = self.peek() {
                        if c.is_ascii_digit() || c == b'_' {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                }
                if matches!(self.peek(), Some(b'e') | Some(b'E')) {
                    let mut ahead = self.pos + 1;
                    if matches!(self.bytes.get(ahead), Some(b'+') | Some(b'-')) {
                        ahead += 1;
                    }
                    if self.bytes.get(ahead).is_some_and(|c| c.is_ascii_digit()) {
                        while self.pos < ahead {
                            self.bump();
                        }
                        while let Some(c) = self.peek() {
                            if c.is_ascii_digit() || c == b'_' {
                                self.bump();
                            } else {
                                break;
                            }
                        }
                    }
                }
            }
            return self.token(TokenKind::Number, start, line, column);
        }
        if b.is_ascii_alphabetic() || b == b'_' || b == b'$' {
            while let Some(c) = self.peek() {
                if c.is_ascii_alphanumeric() || c == b'_' || c == b'$' {
                    self.bump();
                } else {
                    break;
                }
            }
            let word = &self.src[start..self.pos];
            // hex"..." / unicode"..." literals: treat the whole thing as a string.
            if (word == "hex" || word == "unicode") && matches!(self.peek(), Some(b'"') | Some(b'\''))
            {
                let quote = self.peek().unwrap();
                self.bump();
                loop {
                    match self.peek() {
                        None | Some(b'\n') => {
                            return self.token(TokenKind::Error, start, line, column)
                        }
                        Some(c) if c == quote => {
                            self.bump();
                            return self.token(TokenKind::Str, start, line, column);
                        }
                        _ => self.bump(),
                    }
                }
            }
            let kind = if is_keyword(word) {
                TokenKind::Keyword
            } else {
                TokenKind::Identifier
            };
            return self.token(kind, start, line, column);
        }

        // Punctuation: longest match first.
        const THREE: &[&str] = &[">>=", "<<="];
        const TWO: &[&str] = &[
            "**", "++", "--", "+=", "-=", "*=", "/=", "%=", "|=", "&=", "^=", "==", "!=", "<=",
            ">=", "&&", "||", "->", "=>", "<<", ">>", ":=",
        ];
        let rest = &self.src[self.pos..];
        for p in THREE {
            if rest.starts_with(p) {
                for _ in 0..3 {
                    self.bump();
                }
                return self.token(TokenKind::Punct, start, line, column);
            }
        }
        for p in TWO {
            if rest.starts_with(p) {
                for _ in 0..2 {
                    self.bump();
                }
                return self.token(TokenKind::Punct, start, line, column);
            }
        }
        self.bump();
        self.token(TokenKind::Punct, start, line, column)
    }
}

/// Full token sequence for `source`, terminated by an `Eof` token. Comments
/// are included; the parser skips them.
pub fn tokenize(source: &str) -> Vec<Token> {
    let mut lexer = Lexer::new(source);
    let mut tokens = Vec::new();
    loop {
        let tok = lexer.next_token();
        let done = tok.kind == TokenKind::Eof;
        tokens.push(tok);
        if done {
            break;
        }
    }
    tokens
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<(TokenKind, String)> {
        tokenize(src)
            .into_iter()
            .map(|t| (t.kind, t.text))
            .collect()
    }

    #[test]
    fn basic_declaration() {
        let toks = kinds("uint x;");
        assert_eq!(
            toks,
            vec![
                (TokenKind::Keyword, "uint".to_string()),
                (TokenKind::Identifier, "x".to_string()),
                (TokenKind::Punct, ";".to_string()),
                (TokenKind::Eof, String::new()),
            ]
        );
    }

    #[test]
    fn empty_input_yields_eof_only() {
        let toks = tokenize("");
        assert_eq!(toks.len(), 1);
        assert_eq!(toks[0].kind, TokenKind::Eof);
        assert_eq!((toks[0].line, toks[0].column), (1, 1));
    }

    #[test]
    fn unterminated_string_location() {
        // 14-char input; the opening quote sits at column 12.
        let toks = tokenize("string s = \"ab");
        let err: Vec<_> = toks.iter().filter(|t| t.kind == TokenKind::Error).collect();
        assert_eq!(err.len(), 1);
        assert_eq!((err[0].line, err[0].column), (1, 12));
        assert!(err[0].text.starts_with('"'));
    }

    #[test]
    fn lexing_continues_after_unterminated_string() {
        let toks = kinds("string s = \"ab\nuint y;");
        assert!(toks.iter().any(|(k, _)| *k == TokenKind::Error));
        assert!(toks.iter().any(|(_, t)| t == "y"));
    }

    #[test]
    fn unterminated_block_comment() {
        let toks = tokenize("uint x; /* never closed");
        assert_eq!(toks.iter().filter(|t| t.kind == TokenKind::Error).count(), 1);
    }

    #[test]
    fn reconstruction_is_byte_exact() {
        let src = "pragma solidity ^0.8.0;\ncontract C {\n  // note\n  uint256 public x = 1e18;\n  string s = \"a\\\"b\";\n}\n";
        let toks = tokenize(src);
        let mut rebuilt = String::new();
        let mut cursor = 0usize;
        for t in &toks {
            rebuilt.push_str(&src[cursor..t.offset]);
            rebuilt.push_str(&t.text);
            cursor = t.end_offset();
        }
        rebuilt.push_str(&src[cursor..]);
        assert_eq!(rebuilt, src);
        // Gaps contain only whitespace.
        let mut cursor = 0usize;
        for t in &toks {
            assert!(src[cursor..t.offset].chars().all(char::is_whitespace));
            cursor = t.end_offset();
        }
    }

    #[test]
    fn numbers_and_operators() {
        let toks = kinds("a += 0x1F_2 * 1_000e-3 ** 2.5;");
        let texts: Vec<&str> = toks.iter().map(|(_, t)| t.as_str()).collect();
        assert_eq!(
            texts,
            vec!["a", "+=", "0x1F_2", "*", "1_000e-3", "**", "2.5", ";", ""]
        );
    }

    #[test]
    fn sized_types_are_keywords() {
        for w in ["uint256", "bytes32", "int8", "uint", "bytes"] {
            assert!(is_keyword(w), "{w} should lex as a keyword");
        }
        assert!(!is_keyword("uint256z"));
        assert!(!is_keyword("myvar"));
    }

    #[test]
    fn locations_monotone() {
        let src = "contract C { function f() public { x = 1; } }";
        let toks = tokenize(src);
        let mut prev = (0u32, 0u32);
        for t in &toks {
            assert!((t.line, t.column) > prev || t.kind == TokenKind::Eof);
            prev = (t.line, t.column);
        }
    }
}
