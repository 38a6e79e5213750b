//! Recursive-descent checker for the Graphviz DOT language grammar:
//!
//! ```text
//! graph     : [strict] (graph | digraph) [ID] '{' stmt_list '}'
//! stmt_list : [ stmt [';'] stmt_list ]
//! stmt      : node_stmt | edge_stmt | attr_stmt | ID '=' ID | subgraph
//! attr_stmt : (graph | node | edge) attr_list
//! attr_list : '[' [a_list] ']' [attr_list]
//! a_list    : ID '=' ID [(';' | ',')] [a_list]
//! edge_stmt : (node_id | subgraph) edgeRHS [attr_list]
//! edgeRHS   : edgeop (node_id | subgraph) [edgeRHS]
//! node_stmt : node_id [attr_list]
//! node_id   : ID [port]
//! port      : ':' ID [':' compass_pt] | ':' compass_pt
//! subgraph  : [subgraph [ID]] '{' stmt_list '}'
//! ```
//!
//! IDs are alphanumeric identifiers not starting with a digit, numerals,
//! double-quoted strings with `\"` escapes, or balanced `<...>` HTML strings.
//! Keywords are case-insensitive. Comments (`//`, `/* */`, `#` lines) are
//! skipped. Undirected graphs must use `--`, directed graphs `->`.

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Id(String),
    Keyword(&'static str),
    Punct(char),
    EdgeOp(&'static str),
}

fn lex(src: &str) -> Result<Vec<Tok>, String> {
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    let mut line_start = true;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line_start = true;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '#' && line_start {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        line_start = false;
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            i += 2;
            while i + 1 < chars.len() && !(chars[i] == '*' && chars[i + 1] == '/') {
                i += 1;
            }
            if i + 1 >= chars.len() {
                return Err("unterminated comment".into());
            }
            i += 2;
            continue;
        }
        if c == '-' && matches!(chars.get(i + 1), Some('-') | Some('>')) {
            out.push(Tok::EdgeOp(if chars[i + 1] == '-' { "--" } else { "->" }));
            i += 2;
            continue;
        }
        if "{}[];,=:".contains(c) {
            out.push(Tok::Punct(c));
            i += 1;
            continue;
        }
        if c == '"' {
            let mut s = String::new();
            i += 1;
            loop {
                match chars.get(i) {
                    None => return Err("unterminated string".into()),
                    Some('"') => break,
                    Some('\\') if chars.get(i + 1) == Some(&'"') => {
                        s.push('"');
                        i += 2;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        i += 1;
                    }
                }
            }
            i += 1;
            out.push(Tok::Id(s));
            continue;
        }
        if c == '<' {
            let mut depth = 0;
            let start = i;
            loop {
                match chars.get(i) {
                    None => return Err("unterminated HTML string".into()),
                    Some('<') => depth += 1,
                    Some('>') => {
                        depth -= 1;
                        if depth == 0 {
                            break;
                        }
                    }
                    _ => {}
                }
                i += 1;
            }
            i += 1;
            out.push(Tok::Id(chars[start..i].iter().collect()));
            continue;
        }
        if c == '-' || c == '.' || c.is_ascii_digit() {
            let start = i;
            if c == '-' {
                i += 1;
            }
            let mut digits = 0;
            let mut dots = 0;
            while let Some(&ch) = chars.get(i) {
                if ch.is_ascii_digit() {
                    digits += 1;
                } else if ch == '.' {
                    dots += 1;
                } else {
                    break;
                }
                i += 1;
            }
            if digits == 0 || dots > 1 {
                return Err(format!("bad numeral at offset {start}"));
            }
            if chars
                .get(i)
                .is_some_and(|ch| ch.is_alphabetic() || *ch == '_')
            {
                return Err(format!("numeral runs into identifier at offset {start}"));
            }
            out.push(Tok::Id(chars[start..i].iter().collect()));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while chars
                .get(i)
                .is_some_and(|ch| ch.is_alphanumeric() || *ch == '_')
            {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            let kw = match word.to_ascii_lowercase().as_str() {
                "strict" => Some("strict"),
                "graph" => Some("graph"),
                "digraph" => Some("digraph"),
                "node" => Some("node"),
                "edge" => Some("edge"),
                "subgraph" => Some("subgraph"),
                _ => None,
            };
            out.push(kw.map(Tok::Keyword).unwrap_or(Tok::Id(word)));
            continue;
        }
        return Err(format!("unexpected character {c:?}"));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
    edgeop: &'static str,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1)
    }

    fn eat_punct(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Punct(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, c: char) -> Result<(), String> {
        if self.eat_punct(c) {
            Ok(())
        } else {
            Err(format!(
                "expected `{c}` at token {} ({:?})",
                self.pos,
                self.peek()
            ))
        }
    }

    fn id(&mut self) -> Result<String, String> {
        match self.peek() {
            Some(Tok::Id(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            other => Err(format!(
                "expected ID at token {}, found {other:?}",
                self.pos
            )),
        }
    }

    fn graph(&mut self) -> Result<(), String> {
        if self.peek() == Some(&Tok::Keyword("strict")) {
            self.pos += 1;
        }
        self.edgeop = match self.peek() {
            Some(Tok::Keyword("graph")) => "--",
            Some(Tok::Keyword("digraph")) => "->",
            other => return Err(format!("expected graph or digraph, found {other:?}")),
        };
        self.pos += 1;
        if matches!(self.peek(), Some(Tok::Id(_))) {
            self.pos += 1;
        }
        self.expect_punct('{')?;
        self.stmt_list()?;
        self.expect_punct('}')?;
        if self.pos != self.toks.len() {
            return Err(format!("trailing tokens after graph at {}", self.pos));
        }
        Ok(())
    }

    fn stmt_list(&mut self) -> Result<(), String> {
        while !matches!(self.peek(), Some(Tok::Punct('}')) | None) {
            self.stmt()?;
            self.eat_punct(';');
        }
        Ok(())
    }

    fn stmt(&mut self) -> Result<(), String> {
        match self.peek() {
            Some(Tok::Keyword("graph" | "node" | "edge")) => {
                self.pos += 1;
                if self.peek() != Some(&Tok::Punct('[')) {
                    return Err("attribute statement needs an attribute list".into());
                }
                self.attr_list()
            }
            Some(Tok::Id(_)) if self.peek2() == Some(&Tok::Punct('=')) => {
                self.pos += 2;
                self.id().map(|_| ())
            }
            Some(Tok::Keyword("subgraph")) | Some(Tok::Punct('{')) => {
                self.subgraph()?;
                self.edge_rhs_opt()
            }
            Some(Tok::Id(_)) => {
                self.node_id()?;
                self.edge_rhs_opt()
            }
            other => Err(format!("unexpected token {other:?} at {}", self.pos)),
        }
    }

    fn edge_rhs_opt(&mut self) -> Result<(), String> {
        let mut any = false;
        while let Some(Tok::EdgeOp(op)) = self.peek() {
            if *op != self.edgeop {
                return Err(format!(
                    "edge operator {op} in a graph expecting {}",
                    self.edgeop
                ));
            }
            self.pos += 1;
            any = true;
            match self.peek() {
                Some(Tok::Keyword("subgraph")) | Some(Tok::Punct('{')) => self.subgraph()?,
                _ => self.node_id()?,
            }
        }
        let _ = any;
        if self.peek() == Some(&Tok::Punct('[')) {
            self.attr_list()?;
        }
        Ok(())
    }

    fn node_id(&mut self) -> Result<(), String> {
        self.id()?;
        if self.eat_punct(':') {
            self.id()?;
            if self.eat_punct(':') {
                self.id()?;
            }
        }
        Ok(())
    }

    fn subgraph(&mut self) -> Result<(), String> {
        if self.peek() == Some(&Tok::Keyword("subgraph")) {
            self.pos += 1;
            if matches!(self.peek(), Some(Tok::Id(_))) {
                self.pos += 1;
            }
        }
        self.expect_punct('{')?;
        self.stmt_list()?;
        self.expect_punct('}')
    }

    fn attr_list(&mut self) -> Result<(), String> {
        while self.eat_punct('[') {
            while !self.eat_punct(']') {
                self.id()?;
                self.expect_punct('=')?;
                self.id()?;
                if !self.eat_punct(',') {
                    self.eat_punct(';');
                }
            }
        }
        Ok(())
    }
}

/// `Ok(())` when `src` is a syntactically valid DOT graph.
pub fn check_dot(src: &str) -> Result<(), String> {
    let toks = lex(src)?;
    Parser {
        toks,
        pos: 0,
        edgeop: "--",
    }
    .graph()
}

#[allow(dead_code)]
pub fn self_test() {
    assert!(check_dot("graph { a -- b; }").is_ok());
    assert!(check_dot("digraph G { a -> b -> c [w=1]; node [shape=box] }").is_ok());
    assert!(check_dot("strict graph { \"x y\" [label=\"q \\\"z\\\"\", pos=\"1,2!\"]; }").is_ok());
    assert!(check_dot("graph { a -> b }").is_err());
    assert!(check_dot("graph { a -- }").is_err());
    assert!(check_dot("graph { a [label=] }").is_err());
    assert!(check_dot("graph { \"unterminated }").is_err());
    assert!(check_dot("graph { a -- b ").is_err());
    assert!(check_dot("graph { 1a }").is_err());
}
