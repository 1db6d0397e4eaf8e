//! Parser for the solenoid description language.
//!
//! ```text
//! file      := line*
//! line      := blank? (directive blank?)? comment? newline
//! comment   := "#" any*
//! directive := "vertices:" id+
//!            | "edges:" id+
//!            | "edge" id ":" id "->" id
//!            | "rule" id "=" letter+
//! letter    := id | id "^-1" | id "^1"
//! id        := [A-Za-z_] [A-Za-z0-9_']*
//! ```

use std::collections::HashMap;

use super::{EdgeDecl, Graph, Letter, RuleError, WrappingRule};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unknown edge `{edge}` at line {line}, column {column}")]
    UnknownEdge { line: usize, column: usize, edge: String },
    #[error("unknown vertex `{vertex}` at line {line}, column {column}")]
    UnknownVertex { line: usize, column: usize, vertex: String },
    #[error("duplicate declaration of `{id}` at line {line}")]
    Duplicate { line: usize, id: String },
    #[error("edge `{edge}` has no rule")]
    MissingRule { edge: String },
    #[error("continuity violation in rule for `{edge}` (line {line}) at word position {position}")]
    Continuity { line: usize, edge: String, position: usize },
    #[error("adjacent cancellation in rule for `{edge}` (line {line}) at word position {position}")]
    AdjacentCancellation { line: usize, edge: String, position: usize },
    #[error("inconsistent vertex image: {0}")]
    VertexImage(String),
    #[error("{0}")]
    Rule(String),
}

impl ParseError {
    /// Short machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            ParseError::Syntax { .. } => "syntax",
            ParseError::UnknownEdge { .. } => "unknown_edge",
            ParseError::UnknownVertex { .. } => "unknown_vertex",
            ParseError::Duplicate { .. } => "duplicate",
            ParseError::MissingRule { .. } => "missing_rule",
            ParseError::Continuity { .. } => "continuity",
            ParseError::AdjacentCancellation { .. } => "adjacent_cancellation",
            ParseError::VertexImage(_) => "vertex_image",
            ParseError::Rule(_) => "rule",
        }
    }
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token { text: &line[s..i], column: s + 1 });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token { text: &line[s..], column: s + 1 });
    }
    out
}

fn is_id(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, column, message: message.into() }
}

fn expect_id(tok: &Token<'_>, line: usize) -> Result<String, ParseError> {
    if is_id(tok.text) {
        Ok(tok.text.to_string())
    } else {
        Err(syntax(line, tok.column, format!("expected identifier, found `{}`", tok.text)))
    }
}

struct RawRule {
    line: usize,
    letters: Vec<(String, i8, usize)>,
}

/// Parses DSL source into a validated wrapping rule.
pub fn parse_solenoid_file(text: &str) -> Result<WrappingRule, ParseError> {
    let mut vertices: Option<(usize, Vec<String>)> = None;
    let mut edge_list: Option<Vec<String>> = None;
    let mut edge_decls: Vec<(usize, String, String, usize, String, usize)> = Vec::new();
    let mut rules: Vec<(String, RawRule)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("");
        // Split "edge a: u -> v" so that the colon is separated from the id.
        let toks = tokens(content);
        if toks.is_empty() {
            continue;
        }
        let head = toks[0].text;
        match head {
            "vertices:" | "edges:" => {
                if toks.len() < 2 {
                    return Err(syntax(line, toks[0].column + head.len(), "expected at least one identifier"));
                }
                let ids = toks[1..].iter().map(|t| expect_id(t, line)).collect::<Result<Vec<_>, _>>()?;
                for (k, id) in ids.iter().enumerate() {
                    if ids[..k].contains(id) {
                        return Err(ParseError::Duplicate { line, id: id.clone() });
                    }
                }
                if head == "vertices:" {
                    if vertices.is_some() {
                        return Err(ParseError::Duplicate { line, id: "vertices:".into() });
                    }
                    vertices = Some((line, ids));
                } else {
                    if edge_list.is_some() {
                        return Err(ParseError::Duplicate { line, id: "edges:".into() });
                    }
                    edge_list = Some(ids);
                }
            }
            "edge" => {
                // edge <id>: <src> -> <dst>   (the colon may also stand alone)
                let mut rest: Vec<Token<'_>> = Vec::new();
                for t in &toks[1..] {
                    if let Some(stripped) = t.text.strip_suffix(':') {
                        if !stripped.is_empty() {
                            rest.push(Token { text: stripped, column: t.column });
                        }
                        rest.push(Token { text: ":", column: t.column + stripped.len() });
                    } else {
                        rest.push(Token { text: t.text, column: t.column });
                    }
                }
                if rest.len() != 5 || rest[1].text != ":" || rest[3].text != "->" {
                    let col = rest.first().map_or(toks[0].column + 4, |t| t.column);
                    return Err(syntax(line, col, "expected `edge <id>: <src> -> <dst>`"));
                }
                let id = expect_id(&rest[0], line)?;
                let src = expect_id(&rest[2], line)?;
                let dst = expect_id(&rest[4], line)?;
                edge_decls.push((line, id, src, rest[2].column, dst, rest[4].column));
            }
            "rule" => {
                if toks.len() < 4 || toks[2].text != "=" {
                    let col = toks.get(2).map_or(toks[0].column + 4, |t| t.column);
                    return Err(syntax(line, col, "expected `rule <edge> = <letters>`"));
                }
                let id = expect_id(&toks[1], line)?;
                let mut letters = Vec::new();
                for t in &toks[3..] {
                    let (name, sign) = if let Some(base) = t.text.strip_suffix("^-1") {
                        (base, -1)
                    } else if let Some(base) = t.text.strip_suffix("^1") {
                        (base, 1)
                    } else {
                        (t.text, 1)
                    };
                    if !is_id(name) {
                        return Err(syntax(line, t.column, format!("malformed letter `{}`", t.text)));
                    }
                    letters.push((name.to_string(), sign, t.column));
                }
                rules.push((id, RawRule { line, letters }));
            }
            other => {
                return Err(syntax(line, toks[0].column, format!("unexpected `{other}`")));
            }
        }
    }

    // Vertices.
    let (vertex_line, vertex_names) = vertices.unwrap_or((0, vec!["v".to_string()]));
    let vertex_index: HashMap<&str, usize> = vertex_names.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();

    // Edges: explicit `edge` lines, else the `edges:` list, else rule heads in order.
    let mut edges: Vec<EdgeDecl> = Vec::new();
    if !edge_decls.is_empty() {
        for (line, id, src, sc, dst, dc) in &edge_decls {
            if edges.iter().any(|e| &e.id == id) {
                return Err(ParseError::Duplicate { line: *line, id: id.clone() });
            }
            let s = *vertex_index.get(src.as_str()).ok_or(ParseError::UnknownVertex { line: *line, column: *sc, vertex: src.clone() })?;
            let d = *vertex_index.get(dst.as_str()).ok_or(ParseError::UnknownVertex { line: *line, column: *dc, vertex: dst.clone() })?;
            edges.push(EdgeDecl { id: id.clone(), src: s, dst: d });
        }
        if let Some(list) = &edge_list {
            for id in list {
                if !edges.iter().any(|e| &e.id == id) {
                    return Err(ParseError::Rule(format!("edge `{id}` listed but not declared with an `edge` line")));
                }
            }
        }
    } else {
        if vertex_names.len() != 1 {
            return Err(ParseError::Rule(format!(
                "{} vertices declared (line {vertex_line}) but no `edge` lines give edge endpoints",
                vertex_names.len()
            )));
        }
        let ids: Vec<String> = match &edge_list {
            Some(list) => list.clone(),
            None => {
                let mut ids: Vec<String> = Vec::new();
                for (id, _) in &rules {
                    if !ids.contains(id) {
                        ids.push(id.clone());
                    }
                }
                ids
            }
        };
        edges = ids.into_iter().map(|id| EdgeDecl { id, src: 0, dst: 0 }).collect();
    }
    let edge_index: HashMap<String, usize> = edges.iter().enumerate().map(|(i, e)| (e.id.clone(), i)).collect();

    let mut words: Vec<Option<(usize, Vec<Letter>)>> = vec![None; edges.len()];
    for (id, raw) in &rules {
        let Some(&e) = edge_index.get(id) else {
            return Err(ParseError::UnknownEdge { line: raw.line, column: 6, edge: id.clone() });
        };
        if words[e].is_some() {
            return Err(ParseError::Duplicate { line: raw.line, id: id.clone() });
        }
        let mut w = Vec::with_capacity(raw.letters.len());
        for (name, sign, column) in &raw.letters {
            let Some(&x) = edge_index.get(name) else {
                return Err(ParseError::UnknownEdge { line: raw.line, column: *column, edge: name.clone() });
            };
            w.push(Letter { edge: x, sign: *sign });
        }
        words[e] = Some((raw.line, w));
    }
    let mut lines = Vec::with_capacity(edges.len());
    let mut final_words = Vec::with_capacity(edges.len());
    for (e, slot) in words.into_iter().enumerate() {
        let Some((line, w)) = slot else {
            return Err(ParseError::MissingRule { edge: edges[e].id.clone() });
        };
        lines.push(line);
        final_words.push(w);
    }
    let graph = Graph { vertices: vertex_names, edges };
    WrappingRule::new(graph, final_words).map_err(|err| match err {
        RuleError::Continuity { edge, position } => {
            let line = lines[edge_index[&edge]];
            ParseError::Continuity { line, edge, position }
        }
        RuleError::AdjacentCancellation { edge, position } => {
            let line = lines[edge_index[&edge]];
            ParseError::AdjacentCancellation { line, edge, position }
        }
        RuleError::VertexImage { vertex, first, second } => {
            ParseError::VertexImage(format!("vertex {vertex} would map to both {first} and {second}"))
        }
        other => ParseError::Rule(other.to_string()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_w2_with_edge_list() {
        let r = parse_solenoid_file("edges: a b\nrule a = b a\nrule b = b a").unwrap();
        assert_eq!(r.edge_count(), 2);
        assert_eq!(r.word_string(r.word(0)), "b a");
        assert!(r.is_single_vertex());
    }

    #[test]
    fn parses_inverse_letters_and_comments() {
        let r = parse_solenoid_file("# W1\nedges: a b\nrule a = a^-1 b^-1  # first\nrule b = a^-1 b^-1\n").unwrap();
        assert_eq!(r.word(0)[0], Letter::neg(0));
        assert_eq!(r.word(1)[1], Letter::neg(1));
    }

    #[test]
    fn immediate_fold_is_located() {
        let err = parse_solenoid_file("edges: a\nrule a = a a^-1 a").unwrap_err();
        assert_eq!(err, ParseError::AdjacentCancellation { line: 2, edge: "a".into(), position: 1 });
    }

    #[test]
    fn unknown_edge_is_located() {
        let err = parse_solenoid_file("edges: a\nrule a = a c").unwrap_err();
        assert_eq!(err, ParseError::UnknownEdge { line: 2, column: 12, edge: "c".into() });
    }

    #[test]
    fn syntax_error_is_located() {
        let err = parse_solenoid_file("edges: a\nrule a a a").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 2, column: 8, .. }), "{err:?}");
        let err = parse_solenoid_file("edges: a\nrule a = a^-2").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 2, column: 10, .. }), "{err:?}");
    }

    #[test]
    fn continuity_on_two_vertices() {
        let text = "vertices: u w\nedge a: u -> w\nedge b: w -> u\nrule a = b\nrule b = a a";
        let err = parse_solenoid_file(text).unwrap_err();
        assert_eq!(err, ParseError::Continuity { line: 5, edge: "b".into(), position: 1 });
    }

    #[test]
    fn disjoint_circles_parse_with_swapped_vertices() {
        let text = "vertices: u w\nedge a: u -> u\nedge b: w -> w\nrule a = b b\nrule b = a a";
        let r = parse_solenoid_file(text).unwrap();
        assert_eq!(r.vertex_image(), &[1, 0]);
    }

    #[test]
    fn dsl_round_trip() {
        let text = "vertices: u w\nedge a: u -> u\nedge b: w -> w\nrule a = b b\nrule b = a a";
        let r = parse_solenoid_file(text).unwrap();
        assert_eq!(parse_solenoid_file(&r.to_dsl()).unwrap(), r);
    }

    #[test]
    fn missing_rule() {
        let err = parse_solenoid_file("edges: a b\nrule a = a b").unwrap_err();
        assert_eq!(err, ParseError::MissingRule { edge: "b".into() });
    }
}
