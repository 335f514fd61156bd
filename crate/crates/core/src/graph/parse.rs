//! Text formats: DIMACS-style (`p mrc n m` / `a u v w [t]`), plain edge
//! lists, and a small subset of Graphviz dot.

use std::collections::HashMap;
use std::str::FromStr;

use super::{GraphBuilder, NodeId, WeightedDigraph};
use crate::{Error, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Format {
    Dimacs,
    EdgeList,
    Dot,
}

impl Format {
    /// Guess the format from the first meaningful line.
    pub fn sniff(text: &str) -> Format {
        for line in text.lines() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') || t.starts_with("//") {
                continue;
            }
            if t == "c" || t.starts_with("c ") || t.starts_with("p ") || t.starts_with("a ") {
                return Format::Dimacs;
            }
            if t.starts_with("digraph") || t.starts_with("strict") {
                return Format::Dot;
            }
            return Format::EdgeList;
        }
        Format::EdgeList
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dimacs" => Ok(Format::Dimacs),
            "edgelist" => Ok(Format::EdgeList),
            "dot" => Ok(Format::Dot),
            other => Err(Error::Domain(format!("unknown graph format `{other}`"))),
        }
    }
}

pub fn parse_graph(text: &str, format: Format) -> Result<WeightedDigraph> {
    match format {
        Format::Dimacs => parse_dimacs(text),
        Format::EdgeList => parse_edgelist(text),
        Format::Dot => parse_dot(text),
    }
}

/// Upper bound on declared node counts, so hostile headers cannot force
/// huge allocations.
pub const MAX_NODES: usize = 1 << 22;

fn int<T: FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| Error::parse(line, format!("invalid {what} `{tok}`")))
}

fn check_transit(t: i64, line: usize) -> Result<i64> {
    if t < 1 {
        Err(Error::Domain(format!(
            "line {line}: transit weight must be >= 1, got {t}"
        )))
    } else {
        Ok(t)
    }
}

fn parse_dimacs(text: &str) -> Result<WeightedDigraph> {
    let mut builder: Option<GraphBuilder> = None;
    let mut declared_edges = 0usize;
    let mut edge_lines = 0usize;
    let mut header_line = 0usize;
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let mut toks = raw.split_whitespace();
        let Some(tag) = toks.next() else { continue };
        match tag {
            "c" => continue,
            "p" => {
                if builder.is_some() {
                    return Err(Error::parse(lineno, "duplicate problem line"));
                }
                let kind = toks
                    .next()
                    .ok_or_else(|| Error::parse(lineno, "missing problem kind"))?;
                if kind != "mrc" && kind != "sp" {
                    return Err(Error::parse(
                        lineno,
                        format!("unsupported problem kind `{kind}`"),
                    ));
                }
                let n: u32 = int(
                    toks.next()
                        .ok_or_else(|| Error::parse(lineno, "missing node count"))?,
                    lineno,
                    "node count",
                )?;
                declared_edges = int(
                    toks.next()
                        .ok_or_else(|| Error::parse(lineno, "missing edge count"))?,
                    lineno,
                    "edge count",
                )?;
                if toks.next().is_some() {
                    return Err(Error::parse(lineno, "trailing tokens in problem line"));
                }
                if n as usize > MAX_NODES {
                    return Err(Error::Domain(format!("node count {n} exceeds {MAX_NODES}")));
                }
                builder = Some(GraphBuilder::with_nodes_one_based(n as usize));
                header_line = lineno;
            }
            "a" => {
                let b = builder
                    .as_mut()
                    .ok_or_else(|| Error::parse(lineno, "edge line before problem line"))?;
                let fields: Vec<&str> = toks.collect();
                if fields.len() != 3 && fields.len() != 4 {
                    return Err(Error::parse(
                        lineno,
                        "expected `a <src> <dst> <wt> [<transit>]`",
                    ));
                }
                let n = b.node_count();
                let endpoint = |tok: &str| -> Result<NodeId> {
                    let id: usize = int(tok, lineno, "node id")?;
                    if id == 0 || id > n {
                        return Err(Error::parse(
                            lineno,
                            format!("node id {id} outside 1..={n}"),
                        ));
                    }
                    Ok(NodeId::new(id - 1))
                };
                let u = endpoint(fields[0])?;
                let v = endpoint(fields[1])?;
                let w: i64 = int(fields[2], lineno, "weight")?;
                let t = match fields.get(3) {
                    Some(tok) => check_transit(int(tok, lineno, "transit weight")?, lineno)?,
                    None => 1,
                };
                b.add_edge(u, v, w, t)?;
                edge_lines += 1;
            }
            other => {
                return Err(Error::parse(lineno, format!("unknown line tag `{other}`")));
            }
        }
    }
    let b = builder.ok_or_else(|| Error::parse(1, "missing problem line `p mrc <n> <m>`"))?;
    if edge_lines != declared_edges {
        return Err(Error::parse(
            header_line,
            format!("header declares {declared_edges} edges but {edge_lines} edge lines found"),
        ));
    }
    Ok(b.build())
}

impl GraphBuilder {
    fn with_nodes_one_based(n: usize) -> Self {
        let mut b = GraphBuilder::new();
        for i in 1..=n {
            b.add_node(i.to_string());
        }
        b
    }
}

fn parse_edgelist(text: &str) -> Result<WeightedDigraph> {
    let mut rows = Vec::new();
    let mut max_id: Option<usize> = None;
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 && fields.len() != 4 {
            return Err(Error::parse(lineno, "expected `<src> <dst> <wt> [<transit>]`"));
        }
        let u: u32 = int(fields[0], lineno, "node id")?;
        let v: u32 = int(fields[1], lineno, "node id")?;
        let w: i64 = int(fields[2], lineno, "weight")?;
        let t = match fields.get(3) {
            Some(tok) => check_transit(int(tok, lineno, "transit weight")?, lineno)?,
            None => 1,
        };
        let hi = u.max(v) as usize;
        if hi == u32::MAX as usize {
            return Err(Error::parse(lineno, "node id too large"));
        }
        max_id = Some(max_id.map_or(hi, |m| m.max(hi)));
        rows.push((u as usize, v as usize, w, t));
    }
    let n = max_id.map_or(0, |m| m + 1);
    if n > MAX_NODES {
        return Err(Error::Domain(format!("edge list names {n} nodes")));
    }
    let mut b = GraphBuilder::with_nodes(n);
    for (u, v, w, t) in rows {
        b.add_edge(NodeId::new(u), NodeId::new(v), w, t)?;
    }
    Ok(b.build())
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Id(String),
    Arrow,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Semi,
    Comma,
    Eq,
}

fn lex_dot(text: &str) -> Result<Vec<(Tok, usize)>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut line = 1;
    while i < chars.len() {
        let c = chars[i];
        match c {
            '\n' => {
                line += 1;
                i += 1;
            }
            c if c.is_whitespace() => i += 1,
            '/' if chars.get(i + 1) == Some(&'/') => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '{' => {
                out.push((Tok::LBrace, line));
                i += 1;
            }
            '}' => {
                out.push((Tok::RBrace, line));
                i += 1;
            }
            '[' => {
                out.push((Tok::LBracket, line));
                i += 1;
            }
            ']' => {
                out.push((Tok::RBracket, line));
                i += 1;
            }
            ';' => {
                out.push((Tok::Semi, line));
                i += 1;
            }
            ',' => {
                out.push((Tok::Comma, line));
                i += 1;
            }
            '=' => {
                out.push((Tok::Eq, line));
                i += 1;
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                out.push((Tok::Arrow, line));
                i += 2;
            }
            '"' => {
                let start_line = line;
                let mut s = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        None => return Err(Error::parse(start_line, "unterminated string")),
                        Some('"') => {
                            i += 1;
                            break;
                        }
                        Some('\\') => {
                            match chars.get(i + 1) {
                                Some(&e) => s.push(e),
                                None => {
                                    return Err(Error::parse(start_line, "unterminated string"))
                                }
                            }
                            i += 2;
                        }
                        Some(&ch) => {
                            if ch == '\n' {
                                line += 1;
                            }
                            s.push(ch);
                            i += 1;
                        }
                    }
                }
                out.push((Tok::Id(s), start_line));
            }
            c if c.is_alphanumeric() || c == '_' || c == '-' || c == '.' => {
                let mut s = String::new();
                while i < chars.len() {
                    let ch = chars[i];
                    if ch == '-' && chars.get(i + 1) == Some(&'>') {
                        break;
                    }
                    if ch.is_alphanumeric() || ch == '_' || ch == '-' || ch == '.' {
                        s.push(ch);
                        i += 1;
                    } else {
                        break;
                    }
                }
                out.push((Tok::Id(s), line));
            }
            other => return Err(Error::parse(line, format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

struct DotParser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl DotParser {
    fn line(&self) -> usize {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map_or(1, |t| t.1)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.0.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        let line = self.line();
        match self.next() {
            Some(t) if t == want => Ok(()),
            Some(t) => Err(Error::parse(line, format!("expected {want:?}, found {t:?}"))),
            None => Err(Error::parse(line, format!("expected {want:?}, found end of input"))),
        }
    }

    fn ident(&mut self) -> Result<String> {
        let line = self.line();
        match self.next() {
            Some(Tok::Id(s)) => Ok(s),
            Some(t) => Err(Error::parse(line, format!("expected identifier, found {t:?}"))),
            None => Err(Error::parse(line, "expected identifier, found end of input")),
        }
    }

    fn attrs(&mut self) -> Result<Vec<(String, String, usize)>> {
        let mut out = Vec::new();
        if self.peek() != Some(&Tok::LBracket) {
            return Ok(out);
        }
        self.next();
        loop {
            match self.peek() {
                Some(Tok::RBracket) => {
                    self.next();
                    return Ok(out);
                }
                Some(Tok::Comma) | Some(Tok::Semi) => {
                    self.next();
                }
                _ => {
                    let line = self.line();
                    let key = self.ident()?;
                    self.expect(Tok::Eq)?;
                    let val = self.ident()?;
                    out.push((key, val, line));
                }
            }
        }
    }
}

fn parse_dot(text: &str) -> Result<WeightedDigraph> {
    let mut p = DotParser {
        toks: lex_dot(text)?,
        pos: 0,
    };
    let line = p.line();
    let head = p.ident()?;
    let head = if head == "strict" { p.ident()? } else { head };
    if head != "digraph" {
        return Err(Error::parse(line, format!("expected `digraph`, found `{head}`")));
    }
    if let Some(Tok::Id(_)) = p.peek() {
        p.next();
    }
    p.expect(Tok::LBrace)?;

    let mut builder = GraphBuilder::new();
    let mut ids: HashMap<String, NodeId> = HashMap::new();
    let mut node = |b: &mut GraphBuilder, name: String| -> NodeId {
        *ids.entry(name.clone()).or_insert_with(|| b.add_node(name))
    };
    loop {
        match p.peek() {
            Some(Tok::RBrace) => {
                p.next();
                break;
            }
            Some(Tok::Semi) => {
                p.next();
            }
            None => return Err(Error::parse(p.line(), "missing closing `}`")),
            _ => {
                let stmt_line = p.line();
                let first = p.ident()?;
                if p.peek() == Some(&Tok::Eq) {
                    // graph-level attribute, e.g. `rankdir=LR`
                    p.next();
                    p.ident()?;
                    continue;
                }
                if matches!(first.as_str(), "graph" | "node" | "edge")
                    && p.peek() == Some(&Tok::LBracket)
                {
                    p.attrs()?;
                    continue;
                }
                if p.peek() == Some(&Tok::Arrow) {
                    p.next();
                    let second = p.ident()?;
                    if p.peek() == Some(&Tok::Arrow) {
                        return Err(Error::parse(stmt_line, "edge chains are not supported"));
                    }
                    let attrs = p.attrs()?;
                    let mut weight = None;
                    let mut transit = 1;
                    for (k, v, l) in attrs {
                        match k.as_str() {
                            "label" | "weight" => weight = Some(int::<i64>(&v, l, "weight")?),
                            "transit" => transit = check_transit(int(&v, l, "transit weight")?, l)?,
                            _ => {}
                        }
                    }
                    let weight = weight.ok_or_else(|| {
                        Error::parse(stmt_line, "edge without an integer `label`")
                    })?;
                    let u = node(&mut builder, first);
                    let v = node(&mut builder, second);
                    builder.add_edge(u, v, weight, transit)?;
                } else {
                    p.attrs()?;
                    node(&mut builder, first);
                }
            }
        }
    }
    if p.pos < p.toks.len() {
        return Err(Error::parse(p.line(), "trailing input after `}`"));
    }
    Ok(builder.build())
}
