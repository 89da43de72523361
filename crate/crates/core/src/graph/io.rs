//! Text formats: whitespace-separated edge lists, `node value` attribute
//! files, and the `source_id,dense_id` node map.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use log::warn;

use super::{AttrValue, Attributes, Graph};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadStats {
    pub duplicates: usize,
    pub self_loops: usize,
}

/// Which identifiers an exported file uses for nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdStyle {
    Dense,
    Source,
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

/// Meaningful lines with their 1-based line numbers.
fn data_lines<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, String)>> {
    reader
        .lines()
        .enumerate()
        .filter_map(|(i, line)| match line {
            Ok(l) => {
                let t = l.trim();
                (!t.is_empty() && !t.starts_with('#')).then(|| Ok((i + 1, t.to_string())))
            }
            Err(e) => Some(Err(Error::Parse {
                line: i + 1,
                message: e.to_string(),
            })),
        })
}

fn two_tokens(line: usize, text: &str) -> Result<(String, String)> {
    let mut it = text.split_whitespace();
    match (it.next(), it.next(), it.next()) {
        (Some(a), Some(b), None) => Ok((a.to_string(), b.to_string())),
        _ => Err(Error::Parse {
            line,
            message: format!("expected two whitespace-separated tokens, got {text:?}"),
        }),
    }
}

/// Parses an edge list. Dense ids follow first appearance.
pub fn parse_edge_list<R: BufRead>(reader: R) -> Result<(Graph, LoadStats)> {
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut names = Vec::new();
    let mut edges = Vec::new();
    let mut intern = |tok: String| -> usize {
        *index.entry(tok.clone()).or_insert_with(|| {
            names.push(tok);
            names.len() - 1
        })
    };
    for item in data_lines(reader) {
        let (line, text) = item?;
        let (a, b) = two_tokens(line, &text)?;
        let u = intern(a);
        let v = intern(b);
        edges.push((u, v));
    }
    let (g, stats) = Graph::build(names, edges)?;
    if g.edge_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    if stats.duplicates > 0 || stats.self_loops > 0 {
        warn!(
            "dropped {} duplicate edges and {} self-loops",
            stats.duplicates, stats.self_loops
        );
    }
    Ok((g, stats))
}

pub fn load_edge_list(path: impl AsRef<Path>) -> Result<(Graph, LoadStats)> {
    let path = path.as_ref();
    parse_edge_list(open(path)?)
}

/// Attaches attributes from `node value` lines. The majority symbol becomes
/// `R` and the minority symbol `B`; on a tie the lexicographically smaller
/// symbol is `R`.
pub fn parse_attributes<R: BufRead>(graph: Graph, reader: R) -> Result<Graph> {
    let index: HashMap<&str, usize> = graph
        .source_ids()
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let mut raw: Vec<Option<String>> = vec![None; graph.node_count()];
    let mut symbols: Vec<String> = Vec::new();
    for item in data_lines(reader) {
        let (line, text) = item?;
        let (node, value) = two_tokens(line, &text)?;
        let &u = index
            .get(node.as_str())
            .ok_or_else(|| Error::UnknownNode(node.clone()))?;
        match &raw[u] {
            Some(prev) if *prev != value => {
                return Err(Error::ConflictingAttribute {
                    node,
                    first: prev.clone(),
                    second: value,
                })
            }
            _ => {}
        }
        if !symbols.contains(&value) {
            symbols.push(value.clone());
            if symbols.len() > 2 {
                symbols.sort();
                return Err(Error::NotBinary(symbols));
            }
        }
        raw[u] = Some(value);
    }
    if let Some(u) = raw.iter().position(Option::is_none) {
        return Err(Error::MissingAttribute(graph.source_id(u).to_string()));
    }
    symbols.sort();
    let count = |s: &str| raw.iter().filter(|v| v.as_deref() == Some(s)).count();
    let (major, minor) = match symbols.as_slice() {
        [a] => (a.clone(), String::new()),
        [a, b] if count(b) > count(a) => (b.clone(), a.clone()),
        [a, b] => (a.clone(), b.clone()),
        _ => return Err(Error::EmptyGraph),
    };
    let values = raw
        .into_iter()
        .map(|v| {
            if v.as_deref() == Some(major.as_str()) {
                AttrValue::R
            } else {
                AttrValue::B
            }
        })
        .collect();
    let mut graph = graph;
    graph.set_attributes(Attributes {
        values,
        symbols: [major, minor],
    });
    Ok(graph)
}

pub fn load_attributes(graph: Graph, path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    parse_attributes(graph, open(path)?)
}

impl Graph {
    fn node_label(&self, u: usize, ids: IdStyle) -> String {
        match ids {
            IdStyle::Dense => u.to_string(),
            IdStyle::Source => self.source_id(u).to_string(),
        }
    }

    pub fn write_edge_list<W: Write>(&self, mut w: W, ids: IdStyle) -> std::io::Result<()> {
        for (u, v) in self.edges() {
            writeln!(w, "{} {}", self.node_label(u, ids), self.node_label(v, ids))?;
        }
        Ok(())
    }

    /// Writes `node value` lines using the graph's source symbols.
    pub fn write_attributes<W: Write>(&self, mut w: W, ids: IdStyle) -> Result<()> {
        let attrs = self.attributes().ok_or(Error::Unlabeled)?;
        let io = |e| Error::io("<attributes>", e);
        for (u, &v) in attrs.values.iter().enumerate() {
            writeln!(w, "{} {}", self.node_label(u, ids), attrs.symbol(v)).map_err(io)?;
        }
        Ok(())
    }

    pub fn write_id_map<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "source_id,dense_id")?;
        for (u, s) in self.source_ids().iter().enumerate() {
            writeln!(w, "{s},{u}")?;
        }
        Ok(())
    }
}
