//! Text formats: edge lists, worth files and loss tables.
//!
//! Edge list:
//!
//! ```text
//! # comment
//! 3 undirected
//! 0 1 0.5
//! 1 2 0.1
//! ```
//!
//! Worth file: one `<target> <worth> [<attacker_worth>]` line per target.
//! Loss table: CSV with header `target,loss_def,loss_atk,stderr`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use netdefense_core::graph::Edge;
use netdefense_core::{DependencyGraph, Directedness, ExpectedLossVector};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{}", path.display())]
    InFile {
        path: PathBuf,
        #[source]
        source: Box<FormatError>,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Core(#[from] netdefense_core::Error),
}

impl FormatError {
    fn in_file(self, path: &Path) -> Self {
        FormatError::InFile {
            path: path.to_path_buf(),
            source: Box::new(self),
        }
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        message: message.into(),
    }
}

/// Non-comment, non-blank lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn field<T: std::str::FromStr>(
    line: usize,
    tok: Option<&str>,
    what: &str,
) -> Result<T, FormatError> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(line, format!("cannot parse {what} {tok:?}")))
}

pub fn parse_edge_list(text: &str) -> Result<DependencyGraph, FormatError> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
    let mut toks = header.split_whitespace();
    let n: usize = field(hline, toks.next(), "target count")?;
    let directedness = match toks.next() {
        Some("directed") => Directedness::Directed,
        Some("undirected") => Directedness::Undirected,
        Some(other) => {
            return Err(parse_err(
                hline,
                format!("expected 'directed' or 'undirected', found {other:?}"),
            ))
        }
        None => return Err(parse_err(hline, "header needs '<n> <directed|undirected>'")),
    };
    if toks.next().is_some() {
        return Err(parse_err(hline, "trailing tokens in header"));
    }
    if n == 0 {
        return Err(parse_err(hline, "graph needs at least one target"));
    }

    let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
    let mut edges = Vec::new();
    for (ln, l) in lines {
        let mut toks = l.split_whitespace();
        let source: usize = field(ln, toks.next(), "source")?;
        let dest: usize = field(ln, toks.next(), "destination")?;
        let prob: f64 = field(ln, toks.next(), "probability")?;
        if toks.next().is_some() {
            return Err(parse_err(ln, "expected '<src> <dst> <prob>'"));
        }
        if source >= n || dest >= n {
            return Err(parse_err(
                ln,
                format!("target index out of range: ({source}, {dest}) with n = {n}"),
            ));
        }
        if source == dest {
            return Err(parse_err(ln, format!("self-loop on {source}")));
        }
        if !(0.0..=1.0).contains(&prob) {
            return Err(parse_err(ln, format!("probability {prob} outside [0, 1]")));
        }
        let key = match directedness {
            Directedness::Undirected => (source.min(dest), source.max(dest)),
            Directedness::Directed => (source, dest),
        };
        if let Some(first) = seen.insert(key, ln) {
            return Err(parse_err(
                ln,
                format!("duplicate edge ({source}, {dest}), first given on line {first}"),
            ));
        }
        edges.push(Edge { source, dest, prob });
    }
    Ok(DependencyGraph::new(n, directedness, edges)?)
}

/// Canonical serialization: header, then edges sorted by `(source, dest)`.
/// Probabilities print in shortest round-trip form.
pub fn format_edge_list(graph: &DependencyGraph) -> String {
    let mut out = String::new();
    let kind = if graph.is_directed() {
        "directed"
    } else {
        "undirected"
    };
    writeln!(out, "{} {kind}", graph.n()).unwrap();
    for e in graph.edges() {
        writeln!(out, "{} {} {}", e.source, e.dest, e.prob).unwrap();
    }
    out
}

pub fn load_edge_list(path: &Path) -> Result<DependencyGraph, FormatError> {
    let text = fs::read_to_string(path).map_err(|e| FormatError::from(e).in_file(path))?;
    parse_edge_list(&text).map_err(|e| e.in_file(path))
}

pub fn save_edge_list(graph: &DependencyGraph, path: &Path) -> Result<(), FormatError> {
    fs::write(path, format_edge_list(graph)).map_err(|e| FormatError::from(e).in_file(path))
}

/// Defender worths and, when every line carries a third column, attacker worths.
#[derive(Debug, Clone, PartialEq)]
pub struct Worths {
    pub defender: Vec<f64>,
    pub attacker: Option<Vec<f64>>,
}

pub fn parse_worths(text: &str, n: usize) -> Result<Worths, FormatError> {
    let mut def = vec![None; n];
    let mut atk = vec![None; n];
    let mut with_atk = None;
    let mut last_line = 0;
    for (ln, l) in content_lines(text) {
        last_line = ln;
        let mut toks = l.split_whitespace();
        let t: usize = field(ln, toks.next(), "target")?;
        let w: f64 = field(ln, toks.next(), "worth")?;
        let a: Option<f64> = toks
            .next()
            .map(|s| field(ln, Some(s), "attacker worth"))
            .transpose()?;
        if toks.next().is_some() {
            return Err(parse_err(
                ln,
                "expected '<target> <worth> [<attacker_worth>]'",
            ));
        }
        if t >= n {
            return Err(parse_err(
                ln,
                format!("target {t} out of range for n = {n}"),
            ));
        }
        if def[t].is_some() {
            return Err(parse_err(ln, format!("target {t} listed twice")));
        }
        match with_atk {
            None => with_atk = Some(a.is_some()),
            Some(flag) if flag != a.is_some() => {
                return Err(parse_err(
                    ln,
                    "attacker worth must be given on every line or none",
                ))
            }
            _ => {}
        }
        for (x, what) in [(Some(w), "worth"), (a, "attacker worth")] {
            if let Some(x) = x {
                if !(x.is_finite() && x >= 0.0) {
                    return Err(parse_err(
                        ln,
                        format!("{what} {x} must be finite and nonnegative"),
                    ));
                }
            }
        }
        def[t] = Some(w);
        atk[t] = a;
    }
    if let Some(t) = def.iter().position(Option::is_none) {
        return Err(parse_err(
            last_line.max(1),
            format!("no worth given for target {t}"),
        ));
    }
    let defender = def.into_iter().map(Option::unwrap).collect();
    let attacker = if with_atk == Some(true) {
        Some(atk.into_iter().map(Option::unwrap).collect())
    } else {
        None
    };
    Ok(Worths { defender, attacker })
}

pub fn load_worths(path: &Path, n: usize) -> Result<Worths, FormatError> {
    let text = fs::read_to_string(path).map_err(|e| FormatError::from(e).in_file(path))?;
    parse_worths(&text, n).map_err(|e| e.in_file(path))
}

pub fn format_worths(graph: &DependencyGraph) -> String {
    let mut out = String::new();
    let zero_sum = graph.is_zero_sum();
    for t in 0..graph.n() {
        if zero_sum {
            writeln!(out, "{t} {}", graph.worths()[t]).unwrap();
        } else {
            writeln!(
                out,
                "{t} {} {}",
                graph.worths()[t],
                graph.attacker_worths()[t]
            )
            .unwrap();
        }
    }
    out
}

#[derive(Debug, Serialize, Deserialize)]
struct LossRow {
    target: usize,
    loss_def: f64,
    loss_atk: f64,
    stderr: f64,
}

/// Loss vector as CSV; `stderr` is the defender-side standard error.
pub fn write_losses<W: io::Write>(losses: &ExpectedLossVector, out: W) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(out);
    for t in 0..losses.n() {
        w.serialize(LossRow {
            target: t,
            loss_def: losses.loss_def[t],
            loss_atk: losses.loss_atk[t],
            stderr: losses.stderr_def[t],
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a loss table back; rows must list targets `0..n` in order. The
/// single `stderr` column fills both standard-error fields.
pub fn read_losses<R: io::Read>(input: R) -> Result<ExpectedLossVector, FormatError> {
    let mut r = csv::Reader::from_reader(input);
    let (mut def, mut atk, mut se) = (Vec::new(), Vec::new(), Vec::new());
    for (i, row) in r.deserialize::<LossRow>().enumerate() {
        let row = row?;
        if row.target != i {
            return Err(parse_err(
                i + 2,
                format!("expected target {i}, found {}", row.target),
            ));
        }
        def.push(row.loss_def);
        atk.push(row.loss_atk);
        se.push(row.stderr);
    }
    let mut losses = ExpectedLossVector::exact(def, atk)?;
    losses.stderr_atk = se.clone();
    losses.stderr_def = se;
    Ok(losses)
}
