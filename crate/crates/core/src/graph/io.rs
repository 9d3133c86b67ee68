//! Plain-text graph files.
//!
//! ```text
//! # comment
//! n m
//! u v p        (m lines, 0 <= u < v < n, p in (0, 1])
//! bipartition l1 l2 ...   (optional; lists the left-side vertices)
//! ```

use std::fmt::Write as _;
use std::path::Path;

use super::{BaseGraph, Bipartition, GraphError, StochasticGraph};

pub fn to_text(sg: &StochasticGraph) -> String {
    let mut out = String::new();
    writeln!(out, "{} {}", sg.n(), sg.m()).unwrap();
    for (e, &(u, v)) in sg.graph().edges().iter().enumerate() {
        // `{}` on f64 prints the shortest string that parses back exactly.
        writeln!(out, "{} {} {}", u, v, sg.p(e)).unwrap();
    }
    if let Some(b) = sg.bipartition() {
        out.push_str("bipartition");
        for v in b.left() {
            write!(out, " {v}").unwrap();
        }
        out.push('\n');
    }
    out
}

fn parse_err(line: usize, msg: impl Into<String>) -> GraphError {
    GraphError::Parse { line, msg: msg.into() }
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T, GraphError> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(line, format!("invalid {what} '{tok}'")))
}

pub fn from_text(text: &str) -> Result<StochasticGraph, GraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header 'n m'"))?;
    let mut toks = header.split_whitespace();
    let n: usize = field(toks.next(), hline, "vertex count")?;
    let m: usize = field(toks.next(), hline, "edge count")?;
    if toks.next().is_some() {
        return Err(parse_err(hline, "header must be 'n m'"));
    }

    let mut pairs = Vec::with_capacity(m);
    let mut probs = Vec::with_capacity(m);
    let mut seen = std::collections::HashSet::with_capacity(m);
    let mut last_line = hline;
    for k in 0..m {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| parse_err(last_line, format!("expected {m} edges, found {k}")))?;
        last_line = ln;
        let mut t = l.split_whitespace();
        let u: usize = field(t.next(), ln, "endpoint u")?;
        let v: usize = field(t.next(), ln, "endpoint v")?;
        let p: f64 = field(t.next(), ln, "probability")?;
        if t.next().is_some() {
            return Err(parse_err(ln, "edge line must be 'u v p'"));
        }
        if u == v {
            return Err(parse_err(ln, format!("self-loop at vertex {u}")));
        }
        if u > v {
            return Err(parse_err(ln, format!("endpoints must satisfy u < v, got {u} {v}")));
        }
        if v >= n {
            return Err(parse_err(ln, format!("vertex {v} out of range for n = {n}")));
        }
        if !(p.is_finite() && p > 0.0 && p <= 1.0) {
            return Err(parse_err(ln, format!("probability out of range (0, 1]: {p}")));
        }
        if !seen.insert((u, v)) {
            return Err(parse_err(ln, format!("duplicate edge {u}-{v}")));
        }
        pairs.push((u, v));
        probs.push(p);
    }

    let mut bipartition = None;
    if let Some((ln, l)) = lines.next() {
        let mut t = l.split_whitespace();
        if t.next() != Some("bipartition") {
            return Err(parse_err(ln, "unexpected content after edge list"));
        }
        let left = t
            .map(|tok| field::<usize>(Some(tok), ln, "vertex"))
            .collect::<Result<Vec<_>, _>>()?;
        let b = Bipartition::from_left(n, left).map_err(|e| parse_err(ln, e.to_string()))?;
        bipartition = Some((ln, b));
        if let Some((ln2, _)) = lines.next() {
            return Err(parse_err(ln2, "unexpected content after bipartition"));
        }
    }

    let sg = StochasticGraph::new(BaseGraph::new(n, pairs)?, probs)?;
    match bipartition {
        Some((ln, b)) => sg.with_bipartition(b).map_err(|e| parse_err(ln, e.to_string())),
        None => Ok(sg),
    }
}

pub fn load(path: impl AsRef<Path>) -> Result<StochasticGraph, GraphError> {
    let text = std::fs::read_to_string(path.as_ref()).map_err(|e| GraphError::Io(e.to_string()))?;
    from_text(&text)
}

pub fn save(sg: &StochasticGraph, path: impl AsRef<Path>) -> Result<(), GraphError> {
    std::fs::write(path.as_ref(), to_text(sg)).map_err(|e| GraphError::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GeneratorKind, ProbModel};

    #[test]
    fn round_trip_through_file() {
        let sg = generate(
            GeneratorKind::ErdosRenyi { n: 12, density: 0.4 },
            ProbModel::UniformRange(0.1, 0.9),
            5,
        )
        .unwrap();
        let dir = std::env::temp_dir().join(format!("stochgraph-io-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("g.txt");
        save(&sg, &path).unwrap();
        assert_eq!(load(&path).unwrap(), sg);
        std::fs::remove_dir_all(dir).ok();
    }

    #[test]
    fn bipartition_trailer_round_trips() {
        let sg = generate(GeneratorKind::Path { n: 5 }, ProbModel::Uniform(0.5), 0).unwrap();
        let text = to_text(&sg);
        assert!(text.ends_with("bipartition 0 2 4\n"));
        assert_eq!(from_text(&text).unwrap(), sg);
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let sg = from_text("# header next\n3 2\n\n0 1 0.5 # first\n1 2 1\n").unwrap();
        assert_eq!(sg.m(), 2);
        assert_eq!(sg.p(1), 1.0);
    }

    #[test]
    fn self_loop_rejected_with_line() {
        let err = from_text("4 1\n3 3 0.5\n").unwrap_err();
        assert_eq!(err, parse_err(2, "self-loop at vertex 3"));
    }

    #[test]
    fn zero_probability_rejected() {
        let err = from_text("2 1\n0 1 0\n").unwrap_err();
        assert!(err.to_string().contains("probability out of range"), "{err}");
        assert!(err.to_string().starts_with("line 2"));
    }

    #[test]
    fn duplicates_and_counts_rejected() {
        assert!(from_text("3 2\n0 1 0.5\n0 1 0.5\n")
            .unwrap_err()
            .to_string()
            .contains("duplicate"));
        assert!(from_text("3 2\n0 1 0.5\n").is_err());
        assert!(from_text("3 1\n0 1 0.5\n1 2 0.5\n").is_err());
        assert!(from_text("3 1\n1 0 0.5\n").is_err());
    }

    #[test]
    fn invalid_bipartition_rejected() {
        let err = from_text("3 1\n0 1 0.5\nbipartition 0 1\n").unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 3, .. }));
    }
}
