use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use super::{EdgeList, GraphError, VertexId, MAX_VERTICES};

/// On-disk edge formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeFormat {
    /// `src dst` per line, 0-based; `#` and `%` lines are comments.
    EdgeListText,
    /// Matrix Market coordinate format, 1-based, read as a pattern.
    MatrixMarket,
}

impl FromStr for EdgeFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "edges" | "edge-list" | "txt" => Ok(EdgeFormat::EdgeListText),
            "mtx" | "matrix-market" => Ok(EdgeFormat::MatrixMarket),
            other => Err(format!("unknown edge format '{other}' (expected edges or mtx)")),
        }
    }
}

impl EdgeFormat {
    /// Guesses the format from a file extension, defaulting to edge-list text.
    pub fn from_path(path: &Path) -> EdgeFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("mtx") => EdgeFormat::MatrixMarket,
            _ => EdgeFormat::EdgeListText,
        }
    }
}

/// Reads a directed edge list exactly as stored. No cleanup is applied.
pub fn load_edge_list<R: BufRead>(source: R, format: EdgeFormat) -> Result<EdgeList, GraphError> {
    match format {
        EdgeFormat::EdgeListText => read_text(source),
        EdgeFormat::MatrixMarket => read_matrix_market(source),
    }
}

pub fn load_edge_list_file(path: &Path, format: EdgeFormat) -> Result<EdgeList, GraphError> {
    let file = File::open(path)
        .map_err(|e| GraphError::Io(format!("{}: {e}", path.display())))?;
    load_edge_list(BufReader::new(file), format)
}

/// Writes `src dst` lines, the same text format [`load_edge_list`] reads.
pub fn write_edge_list<W: Write>(mut out: W, el: &EdgeList) -> Result<(), GraphError> {
    for &(s, d) in &el.edges {
        writeln!(out, "{s} {d}")?;
    }
    out.flush()?;
    Ok(())
}

fn parse_id(token: &str, line: usize) -> Result<u64, GraphError> {
    token.parse::<u64>().map_err(|_| GraphError::Parse {
        line,
        message: format!("expected a non-negative integer, found '{token}'"),
    })
}

fn check_id(id: u64, line: usize) -> Result<VertexId, GraphError> {
    // The largest id must leave room for num_vertices = id + 1.
    if id >= MAX_VERTICES {
        return Err(GraphError::IdOverflow {
            line,
            id,
            max: MAX_VERTICES - 1,
        });
    }
    Ok(id as VertexId)
}

fn read_text<R: BufRead>(source: R) -> Result<EdgeList, GraphError> {
    let mut edges = Vec::new();
    let mut num_vertices = 0usize;
    for (idx, line) in source.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let (Some(a), Some(b)) = (tokens.next(), tokens.next()) else {
            return Err(GraphError::Parse {
                line: lineno,
                message: format!("expected 'src dst', found '{trimmed}'"),
            });
        };
        let src = check_id(parse_id(a, lineno)?, lineno)?;
        let dst = check_id(parse_id(b, lineno)?, lineno)?;
        num_vertices = num_vertices.max(src.max(dst) as usize + 1);
        edges.push((src, dst));
    }
    Ok(EdgeList { edges, num_vertices })
}

fn read_matrix_market<R: BufRead>(source: R) -> Result<EdgeList, GraphError> {
    let mut lines = source.lines().enumerate();

    let header = match lines.next() {
        Some((_, line)) => line?,
        None => {
            return Err(GraphError::Parse {
                line: 1,
                message: "missing %%MatrixMarket header".into(),
            })
        }
    };
    let lower = header.to_ascii_lowercase();
    let fields: Vec<&str> = lower.split_whitespace().collect();
    if fields.len() < 3 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" || fields[2] != "coordinate" {
        return Err(GraphError::Parse {
            line: 1,
            message: format!("unsupported header '{header}' (need %%MatrixMarket matrix coordinate)"),
        });
    }

    let mut size: Option<(u64, u64, usize)> = None;
    let mut edges = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        match size {
            None => {
                if tokens.len() < 3 {
                    return Err(GraphError::Parse {
                        line: lineno,
                        message: format!("expected 'rows cols nnz', found '{trimmed}'"),
                    });
                }
                let rows = parse_id(tokens[0], lineno)?;
                let cols = parse_id(tokens[1], lineno)?;
                let nnz = parse_id(tokens[2], lineno)? as usize;
                check_id(rows.max(cols).saturating_sub(1), lineno)?;
                edges.reserve(nnz);
                size = Some((rows, cols, nnz));
            }
            Some((rows, cols, _)) => {
                if tokens.len() < 2 {
                    return Err(GraphError::Parse {
                        line: lineno,
                        message: format!("expected 'row col [value]', found '{trimmed}'"),
                    });
                }
                let i = parse_id(tokens[0], lineno)?;
                let j = parse_id(tokens[1], lineno)?;
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(GraphError::Parse {
                        line: lineno,
                        message: format!("entry ({i}, {j}) outside the {rows}x{cols} matrix"),
                    });
                }
                edges.push((check_id(i - 1, lineno)?, check_id(j - 1, lineno)?));
            }
        }
    }

    let Some((rows, cols, nnz)) = size else {
        return Err(GraphError::Parse {
            line: 1,
            message: "missing size line".into(),
        });
    };
    if edges.len() != nnz {
        return Err(GraphError::Parse {
            line: 0,
            message: format!("size line declares {nnz} entries but {} were read", edges.len()),
        });
    }
    Ok(EdgeList {
        edges,
        num_vertices: rows.max(cols) as usize,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn text(s: &str) -> Result<EdgeList, GraphError> {
        load_edge_list(s.as_bytes(), EdgeFormat::EdgeListText)
    }

    #[test]
    fn reads_plain_pairs() {
        let el = text("0 1\n1 2\n").unwrap();
        assert_eq!(el.edges, vec![(0, 1), (1, 2)]);
        assert_eq!(el.num_vertices, 3);
    }

    #[test]
    fn empty_stream() {
        assert_eq!(text("").unwrap(), EdgeList::default());
    }

    #[test]
    fn skips_comments_and_extra_columns() {
        let el = text("# header\n% other\n\n3\t0 0.5\n").unwrap();
        assert_eq!(el.edges, vec![(3, 0)]);
        assert_eq!(el.num_vertices, 4);
    }

    #[test]
    fn parse_error_carries_line() {
        assert_eq!(
            text("0 1\n2 x\n").unwrap_err(),
            GraphError::Parse {
                line: 2,
                message: "expected a non-negative integer, found 'x'".into()
            }
        );
        assert!(matches!(text("0 1\n7\n"), Err(GraphError::Parse { line: 2, .. })));
        assert!(matches!(text("-1 2\n"), Err(GraphError::Parse { line: 1, .. })));
    }

    #[test]
    fn id_overflow() {
        let err = text("0 4294967295\n").unwrap_err();
        assert!(matches!(err, GraphError::IdOverflow { line: 1, .. }));
        assert!(text("0 4294967294\n").is_ok());
    }

    #[test]
    fn matrix_market_pattern() {
        let src = "%%MatrixMarket matrix coordinate pattern general\n% c\n3 3 2\n1 2\n2 3\n";
        let el = load_edge_list(src.as_bytes(), EdgeFormat::MatrixMarket).unwrap();
        assert_eq!(el.edges, vec![(0, 1), (1, 2)]);
        assert_eq!(el.num_vertices, 3);
    }

    #[test]
    fn matrix_market_ignores_weights() {
        let src = "%%MatrixMarket matrix coordinate real symmetric\n4 4 1\n4 1 2.5\n";
        let el = load_edge_list(src.as_bytes(), EdgeFormat::MatrixMarket).unwrap();
        assert_eq!(el.edges, vec![(3, 0)]);
        assert_eq!(el.num_vertices, 4);
    }

    #[test]
    fn matrix_market_errors() {
        let mm = |s: &str| load_edge_list(s.as_bytes(), EdgeFormat::MatrixMarket);
        assert!(mm("").is_err());
        assert!(mm("%%MatrixMarket matrix array real general\n2 2\n").is_err());
        assert!(matches!(
            mm("%%MatrixMarket matrix coordinate pattern general\n2 2 1\n0 1\n"),
            Err(GraphError::Parse { line: 3, .. })
        ));
        assert!(mm("%%MatrixMarket matrix coordinate pattern general\n2 2 2\n1 2\n").is_err());
    }

    #[test]
    fn write_then_read() {
        let el = EdgeList::from_edges(vec![(0, 5), (5, 0), (2, 3)]);
        let mut buf = Vec::new();
        write_edge_list(&mut buf, &el).unwrap();
        assert_eq!(text(std::str::from_utf8(&buf).unwrap()).unwrap(), el);
    }
}
