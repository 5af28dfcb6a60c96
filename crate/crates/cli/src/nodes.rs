//! Plain-text node files.
//!
//! ```text
//! # five-point star
//! d=2
//! 0, 0
//! 1, 0
//! ```
//!
//! Coordinates are decimal strings, rounded once to the working precision.
//! Blank lines and `#` comments are ignored.

use std::path::Path;

use sobstencil::polyspace::NodeSet;
use sobstencil::Real;

use crate::error::{CliError, CliResult};

pub fn parse_nodes(text: &str, path: &Path, prec: u32) -> CliResult<NodeSet> {
    let err = |line: usize, message: String| CliError::NodeFile { path: path.to_path_buf(), line, message };
    let mut dim: Option<usize> = None;
    let mut points = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some(d) = dim else {
            let value = line
                .strip_prefix("d=")
                .ok_or_else(|| err(line_no, format!("expected a `d=<dim>` header, found `{line}`")))?;
            let d: usize = value
                .trim()
                .parse()
                .map_err(|_| err(line_no, format!("invalid dimension `{}`", value.trim())))?;
            if d == 0 {
                return Err(err(line_no, "dimension must be at least 1".into()));
            }
            dim = Some(d);
            continue;
        };
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != d {
            return Err(err(line_no, format!("expected {d} coordinates, found {}", fields.len())));
        }
        let point = fields
            .iter()
            .map(|f| Real::parse(f, prec).map_err(|_| err(line_no, format!("invalid number `{f}`"))))
            .collect::<CliResult<Vec<_>>>()?;
        points.push(point);
    }
    let dim = dim.ok_or_else(|| err(1, "missing `d=<dim>` header".into()))?;
    if points.is_empty() {
        return Err(err(text.lines().count().max(1), "no nodes listed".into()));
    }
    let label = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    Ok(NodeSet::new(dim, points, label)?)
}

pub fn read_nodes(path: &Path, prec: u32) -> CliResult<NodeSet> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_nodes(&text, path, prec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_star() {
        let text = "# star\nd=2\n0,0\n1, 0\n-1,0\n0,1\n0,-1\n";
        let nodes = parse_nodes(text, Path::new("star.txt"), 128).unwrap();
        assert_eq!(nodes.len(), 5);
        assert_eq!(nodes.dim(), 2);
        assert_eq!(nodes.point(2)[0].to_f64(), -1.0);
    }

    #[test]
    fn reports_line_numbers() {
        let text = "d=2\n0,0\n\n1,x\n";
        match parse_nodes(text, Path::new("bad.txt"), 64) {
            Err(CliError::NodeFile { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
        match parse_nodes("d=3\n1,2\n", Path::new("short.txt"), 64) {
            Err(CliError::NodeFile { line, message, .. }) => {
                assert_eq!(line, 2);
                assert!(message.contains("expected 3"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn requires_header() {
        assert!(matches!(
            parse_nodes("0,0\n", Path::new("x"), 64),
            Err(CliError::NodeFile { line: 1, .. })
        ));
    }
}
