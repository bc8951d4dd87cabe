//! Line-based text format:
//!
//! ```text
//! polymesh 1
//! vertices N
//! x y            (N lines)
//! cells M
//! n i1 ... in    (M lines, 0-based vertex indices)
//! ```
//!
//! Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::path::Path;

use super::PolygonalMesh;
use crate::error::{Error, Result};
use crate::Point;

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<(usize, Vec<&'a str>)> {
        for (i, line) in self.inner.by_ref() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            self.last = i + 1;
            return Ok((i + 1, t.split_whitespace().collect()));
        }
        Err(Error::Parse { line: self.last + 1, message: "unexpected end of file".into() })
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn count(lines: &mut Lines, keyword: &str) -> Result<usize> {
    let (ln, tok) = lines.next()?;
    match tok.as_slice() {
        [k, n] if *k == keyword => n.parse().map_err(|_| parse_err(ln, format!("bad {keyword} count `{n}`"))),
        _ => Err(parse_err(ln, format!("expected `{keyword} <count>`"))),
    }
}

pub fn parse_mesh(text: &str) -> Result<PolygonalMesh> {
    let mut lines = Lines { inner: text.lines().enumerate(), last: 0 };
    let (ln, header) = lines.next()?;
    if header != ["polymesh", "1"] {
        return Err(parse_err(ln, "expected header `polymesh 1`"));
    }
    let nv = count(&mut lines, "vertices")?;
    let mut vertices: Vec<Point> = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, tok) = lines.next()?;
        if tok.len() != 2 {
            return Err(parse_err(ln, "expected two coordinates"));
        }
        let x: f64 = tok[0].parse().map_err(|_| parse_err(ln, format!("bad coordinate `{}`", tok[0])))?;
        let y: f64 = tok[1].parse().map_err(|_| parse_err(ln, format!("bad coordinate `{}`", tok[1])))?;
        if !x.is_finite() || !y.is_finite() {
            return Err(parse_err(ln, "non-finite coordinate"));
        }
        vertices.push([x, y]);
    }
    let nc = count(&mut lines, "cells")?;
    let mut cells = Vec::with_capacity(nc);
    for _ in 0..nc {
        let (ln, tok) = lines.next()?;
        let idx: Vec<usize> = tok
            .iter()
            .map(|t| t.parse().map_err(|_| parse_err(ln, format!("bad index `{t}`"))))
            .collect::<Result<_>>()?;
        match idx.split_first() {
            Some((&n, rest)) if n == rest.len() => cells.push(rest.to_vec()),
            _ => return Err(parse_err(ln, "cell vertex count does not match the number of indices")),
        }
    }
    PolygonalMesh::new(vertices, cells, 0)
}

pub fn write_mesh(mesh: &PolygonalMesh) -> String {
    let mut s = String::from("polymesh 1\n");
    let _ = writeln!(s, "vertices {}", mesh.num_vertices());
    for v in mesh.vertices() {
        let _ = writeln!(s, "{:?} {:?}", v[0], v[1]);
    }
    let _ = writeln!(s, "cells {}", mesh.num_cells());
    for c in mesh.cells() {
        let _ = write!(s, "{}", c.len());
        for v in c {
            let _ = write!(s, " {v}");
        }
        s.push('\n');
    }
    s
}

pub fn load_mesh(path: impl AsRef<Path>) -> Result<PolygonalMesh> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    parse_mesh(&text)
}

pub fn save_mesh(mesh: &PolygonalMesh, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, write_mesh(mesh)).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQUARE: &str = "polymesh 1\nvertices 4\n0 0\n1 0\n1 1\n0 1\ncells 1\n4 0 1 2 3\n";

    #[test]
    fn parses_square() {
        let m = parse_mesh(SQUARE).unwrap();
        assert_eq!(m.num_cells(), 1);
        assert_eq!(m.cell(0), &[0, 1, 2, 3]);
    }

    #[test]
    fn round_trip_text() {
        let m = parse_mesh(SQUARE).unwrap();
        let again = parse_mesh(&write_mesh(&m)).unwrap();
        assert_eq!(m.vertices(), again.vertices());
        assert_eq!(m.cells(), again.cells());
    }

    #[test]
    fn clockwise_cell_is_reoriented() {
        let m = parse_mesh("polymesh 1\nvertices 3\n0 0\n0 1\n1 0\ncells 1\n3 0 1 2\n").unwrap();
        let p = m.cell_points(0);
        let signed = 0.5
            * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[1][1] - p[0][1]) * (p[2][0] - p[0][0]));
        assert!(signed > 0.0);
    }

    #[test]
    fn missing_vertex() {
        let r = parse_mesh("polymesh 1\nvertices 3\n0 0\n1 0\n0 1\ncells 1\n3 0 1 3\n");
        assert!(matches!(r, Err(Error::Topology(_))));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match parse_mesh("polymesh 1\nvertices 2\n0 0\n1 x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
        match parse_mesh("polymesh 2\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_mesh("polymesh 1\nvertices 1\n"), Err(Error::Parse { .. })));
    }
}
