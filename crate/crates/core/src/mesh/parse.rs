//! Reader and writer for the 2D subset of the MFEM v1.0 mesh format.

use std::fmt::Write as _;

use thiserror::Error;

use super::{BoundaryEdge, Element, Mesh, MeshError, Vertex};
use crate::reference::Geometry;

const HEADER: &str = "MFEM mesh v1.0";

#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    /// 1-based line number; 0 when the problem is not tied to a line (empty input).
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseErrorKind {
    #[error("expected header `{HEADER}`, found `{0}`")]
    Header(String),
    #[error("unexpected end of input while reading {0}")]
    UnexpectedEof(&'static str),
    #[error("invalid {what} `{token}`")]
    InvalidNumber { what: &'static str, token: String },
    #[error("only 2D meshes are supported, found dimension {0}")]
    Dimension(String),
    #[error("unknown geometry code {0}")]
    UnknownGeometry(u32),
    #[error("geometry code {0} is not allowed in this section")]
    WrongGeometry(u32),
    #[error("vertex index {index} out of range ({count} vertices)")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("unknown section `{0}`")]
    UnknownSection(String),
    #[error("section `{0}` appears twice")]
    DuplicateSection(&'static str),
    #[error("missing section `{0}`")]
    MissingSection(&'static str),
    #[error("vertex dimension must be 2, found {0}")]
    VertexDimension(usize),
    #[error("invalid mesh: {0}")]
    Mesh(MeshError),
}

struct Tokens<'a> {
    lines: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
    current: Option<(usize, std::str::SplitWhitespace<'a>)>,
    last_line: usize,
}

impl<'a> Tokens<'a> {
    fn new(lines: std::iter::Enumerate<std::str::Lines<'a>>) -> Self {
        Tokens { lines: lines.peekable(), current: None, last_line: 0 }
    }

    fn next_token(&mut self) -> Option<(usize, &'a str)> {
        loop {
            if let Some((line, words)) = self.current.as_mut() {
                if let Some(w) = words.next() {
                    self.last_line = *line;
                    return Some((*line, w));
                }
            }
            let (i, text) = self.lines.next()?;
            let text = text.split('#').next().unwrap_or("");
            self.current = Some((i + 1, text.split_whitespace()));
        }
    }

    fn expect(&mut self, what: &'static str) -> Result<(usize, &'a str), ParseError> {
        self.next_token().ok_or(ParseError {
            line: self.last_line,
            kind: ParseErrorKind::UnexpectedEof(what),
        })
    }

    fn number<T: std::str::FromStr>(&mut self, what: &'static str) -> Result<(usize, T), ParseError> {
        let (line, token) = self.expect(what)?;
        token.parse().map(|v| (line, v)).map_err(|_| ParseError {
            line,
            kind: ParseErrorKind::InvalidNumber { what, token: token.to_string() },
        })
    }
}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

fn geometry_from_code(code: u32, line: usize) -> Result<Geometry, ParseError> {
    match code {
        1 => Ok(Geometry::Segment),
        2 => Ok(Geometry::Triangle),
        3 => Ok(Geometry::Quad),
        0 | 4..=7 => Err(err(line, ParseErrorKind::WrongGeometry(code))),
        _ => Err(err(line, ParseErrorKind::UnknownGeometry(code))),
    }
}

fn geometry_code(kind: Geometry) -> u32 {
    match kind {
        Geometry::Segment => 1,
        Geometry::Triangle => 2,
        Geometry::Quad => 3,
    }
}

/// Record lists are capped in their up-front allocation so a bogus count
/// cannot trigger a huge reservation.
fn capacity(count: usize) -> usize {
    count.min(1 << 12)
}

/// Parses an MFEM v1.0 mesh (2D, straight-edged triangles and quads).
pub fn parse_mfem_mesh(text: &str) -> Result<Mesh, ParseError> {
    let mut lines = text.lines().enumerate();
    let header_line = loop {
        match lines.next() {
            None => return Err(err(0, ParseErrorKind::UnexpectedEof("header"))),
            Some((_, l)) if l.trim().is_empty() => continue,
            Some((i, l)) => {
                if l.trim() != HEADER {
                    return Err(err(i + 1, ParseErrorKind::Header(l.trim().to_string())));
                }
                break i + 1;
            }
        }
    };
    let mut tokens = Tokens::new(lines);
    tokens.last_line = header_line;

    let mut dimension_seen = false;
    let mut elements: Option<(Vec<Element>, Vec<usize>)> = None;
    let mut boundary: Option<(Vec<BoundaryEdge>, Vec<usize>)> = None;
    let mut vertices: Option<(Vec<Vertex>, Vec<usize>)> = None;

    while let Some((line, keyword)) = tokens.next_token() {
        match keyword {
            "dimension" => {
                if dimension_seen {
                    return Err(err(line, ParseErrorKind::DuplicateSection("dimension")));
                }
                let (l, d) = tokens.expect("dimension")?;
                if d != "2" {
                    return Err(err(l, ParseErrorKind::Dimension(d.to_string())));
                }
                dimension_seen = true;
            }
            "elements" => {
                if elements.is_some() {
                    return Err(err(line, ParseErrorKind::DuplicateSection("elements")));
                }
                let (_, count) = tokens.number::<usize>("element count")?;
                let mut list = Vec::with_capacity(capacity(count));
                let mut rows = Vec::with_capacity(capacity(count));
                for _ in 0..count {
                    let (row, attribute) = tokens.number::<i32>("element attribute")?;
                    let (l, code) = tokens.number::<u32>("element geometry")?;
                    let kind = geometry_from_code(code, l)?;
                    if kind == Geometry::Segment {
                        return Err(err(l, ParseErrorKind::WrongGeometry(code)));
                    }
                    let mut ids = Vec::with_capacity(kind.num_vertices());
                    for _ in 0..kind.num_vertices() {
                        ids.push(tokens.number::<usize>("vertex index")?.1);
                    }
                    list.push(Element { kind, vertices: ids, attribute });
                    rows.push(row);
                }
                elements = Some((list, rows));
            }
            "boundary" => {
                if boundary.is_some() {
                    return Err(err(line, ParseErrorKind::DuplicateSection("boundary")));
                }
                let (_, count) = tokens.number::<usize>("boundary count")?;
                let mut list = Vec::with_capacity(capacity(count));
                let mut rows = Vec::with_capacity(capacity(count));
                for _ in 0..count {
                    let (row, attribute) = tokens.number::<i32>("boundary attribute")?;
                    let (l, code) = tokens.number::<u32>("boundary geometry")?;
                    if geometry_from_code(code, l)? != Geometry::Segment {
                        return Err(err(l, ParseErrorKind::WrongGeometry(code)));
                    }
                    let a = tokens.number::<usize>("vertex index")?.1;
                    let b = tokens.number::<usize>("vertex index")?.1;
                    list.push(BoundaryEdge { vertices: [a, b], attribute });
                    rows.push(row);
                }
                boundary = Some((list, rows));
            }
            "vertices" => {
                if vertices.is_some() {
                    return Err(err(line, ParseErrorKind::DuplicateSection("vertices")));
                }
                let (_, count) = tokens.number::<usize>("vertex count")?;
                let (l, vdim) = tokens.number::<usize>("vertex dimension")?;
                if vdim != 2 {
                    return Err(err(l, ParseErrorKind::VertexDimension(vdim)));
                }
                let mut list = Vec::with_capacity(capacity(count));
                let mut rows = Vec::with_capacity(capacity(count));
                for _ in 0..count {
                    let (row, x) = tokens.number::<f64>("coordinate")?;
                    let (_, y) = tokens.number::<f64>("coordinate")?;
                    list.push(Vertex { x, y });
                    rows.push(row);
                }
                vertices = Some((list, rows));
            }
            other => return Err(err(line, ParseErrorKind::UnknownSection(other.to_string()))),
        }
    }

    let end = tokens.last_line;
    if !dimension_seen {
        return Err(err(end, ParseErrorKind::MissingSection("dimension")));
    }
    let (elements, element_rows) = elements.ok_or(err(end, ParseErrorKind::MissingSection("elements")))?;
    let (boundary, boundary_rows) = boundary.ok_or(err(end, ParseErrorKind::MissingSection("boundary")))?;
    let (vertices, vertex_rows) = vertices.ok_or(err(end, ParseErrorKind::MissingSection("vertices")))?;

    let count = vertices.len();
    for (el, &row) in elements.iter().zip(&element_rows) {
        if let Some(&index) = el.vertices.iter().find(|&&v| v >= count) {
            return Err(err(row, ParseErrorKind::IndexOutOfRange { index, count }));
        }
    }
    for (be, &row) in boundary.iter().zip(&boundary_rows) {
        if let Some(&index) = be.vertices.iter().find(|&&v| v >= count) {
            return Err(err(row, ParseErrorKind::IndexOutOfRange { index, count }));
        }
    }

    Mesh::new(vertices, elements, boundary).map_err(|e| {
        let line = match &e {
            MeshError::NonFiniteVertex { vertex } | MeshError::UnusedVertex { vertex } => {
                vertex_rows.get(*vertex).copied()
            }
            MeshError::UnsupportedElement { element, .. }
            | MeshError::WrongVertexCount { element, .. }
            | MeshError::VertexOutOfRange { element, .. }
            | MeshError::RepeatedVertex { element, .. }
            | MeshError::InvertedElement { element } => element_rows.get(*element).copied(),
            MeshError::BadBoundaryEdge { index, .. } => boundary_rows.get(*index).copied(),
            _ => None,
        };
        err(line.unwrap_or(end), ParseErrorKind::Mesh(e))
    })
}

/// Serializes a mesh in the same format. Coordinates use Rust's shortest
/// round-trip float formatting, so parsing the output reproduces the mesh
/// bit for bit.
pub fn write_mfem_mesh(mesh: &Mesh) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{HEADER}\n");
    let _ = writeln!(out, "dimension\n2\n");
    let _ = writeln!(out, "elements\n{}", mesh.num_elements());
    for el in mesh.elements() {
        let _ = write!(out, "{} {}", el.attribute, geometry_code(el.kind));
        for v in &el.vertices {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
    let _ = writeln!(out, "\nboundary\n{}", mesh.boundary().len());
    for be in mesh.boundary() {
        let _ = writeln!(out, "{} 1 {} {}", be.attribute, be.vertices[0], be.vertices[1]);
    }
    let _ = writeln!(out, "\nvertices\n{}\n2", mesh.num_vertices());
    for v in mesh.vertices() {
        let _ = writeln!(out, "{:?} {:?}", v.x, v.y);
    }
    out
}
