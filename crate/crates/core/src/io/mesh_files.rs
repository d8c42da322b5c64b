//! Triangle / TetGen `.node` and `.ele` files.
//!
//! `.node`: header `<#nodes> <dim> <#attributes> <#boundary markers>`, then
//! one line per node `<id> <coords...> [attributes...] [marker]`.
//! `.ele`: header `<#elements> <nodes per element> <#attributes>`, then
//! `<id> <v1> ... <vk> [attributes...]`. Anything after `#` is a comment.
//! Ids are 0- or 1-based, decided by the first node id.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::mesh::Mesh;

/// Node table as read from a `.node` file.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeTable {
    pub dim: usize,
    pub coords: Vec<f64>,
    /// `None` when the file carries no markers.
    pub markers: Option<Vec<i64>>,
    /// 0 or 1.
    pub base: usize,
}

impl NodeTable {
    pub fn n_nodes(&self) -> usize {
        self.coords.len() / self.dim
    }
}

/// `base.node` and `base.ele`.
pub fn mesh_paths(base: &Path) -> (PathBuf, PathBuf) {
    let with = |ext: &str| {
        let mut s = base.as_os_str().to_owned();
        s.push(ext);
        PathBuf::from(s)
    };
    (with(".node"), with(".ele"))
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        msg: e.to_string(),
    }
}

/// Non-empty, comment-stripped lines with their 1-based line numbers.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("");
        let toks: Vec<&str> = l.split_whitespace().collect();
        (!toks.is_empty()).then_some((i + 1, toks))
    })
}

struct Ctx<'a> {
    path: &'a Path,
}

impl Ctx<'_> {
    fn err(&self, line: usize, msg: impl Into<String>) -> Error {
        Error::Parse {
            path: self.path.to_path_buf(),
            line,
            msg: msg.into(),
        }
    }

    fn int(&self, line: usize, tok: &str) -> Result<i64> {
        tok.parse().map_err(|_| self.err(line, format!("expected an integer, got {tok:?}")))
    }

    fn count(&self, line: usize, tok: &str) -> Result<usize> {
        tok.parse().map_err(|_| self.err(line, format!("expected a count, got {tok:?}")))
    }

    fn float(&self, line: usize, tok: &str) -> Result<f64> {
        match tok.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(self.err(line, format!("expected a finite number, got {tok:?}"))),
        }
    }
}

/// Parses the text of a `.node` file. `path` is only used in errors.
pub fn parse_node(text: &str, path: &Path) -> Result<NodeTable> {
    let cx = Ctx { path };
    let mut lines = data_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| cx.err(0, "empty node file"))?;
    if header.len() < 2 || header.len() > 4 {
        return Err(cx.err(hl, "node header needs <#nodes> <dim> [<#attributes> [<#markers>]]"));
    }
    let n = cx.count(hl, header[0])?;
    let dim = cx.count(hl, header[1])?;
    let n_attr = header.get(2).map_or(Ok(0), |t| cx.count(hl, t))?;
    let n_mark = header.get(3).map_or(Ok(0), |t| cx.count(hl, t))?;
    if n == 0 {
        return Err(cx.err(hl, "node file declares no nodes"));
    }
    if !(2..=3).contains(&dim) {
        return Err(cx.err(hl, format!("unsupported dimension {dim}")));
    }
    if n_mark > 1 {
        return Err(cx.err(hl, format!("at most one boundary marker per node, got {n_mark}")));
    }
    let width = 1 + dim + n_attr + n_mark;
    let mut coords = Vec::with_capacity(n * dim);
    let mut markers = Vec::with_capacity(if n_mark > 0 { n } else { 0 });
    let mut base = 0;
    for k in 0..n {
        let (ln, toks) = lines
            .next()
            .ok_or_else(|| cx.err(0, format!("expected {n} nodes, found {k}")))?;
        if toks.len() != width {
            return Err(cx.err(ln, format!("expected {width} fields, got {}", toks.len())));
        }
        let id = cx.int(ln, toks[0])?;
        if k == 0 {
            base = match id {
                0 | 1 => id as usize,
                _ => return Err(cx.err(ln, format!("first node id must be 0 or 1, got {id}"))),
            };
        }
        if id != (k + base) as i64 {
            return Err(cx.err(ln, format!("expected node id {}, got {id}", k + base)));
        }
        for t in &toks[1..=dim] {
            coords.push(cx.float(ln, t)?);
        }
        if n_mark == 1 {
            markers.push(cx.int(ln, toks[width - 1])?);
        }
    }
    if let Some((ln, _)) = lines.next() {
        return Err(cx.err(ln, "unexpected data after the last node"));
    }
    Ok(NodeTable {
        dim,
        coords,
        markers: (n_mark == 1).then_some(markers),
        base,
    })
}

/// Parses the text of an `.ele` file into 0-based connectivity.
pub fn parse_ele(text: &str, path: &Path, nodes: &NodeTable) -> Result<Vec<usize>> {
    let cx = Ctx { path };
    let mut lines = data_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| cx.err(0, "empty element file"))?;
    if header.len() < 2 || header.len() > 3 {
        return Err(cx.err(hl, "element header needs <#elements> <nodes per element> [<#attributes>]"));
    }
    let n = cx.count(hl, header[0])?;
    let k = cx.count(hl, header[1])?;
    let n_attr = header.get(2).map_or(Ok(0), |t| cx.count(hl, t))?;
    if n == 0 {
        return Err(cx.err(hl, "element file declares no elements"));
    }
    if k != nodes.dim + 1 {
        return Err(cx.err(
            hl,
            format!("a {}D mesh needs {} nodes per element, got {k}", nodes.dim, nodes.dim + 1),
        ));
    }
    let n_nodes = nodes.n_nodes();
    let mut elements = Vec::with_capacity(n * k);
    for e in 0..n {
        let (ln, toks) = lines
            .next()
            .ok_or_else(|| cx.err(0, format!("expected {n} elements, found {e}")))?;
        if toks.len() != 1 + k + n_attr {
            return Err(cx.err(ln, format!("expected {} fields, got {}", 1 + k + n_attr, toks.len())));
        }
        for t in &toks[1..=k] {
            let v = cx.int(ln, t)?;
            let v0 = v - nodes.base as i64;
            if v0 < 0 || v0 as usize >= n_nodes {
                log::error!("{}:{ln}: node {v} out of range", path.display());
                return Err(Error::BadIndex {
                    element: e,
                    node: v.max(0) as usize,
                    n_nodes,
                });
            }
            elements.push(v0 as usize);
        }
    }
    if let Some((ln, _)) = lines.next() {
        return Err(cx.err(ln, "unexpected data after the last element"));
    }
    Ok(elements)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

/// Reads a node table on its own, e.g. one frame of a trajectory.
pub fn read_node_file(path: &Path) -> Result<NodeTable> {
    parse_node(&read(path)?, path)
}

/// Reads a mesh from a `.node`/`.ele` pair.
///
/// Nonzero markers flag boundary nodes; without markers the boundary is
/// inferred from facets that belong to a single element. Negatively
/// oriented elements are flipped with a warning.
pub fn read_mesh(node_path: &Path, ele_path: &Path) -> Result<Mesh> {
    let nodes = read_node_file(node_path)?;
    let elements = parse_ele(&read(ele_path)?, ele_path, &nodes)?;
    build(nodes, elements)
}

/// [`read_mesh`] on `base.node` and `base.ele`.
pub fn read_mesh_base(base: &Path) -> Result<Mesh> {
    let (n, e) = mesh_paths(base);
    read_mesh(&n, &e)
}

fn build(nodes: NodeTable, elements: Vec<usize>) -> Result<Mesh> {
    let n = nodes.n_nodes();
    let boundary = match &nodes.markers {
        Some(m) => m.iter().map(|&v| v != 0).collect(),
        None => vec![false; n],
    };
    let mut mesh = Mesh::new(nodes.dim, nodes.coords, elements, boundary)?;
    if nodes.markers.is_none() {
        mesh = mesh.with_boundary(mesh.infer_boundary())?;
    }
    let flipped = mesh.reorient();
    if flipped > 0 {
        log::warn!("reoriented {flipped} negatively oriented elements");
    }
    Ok(mesh)
}

/// Text of a `.node` file with 0-based ids and one marker column.
/// Coordinates use shortest round-trip formatting.
pub fn format_node(mesh: &Mesh) -> String {
    let d = mesh.dim();
    let mut s = format!("{} {d} 0 1\n", mesh.n_nodes());
    for i in 0..mesh.n_nodes() {
        s.push_str(&i.to_string());
        for x in mesh.point(i) {
            s.push_str(&format!(" {x:?}"));
        }
        s.push_str(if mesh.is_boundary(i) { " 1\n" } else { " 0\n" });
    }
    s
}

/// Text of an `.ele` file with 0-based ids.
pub fn format_ele(mesh: &Mesh) -> String {
    let mut s = format!("{} {} 0\n", mesh.n_elements(), mesh.nodes_per_element());
    for (e, el) in mesh.elements().enumerate() {
        s.push_str(&e.to_string());
        for v in el {
            s.push_str(&format!(" {v}"));
        }
        s.push('\n');
    }
    s
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| io_err(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| io_err(path, e))
}

pub fn write_mesh(mesh: &Mesh, node_path: &Path, ele_path: &Path) -> Result<()> {
    write_file(node_path, &format_node(mesh))?;
    write_file(ele_path, &format_ele(mesh))
}

/// [`write_mesh`] to `base.node` and `base.ele`.
pub fn write_mesh_base(mesh: &Mesh, base: &Path) -> Result<()> {
    let (n, e) = mesh_paths(base);
    write_mesh(mesh, &n, &e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::gen_annulus;

    fn parse(node: &str, ele: &str) -> Result<Mesh> {
        let p = Path::new("t");
        let nodes = parse_node(node, p)?;
        let el = parse_ele(ele, p, &nodes)?;
        build(nodes, el)
    }

    const NODE: &str = "# three nodes\n3 2 0 1\n1 0 0 1\n2 1 0 1\n3 0 1 1\n";

    #[test]
    fn one_triangle_one_based() {
        let m = parse(NODE, "1 3 0\n1 1 2 3\n").unwrap();
        assert_eq!(m.n_elements(), 1);
        assert_eq!(m.element(0), &[0, 1, 2]);
        assert_eq!(m.n_boundary(), 3);
    }

    #[test]
    fn zero_based_autodetect() {
        let nodes = parse_node("3 2 0 0\n0 0 0\n1 1 0\n2 0 1\n", Path::new("t")).unwrap();
        assert_eq!(nodes.base, 0);
        assert!(nodes.markers.is_none());
    }

    #[test]
    fn missing_markers_infers_boundary() {
        let m = gen_annulus(0.5, 4, 12).unwrap();
        let node: String = format_node(&m)
            .lines()
            .enumerate()
            .map(|(i, l)| {
                let toks: Vec<&str> = l.split_whitespace().collect();
                if i == 0 {
                    format!("{} 2 0 0\n", toks[0])
                } else {
                    format!("{}\n", toks[..3].join(" "))
                }
            })
            .collect();
        let back = parse(&node, &format_ele(&m)).unwrap();
        assert_eq!(back.boundary_markers(), m.boundary_markers());
    }

    #[test]
    fn out_of_range_node_is_bad_index() {
        let node: String = std::iter::once("10 2 0 0\n".to_string())
            .chain((1..=10).map(|i| format!("{i} {i} {}\n", i * i)))
            .collect();
        let r = parse(&node, "1 3 0\n1 1 2 999\n");
        assert!(matches!(r, Err(Error::BadIndex { node: 999, element: 0, .. })));
    }

    #[test]
    fn malformed_line_reports_its_number() {
        let r = parse_node("3 2 0 1\n1 0 0 1\n2 one 0 1\n3 0 1 1\n", Path::new("x.node"));
        assert!(matches!(r, Err(Error::Parse { line: 3, .. })), "{r:?}");
        let r = parse_node("3 2 0 1\n1 0 0 1\n2 1 0\n3 0 1 1\n", Path::new("x.node"));
        assert!(matches!(r, Err(Error::Parse { line: 3, .. })), "{r:?}");
    }

    #[test]
    fn empty_files_are_parse_errors() {
        assert!(matches!(parse_node("", Path::new("t")), Err(Error::Parse { .. })));
        assert!(matches!(parse_node("# nothing\n\n", Path::new("t")), Err(Error::Parse { .. })));
        assert!(matches!(parse_node("0 2 0 0\n", Path::new("t")), Err(Error::Parse { .. })));
        let nodes = parse_node(NODE, Path::new("t")).unwrap();
        assert!(matches!(parse_ele("0 3 0\n", Path::new("t"), &nodes), Err(Error::Parse { .. })));
    }

    #[test]
    fn wrong_element_arity() {
        let r = parse(NODE, "1 4 0\n1 1 2 3 1\n");
        assert!(matches!(r, Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn reversed_elements_are_reoriented() {
        let m = parse(NODE, "1 3 0\n1 1 3 2\n").unwrap();
        assert!(m.signed_measure(0) > 0.0);
    }

    #[test]
    fn round_trip_is_bitwise() {
        let mut m = gen_annulus(0.37, 5, 17).unwrap();
        let c: Vec<f64> = m.coords().iter().map(|x| x * std::f64::consts::PI / 3.0).collect();
        m = m.with_coords(c).unwrap();
        let back = parse(&format_node(&m), &format_ele(&m)).unwrap();
        assert_eq!(back, m);
    }
}
