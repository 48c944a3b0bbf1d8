//! Road graph: intersections with geographic coordinates, undirected edges
//! weighted by Euclidean distance in raw degree coordinates.
//!
//! The same metric backs both edge weights and the search heuristic, which
//! keeps the heuristic admissible.

use crate::error::{Error, Result};
use std::collections::BTreeSet;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoNode {
    pub id: u32,
    pub lon: f64,
    pub lat: f64,
}

pub fn euclid(a: &GeoNode, b: &GeoNode) -> f64 {
    let dx = a.lon - b.lon;
    let dy = a.lat - b.lat;
    (dx * dx + dy * dy).sqrt()
}

/// Immutable after construction; safe to share read-only across workers.
#[derive(Debug, Clone)]
pub struct Graph {
    nodes: Vec<GeoNode>,
    /// Canonical edge list, u < v, sorted ascending.
    edges: Vec<(u32, u32)>,
    /// Adjacency with precomputed weights, neighbor ids ascending.
    adj: Vec<Vec<(u32, f64)>>,
}

/// What the loader dropped or merged while cleaning the raw listing.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadStats {
    pub self_loops_dropped: usize,
    pub duplicates_merged: usize,
    pub zero_weight_dropped: usize,
}

impl Graph {
    /// Build a graph from nodes and edges, enforcing every invariant:
    /// valid endpoints, no self-loops, no duplicates, positive weights.
    pub fn new(nodes: Vec<GeoNode>, edges: Vec<(u32, u32)>) -> Result<Graph> {
        let n = nodes.len() as u32;
        for (k, node) in nodes.iter().enumerate() {
            if node.id != k as u32 {
                return Err(Error::Structural(format!(
                    "node ids must be dense 0..{n}, found {} at position {k}",
                    node.id
                )));
            }
            if !node.lon.is_finite() || !node.lat.is_finite() {
                return Err(Error::Structural(format!("node {} has non-finite coordinates", node.id)));
            }
        }
        let mut canon = Vec::with_capacity(edges.len());
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(Error::Structural(format!(
                    "edge ({u},{v}) references a node id >= node count {n}"
                )));
            }
            if u == v {
                return Err(Error::Structural(format!("self-loop at node {u}")));
            }
            canon.push((u.min(v), u.max(v)));
        }
        canon.sort_unstable();
        if canon.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Structural("duplicate edge".into()));
        }
        let mut adj: Vec<Vec<(u32, f64)>> = vec![Vec::new(); nodes.len()];
        for &(u, v) in &canon {
            let w = euclid(&nodes[u as usize], &nodes[v as usize]);
            if !(w > 0.0) {
                return Err(Error::Structural(format!(
                    "edge ({u},{v}) has non-positive weight {w}"
                )));
            }
            adj[u as usize].push((v, w));
            adj[v as usize].push((u, w));
        }
        for list in &mut adj {
            list.sort_unstable_by_key(|&(id, _)| id);
        }
        Ok(Graph { nodes, edges: canon, adj })
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> &[GeoNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn node(&self, id: u32) -> Result<&GeoNode> {
        self.nodes
            .get(id as usize)
            .ok_or_else(|| Error::Domain(format!("invalid node id {id}")))
    }

    /// Adjacent (node, weight) pairs in ascending-id order.
    pub fn neighbors(&self, u: u32) -> Result<&[(u32, f64)]> {
        self.adj
            .get(u as usize)
            .map(|v| v.as_slice())
            .ok_or_else(|| Error::Domain(format!("invalid node id {u}")))
    }

    pub fn weight(&self, u: u32, v: u32) -> Option<f64> {
        self.adj
            .get(u as usize)?
            .iter()
            .find(|&&(id, _)| id == v)
            .map(|&(_, w)| w)
    }

    /// Straight-line distance between two nodes.
    pub fn distance(&self, u: u32, v: u32) -> Result<f64> {
        Ok(euclid(self.node(u)?, self.node(v)?))
    }
}

/// Result of a bounding-box filter: the compacted subgraph plus the
/// old-id -> new-id mapping (None for dropped nodes).
#[derive(Debug, Clone)]
pub struct FilteredGraph {
    pub graph: Graph,
    pub old_to_new: Vec<Option<u32>>,
}

/// Keep exactly the nodes inside the closed box, retain edges whose both
/// endpoints survive, and compact ids to 0..M-1.
pub fn filter_bbox(
    g: &Graph,
    lon_min: f64,
    lon_max: f64,
    lat_min: f64,
    lat_max: f64,
) -> Result<FilteredGraph> {
    if !(lon_min < lon_max) || !(lat_min < lat_max) {
        return Err(Error::Domain(format!(
            "bounding box must satisfy lon_min < lon_max and lat_min < lat_max, \
             got [{lon_min},{lon_max}]x[{lat_min},{lat_max}]"
        )));
    }
    let mut old_to_new = vec![None; g.num_nodes()];
    let mut nodes = Vec::new();
    for node in g.nodes() {
        if node.lon >= lon_min && node.lon <= lon_max && node.lat >= lat_min && node.lat <= lat_max
        {
            let new_id = nodes.len() as u32;
            old_to_new[node.id as usize] = Some(new_id);
            nodes.push(GeoNode { id: new_id, lon: node.lon, lat: node.lat });
        }
    }
    if nodes.is_empty() {
        return Err(Error::Structural(
            "bounding box keeps no nodes; downstream stages need at least 2".into(),
        ));
    }
    let mut edges = Vec::new();
    for &(u, v) in g.edges() {
        if let (Some(nu), Some(nv)) = (old_to_new[u as usize], old_to_new[v as usize]) {
            edges.push((nu, nv));
        }
    }
    Ok(FilteredGraph { graph: Graph::new(nodes, edges)?, old_to_new })
}

/// Load a graph from a MatrixMarket coordinate-pattern adjacency listing and
/// a whitespace-separated `lon lat` coordinate listing (row k = node k).
pub fn load_graph(edge_path: &Path, coord_path: &Path) -> Result<(Graph, LoadStats)> {
    let edges = std::fs::File::open(edge_path)?;
    let coords = std::fs::File::open(coord_path)?;
    load_graph_from_readers(BufReader::new(edges), BufReader::new(coords))
}

pub fn load_graph_from_readers<E: BufRead, C: BufRead>(
    edge_source: E,
    coord_source: C,
) -> Result<(Graph, LoadStats)> {
    let (n_from_edges, raw_edges, mut stats) = parse_matrix_market_pattern(edge_source)?;
    let coords = parse_coords(coord_source)?;
    if coords.len() != n_from_edges {
        return Err(Error::Structural(format!(
            "node count mismatch: adjacency declares {n_from_edges}, coordinates give {}",
            coords.len()
        )));
    }
    let nodes: Vec<GeoNode> = coords
        .iter()
        .enumerate()
        .map(|(k, &(lon, lat))| GeoNode { id: k as u32, lon, lat })
        .collect();

    // Drop degenerate zero-length edges between coincident nodes, counting them.
    let mut edges = Vec::with_capacity(raw_edges.len());
    for (u, v) in raw_edges {
        if euclid(&nodes[u as usize], &nodes[v as usize]) > 0.0 {
            edges.push((u, v));
        } else {
            stats.zero_weight_dropped += 1;
        }
    }
    Ok((Graph::new(nodes, edges)?, stats))
}

/// Returns (node count, canonical deduplicated edges, stats).
fn parse_matrix_market_pattern<R: BufRead>(
    r: R,
) -> Result<(usize, Vec<(u32, u32)>, LoadStats)> {
    let mut stats = LoadStats::default();
    let mut lines = r.lines().enumerate();

    let (first_no, first) = lines
        .next()
        .ok_or_else(|| Error::Parse { line: 1, msg: "empty adjacency file".into() })?;
    let first = first?;
    if !first.starts_with("%%MatrixMarket") {
        return Err(Error::Parse {
            line: first_no + 1,
            msg: "expected header starting with %%MatrixMarket".into(),
        });
    }
    let fields: Vec<&str> = first.split_whitespace().collect();
    if fields.len() < 5
        || !fields[1].eq_ignore_ascii_case("matrix")
        || !fields[2].eq_ignore_ascii_case("coordinate")
        || !fields[3].eq_ignore_ascii_case("pattern")
    {
        return Err(Error::Parse {
            line: first_no + 1,
            msg: format!("expected `matrix coordinate pattern` header, got `{first}`"),
        });
    }
    if !fields[4].eq_ignore_ascii_case("symmetric") && !fields[4].eq_ignore_ascii_case("general") {
        return Err(Error::Parse {
            line: first_no + 1,
            msg: format!("unsupported symmetry `{}`", fields[4]),
        });
    }

    // size line: first non-comment, non-blank line
    let mut size: Option<(usize, usize)> = None;
    let mut entries: Vec<(u32, u32)> = Vec::new();
    let mut seen = BTreeSet::new();
    for (no, line) in lines {
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('%') {
            continue;
        }
        let parts: Vec<&str> = text.split_whitespace().collect();
        match size {
            None => {
                if parts.len() != 3 {
                    return Err(Error::Parse {
                        line: no + 1,
                        msg: format!("size line must be `M M NNZ`, got `{text}`"),
                    });
                }
                let m: usize = parse_field(parts[0], no + 1, "row count")?;
                let n: usize = parse_field(parts[1], no + 1, "column count")?;
                let nnz: usize = parse_field(parts[2], no + 1, "entry count")?;
                if m != n {
                    return Err(Error::Structural(format!(
                        "adjacency matrix must be square, got {m}x{n}"
                    )));
                }
                size = Some((m, nnz));
            }
            Some((m, nnz)) => {
                if parts.len() != 2 {
                    return Err(Error::Parse {
                        line: no + 1,
                        msg: format!("pattern entry must be `i j`, got `{text}`"),
                    });
                }
                let i: usize = parse_field(parts[0], no + 1, "row index")?;
                let j: usize = parse_field(parts[1], no + 1, "column index")?;
                if i < 1 || j < 1 {
                    return Err(Error::Parse {
                        line: no + 1,
                        msg: "MatrixMarket indices are 1-based".into(),
                    });
                }
                if i > m || j > m {
                    return Err(Error::Structural(format!(
                        "entry ({i},{j}) references a node id >= node count {m}"
                    )));
                }
                if entries.len() + stats.self_loops_dropped + stats.duplicates_merged >= nnz {
                    return Err(Error::Parse {
                        line: no + 1,
                        msg: format!("more than the declared {nnz} entries"),
                    });
                }
                let (u, v) = ((i - 1) as u32, (j - 1) as u32);
                if u == v {
                    stats.self_loops_dropped += 1;
                } else {
                    let key = (u.min(v), u.max(v));
                    if seen.insert(key) {
                        entries.push(key);
                    } else {
                        stats.duplicates_merged += 1;
                    }
                }
            }
        }
    }
    let (m, nnz) = size.ok_or(Error::Parse { line: 0, msg: "missing size line".into() })?;
    let consumed = entries.len() + stats.self_loops_dropped + stats.duplicates_merged;
    if consumed != nnz {
        return Err(Error::Structural(format!(
            "declared {nnz} entries but found {consumed}"
        )));
    }
    Ok((m, entries, stats))
}

fn parse_coords<R: BufRead>(r: R) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for (no, line) in r.lines().enumerate() {
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('%') {
            continue;
        }
        let parts: Vec<&str> = text.split_whitespace().collect();
        if parts.len() != 2 {
            return Err(Error::Parse {
                line: no + 1,
                msg: format!("coordinate line must be `lon lat`, got `{text}`"),
            });
        }
        let lon: f64 = parse_field(parts[0], no + 1, "longitude")?;
        let lat: f64 = parse_field(parts[1], no + 1, "latitude")?;
        if !lon.is_finite() || !lat.is_finite() {
            return Err(Error::Parse { line: no + 1, msg: "non-finite coordinate".into() });
        }
        out.push((lon, lat));
    }
    Ok(out)
}

fn parse_field<T: std::str::FromStr>(s: &str, line: usize, what: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::Parse { line, msg: format!("cannot parse {what} from `{s}`") })
}

/// Plain-text export: `num_nodes num_edges`, node lines `id lon lat`, edge
/// lines `u v weight`, floats at 17 significant digits.
pub fn write_graph_text<W: Write>(g: &Graph, mut w: W) -> Result<()> {
    writeln!(w, "{} {}", g.num_nodes(), g.num_edges())?;
    for n in g.nodes() {
        writeln!(w, "{} {:.16e} {:.16e}", n.id, n.lon, n.lat)?;
    }
    for &(u, v) in g.edges() {
        let weight = g.weight(u, v).expect("edge weight");
        writeln!(w, "{} {} {:.16e}", u, v, weight)?;
    }
    Ok(())
}

/// Read the text export back, revalidating stored weights against the
/// coordinates.
pub fn read_graph_text<R: BufRead>(r: R) -> Result<Graph> {
    let mut lines = r.lines().enumerate();
    let (no, first) = lines
        .next()
        .ok_or(Error::Parse { line: 1, msg: "empty graph file".into() })?;
    let first = first?;
    let head: Vec<&str> = first.split_whitespace().collect();
    if head.len() != 2 {
        return Err(Error::Parse {
            line: no + 1,
            msg: format!("expected `num_nodes num_edges`, got `{first}`"),
        });
    }
    let n_nodes: usize = parse_field(head[0], no + 1, "node count")?;
    let n_edges: usize = parse_field(head[1], no + 1, "edge count")?;
    let mut nodes = Vec::with_capacity(n_nodes);
    let mut edges = Vec::with_capacity(n_edges);
    for _ in 0..n_nodes {
        let (no, line) =
            lines.next().ok_or(Error::Parse { line: 0, msg: "missing node line".into() })?;
        let line = line?;
        let p: Vec<&str> = line.split_whitespace().collect();
        if p.len() != 3 {
            return Err(Error::Parse { line: no + 1, msg: format!("bad node line `{line}`") });
        }
        nodes.push(GeoNode {
            id: parse_field(p[0], no + 1, "node id")?,
            lon: parse_field(p[1], no + 1, "longitude")?,
            lat: parse_field(p[2], no + 1, "latitude")?,
        });
    }
    for _ in 0..n_edges {
        let (no, line) =
            lines.next().ok_or(Error::Parse { line: 0, msg: "missing edge line".into() })?;
        let line = line?;
        let p: Vec<&str> = line.split_whitespace().collect();
        if p.len() != 3 {
            return Err(Error::Parse { line: no + 1, msg: format!("bad edge line `{line}`") });
        }
        let u: u32 = parse_field(p[0], no + 1, "edge endpoint")?;
        let v: u32 = parse_field(p[1], no + 1, "edge endpoint")?;
        let stored: f64 = parse_field(p[2], no + 1, "edge weight")?;
        if (u as usize) < nodes.len() && (v as usize) < nodes.len() {
            let recomputed = euclid(&nodes[u as usize], &nodes[v as usize]);
            if (stored - recomputed).abs() > 1e-9 * recomputed.abs().max(1.0) {
                return Err(Error::Structural(format!(
                    "edge ({u},{v}) stored weight {stored} disagrees with coordinates ({recomputed})"
                )));
            }
        }
        edges.push((u, v));
    }
    Graph::new(nodes, edges)
}

pub fn read_graph_text_path(path: &Path) -> Result<Graph> {
    let f = std::fs::File::open(path)?;
    read_graph_text(BufReader::new(f))
}
