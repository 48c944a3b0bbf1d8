//! Ground-truth route generation: A* with a Euclidean heuristic (Dijkstra
//! when the heuristic is scaled to zero), corpus sampling, and the
//! line-oriented dataset format.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::ndmath::rng::{det_rng, pick, shuffle};
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::collections::BTreeMap;
use std::io::{BufRead, Write};

/// A route with its total geometric cost.
#[derive(Debug, Clone, PartialEq)]
pub struct RoutePath {
    pub nodes: Vec<u32>,
    pub cost: f64,
}

impl RoutePath {
    pub fn hops(&self) -> usize {
        self.nodes.len().saturating_sub(1)
    }

    pub fn src(&self) -> u32 {
        self.nodes[0]
    }

    pub fn dst(&self) -> u32 {
        *self.nodes.last().expect("non-empty route")
    }

    /// Revalidate against a graph: every hop is an edge and the stored cost
    /// matches the recomputed sum to 1e-12 relative.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        let recomputed = path_cost(g, &self.nodes).ok_or_else(|| {
            Error::Structural(format!(
                "route {:?} contains a hop that is not an edge",
                self.nodes
            ))
        })?;
        if (self.cost - recomputed).abs() > 1e-12 * recomputed.abs().max(1.0) {
            return Err(Error::Structural(format!(
                "route cost {} disagrees with recomputed {}",
                self.cost, recomputed
            )));
        }
        Ok(())
    }
}

/// Train/test split of generated routes.
#[derive(Debug, Clone, PartialEq)]
pub struct RouteDataset {
    pub train: Vec<RoutePath>,
    pub test: Vec<RoutePath>,
    pub seed: u64,
    pub split_fraction: f64,
}

impl RouteDataset {
    pub fn len(&self) -> usize {
        self.train.len() + self.test.len()
    }

    pub fn is_empty(&self) -> bool {
        self.train.is_empty() && self.test.is_empty()
    }

    pub fn all_routes(&self) -> impl Iterator<Item = &RoutePath> {
        self.train.iter().chain(self.test.iter())
    }

    pub fn mean_hops(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        let total: usize = self.all_routes().map(|r| r.hops()).sum();
        total as f64 / self.len() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Frontier {
    f: f64,
    node: u32,
}

impl Eq for Frontier {}

// BinaryHeap is a max-heap; order reversed so we pop the smallest f, ties
// broken by the smaller node id.
impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Minimum-cost path from `src` to `dst`, or `None` when unreachable.
///
/// The heuristic is `heuristic_scale * euclid(n, dst)`; scale 0 is exactly
/// Dijkstra, scale 1 the admissible A* used for corpus generation.
pub fn astar_search(
    g: &Graph,
    src: u32,
    dst: u32,
    heuristic_scale: f64,
) -> Result<Option<RoutePath>> {
    let n = g.num_nodes();
    if src as usize >= n || dst as usize >= n {
        return Err(Error::Domain(format!("invalid node id in pair ({src},{dst})")));
    }
    if !(heuristic_scale >= 0.0) || !heuristic_scale.is_finite() {
        return Err(Error::Domain(format!("heuristic scale must be finite and >= 0, got {heuristic_scale}")));
    }
    if src == dst {
        return Ok(Some(RoutePath { nodes: vec![src], cost: 0.0 }));
    }
    let goal = *g.node(dst)?;
    let h = |id: u32| -> f64 {
        if heuristic_scale == 0.0 {
            0.0
        } else {
            heuristic_scale * crate::graph::euclid(g.node(id).expect("valid id"), &goal)
        }
    };

    let mut dist = vec![f64::INFINITY; n];
    let mut parent = vec![u32::MAX; n];
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[src as usize] = 0.0;
    heap.push(Frontier { f: h(src), node: src });

    while let Some(Frontier { node, .. }) = heap.pop() {
        if settled[node as usize] {
            continue;
        }
        settled[node as usize] = true;
        if node == dst {
            let mut nodes = vec![dst];
            let mut cur = dst;
            while cur != src {
                cur = parent[cur as usize];
                nodes.push(cur);
            }
            nodes.reverse();
            return Ok(Some(RoutePath { nodes, cost: dist[dst as usize] }));
        }
        let g_cur = dist[node as usize];
        for &(next, w) in g.neighbors(node)? {
            if settled[next as usize] {
                continue;
            }
            let cand = g_cur + w;
            if cand < dist[next as usize] {
                dist[next as usize] = cand;
                parent[next as usize] = node;
                heap.push(Frontier { f: cand + h(next), node: next });
            }
        }
    }
    Ok(None)
}

/// Total weight of a node sequence, or `None` if the list is empty or any
/// consecutive pair is not an edge.
pub fn path_cost(g: &Graph, nodes: &[u32]) -> Option<f64> {
    if nodes.is_empty() {
        return None;
    }
    if nodes.iter().any(|&u| u as usize >= g.num_nodes()) {
        return None;
    }
    let mut total = 0.0;
    for pair in nodes.windows(2) {
        total += g.weight(pair[0], pair[1])?;
    }
    Some(total)
}

/// Sample `n_routes` A* shortest routes between uniformly drawn distinct
/// node pairs, rejecting unreachable pairs and routes shorter than 2 hops.
///
/// Pair draws come from the stream seeded with `seed`; the train/test split
/// shuffle uses `seed + 1`.
pub fn generate_dataset(
    g: &Graph,
    n_routes: usize,
    split_fraction: f64,
    seed: u64,
) -> Result<RouteDataset> {
    if g.num_nodes() < 2 {
        return Err(Error::Domain("dataset generation needs at least 2 nodes".into()));
    }
    if n_routes == 0 {
        return Err(Error::Domain("n_routes must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&split_fraction) {
        return Err(Error::Domain(format!(
            "split fraction must lie in [0,1], got {split_fraction}"
        )));
    }
    let budget = 100usize.saturating_mul(n_routes);
    let mut draw_rng = det_rng(seed);
    let n = g.num_nodes();
    let mut routes = Vec::with_capacity(n_routes);
    let mut draws = 0usize;
    while routes.len() < n_routes {
        if draws >= budget {
            return Err(Error::Generation(format!(
                "accepted only {} of {} routes within a {budget}-draw budget; \
                 graph too fragmented",
                routes.len(),
                n_routes
            )));
        }
        draws += 1;
        let src = pick(&mut draw_rng, n) as u32;
        let dst = pick(&mut draw_rng, n) as u32;
        if src == dst {
            continue;
        }
        if let Some(path) = astar_search(g, src, dst, 1.0)? {
            if path.hops() >= 2 {
                routes.push(path);
            }
        }
    }

    let mut order: Vec<usize> = (0..n_routes).collect();
    let mut split_rng = det_rng(seed.wrapping_add(1));
    shuffle(&mut split_rng, &mut order);
    let n_train = (split_fraction * n_routes as f64).ceil() as usize;
    let mut train = Vec::with_capacity(n_train);
    let mut test = Vec::with_capacity(n_routes - n_train);
    let mut taken: Vec<Option<RoutePath>> = routes.into_iter().map(Some).collect();
    for (k, idx) in order.into_iter().enumerate() {
        let route = taken[idx].take().expect("route taken once");
        if k < n_train {
            train.push(route);
        } else {
            test.push(route);
        }
    }
    Ok(RouteDataset { train, test, seed, split_fraction })
}

/// Hop-count histogram over the whole dataset (train + test).
pub fn hop_histogram(ds: &RouteDataset) -> BTreeMap<usize, usize> {
    let mut map = BTreeMap::new();
    for r in ds.all_routes() {
        *map.entry(r.hops()).or_insert(0) += 1;
    }
    map
}

pub fn write_hop_histogram<W: Write>(hist: &BTreeMap<usize, usize>, mut w: W) -> Result<()> {
    writeln!(w, "hops,count")?;
    for (hops, count) in hist {
        writeln!(w, "{hops},{count}")?;
    }
    Ok(())
}

/// Line-oriented dataset format:
/// `# seed=<s> split=<f> n=<n>` then one `TRAIN|TEST <cost> <id0> <id1> ...`
/// per route, cost at 17 significant digits.
pub fn write_dataset<W: Write>(ds: &RouteDataset, mut w: W) -> Result<()> {
    writeln!(w, "# seed={} split={} n={}", ds.seed, ds.split_fraction, ds.len())?;
    for (tag, routes) in [("TRAIN", &ds.train), ("TEST", &ds.test)] {
        for r in routes {
            write!(w, "{tag} {:.16e}", r.cost)?;
            for id in &r.nodes {
                write!(w, " {id}")?;
            }
            writeln!(w)?;
        }
    }
    Ok(())
}

/// Parse a dataset without validating against a graph (rank analysis only
/// needs the endpoints). Use [`read_dataset`] when a graph is available.
pub fn read_dataset_unchecked<R: BufRead>(r: R) -> Result<RouteDataset> {
    let mut lines = r.lines().enumerate();
    let (no, header) = lines
        .next()
        .ok_or(Error::Parse { line: 1, msg: "empty dataset file".into() })?;
    let header = header?;
    let mut seed = None;
    let mut split = None;
    let mut n = None;
    if !header.starts_with('#') {
        return Err(Error::Parse { line: no + 1, msg: "missing `# seed=... split=... n=...` header".into() });
    }
    for field in header.trim_start_matches('#').split_whitespace() {
        if let Some(v) = field.strip_prefix("seed=") {
            seed = Some(v.parse::<u64>().map_err(|_| Error::Parse {
                line: no + 1,
                msg: format!("bad seed `{v}`"),
            })?);
        } else if let Some(v) = field.strip_prefix("split=") {
            split = Some(v.parse::<f64>().map_err(|_| Error::Parse {
                line: no + 1,
                msg: format!("bad split `{v}`"),
            })?);
        } else if let Some(v) = field.strip_prefix("n=") {
            n = Some(v.parse::<usize>().map_err(|_| Error::Parse {
                line: no + 1,
                msg: format!("bad n `{v}`"),
            })?);
        }
    }
    let (seed, split_fraction, n) = match (seed, split, n) {
        (Some(s), Some(f), Some(n)) => (s, f, n),
        _ => {
            return Err(Error::Parse {
                line: no + 1,
                msg: "header must carry seed=, split=, n=".into(),
            })
        }
    };

    let mut train = Vec::new();
    let mut test = Vec::new();
    for (no, line) in lines {
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        let mut parts = text.split_whitespace();
        let tag = parts.next().unwrap();
        let cost: f64 = parts
            .next()
            .ok_or(Error::Parse { line: no + 1, msg: "missing cost".into() })?
            .parse()
            .map_err(|_| Error::Parse { line: no + 1, msg: "bad cost".into() })?;
        let nodes: Vec<u32> = parts
            .map(|p| {
                p.parse::<u32>()
                    .map_err(|_| Error::Parse { line: no + 1, msg: format!("bad node id `{p}`") })
            })
            .collect::<Result<_>>()?;
        if nodes.len() < 2 {
            return Err(Error::Parse { line: no + 1, msg: "route needs at least 2 nodes".into() });
        }
        let route = RoutePath { nodes, cost };
        match tag {
            "TRAIN" => train.push(route),
            "TEST" => test.push(route),
            other => {
                return Err(Error::Parse {
                    line: no + 1,
                    msg: format!("route tag must be TRAIN or TEST, got `{other}`"),
                })
            }
        }
    }
    if train.len() + test.len() != n {
        return Err(Error::Structural(format!(
            "header declares n={n} routes, file carries {}",
            train.len() + test.len()
        )));
    }
    Ok(RouteDataset { train, test, seed, split_fraction })
}

/// Parse and revalidate every route against the graph.
pub fn read_dataset<R: BufRead>(r: R, g: &Graph) -> Result<RouteDataset> {
    let ds = read_dataset_unchecked(r)?;
    for route in ds.all_routes() {
        route.validate(g)?;
    }
    Ok(ds)
}
