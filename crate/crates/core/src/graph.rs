//! Labeled multigraphs, two-terminal gadgets, and the edge-substitution builder.
//!
//! Vertices are `0..n`. Edges are unordered pairs stored as `(a, b)` with
//! `a < b`, kept sorted so equal multigraphs compare and serialize identically.
//! Parallel edges are repeated pairs; self-loops are rejected.

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("a graph needs at least one vertex")]
    NoVertices,
    #[error("edge ({a}, {b}) references a vertex outside 0..{n}")]
    VertexOutOfRange { a: usize, b: usize, n: usize },
    #[error("self-loop at vertex {0} is not allowed")]
    SelfLoop(usize),
    #[error("gadget terminals must be distinct valid vertices, got u = {u}, v = {v}")]
    BadTerminals { u: usize, v: usize },
    #[error("gadget terminals are adjacent, so the substituted graph would not be simple")]
    AdjacentTerminals,
    #[error("gadget graph has parallel edges, so the substituted graph would not be simple")]
    NonSimpleGadget,
    #[error("gadget graph is disconnected")]
    DisconnectedGadget,
    #[error("host graph is disconnected")]
    DisconnectedHost,
    #[error("{what} must be at least {min}, got {got}")]
    TooSmall { what: &'static str, min: usize, got: usize },
    #[error("enumeration is limited to at most 6 vertices, got {0}")]
    EnumerationTooLarge(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Union-find over `0..n` with union by size and path halving.
#[derive(Debug, Clone)]
pub struct Dsu {
    parent: Vec<usize>,
    size: Vec<usize>,
    components: usize,
}

impl Dsu {
    pub fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect(), size: vec![1; n], components: n }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.components -= 1;
        true
    }

    pub fn components(&self) -> usize {
        self.components
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Multigraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Multigraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::NoVertices);
        }
        let mut out = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(GraphError::VertexOutOfRange { a, b, n });
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            out.push((a.min(b), a.max(b)));
        }
        out.sort_unstable();
        Ok(Multigraph { n, edges: out })
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn component_count(&self) -> usize {
        let mut dsu = Dsu::new(self.n);
        for &(a, b) in &self.edges {
            dsu.union(a, b);
        }
        dsu.components()
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() == 1
    }

    /// No parallel edges (loops cannot occur).
    pub fn is_simple(&self) -> bool {
        self.edges.windows(2).all(|w| w[0] != w[1])
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.binary_search(&(a.min(b), a.max(b))).is_ok()
    }

    /// The complete graph `K_n`.
    pub fn complete(n: usize) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::TooSmall { what: "complete graph order", min: 1, got: n });
        }
        Multigraph::new(n, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))))
    }

    /// `n` vertices joined in cyclic order; `cycle(2)` is a pair of parallel edges.
    pub fn cycle(n: usize) -> Result<Self, GraphError> {
        Self::bundle_cycle(n, 1)
    }

    /// A cycle on `n` vertices with every edge replaced by `b` parallel edges.
    pub fn bundle_cycle(n: usize, b: usize) -> Result<Self, GraphError> {
        if n < 2 {
            return Err(GraphError::TooSmall { what: "cycle length", min: 2, got: n });
        }
        if b == 0 {
            return Err(GraphError::TooSmall { what: "bundle size", min: 1, got: b });
        }
        Multigraph::new(n, (0..n).flat_map(|i| std::iter::repeat_n((i, (i + 1) % n), b)))
    }

    /// The path `0 - 1 - ... - (n-1)`.
    pub fn path(n: usize) -> Result<Self, GraphError> {
        Multigraph::new(n, (1..n).map(|i| (i - 1, i)))
    }

    /// Star with center 0 and `n - 1` leaves.
    pub fn star(n: usize) -> Result<Self, GraphError> {
        Multigraph::new(n, (1..n).map(|i| (0, i)))
    }

    /// Graph text form: `n m`, then one `a b` line per edge.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.edges.len());
        for (a, b) in &self.edges {
            let _ = writeln!(s, "{a} {b}");
        }
        s
    }
}

/// A multigraph with two distinguished terminals `u`, `v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Gadget {
    graph: Multigraph,
    u: usize,
    v: usize,
}

impl Gadget {
    pub fn new(graph: Multigraph, u: usize, v: usize) -> Result<Self, GraphError> {
        if u == v || u >= graph.n_vertices() || v >= graph.n_vertices() {
            return Err(GraphError::BadTerminals { u, v });
        }
        Ok(Gadget { graph, u, v })
    }

    /// `H_n`: `K_n` minus the edge between its terminals (vertices 0 and 1).
    /// `H_2` is two isolated terminals.
    pub fn hn(n: usize) -> Result<Self, GraphError> {
        if n < 2 {
            return Err(GraphError::TooSmall { what: "gadget index", min: 2, got: n });
        }
        let edges = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).filter(|&e| e != (0, 1));
        Gadget::new(Multigraph::new(n, edges)?, 0, 1)
    }

    pub fn graph(&self) -> &Multigraph {
        &self.graph
    }

    pub fn terminals(&self) -> (usize, usize) {
        (self.u, self.v)
    }

    pub fn terminals_adjacent(&self) -> bool {
        self.graph.has_edge(self.u, self.v)
    }

    pub fn to_text(&self) -> String {
        let mut s = self.graph.to_text();
        let _ = writeln!(s, "terminals {} {}", self.u, self.v);
        s
    }
}

/// `G[H]`: every edge `ab` of `g` (with `a < b`) becomes a fresh copy of `h`
/// whose `u` is identified with `a` and `v` with `b`.
///
/// Vertices of `g` keep their labels; the internal vertices of the copy for
/// edge `i` are numbered from `|V(G)| + i * (|V(H)| - 2)` in increasing order.
pub fn edge_substitute(g: &Multigraph, h: &Gadget) -> Result<Multigraph, GraphError> {
    if !g.is_connected() {
        return Err(GraphError::DisconnectedHost);
    }
    if !h.graph.is_connected() {
        return Err(GraphError::DisconnectedGadget);
    }
    let inner = h.graph.n_vertices() - 2;
    let mut local = vec![usize::MAX; h.graph.n_vertices()];
    let mut next = 0;
    for (x, slot) in local.iter_mut().enumerate() {
        if x != h.u && x != h.v {
            *slot = next;
            next += 1;
        }
    }
    let n = g.n_vertices() + g.edge_count() * inner;
    let mut edges = Vec::with_capacity(g.edge_count() * h.graph.edge_count());
    for (i, &(a, b)) in g.edges().iter().enumerate() {
        let base = g.n_vertices() + i * inner;
        let map = |x: usize| {
            if x == h.u {
                a
            } else if x == h.v {
                b
            } else {
                base + local[x]
            }
        };
        edges.extend(h.graph.edges().iter().map(|&(x, y)| (map(x), map(y))));
    }
    Multigraph::new(n, edges)
}

/// Like [`edge_substitute`], but guarantees a simple result by requiring a
/// simple gadget with nonadjacent terminals.
pub fn edge_substitute_simple(g: &Multigraph, h: &Gadget) -> Result<Multigraph, GraphError> {
    if h.terminals_adjacent() {
        return Err(GraphError::AdjacentTerminals);
    }
    if !h.graph.is_simple() {
        return Err(GraphError::NonSimpleGadget);
    }
    edge_substitute(g, h)
}

/// Vertex and edge counts of `G[H]` without building it.
pub fn substituted_size(g_vertices: usize, g_edges: usize, h_vertices: usize, h_edges: usize) -> (usize, usize) {
    (g_vertices + g_edges * (h_vertices - 2), g_edges * h_edges)
}

/// Every connected simple labeled graph on `2..=n_max` vertices.
pub fn enumerate_connected_simple(n_max: usize) -> Result<Vec<Multigraph>, GraphError> {
    if n_max > 6 {
        return Err(GraphError::EnumerationTooLarge(n_max));
    }
    let mut out = Vec::new();
    for n in 2..=n_max {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        for mask in 0u32..(1 << pairs.len()) {
            let edges = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e);
            let g = Multigraph::new(n, edges)?;
            if g.is_connected() {
                out.push(g);
            }
        }
    }
    Ok(out)
}

/// Either a plain graph or a gadget, as read from the text format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphFile {
    Graph(Multigraph),
    Gadget(Gadget),
}

impl GraphFile {
    pub fn graph(&self) -> &Multigraph {
        match self {
            GraphFile::Graph(g) => g,
            GraphFile::Gadget(h) => h.graph(),
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            GraphFile::Graph(g) => g.to_text(),
            GraphFile::Gadget(h) => h.to_text(),
        }
    }
}

fn parse_pair(line: &str, lineno: usize) -> Result<(usize, usize), GraphError> {
    let err = |msg: &str| GraphError::Parse { line: lineno, msg: msg.to_string() };
    let mut it = line.split(' ');
    let a = it.next().ok_or_else(|| err("expected two integers"))?;
    let b = it.next().ok_or_else(|| err("expected two integers"))?;
    if it.next().is_some() {
        return Err(err("expected exactly two integers"));
    }
    let a = a.parse().map_err(|_| err(&format!("bad integer `{a}`")))?;
    let b = b.parse().map_err(|_| err(&format!("bad integer `{b}`")))?;
    Ok((a, b))
}

/// Parses the graph text format. Edge lines must satisfy `0 <= a < b < n`.
pub fn parse_graph(text: &str) -> Result<GraphFile, GraphError> {
    let err = |line: usize, msg: String| GraphError::Parse { line, msg };
    let body = text.strip_suffix('\n').unwrap_or(text);
    let lines: Vec<&str> = body.split('\n').collect();
    let header = lines.first().copied().unwrap_or("");
    if header.is_empty() {
        return Err(err(1, "missing header `n m`".into()));
    }
    let (n, m) = parse_pair(header, 1)?;
    if n == 0 {
        return Err(err(1, "vertex count must be positive".into()));
    }
    if lines.len() < m + 1 {
        return Err(err(lines.len() + 1, format!("expected {m} edge lines, found {}", lines.len() - 1)));
    }
    let mut edges = Vec::with_capacity(m);
    for (i, line) in lines[1..=m].iter().enumerate() {
        let lineno = i + 2;
        let (a, b) = parse_pair(line, lineno)?;
        if !(a < b && b < n) {
            return Err(err(lineno, format!("edge `{a} {b}` must satisfy 0 <= a < b < {n}")));
        }
        edges.push((a, b));
    }
    let graph = Multigraph::new(n, edges)?;
    match &lines[m + 1..] {
        [] => Ok(GraphFile::Graph(graph)),
        [t] => {
            let lineno = m + 2;
            let rest = t
                .strip_prefix("terminals ")
                .ok_or_else(|| err(lineno, format!("unexpected line `{t}`")))?;
            let (u, v) = parse_pair(rest, lineno)?;
            Ok(GraphFile::Gadget(Gadget::new(graph, u, v)?))
        }
        _ => Err(err(m + 3, "trailing content after graph".into())),
    }
}
