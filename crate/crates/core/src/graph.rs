//! Weighted interaction graphs: lattice and random generators, disorder,
//! and the edge-list / instance-JSON file formats.
//!
//! A [`Graph`] is always canonical: every edge is stored as `(i, j, w)` with
//! `i < j < n`, there are no duplicate pairs, weights are non-negative and the
//! edge list is sorted lexicographically by `(i, j)`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

/// A weighted edge `{i, j}` with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "(usize, usize, f64)", into = "(usize, usize, f64)")]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub w: f64,
}

impl Edge {
    pub fn new(i: usize, j: usize, w: f64) -> Self {
        Self { i, j, w }
    }

    /// True when the edge shares a vertex with `other`.
    pub fn touches(&self, other: &Edge) -> bool {
        self.i == other.i || self.i == other.j || self.j == other.i || self.j == other.j
    }
}

impl From<(usize, usize, f64)> for Edge {
    fn from((i, j, w): (usize, usize, f64)) -> Self {
        Self { i, j, w }
    }
}

impl From<Edge> for (usize, usize, f64) {
    fn from(e: Edge) -> Self {
        (e.i, e.j, e.w)
    }
}

/// Energy scaling conventions for Quantum Max Cut.
///
/// * `QmcMin`: minimize `-1/2 sum_e w_e (1 - x_e)`; the negated QMC objective.
/// * `VarBench`: the traceless Heisenberg form `H = sum_e w_e (XX + YY + ZZ)`.
///
/// The two are related through the total weight `W`:
/// `E_varbench = W + 4 E_qmc_min = 2 sum_e w_e x_e - W`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingConvention {
    QmcMin,
    #[serde(rename = "varbench")]
    VarBench,
}

impl ScalingConvention {
    pub fn name(self) -> &'static str {
        match self {
            ScalingConvention::QmcMin => "qmc_min",
            ScalingConvention::VarBench => "varbench",
        }
    }
}

impl std::str::FromStr for ScalingConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "qmc" | "qmc_min" | "qmc-min" => Ok(Self::QmcMin),
            "varbench" => Ok(Self::VarBench),
            other => Err(Error::InvalidParameter(format!("unknown scaling '{other}'"))),
        }
    }
}

/// Weighted interaction graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Graph {
    #[serde(default)]
    pub name: String,
    pub n: usize,
    pub edges: Vec<Edge>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub meta: Map<String, Value>,
}

impl Graph {
    /// Build a canonical graph from an arbitrary edge list.
    ///
    /// Edges `(j, i)` are flipped to `(i, j)`. Self-loops, duplicate pairs,
    /// out-of-range vertices and negative or non-finite weights are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Validation("graph must have at least one vertex".into()));
        }
        let mut out: Vec<Edge> = Vec::new();
        for e in edges {
            let (i, j) = if e.i <= e.j { (e.i, e.j) } else { (e.j, e.i) };
            if i == j {
                return Err(Error::Validation(format!("self-loop at vertex {i}")));
            }
            if j >= n {
                return Err(Error::Validation(format!("edge ({i},{j}) out of range for n={n}")));
            }
            if !e.w.is_finite() || e.w < 0.0 {
                return Err(Error::Validation(format!("edge ({i},{j}) has invalid weight {}", e.w)));
            }
            out.push(Edge::new(i, j, e.w));
        }
        out.sort_by(|a, b| (a.i, a.j).cmp(&(b.i, b.j)));
        if let Some(w) = out.windows(2).find(|w| (w[0].i, w[0].j) == (w[1].i, w[1].j)) {
            return Err(Error::Validation(format!("duplicate edge ({},{})", w[0].i, w[0].j)));
        }
        Ok(Self {
            name: String::new(),
            n,
            edges: out,
            coords: None,
            meta: Map::new(),
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_coords(mut self, coords: Vec<[f64; 2]>) -> Result<Self> {
        if coords.len() != self.n {
            return Err(Error::Validation(format!(
                "coords has {} entries, expected {}",
                coords.len(),
                self.n
            )));
        }
        self.coords = Some(coords);
        Ok(self)
    }

    /// Check every structural invariant. [`Graph::new`] establishes them;
    /// this is for values that arrive through deserialization.
    pub fn validate(&self) -> Result<()> {
        let canon = Graph::new(self.n, self.edges.iter().copied())?;
        if canon.edges != self.edges {
            return Err(Error::Validation("edges are not in canonical order".into()));
        }
        if let Some(c) = &self.coords {
            if c.len() != self.n {
                return Err(Error::Validation(format!(
                    "coords has {} entries, expected {}",
                    c.len(),
                    self.n
                )));
            }
        }
        Ok(())
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Total weight `W = sum_e w_e`.
    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    pub fn weight(&self, i: usize, j: usize) -> Option<f64> {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.edges
            .binary_search_by(|e| (e.i, e.j).cmp(&(i, j)))
            .ok()
            .map(|k| self.edges[k].w)
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.weight(i, j).is_some()
    }

    /// Adjacency lists (sorted).
    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.i].push(e.j);
            adj[e.j].push(e.i);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        adj
    }

    /// Relabel vertices with `perm[v]` as the new label of `v`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Graph> {
        if perm.len() != self.n {
            return Err(Error::InvalidParameter("permutation length differs from n".into()));
        }
        let edges = self.edges.iter().map(|e| Edge::new(perm[e.i], perm[e.j], e.w));
        let mut g = Graph::new(self.n, edges)?;
        g.name = self.name.clone();
        g.meta = self.meta.clone();
        if let Some(c) = &self.coords {
            let mut nc = vec![[0.0; 2]; self.n];
            for (v, &p) in perm.iter().enumerate() {
                nc[p] = c[v];
            }
            g.coords = Some(nc);
        }
        Ok(g)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Graph> {
        let g: Graph = serde_json::from_str(s)?;
        // Accept non-canonical edge order on input; re-canonicalize.
        let mut canon = Graph::new(g.n, g.edges.iter().copied())?;
        canon.name = g.name;
        canon.meta = g.meta;
        if let Some(c) = g.coords {
            canon = canon.with_coords(c)?;
        }
        Ok(canon)
    }

    pub fn save_json(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load_json(path: impl AsRef<Path>) -> Result<Graph> {
        Graph::from_json(&fs::read_to_string(path)?)
    }
}

/// Collects edges while collapsing repeated pairs; used by periodic generators
/// where wrap-around can produce the same bond twice on small tori.
#[derive(Default)]
struct EdgeSet {
    edges: BTreeMap<(usize, usize), f64>,
}

impl EdgeSet {
    fn insert(&mut self, a: usize, b: usize, w: f64) -> bool {
        if a == b {
            return false;
        }
        let key = if a < b { (a, b) } else { (b, a) };
        if self.edges.contains_key(&key) {
            return false;
        }
        self.edges.insert(key, w);
        true
    }

    fn into_edges(self) -> impl Iterator<Item = Edge> {
        self.edges.into_iter().map(|((i, j), w)| Edge::new(i, j, w))
    }
}

fn meta_of(pairs: &[(&str, Value)]) -> Map<String, Value> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

/// `L x L` square grid with unit weights. Vertex `(x, y)` has index `y L + x`.
///
/// With `periodic`, both directions wrap; on the `L = 2` torus the wrapped
/// bonds coincide with the direct ones and are collapsed.
pub fn gen_square(l: usize, periodic: bool) -> Result<Graph> {
    if l < 2 {
        return Err(Error::InvalidParameter(format!("square lattice needs L >= 2, got {l}")));
    }
    let idx = |x: usize, y: usize| y * l + x;
    let mut set = EdgeSet::default();
    for y in 0..l {
        for x in 0..l {
            if x + 1 < l {
                set.insert(idx(x, y), idx(x + 1, y), 1.0);
            } else if periodic {
                set.insert(idx(x, y), idx(0, y), 1.0);
            }
            if y + 1 < l {
                set.insert(idx(x, y), idx(x, y + 1), 1.0);
            } else if periodic {
                set.insert(idx(x, y), idx(x, 0), 1.0);
            }
        }
    }
    let coords = (0..l * l).map(|v| [(v % l) as f64, (v / l) as f64]).collect();
    let mut g = Graph::new(l * l, set.into_edges())?
        .with_name(format!("square{}", l * l))
        .with_coords(coords)?;
    g.meta = meta_of(&[
        ("lattice", "square".into()),
        ("L", l.into()),
        ("periodic", periodic.into()),
    ]);
    Ok(g)
}

/// Kagome lattice of `cx x cy` unit cells on the triangular Bravais lattice
/// `a1 = (2, 0)`, `a2 = (1, sqrt 3)` with basis sites at `0`, `a1/2`, `a2/2`.
///
/// Periodic clusters need at least two cells in each direction; a single
/// wrapped cell would bond sites to themselves or repeat bonds.
pub fn gen_kagome(cx: usize, cy: usize, periodic: bool) -> Result<Graph> {
    if cx == 0 || cy == 0 {
        return Err(Error::InvalidParameter("kagome needs cx, cy >= 1".into()));
    }
    if periodic && (cx < 2 || cy < 2) {
        return Err(Error::InvalidParameter(format!(
            "periodic kagome {cx}x{cy} collapses bonds; need cx, cy >= 2"
        )));
    }
    let n = 3 * cx * cy;
    let site = |x: usize, y: usize, s: usize| 3 * (y * cx + x) + s;
    let (a, b, c) = (0, 1, 2);
    // Neighbouring cell at offset (dx, dy), or None across an open boundary.
    let shift = |x: usize, y: usize, dx: isize, dy: isize| -> Option<(usize, usize)> {
        let nx = x as isize + dx;
        let ny = y as isize + dy;
        if periodic {
            Some((nx.rem_euclid(cx as isize) as usize, ny.rem_euclid(cy as isize) as usize))
        } else if nx >= 0 && ny >= 0 && (nx as usize) < cx && (ny as usize) < cy {
            Some((nx as usize, ny as usize))
        } else {
            None
        }
    };
    let mut set = EdgeSet::default();
    let mut collapsed = 0usize;
    let mut add = |set: &mut EdgeSet, p: usize, q: usize| {
        if !set.insert(p, q, 1.0) {
            collapsed += 1;
        }
    };
    for y in 0..cy {
        for x in 0..cx {
            add(&mut set, site(x, y, a), site(x, y, b));
            add(&mut set, site(x, y, a), site(x, y, c));
            add(&mut set, site(x, y, b), site(x, y, c));
            if let Some((nx, ny)) = shift(x, y, 1, 0) {
                add(&mut set, site(x, y, b), site(nx, ny, a));
            }
            if let Some((nx, ny)) = shift(x, y, 0, 1) {
                add(&mut set, site(x, y, c), site(nx, ny, a));
            }
            if let Some((nx, ny)) = shift(x, y, 1, -1) {
                add(&mut set, site(x, y, b), site(nx, ny, c));
            }
        }
    }
    if collapsed > 0 {
        return Err(Error::InvalidParameter(format!(
            "kagome {cx}x{cy}: {collapsed} bonds collapsed"
        )));
    }
    let s3 = 3f64.sqrt();
    let mut coords = vec![[0.0; 2]; n];
    for y in 0..cy {
        for x in 0..cx {
            let ox = 2.0 * x as f64 + y as f64;
            let oy = s3 * y as f64;
            coords[site(x, y, a)] = [ox, oy];
            coords[site(x, y, b)] = [ox + 1.0, oy];
            coords[site(x, y, c)] = [ox + 0.5, oy + s3 / 2.0];
        }
    }
    let mut g = Graph::new(n, set.into_edges())?
        .with_name(format!("kagome{n}"))
        .with_coords(coords)?;
    g.meta = meta_of(&[
        ("lattice", "kagome".into()),
        ("cx", cx.into()),
        ("cy", cy.into()),
        ("periodic", periodic.into()),
    ]);
    Ok(g)
}

/// Periodic Shastry-Sutherland lattice: an `L x L` torus with coupling `j` on
/// grid bonds and `jd` on orthogonal diagonals.
///
/// Plaquettes are labelled by their lower-left corner `(x, y)`. Plaquettes with
/// both coordinates even carry the diagonal `(x,y)-(x+1,y+1)`; plaquettes with
/// both odd carry `(x+1,y)-(x,y+1)`. The diagonals form a perfect matching.
pub fn gen_shastry_sutherland(l: usize, j: f64, jd: f64) -> Result<Graph> {
    if l < 2 || l % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "Shastry-Sutherland needs an even L >= 2, got {l}"
        )));
    }
    if !(j >= 0.0 && jd >= 0.0) {
        return Err(Error::InvalidParameter("couplings must be non-negative".into()));
    }
    let idx = |x: usize, y: usize| (y % l) * l + (x % l);
    let mut set = EdgeSet::default();
    for y in 0..l {
        for x in 0..l {
            set.insert(idx(x, y), idx(x + 1, y), j);
            set.insert(idx(x, y), idx(x, y + 1), j);
        }
    }
    let mut diagonals = Vec::new();
    for y in 0..l {
        for x in 0..l {
            let d = match (x % 2, y % 2) {
                (0, 0) => Some((idx(x, y), idx(x + 1, y + 1))),
                (1, 1) => Some((idx(x + 1, y), idx(x, y + 1))),
                _ => None,
            };
            if let Some((p, q)) = d {
                // A diagonal never coincides with a grid bond.
                set.insert(p, q, jd);
                diagonals.push(Value::from(vec![p.min(q), p.max(q)]));
            }
        }
    }
    let coords = (0..l * l).map(|v| [(v % l) as f64, (v / l) as f64]).collect();
    let mut g = Graph::new(l * l, set.into_edges())?
        .with_name(format!("shastry_sutherland{}", l * l))
        .with_coords(coords)?;
    g.meta = meta_of(&[
        ("lattice", "shastry_sutherland".into()),
        ("L", l.into()),
        ("J", j.into()),
        ("J_D", jd.into()),
        ("diagonals", Value::Array(diagonals)),
    ]);
    Ok(g)
}

/// Erdős–Rényi graph `G(n, p)` with unit weights, deterministic in `seed`.
pub fn gen_erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("Erdos-Renyi needs n >= 2, got {n}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("edge probability {p} not in [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                edges.push(Edge::new(i, j, 1.0));
            }
        }
    }
    let mut g = Graph::new(n, edges)?.with_name(format!("er_n{n}_p{p}_s{seed}"));
    g.meta = meta_of(&[
        ("lattice", "erdos_renyi".into()),
        ("p", p.into()),
        ("seed", seed.into()),
    ]);
    Ok(g)
}

/// Multiply every nonzero weight by `1 + sigma X`, `X ~ N(0, 1)`.
///
/// Draws with `1 + sigma X <= 0` are rejected and redrawn; the number of
/// rejections is stored in `meta["disorder_resamples"]`.
pub fn apply_disorder(g: &Graph, sigma: f64, seed: u64) -> Result<Graph> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidParameter(format!("sigma must be >= 0, got {sigma}")));
    }
    if sigma == 0.0 {
        return Ok(g.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut resamples = 0u64;
    let mut out = g.clone();
    for e in &mut out.edges {
        if e.w == 0.0 {
            continue;
        }
        let factor = loop {
            let x: f64 = rng.sample(StandardNormal);
            let f = 1.0 + sigma * x;
            if f > 0.0 {
                break f;
            }
            resamples += 1;
        };
        e.w *= factor;
    }
    out.meta.insert("disorder_sigma".into(), sigma.into());
    out.meta.insert("disorder_seed".into(), seed.into());
    out.meta.insert("disorder_resamples".into(), resamples.into());
    Ok(out)
}

/// Parse the edge-list text format: one `i j w` per line, `#` comments and
/// blank lines ignored. A comment `# n=<N>` fixes the vertex count (otherwise
/// it is one more than the largest index).
pub fn parse_edgelist(text: &str, path: &Path) -> Result<Graph> {
    let err = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut edges = Vec::new();
    let mut declared_n: Option<usize> = None;
    let mut max_idx: Option<usize> = None;
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.trim();
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(v) = comment.trim().strip_prefix("n=") {
                declared_n = Some(
                    v.trim()
                        .parse()
                        .map_err(|_| err(line_no, format!("bad vertex count '{}'", v.trim())))?,
                );
            }
            continue;
        }
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(err(line_no, format!("expected 'i j w', got '{content}'")));
        }
        let i: usize = fields[0]
            .parse()
            .map_err(|_| err(line_no, format!("bad vertex '{}'", fields[0])))?;
        let j: usize = fields[1]
            .parse()
            .map_err(|_| err(line_no, format!("bad vertex '{}'", fields[1])))?;
        let w: f64 = fields[2]
            .parse()
            .map_err(|_| err(line_no, format!("bad weight '{}'", fields[2])))?;
        if w < 0.0 || !w.is_finite() {
            return Err(Error::Validation(format!(
                "{}:{line_no}: negative or non-finite weight {w}",
                path.display()
            )));
        }
        max_idx = Some(max_idx.map_or(i.max(j), |m: usize| m.max(i).max(j)));
        edges.push(Edge::new(i, j, w));
    }
    let n = match (declared_n, max_idx) {
        (Some(n), _) => n,
        (None, Some(m)) => m + 1,
        (None, None) => return Err(err(0, "empty edge list without '# n=' header".into())),
    };
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(Graph::new(n, edges)?.with_name(name))
}

pub fn load_edgelist(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    parse_edgelist(&fs::read_to_string(path)?, path)
}

pub fn format_edgelist(g: &Graph) -> String {
    let mut s = String::new();
    if !g.name.is_empty() {
        let _ = writeln!(s, "# {}", g.name);
    }
    let _ = writeln!(s, "# n={}", g.n);
    for e in &g.edges {
        // `{}` on f64 prints the shortest representation that round-trips.
        let _ = writeln!(s, "{} {} {}", e.i, e.j, e.w);
    }
    s
}

pub fn save_edgelist(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, format_edgelist(g))?;
    Ok(())
}

/// Load either format, chosen by extension (`.json` is instance JSON).
pub fn load_instance(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => Graph::load_json(path),
        _ => load_edgelist(path),
    }
}
