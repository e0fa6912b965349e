//! Dynkin and weighted Satake-Tits diagrams, root systems, and the descent
//! procedure that computes the rank and 1-type of a graded algebra.
//!
//! Diagrams are stored through their Gram matrix `(α_i, α_j)`, normalized so
//! that the shortest simple root in each connected component has norm 2.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use num::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::Matrix;
use crate::padic::{q, Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("bad edge {0}: {1}")]
    BadEdge(String, String),
    #[error("inconsistent root lengths around vertex `{0}`")]
    InconsistentLengths(String),
    #[error("diagram is not of finite type")]
    NotFiniteType,
    #[error("diagram is not connected")]
    Disconnected,
    #[error("invalid weighted diagram: {0}")]
    Invalid(String),
    #[error("descent did not terminate within {0} steps")]
    NoTermination(usize),
    #[error("last nonempty diagram is not a rank-one diagram: {0}")]
    NotRankOne(String),
    #[error("malformed diagram json: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    White,
    Black,
}

/// Vertex ids may be written as strings or integers in JSON.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VertexId {
    Int(i64),
    Str(String),
}

impl VertexId {
    fn key(&self) -> String {
        match self {
            VertexId::Int(i) => i.to_string(),
            VertexId::Str(s) => s.clone(),
        }
    }
}

/// `(i, j, bond multiplicity, arrow)`. The arrow `">"` means `i` is the long
/// root, `"<"` means `j` is.
pub type Edge = (VertexId, VertexId, u8, Option<String>);

/// Serialized form of a weighted Satake-Tits diagram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagramJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    pub vertices: Vec<VertexId>,
    #[serde(default)]
    pub edges: Vec<Edge>,
    #[serde(default)]
    pub color: BTreeMap<String, Color>,
    #[serde(default)]
    pub pairing: BTreeMap<String, String>,
    #[serde(default)]
    pub circled: Option<VertexId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynkinDiagram {
    labels: Vec<String>,
    gram: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RootKind {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl fmt::Display for RootKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self)
    }
}

impl std::str::FromStr for RootKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "A" => Ok(RootKind::A),
            "B" => Ok(RootKind::B),
            "C" => Ok(RootKind::C),
            "D" => Ok(RootKind::D),
            "E" => Ok(RootKind::E),
            "F" => Ok(RootKind::F),
            "G" => Ok(RootKind::G),
            other => Err(format!("unknown root system family `{other}`")),
        }
    }
}

fn components_of(gram: &[Vec<i64>]) -> Vec<Vec<usize>> {
    let n = gram.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for w in 0..n {
                if w != v && gram[v][w] != 0 && !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                    queue.push_back(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Rescales each component so that its shortest root has norm 2.
fn normalize_gram(gram: &mut [Vec<i64>]) {
    for comp in components_of(gram) {
        let min = comp.iter().map(|&i| gram[i][i]).min().unwrap_or(2);
        let divisible = comp.iter().all(|&i| comp.iter().all(|&j| (2 * gram[i][j]) % min == 0));
        if min == 2 || !divisible {
            continue;
        }
        for &i in &comp {
            for &j in &comp {
                gram[i][j] = 2 * gram[i][j] / min;
            }
        }
    }
}

impl DynkinDiagram {
    /// Builds a diagram from labels and `(i, j, multiplicity, arrow)` edges.
    pub fn from_edges(
        labels: Vec<String>,
        edges: &[(usize, usize, u8, Option<&str>)],
    ) -> Result<Self, DiagramError> {
        let n = labels.len();
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.clone()) {
                return Err(DiagramError::DuplicateVertex(l.clone()));
            }
        }
        // Relative norms, propagated along edges as rationals.
        let mut adj: Vec<Vec<(usize, Q)>> = vec![Vec::new(); n];
        let mut bonds: HashMap<(usize, usize), u8> = HashMap::new();
        for &(i, j, m, dir) in edges {
            let name = format!("({}, {})", labels[i], labels[j]);
            if i == j || i >= n || j >= n {
                return Err(DiagramError::BadEdge(name, "endpoints".into()));
            }
            if !(1..=4).contains(&m) {
                return Err(DiagramError::BadEdge(name, format!("multiplicity {m}")));
            }
            let ratio = match (m, dir) {
                (1, None) | (4, None) => q(1),
                (_, Some(">")) => q(m as i64),
                (_, Some("<")) => Q::new(1.into(), (m as i64).into()),
                (_, d) => return Err(DiagramError::BadEdge(name, format!("arrow {:?}", d))),
            };
            if m == 1 && dir.is_some() {
                return Err(DiagramError::BadEdge(name, "simple bond with arrow".into()));
            }
            // ratio = norm(i) / norm(j)
            adj[i].push((j, ratio.recip()));
            adj[j].push((i, ratio));
            let key = (i.min(j), i.max(j));
            if bonds.insert(key, m).is_some() {
                return Err(DiagramError::BadEdge(name, "repeated".into()));
            }
        }
        let mut norm: Vec<Option<Q>> = vec![None; n];
        for s in 0..n {
            if norm[s].is_some() {
                continue;
            }
            norm[s] = Some(q(1));
            let mut queue = VecDeque::from([s]);
            let mut comp = vec![s];
            while let Some(v) = queue.pop_front() {
                let nv = norm[v].clone().unwrap();
                for (w, r) in &adj[v] {
                    // norm(w) = norm(v) * norm(w)/norm(v)
                    let nw = &nv * r;
                    match &norm[*w] {
                        Some(existing) if *existing != nw => {
                            return Err(DiagramError::InconsistentLengths(labels[*w].clone()))
                        }
                        Some(_) => {}
                        None => {
                            norm[*w] = Some(nw);
                            comp.push(*w);
                            queue.push_back(*w);
                        }
                    }
                }
            }
            let min = comp.iter().map(|&i| norm[i].clone().unwrap()).min().unwrap();
            for &i in &comp {
                norm[i] = Some(norm[i].clone().unwrap() / &min * q(2));
            }
        }
        let norm: Vec<i64> = norm
            .into_iter()
            .zip(&labels)
            .map(|(x, l)| {
                let x = x.unwrap();
                if x.is_integer() {
                    Ok(x.to_integer().try_into().unwrap_or(i64::MAX))
                } else {
                    Err(DiagramError::InconsistentLengths(l.clone()))
                }
            })
            .collect::<Result<_, _>>()?;
        let mut gram = vec![vec![0i64; n]; n];
        for i in 0..n {
            gram[i][i] = norm[i];
        }
        for (&(i, j), &m) in &bonds {
            let short = norm[i].min(norm[j]);
            let v = -(m as i64) * short / 2;
            // 4 (a,b)^2 = m |a|^2 |b|^2 must hold for a genuine bond.
            if 4 * v * v != (m as i64) * norm[i] * norm[j] {
                return Err(DiagramError::BadEdge(
                    format!("({}, {})", labels[i], labels[j]),
                    "multiplicity does not match root lengths".into(),
                ));
            }
            gram[i][j] = v;
            gram[j][i] = v;
        }
        Ok(DynkinDiagram { labels, gram })
    }

    pub fn from_gram(labels: Vec<String>, gram: Vec<Vec<i64>>) -> Self {
        DynkinDiagram { labels, gram }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    /// `a_ij = 2 (α_i, α_j) / (α_i, α_i)`.
    pub fn cartan_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.len();
        (0..n)
            .map(|i| (0..n).map(|j| 2 * self.gram[i][j] / self.gram[i][i]).collect())
            .collect()
    }

    /// Edges recovered from the Gram matrix, as `(i, j, multiplicity, arrow)`.
    pub fn edges(&self) -> Vec<(usize, usize, u8, Option<&'static str>)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let g = self.gram[i][j];
                if g == 0 {
                    continue;
                }
                let m = (4 * g * g / (self.gram[i][i] * self.gram[j][j])) as u8;
                let dir = match self.gram[i][i].cmp(&self.gram[j][j]) {
                    std::cmp::Ordering::Greater => Some(">"),
                    std::cmp::Ordering::Less => Some("<"),
                    std::cmp::Ordering::Equal => None,
                };
                out.push((i, j, m, dir));
            }
        }
        out
    }

    pub fn neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&w| w != v && self.gram[v][w] != 0)
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        components_of(&self.gram)
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Finite type: the Gram matrix is positive definite (Sylvester).
    pub fn is_finite_type(&self) -> bool {
        let n = self.len();
        let m = Matrix::from_fn(n, n, |i, j| q(self.gram[i][j]));
        (1..=n).all(|s| m.leading(s).det().is_positive())
    }

    pub fn restrict(&self, keep: &[usize]) -> DynkinDiagram {
        let labels = keep.iter().map(|&i| self.labels[i].clone()).collect();
        let mut gram: Vec<Vec<i64>> =
            keep.iter().map(|&i| keep.iter().map(|&j| self.gram[i][j]).collect()).collect();
        normalize_gram(&mut gram);
        DynkinDiagram { labels, gram }
    }

    /// Every Bourbaki labeling of this diagram as a root system of type
    /// `kind_n`: `labeling[l]` is the vertex carrying Bourbaki label `l + 1`.
    pub fn labelings(&self, kind: RootKind, n: usize) -> Vec<Vec<usize>> {
        let Some(target) = bourbaki_gram(kind, n) else {
            return Vec::new();
        };
        if self.len() != n {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut assign = Vec::with_capacity(n);
        let mut used = vec![false; n];
        self.extend_labeling(&target, &mut assign, &mut used, &mut out);
        out
    }

    fn extend_labeling(
        &self,
        target: &[Vec<i64>],
        assign: &mut Vec<usize>,
        used: &mut [bool],
        out: &mut Vec<Vec<usize>>,
    ) {
        let l = assign.len();
        if l == target.len() {
            out.push(assign.clone());
            return;
        }
        for v in 0..self.len() {
            if used[v] || self.gram[v][v] != target[l][l] {
                continue;
            }
            if assign.iter().enumerate().all(|(l2, &w)| self.gram[v][w] == target[l][l2]) {
                used[v] = true;
                assign.push(v);
                self.extend_labeling(target, assign, used, out);
                assign.pop();
                used[v] = false;
            }
        }
    }

    /// The Cartan-Killing type, with `B_2` reported as `C_2`.
    pub fn classify_shape(&self) -> Option<(RootKind, usize)> {
        let n = self.len();
        use RootKind::*;
        [A, C, B, D, E, F, G]
            .into_iter()
            .find(|&k| !self.labelings(k, n).is_empty())
            .map(|k| (k, n))
    }
}

/// The normalized Gram matrix of the simple roots in Bourbaki numbering.
pub fn bourbaki_gram(kind: RootKind, n: usize) -> Option<Vec<Vec<i64>>> {
    let mut g = vec![vec![0i64; n]; n];
    let link = |g: &mut Vec<Vec<i64>>, i: usize, j: usize, v: i64| {
        g[i][j] = v;
        g[j][i] = v;
    };
    match kind {
        RootKind::A => {
            if n < 1 {
                return None;
            }
            for i in 0..n {
                g[i][i] = 2;
            }
            for i in 1..n {
                link(&mut g, i - 1, i, -1);
            }
        }
        RootKind::B | RootKind::C => {
            if n < 2 {
                return None;
            }
            let (body, end) = if kind == RootKind::B { (4, 2) } else { (2, 4) };
            for i in 0..n - 1 {
                g[i][i] = body;
            }
            g[n - 1][n - 1] = end;
            for i in 1..n - 1 {
                link(&mut g, i - 1, i, -body / 2);
            }
            link(&mut g, n - 2, n - 1, -2);
        }
        RootKind::D => {
            if n < 4 {
                return None;
            }
            for i in 0..n {
                g[i][i] = 2;
            }
            for i in 1..n - 1 {
                link(&mut g, i - 1, i, -1);
            }
            link(&mut g, n - 3, n - 1, -1);
        }
        RootKind::E => {
            if !(6..=8).contains(&n) {
                return None;
            }
            for i in 0..n {
                g[i][i] = 2;
            }
            link(&mut g, 0, 2, -1);
            link(&mut g, 1, 3, -1);
            for i in 3..n {
                link(&mut g, i - 1, i, -1);
            }
        }
        RootKind::F => {
            if n != 4 {
                return None;
            }
            g[0][0] = 4;
            g[1][1] = 4;
            g[2][2] = 2;
            g[3][3] = 2;
            link(&mut g, 0, 1, -2);
            link(&mut g, 1, 2, -2);
            link(&mut g, 2, 3, -1);
        }
        RootKind::G => {
            if n != 2 {
                return None;
            }
            g[0][0] = 2;
            g[1][1] = 6;
            link(&mut g, 0, 1, -3);
        }
    }
    Some(g)
}

/// Root system of a connected finite-type diagram, in simple-root coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootSystemData {
    pub simple_count: usize,
    pub all_roots: Vec<Vec<i64>>,
    pub highest_root: Vec<i64>,
}

impl RootSystemData {
    pub fn positive_roots(&self) -> impl Iterator<Item = &Vec<i64>> {
        self.all_roots.iter().filter(|r| r.iter().all(|&c| c >= 0))
    }
}

fn pairing(gram: &[Vec<i64>], beta: &[i64], i: usize) -> i64 {
    beta.iter().zip(gram).map(|(&b, row)| b * row[i]).sum()
}

/// Builds all roots by root-string closure from the simple roots.
pub fn roots_from_cartan(d: &DynkinDiagram) -> Result<RootSystemData, DiagramError> {
    if !d.is_finite_type() {
        return Err(DiagramError::NotFiniteType);
    }
    if !d.is_connected() || d.is_empty() {
        return Err(DiagramError::Disconnected);
    }
    let n = d.len();
    let gram = d.gram();
    let unit = |i: usize| {
        let mut e = vec![0i64; n];
        e[i] = 1;
        e
    };
    let mut positive: Vec<Vec<i64>> = (0..n).map(unit).collect();
    let mut known: HashSet<Vec<i64>> = positive.iter().cloned().collect();
    let mut idx = 0;
    while idx < positive.len() {
        let beta = positive[idx].clone();
        for i in 0..n {
            // p = length of the α_i-string below β.
            let mut p = 0;
            let mut down = beta.clone();
            loop {
                down[i] -= 1;
                if known.contains(&down) {
                    p += 1;
                } else {
                    break;
                }
            }
            let c = 2 * pairing(gram, &beta, i) / gram[i][i];
            if p - c > 0 {
                let mut up = beta.clone();
                up[i] += 1;
                if known.insert(up.clone()) {
                    positive.push(up);
                }
            }
        }
        idx += 1;
        if positive.len() > 100_000 {
            return Err(DiagramError::NotFiniteType);
        }
    }
    let height = |r: &Vec<i64>| r.iter().sum::<i64>();
    let top = positive.iter().map(height).max().unwrap_or(0);
    let highest: Vec<&Vec<i64>> = positive.iter().filter(|r| height(r) == top).collect();
    if highest.len() != 1 {
        return Err(DiagramError::Disconnected);
    }
    let highest_root = highest[0].clone();
    let mut all_roots = positive.clone();
    all_roots.extend(positive.iter().map(|r| r.iter().map(|c| -c).collect::<Vec<_>>()));
    Ok(RootSystemData { simple_count: n, all_roots, highest_root })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "UPPERCASE")]
pub enum OneType {
    A { delta: u32 },
    B,
}

impl OneType {
    pub fn kappa(self) -> u32 {
        match self {
            OneType::A { delta } => delta,
            OneType::B => 2,
        }
    }
}

impl fmt::Display for OneType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OneType::A { delta } => write!(f, "(A,{delta})"),
            OneType::B => write!(f, "B"),
        }
    }
}

/// A Dynkin diagram with colours, an involutive pairing of white vertices
/// (`pairing[i] == i` when unpaired) and a circled vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedSatakeDiagram {
    base: DynkinDiagram,
    color: Vec<Color>,
    pairing: Vec<usize>,
    circled: Option<usize>,
}

impl WeightedSatakeDiagram {
    pub fn new(
        base: DynkinDiagram,
        color: Vec<Color>,
        pairing: Vec<usize>,
        circled: Option<usize>,
    ) -> Result<Self, DiagramError> {
        let s = WeightedSatakeDiagram { base, color, pairing, circled };
        s.validate()?;
        Ok(s)
    }

    pub fn empty() -> Self {
        WeightedSatakeDiagram {
            base: DynkinDiagram::from_gram(Vec::new(), Vec::new()),
            color: Vec::new(),
            pairing: Vec::new(),
            circled: None,
        }
    }

    pub fn base(&self) -> &DynkinDiagram {
        &self.base
    }

    pub fn color(&self) -> &[Color] {
        &self.color
    }

    pub fn pairing(&self) -> &[usize] {
        &self.pairing
    }

    pub fn circled(&self) -> Option<usize> {
        self.circled
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    pub fn validate(&self) -> Result<(), DiagramError> {
        let n = self.len();
        if self.color.len() != n || self.pairing.len() != n {
            return Err(DiagramError::Invalid("colour or pairing length mismatch".into()));
        }
        for i in 0..n {
            let j = self.pairing[i];
            if j >= n || self.pairing[j] != i {
                return Err(DiagramError::Invalid("pairing is not an involution".into()));
            }
            if j != i && (self.color[i] != Color::White || self.color[j] != Color::White) {
                return Err(DiagramError::Invalid("pairing touches a black vertex".into()));
            }
        }
        match self.circled {
            None if n > 0 => Err(DiagramError::Invalid("no circled vertex".into())),
            Some(c) if c >= n => Err(DiagramError::Invalid("circled vertex out of range".into())),
            Some(c) if self.color[c] != Color::White => {
                Err(DiagramError::Invalid("circled vertex is black".into()))
            }
            Some(c) if self.pairing[c] != c => {
                Err(DiagramError::Invalid("circled vertex is arrow-paired".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn from_json(j: &DiagramJson) -> Result<Self, DiagramError> {
        let labels: Vec<String> = j.vertices.iter().map(VertexId::key).collect();
        let index: HashMap<&str, usize> =
            labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        let find = |k: &str| index.get(k).copied().ok_or_else(|| DiagramError::UnknownVertex(k.into()));
        let mut edges = Vec::new();
        for (a, b, m, dir) in &j.edges {
            edges.push((find(&a.key())?, find(&b.key())?, *m, dir.as_deref()));
        }
        let base = DynkinDiagram::from_edges(labels.clone(), &edges)?;
        let mut color = vec![Color::White; labels.len()];
        for (k, c) in &j.color {
            color[find(k)?] = *c;
        }
        let mut pairing: Vec<usize> = (0..labels.len()).collect();
        for (a, b) in &j.pairing {
            let (a, b) = (find(a)?, find(b)?);
            pairing[a] = b;
            pairing[b] = a;
        }
        let circled = j.circled.as_ref().map(|c| find(&c.key())).transpose()?;
        WeightedSatakeDiagram::new(base, color, pairing, circled)
    }

    pub fn parse(text: &str) -> Result<Self, DiagramError> {
        let j: DiagramJson = serde_json::from_str(text).map_err(|e| DiagramError::Json(e.to_string()))?;
        Self::from_json(&j)
    }

    pub fn to_json(&self) -> DiagramJson {
        let labels = self.base.labels();
        let edges = self
            .base
            .edges()
            .into_iter()
            .map(|(i, j, m, d)| {
                (VertexId::Str(labels[i].clone()), VertexId::Str(labels[j].clone()), m, d.map(String::from))
            })
            .collect();
        let color = labels.iter().cloned().zip(self.color.iter().copied()).collect();
        let pairing = (0..self.len())
            .filter(|&i| self.pairing[i] != i)
            .map(|i| (labels[i].clone(), labels[self.pairing[i]].clone()))
            .collect();
        DiagramJson {
            name: None,
            source: None,
            vertices: labels.iter().cloned().map(VertexId::Str).collect(),
            edges,
            color,
            pairing,
            circled: self.circled.map(|c| VertexId::Str(labels[c].clone())),
        }
    }

    /// The sub-diagram on `keep` (in that order), with a new circled vertex.
    fn restrict(&self, keep: &[usize], circled: Option<usize>) -> Self {
        let pos: HashMap<usize, usize> = keep.iter().enumerate().map(|(a, &b)| (b, a)).collect();
        let pairing = keep
            .iter()
            .enumerate()
            .map(|(a, &i)| pos.get(&self.pairing[i]).copied().unwrap_or(a))
            .collect();
        WeightedSatakeDiagram {
            base: self.base.restrict(keep),
            color: keep.iter().map(|&i| self.color[i]).collect(),
            pairing,
            circled: circled.and_then(|c| pos.get(&c).copied()),
        }
    }

    /// The connected component holding the circled vertex.
    pub fn circled_component(&self) -> Self {
        let Some(c) = self.circled else {
            return Self::empty();
        };
        let comp = self.base.components().into_iter().find(|comp| comp.contains(&c)).unwrap();
        self.restrict(&comp, Some(c))
    }

    /// Appends the white, self-paired vertex `-ω` to the circled component.
    /// The new vertex is last; `α_0` stays circled.
    pub fn extend_diagram(&self) -> Result<Self, DiagramError> {
        let comp = self.circled_component();
        if comp.is_empty() {
            return Err(DiagramError::Invalid("no circled vertex".into()));
        }
        let roots = roots_from_cartan(&comp.base)?;
        let w = &roots.highest_root;
        let n = comp.len();
        let g = comp.base.gram();
        let mut gram: Vec<Vec<i64>> = g.to_vec();
        let col: Vec<i64> = (0..n).map(|i| -pairing(g, w, i)).collect();
        let norm: i64 = (0..n).map(|i| w[i] * pairing(g, w, i)).sum();
        for (row, c) in gram.iter_mut().zip(&col) {
            row.push(*c);
        }
        let mut last = col;
        last.push(norm);
        gram.push(last);
        let mut labels = comp.base.labels().to_vec();
        let mut new_label = "-w".to_string();
        while labels.contains(&new_label) {
            new_label.push('\'');
        }
        labels.push(new_label);
        let mut color = comp.color.clone();
        color.push(Color::White);
        let mut pairing = comp.pairing.clone();
        pairing.push(n);
        Ok(WeightedSatakeDiagram {
            base: DynkinDiagram::from_gram(labels, gram),
            color,
            pairing,
            circled: comp.circled,
        })
    }

    /// One application of the descent: extend, remove `α_0` together with the
    /// black chains leaving it and the white vertices they reach (and the
    /// partners of those), then circle `-ω` and keep its component.
    pub fn descent_step(&self) -> Result<Self, DiagramError> {
        self.validate()?;
        let ext = self.extend_diagram()?;
        let a0 = ext.circled.expect("extended diagram keeps its circle");
        let omega = ext.len() - 1;
        let mut removed = HashSet::from([a0]);
        let mut queue = VecDeque::from([a0]);
        while let Some(v) = queue.pop_front() {
            for w in ext.base.neighbours(v) {
                if removed.contains(&w) {
                    continue;
                }
                removed.insert(w);
                if ext.color[w] == Color::Black {
                    queue.push_back(w);
                }
            }
        }
        let whites: Vec<usize> =
            removed.iter().copied().filter(|&v| ext.color[v] == Color::White).collect();
        for v in whites {
            removed.insert(ext.pairing[v]);
        }
        if removed.contains(&omega) {
            return Ok(Self::empty());
        }
        let keep: Vec<usize> = (0..ext.len()).filter(|v| !removed.contains(v)).collect();
        let next = ext.restrict(&keep, Some(omega)).circled_component();
        next.validate()?;
        Ok(next)
    }

    /// Reads the 1-type off a rank-one diagram.
    pub fn rank_one_type(&self) -> Result<OneType, DiagramError> {
        let n = self.len();
        let c = self.circled.ok_or_else(|| DiagramError::NotRankOne("no circled vertex".into()))?;
        let edges = self.base.edges();
        let describe = || format!("{} vertices, {} edges", n, edges.len());
        if n == 2 && edges.len() == 1 && edges[0].2 == 2 {
            let other = 1 - c;
            let g = self.base.gram();
            if g[c][c] > g[other][other] && self.color[other] == Color::Black {
                return Ok(OneType::B);
            }
            return Err(DiagramError::NotRankOne(describe()));
        }
        if n.is_multiple_of(2) || self.pairing.iter().enumerate().any(|(i, &j)| i != j) {
            return Err(DiagramError::NotRankOne(describe()));
        }
        if !self.base.labelings(RootKind::A, n).iter().any(|l| l[n / 2] == c) {
            return Err(DiagramError::NotRankOne(describe()));
        }
        let others_black = (0..n).all(|i| i == c || self.color[i] == Color::Black);
        if !others_black {
            return Err(DiagramError::NotRankOne(describe()));
        }
        Ok(OneType::A { delta: (n as u32).div_ceil(2) })
    }

    /// Every diagram of the descent, starting with the circled component and
    /// ending with the empty diagram.
    pub fn descent_chain(&self) -> Result<Vec<Self>, DiagramError> {
        let start = self.circled_component();
        let bound = start.len() + 1;
        let mut chain = vec![start];
        while !chain.last().unwrap().is_empty() {
            if chain.len() > bound {
                return Err(DiagramError::NoTermination(bound));
            }
            let next = chain.last().unwrap().descent_step()?;
            chain.push(next);
        }
        Ok(chain)
    }

    /// `(rank, 1-type)`: the number of descent steps to reach the empty
    /// diagram and the type of the last nonempty one.
    pub fn descent_classify(&self) -> Result<(usize, OneType), DiagramError> {
        let chain = self.descent_chain()?;
        let rank = chain.len() - 1;
        if rank == 0 {
            return Err(DiagramError::Invalid("empty diagram".into()));
        }
        let one_type = chain[rank - 1].rank_one_type()?;
        Ok((rank, one_type))
    }
}

/// Builds a weighted diagram in Bourbaki numbering: vertex `i` is labelled
/// `a{i}`; `black`, `pairs` and `circled` use 1-based labels.
pub fn bourbaki_diagram(
    kind: RootKind,
    n: usize,
    black: &[usize],
    pairs: &[(usize, usize)],
    circled: usize,
) -> Result<WeightedSatakeDiagram, DiagramError> {
    let gram = bourbaki_gram(kind, n).ok_or_else(|| DiagramError::Invalid(format!("no {kind}{n}")))?;
    let labels = (1..=n).map(|i| format!("a{i}")).collect();
    let base = DynkinDiagram::from_gram(labels, gram);
    let mut color = vec![Color::White; n];
    for &b in black {
        color[b - 1] = Color::Black;
    }
    let mut pairing: Vec<usize> = (0..n).collect();
    for &(a, b) in pairs {
        pairing[a - 1] = b - 1;
        pairing[b - 1] = a - 1;
    }
    WeightedSatakeDiagram::new(base, color, pairing, Some(circled - 1))
}

/// Number of roots of `kind_n`, from the classical closed forms.
pub fn root_count(kind: RootKind, n: usize) -> usize {
    match kind {
        RootKind::A => n * (n + 1),
        RootKind::B | RootKind::C => 2 * n * n,
        RootKind::D => 2 * n * (n - 1),
        RootKind::E => match n {
            6 => 72,
            7 => 126,
            _ => 240,
        },
        RootKind::F => 48,
        RootKind::G => 12,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use RootKind::*;

    fn dynkin(kind: RootKind, n: usize) -> DynkinDiagram {
        let labels = (1..=n).map(|i| format!("a{i}")).collect();
        DynkinDiagram::from_gram(labels, bourbaki_gram(kind, n).unwrap())
    }

    /// Independent oracle: the Weyl orbit of the simple roots.
    fn weyl_closure(d: &DynkinDiagram) -> HashSet<Vec<i64>> {
        let n = d.len();
        let g = d.gram();
        let mut set: HashSet<Vec<i64>> = HashSet::new();
        let mut stack: Vec<Vec<i64>> = (0..n)
            .map(|i| {
                let mut e = vec![0; n];
                e[i] = 1;
                e
            })
            .collect();
        while let Some(b) = stack.pop() {
            if !set.insert(b.clone()) {
                continue;
            }
            for i in 0..n {
                let c = 2 * pairing(g, &b, i) / g[i][i];
                let mut r = b.clone();
                r[i] -= c;
                if !set.contains(&r) {
                    stack.push(r);
                }
            }
        }
        set
    }

    #[test]
    fn root_counts_match_weyl_orbit_and_closed_forms() {
        let cases = [
            (A, 1),
            (A, 2),
            (A, 5),
            (B, 2),
            (B, 4),
            (C, 2),
            (C, 3),
            (D, 4),
            (D, 6),
            (E, 6),
            (E, 7),
            (E, 8),
            (F, 4),
            (G, 2),
        ];
        for (k, n) in cases {
            let d = dynkin(k, n);
            let rs = roots_from_cartan(&d).unwrap();
            let oracle = weyl_closure(&d);
            assert_eq!(rs.all_roots.len(), oracle.len(), "{k}{n}");
            assert_eq!(rs.all_roots.len(), root_count(k, n), "{k}{n}");
            let ours: HashSet<Vec<i64>> = rs.all_roots.iter().cloned().collect();
            assert_eq!(ours, oracle, "{k}{n}");
        }
    }

    #[test]
    fn root_examples() {
        let a2 = roots_from_cartan(&dynkin(A, 2)).unwrap();
        assert_eq!(a2.all_roots.len(), 6);
        assert_eq!(a2.highest_root, vec![1, 1]);
        assert_eq!(roots_from_cartan(&dynkin(C, 2)).unwrap().all_roots.len(), 8);
        let e7 = roots_from_cartan(&dynkin(E, 7)).unwrap();
        assert_eq!(e7.all_roots.len(), 126);
        assert_eq!(e7.highest_root, vec![2, 2, 3, 4, 3, 2, 1]);
        assert_eq!(roots_from_cartan(&dynkin(C, 4)).unwrap().highest_root, vec![2, 2, 2, 1]);
    }

    #[test]
    fn highest_root_dominates_positive_roots() {
        for (k, n) in [(B, 3), (D, 5), (E, 6), (F, 4), (G, 2)] {
            let rs = roots_from_cartan(&dynkin(k, n)).unwrap();
            for r in rs.positive_roots() {
                assert!(r.iter().zip(&rs.highest_root).all(|(a, b)| a <= b));
            }
        }
    }

    #[test]
    fn affine_diagram_is_rejected() {
        let d = dynkin(A, 2);
        let ext = bourbaki_diagram(A, 2, &[], &[], 1).unwrap().extend_diagram().unwrap();
        assert!(d.is_finite_type());
        assert!(!ext.base().is_finite_type());
        assert_eq!(roots_from_cartan(ext.base()), Err(DiagramError::NotFiniteType));
    }

    #[test]
    fn extension_examples() {
        // C_n: -ω hangs off α_1 by a double bond, -ω long.
        let ext = bourbaki_diagram(C, 4, &[], &[], 4).unwrap().extend_diagram().unwrap();
        let w = ext.len() - 1;
        let nb: Vec<usize> = ext.base().neighbours(w).collect();
        assert_eq!(nb, vec![0]);
        assert!(ext.base().edges().contains(&(0, 4, 2, Some("<"))));
        // D_m: -ω hangs off α_2.
        let ext = bourbaki_diagram(D, 5, &[], &[], 1).unwrap().extend_diagram().unwrap();
        assert_eq!(ext.base().neighbours(5).collect::<Vec<_>>(), vec![1]);
        // A_1: the affine Ã_1 bond, (α, -ω) = -2.
        let ext = bourbaki_diagram(A, 1, &[], &[], 1).unwrap().extend_diagram().unwrap();
        assert_eq!(ext.base().gram()[0][1], -2);
        assert_eq!(ext.base().edges(), vec![(0, 1, 4, None)]);
        // E_7: -ω hangs off α_1.
        let ext = bourbaki_diagram(E, 7, &[], &[], 7).unwrap().extend_diagram().unwrap();
        assert_eq!(ext.base().neighbours(7).collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn json_round_trip_and_arrow_convention() {
        let text = r#"{"vertices":["a1","a2"],"edges":[["a1","a2",2,">"]],
            "color":{"a2":"black"},"circled":"a1"}"#;
        let d = WeightedSatakeDiagram::parse(text).unwrap();
        assert_eq!(d.base().gram(), &[vec![4, -2], vec![-2, 2]]);
        assert_eq!(d.base().classify_shape(), Some((C, 2)));
        let again = WeightedSatakeDiagram::from_json(&d.to_json()).unwrap();
        assert_eq!(again, d);
        let ints = r#"{"vertices":[1,2,3],"edges":[[1,2,1,null],[2,3,1,null]],"circled":2}"#;
        let d = WeightedSatakeDiagram::parse(ints).unwrap();
        assert_eq!(d.base().classify_shape(), Some((A, 3)));
    }

    #[test]
    fn invalid_inputs() {
        let black_circle = r#"{"vertices":["a"],"color":{"a":"black"},"circled":"a"}"#;
        assert!(matches!(WeightedSatakeDiagram::parse(black_circle), Err(DiagramError::Invalid(_))));
        let paired = r#"{"vertices":["a","b","c"],"edges":[["a","b",1,null],["b","c",1,null]],
            "pairing":{"a":"c"},"circled":"a"}"#;
        assert!(matches!(WeightedSatakeDiagram::parse(paired), Err(DiagramError::Invalid(_))));
        let unknown = r#"{"vertices":["a"],"circled":"z"}"#;
        assert_eq!(WeightedSatakeDiagram::parse(unknown), Err(DiagramError::UnknownVertex("z".into())));
        let bad = r#"{"vertices":["a","b"],"edges":[["a","b",2,null]],"circled":"a"}"#;
        assert!(matches!(WeightedSatakeDiagram::parse(bad), Err(DiagramError::BadEdge(..))));
    }

    #[test]
    fn shape_classification() {
        for (k, n) in [(A, 3), (B, 3), (C, 3), (D, 4), (D, 6), (E, 6), (E, 7), (E, 8), (F, 4), (G, 2)] {
            assert_eq!(dynkin(k, n).classify_shape(), Some((k, n)));
        }
        assert_eq!(dynkin(B, 2).classify_shape(), Some((C, 2)));
        assert_eq!(dynkin(D, 4).labelings(D, 4).len(), 6);
        assert_eq!(dynkin(A, 4).labelings(A, 4).len(), 2);
        assert_eq!(dynkin(E, 7).labelings(E, 7).len(), 1);
    }

    #[test]
    fn descent_examples() {
        // Split D_m circled at α_1: one step leaves ⊙, then empty.
        let d = bourbaki_diagram(D, 5, &[], &[], 1).unwrap();
        let step = d.descent_step().unwrap();
        assert_eq!(step.len(), 1);
        assert!(step.descent_step().unwrap().is_empty());
        assert_eq!(d.descent_classify().unwrap(), (2, OneType::A { delta: 1 }));
        // ⊙⇒● is rank one of 1-type B.
        let b2 = bourbaki_diagram(B, 2, &[2], &[], 1).unwrap();
        assert!(b2.descent_step().unwrap().is_empty());
        assert_eq!(b2.descent_classify().unwrap(), (1, OneType::B));
        // Split C_n circled at the long end descends to split C_{n-1}.
        let c4 = bourbaki_diagram(C, 4, &[], &[], 4).unwrap();
        let c3 = c4.descent_step().unwrap();
        assert_eq!(c3.base().classify_shape(), Some((C, 3)));
        let lab = &c3.base().labelings(C, 3)[0];
        assert_eq!(Some(lab[2]), c3.circled());
        assert_eq!(c4.descent_classify().unwrap(), (4, OneType::A { delta: 1 }));
        // Split E_7 circled at α_7 has rank 3.
        let e7 = bourbaki_diagram(E, 7, &[], &[], 7).unwrap();
        assert_eq!(e7.descent_classify().unwrap(), (3, OneType::A { delta: 1 }));
    }

    #[test]
    fn inner_forms_of_type_a() {
        // A_{2δ(k+1)-1}, white at multiples of δ, circled in the middle.
        for delta in 1..=3usize {
            for k in 0..=2usize {
                let n = 2 * delta * (k + 1) - 1;
                let black: Vec<usize> = (1..=n).filter(|i| i % delta != 0).collect();
                let d = bourbaki_diagram(A, n, &black, &[], delta * (k + 1)).unwrap();
                assert_eq!(
                    d.descent_classify().unwrap(),
                    (k + 1, OneType::A { delta: delta as u32 }),
                    "delta={delta} k={k}"
                );
            }
        }
    }

    #[test]
    fn unitary_pairings_propagate() {
        for n in 2..=5usize {
            let pairs: Vec<(usize, usize)> = (1..n).map(|i| (i, 2 * n - i)).collect();
            let d = bourbaki_diagram(A, 2 * n - 1, &[], &pairs, n).unwrap();
            let chain = d.descent_chain().unwrap();
            assert_eq!(chain.len() - 1, n);
            for (s, step) in chain.iter().enumerate().take(n) {
                let paired = (0..step.len()).filter(|&i| step.pairing()[i] != i).count();
                assert_eq!(paired, 2 * (n - 1 - s));
            }
        }
    }

    #[test]
    fn rank_one_rejections() {
        let a3 = bourbaki_diagram(A, 3, &[], &[], 2).unwrap();
        assert!(matches!(a3.rank_one_type(), Err(DiagramError::NotRankOne(_))));
        let a3 = bourbaki_diagram(A, 3, &[1, 3], &[], 2).unwrap();
        assert_eq!(a3.rank_one_type().unwrap(), OneType::A { delta: 2 });
    }

    fn family() -> impl Strategy<Value = WeightedSatakeDiagram> {
        prop_oneof![
            (4usize..9).prop_map(|m| bourbaki_diagram(D, m, &[], &[], 1).unwrap()),
            (2usize..6).prop_map(|n| bourbaki_diagram(C, n, &[], &[], n).unwrap()),
            (2usize..5).prop_map(|n| bourbaki_diagram(D, 2 * n, &[], &[], 2 * n).unwrap()),
            (3usize..7).prop_map(|m| bourbaki_diagram(B, m, &[m], &[], 1).unwrap()),
            (0usize..4).prop_map(|k| {
                let n = 2 * (k + 1);
                let black: Vec<usize> = (1..=n).step_by(2).collect();
                bourbaki_diagram(C, n, &black, &[], n).unwrap()
            }),
        ]
    }

    proptest! {
        #[test]
        fn descent_preserves_validity_and_terminates(d in family()) {
            let chain = d.descent_chain().unwrap();
            prop_assert!(chain.len() <= d.len() + 1);
            for s in &chain {
                prop_assert!(s.validate().is_ok());
                if let Some(c) = s.circled() {
                    prop_assert_eq!(s.color()[c], Color::White);
                    prop_assert_eq!(s.pairing()[c], c);
                }
            }
        }

        #[test]
        fn relabeling_does_not_change_classification(d in family(), seed in 0u64..1000) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut perm: Vec<usize> = (0..d.len()).collect();
            perm.shuffle(&mut rng);
            let c = d.circled().unwrap();
            let shuffled = d.restrict(&perm, Some(c));
            prop_assert_eq!(shuffled.descent_classify().unwrap(), d.descent_classify().unwrap());
        }
    }
}
