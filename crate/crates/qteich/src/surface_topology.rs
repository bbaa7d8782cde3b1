//! Combinatorics of punctured surfaces: ideal triangulations, the skew form σ,
//! dual graphs, homology over Z_N, splitting and fusion maps, and the flip
//! groupoid.
//!
//! Conventions. A triangle is an ordered triple of sides `0, 1, 2` listed
//! clockwise. Corner `c_s` sits between side `s` and side `s + 1`; in the
//! boundary orientation side `s` runs from `c_s` to `c_{s-1}`. Every gluing of
//! two sides reverses orientation, so the surface is determined by the edge
//! labels of the sides alone. A side's `flip` flag is `false` when the chosen
//! orientation of its edge agrees with the boundary orientation of the
//! triangle, i.e. when the triangle lies on the left of the edge.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TopologyError {
    #[error("triangulation rejected: {0}")]
    NonTriangulable(String),
    #[error("invalid surface signature: {0}")]
    InvalidSignature(String),
    #[error("edge {0} is a boundary edge and cannot be flipped")]
    BoundaryEdge(usize),
    #[error("edge {0} does not exist or is not internal")]
    InvalidEdge(usize),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("flip-graph search exhausted its budget of {0} states")]
    SearchBudgetExceeded(usize),
    #[error("triangulations are not combinatorially isomorphic")]
    NotIsomorphic,
}

fn one() -> usize {
    1
}

fn is_one(x: &usize) -> bool {
    *x == 1
}

/// Topological type of a (possibly disconnected) punctured surface.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SurfaceSig {
    #[serde(rename = "g")]
    pub genus: usize,
    #[serde(rename = "p")]
    pub punctures: usize,
    #[serde(rename = "b")]
    pub boundary_components: usize,
    #[serde(rename = "p_boundary")]
    pub boundary_punctures: usize,
    /// Number of connected components; split surfaces may be disconnected.
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub components: usize,
}

impl SurfaceSig {
    pub fn new(genus: usize, punctures: usize, boundary_components: usize, boundary_punctures: usize) -> Self {
        SurfaceSig { genus, punctures, boundary_components, boundary_punctures, components: 1 }
    }

    /// χ of the surface with its interior punctures removed.
    pub fn euler_char(&self) -> i64 {
        2 * self.components as i64
            - 2 * self.genus as i64
            - self.boundary_components as i64
            - (self.punctures as i64 - self.boundary_punctures as i64)
    }

    pub fn edge_count(&self) -> i64 {
        -3 * self.euler_char() + 2 * self.boundary_punctures as i64
    }

    pub fn triangle_count(&self) -> i64 {
        -2 * self.euler_char() + self.boundary_punctures as i64
    }

    pub fn validate(&self) -> Result<(), TopologyError> {
        let bad = |m: &str| Err(TopologyError::InvalidSignature(m.to_string()));
        if self.components == 0 {
            return bad("at least one component is required");
        }
        if self.punctures < self.components {
            return bad("every component needs a puncture");
        }
        if self.boundary_punctures > self.punctures {
            return bad("p_boundary exceeds p");
        }
        if self.boundary_components > self.boundary_punctures {
            return bad("every boundary component needs a puncture");
        }
        if self.boundary_components == 0 && self.boundary_punctures > 0 {
            return bad("boundary punctures without boundary");
        }
        if 2 * self.euler_char() > self.boundary_punctures as i64 - self.components as i64 {
            return bad("surface admits no ideal triangulation");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Side {
    pub edge: usize,
    #[serde(default)]
    pub flip: bool,
}

impl Side {
    pub fn new(edge: usize, flip: bool) -> Self {
        Side { edge, flip }
    }

    /// +1 when the triangle lies on the left of the oriented edge.
    pub fn sign(&self) -> i64 {
        if self.flip {
            -1
        } else {
            1
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeKind {
    Boundary,
    Internal,
    SelfFolded,
}

/// JSON form of a side; the orientation flag may be omitted.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SideSpec {
    pub edge: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flip: Option<bool>,
}

/// JSON form of a triangulation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TriangulationSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface: Option<SurfaceSig>,
    pub triangles: Vec<[SideSpec; 3]>,
}

/// A validated ideal triangulation. Immutable after construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TriangulationSpec", into = "TriangulationSpec")]
pub struct IdealTriangulation {
    surface: SurfaceSig,
    triangles: Vec<[Side; 3]>,
    edge_kind: Vec<EdgeKind>,
    occurrences: Vec<Vec<(usize, usize)>>,
}

impl TryFrom<TriangulationSpec> for IdealTriangulation {
    type Error = TopologyError;
    fn try_from(spec: TriangulationSpec) -> Result<Self, Self::Error> {
        build_triangulation(&spec)
    }
}

impl From<IdealTriangulation> for TriangulationSpec {
    fn from(t: IdealTriangulation) -> Self {
        TriangulationSpec {
            surface: Some(t.surface.clone()),
            triangles: t
                .triangles
                .iter()
                .map(|tri| tri.map(|s| SideSpec { edge: s.edge, flip: Some(s.flip) }))
                .collect(),
        }
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let nx = self.0[y];
            self.0[y] = r;
            y = nx;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Validate a JSON triangulation record.
pub fn build_triangulation(spec: &TriangulationSpec) -> Result<IdealTriangulation, TopologyError> {
    let mut seen: HashMap<usize, Option<bool>> = HashMap::new();
    let mut tris = Vec::with_capacity(spec.triangles.len());
    for tri in &spec.triangles {
        let mut out = [Side::new(0, false); 3];
        for (s, side) in tri.iter().enumerate() {
            let flip = match side.flip {
                Some(f) => f,
                None => match seen.get(&side.edge) {
                    Some(Some(prev)) => !prev,
                    Some(None) => true,
                    None => false,
                },
            };
            seen.insert(side.edge, Some(flip));
            out[s] = Side::new(side.edge, flip);
        }
        tris.push(out);
    }
    IdealTriangulation::new(spec.surface.clone(), tris)
}

impl IdealTriangulation {
    /// Validate triangles; the signature is inferred when `None`.
    pub fn new(surface: Option<SurfaceSig>, triangles: Vec<[Side; 3]>) -> Result<Self, TopologyError> {
        let bad = |m: String| Err(TopologyError::NonTriangulable(m));
        if triangles.is_empty() {
            return bad("no triangles".into());
        }
        let n = triangles.iter().flatten().map(|s| s.edge).max().unwrap() + 1;
        let mut occurrences = vec![Vec::new(); n];
        for (t, tri) in triangles.iter().enumerate() {
            for (s, side) in tri.iter().enumerate() {
                occurrences[side.edge].push((t, s));
            }
        }
        let mut edge_kind = Vec::with_capacity(n);
        for (e, occ) in occurrences.iter().enumerate() {
            match occ.len() {
                0 => return bad(format!("edge {e} is unused (orphan index)")),
                1 => edge_kind.push(EdgeKind::Boundary),
                2 => {
                    let (a, b) = (occ[0], occ[1]);
                    if triangles[a.0][a.1].flip == triangles[b.0][b.1].flip {
                        return bad(format!("edge {e}: orientation flags of its two sides must differ"));
                    }
                    edge_kind.push(if a.0 == b.0 { EdgeKind::SelfFolded } else { EdgeKind::Internal });
                }
                k => return bad(format!("edge {e} is glued {k} times")),
            }
        }
        let mut tri = IdealTriangulation {
            surface: SurfaceSig::new(0, 0, 0, 0),
            triangles,
            edge_kind,
            occurrences,
        };
        let inferred = tri.infer_signature()?;
        if let Some(sig) = surface {
            sig.validate()?;
            if sig != inferred {
                return bad(format!(
                    "declared surface {sig:?} but the gluing gives {inferred:?} (n = {}, m = {})",
                    tri.n(),
                    tri.m()
                ));
            }
        }
        inferred.validate()?;
        if inferred.edge_count() != tri.n() as i64 || inferred.triangle_count() != tri.m() as i64 {
            return bad("Euler counts violated".into());
        }
        tri.surface = inferred;
        Ok(tri)
    }

    /// Triangles given by edge labels only, with default orientations.
    pub fn from_edges(triangles: &[[usize; 3]]) -> Result<Self, TopologyError> {
        let spec = TriangulationSpec {
            surface: None,
            triangles: triangles.iter().map(|t| t.map(|e| SideSpec { edge: e, flip: None })).collect(),
        };
        build_triangulation(&spec)
    }

    fn corner(t: usize, s: usize) -> usize {
        3 * t + s
    }

    fn infer_signature(&self) -> Result<SurfaceSig, TopologyError> {
        let m = self.m();
        let mut uf = UnionFind::new(3 * m);
        let mut comp = UnionFind::new(m);
        for occ in &self.occurrences {
            if let [(t, s), (u, r)] = occ[..] {
                uf.union(Self::corner(t, s), Self::corner(u, (r + 2) % 3));
                uf.union(Self::corner(t, (s + 2) % 3), Self::corner(u, r));
                comp.union(t, u);
            }
        }
        let mut classes = BTreeMap::new();
        for c in 0..3 * m {
            let r = uf.find(c);
            let k = classes.len();
            classes.entry(r).or_insert(k);
        }
        let p = classes.len();
        let mut bpunct = HashSet::new();
        let mut bgraph = UnionFind::new(p);
        for occ in &self.occurrences {
            if let [(t, s)] = occ[..] {
                let a = classes[&uf.find(Self::corner(t, s))];
                let b = classes[&uf.find(Self::corner(t, (s + 2) % 3))];
                bpunct.insert(a);
                bpunct.insert(b);
                bgraph.union(a, b);
            }
        }
        let b = bpunct.iter().map(|&x| bgraph.find(x)).collect::<HashSet<_>>().len();
        let components = (0..m).map(|t| comp.find(t)).collect::<HashSet<_>>().len();
        let p_bd = bpunct.len();
        // χ = (p∂ − m)/2 from the triangle count
        let twice_chi = p_bd as i64 - m as i64;
        if twice_chi % 2 != 0 {
            return Err(TopologyError::NonTriangulable("parity of the triangle count".into()));
        }
        let chi = twice_chi / 2;
        let two_g = 2 * components as i64 - b as i64 - (p as i64 - p_bd as i64) - chi;
        if two_g < 0 || two_g % 2 != 0 {
            return Err(TopologyError::NonTriangulable("gluing does not close up to a surface".into()));
        }
        Ok(SurfaceSig {
            genus: (two_g / 2) as usize,
            punctures: p,
            boundary_components: b,
            boundary_punctures: p_bd,
            components,
        })
    }

    pub fn surface(&self) -> &SurfaceSig {
        &self.surface
    }
    pub fn n(&self) -> usize {
        self.edge_kind.len()
    }
    pub fn m(&self) -> usize {
        self.triangles.len()
    }
    pub fn triangles(&self) -> &[[Side; 3]] {
        &self.triangles
    }
    pub fn side(&self, t: usize, s: usize) -> Side {
        self.triangles[t][s]
    }
    pub fn edge_kind(&self, e: usize) -> EdgeKind {
        self.edge_kind[e]
    }
    pub fn edge_kinds(&self) -> &[EdgeKind] {
        &self.edge_kind
    }
    /// Sides `(triangle, side)` carrying edge `e`, in increasing order.
    pub fn occurrences(&self, e: usize) -> &[(usize, usize)] {
        &self.occurrences[e]
    }
    pub fn internal_edges(&self) -> Vec<usize> {
        (0..self.n()).filter(|&e| self.edge_kind[e] != EdgeKind::Boundary).collect()
    }
    /// Edge labels of triangle `t`.
    pub fn edges_of(&self, t: usize) -> [usize; 3] {
        self.triangles[t].map(|s| s.edge)
    }
    /// Flat side index used by the split surface: `3t + s`.
    pub fn side_index(t: usize, s: usize) -> usize {
        3 * t + s
    }

    /// ε(a, b): sum of side signs of edge `a` in triangle `b`; zero for
    /// boundary edges and self-folded edges.
    pub fn epsilon(&self, a: usize, b: usize) -> i64 {
        if self.edge_kind[a] == EdgeKind::Boundary {
            return 0;
        }
        self.occurrences[a].iter().filter(|o| o.0 == b).map(|&(t, s)| self.triangles[t][s].sign()).sum()
    }

    /// Labels up to triangle order and rotation; orientation flags ignored.
    pub fn canonical_form(&self) -> Vec<[usize; 3]> {
        let mut out: Vec<[usize; 3]> = self
            .triangles
            .iter()
            .map(|t| {
                let e = t.map(|s| s.edge);
                (0..3).map(|r| [e[r], e[(r + 1) % 3], e[(r + 2) % 3]]).min().unwrap()
            })
            .collect();
        out.sort();
        out
    }

    /// Equality as indexed triangulations (combinatorial isomorphism that
    /// preserves the indexing).
    pub fn same_as(&self, other: &IdealTriangulation) -> bool {
        self.surface == other.surface && self.canonical_form() == other.canonical_form()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("serializable")
    }
}

impl fmt::Display for IdealTriangulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tris: Vec<String> = self.triangles.iter().map(|t| format!("{:?}", t.map(|s| s.edge))).collect();
        write!(f, "{}", tris.join(" "))
    }
}

/// Antisymmetric n×n integer matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaMatrix {
    pub entries: Vec<Vec<i64>>,
}

impl SigmaMatrix {
    pub fn n(&self) -> usize {
        self.entries.len()
    }
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i][j]
    }
    /// σ(α, β) = Σ α_i β_j σ_ij.
    pub fn pair(&self, a: &[i64], b: &[i64]) -> i64 {
        let mut acc = 0;
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                acc += ai * bj * self.entries[i][j];
            }
        }
        acc
    }
}

/// σ_ij = a_ij − a_ji where a_ij counts corners with λ_i on the left side
/// and λ_j on the right.
pub fn sigma_form(lambda: &IdealTriangulation) -> SigmaMatrix {
    let n = lambda.n();
    let mut a = vec![vec![0i64; n]; n];
    for tri in lambda.triangles() {
        for s in 0..3 {
            a[tri[s].edge][tri[(s + 1) % 3].edge] += 1;
        }
    }
    let entries = (0..n).map(|i| (0..n).map(|j| a[i][j] - a[j][i]).collect()).collect();
    SigmaMatrix { entries }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualEdge {
    /// Edge of λ crossed by this dual edge.
    pub edge: usize,
    /// Triangle on the right of the edge.
    pub from: usize,
    /// Triangle on the left of the edge.
    pub to: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualGraph {
    pub vertices: usize,
    pub edges: Vec<DualEdge>,
    /// ε(a, b) for every edge a and triangle b.
    pub epsilon: Vec<Vec<i64>>,
}

impl DualGraph {
    pub fn components(&self) -> usize {
        let mut uf = UnionFind::new(self.vertices);
        for e in &self.edges {
            uf.union(e.from, e.to);
        }
        (0..self.vertices).map(|v| uf.find(v)).collect::<HashSet<_>>().len()
    }

    pub fn betti1(&self) -> usize {
        self.edges.len() + self.components() - self.vertices
    }

    pub fn valence(&self, v: usize) -> usize {
        self.edges.iter().map(|e| (e.from == v) as usize + (e.to == v) as usize).sum()
    }
}

/// One vertex per triangle, one dual edge per internal edge (self-folded
/// edges give loops), oriented from the right triangle to the left one.
pub fn dual_graph(lambda: &IdealTriangulation) -> DualGraph {
    let mut edges = Vec::new();
    for e in lambda.internal_edges() {
        let occ = lambda.occurrences(e);
        let (a, b) = (occ[0], occ[1]);
        let left_first = !lambda.side(a.0, a.1).flip;
        let (to, from) = if left_first { (a.0, b.0) } else { (b.0, a.0) };
        edges.push(DualEdge { edge: e, from, to });
    }
    let epsilon = (0..lambda.n()).map(|a| (0..lambda.m()).map(|b| lambda.epsilon(a, b)).collect()).collect();
    DualGraph { vertices: lambda.m(), edges, epsilon }
}

/// Z_N coefficient vector indexed by the edges of λ.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HomologyClass {
    pub modulus: u32,
    pub coeffs: Vec<u32>,
}

impl HomologyClass {
    pub fn zero(n: usize, modulus: u32) -> Self {
        HomologyClass { modulus, coeffs: vec![0; n] }
    }

    pub fn from_ints(coeffs: &[i64], modulus: u32) -> Self {
        let m = modulus as i64;
        HomologyClass { modulus, coeffs: coeffs.iter().map(|&c| c.rem_euclid(m) as u32).collect() }
    }

    pub fn add(&self, other: &HomologyClass) -> HomologyClass {
        let m = self.modulus;
        HomologyClass {
            modulus: m,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a + b) % m).collect(),
        }
    }

    pub fn neg(&self) -> HomologyClass {
        let m = self.modulus;
        HomologyClass { modulus: m, coeffs: self.coeffs.iter().map(|&a| (m - a) % m).collect() }
    }

    pub fn scale(&self, k: u32) -> HomologyClass {
        let m = self.modulus as u64;
        HomologyClass {
            modulus: self.modulus,
            coeffs: self.coeffs.iter().map(|&a| ((a as u64 * k as u64) % m) as u32).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Signed representative in (−N/2, N/2].
    pub fn signed(&self, e: usize) -> i64 {
        let m = self.modulus as i64;
        let c = self.coeffs[e] as i64;
        if 2 * c > m {
            c - m
        } else {
            c
        }
    }

    /// Σ_a ε(a, b) c_a ≡ 0 (mod N) at every triangle b; no weight on
    /// boundary edges.
    pub fn is_cycle(&self, lambda: &IdealTriangulation) -> bool {
        let m = self.modulus as i64;
        if self.coeffs.len() != lambda.n() {
            return false;
        }
        for e in 0..lambda.n() {
            if lambda.edge_kind(e) == EdgeKind::Boundary && self.coeffs[e] != 0 {
                return false;
            }
        }
        (0..lambda.m()).all(|b| {
            let s: i64 = (0..lambda.n()).map(|a| lambda.epsilon(a, b) * self.coeffs[a] as i64).sum();
            s.rem_euclid(m) == 0
        })
    }
}

/// Fundamental cycles of a spanning forest of Γ. They form a Z_N-basis of
/// Ker ∂₁ for every modulus N; the group has N^{b₁} elements.
pub fn homology_cycles(gamma: &DualGraph, n_edges: usize, modulus: u32) -> Vec<HomologyClass> {
    let v = gamma.vertices;
    let mut parent: Vec<Option<(usize, i64)>> = vec![None; v];
    let mut visited = vec![false; v];
    let mut tree_edges = HashSet::new();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); v];
    for (k, e) in gamma.edges.iter().enumerate() {
        adj[e.from].push((k, e.to));
        adj[e.to].push((k, e.from));
    }
    for root in 0..v {
        if visited[root] {
            continue;
        }
        visited[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            for &(k, y) in &adj[x] {
                if !visited[y] {
                    visited[y] = true;
                    tree_edges.insert(k);
                    // direction from child y up to parent x
                    let dir = if gamma.edges[k].from == y { 1 } else { -1 };
                    parent[y] = Some((k, dir));
                    queue.push_back(y);
                }
            }
        }
    }
    let path_to_root = |mut x: usize, coeffs: &mut Vec<i64>, sign: i64| {
        while let Some((k, dir)) = parent[x] {
            coeffs[gamma.edges[k].edge] += sign * dir;
            let e = gamma.edges[k];
            x = if e.from == x { e.to } else { e.from };
        }
    };
    let mut out = Vec::new();
    for (k, e) in gamma.edges.iter().enumerate() {
        if tree_edges.contains(&k) {
            continue;
        }
        let mut c = vec![0i64; n_edges];
        c[e.edge] += 1;
        path_to_root(e.to, &mut c, 1);
        path_to_root(e.from, &mut c, -1);
        out.push(HomologyClass::from_ints(&c, modulus));
    }
    out
}

/// Every element of the group spanned by `basis` (N^{|basis|} classes).
pub fn enumerate_classes(basis: &[HomologyClass], n_edges: usize, modulus: u32) -> Vec<HomologyClass> {
    let mut out = vec![HomologyClass::zero(n_edges, modulus)];
    for b in basis {
        let mut next = Vec::with_capacity(out.len() * modulus as usize);
        for c in &out {
            for k in 0..modulus {
                next.push(c.add(&b.scale(k)));
            }
        }
        out = next;
    }
    out
}

/// All homology classes of λ over Z_N.
pub fn all_classes(lambda: &IdealTriangulation, modulus: u32) -> Vec<HomologyClass> {
    let g = dual_graph(lambda);
    enumerate_classes(&homology_cycles(&g, lambda.n(), modulus), lambda.n(), modulus)
}

/// Fusion map from a split surface (μ on R) to λ on S, as the s×n matrix
/// whose column i is the image of e_i.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FusionMap {
    pub matrix: Vec<Vec<i64>>,
}

impl FusionMap {
    pub fn rows(&self) -> usize {
        self.matrix.len()
    }
    pub fn cols(&self) -> usize {
        self.matrix.first().map_or(0, |r| r.len())
    }

    pub fn identity(n: usize) -> Self {
        FusionMap { matrix: (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect() }
    }

    /// j(α) for an exponent vector over λ.
    pub fn apply(&self, alpha: &[i64]) -> Vec<i64> {
        self.matrix.iter().map(|row| row.iter().zip(alpha).map(|(a, b)| a * b).sum()).collect()
    }

    /// j ∘ other, where `other` maps into the source of `self`.
    pub fn compose(&self, inner: &FusionMap) -> FusionMap {
        // (self ∘ inner) as maps on exponent vectors: first inner, then self.
        // Here `inner: λ → λ'` and `self: λ' → λ''`.
        let rows = self.rows();
        let cols = inner.cols();
        let mid = inner.rows();
        let matrix = (0..rows)
            .map(|r| (0..cols).map(|c| (0..mid).map(|k| self.matrix[r][k] * inner.matrix[k][c]).sum()).collect())
            .collect();
        FusionMap { matrix }
    }

    /// σ(v, w) = η(jv, jw) on all basis pairs, each column with one or two
    /// entries, pairwise disjoint supports.
    pub fn is_compatible(&self, lambda: &IdealTriangulation, mu: &IdealTriangulation) -> bool {
        let sigma = sigma_form(lambda);
        let eta = sigma_form(mu);
        let n = lambda.n();
        if self.cols() != n || self.rows() != mu.n() {
            return false;
        }
        let cols: Vec<Vec<i64>> = (0..n).map(|i| self.matrix.iter().map(|r| r[i]).collect()).collect();
        let mut used = vec![false; self.rows()];
        for c in &cols {
            let nz = c.iter().filter(|&&x| x != 0).count();
            if !(1..=2).contains(&nz) || c.iter().any(|&x| x != 0 && x != 1) {
                return false;
            }
            for (r, &x) in c.iter().enumerate() {
                if x != 0 {
                    if used[r] {
                        return false;
                    }
                    used[r] = true;
                }
            }
        }
        (0..n).all(|i| (0..n).all(|j| sigma.get(i, j) == eta.pair(&cols[i], &cols[j])))
    }
}

/// Cut λ along the given internal edges. The second occurrence of the k-th
/// split edge (in increasing order) becomes edge `n + k`; other labels are
/// kept.
pub fn split_along(lambda: &IdealTriangulation, edges: &[usize]) -> Result<(IdealTriangulation, FusionMap), TopologyError> {
    let mut cut: Vec<usize> = edges.to_vec();
    cut.sort_unstable();
    cut.dedup();
    for &e in &cut {
        if e >= lambda.n() || lambda.edge_kind(e) == EdgeKind::Boundary {
            return Err(TopologyError::InvalidEdge(e));
        }
    }
    let n = lambda.n();
    let mut tris = lambda.triangles.clone();
    for (k, &e) in cut.iter().enumerate() {
        let (t, s) = lambda.occurrences(e)[1];
        tris[t][s].edge = n + k;
    }
    let mu = IdealTriangulation::new(None, tris)?;
    let mut matrix = vec![vec![0i64; n]; n + cut.len()];
    for i in 0..n {
        matrix[i][i] = 1;
    }
    for (k, &e) in cut.iter().enumerate() {
        matrix[n + k][e] = 1;
    }
    Ok((mu, FusionMap { matrix }))
}

/// Split along every internal edge, numbering side (t, s) as edge 3t + s.
pub fn split_to_triangles(lambda: &IdealTriangulation) -> (IdealTriangulation, FusionMap) {
    let m = lambda.m();
    let tris: Vec<[Side; 3]> = (0..m)
        .map(|t| [0, 1, 2].map(|s| Side::new(3 * t + s, lambda.side(t, s).flip)))
        .collect();
    let mu = IdealTriangulation::new(None, tris).expect("disjoint triangles are valid");
    let mut matrix = vec![vec![0i64; lambda.n()]; 3 * m];
    for (t, tri) in lambda.triangles().iter().enumerate() {
        for (s, side) in tri.iter().enumerate() {
            matrix[3 * t + s][side.edge] = 1;
        }
    }
    (mu, FusionMap { matrix })
}

/// The labels of the square around an internal, non-self-folded edge,
/// named after the standard picture: T1 = [j, i, m] and T2 = [i, k, l] up
/// to rotation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SquareLabels {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub l: usize,
    pub m: usize,
    pub t1: usize,
    pub s1: usize,
    pub t2: usize,
    pub s2: usize,
}

pub fn square_labels(lambda: &IdealTriangulation, i: usize) -> Result<SquareLabels, TopologyError> {
    match lambda.edge_kind(i) {
        EdgeKind::Boundary => Err(TopologyError::BoundaryEdge(i)),
        EdgeKind::SelfFolded => Err(TopologyError::InvalidEdge(i)),
        EdgeKind::Internal => {
            let occ = lambda.occurrences(i);
            let ((t1, s1), (t2, s2)) = (occ[0], occ[1]);
            let e1 = lambda.edges_of(t1);
            let e2 = lambda.edges_of(t2);
            Ok(SquareLabels {
                i,
                m: e1[(s1 + 1) % 3],
                j: e1[(s1 + 2) % 3],
                k: e2[(s2 + 1) % 3],
                l: e2[(s2 + 2) % 3],
                t1,
                s1,
                t2,
                s2,
            })
        }
    }
}

/// Diagonal exchange Δ_i. Self-folded edges are returned unchanged.
pub fn flip(lambda: &IdealTriangulation, i: usize) -> Result<IdealTriangulation, TopologyError> {
    if i >= lambda.n() {
        return Err(TopologyError::InvalidEdge(i));
    }
    if lambda.edge_kind(i) == EdgeKind::SelfFolded {
        return Ok(lambda.clone());
    }
    let sq = square_labels(lambda, i)?;
    let a = lambda.side(sq.t1, (sq.s1 + 1) % 3);
    let b = lambda.side(sq.t1, (sq.s1 + 2) % 3);
    let c = lambda.side(sq.t2, (sq.s2 + 1) % 3);
    let d = lambda.side(sq.t2, (sq.s2 + 2) % 3);
    let mut tris = lambda.triangles.clone();
    tris[sq.t1] = [b, c, Side::new(i, false)];
    tris[sq.t2] = [a, Side::new(i, true), d];
    IdealTriangulation::new(Some(lambda.surface.clone()), tris)
}

fn check_perm(tau: &[usize], n: usize) -> Result<(), TopologyError> {
    if tau.len() != n {
        return Err(TopologyError::InvalidPermutation(format!("length {} for {} edges", tau.len(), n)));
    }
    let mut seen = vec![false; n];
    for &x in tau {
        if x >= n || seen[x] {
            return Err(TopologyError::InvalidPermutation(format!("{tau:?}")));
        }
        seen[x] = true;
    }
    Ok(())
}

pub fn invert_perm(tau: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; tau.len()];
    for (g, &t) in tau.iter().enumerate() {
        inv[t] = g;
    }
    inv
}

/// Relabel edges so that λ'_g = λ_{τ(g)}.
pub fn reindex(lambda: &IdealTriangulation, tau: &[usize]) -> Result<IdealTriangulation, TopologyError> {
    check_perm(tau, lambda.n())?;
    let inv = invert_perm(tau);
    let tris = lambda.triangles.iter().map(|t| t.map(|s| Side::new(inv[s.edge], s.flip))).collect();
    IdealTriangulation::new(Some(lambda.surface.clone()), tris)
}

/// Elementary move of the flip groupoid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Move {
    Flip(usize),
    /// λ'_g = λ_{τ(g)}.
    Reindex(Vec<usize>),
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Flip(i) => write!(f, "flip {i}"),
            Move::Reindex(t) => {
                let s: Vec<String> = t.iter().map(|x| x.to_string()).collect();
                write!(f, "reindex {}", s.join(","))
            }
        }
    }
}

impl std::str::FromStr for Move {
    type Err = TopologyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || TopologyError::InvalidPermutation(format!("cannot parse move '{s}'"));
        let mut it = s.split_whitespace();
        match (it.next(), it.next(), it.next()) {
            (Some("flip"), Some(i), None) => Ok(Move::Flip(i.parse().map_err(|_| bad())?)),
            (Some("reindex"), Some(p), None) => {
                let v: Result<Vec<usize>, _> = p.split(',').map(|x| x.trim().parse()).collect();
                Ok(Move::Reindex(v.map_err(|_| bad())?))
            }
            _ => Err(bad()),
        }
    }
}

pub fn apply_move(lambda: &IdealTriangulation, mv: &Move) -> Result<IdealTriangulation, TopologyError> {
    match mv {
        Move::Flip(i) => flip(lambda, *i),
        Move::Reindex(t) => reindex(lambda, t),
    }
}

pub fn apply_moves(lambda: &IdealTriangulation, moves: &[Move]) -> Result<IdealTriangulation, TopologyError> {
    let mut cur = lambda.clone();
    for mv in moves {
        cur = apply_move(&cur, mv)?;
    }
    Ok(cur)
}

/// Combinatorial isomorphism between two triangulation records: triangle
/// `t` of the source goes to triangle `tri[t].0` with side `s` landing on
/// side `(s + tri[t].1) % 3`; edge `e` goes to `edge[e]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Iso {
    pub tri: Vec<(usize, usize)>,
    pub edge: Vec<usize>,
}

impl Iso {
    pub fn identity(lambda: &IdealTriangulation) -> Self {
        Iso { tri: (0..lambda.m()).map(|t| (t, 0)).collect(), edge: (0..lambda.n()).collect() }
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &Iso) -> Iso {
        Iso {
            tri: self.tri.iter().map(|&(t, r)| (other.tri[t].0, (r + other.tri[t].1) % 3)).collect(),
            edge: self.edge.iter().map(|&e| other.edge[e]).collect(),
        }
    }

    pub fn is_valid(&self, a: &IdealTriangulation, b: &IdealTriangulation) -> bool {
        if self.tri.len() != a.m() || a.m() != b.m() || self.edge.len() != a.n() || a.n() != b.n() {
            return false;
        }
        let mut hit = vec![false; b.m()];
        for &(t, _) in &self.tri {
            if t >= b.m() || hit[t] {
                return false;
            }
            hit[t] = true;
        }
        (0..a.m()).all(|t| {
            let (u, r) = self.tri[t];
            (0..3).all(|s| b.side(u, (s + r) % 3).edge == self.edge[a.side(t, s).edge])
        })
    }

    /// Number of sides whose orientation flag is preserved.
    pub fn flag_agreement(&self, a: &IdealTriangulation, b: &IdealTriangulation) -> usize {
        (0..a.m())
            .map(|t| {
                let (u, r) = self.tri[t];
                (0..3).filter(|&s| b.side(u, (s + r) % 3).flip == a.side(t, s).flip).count()
            })
            .sum()
    }

    /// Update after flipping `e` in the source and `edge[e]` in the target.
    /// Both arguments are the records before the flip.
    pub fn after_flip(&self, a: &IdealTriangulation, b: &IdealTriangulation, e: usize) -> Result<Iso, TopologyError> {
        if a.edge_kind(e) == EdgeKind::SelfFolded {
            return Ok(self.clone());
        }
        let sa = square_labels(a, e)?;
        let sb = square_labels(b, self.edge[e])?;
        let mut tri = self.tri.clone();
        if self.tri[sa.t1].0 == sb.t1 {
            tri[sa.t1] = (sb.t1, 0);
            tri[sa.t2] = (sb.t2, 0);
        } else {
            tri[sa.t1] = (sb.t2, 2);
            tri[sa.t2] = (sb.t1, 1);
        }
        Ok(Iso { tri, edge: self.edge.clone() })
    }

    /// Relabelling of the target by a reindex move λ'_g = λ_{τ(g)}.
    pub fn after_target_reindex(&self, tau: &[usize]) -> Iso {
        let inv = invert_perm(tau);
        Iso { tri: self.tri.clone(), edge: self.edge.iter().map(|&e| inv[e]).collect() }
    }

    pub fn after_source_reindex(&self, tau: &[usize]) -> Iso {
        // new source label g was old label τ(g)
        Iso { tri: self.tri.clone(), edge: tau.iter().map(|&t| self.edge[t]).collect() }
    }
}

/// The identification of λ with Δ_e(Δ_e(λ)): both records describe the same
/// triangles, but the flip rule swaps the two triangles of the square.
pub fn double_flip_iso(lambda: &IdealTriangulation, e: usize) -> Result<Iso, TopologyError> {
    let mut iso = Iso::identity(lambda);
    if lambda.edge_kind(e) == EdgeKind::SelfFolded {
        return Ok(iso);
    }
    let sq = square_labels(lambda, e)?;
    iso.tri[sq.t2] = (sq.t1, (6 - sq.s2 - 1) % 3);
    iso.tri[sq.t1] = (sq.t2, (4 - sq.s1) % 3);
    Ok(iso)
}

/// All isomorphisms a → b; with `edge_map` given, only those inducing it.
pub fn isomorphisms(a: &IdealTriangulation, b: &IdealTriangulation, edge_map: Option<&[usize]>) -> Vec<Iso> {
    if a.m() != b.m() || a.n() != b.n() || a.surface() != b.surface() {
        return vec![];
    }
    let m = a.m();
    // connected components of a, each seeded independently
    let mut comp_of = vec![usize::MAX; m];
    let mut seeds = Vec::new();
    for t0 in 0..m {
        if comp_of[t0] != usize::MAX {
            continue;
        }
        let c = seeds.len();
        seeds.push(t0);
        let mut q = VecDeque::from([t0]);
        comp_of[t0] = c;
        while let Some(t) = q.pop_front() {
            for s in 0..3 {
                for &(u, _) in a.occurrences(a.side(t, s).edge) {
                    if comp_of[u] == usize::MAX {
                        comp_of[u] = c;
                        q.push_back(u);
                    }
                }
            }
        }
    }
    let mut results = Vec::new();
    let mut partial: Vec<Option<(usize, usize)>> = vec![None; m];
    extend_iso(a, b, &seeds, 0, &mut partial, edge_map, &mut results);
    results
}

fn extend_iso(
    a: &IdealTriangulation,
    b: &IdealTriangulation,
    seeds: &[usize],
    k: usize,
    partial: &mut Vec<Option<(usize, usize)>>,
    edge_map: Option<&[usize]>,
    out: &mut Vec<Iso>,
) {
    if k == seeds.len() {
        let tri: Vec<(usize, usize)> = partial.iter().map(|x| x.unwrap()).collect();
        let mut edge = vec![usize::MAX; a.n()];
        for t in 0..a.m() {
            let (u, r) = tri[t];
            for s in 0..3 {
                edge[a.side(t, s).edge] = b.side(u, (s + r) % 3).edge;
            }
        }
        let iso = Iso { tri, edge };
        if iso.is_valid(a, b) && edge_map.is_none_or(|em| em == iso.edge.as_slice()) {
            out.push(iso);
        }
        return;
    }
    let used: HashSet<usize> = partial.iter().flatten().map(|x| x.0).collect();
    for u in 0..b.m() {
        if used.contains(&u) {
            continue;
        }
        for r in 0..3 {
            let saved = partial.clone();
            if propagate(a, b, seeds[k], (u, r), partial) {
                extend_iso(a, b, seeds, k + 1, partial, edge_map, out);
            }
            *partial = saved;
        }
    }
}

fn propagate(
    a: &IdealTriangulation,
    b: &IdealTriangulation,
    t0: usize,
    img: (usize, usize),
    partial: &mut [Option<(usize, usize)>],
) -> bool {
    let mut taken: HashSet<usize> = partial.iter().flatten().map(|x| x.0).collect();
    if taken.contains(&img.0) {
        return false;
    }
    partial[t0] = Some(img);
    taken.insert(img.0);
    let mut q = VecDeque::from([t0]);
    while let Some(t) = q.pop_front() {
        let (u, r) = partial[t].unwrap();
        for s in 0..3 {
            let ea = a.side(t, s).edge;
            let sb = (s + r) % 3;
            let eb = b.side(u, sb).edge;
            let (ka, kb) = (a.edge_kind(ea), b.edge_kind(eb));
            if ka != kb {
                return false;
            }
            if ka == EdgeKind::Boundary {
                continue;
            }
            let other_a = *a.occurrences(ea).iter().find(|&&o| o != (t, s)).unwrap();
            let other_b = *b.occurrences(eb).iter().find(|&&o| o != (u, sb)).unwrap();
            let rot = (other_b.1 + 3 - other_a.1) % 3;
            match partial[other_a.0] {
                Some(x) => {
                    if x != (other_b.0, rot) {
                        return false;
                    }
                }
                None => {
                    if taken.contains(&other_b.0) {
                        return false;
                    }
                    partial[other_a.0] = Some((other_b.0, rot));
                    taken.insert(other_b.0);
                    q.push_back(other_a.0);
                }
            }
        }
    }
    true
}

/// The isomorphism preferred for identifications: maximal preservation of
/// orientation flags, then lexicographically smallest.
pub fn best_isomorphism(a: &IdealTriangulation, b: &IdealTriangulation, edge_map: Option<&[usize]>) -> Option<Iso> {
    let mut all = isomorphisms(a, b, edge_map);
    all.sort_by(|x, y| {
        y.flag_agreement(a, b).cmp(&x.flag_agreement(a, b)).then_with(|| x.tri.cmp(&y.tri))
    });
    all.into_iter().next()
}

pub const DEFAULT_SEARCH_BUDGET: usize = 100_000;

/// Breadth-first search for a move sequence from λ to λ'. Flips first; a
/// final reindex is appended when the match holds only up to labels.
pub fn flip_path(lambda: &IdealTriangulation, target: &IdealTriangulation, budget: usize) -> Result<Vec<Move>, TopologyError> {
    if lambda.surface() != target.surface() || lambda.n() != target.n() {
        return Err(TopologyError::NotIsomorphic);
    }
    // exact label matches win if they appear within two flips of the
    // shallowest match up to relabelling
    const WINDOW: usize = 2;
    let goal = target.canonical_form();
    let mut seen: HashSet<Vec<[usize; 3]>> = HashSet::new();
    let mut queue: VecDeque<(IdealTriangulation, Vec<Move>)> = VecDeque::new();
    let mut relabel: Option<Vec<Move>> = None;
    seen.insert(lambda.canonical_form());
    queue.push_back((lambda.clone(), vec![]));
    while let Some((cur, path)) = queue.pop_front() {
        if let Some(r) = &relabel {
            if path.len() > r.len() - 1 + WINDOW {
                break;
            }
        }
        if cur.canonical_form() == goal {
            return Ok(path);
        }
        if relabel.is_none() {
            if let Some(iso) = best_isomorphism(&cur, target, None) {
                // λ'_g = cur_{τ(g)}: τ is the inverse of the edge map
                let mut p = path.clone();
                p.push(Move::Reindex(invert_perm(&iso.edge)));
                relabel = Some(p);
            }
        }
        for e in cur.internal_edges() {
            if cur.edge_kind(e) == EdgeKind::SelfFolded {
                continue;
            }
            let next = flip(&cur, e)?;
            let key = next.canonical_form();
            if seen.contains(&key) {
                continue;
            }
            if seen.len() >= budget {
                return relabel.ok_or(TopologyError::SearchBudgetExceeded(budget));
            }
            seen.insert(key);
            let mut p = path.clone();
            p.push(Move::Flip(e));
            queue.push_back((next, p));
        }
    }
    relabel.ok_or(TopologyError::NotIsomorphic)
}

/// A mapping class presented on λ: a move sequence from λ to a record of
/// φ(λ), together with the identification of λ's triangles with those of
/// the final record (the edge part is the induced relabelling).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingClass {
    pub moves: Vec<Move>,
    pub iso: Iso,
}

impl MappingClass {
    pub fn identity(lambda: &IdealTriangulation) -> Self {
        MappingClass { moves: vec![], iso: Iso::identity(lambda) }
    }

    /// Apply `moves` and identify the result with λ. When several
    /// identifications exist the orientation-preserving-most one is used.
    pub fn from_moves(lambda: &IdealTriangulation, moves: Vec<Move>) -> Result<Self, TopologyError> {
        let fin = apply_moves(lambda, &moves)?;
        let iso = best_isomorphism(lambda, &fin, None).ok_or(TopologyError::NotIsomorphic)?;
        Ok(MappingClass { moves, iso })
    }

    /// As [`MappingClass::from_moves`] with a prescribed edge relabelling.
    pub fn from_moves_with_edges(lambda: &IdealTriangulation, moves: Vec<Move>, edge_map: &[usize]) -> Result<Self, TopologyError> {
        let fin = apply_moves(lambda, &moves)?;
        let iso = best_isomorphism(lambda, &fin, Some(edge_map)).ok_or(TopologyError::NotIsomorphic)?;
        Ok(MappingClass { moves, iso })
    }

    pub fn with_iso(lambda: &IdealTriangulation, moves: Vec<Move>, iso: Iso) -> Result<Self, TopologyError> {
        let fin = apply_moves(lambda, &moves)?;
        if !iso.is_valid(lambda, &fin) {
            return Err(TopologyError::NotIsomorphic);
        }
        Ok(MappingClass { moves, iso })
    }

    pub fn final_triangulation(&self, lambda: &IdealTriangulation) -> Result<IdealTriangulation, TopologyError> {
        apply_moves(lambda, &self.moves)
    }

    /// The edge relabelling induced on λ: edge e goes to edge π(e) of the
    /// final record.
    pub fn edge_map(&self) -> &[usize] {
        &self.iso.edge
    }

    /// The same mapping class presented on Δ_e(λ).
    pub fn conjugate_by_flip(&self, lambda: &IdealTriangulation, e: usize) -> Result<(IdealTriangulation, MappingClass), TopologyError> {
        if lambda.edge_kind(e) != EdgeKind::Internal {
            return Err(TopologyError::InvalidEdge(e));
        }
        let fin = self.final_triangulation(lambda)?;
        let pe = self.iso.edge[e];
        let lam1 = flip(lambda, e)?;
        let fin1 = flip(&fin, pe)?;
        // φ on the flipped records
        let iso1 = self.iso.after_flip(lambda, &fin, e)?;
        // track the record reached by flipping back and replaying the moves
        let lam_back = flip(&lam1, e)?;
        let mut corr = double_flip_iso(lambda, e)?;
        let mut a = lambda.clone();
        let mut b = lam_back.clone();
        for mv in &self.moves {
            match mv {
                Move::Flip(i) => {
                    corr = corr.after_flip(&a, &b, *i)?;
                    a = flip(&a, *i)?;
                    b = flip(&b, *i)?;
                }
                Move::Reindex(t) => {
                    corr = corr.after_source_reindex(t).after_target_reindex(t);
                    a = reindex(&a, t)?;
                    b = reindex(&b, t)?;
                }
            }
        }
        corr = corr.after_flip(&a, &b, pe)?;
        let mut moves = vec![Move::Flip(e)];
        moves.extend(self.moves.iter().cloned());
        moves.push(Move::Flip(pe));
        let iso = iso1.then(&corr);
        let mc = MappingClass::with_iso(&lam1, moves, iso)?;
        debug_assert!(fin1.same_as(&mc.final_triangulation(&lam1)?));
        Ok((lam1, mc))
    }
}

/// Standard small surfaces used by examples, tests and the CLI.
pub mod examples {
    use super::*;

    pub fn triangle() -> IdealTriangulation {
        IdealTriangulation::from_edges(&[[0, 1, 2]]).unwrap()
    }

    /// Square with diagonal i = 0 and sides j, k, l, m = 1, 2, 3, 4:
    /// T1 = [j, i, m], T2 = [i, k, l].
    pub fn square() -> IdealTriangulation {
        IdealTriangulation::from_edges(&[[1, 0, 4], [0, 2, 3]]).unwrap()
    }

    /// Fan triangulation of an ideal p-gon from vertex 0. Sides are edges
    /// 0..p, diagonals p..2p−3.
    pub fn polygon(p: usize) -> IdealTriangulation {
        assert!(p >= 3);
        let diag = |k: usize| p + k - 2; // diagonal from vertex 0 to vertex k, 2 ≤ k ≤ p−2
        let mut tris = Vec::new();
        for k in 1..p - 1 {
            // triangle (0, k, k+1); clockwise sides
            let a = if k == 1 { 0 } else { diag(k) };
            let b = k;
            let c = if k + 1 == p - 1 { p - 1 } else { diag(k + 1) };
            tris.push([a, b, c]);
        }
        IdealTriangulation::from_edges(&tris).unwrap()
    }

    /// Ideal pentagon with diagonals 0 and 1.
    pub fn pentagon() -> IdealTriangulation {
        IdealTriangulation::from_edges(&[[2, 3, 0], [0, 4, 1], [1, 5, 6]]).unwrap()
    }

    /// Once-punctured torus with edges a, b, c = 0, 1, 2.
    pub fn torus() -> IdealTriangulation {
        IdealTriangulation::from_edges(&[[0, 1, 2], [1, 2, 0]]).unwrap()
    }

    /// The eight gluing patterns of a square around diagonal 0, numbered by
    /// which sides are identified: 1 none, 2 j=k, 3 j=m, 4 j=l, 5 k=m,
    /// 6 j=k and l=m, 7 j=m and k=l, 8 j=l and k=m. Labels are compacted.
    pub fn square_case(case: usize) -> IdealTriangulation {
        let raw: [[usize; 3]; 2] = match case {
            1 => [[1, 0, 4], [0, 2, 3]],
            2 => [[1, 0, 4], [0, 1, 3]],
            3 => [[1, 0, 1], [0, 2, 3]],
            4 => [[1, 0, 4], [0, 2, 1]],
            5 => [[1, 0, 2], [0, 2, 3]],
            6 => [[1, 0, 3], [0, 1, 3]],
            7 => [[1, 0, 1], [0, 2, 2]],
            8 => [[1, 0, 2], [0, 2, 1]],
            _ => panic!("square cases are numbered 1 to 8"),
        };
        let mut used: Vec<usize> = raw.iter().flatten().cloned().collect();
        used.sort_unstable();
        used.dedup();
        let tris: Vec<[usize; 3]> = raw.iter().map(|t| t.map(|e| used.binary_search(&e).unwrap())).collect();
        IdealTriangulation::from_edges(&tris).unwrap()
    }

    /// Disjoint union of `m` triangles.
    pub fn disjoint_triangles(m: usize) -> IdealTriangulation {
        let tris: Vec<[usize; 3]> = (0..m).map(|t| [3 * t, 3 * t + 1, 3 * t + 2]).collect();
        IdealTriangulation::from_edges(&tris).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::examples::*;
    use super::*;

    #[test]
    fn triangle_counts_and_sigma() {
        let t = triangle();
        assert_eq!((t.n(), t.m()), (3, 1));
        assert!(t.edge_kinds().iter().all(|&k| k == EdgeKind::Boundary));
        assert_eq!(sigma_form(&t).entries, vec![vec![0, 1, -1], vec![-1, 0, 1], vec![1, -1, 0]]);
    }

    #[test]
    fn square_and_torus_counts() {
        let s = square();
        assert_eq!((s.n(), s.m()), (5, 2));
        assert_eq!(s.surface(), &SurfaceSig::new(0, 4, 1, 4));
        let t = torus();
        assert_eq!((t.n(), t.m()), (3, 2));
        assert_eq!(t.surface(), &SurfaceSig::new(1, 1, 0, 0));
        assert_eq!(t.surface().euler_char(), -1);
    }

    #[test]
    fn rejects_bad_gluings() {
        assert!(IdealTriangulation::from_edges(&[[0, 0, 0]]).is_err());
        assert!(IdealTriangulation::from_edges(&[[0, 1, 3]]).is_err());
        let spec = TriangulationSpec {
            surface: Some(SurfaceSig::new(1, 1, 0, 0)),
            triangles: vec![[0, 1, 2].map(|e| SideSpec { edge: e, flip: None })],
        };
        assert!(build_triangulation(&spec).is_err());
    }

    #[test]
    fn self_folded_triangle_in_punctured_monogon() {
        // a triangle with two sides glued: once-punctured monogon
        let t = IdealTriangulation::from_edges(&[[0, 1, 1]]).unwrap();
        assert_eq!(t.edge_kind(1), EdgeKind::SelfFolded);
        assert_eq!(t.surface(), &SurfaceSig::new(0, 2, 1, 1));
        assert_eq!(t.epsilon(1, 0), 0);
        assert!(flip(&t, 1).unwrap().same_as(&t));
        let g = dual_graph(&t);
        assert_eq!(g.betti1(), 1);
    }

    #[test]
    fn dual_graphs() {
        assert_eq!(dual_graph(&triangle()).edges.len(), 0);
        let g = dual_graph(&square());
        assert_eq!((g.vertices, g.edges.len(), g.betti1()), (2, 1, 0));
        let g = dual_graph(&torus());
        assert_eq!((g.vertices, g.edges.len(), g.betti1()), (2, 3, 2));
        assert_eq!(g.valence(0), 3);
    }

    #[test]
    fn torus_homology_order() {
        let t = torus();
        let all = all_classes(&t, 3);
        assert_eq!(all.len(), 9);
        assert!(all.iter().all(|c| c.is_cycle(&t)));
        let distinct: HashSet<_> = all.iter().collect();
        assert_eq!(distinct.len(), 9);
    }

    #[test]
    fn polygon_has_trivial_homology() {
        for p in 3..7 {
            let t = polygon(p);
            assert_eq!((t.m(), t.n()), (p - 2, 2 * p - 3));
            assert_eq!(all_classes(&t, 5).len(), 1);
        }
    }

    #[test]
    fn split_square_along_diagonal() {
        let s = square();
        let (mu, j) = split_along(&s, &[0]).unwrap();
        assert_eq!(mu.m(), 2);
        assert_eq!(mu.surface().components, 2);
        assert_eq!(j.apply(&[1, 0, 0, 0, 0]), vec![1, 0, 0, 0, 0, 1]);
        assert!(j.is_compatible(&s, &mu));
        let (mu0, j0) = split_along(&s, &[]).unwrap();
        assert!(mu0.same_as(&s));
        assert_eq!(j0, FusionMap::identity(5));
    }

    #[test]
    fn split_torus_fully() {
        let t = torus();
        let (mu, j) = split_along(&t, &[0, 1, 2]).unwrap();
        assert_eq!(mu.m(), 2);
        assert!(mu.edge_kinds().iter().all(|&k| k == EdgeKind::Boundary));
        assert!(j.is_compatible(&t, &mu));
        let (mu0, j0) = split_to_triangles(&t);
        assert!(j0.is_compatible(&t, &mu0));
    }

    #[test]
    fn flip_square_twice() {
        let s = square();
        let s1 = flip(&s, 0).unwrap();
        assert!(!s1.same_as(&s));
        assert!(flip(&s1, 0).unwrap().same_as(&s));
        assert_eq!(flip(&s, 1), Err(TopologyError::BoundaryEdge(1)));
    }

    #[test]
    fn pentagon_relation() {
        let p = pentagon();
        let mut cur = p.clone();
        for k in 0..5 {
            cur = flip(&cur, if k % 2 == 0 { 0 } else { 1 }).unwrap();
        }
        assert!(!cur.same_as(&p));
        let back = reindex(&cur, &[1, 0, 2, 3, 4, 5, 6]).unwrap();
        assert!(back.same_as(&p));
    }

    #[test]
    fn reindex_composition() {
        let p = pentagon();
        let a = vec![1, 2, 0, 3, 4, 5, 6];
        let b = vec![0, 1, 2, 4, 3, 6, 5];
        let ab = reindex(&reindex(&p, &a).unwrap(), &b).unwrap();
        let comp: Vec<usize> = b.iter().map(|&x| a[x]).collect();
        assert!(ab.same_as(&reindex(&p, &comp).unwrap()));
        assert!(reindex(&reindex(&p, &a).unwrap(), &invert_perm(&a)).unwrap().same_as(&p));
    }

    #[test]
    fn flip_paths() {
        let s = square();
        assert!(flip_path(&s, &s, 100).unwrap().is_empty());
        assert_eq!(flip_path(&s, &flip(&s, 0).unwrap(), 100).unwrap(), vec![Move::Flip(0)]);
        let p = pentagon();
        let target = flip(&flip(&p, 0).unwrap(), 1).unwrap();
        let path = flip_path(&p, &target, 1000).unwrap();
        assert_eq!(path.len(), 2);
        assert!(apply_moves(&p, &path).unwrap().same_as(&target));
    }

    #[test]
    fn flip_path_with_relabel() {
        let t = torus();
        let target = reindex(&t, &[0, 2, 1]).unwrap();
        let path = flip_path(&t, &target, 1000).unwrap();
        assert!(apply_moves(&t, &path).unwrap().same_as(&target));
    }

    #[test]
    fn torus_isomorphisms() {
        let t = torus();
        let isos = isomorphisms(&t, &t, Some(&[0, 1, 2]));
        // identity and the triangle swap (the elliptic involution)
        assert_eq!(isos.len(), 2);
        assert_eq!(best_isomorphism(&t, &t, None).unwrap(), Iso::identity(&t));
    }

    #[test]
    fn double_flip_identification() {
        for (lam, e) in [(square(), 0), (torus(), 1), (pentagon(), 1)] {
            let back = flip(&flip(&lam, e).unwrap(), e).unwrap();
            let iso = double_flip_iso(&lam, e).unwrap();
            assert!(iso.is_valid(&lam, &back));
        }
    }

    #[test]
    fn conjugated_mapping_class_is_consistent() {
        let t = torus();
        let moves = vec![Move::Flip(0), Move::Flip(1), Move::Flip(2)];
        // three rotations identify the final record with λ
        let fin = apply_moves(&t, &moves).unwrap();
        let preserving = isomorphisms(&t, &fin, None).into_iter().filter(|i| i.flag_agreement(&t, &fin) == 6).count();
        assert_eq!(preserving, 3);
        let mc = MappingClass::from_moves_with_edges(&t, moves, &[0, 2, 1]).unwrap();
        assert_eq!(mc.edge_map(), &[0, 2, 1]);
        let (t1, mc1) = mc.conjugate_by_flip(&t, 0).unwrap();
        let fin = mc1.final_triangulation(&t1).unwrap();
        assert!(mc1.iso.is_valid(&t1, &fin));
    }

    #[test]
    fn json_round_trip() {
        let t = torus();
        let s = serde_json::to_string(&t).unwrap();
        let back: IdealTriangulation = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
        let raw = r#"{"surface":{"g":0,"p":3,"b":1,"p_boundary":3},"triangles":[[{"edge":0},{"edge":1},{"edge":2}]]}"#;
        let tri: IdealTriangulation = serde_json::from_str(raw).unwrap();
        assert_eq!(tri.n(), 3);
    }
}
