//! Oriented graphs, configurations in `G^E`, the gauge action of `G^V`,
//! holonomies and Wilson loops.
//!
//! Holonomies multiply right to left: the path `(e_1, ..., e_n)` has
//! holonomy `g_{e_n} ... g_{e_1}`.

use std::collections::VecDeque;
use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{max_abs, membership_check, CMatrix, GroupElement, GroupKind};

/// Vertices are `0..vertices`; edges are `(source, target)` pairs indexed by
/// position. Multi-edges and self-loops are allowed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphRepr", into = "GraphRepr")]
pub struct Graph {
    vertices: usize,
    edges: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    vertices: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<GraphRepr> for Graph {
    type Error = Error;
    fn try_from(r: GraphRepr) -> Result<Self> {
        Graph::new(r.vertices, r.edges.into_iter().map(|[s, t]| (s, t)).collect())
    }
}

impl From<Graph> for GraphRepr {
    fn from(g: Graph) -> Self {
        GraphRepr {
            vertices: g.vertices,
            edges: g.edges.into_iter().map(|(s, t)| [s, t]).collect(),
        }
    }
}

impl Graph {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if vertices == 0 {
            return Err(Error::InvalidGraph("no vertices".into()));
        }
        // Each edge touches at most two vertices.
        if vertices > edges.len().saturating_mul(2) {
            return Err(Error::InvalidGraph(format!(
                "{vertices} vertices cannot all be covered by {} edges",
                edges.len()
            )));
        }
        let mut touched = vec![false; vertices];
        for (i, &(s, t)) in edges.iter().enumerate() {
            if s >= vertices || t >= vertices {
                return Err(Error::InvalidGraph(format!("edge {i} = ({s}, {t}) leaves the vertex set")));
            }
            touched[s] = true;
            touched[t] = true;
        }
        if let Some(v) = touched.iter().position(|&b| !b) {
            return Err(Error::InvalidGraph(format!("vertex {v} is isolated")));
        }
        Ok(Self { vertices, edges })
    }

    /// The bouquet `L_r`: one vertex and `r` self-loops.
    pub fn bouquet(r: usize) -> Result<Self> {
        Self::new(1, vec![(0, 0); r])
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn source(&self, step: SignedEdge) -> usize {
        let (s, t) = self.edges[step.edge];
        if step.sign > 0 {
            s
        } else {
            t
        }
    }

    pub fn target(&self, step: SignedEdge) -> usize {
        let (s, t) = self.edges[step.edge];
        if step.sign > 0 {
            t
        } else {
            s
        }
    }

    pub fn is_connected(&self) -> bool {
        let adj = self.adjacency();
        let mut seen = vec![false; self.vertices];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &(_, w) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen.into_iter().all(|b| b)
    }

    /// For each vertex, the outgoing signed edges and the vertex they reach.
    fn adjacency(&self) -> Vec<Vec<(SignedEdge, usize)>> {
        let mut adj = vec![Vec::new(); self.vertices];
        for (e, &(s, t)) in self.edges.iter().enumerate() {
            adj[s].push((SignedEdge::forward(e), t));
            adj[t].push((SignedEdge::backward(e), s));
        }
        adj
    }

    /// All loops of length `1..=max_len` based at any vertex, freely reduced
    /// (no step immediately followed by its reverse).
    pub fn reduced_loops(&self, max_len: usize) -> Vec<Path> {
        let adj = self.adjacency();
        let mut out = Vec::new();
        let mut stack: Vec<SignedEdge> = Vec::new();
        fn walk(
            adj: &[Vec<(SignedEdge, usize)>],
            base: usize,
            at: usize,
            max_len: usize,
            stack: &mut Vec<SignedEdge>,
            out: &mut Vec<Path>,
        ) {
            if !stack.is_empty() && at == base {
                out.push(Path { steps: stack.clone() });
            }
            if stack.len() == max_len {
                return;
            }
            for &(step, next) in &adj[at] {
                if stack.last().is_some_and(|last| last.reversed() == step) {
                    continue;
                }
                stack.push(step);
                walk(adj, base, next, max_len, stack, out);
                stack.pop();
            }
        }
        for base in 0..self.vertices {
            walk(&adj, base, base, max_len, &mut stack, &mut out);
        }
        out
    }
}

/// An edge traversed forwards (`sign = 1`) or backwards (`sign = -1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "(usize, i8)", into = "(usize, i8)")]
pub struct SignedEdge {
    pub edge: usize,
    pub sign: i8,
}

impl TryFrom<(usize, i8)> for SignedEdge {
    type Error = Error;
    fn try_from((edge, sign): (usize, i8)) -> Result<Self> {
        Self::new(edge, sign)
    }
}

impl From<SignedEdge> for (usize, i8) {
    fn from(s: SignedEdge) -> Self {
        (s.edge, s.sign)
    }
}

impl SignedEdge {
    pub fn new(edge: usize, sign: i8) -> Result<Self> {
        if sign != 1 && sign != -1 {
            return Err(Error::InvalidPath(format!("sign must be ±1, got {sign}")));
        }
        Ok(Self { edge, sign })
    }

    pub const fn forward(edge: usize) -> Self {
        Self { edge, sign: 1 }
    }

    pub const fn backward(edge: usize) -> Self {
        Self { edge, sign: -1 }
    }

    pub fn reversed(self) -> Self {
        Self {
            edge: self.edge,
            sign: -self.sign,
        }
    }
}

/// A nonempty sequence of signed edges. Validity against a graph is checked
/// where the path is used.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Path {
    pub steps: Vec<SignedEdge>,
}

impl Path {
    pub fn new(steps: Vec<SignedEdge>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::InvalidPath("empty path".into()));
        }
        Ok(Self { steps })
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn reversed(&self) -> Self {
        Self {
            steps: self.steps.iter().rev().map(|s| s.reversed()).collect(),
        }
    }

    pub fn concat(&self, other: &Path) -> Self {
        let mut steps = self.steps.clone();
        steps.extend_from_slice(&other.steps);
        Self { steps }
    }

    /// Checks edge indices and step chaining; returns `(start, end)`.
    pub fn validate(&self, graph: &Graph) -> Result<(usize, usize)> {
        let first = *self.steps.first().ok_or_else(|| Error::InvalidPath("empty path".into()))?;
        for (i, s) in self.steps.iter().enumerate() {
            if s.edge >= graph.edge_count() {
                return Err(Error::InvalidPath(format!("step {i} uses unknown edge {}", s.edge)));
            }
        }
        for (i, w) in self.steps.windows(2).enumerate() {
            if graph.target(w[0]) != graph.source(w[1]) {
                return Err(Error::InvalidPath(format!("steps {i} and {} do not chain", i + 1)));
            }
        }
        let last = *self.steps.last().unwrap();
        Ok((graph.source(first), graph.target(last)))
    }

    /// Validates a closed path and returns its base vertex.
    pub fn validate_loop(&self, graph: &Graph) -> Result<usize> {
        let (start, end) = self.validate(graph)?;
        if start != end {
            return Err(Error::InvalidPath(format!("path from {start} ends at {end}, not a loop")));
        }
        Ok(start)
    }

    /// Lexicographically least cyclic rotation, ordering letters by edge then
    /// sign. Rotating a loop conjugates its holonomy and keeps its trace.
    pub fn canonical_rotation(&self) -> Self {
        let n = self.steps.len();
        let best = (0..n)
            .min_by(|&a, &b| {
                let ra = self.steps[a..].iter().chain(&self.steps[..a]);
                let rb = self.steps[b..].iter().chain(&self.steps[..b]);
                ra.cmp(rb)
            })
            .unwrap_or(0);
        let mut steps = self.steps[best..].to_vec();
        steps.extend_from_slice(&self.steps[..best]);
        Self { steps }
    }
}

/// 1-based letters, e.g. `e1^-1 e2 e2`.
impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.steps.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "e{}", s.edge + 1)?;
            if s.sign < 0 {
                f.write_str("^-1")?;
            }
        }
        Ok(())
    }
}

pub type Loop = Path;

/// One group element per edge, all of the same kind.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    graph: Graph,
    kind: GroupKind,
    values: Vec<GroupElement>,
}

impl Configuration {
    /// Builds a configuration, requiring each value to be a member at `tol`.
    pub fn new(graph: Graph, kind: GroupKind, values: Vec<GroupElement>, tol: f64) -> Result<Self> {
        if values.len() != graph.edge_count() {
            return Err(Error::GraphMismatch(format!(
                "{} values for {} edges",
                values.len(),
                graph.edge_count()
            )));
        }
        for (e, g) in values.iter().enumerate() {
            if g.kind() != kind {
                return Err(Error::KindMismatch(kind, g.kind()));
            }
            let report = membership_check(g, tol);
            if !report.passed {
                return Err(Error::NotMember {
                    kind,
                    reason: format!("edge {e}: {}", report.summary()),
                });
            }
        }
        Ok(Self { graph, kind, values })
    }

    pub fn identity(graph: Graph, kind: GroupKind) -> Self {
        let values = vec![GroupElement::identity(kind); graph.edge_count()];
        Self { graph, kind, values }
    }

    pub fn random<R: rand::Rng + ?Sized>(graph: Graph, kind: GroupKind, rng: &mut R) -> Self {
        let values = (0..graph.edge_count())
            .map(|_| crate::group::haar_sample(kind, rng))
            .collect();
        Self { graph, kind, values }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn values(&self) -> &[GroupElement] {
        &self.values
    }

    pub fn value(&self, edge: usize) -> &GroupElement {
        &self.values[edge]
    }
}

/// One group element per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeTransform {
    kind: GroupKind,
    values: Vec<GroupElement>,
}

impl GaugeTransform {
    pub fn new(kind: GroupKind, values: Vec<GroupElement>, tol: f64) -> Result<Self> {
        for (v, g) in values.iter().enumerate() {
            if g.kind() != kind {
                return Err(Error::KindMismatch(kind, g.kind()));
            }
            let report = membership_check(g, tol);
            if !report.passed {
                return Err(Error::NotMember {
                    kind,
                    reason: format!("vertex {v}: {}", report.summary()),
                });
            }
        }
        Ok(Self { kind, values })
    }

    pub fn identity(kind: GroupKind, vertices: usize) -> Self {
        Self {
            kind,
            values: vec![GroupElement::identity(kind); vertices],
        }
    }

    pub fn random<R: rand::Rng + ?Sized>(kind: GroupKind, vertices: usize, rng: &mut R) -> Self {
        Self {
            kind,
            values: (0..vertices).map(|_| crate::group::haar_sample(kind, rng)).collect(),
        }
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn values(&self) -> &[GroupElement] {
        &self.values
    }

    pub fn value(&self, vertex: usize) -> &GroupElement {
        &self.values[vertex]
    }
}

/// `(φ·g)_e = φ_{t(e)}⁻¹ g_e φ_{s(e)}`.
pub fn gauge_apply(phi: &GaugeTransform, g: &Configuration) -> Result<Configuration> {
    if phi.kind != g.kind {
        return Err(Error::KindMismatch(phi.kind, g.kind));
    }
    if phi.values.len() != g.graph.vertex_count() {
        return Err(Error::GraphMismatch(format!(
            "gauge transform has {} vertices, graph has {}",
            phi.values.len(),
            g.graph.vertex_count()
        )));
    }
    let values = g
        .graph
        .edges()
        .iter()
        .zip(&g.values)
        .map(|(&(s, t), ge)| phi.values[t].inverse().mul(ge)?.mul(&phi.values[s]))
        .collect::<Result<Vec<_>>>()?;
    Ok(Configuration {
        graph: g.graph.clone(),
        kind: g.kind,
        values,
    })
}

pub fn holonomy(g: &Configuration, p: &Path) -> Result<GroupElement> {
    p.validate(&g.graph)?;
    let mut acc = GroupElement::identity(g.kind);
    for step in &p.steps {
        acc = g.values[step.edge].pow_sign(step.sign).mul(&acc)?;
    }
    Ok(acc)
}

/// Trace of the holonomy in the natural representation.
pub fn wilson_loop(g: &Configuration, l: &Loop) -> Result<Complex64> {
    l.validate_loop(&g.graph)?;
    Ok(holonomy(g, l)?.trace())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeFixing {
    pub config: Configuration,
    /// Indices of the spanning-tree edges, in discovery order.
    pub tree_edges: Vec<usize>,
    /// The gauge transform mapping the input onto `config`.
    pub gauge: GaugeTransform,
}

/// Gauge-fixes every edge of a BFS spanning tree rooted at `root` to the
/// identity. Non-tree edges then carry the holonomies of the fundamental
/// cycles based at `root`, up to conjugation.
pub fn spanning_tree_fix(g: &Configuration, root: usize) -> Result<TreeFixing> {
    let graph = &g.graph;
    if root >= graph.vertex_count() {
        return Err(Error::InvalidGraph(format!("root {root} is not a vertex")));
    }
    let adj = graph.adjacency();
    let mut phi: Vec<Option<GroupElement>> = vec![None; graph.vertex_count()];
    phi[root] = Some(GroupElement::identity(g.kind));
    let mut tree_edges = Vec::new();
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        let phi_u = phi[u].clone().expect("visited");
        for &(step, w) in &adj[u] {
            if phi[w].is_some() {
                continue;
            }
            // Forward edge u -> w needs φ_w = g_e φ_u, backward needs g_e⁻¹ φ_u.
            let phi_w = g.values[step.edge].pow_sign(step.sign).mul(&phi_u)?;
            phi[w] = Some(phi_w);
            tree_edges.push(step.edge);
            queue.push_back(w);
        }
    }
    let values = phi
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or(Error::Disconnected)?;
    let gauge = GaugeTransform { kind: g.kind, values };
    let mut config = gauge_apply(&gauge, g)?;
    for &e in &tree_edges {
        config.values[e] = GroupElement::identity(g.kind);
    }
    Ok(TreeFixing {
        config,
        tree_edges,
        gauge,
    })
}

/// Residual `max_l ‖k A_l k⁻¹ − B_l‖_max`.
fn alignment_residual(k: &CMatrix, a: &[CMatrix], b: &[CMatrix]) -> f64 {
    let kinv = k.adjoint();
    a.iter()
        .zip(b)
        .map(|(al, bl)| max_abs(&(k * al * &kinv - bl)))
        .fold(0.0, f64::max)
}

/// Unitary polar factor of an invertible matrix.
fn polar_unitary(k: &CMatrix) -> Option<CMatrix> {
    let svd = k.clone().svd(true, true);
    if svd.singular_values.iter().any(|s| *s <= 1e-12 * svd.singular_values.max()) {
        return None;
    }
    Some(svd.u? * svd.v_t?)
}

/// Searches for `k ∈ U(m)` with `h_l(g') = k h_l(g) k⁻¹` for every loop in
/// `loops`, all based at `v`.
///
/// The intertwining equations `B_l K = K A_l` are linear in `K`; a generic
/// element of their solution space is invertible whenever any solution is,
/// and its polar factor is then a unitary solution. Returns `None` when the
/// residual of the best candidate exceeds `tol`.
pub fn align_configurations(
    g: &Configuration,
    g2: &Configuration,
    v: usize,
    loops: &[Loop],
    tol: f64,
) -> Result<Option<GroupElement>> {
    if g.kind != g2.kind {
        return Err(Error::KindMismatch(g.kind, g2.kind));
    }
    if g.graph != g2.graph {
        return Err(Error::GraphMismatch("configurations live on different graphs".into()));
    }
    let m = g.kind.matrix_dim();
    let mut a = Vec::with_capacity(loops.len());
    let mut b = Vec::with_capacity(loops.len());
    for l in loops {
        let base = l.validate_loop(&g.graph)?;
        if base != v {
            return Err(Error::InvalidPath(format!("loop based at {base}, expected {v}")));
        }
        a.push(holonomy(g, l)?.into_matrix());
        b.push(holonomy(g2, l)?.into_matrix());
    }
    if loops.is_empty() {
        return Ok(Some(GroupElement::identity(g.kind)));
    }

    // Stack (I ⊗ B_l − A_lᵀ ⊗ I) vec(K) = 0 with column-major vec, and
    // solve through the Gram matrix so the SVD stays m² × m².
    let eye = CMatrix::identity(m, m);
    let mut normal = CMatrix::zeros(m * m, m * m);
    for (al, bl) in a.iter().zip(&b) {
        let block = eye.kronecker(bl) - al.transpose().kronecker(&eye);
        normal += block.adjoint() * &block;
    }
    let eig = SymmetricEigen::new(normal);
    let scale = eig.eigenvalues.max().max(1.0);
    let null: Vec<usize> = (0..m * m)
        .filter(|&i| eig.eigenvalues[i] <= 1e-10 * scale)
        .collect();
    if null.is_empty() {
        return Ok(None);
    }
    // Fixed, irrational weights make the combination generic.
    let mut kvec = nalgebra::DVector::<Complex64>::zeros(m * m);
    for (t, &i) in null.iter().enumerate() {
        let w = Complex64::new(1.0 + (t as f64 * 0.754_877_666).fract(), (t as f64 * 0.569_840_291).fract());
        kvec += eig.eigenvectors.column(i) * w;
    }
    let kmat = DMatrix::from_column_slice(m, m, kvec.as_slice());
    let Some(k) = polar_unitary(&kmat) else {
        return Ok(None);
    };
    if alignment_residual(&k, &a, &b) > tol {
        return Ok(None);
    }
    Ok(Some(GroupElement::new(g.kind, k)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::haar_sample;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn path(steps: &[(usize, i8)]) -> Path {
        Path::new(steps.iter().map(|&(e, s)| SignedEdge::new(e, s).unwrap()).collect()).unwrap()
    }

    fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        max_abs(&(a - b)) <= tol
    }

    #[test]
    fn isolated_vertex_is_rejected() {
        assert!(Graph::new(3, vec![(0, 1)]).is_err());
        assert!(Graph::new(2, vec![(0, 2)]).is_err());
        assert!(Graph::new(usize::MAX, vec![(0, 0)]).is_err());
        assert!(Graph::new(2, vec![(0, 1), (1, 1), (0, 1)]).is_ok());
    }

    #[test]
    fn identity_gauge_leaves_configuration() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let graph = Graph::new(3, vec![(0, 1), (1, 2), (2, 0), (1, 1)]).unwrap();
        let g = Configuration::random(graph, GroupKind::u(2), &mut rng);
        let phi = GaugeTransform::identity(GroupKind::u(2), 3);
        assert_eq!(gauge_apply(&phi, &g).unwrap(), g);
    }

    #[test]
    fn self_loop_gauge_is_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let kind = GroupKind::su(3);
        let g = Configuration::random(Graph::bouquet(2).unwrap(), kind, &mut rng);
        let k = haar_sample(kind, &mut rng);
        let phi = GaugeTransform::new(kind, vec![k.clone()], 1e-10).unwrap();
        let out = gauge_apply(&phi, &g).unwrap();
        for e in 0..2 {
            let expect = k.inverse().mul(g.value(e)).unwrap().mul(&k).unwrap();
            assert!(close(out.value(e).matrix(), expect.matrix(), 1e-13));
        }
    }

    #[test]
    fn holonomy_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let kind = GroupKind::u(2);
        let l1 = Configuration::random(Graph::bouquet(1).unwrap(), kind, &mut rng);
        let h = holonomy(&l1, &path(&[(0, 1)])).unwrap();
        assert_eq!(h.matrix(), l1.value(0).matrix());
        let h = holonomy(&l1, &path(&[(0, 1), (0, -1)])).unwrap();
        assert!(close(h.matrix(), &CMatrix::identity(2, 2), 1e-14));

        let l2 = Configuration::random(Graph::bouquet(2).unwrap(), kind, &mut rng);
        let (g1, g2) = (l2.value(0).matrix(), l2.value(1).matrix());
        let h = holonomy(&l2, &path(&[(0, -1), (1, 1), (1, 1)])).unwrap();
        assert!(close(h.matrix(), &(g2 * g2 * g1.adjoint()), 1e-13));
    }

    #[test]
    fn wilson_loop_examples() {
        let id = Configuration::identity(Graph::bouquet(2).unwrap(), GroupKind::u(3));
        let w = wilson_loop(&id, &path(&[(0, 1), (1, -1), (0, 1)])).unwrap();
        assert_eq!(w, c(3.0, 0.0));

        let diag = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.0, 1.0), c(0.0, -1.0)]));
        let cfg = Configuration::new(
            Graph::bouquet(1).unwrap(),
            GroupKind::u(2),
            vec![GroupElement::new(GroupKind::u(2), diag).unwrap()],
            1e-12,
        )
        .unwrap();
        assert_eq!(wilson_loop(&cfg, &path(&[(0, 1)])).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn invalid_paths_are_rejected() {
        let graph = Graph::new(2, vec![(0, 1), (0, 1)]).unwrap();
        let cfg = Configuration::identity(graph, GroupKind::u(1));
        assert!(holonomy(&cfg, &path(&[(0, 1), (1, 1)])).is_err());
        assert!(holonomy(&cfg, &path(&[(2, 1)])).is_err());
        assert!(wilson_loop(&cfg, &path(&[(0, 1)])).is_err());
        assert!(wilson_loop(&cfg, &path(&[(0, 1), (1, -1)])).is_ok());
        assert!(SignedEdge::new(0, 0).is_err());
    }

    #[test]
    fn gauge_invariance_of_wilson_loops() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let graph = Graph::new(3, vec![(0, 1), (1, 2), (2, 0), (0, 0), (1, 2)]).unwrap();
        for kind in [GroupKind::u(2), GroupKind::so(3), GroupKind::sp(1)] {
            let g = Configuration::random(graph.clone(), kind, &mut rng);
            let phi = GaugeTransform::random(kind, 3, &mut rng);
            let gp = gauge_apply(&phi, &g).unwrap();
            for l in graph.reduced_loops(4) {
                let a = wilson_loop(&g, &l).unwrap();
                let b = wilson_loop(&gp, &l).unwrap();
                assert!((a - b).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn cocycle_and_backtrack() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let graph = Graph::new(3, vec![(0, 1), (1, 2), (2, 0), (1, 1)]).unwrap();
        let g = Configuration::random(graph, GroupKind::u(3), &mut rng);
        let p = path(&[(0, 1), (3, 1), (1, 1)]);
        let q = path(&[(2, 1), (0, 1)]);
        let pq = holonomy(&g, &p.concat(&q)).unwrap();
        let expect = holonomy(&g, &q).unwrap().mul(&holonomy(&g, &p).unwrap()).unwrap();
        assert!(close(pq.matrix(), expect.matrix(), 1e-13));
        let back = holonomy(&g, &p.concat(&p.reversed())).unwrap();
        assert!(close(back.matrix(), &CMatrix::identity(3, 3), 1e-12));
    }

    #[test]
    fn tree_fixing_on_a_tree_gives_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let graph = Graph::new(4, vec![(0, 1), (2, 1), (1, 3)]).unwrap();
        let g = Configuration::random(graph, GroupKind::u(2), &mut rng);
        let fixed = spanning_tree_fix(&g, 0).unwrap();
        assert_eq!(fixed.tree_edges.len(), 3);
        for e in 0..3 {
            assert_eq!(fixed.config.value(e).matrix(), &CMatrix::identity(2, 2));
        }
        let recomputed = gauge_apply(&fixed.gauge, &g).unwrap();
        for e in 0..3 {
            assert!(close(recomputed.value(e).matrix(), &CMatrix::identity(2, 2), 1e-12));
        }
    }

    #[test]
    fn tree_fixing_on_bouquet_is_noop() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = Configuration::random(Graph::bouquet(3).unwrap(), GroupKind::o(3), &mut rng);
        let fixed = spanning_tree_fix(&g, 0).unwrap();
        assert!(fixed.tree_edges.is_empty());
        assert_eq!(fixed.config, g);
    }

    #[test]
    fn tree_fixing_two_vertices() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let graph = Graph::new(2, vec![(0, 1), (0, 1)]).unwrap();
        let g = Configuration::random(graph.clone(), GroupKind::u(2), &mut rng);
        let fixed = spanning_tree_fix(&g, 0).unwrap();
        assert_eq!(fixed.tree_edges, vec![0]);
        // b is sent to h_{(b, a⁻¹)} = g_a⁻¹ g_b conjugated by φ_0 = 1.
        let hol = holonomy(&g, &path(&[(1, 1), (0, -1)])).unwrap();
        assert!(close(fixed.config.value(1).matrix(), hol.matrix(), 1e-12));
        for l in graph.reduced_loops(4) {
            let a = wilson_loop(&g, &l).unwrap();
            let b = wilson_loop(&fixed.config, &l).unwrap();
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn disconnected_graph_fails() {
        let graph = Graph::new(4, vec![(0, 1), (2, 3)]).unwrap();
        let g = Configuration::identity(graph, GroupKind::u(1));
        assert!(matches!(spanning_tree_fix(&g, 0), Err(Error::Disconnected)));
    }

    #[test]
    fn canonical_rotation_picks_least() {
        let l = path(&[(1, 1), (1, 1), (0, -1)]);
        assert_eq!(l.canonical_rotation(), path(&[(0, -1), (1, 1), (1, 1)]));
        assert_eq!(l.canonical_rotation().to_string(), "e1^-1 e2 e2");
    }

    #[test]
    fn alignment_recovers_gauge() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let kind = GroupKind::u(3);
        let graph = Graph::new(2, vec![(0, 1), (1, 0), (1, 1)]).unwrap();
        let g = Configuration::random(graph.clone(), kind, &mut rng);
        let phi = GaugeTransform::random(kind, 2, &mut rng);
        let gp = gauge_apply(&phi, &g).unwrap();
        let loops: Vec<Loop> = graph
            .reduced_loops(3)
            .into_iter()
            .filter(|l| l.validate_loop(&graph).unwrap() == 0)
            .collect();
        let k = align_configurations(&g, &gp, 0, &loops, 1e-9).unwrap().expect("aligned");
        // h_l(φ·g) = φ_0⁻¹ h_l(g) φ_0, so k is φ_0⁻¹ up to a central phase.
        let ratio = k.matrix() * phi.value(0).matrix();
        let phase = ratio[(0, 0)];
        assert!((phase.norm() - 1.0).abs() < 1e-9);
        assert!(close(&ratio, &(CMatrix::identity(3, 3) * phase), 1e-9));
    }

    #[test]
    fn alignment_of_identical_configurations() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let g = Configuration::random(Graph::bouquet(1).unwrap(), GroupKind::u(2), &mut rng);
        let k = align_configurations(&g, &g, 0, &[path(&[(0, 1)])], 1e-9).unwrap().unwrap();
        let a = g.value(0).matrix();
        assert!(close(&(k.matrix() * a * k.matrix().adjoint()), a, 1e-9));
    }

    #[test]
    fn alignment_fails_on_different_spectra() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let kind = GroupKind::u(2);
        let g = Configuration::random(Graph::bouquet(2).unwrap(), kind, &mut rng);
        let g2 = Configuration::random(Graph::bouquet(2).unwrap(), kind, &mut rng);
        let loops = [path(&[(0, 1)]), path(&[(1, 1)])];
        assert!(align_configurations(&g, &g2, 0, &loops, 1e-9).unwrap().is_none());
    }

    #[test]
    fn alignment_requires_base_vertex() {
        let graph = Graph::new(2, vec![(0, 1), (1, 0)]).unwrap();
        let g = Configuration::identity(graph, GroupKind::u(1));
        let l = path(&[(1, 1), (0, 1)]);
        assert!(align_configurations(&g, &g, 0, &[l], 1e-9).is_err());
    }
}
