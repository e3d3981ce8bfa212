//! Invariant operators on tensor powers of the natural representation, the
//! direct evaluation of spin networks on the bouquet graph `L_r`, and their
//! compilation into signed products of Wilson loops.
//!
//! Permutation operators use the convention `π(σ)(v_1 ⊗ … ⊗ v_d) =
//! v_{σ⁻¹(1)} ⊗ … ⊗ v_{σ⁻¹(d)}`: the vector in slot `k` moves to slot
//! `σ(k)`, so `π(σ)π(ρ) = π(σ∘ρ)`. With this convention
//! `tr(h_1 ⊗ … ⊗ h_d ∘ π(σ)) = ∏_C tr(h_{a_k} ⋯ h_{a_1})` over the cycles
//! `C = (a_1 … a_k)` of `σ`, which is the holonomy trace of the loop
//! `(e_{a_1}, …, e_{a_k})`.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::diagrams::{cycles, normalize_pairing, FlipNormalization, Pairing, Permutation};
use crate::error::{Error, Result};
use crate::graph::{wilson_loop, Configuration, Graph, Loop, Path, SignedEdge};
use crate::group::{haar_sample, CMatrix, Family, GroupElement, GroupKind};
use crate::tensor::{checked_size, DenseTensor, IntTensor, Scalar};

/// Singular values below this fraction of the largest count as zero.
pub const RANK_THRESHOLD: f64 = 1e-8;

/// Largest `m^{2d}` (number of unknowns) accepted by [`commutant_dimension`].
pub const MAX_COMMUTANT_UNKNOWNS: usize = 4096;

/// Per-edge `(p_i, q_i)`: `p_i` copies of `V` followed by `q_i` copies of `V*`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<(usize, usize)>", into = "Vec<(usize, usize)>")]
pub struct MixedSignature {
    edges: Vec<(usize, usize)>,
}

impl TryFrom<Vec<(usize, usize)>> for MixedSignature {
    type Error = Error;
    fn try_from(edges: Vec<(usize, usize)>) -> Result<Self> {
        Self::new(edges)
    }
}

impl From<MixedSignature> for Vec<(usize, usize)> {
    fn from(s: MixedSignature) -> Self {
        s.edges
    }
}

/// Where a slot of `V^{⊗p} ⊗ (V*)^{⊗q}` comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlotOrigin {
    pub edge: usize,
    pub dual: bool,
}

impl MixedSignature {
    pub fn new(edges: Vec<(usize, usize)>) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::InvalidSignature("no edges".into()));
        }
        let total = edges
            .iter()
            .try_fold(0usize, |acc, &(p, q)| acc.checked_add(p)?.checked_add(q))
            .ok_or_else(|| Error::InvalidSignature("degree overflows".into()))?;
        if total == 0 {
            return Err(Error::InvalidSignature("total degree must be at least 1".into()));
        }
        Ok(Self { edges })
    }

    /// Signature with no dual factors.
    pub fn covariant(p: Vec<usize>) -> Result<Self> {
        Self::new(p.into_iter().map(|p| (p, 0)).collect())
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn p(&self) -> usize {
        self.edges.iter().map(|e| e.0).sum()
    }

    pub fn q(&self) -> usize {
        self.edges.iter().map(|e| e.1).sum()
    }

    pub fn degree(&self) -> usize {
        self.p() + self.q()
    }

    pub fn check_kind(&self, kind: GroupKind) -> Result<()> {
        if !kind.is_unitary_track() && self.q() != 0 {
            return Err(Error::InvalidSignature(format!("{kind} uses no dual factors, but q = {}", self.q())));
        }
        Ok(())
    }

    /// Slots in per-edge order: for each edge its `p_i` primal then `q_i` dual slots.
    pub fn edge_order(&self) -> Vec<SlotOrigin> {
        let mut out = Vec::with_capacity(self.degree());
        for (edge, &(p, q)) in self.edges.iter().enumerate() {
            out.extend(std::iter::repeat_n(SlotOrigin { edge, dual: false }, p));
            out.extend(std::iter::repeat_n(SlotOrigin { edge, dual: true }, q));
        }
        out
    }

    /// Slots in gathered order: all primal slots by edge, then all dual slots by edge.
    pub fn gathered_order(&self) -> Vec<SlotOrigin> {
        let mut out = Vec::with_capacity(self.degree());
        for (edge, &(p, _)) in self.edges.iter().enumerate() {
            out.extend(std::iter::repeat_n(SlotOrigin { edge, dual: false }, p));
        }
        for (edge, &(_, q)) in self.edges.iter().enumerate() {
            out.extend(std::iter::repeat_n(SlotOrigin { edge, dual: true }, q));
        }
        out
    }

    /// `gathered_of[t]` is the gathered slot sitting at per-edge position `t`.
    fn gathered_of_edge_position(&self) -> Vec<usize> {
        let r = self.edges.len();
        let mut primal_start = vec![0; r];
        let mut dual_start = vec![0; r];
        let p = self.p();
        let (mut pa, mut qa) = (0, 0);
        for (i, &(pi, qi)) in self.edges.iter().enumerate() {
            primal_start[i] = pa;
            dual_start[i] = p + qa;
            pa += pi;
            qa += qi;
        }
        let mut out = Vec::with_capacity(self.degree());
        for (i, &(pi, qi)) in self.edges.iter().enumerate() {
            out.extend(primal_start[i]..primal_start[i] + pi);
            out.extend(dual_start[i]..dual_start[i] + qi);
        }
        out
    }
}

fn check_operator_size(m: usize, d: usize) -> Result<()> {
    checked_size(&vec![m; 2 * d]).map(|_| ())
}

/// `π(σ)` on `V^{⊗d}` with `dim V = m`, as an exact 0/1 tensor.
pub fn perm_operator(sigma: &Permutation, m: usize) -> Result<IntTensor> {
    let d = sigma.degree();
    check_operator_size(m, d)?;
    let mut t = IntTensor::zeros(vec![m; 2 * d])?;
    let n = m.pow(d as u32);
    let mut input = vec![0usize; d];
    let mut out = vec![0usize; d];
    let mut data = t.data().to_vec();
    for c in 0..n {
        let mut rest = c;
        for k in (0..d).rev() {
            input[k] = rest % m;
            rest /= m;
        }
        for k in 0..d {
            out[sigma.apply(k)] = input[k];
        }
        let row = out.iter().fold(0, |acc, &x| acc * m + x);
        data[row * n + c] = 1;
    }
    t = IntTensor::new(t.shape().to_vec(), data)?;
    Ok(t)
}

/// `I_σ ∈ End(⊗_i V^{⊗p_i} ⊗ (V*)^{⊗q_i})`, the image of `π(σ)` under
/// `End(V^{⊗p} ⊗ (V*)^{⊗q}) ≅ End(V^{⊗(p+q)})`.
///
/// `σ` acts on the gathered slot order (primal slots of all edges, then dual
/// slots of all edges). Each dual slot is transposed, since an operator on
/// `V*` in the dual basis is the transpose of the corresponding operator on
/// `V`; the result is laid out in per-edge slot order.
pub fn mixed_operator(sigma: &Permutation, signature: &MixedSignature, m: usize) -> Result<IntTensor> {
    let d = signature.degree();
    if sigma.degree() != d {
        return Err(Error::InvalidSignature(format!(
            "permutation of degree {} for signature of degree {d}",
            sigma.degree()
        )));
    }
    let base = perm_operator(sigma, m)?;
    let p = signature.p();
    let gathered_of = signature.gathered_of_edge_position();
    let mut order = vec![0; 2 * d];
    for (t, &a) in gathered_of.iter().enumerate() {
        if a >= p {
            order[t] = d + a;
            order[d + t] = a;
        } else {
            order[t] = a;
            order[d + t] = d + a;
        }
    }
    base.permute_axes(&order)
}

/// Brauer operator `J_τ ∈ End(V^{⊗d})` for an orthogonal or symplectic kind.
///
/// `J_τ = Σ ∏_{{k<l}∈τ} ⟨e_{i_k}, e_{i_l}⟩ e_{i_1} ⊗ … ⊗ e_{i_{2d}}`, read as
/// an operator through `v_1⊗…⊗v_{2d} : w_1⊗…⊗w_d ↦ ∏⟨v_i, w_i⟩ v_{d+1}⊗…⊗v_{2d}`.
/// The basis is the canonical one, orthonormal for O/SO and standard for Sp.
pub fn brauer_operator(tau: &Pairing, kind: GroupKind) -> Result<IntTensor> {
    let gram = kind.gram().map_err(|_| Error::NotOrthoSymplectic(kind))?;
    let d = tau.half_size();
    let m = kind.matrix_dim();
    check_operator_size(m, d)?;
    let pairs = tau.pairs();
    // The Gram matrix is a signed permutation: row x has one nonzero entry.
    let (gperm, gsign): (Vec<usize>, Vec<i64>) = (0..m)
        .map(|x| {
            let y = (0..m).find(|&y| gram[x * m + y] != 0).expect("nondegenerate form");
            (y, gram[x * m + y])
        })
        .unzip();
    let mut vec_form = IntTensor::zeros(vec![m; 2 * d])?;
    let mut data = vec_form.data().to_vec();
    let mut idx = vec![0usize; 2 * d];
    for choice in 0..m.pow(d as u32) {
        let mut rest = choice;
        let mut sign = 1i64;
        for &[k, l] in pairs.iter().rev() {
            let x = rest % m;
            rest /= m;
            idx[k] = x;
            idx[l] = gperm[x];
            sign *= gsign[x];
        }
        let flat = idx.iter().fold(0, |acc, &x| acc * m + x);
        data[flat] = sign;
    }
    vec_form = IntTensor::new(vec_form.shape().to_vec(), data)?;
    vector_to_operator(&vec_form, &gram, d)
}

/// Inverse of [`operator_to_vector`]: contracts the first `d` axes with the
/// form and moves the output axes to the front.
fn vector_to_operator<T: Scalar>(v: &DenseTensor<T>, gram: &[i64], d: usize) -> Result<DenseTensor<T>> {
    let g: Vec<T> = gram.iter().map(|&x| T::from_i64(x)).collect();
    let mut t = v.clone();
    for a in 0..d {
        t = t.contract_axis(a, &g)?;
    }
    let order: Vec<usize> = (d..2 * d).chain(0..d).collect();
    t.permute_axes(&order)
}

/// Reads an operator on `V^{⊗d}` as a tensor in `V^{⊗2d}` (inputs first)
/// under the identification used by [`brauer_operator`].
fn operator_to_vector<T: Scalar>(op: &DenseTensor<T>, gram_inv: &[i64], d: usize) -> Result<DenseTensor<T>> {
    let gi: Vec<T> = gram_inv.iter().map(|&x| T::from_i64(x)).collect();
    let order: Vec<usize> = (d..2 * d).chain(0..d).collect();
    let mut t = op.permute_axes(&order)?;
    for a in 0..d {
        t = t.contract_axis(a, &gi)?;
    }
    Ok(t)
}

/// `T_i = π((i, p+i))` acting on `End(V^{⊗p}) ≅ V^{⊗2p}`: a partial
/// transpose of slot `i` (0-based) taken through the invariant form.
/// On a group element in that slot it gives `ε g⁻¹`.
pub fn apply_slot_transpose<T: Scalar>(op: &DenseTensor<T>, slot: usize, kind: GroupKind) -> Result<DenseTensor<T>> {
    let gram = kind.gram().map_err(|_| Error::NotOrthoSymplectic(kind))?;
    let gram_inv = kind.gram_inverse()?;
    let (m, p) = op.operator_dims()?;
    if m != kind.matrix_dim() {
        return Err(Error::ShapeMismatch(format!("operator on dim {m}, {kind} acts on dim {}", kind.matrix_dim())));
    }
    if slot >= p {
        return Err(Error::SlotOutOfRange { slot: slot + 1, max: p });
    }
    let v = operator_to_vector(op, &gram_inv, p)?;
    let mut order: Vec<usize> = (0..2 * p).collect();
    order.swap(slot, p + slot);
    let swapped = v.permute_axes(&order)?;
    vector_to_operator(&swapped, &gram, p)
}

/// Per-slot action matrices in per-edge order: `g_i` on primal slots and the
/// contragredient `(g_i⁻¹)ᵀ` on dual slots.
pub fn slot_factors(elements: &[GroupElement], signature: &MixedSignature) -> Result<Vec<CMatrix>> {
    if elements.len() != signature.edge_count() {
        return Err(Error::ShapeMismatch(format!(
            "{} elements for a signature with {} edges",
            elements.len(),
            signature.edge_count()
        )));
    }
    Ok(signature
        .edge_order()
        .into_iter()
        .map(|s| {
            let g = &elements[s.edge];
            if s.dual {
                g.inverse().matrix().transpose()
            } else {
                g.matrix().clone()
            }
        })
        .collect())
}

fn kron_all(factors: &[CMatrix]) -> CMatrix {
    factors
        .iter()
        .fold(CMatrix::identity(1, 1), |acc, f| acc.kronecker(f))
}

/// `⊗_i α_i(g_i)` as a dense matrix in per-edge slot order.
pub fn tensor_action(elements: &[GroupElement], signature: &MixedSignature) -> Result<CMatrix> {
    let factors = slot_factors(elements, signature)?;
    let n = factors
        .iter()
        .try_fold(1usize, |acc, f| acc.checked_mul(f.nrows()))
        .ok_or_else(|| Error::BoundExceeded("tensor action too large".into()))?;
    checked_size(&[n, n])?;
    Ok(kron_all(&factors))
}

/// Spin network `ψ(g) = tr(α_1(g_1) ⊗ … ⊗ α_r(g_r) ∘ op)` on `L_r` by dense
/// contraction. This is the reference path the compiled form is checked against.
pub fn eval_spin_network<T: Scalar>(config: &Configuration, signature: &MixedSignature, op: &DenseTensor<T>) -> Result<Complex64> {
    let (m, d) = op.operator_dims()?;
    let kind = config.kind();
    if m != kind.matrix_dim() || d != signature.degree() {
        return Err(Error::ShapeMismatch(format!(
            "operator on {d} slots of dim {m}; signature has {} slots of dim {}",
            signature.degree(),
            kind.matrix_dim()
        )));
    }
    if config.graph().edge_count() != signature.edge_count() {
        return Err(Error::ShapeMismatch(format!(
            "configuration has {} edges, signature {}",
            config.graph().edge_count(),
            signature.edge_count()
        )));
    }
    let h = tensor_action(config.values(), signature)?;
    let n = h.nrows();
    let data = op.data();
    let mut acc = Complex64::new(0.0, 0.0);
    for a in 0..n {
        for b in 0..n {
            let o = data[b * n + a];
            if o != T::zero() {
                acc += h[(a, b)] * o.to_complex();
            }
        }
    }
    Ok(acc)
}

/// A signed product of natural-representation Wilson loops on `L_r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WilsonProduct {
    pub sign: i64,
    /// `ε^k` from the slot transposes (always `1` on the unitary track).
    pub transpose_sign: i64,
    /// Orientation parity of the skew form under the flips (`1` unless Sp).
    pub orientation_sign: i64,
    /// Number of edges of the bouquet the loops live on.
    pub edges: usize,
    pub loops: Vec<Loop>,
}

impl WilsonProduct {
    pub fn graph(&self) -> Result<Graph> {
        Graph::bouquet(self.edges)
    }

    pub fn eval(&self, config: &Configuration) -> Result<Complex64> {
        if config.graph().edge_count() != self.edges || config.graph().vertex_count() != 1 {
            return Err(Error::GraphMismatch(format!("compiled for L_{}", self.edges)));
        }
        let mut acc = Complex64::new(self.sign as f64, 0.0);
        for l in &self.loops {
            acc *= wilson_loop(config, l)?;
        }
        Ok(acc)
    }
}

fn cycle_loop(cycle: &[usize], letter: impl Fn(usize) -> SignedEdge) -> Loop {
    Path {
        steps: cycle.iter().map(|&a| letter(a)).collect(),
    }
    .canonical_rotation()
}

/// Writes `ψ_{α, I_σ}` as a product of Wilson loops: one loop per cycle
/// `(a_1 … a_k)` of `σ`, with letter `e_{j(a)}^{ε(a)}` for each point, where
/// `j(a)` is the edge owning gathered slot `a` and `ε(a) = -1` on dual slots.
/// Loops are emitted in canonical rotation.
pub fn compile_unitary(sigma: &Permutation, signature: &MixedSignature) -> Result<WilsonProduct> {
    if sigma.degree() != signature.degree() {
        return Err(Error::InvalidSignature(format!(
            "permutation of degree {} for signature of degree {}",
            sigma.degree(),
            signature.degree()
        )));
    }
    let slots = signature.gathered_order();
    let loops = cycles(sigma)
        .iter()
        .map(|c| {
            cycle_loop(c, |a| {
                let s = slots[a];
                SignedEdge {
                    edge: s.edge,
                    sign: if s.dual { -1 } else { 1 },
                }
            })
        })
        .collect();
    Ok(WilsonProduct {
        sign: 1,
        transpose_sign: 1,
        orientation_sign: 1,
        edges: signature.edge_count(),
        loops,
    })
}

/// Sign relating the flipped Brauer operator to the permutation operator:
/// `T_{i_1} ∘ … ∘ T_{i_k}(J_τ) = s · π(σ)`. Always `1` for a symmetric form;
/// for the skew form each pair turned around by the flips contributes `-1`.
pub fn brauer_flip_sign(tau: &Pairing, norm: &FlipNormalization, kind: GroupKind) -> Result<i64> {
    match kind.family {
        Family::Sp => tau.flip_orientation_sign(&norm.flips),
        Family::O | Family::SO => Ok(1),
        _ => Err(Error::NotOrthoSymplectic(kind)),
    }
}

/// Writes `ψ_{α, J_τ}` as a signed product of Wilson loops.
///
/// Flip-normalizes `τ` to `(F, σ)`; each cycle of `σ` gives a loop with letter
/// `e_{j(a)}^{-1}` when `a ∈ F` and `e_{j(a)}` otherwise. The sign is
/// `ε^{|F|}` (each transposed slot turns `g` into `ε g⁻¹`) times the
/// orientation parity from [`brauer_flip_sign`].
pub fn compile_orthosymplectic(tau: &Pairing, signature: &MixedSignature, kind: GroupKind) -> Result<WilsonProduct> {
    let eps = kind.form_sign().map_err(|_| Error::NotOrthoSymplectic(kind))?;
    if signature.q() != 0 {
        return Err(Error::InvalidSignature(format!("{kind} uses no dual factors, but q = {}", signature.q())));
    }
    if tau.half_size() != signature.p() {
        return Err(Error::InvalidPairing(format!(
            "pairing of {} points for p = {}",
            2 * tau.half_size(),
            signature.p()
        )));
    }
    let norm = normalize_pairing(tau);
    let mut flipped = vec![false; signature.p()];
    for &i in &norm.flips {
        flipped[i] = true;
    }
    let slots = signature.gathered_order();
    let loops = cycles(&norm.sigma)
        .iter()
        .map(|c| {
            cycle_loop(c, |a| SignedEdge {
                edge: slots[a].edge,
                sign: if flipped[a] { -1 } else { 1 },
            })
        })
        .collect();
    let transpose_sign = if norm.flips.len() % 2 == 1 { eps } else { 1 };
    let orientation_sign = brauer_flip_sign(tau, &norm, kind)?;
    Ok(WilsonProduct {
        sign: transpose_sign * orientation_sign,
        transpose_sign,
        orientation_sign,
        edges: signature.edge_count(),
        loops,
    })
}

/// Numerical rank with singular values below `RANK_THRESHOLD · σ_max` dropped.
pub fn numerical_rank(mat: &CMatrix) -> usize {
    if mat.nrows() == 0 || mat.ncols() == 0 {
        return 0;
    }
    let sv = mat.singular_values();
    let max = sv.max();
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_THRESHOLD * max).count()
}

/// Rank of the span of `operators`, each flattened to a vector.
pub fn span_rank<T: Scalar>(operators: &[DenseTensor<T>]) -> Result<usize> {
    let Some(first) = operators.first() else {
        return Ok(0);
    };
    let len = first.data().len();
    if operators.iter().any(|o| o.shape() != first.shape()) {
        return Err(Error::ShapeMismatch("operators of different shapes".into()));
    }
    let mut mat = CMatrix::zeros(len, operators.len());
    for (j, op) in operators.iter().enumerate() {
        for (i, &x) in op.data().iter().enumerate() {
            mat[(i, j)] = x.to_complex();
        }
    }
    Ok(numerical_rank(&mat))
}

/// Draws `samples` Haar elements of `kind`. For O(n) the samples alternate
/// between the two components so the disconnected group is fully probed.
pub fn commutant_probes<R: Rng + ?Sized>(kind: GroupKind, samples: usize, rng: &mut R) -> Vec<GroupElement> {
    (0..samples)
        .map(|s| {
            let g = haar_sample(kind, rng);
            if kind.family != Family::O {
                return g;
            }
            let want_reflection = s % 2 == 1;
            let is_reflection = g.matrix().determinant().re < 0.0;
            if want_reflection == is_reflection {
                return g;
            }
            let mut mat = g.into_matrix();
            for j in 0..mat.ncols() {
                mat[(0, j)] = -mat[(0, j)];
            }
            GroupElement::new(kind, mat).expect("same shape")
        })
        .collect()
}

/// Dimension of `{X ∈ End(V^{⊗d}) : ρ(g)^{⊗d} X = X ρ(g)^{⊗d}}` over the
/// sampled `g`, as the nullity of the stacked linear constraints.
pub fn commutant_dimension<R: Rng + ?Sized>(kind: GroupKind, d: usize, samples: usize, rng: &mut R) -> Result<usize> {
    let m = kind.matrix_dim();
    let unknowns = (m as u64).checked_pow(2 * d as u32).unwrap_or(u64::MAX);
    if unknowns > MAX_COMMUTANT_UNKNOWNS as u64 {
        return Err(Error::BoundExceeded(format!(
            "commutant of {kind} on {d} slots has {unknowns} unknowns (limit {MAX_COMMUTANT_UNKNOWNS})"
        )));
    }
    let n = m.pow(d as u32);
    let eye = CMatrix::identity(n, n);
    let mut stacked = CMatrix::zeros(samples * n * n, n * n);
    for (s, g) in commutant_probes(kind, samples, rng).iter().enumerate() {
        let rho = kron_all(&vec![g.matrix().clone(); d]);
        let block = eye.kronecker(&rho) - rho.transpose().kronecker(&eye);
        stacked.view_mut((s * n * n, 0), (n * n, n * n)).copy_from(&block);
    }
    Ok(n * n - numerical_rank(&stacked))
}

/// `max |ρ(g) X − X ρ(g)|` for an operator `X` in per-edge slot order, with
/// `ρ(g)` applied slot by slot rather than materialized.
pub fn commutator_norm<T: Scalar>(op: &DenseTensor<T>, elements: &[GroupElement], signature: &MixedSignature) -> Result<f64> {
    let factors = slot_factors(elements, signature)?;
    let (m, d) = op.operator_dims()?;
    if d != factors.len() || factors.iter().any(|f| f.nrows() != m) {
        return Err(Error::ShapeMismatch("operator and action differ in size".into()));
    }
    let x = op.to_complex();
    let (mut left, mut right) = (x.clone(), x);
    for (a, f) in factors.iter().enumerate() {
        let row_major: Vec<Complex64> = f.transpose().iter().copied().collect();
        let transposed: Vec<Complex64> = f.iter().copied().collect();
        left = left.contract_axis(a, &transposed)?;
        right = right.contract_axis(d + a, &row_major)?;
    }
    Ok(left.max_abs_diff(&right))
}
