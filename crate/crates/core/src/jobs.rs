//! JSON job descriptions for the experiment harnesses.
//!
//! Every `parse_*` function validates sizes before anything is allocated and
//! reports malformed input as an error; none of them panic.

use serde::{Deserialize, Serialize};

use crate::diagrams::{Pairing, Permutation, MAX_ENUM_P};
use crate::error::{Error, Result};
use crate::graph::{Configuration, Graph, Loop};
use crate::group::{GroupElement, GroupKind, DEFAULT_MEMBERSHIP_TOL};
use crate::spin::{MixedSignature, MAX_COMMUTANT_UNKNOWNS};
use crate::tensor::MAX_TENSOR_ENTRIES;

/// Upper bound on trial counts, edge counts and similar job sizes.
pub const MAX_JOB_COUNT: usize = 100_000;

/// Longest word length accepted by the separation experiment.
pub const MAX_WORD_LEN: usize = 12;

/// Most reduced words evaluated per tuple in the separation experiment.
pub const MAX_WORDS: usize = 2_000_000;

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedJob(msg.into())
}

fn check_count(what: &str, n: usize) -> Result<()> {
    if n > MAX_JOB_COUNT {
        return Err(Error::BoundExceeded(format!("{what} = {n} exceeds {MAX_JOB_COUNT}")));
    }
    Ok(())
}

/// Checks `m^{2d}` against the dense tensor bound without overflowing.
pub fn check_operator_bound(kind: GroupKind, d: usize) -> Result<()> {
    let m = kind.matrix_dim() as u128;
    let mut size: u128 = 1;
    for _ in 0..2 * d {
        size = size.saturating_mul(m);
        if size > MAX_TENSOR_ENTRIES as u128 {
            return Err(Error::BoundExceeded(format!(
                "{kind} on {d} slots needs {}^{} entries (limit {MAX_TENSOR_ENTRIES})",
                m,
                2 * d
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Diagram {
    /// Permutation of the gathered slots (primal slots by edge, then dual slots).
    Perm(Permutation),
    /// Pairing of `2p` points: `p` input slots followed by `p` output slots.
    Pairing(Pairing),
}

/// One spin network on the bouquet `L_r`, with `r` the signature length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinJob {
    pub kind: GroupKind,
    pub signature: MixedSignature,
    pub diagram: Diagram,
}

impl SpinJob {
    pub fn validate(&self) -> Result<()> {
        let d = self.signature.degree();
        check_count("edges", self.signature.edge_count())?;
        check_operator_bound(self.kind, d)?;
        match &self.diagram {
            Diagram::Perm(sigma) => {
                if sigma.degree() != d {
                    return Err(malformed(format!("permutation of degree {} for signature of degree {d}", sigma.degree())));
                }
            }
            Diagram::Pairing(tau) => {
                self.kind.form_sign().map_err(|_| Error::NotOrthoSymplectic(self.kind))?;
                self.signature.check_kind(self.kind)?;
                if tau.half_size() != d {
                    return Err(malformed(format!("pairing of {} points for p = {d}", 2 * tau.half_size())));
                }
            }
        }
        Ok(())
    }
}

/// One entry of an identity sweep: `trials` random (signature, diagram,
/// configuration) triples with at most `max_edges` edges and total degree at
/// most `max_degree`. Unitary-track kinds get permutations of mixed
/// signatures; orthogonal and symplectic kinds get pairings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepEntry {
    pub kind: GroupKind,
    pub trials: usize,
    pub max_edges: usize,
    pub max_degree: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepJob {
    pub sweep: Vec<SweepEntry>,
    /// Also check that operators commute with the group and values are gauge invariant.
    #[serde(default)]
    pub check_invariance: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum IdentityJob {
    Single(SpinJob),
    Sweep(SweepJob),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramJob {
    pub kinds: Vec<GroupKind>,
    pub max_p: usize,
    /// Require `T_F(J_τ) = π(σ)` with no sign, rather than up to the orientation sign.
    #[serde(default)]
    pub literal: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommutantCase {
    pub kind: GroupKind,
    pub d: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommutantJob {
    pub cases: Vec<CommutantCase>,
    #[serde(default)]
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeparationJob {
    pub kind: GroupKind,
    pub r: usize,
    #[serde(default)]
    pub max_len: Option<usize>,
    #[serde(default)]
    pub trials: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleJob {
    pub kind: GroupKind,
    pub graph: Graph,
}

/// Wilson loops on a given configuration, or on random ones when `values`
/// is absent. Each value is a row-major list of `[re, im]` entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalJob {
    pub kind: GroupKind,
    pub graph: Graph,
    #[serde(default)]
    pub values: Option<Vec<Vec<[f64; 2]>>>,
    pub loops: Vec<Loop>,
}

impl EvalJob {
    pub fn configuration(&self) -> Result<Option<Configuration>> {
        let Some(values) = &self.values else {
            return Ok(None);
        };
        let elements = values
            .iter()
            .map(|v| GroupElement::from_pairs(self.kind, v))
            .collect::<Result<Vec<_>>>()?;
        Configuration::new(self.graph.clone(), self.kind, elements, DEFAULT_MEMBERSHIP_TOL).map(Some)
    }
}

fn check_kind_size(kind: GroupKind) -> Result<()> {
    if kind.matrix_dim() > 64 {
        return Err(Error::BoundExceeded(format!("{kind} is too large")));
    }
    Ok(())
}

fn check_graph(graph: &Graph) -> Result<()> {
    check_count("vertices", graph.vertex_count())?;
    check_count("edges", graph.edge_count())
}

pub fn parse_spin_job(text: &str) -> Result<SpinJob> {
    let job: SpinJob = serde_json::from_str(text)?;
    job.validate()?;
    Ok(job)
}

/// A single spin job, or `{"sweep": [...]}`.
pub fn parse_identity_job(text: &str) -> Result<IdentityJob> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    if value.get("sweep").is_none() {
        return Ok(IdentityJob::Single(parse_spin_job(text)?));
    }
    let job: SweepJob = serde_json::from_value(value)?;
    check_count("sweep entries", job.sweep.len())?;
    for e in &job.sweep {
        check_count("trials", e.trials)?;
        if e.max_edges == 0 || e.max_degree == 0 {
            return Err(malformed("max_edges and max_degree must be at least 1"));
        }
        check_count("max_edges", e.max_edges)?;
        check_operator_bound(e.kind, e.max_degree)?;
    }
    Ok(IdentityJob::Sweep(job))
}

pub fn parse_diagram_job(text: &str) -> Result<DiagramJob> {
    let job: DiagramJob = serde_json::from_str(text)?;
    check_count("kinds", job.kinds.len())?;
    if job.max_p > MAX_ENUM_P {
        return Err(Error::BoundExceeded(format!("max_p = {} exceeds {MAX_ENUM_P}", job.max_p)));
    }
    for &k in &job.kinds {
        k.form_sign().map_err(|_| Error::NotOrthoSymplectic(k))?;
        check_operator_bound(k, job.max_p)?;
    }
    Ok(job)
}

pub fn parse_commutant_job(text: &str) -> Result<CommutantJob> {
    let job: CommutantJob = serde_json::from_str(text)?;
    check_count("cases", job.cases.len())?;
    if let Some(s) = job.samples {
        check_count("samples", s)?;
    }
    for c in &job.cases {
        if c.d == 0 {
            return Err(malformed("d must be at least 1"));
        }
        let m = c.kind.matrix_dim() as u128;
        let unknowns = (0..2 * c.d).try_fold(1u128, |acc, _| acc.checked_mul(m).filter(|&x| x <= MAX_COMMUTANT_UNKNOWNS as u128));
        if unknowns.is_none() {
            return Err(Error::BoundExceeded(format!("commutant of {} on {} slots is too large", c.kind, c.d)));
        }
    }
    Ok(job)
}

pub fn parse_separation_job(text: &str) -> Result<SeparationJob> {
    let job: SeparationJob = serde_json::from_str(text)?;
    check_kind_size(job.kind)?;
    if job.r == 0 {
        return Err(malformed("r must be at least 1"));
    }
    check_count("r", job.r)?;
    if let Some(t) = job.trials {
        check_count("trials", t)?;
    }
    if let Some(l) = job.max_len {
        check_word_budget(job.r, l)?;
    }
    Ok(job)
}

/// Rejects word lengths whose reduced-word count exceeds [`MAX_WORDS`].
pub fn check_word_budget(r: usize, max_len: usize) -> Result<()> {
    if max_len == 0 {
        return Err(malformed("max_len must be at least 1"));
    }
    if max_len > MAX_WORD_LEN || crate::words::reduced_word_count(r, max_len) > MAX_WORDS {
        return Err(Error::BoundExceeded(format!("words of length ≤ {max_len} in {r} letters exceed {MAX_WORDS}")));
    }
    Ok(())
}

pub fn parse_sample_job(text: &str) -> Result<SampleJob> {
    let job: SampleJob = serde_json::from_str(text)?;
    check_kind_size(job.kind)?;
    check_graph(&job.graph)?;
    Ok(job)
}

pub fn parse_eval_job(text: &str) -> Result<EvalJob> {
    let job: EvalJob = serde_json::from_str(text)?;
    check_kind_size(job.kind)?;
    check_graph(&job.graph)?;
    check_count("loops", job.loops.len())?;
    for l in &job.loops {
        check_count("loop length", l.len())?;
        l.validate_loop(&job.graph)?;
    }
    if let Some(v) = &job.values {
        if v.len() != job.graph.edge_count() {
            return Err(malformed(format!("{} values for {} edges", v.len(), job.graph.edge_count())));
        }
    }
    job.configuration()?;
    Ok(job)
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    let g: Graph = serde_json::from_str(text)?;
    check_graph(&g)?;
    Ok(g)
}

pub fn parse_loop(text: &str) -> Result<Loop> {
    Ok(serde_json::from_str(text)?)
}

pub fn parse_diagram(text: &str) -> Result<Diagram> {
    Ok(serde_json::from_str(text)?)
}

/// `{"kind": "...", "matrix": [[re, im], ...]}` with the membership check applied.
pub fn parse_element(text: &str) -> Result<GroupElement> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct ElementJson {
        kind: GroupKind,
        matrix: Vec<[f64; 2]>,
    }
    let e: ElementJson = serde_json::from_str(text)?;
    check_kind_size(e.kind)?;
    let g = GroupElement::from_pairs(e.kind, &e.matrix)?;
    GroupElement::checked(e.kind, g.into_matrix(), DEFAULT_MEMBERSHIP_TOL)
}
