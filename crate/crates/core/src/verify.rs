//! Experiment harnesses: identity sweeps, exact diagram checks, commutant
//! ranks, the separation experiment, sampling and loop evaluation.
//!
//! Trials are independent; trial `t` draws from its own ChaCha stream of the
//! job seed, so results do not depend on scheduling.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagrams::{enumerate_pairings, normalize_pairing, Pairing, Permutation};
use crate::error::{Error, Result};
use crate::graph::{gauge_apply, wilson_loop, Configuration, GaugeTransform, Graph, Loop};
use crate::group::{haar_sample, membership_check, GroupElement, GroupKind};
use crate::jobs::{check_operator_bound, check_word_budget, CommutantJob, Diagram, DiagramJob, EvalJob, IdentityJob, SampleJob, SpinJob, SweepEntry};
use crate::report::{matrix_entries, Cplx, Outcome, Real};
use crate::spin::{
    apply_slot_transpose, brauer_flip_sign, brauer_operator, commutant_dimension, commutator_norm, compile_orthosymplectic,
    compile_unitary, eval_spin_network, mixed_operator, perm_operator, span_rank, MixedSignature, WilsonProduct,
};
use crate::tensor::IntTensor;
use crate::words::{conjugacy_fingerprint, fingerprint_caveat, fingerprint_distance, reduced_words_with_values, Word};

/// Random gauge transforms per trial in invariance checks.
pub const GAUGE_SAMPLES: usize = 10;
/// Haar samples per operator in commutation checks.
pub const COMMUTATOR_SAMPLES: usize = 20;
/// Tolerance of the invariance checks.
pub const INVARIANCE_TOL: f64 = 1e-10;

/// The random stream for trial `stream` of a job seeded with `seed`.
pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `|a − b| / (1 + |a|)`.
pub fn relative_deviation(reference: Complex64, value: Complex64) -> f64 {
    (value - reference).norm() / (1.0 + reference.norm())
}

fn stream_id(entry: usize, trial: usize) -> u64 {
    ((entry as u64) << 32) | trial as u64
}

/// A spin network with its operator and compiled form, ready to evaluate.
#[derive(Debug, Clone)]
pub struct PreparedSpin {
    pub job: SpinJob,
    pub operator: IntTensor,
    pub product: WilsonProduct,
    pub flips: Option<Vec<usize>>,
}

impl PreparedSpin {
    pub fn new(job: SpinJob) -> Result<Self> {
        job.validate()?;
        let m = job.kind.matrix_dim();
        let (operator, product, flips) = match &job.diagram {
            Diagram::Perm(sigma) => (mixed_operator(sigma, &job.signature, m)?, compile_unitary(sigma, &job.signature)?, None),
            Diagram::Pairing(tau) => (
                brauer_operator(tau, job.kind)?,
                compile_orthosymplectic(tau, &job.signature, job.kind)?,
                Some(normalize_pairing(tau).flips),
            ),
        };
        Ok(Self {
            job,
            operator,
            product,
            flips,
        })
    }

    pub fn oracle(&self, config: &Configuration) -> Result<Complex64> {
        eval_spin_network(config, &self.job.signature, &self.operator)
    }

    pub fn compiled(&self, config: &Configuration) -> Result<Complex64> {
        self.product.eval(config)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityRecord {
    pub entry: usize,
    pub trial: usize,
    pub job: SpinJob,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub flips: Option<Vec<usize>>,
    pub inputs: Vec<Vec<Cplx>>,
    pub oracle: Cplx,
    pub product: WilsonProduct,
    pub compiled: Cplx,
    pub abs_deviation: Real,
    pub rel_deviation: Real,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub commutator: Option<Real>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub gauge_deviation: Option<Real>,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentitySummary {
    pub trials: usize,
    pub failures: usize,
    pub max_rel_deviation: Real,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub max_commutator: Option<Real>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub max_gauge_deviation: Option<Real>,
}

fn random_signature<R: Rng + ?Sized>(entry: &SweepEntry, rng: &mut R) -> Result<MixedSignature> {
    let r = rng.random_range(1..=entry.max_edges);
    let d = rng.random_range(1..=entry.max_degree);
    let mut counts = vec![(0usize, 0usize); r];
    let duals = entry.kind.is_unitary_track();
    for _ in 0..d {
        let e = rng.random_range(0..r);
        if duals && rng.random_bool(0.5) {
            counts[e].1 += 1;
        } else {
            counts[e].0 += 1;
        }
    }
    MixedSignature::new(counts)
}

fn random_permutation<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Permutation {
    let mut images: Vec<usize> = (0..d).collect();
    images.shuffle(rng);
    Permutation::from_images(images).expect("shuffle of 0..d")
}

/// A uniformly random perfect matching of `2p` points.
pub fn random_pairing<R: Rng + ?Sized>(p: usize, rng: &mut R) -> Pairing {
    let mut points: Vec<usize> = (0..2 * p).collect();
    points.shuffle(rng);
    let pairs: Vec<[usize; 2]> = points.chunks_exact(2).map(|c| [c[0], c[1]]).collect();
    Pairing::from_pairs(&pairs).expect("matching of 0..2p")
}

/// A random spin job for a sweep entry.
pub fn random_spin_job<R: Rng + ?Sized>(entry: &SweepEntry, rng: &mut R) -> Result<SpinJob> {
    let signature = random_signature(entry, rng)?;
    let d = signature.degree();
    let diagram = if entry.kind.is_unitary_track() {
        Diagram::Perm(random_permutation(d, rng))
    } else {
        Diagram::Pairing(random_pairing(d, rng))
    };
    Ok(SpinJob {
        kind: entry.kind,
        signature,
        diagram,
    })
}

/// Largest commutator `‖ρ(g)^{⊗} X − X ρ(g)^{⊗}‖_max` over Haar samples acting diagonally.
pub fn max_commutator<R: Rng + ?Sized>(prep: &PreparedSpin, samples: usize, rng: &mut R) -> Result<f64> {
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let g = haar_sample(prep.job.kind, rng);
        let tuple = vec![g; prep.job.signature.edge_count()];
        worst = worst.max(commutator_norm(&prep.operator, &tuple, &prep.job.signature)?);
    }
    Ok(worst)
}

/// Largest relative change of the spin-network value (direct and compiled)
/// and of each compiled Wilson loop under random gauge transforms.
pub fn max_gauge_deviation<R: Rng + ?Sized>(prep: &PreparedSpin, config: &Configuration, samples: usize, rng: &mut R) -> Result<f64> {
    let oracle = prep.oracle(config)?;
    let compiled = prep.compiled(config)?;
    let loops: Vec<Complex64> = prep.product.loops.iter().map(|l| wilson_loop(config, l)).collect::<Result<_>>()?;
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let phi = GaugeTransform::random(config.kind(), config.graph().vertex_count(), rng);
        let moved = gauge_apply(&phi, config)?;
        worst = worst.max(relative_deviation(oracle, prep.oracle(&moved)?));
        worst = worst.max(relative_deviation(compiled, prep.compiled(&moved)?));
        for (l, &before) in prep.product.loops.iter().zip(&loops) {
            worst = worst.max(relative_deviation(before, wilson_loop(&moved, l)?));
        }
    }
    Ok(worst)
}

fn identity_trial(prep: &PreparedSpin, entry: usize, trial: usize, tol: f64, invariance: bool, rng: &mut ChaCha8Rng) -> Result<IdentityRecord> {
    let graph = prep.product.graph()?;
    let config = Configuration::random(graph, prep.job.kind, rng);
    let oracle = prep.oracle(&config)?;
    let compiled = prep.compiled(&config)?;
    let rel = relative_deviation(oracle, compiled);
    let (commutator, gauge) = if invariance {
        (
            Some(max_commutator(prep, COMMUTATOR_SAMPLES, rng)?),
            Some(max_gauge_deviation(prep, &config, GAUGE_SAMPLES, rng)?),
        )
    } else {
        (None, None)
    };
    let invariant = commutator.is_none_or(|c| c <= INVARIANCE_TOL) && gauge.is_none_or(|g| g <= INVARIANCE_TOL);
    Ok(IdentityRecord {
        entry,
        trial,
        job: prep.job.clone(),
        flips: prep.flips.clone(),
        inputs: config.values().iter().map(matrix_entries).collect(),
        oracle: Cplx(oracle),
        product: prep.product.clone(),
        compiled: Cplx(compiled),
        abs_deviation: Real((compiled - oracle).norm()),
        rel_deviation: Real(rel),
        commutator: commutator.map(Real),
        gauge_deviation: gauge.map(Real),
        passed: rel <= tol && invariant,
    })
}

/// Compares compiled Wilson-loop products against direct contraction.
///
/// A single job runs `trials` random configurations; a sweep runs each
/// entry's own trial count with fresh random signatures and diagrams. The
/// verdict passes iff every relative deviation is within `tol` (and, when
/// requested, every invariance check within [`INVARIANCE_TOL`]).
pub fn run_identity_suite(job: &IdentityJob, trials: usize, tol: f64, seed: u64) -> Result<Outcome<IdentityRecord, IdentitySummary>> {
    let records: Vec<IdentityRecord> = match job {
        IdentityJob::Single(spin) => {
            let prep = PreparedSpin::new(spin.clone())?;
            (0..trials)
                .into_par_iter()
                .map(|t| identity_trial(&prep, 0, t, tol, false, &mut trial_rng(seed, stream_id(0, t))))
                .collect::<Result<_>>()?
        }
        IdentityJob::Sweep(sweep) => {
            let tasks: Vec<(usize, usize)> = sweep
                .sweep
                .iter()
                .enumerate()
                .flat_map(|(e, entry)| (0..entry.trials).map(move |t| (e, t)))
                .collect();
            tasks
                .into_par_iter()
                .map(|(e, t)| {
                    let mut rng = trial_rng(seed, stream_id(e, t));
                    let prep = PreparedSpin::new(random_spin_job(&sweep.sweep[e], &mut rng)?)?;
                    identity_trial(&prep, e, t, tol, sweep.check_invariance, &mut rng)
                })
                .collect::<Result<_>>()?
        }
    };
    let max_opt = |f: fn(&IdentityRecord) -> Option<Real>| {
        records.iter().filter_map(f).map(|r| r.0).reduce(f64::max).map(Real)
    };
    let summary = IdentitySummary {
        trials: records.len(),
        failures: records.iter().filter(|r| !r.passed).count(),
        max_rel_deviation: Real(records.iter().map(|r| r.rel_deviation.0).fold(0.0, f64::max)),
        max_commutator: max_opt(|r| r.commutator),
        max_gauge_deviation: max_opt(|r| r.gauge_deviation),
    };
    Ok(Outcome {
        passed: summary.failures == 0,
        records,
        summary,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagramRecord {
    pub kind: GroupKind,
    pub p: usize,
    pub pairing: Pairing,
    pub flips: Vec<usize>,
    pub sigma: Permutation,
    pub orientation_sign: i64,
    /// `T_F(J_τ) = π(σ)` exactly.
    pub literal_equal: bool,
    /// `T_F(J_τ) = s · π(σ)` exactly, `s` the orientation sign.
    pub signed_equal: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagramSummary {
    pub pairings: usize,
    pub literal_failures: usize,
    pub signed_failures: usize,
    pub literal_required: bool,
}

/// Applies the slot transposes of the flip normalization to `J_τ` and
/// compares the result with `π(σ)` in exact integer arithmetic.
pub fn check_flip_normalization(tau: &Pairing, kind: GroupKind) -> Result<DiagramRecord> {
    let norm = normalize_pairing(tau);
    let mut t = brauer_operator(tau, kind)?;
    for &i in &norm.flips {
        t = apply_slot_transpose(&t, i, kind)?;
    }
    let pi = perm_operator(&norm.sigma, kind.matrix_dim())?;
    let s = brauer_flip_sign(tau, &norm, kind)?;
    Ok(DiagramRecord {
        kind,
        p: tau.half_size(),
        pairing: tau.clone(),
        literal_equal: t == pi,
        signed_equal: t == pi.map(|x| x * s),
        flips: norm.flips,
        sigma: norm.sigma,
        orientation_sign: s,
    })
}

/// Exact flip-normalization check over every pairing with `1 ≤ p ≤ max_p`.
pub fn verify_diagrams(job: &DiagramJob) -> Result<Outcome<DiagramRecord, DiagramSummary>> {
    let mut tasks = Vec::new();
    for &kind in &job.kinds {
        check_operator_bound(kind, job.max_p)?;
        for p in 1..=job.max_p {
            for tau in enumerate_pairings(p)? {
                tasks.push((kind, tau));
            }
        }
    }
    let records: Vec<DiagramRecord> = tasks
        .into_par_iter()
        .map(|(kind, tau)| check_flip_normalization(&tau, kind))
        .collect::<Result<_>>()?;
    let summary = DiagramSummary {
        pairings: records.len(),
        literal_failures: records.iter().filter(|r| !r.literal_equal).count(),
        signed_failures: records.iter().filter(|r| !r.signed_equal).count(),
        literal_required: job.literal,
    };
    Ok(Outcome {
        passed: summary.signed_failures == 0 && (!job.literal || summary.literal_failures == 0),
        records,
        summary,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CommutantRecord {
    pub kind: GroupKind,
    pub d: usize,
    pub operators: usize,
    pub span_rank: usize,
    pub commutant_dimension: usize,
    pub equal: bool,
}

/// The diagram operators spanning the commutant: `π(σ)` for the unitary
/// track, `J_τ` over pairings of `2d` points otherwise.
pub fn diagram_operators(kind: GroupKind, d: usize) -> Result<Vec<IntTensor>> {
    check_operator_bound(kind, d)?;
    if kind.is_unitary_track() {
        Permutation::all(d).map(|s| perm_operator(&s, kind.matrix_dim())).collect()
    } else {
        enumerate_pairings(d)?.map(|t| brauer_operator(&t, kind)).collect()
    }
}

/// Compares the rank of the diagram operators with the numerically computed
/// commutant dimension, case by case.
pub fn commutant_check(job: &CommutantJob, samples: usize, seed: u64) -> Result<Outcome<CommutantRecord, ()>> {
    let records: Vec<CommutantRecord> = job
        .cases
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let ops = diagram_operators(c.kind, c.d)?;
            let rank = span_rank(&ops)?;
            let dim = commutant_dimension(c.kind, c.d, samples, &mut trial_rng(seed, i as u64))?;
            Ok(CommutantRecord {
                kind: c.kind,
                d: c.d,
                operators: ops.len(),
                span_rank: rank,
                commutant_dimension: dim,
                equal: rank == dim,
            })
        })
        .collect::<Result<_>>()?;
    Ok(Outcome {
        passed: records.iter().all(|r| r.equal),
        records,
        summary: (),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeparationRecord {
    pub trial: usize,
    /// Words whose values on `A` and `kAk⁻¹` have different fingerprints.
    pub conjugate_separations: usize,
    pub conjugate_max_distance: Real,
    /// Words whose fingerprint match carries a [`fingerprint_caveat`].
    pub flagged_words: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub separating_word: Option<Word>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub separating_distance: Option<Real>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeparationSummary {
    pub kind: GroupKind,
    pub r: usize,
    pub max_len: usize,
    pub words_per_tuple: usize,
    pub trials: usize,
    pub conjugate_trials_separated: usize,
    pub independent_trials_separated: usize,
    /// Shortest separating word length in the independent arm → trial count.
    pub shortest_length_histogram: BTreeMap<usize, usize>,
}

fn separation_trial(kind: GroupKind, r: usize, max_len: usize, tol: f64, trial: usize, rng: &mut ChaCha8Rng) -> Result<(SeparationRecord, usize)> {
    let a: Vec<GroupElement> = (0..r).map(|_| haar_sample(kind, rng)).collect();
    let k = haar_sample(kind, rng);
    let b_conj: Vec<GroupElement> = a.iter().map(|g| g.conjugate_by(&k)).collect::<Result<_>>()?;
    let b_ind: Vec<GroupElement> = (0..r).map(|_| haar_sample(kind, rng)).collect();

    let wa = reduced_words_with_values(&a, max_len)?;
    let wc = reduced_words_with_values(&b_conj, max_len)?;
    let wi = reduced_words_with_values(&b_ind, max_len)?;

    let mut separations = 0;
    let mut max_distance = 0.0f64;
    let mut flagged = 0;
    let mut separating = None;
    for ((w, va), ((_, vc), (_, vi))) in wa.iter().zip(wc.iter().zip(&wi)) {
        let fa = conjugacy_fingerprint(va);
        let dc = fingerprint_distance(&fa, &conjugacy_fingerprint(vc));
        max_distance = max_distance.max(dc);
        if dc > tol {
            separations += 1;
        } else if fingerprint_caveat(va, tol).is_some() {
            flagged += 1;
        }
        if separating.is_none() {
            let di = fingerprint_distance(&fa, &conjugacy_fingerprint(vi));
            if di > tol {
                separating = Some((w.clone(), di));
            }
        }
    }
    Ok((
        SeparationRecord {
            trial,
            conjugate_separations: separations,
            conjugate_max_distance: Real(max_distance),
            flagged_words: flagged,
            separating_distance: separating.as_ref().map(|s| Real(s.1)),
            separating_word: separating.map(|s| s.0),
        },
        wa.len(),
    ))
}

/// Two arms per trial on Haar tuples `A ∈ G^r`: the conjugate arm compares
/// `w(A)` with `w(kAk⁻¹)` over every reduced word up to `max_len` and must
/// find no separation; the independent arm compares with a fresh tuple and
/// records the shortest separating word. Passes iff the conjugate arm never
/// separates.
pub fn separation_experiment(
    kind: GroupKind,
    r: usize,
    max_len: usize,
    trials: usize,
    tol: f64,
    seed: u64,
) -> Result<Outcome<SeparationRecord, SeparationSummary>> {
    if r == 0 {
        return Err(Error::MalformedJob("r must be at least 1".into()));
    }
    check_word_budget(r, max_len)?;
    let results: Vec<(SeparationRecord, usize)> = (0..trials)
        .into_par_iter()
        .map(|t| separation_trial(kind, r, max_len, tol, t, &mut trial_rng(seed, t as u64)))
        .collect::<Result<_>>()?;
    let words_per_tuple = results.first().map_or(0, |r| r.1);
    let records: Vec<SeparationRecord> = results.into_iter().map(|r| r.0).collect();
    let mut histogram = BTreeMap::new();
    for rec in &records {
        if let Some(w) = &rec.separating_word {
            *histogram.entry(w.len()).or_insert(0) += 1;
        }
    }
    let summary = SeparationSummary {
        kind,
        r,
        max_len,
        words_per_tuple,
        trials,
        conjugate_trials_separated: records.iter().filter(|r| r.conjugate_separations > 0).count(),
        independent_trials_separated: records.iter().filter(|r| r.separating_word.is_some()).count(),
        shortest_length_histogram: histogram,
    };
    Ok(Outcome {
        passed: summary.conjugate_trials_separated == 0,
        records,
        summary,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleRecord {
    pub trial: usize,
    pub values: Vec<Vec<Cplx>>,
    pub max_membership_deviation: Real,
    pub passed: bool,
}

/// Haar-random configurations on a graph, each checked for membership.
pub fn sample_configurations(job: &SampleJob, trials: usize, tol: f64, seed: u64) -> Result<Outcome<SampleRecord, ()>> {
    let records: Vec<SampleRecord> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let cfg = Configuration::random(job.graph.clone(), job.kind, &mut trial_rng(seed, t as u64));
            let worst = cfg
                .values()
                .iter()
                .flat_map(|g| membership_check(g, tol).checks)
                .map(|c| c.deviation)
                .fold(0.0, f64::max);
            SampleRecord {
                trial: t,
                values: cfg.values().iter().map(matrix_entries).collect(),
                max_membership_deviation: Real(worst),
                passed: worst <= tol,
            }
        })
        .collect();
    Ok(Outcome {
        passed: records.iter().all(|r| r.passed),
        records,
        summary: (),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalRecord {
    pub trial: usize,
    pub values: Vec<Vec<Cplx>>,
    pub wilson_loops: Vec<Cplx>,
    pub gauge_deviation: Real,
    pub passed: bool,
}

fn eval_on(config: &Configuration, loops: &[Loop], trial: usize, tol: f64, rng: &mut ChaCha8Rng) -> Result<EvalRecord> {
    let values: Vec<Complex64> = loops.iter().map(|l| wilson_loop(config, l)).collect::<Result<_>>()?;
    let mut worst = 0.0f64;
    for _ in 0..GAUGE_SAMPLES {
        let phi = GaugeTransform::random(config.kind(), config.graph().vertex_count(), rng);
        let moved = gauge_apply(&phi, config)?;
        for (l, &v) in loops.iter().zip(&values) {
            worst = worst.max(relative_deviation(v, wilson_loop(&moved, l)?));
        }
    }
    Ok(EvalRecord {
        trial,
        values: config.values().iter().map(matrix_entries).collect(),
        wilson_loops: values.into_iter().map(Cplx).collect(),
        gauge_deviation: Real(worst),
        passed: worst <= tol,
    })
}

/// Wilson loops on the job's configuration (or on `trials` random ones), each
/// checked for gauge invariance under random transforms.
pub fn evaluate_loops(job: &EvalJob, trials: usize, tol: f64, seed: u64) -> Result<Outcome<EvalRecord, ()>> {
    let fixed = job.configuration()?;
    let records: Vec<EvalRecord> = match &fixed {
        Some(cfg) => vec![eval_on(cfg, &job.loops, 0, tol, &mut trial_rng(seed, 0))?],
        None => (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = trial_rng(seed, t as u64);
                let cfg = Configuration::random(job.graph.clone(), job.kind, &mut rng);
                eval_on(&cfg, &job.loops, t, tol, &mut rng)
            })
            .collect::<Result<_>>()?,
    };
    Ok(Outcome {
        passed: records.iter().all(|r| r.passed),
        records,
        summary: (),
    })
}

/// Random connected graph with `vertices` vertices and `edges ≥ max(1, vertices − 1)`
/// edges: a random spanning tree plus random extra edges (self-loops and
/// multi-edges allowed), with random orientations.
pub fn random_connected_graph<R: Rng + ?Sized>(vertices: usize, edges: usize, rng: &mut R) -> Result<Graph> {
    if vertices == 0 || edges == 0 || edges + 1 < vertices {
        return Err(Error::InvalidGraph(format!("no connected graph with {vertices} vertices and {edges} edges")));
    }
    let mut list = Vec::with_capacity(edges);
    for v in 1..vertices {
        let u = rng.random_range(0..v);
        list.push(if rng.random_bool(0.5) { (u, v) } else { (v, u) });
    }
    while list.len() < edges {
        list.push((rng.random_range(0..vertices), rng.random_range(0..vertices)));
    }
    list.shuffle(rng);
    Graph::new(vertices, list)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jobs::{parse_commutant_job, parse_diagram_job, parse_identity_job};

    #[test]
    fn empty_sweep_passes() {
        let job = parse_identity_job(r#"{"sweep":[]}"#).unwrap();
        let out = run_identity_suite(&job, 10, 1e-9, 0).unwrap();
        assert!(out.passed && out.records.is_empty());
    }

    #[test]
    fn figure_job_has_no_deviation() {
        let job = parse_identity_job(r#"{"kind":"U(3)","signature":[[0,1],[2,0]],"diagram":{"perm":[1,2,0]}}"#).unwrap();
        let out = run_identity_suite(&job, 5, 1e-12, 1).unwrap();
        assert!(out.passed);
        assert!(out.records.iter().all(|r| r.abs_deviation.0 <= 1e-12));
    }

    #[test]
    fn small_sweep_is_deterministic() {
        let job = parse_identity_job(
            r#"{"sweep":[{"kind":"U(2)","trials":6,"max_edges":2,"max_degree":3},
                         {"kind":"Sp(1)","trials":6,"max_edges":2,"max_degree":3}],"check_invariance":true}"#,
        )
        .unwrap();
        let a = run_identity_suite(&job, 0, 1e-9, 42).unwrap();
        let b = run_identity_suite(&job, 0, 1e-9, 42).unwrap();
        assert!(a.passed, "{:?}", a.summary);
        assert_eq!(serde_json::to_string(&a.records).unwrap(), serde_json::to_string(&b.records).unwrap());
    }

    #[test]
    fn diagram_check_reports_symplectic_signs() {
        let job = parse_diagram_job(r#"{"kinds":["O(2)","Sp(1)"],"max_p":3}"#).unwrap();
        let out = verify_diagrams(&job).unwrap();
        assert_eq!(out.summary.pairings, 2 * (1 + 3 + 15));
        assert_eq!(out.summary.signed_failures, 0);
        assert!(out.records.iter().filter(|r| r.kind == GroupKind::o(2)).all(|r| r.literal_equal));
        assert!(out.records.iter().any(|r| r.kind == GroupKind::sp(1) && !r.literal_equal));
        assert!(out.passed);
        let literal = DiagramJob { literal: true, ..job };
        assert!(!verify_diagrams(&literal).unwrap().passed);
    }

    #[test]
    fn commutant_ranks_agree() {
        let job = parse_commutant_job(r#"{"cases":[{"kind":"U(2)","d":2},{"kind":"O(2)","d":2}]}"#).unwrap();
        let out = commutant_check(&job, 4, 3).unwrap();
        assert!(out.passed, "{:?}", out.records);
    }

    #[test]
    fn separation_small() {
        let out = separation_experiment(GroupKind::u(2), 2, 3, 8, 1e-9, 5).unwrap();
        assert!(out.passed);
        assert_eq!(out.summary.words_per_tuple, 4 + 12 + 36);
        assert_eq!(out.summary.independent_trials_separated, 8);
        let r1 = separation_experiment(GroupKind::u(3), 1, 2, 4, 1e-9, 6).unwrap();
        assert!(r1.passed);
        assert!(separation_experiment(GroupKind::u(2), 2, 0, 1, 1e-9, 0).is_err());
    }

    #[test]
    fn random_graphs_are_connected() {
        let mut rng = trial_rng(9, 0);
        for _ in 0..50 {
            let v = rng.random_range(1..=5);
            let e = rng.random_range((v - 1).max(1)..=8);
            let g = random_connected_graph(v, e, &mut rng).unwrap();
            assert!(g.is_connected());
            assert_eq!(g.edge_count(), e);
        }
    }
}
