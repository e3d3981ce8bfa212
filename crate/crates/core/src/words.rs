//! Words in `r` letters, their evaluation on tuples of group elements, and an
//! eigenvalue fingerprint for comparing conjugacy classes.

use std::fmt;

use nalgebra::Schur;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Loop, Path, SignedEdge};
use crate::group::{CMatrix, Family, GroupElement, GroupKind};

/// A nonempty word in generators `0..r` and their inverses. Loops in the
/// bouquet `L_r` are exactly such words, letter `i` being edge `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<SignedEdge>", into = "Vec<SignedEdge>")]
pub struct Word {
    letters: Vec<SignedEdge>,
}

impl TryFrom<Vec<SignedEdge>> for Word {
    type Error = Error;
    fn try_from(letters: Vec<SignedEdge>) -> Result<Self> {
        Self::new(letters)
    }
}

impl From<Word> for Vec<SignedEdge> {
    fn from(w: Word) -> Self {
        w.letters
    }
}

impl Word {
    pub fn new(letters: Vec<SignedEdge>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::InvalidWord("empty word".into()));
        }
        Ok(Self { letters })
    }

    pub fn letters(&self) -> &[SignedEdge] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.letters.windows(2).all(|w| w[0].reversed() != w[1])
    }

    pub fn to_loop(&self) -> Loop {
        Path {
            steps: self.letters.clone(),
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "g{}", l.edge + 1)?;
            if l.sign < 0 {
                f.write_str("^-1")?;
            }
        }
        Ok(())
    }
}

/// `w(g)`: the product with the last letter leftmost, so that it agrees with
/// the holonomy of the corresponding loop in `L_r`.
pub fn word_eval(w: &Word, tuple: &[GroupElement]) -> Result<GroupElement> {
    let first = tuple
        .first()
        .ok_or_else(|| Error::InvalidWord("empty tuple".into()))?;
    let mut acc = GroupElement::identity(first.kind());
    for l in &w.letters {
        let g = tuple.get(l.edge).ok_or_else(|| {
            Error::InvalidWord(format!("generator {} used with {} elements", l.edge + 1, tuple.len()))
        })?;
        acc = g.pow_sign(l.sign).mul(&acc)?;
    }
    Ok(acc)
}

/// Every freely reduced word of length `1..=max_len` in `r` letters, shortest
/// first, together with its value on `tuple`.
///
/// Values are built by extending prefixes, so each word costs one product.
pub fn reduced_words_with_values(tuple: &[GroupElement], max_len: usize) -> Result<Vec<(Word, GroupElement)>> {
    let r = tuple.len();
    let letters: Vec<SignedEdge> = (0..r)
        .flat_map(|e| [SignedEdge::forward(e), SignedEdge::backward(e)])
        .collect();
    let powers: Vec<GroupElement> = letters.iter().map(|l| tuple[l.edge].pow_sign(l.sign)).collect();
    let mut out = Vec::new();
    let mut level: Vec<(Vec<SignedEdge>, GroupElement)> = Vec::new();
    for len in 1..=max_len {
        let mut next = Vec::new();
        if len == 1 {
            for (l, g) in letters.iter().zip(&powers) {
                next.push((vec![*l], g.clone()));
            }
        } else {
            for (w, val) in &level {
                let last = *w.last().expect("nonempty");
                for (l, g) in letters.iter().zip(&powers) {
                    if last.reversed() == *l {
                        continue;
                    }
                    let mut w2 = w.clone();
                    w2.push(*l);
                    next.push((w2, g.mul(val)?));
                }
            }
        }
        out.extend(next.iter().map(|(w, v)| (Word { letters: w.clone() }, v.clone())));
        level = next;
    }
    Ok(out)
}

/// Number of reduced words of length `1..=max_len` in `r` letters.
pub fn reduced_word_count(r: usize, max_len: usize) -> usize {
    let mut total = 0usize;
    let mut level = 2 * r;
    for _ in 0..max_len {
        total = total.saturating_add(level);
        level = level.saturating_mul((2 * r).saturating_sub(1));
    }
    total
}

fn eigenvalues(m: &CMatrix) -> Vec<Complex64> {
    let n = m.nrows();
    match Schur::try_new(m.clone(), f64::EPSILON, 10_000) {
        Some(s) => s.unpack().1.diagonal().iter().copied().collect(),
        None => vec![Complex64::new(f64::NAN, f64::NAN); n],
    }
}

/// Eigenvalues of the natural representation sorted by argument (in
/// `(-π, π]`) then modulus, flattened to `[re_1, im_1, re_2, im_2, …]`.
///
/// Matching fingerprints certify conjugacy in `U(m)`; compare them with
/// [`fingerprint_distance`], which does not depend on the sort order.
pub fn conjugacy_fingerprint(g: &GroupElement) -> Vec<f64> {
    let mut ev = eigenvalues(g.matrix());
    ev.sort_by(|a, b| a.arg().total_cmp(&b.arg()).then(a.norm().total_cmp(&b.norm())));
    ev.iter().flat_map(|z| [z.re, z.im]).collect()
}

fn unflatten(f: &[f64]) -> Vec<Complex64> {
    f.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect()
}

/// Whether a perfect matching exists using only pairs at distance `≤ t`.
fn has_matching(dist: &[Vec<f64>], t: f64) -> bool {
    let n = dist.len();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    fn augment(i: usize, dist: &[Vec<f64>], t: f64, seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for j in 0..dist.len() {
            if dist[i][j] <= t && !seen[j] {
                seen[j] = true;
                if owner[j].is_none_or(|k| augment(k, dist, t, seen, owner)) {
                    owner[j] = Some(i);
                    return true;
                }
            }
        }
        false
    }
    (0..n).all(|i| augment(i, dist, t, &mut vec![false; n], &mut owner))
}

/// Bottleneck distance between two eigenvalue multisets: the least `t` such
/// that the eigenvalues can be matched one-to-one with every pair within `t`.
/// Infinite when the sizes differ or an entry is not finite.
pub fn fingerprint_distance(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() || !a.len().is_multiple_of(2) || a.iter().chain(b).any(|x| !x.is_finite()) {
        return f64::INFINITY;
    }
    let (za, zb) = (unflatten(a), unflatten(b));
    let dist: Vec<Vec<f64>> = za.iter().map(|x| zb.iter().map(|y| (x - y).norm()).collect()).collect();
    let mut candidates: Vec<f64> = dist.iter().flatten().copied().collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    if candidates.is_empty() {
        return 0.0;
    }
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if has_matching(&dist, candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    candidates[lo]
}

/// Reason an eigenvalue match may fail to certify conjugacy inside the group
/// itself, if any. For `SO(2n)` an element without eigenvalue `±1` shares its
/// eigenvalues with a non-conjugate element (its conjugate by a reflection);
/// for the other kinds the eigenvalues decide conjugacy in the group.
pub fn fingerprint_caveat(g: &GroupElement, tol: f64) -> Option<&'static str> {
    let kind: GroupKind = g.kind();
    if kind.family != Family::SO || !kind.n.is_multiple_of(2) {
        return None;
    }
    let real_eigenvalue = eigenvalues(g.matrix())
        .iter()
        .any(|z| (z - 1.0).norm() <= tol.max(1e-8) || (z + 1.0).norm() <= tol.max(1e-8));
    (!real_eigenvalue).then_some("SO(2n) element without eigenvalue ±1: class may split from its O(2n) class")
}
