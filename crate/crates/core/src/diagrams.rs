//! Permutations, pair partitions (Brauer diagrams) and the flip
//! normalization that turns any pairing into a permutation diagram.
//!
//! Points are stored 0-based. Cycle notation in constructors and in
//! `Display` output is 1-based, the way cycles are usually written.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `p` accepted by [`enumerate_pairings`]; (2·8−1)!! ≈ 2·10⁶.
pub const MAX_ENUM_P: usize = 8;

/// A bijection of `{0, ..., d-1}`, stored as its image list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    images: Vec<usize>,
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::from_images(v)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.images
    }
}

impl Permutation {
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let d = images.len();
        let mut seen = vec![false; d];
        for (i, &x) in images.iter().enumerate() {
            if x >= d {
                return Err(Error::InvalidPermutation(format!("image {x} of {i} is out of range 0..{d}")));
            }
            if std::mem::replace(&mut seen[x], true) {
                return Err(Error::InvalidPermutation(format!("{x} is hit twice")));
            }
        }
        Ok(Self { images })
    }

    pub fn identity(d: usize) -> Self {
        Self { images: (0..d).collect() }
    }

    /// Builds a permutation of `{1..d}` from 1-based disjoint cycles, e.g.
    /// `from_cycles(4, &[&[1, 3, 4, 2]])` sends 1→3→4→2→1.
    pub fn from_cycles(d: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..d).collect();
        let mut used = vec![false; d];
        for cycle in cycles {
            for (k, &a) in cycle.iter().enumerate() {
                if a == 0 || a > d {
                    return Err(Error::InvalidPermutation(format!("point {a} not in 1..={d}")));
                }
                if std::mem::replace(&mut used[a - 1], true) {
                    return Err(Error::InvalidPermutation(format!("point {a} appears twice")));
                }
                images[a - 1] = cycle[(k + 1) % cycle.len()] - 1;
            }
        }
        Ok(Self { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x] = i;
        }
        Self { images: inv }
    }

    /// `self ∘ other`, i.e. `x ↦ self(other(x))`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.degree() != other.degree() {
            return Err(Error::InvalidPermutation(format!(
                "degrees {} and {} differ",
                self.degree(),
                other.degree()
            )));
        }
        Ok(Self {
            images: other.images.iter().map(|&x| self.images[x]).collect(),
        })
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// All `d!` permutations in lexicographic order of their image lists.
    pub fn all(d: usize) -> impl Iterator<Item = Permutation> {
        let mut next = Some((0..d).collect::<Vec<_>>());
        std::iter::from_fn(move || {
            let cur = next.take()?;
            let mut a = cur.clone();
            if let Some(i) = (1..a.len()).rev().find(|&i| a[i - 1] < a[i]) {
                let j = (i..a.len()).rev().find(|&j| a[j] > a[i - 1]).unwrap();
                a.swap(i - 1, j);
                a[i..].reverse();
                next = Some(a);
            }
            Some(Permutation { images: cur })
        })
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in cycles(self) {
            let body: Vec<String> = c.iter().map(|x| (x + 1).to_string()).collect();
            write!(f, "({})", body.join(","))?;
        }
        Ok(())
    }
}

/// Disjoint cycles of `sigma`, fixed points included. Each cycle starts at
/// its least point and follows `x → σ(x)`; cycles are sorted by that point.
pub fn cycles(sigma: &Permutation) -> Vec<Vec<usize>> {
    let d = sigma.degree();
    let mut seen = vec![false; d];
    let mut out = Vec::new();
    for start in 0..d {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            cycle.push(x);
            x = sigma.apply(x);
        }
        out.push(cycle);
    }
    out
}

/// A fixed-point-free involution of `{0, ..., 2p-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<[usize; 2]>", into = "Vec<[usize; 2]>")]
pub struct Pairing {
    partner: Vec<usize>,
}

impl TryFrom<Vec<[usize; 2]>> for Pairing {
    type Error = Error;
    fn try_from(pairs: Vec<[usize; 2]>) -> Result<Self> {
        Self::from_pairs(&pairs)
    }
}

impl From<Pairing> for Vec<[usize; 2]> {
    fn from(p: Pairing) -> Self {
        p.pairs()
    }
}

impl Pairing {
    pub fn from_partner(partner: Vec<usize>) -> Result<Self> {
        let n = partner.len();
        if !n.is_multiple_of(2) {
            return Err(Error::InvalidPairing(format!("odd number of points {n}")));
        }
        for (i, &j) in partner.iter().enumerate() {
            if j >= n {
                return Err(Error::InvalidPairing(format!("partner {j} of {i} out of range")));
            }
            if j == i {
                return Err(Error::InvalidPairing(format!("{i} is paired with itself")));
            }
            if partner[j] != i {
                return Err(Error::InvalidPairing(format!("{i}→{j} is not symmetric")));
            }
        }
        Ok(Self { partner })
    }

    /// From 0-based pairs covering `{0..2p-1}` exactly once.
    pub fn from_pairs(pairs: &[[usize; 2]]) -> Result<Self> {
        let n = pairs.len().checked_mul(2).ok_or_else(|| Error::InvalidPairing("too many pairs".into()))?;
        let mut partner = vec![usize::MAX; n];
        for &[a, b] in pairs {
            if a >= n || b >= n {
                return Err(Error::InvalidPairing(format!("pair {{{a}, {b}}} leaves 0..{n}")));
            }
            if a == b || partner[a] != usize::MAX || partner[b] != usize::MAX {
                return Err(Error::InvalidPairing(format!("pair {{{a}, {b}}} reuses a point")));
            }
            partner[a] = b;
            partner[b] = a;
        }
        Self::from_partner(partner)
    }

    /// From 1-based pairs, the way diagrams are usually written.
    pub fn from_pairs_one_based(pairs: &[[usize; 2]]) -> Result<Self> {
        let shifted = pairs
            .iter()
            .map(|&[a, b]| match (a.checked_sub(1), b.checked_sub(1)) {
                (Some(a), Some(b)) => Ok([a, b]),
                _ => Err(Error::InvalidPairing("0 in a 1-based pairing".into())),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_pairs(&shifted)
    }

    /// Number of pairs, `p`.
    pub fn half_size(&self) -> usize {
        self.partner.len() / 2
    }

    pub fn partner(&self, i: usize) -> usize {
        self.partner[i]
    }

    /// Pairs `[a, b]` with `a < b`, sorted by `a`.
    pub fn pairs(&self) -> Vec<[usize; 2]> {
        self.partner
            .iter()
            .enumerate()
            .filter(|&(i, &j)| i < j)
            .map(|(i, &j)| [i, j])
            .collect()
    }

    /// Conjugates by the product of `θ_i = (i, p+i)` over `flips`, i.e. swaps
    /// top point `i` with bottom point `p+i` for each flipped `i`.
    pub fn conjugate_by_flips(&self, flips: &[usize]) -> Result<Self> {
        let theta = self.flip_map(flips)?;
        let mut partner = vec![0; self.partner.len()];
        for (i, &j) in self.partner.iter().enumerate() {
            partner[theta[i]] = theta[j];
        }
        Ok(Self { partner })
    }

    fn flip_map(&self, flips: &[usize]) -> Result<Vec<usize>> {
        let p = self.half_size();
        let mut theta: Vec<usize> = (0..2 * p).collect();
        for &i in flips {
            if i >= p {
                return Err(Error::SlotOutOfRange { slot: i + 1, max: p });
            }
            theta.swap(i, i + p);
        }
        Ok(theta)
    }

    /// `Some(σ)` when every top point `i` is paired with bottom point `p+σ(i)`.
    pub fn as_permutation(&self) -> Option<Permutation> {
        let p = self.half_size();
        let images = (0..p)
            .map(|i| self.partner[i].checked_sub(p))
            .collect::<Option<Vec<_>>>()?;
        Permutation::from_images(images).ok()
    }

    /// Parity of the pairs whose orientation `k < l` is reversed by the flip
    /// conjugation; `-1` when an odd number of pairs turn around.
    pub fn flip_orientation_sign(&self, flips: &[usize]) -> Result<i64> {
        let theta = self.flip_map(flips)?;
        let turned = self.pairs().iter().filter(|&&[k, l]| theta[k] > theta[l]).count();
        Ok(if turned % 2 == 0 { 1 } else { -1 })
    }
}

impl fmt::Display for Pairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.pairs().iter().map(|[a, b]| format!("{{{},{}}}", a + 1, b + 1)).collect();
        write!(f, "{{{}}}", body.join(","))
    }
}

/// Flip set and permutation produced by [`normalize_pairing`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlipNormalization {
    /// 0-based top slots `i` whose points `i` and `p+i` are swapped, ascending.
    pub flips: Vec<usize>,
    pub sigma: Permutation,
}

/// The pairing `i ↔ p + σ(i)`.
pub fn pairing_from_permutation(sigma: &Permutation) -> Pairing {
    let p = sigma.degree();
    let mut partner = vec![0; 2 * p];
    for i in 0..p {
        let j = p + sigma.apply(i);
        partner[i] = j;
        partner[j] = i;
    }
    Pairing { partner }
}

/// Finds flips `F` and `σ ∈ S_p` such that conjugating `tau` by `∏_{i∈F} θ_i`
/// pairs each `i` with `p + σ(i)`.
///
/// Walks the orbits of `θτ` (apply `τ`, then `θ = θ_1⋯θ_p`), seeding each
/// new orbit at the least top point not yet covered. Projecting an orbit to
/// `{0..p-1}` gives a cycle of `σ` in traversal order, and `i` is flipped
/// when the orbit passes through the bottom point `p+i` instead of `i`.
pub fn normalize_pairing(tau: &Pairing) -> FlipNormalization {
    let p = tau.half_size();
    let theta = |x: usize| if x < p { x + p } else { x - p };
    let mut covered = vec![false; p];
    let mut flipped = vec![false; p];
    let mut images = vec![0; p];
    while let Some(seed) = covered.iter().position(|&c| !c) {
        let mut orbit = Vec::new();
        let mut x = seed;
        loop {
            orbit.push(x);
            x = theta(tau.partner(x));
            if x == seed {
                break;
            }
        }
        let projected: Vec<usize> = orbit.iter().map(|&y| y % p).collect();
        for (k, &y) in orbit.iter().enumerate() {
            let top = y % p;
            covered[top] = true;
            flipped[top] = y >= p;
            images[top] = projected[(k + 1) % projected.len()];
        }
    }
    FlipNormalization {
        flips: (0..p).filter(|&i| flipped[i]).collect(),
        sigma: Permutation { images },
    }
}

/// Iterator over all `(2p-1)!!` pairings of `{0..2p-1}`: the least unpaired
/// point is matched with each remaining point in increasing order.
#[derive(Debug, Clone)]
pub struct Pairings {
    p: usize,
    choices: Option<Vec<usize>>,
}

impl Iterator for Pairings {
    type Item = Pairing;

    fn next(&mut self) -> Option<Pairing> {
        let choices = self.choices.as_mut()?;
        let n = 2 * self.p;
        let mut partner = vec![usize::MAX; n];
        let mut free: Vec<usize> = (0..n).collect();
        for &c in choices.iter() {
            let a = free.remove(0);
            let b = free.remove(c);
            partner[a] = b;
            partner[b] = a;
        }
        // advance the odometer: slot k has 2(p-k)-1 options
        let mut k = self.p;
        loop {
            if k == 0 {
                self.choices = None;
                break;
            }
            k -= 1;
            choices[k] += 1;
            if choices[k] < 2 * (self.p - k) - 1 {
                break;
            }
            choices[k] = 0;
        }
        Some(Pairing { partner })
    }
}

pub fn enumerate_pairings(p: usize) -> Result<Pairings> {
    if p > MAX_ENUM_P {
        return Err(Error::BoundExceeded(format!("pairing enumeration limited to p ≤ {MAX_ENUM_P}, got {p}")));
    }
    Ok(Pairings {
        p,
        choices: Some(vec![0; p]),
    })
}
