//! Compact matrix groups: kinds, elements, membership, Haar sampling and the
//! invariant bilinear forms of the orthogonal and symplectic families.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Default tolerance for [`membership_check`].
pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-10;

/// Largest rank accepted when parsing a kind from text.
pub const MAX_RANK: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    U,
    SU,
    O,
    SO,
    Sp,
}

/// A group family together with its rank `n`.
///
/// `Sp(n)` is the compact symplectic group `U(2n) ∩ Sp(2n, C)`, so its
/// natural representation has dimension `2n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "KindRepr")]
pub struct GroupKind {
    pub family: Family,
    pub n: usize,
}

impl GroupKind {
    pub fn new(family: Family, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroRank);
        }
        Ok(Self { family, n })
    }

    pub const fn u(n: usize) -> Self {
        Self { family: Family::U, n }
    }
    pub const fn su(n: usize) -> Self {
        Self { family: Family::SU, n }
    }
    pub const fn o(n: usize) -> Self {
        Self { family: Family::O, n }
    }
    pub const fn so(n: usize) -> Self {
        Self { family: Family::SO, n }
    }
    pub const fn sp(n: usize) -> Self {
        Self { family: Family::Sp, n }
    }

    /// Dimension of the natural representation.
    pub fn matrix_dim(&self) -> usize {
        match self.family {
            Family::Sp => 2 * self.n,
            _ => self.n,
        }
    }

    pub fn is_unitary_track(&self) -> bool {
        matches!(self.family, Family::U | Family::SU)
    }

    pub fn is_real(&self) -> bool {
        matches!(self.family, Family::O | Family::SO)
    }

    /// `+1` for the symmetric form of O/SO, `-1` for the skew form of Sp.
    pub fn form_sign(&self) -> Result<i64> {
        match self.family {
            Family::O | Family::SO => Ok(1),
            Family::Sp => Ok(-1),
            _ => Err(Error::NoBilinearForm(*self)),
        }
    }

    /// Integer Gram matrix of the invariant bilinear form, row-major.
    ///
    /// Identity for O/SO, `[[0, I], [-I, 0]]` for Sp.
    pub fn gram(&self) -> Result<Vec<i64>> {
        let m = self.matrix_dim();
        let mut g = vec![0i64; m * m];
        match self.family {
            Family::O | Family::SO => {
                for i in 0..m {
                    g[i * m + i] = 1;
                }
            }
            Family::Sp => {
                let n = self.n;
                for i in 0..n {
                    g[i * m + i + n] = 1;
                    g[(i + n) * m + i] = -1;
                }
            }
            _ => return Err(Error::NoBilinearForm(*self)),
        }
        Ok(g)
    }

    /// Inverse of [`gram`](Self::gram); also integral.
    pub fn gram_inverse(&self) -> Result<Vec<i64>> {
        let g = self.gram()?;
        Ok(match self.family {
            Family::Sp => g.into_iter().map(|x| -x).collect(),
            _ => g,
        })
    }

    pub fn gram_matrix(&self) -> Result<CMatrix> {
        let m = self.matrix_dim();
        let g = self.gram()?;
        Ok(CMatrix::from_row_iterator(
            m,
            m,
            g.into_iter().map(|x| Complex64::new(x as f64, 0.0)),
        ))
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}({})", self.family, self.n)
    }
}

/// Parses `"U(3)"`, `"SU(2)"`, `"O(3)"`, `"SO(4)"`, `"Sp(1)"`.
impl FromStr for GroupKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidKind(s.to_string());
        let (name, rest) = s.trim().split_once('(').ok_or_else(bad)?;
        let n: usize = rest.strip_suffix(')').ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
        let family = match name.trim() {
            "U" => Family::U,
            "SU" => Family::SU,
            "O" => Family::O,
            "SO" => Family::SO,
            "Sp" => Family::Sp,
            _ => return Err(bad()),
        };
        if n > MAX_RANK {
            return Err(bad());
        }
        Self::new(family, n)
    }
}

/// Serialized as `{"family": "U", "n": 2}`; the text form `"U(2)"` is also read.
#[derive(Deserialize)]
#[serde(untagged)]
enum KindRepr {
    Text(String),
    Parts { family: Family, n: usize },
}

impl TryFrom<KindRepr> for GroupKind {
    type Error = Error;
    fn try_from(r: KindRepr) -> Result<Self> {
        match r {
            KindRepr::Text(s) => s.parse(),
            KindRepr::Parts { n, .. } if n > MAX_RANK => Err(Error::InvalidKind(format!("rank {n} exceeds {MAX_RANK}"))),
            KindRepr::Parts { family, n } => Self::new(family, n),
        }
    }
}

/// A square complex matrix tagged with the group it is claimed to belong to.
///
/// Construction only checks the shape; use [`membership_check`] or
/// [`GroupElement::checked`] to validate the group invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    kind: GroupKind,
    mat: CMatrix,
}

impl GroupElement {
    pub fn new(kind: GroupKind, mat: CMatrix) -> Result<Self> {
        let m = kind.matrix_dim();
        if mat.nrows() != m || mat.ncols() != m {
            return Err(Error::DimensionMismatch {
                kind,
                rows: mat.nrows(),
                cols: mat.ncols(),
                expected: m,
            });
        }
        Ok(Self { kind, mat })
    }

    /// Like [`new`](Self::new) but also requires membership at `tol`.
    pub fn checked(kind: GroupKind, mat: CMatrix, tol: f64) -> Result<Self> {
        let g = Self::new(kind, mat)?;
        let report = membership_check(&g, tol);
        if !report.passed {
            return Err(Error::NotMember {
                kind,
                reason: report.summary(),
            });
        }
        Ok(g)
    }

    pub fn identity(kind: GroupKind) -> Self {
        let m = kind.matrix_dim();
        Self {
            kind,
            mat: CMatrix::identity(m, m),
        }
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    /// Group inverse. Every family sits inside `U(m)`, so this is the adjoint.
    pub fn inverse(&self) -> Self {
        Self {
            kind: self.kind,
            mat: self.mat.adjoint(),
        }
    }

    /// `self^sign` for `sign = ±1`.
    pub fn pow_sign(&self, sign: i8) -> Self {
        if sign < 0 {
            self.inverse()
        } else {
            self.clone()
        }
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.kind != rhs.kind {
            return Err(Error::KindMismatch(self.kind, rhs.kind));
        }
        Ok(Self {
            kind: self.kind,
            mat: &self.mat * &rhs.mat,
        })
    }

    /// `k * self * k^{-1}`.
    pub fn conjugate_by(&self, k: &Self) -> Result<Self> {
        k.mul(self)?.mul(&k.inverse())
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    /// Row-major `[re, im]` pairs.
    pub fn to_pairs(&self) -> Vec<[f64; 2]> {
        let m = self.dim();
        let mut out = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                let z = self.mat[(i, j)];
                out.push([z.re, z.im]);
            }
        }
        out
    }

    pub fn from_pairs(kind: GroupKind, pairs: &[[f64; 2]]) -> Result<Self> {
        let m = kind.matrix_dim();
        if pairs.len() != m.saturating_mul(m) {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {m}x{m} matrix",
                pairs.len()
            )));
        }
        let mat = CMatrix::from_row_iterator(m, m, pairs.iter().map(|p| Complex64::new(p[0], p[1])));
        Self::new(kind, mat)
    }
}

/// Max-entry norm.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantCheck {
    pub name: &'static str,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipReport {
    pub kind: GroupKind,
    pub tol: f64,
    pub checks: Vec<InvariantCheck>,
    pub passed: bool,
}

impl MembershipReport {
    pub fn deviation(&self, name: &str) -> Option<f64> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.deviation)
    }

    pub fn summary(&self) -> String {
        self.checks
            .iter()
            .filter(|c| c.deviation.is_nan() || c.deviation > self.tol)
            .map(|c| format!("{} deviates by {:.3e}", c.name, c.deviation))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// Measures every defining invariant of `g.kind()`.
///
/// `unitarity` is always measured; `realness`, `determinant` and
/// `symplectic_form` only for the families that require them.
pub fn membership_check(g: &GroupElement, tol: f64) -> MembershipReport {
    let kind = g.kind;
    let m = g.dim();
    let mat = &g.mat;
    let mut checks = Vec::new();

    let gram = mat.adjoint() * mat - CMatrix::identity(m, m);
    checks.push(InvariantCheck {
        name: "unitarity",
        deviation: max_abs(&gram),
    });
    if kind.is_real() {
        checks.push(InvariantCheck {
            name: "realness",
            deviation: mat.iter().map(|z| z.im.abs()).fold(0.0, f64::max),
        });
    }
    if matches!(kind.family, Family::SU | Family::SO) {
        checks.push(InvariantCheck {
            name: "determinant",
            deviation: (mat.determinant() - Complex64::new(1.0, 0.0)).norm(),
        });
    }
    if kind.family == Family::Sp {
        let omega = kind.gram_matrix().expect("Sp has a form");
        let dev = mat.transpose() * &omega * mat - &omega;
        checks.push(InvariantCheck {
            name: "symplectic_form",
            deviation: max_abs(&dev),
        });
    }
    let passed = checks.iter().all(|c| c.deviation <= tol);
    MembershipReport {
        kind,
        tol,
        checks,
        passed,
    }
}

/// Complex-bilinear `vᵀ · gram · w` for the form preserved by `kind`.
pub fn form_eval(kind: GroupKind, v: &[Complex64], w: &[Complex64]) -> Result<Complex64> {
    let gram = kind.gram()?;
    let m = kind.matrix_dim();
    for len in [v.len(), w.len()] {
        if len != m {
            return Err(Error::VectorLength { got: len, expected: m });
        }
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..m {
        for j in 0..m {
            let gij = gram[i * m + j];
            if gij != 0 {
                acc += v[i] * w[j] * gij as f64;
            }
        }
    }
    Ok(acc)
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * s, im * s)
    })
}

fn real_gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample::<f64, _>(StandardNormal), 0.0)
    })
}

/// QR of a Gaussian matrix with the diagonal of R normalized to be positive.
fn normalized_q(z: CMatrix) -> CMatrix {
    let qr = z.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..q.ncols() {
        let d = r[(j, j)];
        let norm = d.norm();
        let phase = if norm > 0.0 { d / norm } else { Complex64::new(1.0, 0.0) };
        for i in 0..q.nrows() {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Quaternion-conjugate partner of a column `(a; b)`: `(-conj b; conj a)`.
fn quaternion_partner(col: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); 2 * n];
    for i in 0..n {
        out[i] = -col[n + i].conj();
        out[n + i] = col[i].conj();
    }
    out
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn haar_symplectic<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let m = 2 * n;
    let a = complex_gaussian(rng, n, n);
    let b = complex_gaussian(rng, n, n);
    // Columns of [[A, -conj B], [B, conj A]]; only the first n are needed,
    // the rest are their quaternion partners.
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(m);
    for j in 0..n {
        let mut v: Vec<Complex64> = (0..n).map(|i| a[(i, j)]).chain((0..n).map(|i| b[(i, j)])).collect();
        // two passes of modified Gram-Schmidt against the quaternionic span
        for _ in 0..2 {
            for q in &basis {
                let c = inner(q, &v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= qi * c;
                }
            }
        }
        let norm = inner(&v, &v).re.sqrt();
        for vi in &mut v {
            *vi /= norm;
        }
        let partner = quaternion_partner(&v, n);
        basis.push(v);
        basis.push(partner);
    }
    let mut q = CMatrix::zeros(m, m);
    for j in 0..n {
        for i in 0..m {
            q[(i, j)] = basis[2 * j][i];
            q[(i, j + n)] = basis[2 * j + 1][i];
        }
    }
    q
}

/// Draws a Haar-distributed element of `kind`.
pub fn haar_sample<R: Rng + ?Sized>(kind: GroupKind, rng: &mut R) -> GroupElement {
    let n = kind.n;
    let mat = match kind.family {
        Family::U => normalized_q(complex_gaussian(rng, n, n)),
        Family::SU => {
            let mut q = normalized_q(complex_gaussian(rng, n, n));
            let det = q.determinant();
            let fix = (det / det.norm()).conj();
            for i in 0..n {
                q[(i, 0)] *= fix;
            }
            q
        }
        Family::O => real_part(normalized_q(real_gaussian(rng, n, n))),
        Family::SO => {
            let mut q = real_part(normalized_q(real_gaussian(rng, n, n)));
            if q.determinant().re < 0.0 {
                for i in 0..n {
                    q[(i, 0)] = -q[(i, 0)];
                }
            }
            q
        }
        Family::Sp => haar_symplectic(rng, n),
    };
    GroupElement { kind, mat }
}

fn real_part(m: CMatrix) -> CMatrix {
    m.map(|z| Complex64::new(z.re, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const ALL_KINDS: [GroupKind; 10] = [
        GroupKind::u(1),
        GroupKind::u(3),
        GroupKind::su(2),
        GroupKind::su(3),
        GroupKind::o(2),
        GroupKind::o(3),
        GroupKind::so(2),
        GroupKind::so(4),
        GroupKind::sp(1),
        GroupKind::sp(2),
    ];

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn basis(m: usize, i: usize) -> Vec<Complex64> {
        (0..m).map(|j| c(if i == j { 1.0 } else { 0.0 })).collect()
    }

    #[test]
    fn u1_is_unit_circle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = haar_sample(GroupKind::u(1), &mut rng);
        assert!((g.matrix()[(0, 0)].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn so2_is_rotation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = haar_sample(GroupKind::so(2), &mut rng);
        let m = g.matrix();
        assert!(m.iter().all(|z| z.im == 0.0));
        assert!((m.determinant().re - 1.0).abs() < 1e-12);
        assert!((m[(0, 0)] - m[(1, 1)]).norm() < 1e-12);
        assert!((m[(0, 1)] + m[(1, 0)]).norm() < 1e-12);
    }

    #[test]
    fn sp1_is_su2() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = haar_sample(GroupKind::sp(1), &mut rng);
        assert!(membership_check(&g, 1e-12).passed);
        assert!((g.matrix().determinant() - c(1.0)).norm() < 1e-12);
    }

    #[test]
    fn every_kind_samples_members() {
        for kind in ALL_KINDS {
            for seed in 0..100 {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let g = haar_sample(kind, &mut rng);
                let report = membership_check(&g, DEFAULT_MEMBERSHIP_TOL);
                assert!(report.passed, "{kind} seed {seed}: {}", report.summary());
            }
        }
    }

    #[test]
    fn o3_sample_passes_tight_tolerance() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let g = haar_sample(GroupKind::o(3), &mut rng);
        assert!(membership_check(&g, 1e-12).passed);
    }

    #[test]
    fn identity_passes_with_zero_deviation() {
        for kind in ALL_KINDS {
            let r = membership_check(&GroupElement::identity(kind), 1e-15);
            assert!(r.passed);
            assert!(r.checks.iter().all(|c| c.deviation == 0.0), "{kind}");
        }
    }

    #[test]
    fn non_unitary_fails() {
        let mat = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(2.0), c(1.0)]));
        let g = GroupElement::new(GroupKind::u(2), mat).unwrap();
        let r = membership_check(&g, 1e-10);
        assert!(!r.passed);
        assert!(r.deviation("unitarity").unwrap() > 1.0);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let err = GroupElement::new(GroupKind::sp(2), CMatrix::identity(2, 2)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 4, .. }));
    }

    #[test]
    fn sampling_is_reproducible() {
        for kind in ALL_KINDS {
            let a = haar_sample(kind, &mut ChaCha8Rng::seed_from_u64(42));
            let b = haar_sample(kind, &mut ChaCha8Rng::seed_from_u64(42));
            assert_eq!(a, b);
        }
    }

    #[test]
    fn forms_on_basis_vectors() {
        let o2 = GroupKind::o(2);
        assert_eq!(form_eval(o2, &basis(2, 0), &basis(2, 0)).unwrap(), c(1.0));
        let sp1 = GroupKind::sp(1);
        assert_eq!(form_eval(sp1, &basis(2, 0), &basis(2, 1)).unwrap(), c(1.0));
        assert_eq!(form_eval(sp1, &basis(2, 1), &basis(2, 0)).unwrap(), c(-1.0));
        let sp2 = GroupKind::sp(2);
        assert_eq!(form_eval(sp2, &basis(4, 0), &basis(4, 1)).unwrap(), c(0.0));
        assert_eq!(form_eval(sp2, &basis(4, 1), &basis(4, 3)).unwrap(), c(1.0));
        assert!(matches!(
            form_eval(GroupKind::u(2), &basis(2, 0), &basis(2, 0)),
            Err(Error::NoBilinearForm(_))
        ));
    }

    #[test]
    fn forms_are_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for kind in [GroupKind::o(3), GroupKind::so(4), GroupKind::sp(1), GroupKind::sp(2)] {
            for _ in 0..20 {
                let g = haar_sample(kind, &mut rng);
                let m = kind.matrix_dim();
                let v = complex_gaussian(&mut rng, m, 1);
                let w = complex_gaussian(&mut rng, m, 1);
                let gv = g.matrix() * &v;
                let gw = g.matrix() * &w;
                let before = form_eval(kind, v.as_slice(), w.as_slice()).unwrap();
                let after = form_eval(kind, gv.as_slice(), gw.as_slice()).unwrap();
                assert!((before - after).norm() < 1e-10, "{kind}");
            }
        }
    }

    #[test]
    fn closure_under_product_and_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for kind in ALL_KINDS {
            let a = haar_sample(kind, &mut rng);
            let b = haar_sample(kind, &mut rng);
            let ab = a.mul(&b).unwrap();
            assert!(membership_check(&ab, 1e-10).passed);
            assert!(membership_check(&a.inverse(), 1e-10).passed);
        }
    }

    #[test]
    fn pairs_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = haar_sample(GroupKind::sp(2), &mut rng);
        let back = GroupElement::from_pairs(g.kind(), &g.to_pairs()).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn kind_json_forms() {
        let k = GroupKind::sp(2);
        assert_eq!(serde_json::to_string(&k).unwrap(), r#"{"family":"Sp","n":2}"#);
        assert_eq!(serde_json::from_str::<GroupKind>(r#"{"family":"Sp","n":2}"#).unwrap(), k);
        assert_eq!(serde_json::from_str::<GroupKind>(r#""Sp(2)""#).unwrap(), k);
        assert_eq!("SU(3)".parse::<GroupKind>().unwrap(), GroupKind::su(3));
        for bad in [r#""U(0)""#, r#""X(2)""#, r#""U2""#, r#"{"family":"U","n":0}"#, r#"{"family":"U","n":100000}"#, "3"] {
            assert!(serde_json::from_str::<GroupKind>(bad).is_err(), "{bad}");
        }
    }
}
