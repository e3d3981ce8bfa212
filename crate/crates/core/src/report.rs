//! Versioned JSON reports. Floats are written with 17 significant digits so a
//! report replays bit-for-bit.

use std::time::Duration;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::error::Result;
use crate::group::GroupElement;

pub const SCHEMA: &str = "wilsonnet/1";

/// A float serialized as `d.dddddddddddddddde±x`; non-finite values become `null`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Real(pub f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = RawValue::from_string(format!("{:.16e}", self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(Real(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN)))
    }
}

impl From<f64> for Real {
    fn from(x: f64) -> Self {
        Real(x)
    }
}

/// A complex number as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[Real; 2]", into = "[Real; 2]")]
pub struct Cplx(pub Complex64);

impl From<[Real; 2]> for Cplx {
    fn from(p: [Real; 2]) -> Self {
        Cplx(Complex64::new(p[0].0, p[1].0))
    }
}

impl From<Cplx> for [Real; 2] {
    fn from(c: Cplx) -> Self {
        [Real(c.0.re), Real(c.0.im)]
    }
}

/// Row-major entries of an element's matrix.
pub fn matrix_entries(g: &GroupElement) -> Vec<Cplx> {
    g.to_pairs().into_iter().map(|[re, im]| Cplx(Complex64::new(re, im))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_pass(passed: bool) -> Self {
        if passed {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

/// What an experiment produced, before it is wrapped into a report.
#[derive(Debug, Clone)]
pub struct Outcome<R, S> {
    pub records: Vec<R>,
    pub summary: S,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport<R, S> {
    pub schema: String,
    pub command: String,
    /// The job exactly as given, for replay.
    pub job: Box<RawValue>,
    pub seed: u64,
    pub tol: Real,
    pub records: Vec<R>,
    pub summary: S,
    pub verdict: Verdict,
    pub wall_time_s: Real,
}

impl<R, S> ExperimentReport<R, S> {
    /// `job` must be valid JSON; it is embedded verbatim (trimmed).
    pub fn new(command: String, job: &str, seed: u64, tol: f64, outcome: Outcome<R, S>, elapsed: Duration) -> Result<Self> {
        Ok(Self {
            schema: SCHEMA.to_string(),
            command,
            job: RawValue::from_string(job.trim().to_string())?,
            seed,
            tol: Real(tol),
            records: outcome.records,
            summary: outcome.summary,
            verdict: Verdict::from_pass(outcome.passed),
            wall_time_s: Real(elapsed.as_secs_f64()),
        })
    }

    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }
}
