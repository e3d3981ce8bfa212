#![no_main]
//! Every job parser. The first byte picks the parser; the rest is the job text.

use libfuzzer_sys::fuzz_target;
use wilsonnet::jobs;

fuzz_target!(|data: &[u8]| {
    let Some((&which, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    match which % 7 {
        0 => drop(jobs::parse_spin_job(text)),
        1 => drop(jobs::parse_identity_job(text)),
        2 => drop(jobs::parse_diagram_job(text)),
        3 => drop(jobs::parse_commutant_job(text)),
        4 => drop(jobs::parse_separation_job(text)),
        5 => drop(jobs::parse_sample_job(text)),
        _ => drop(jobs::parse_eval_job(text)),
    }
});
