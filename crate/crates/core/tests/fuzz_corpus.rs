//! Replays the checked-in fuzz seeds through the same parsers on stable.

use std::path::PathBuf;

use wilsonnet::jobs;

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect();
    out.sort();
    out
}

fn text(bytes: &[u8]) -> &str {
    std::str::from_utf8(bytes).unwrap()
}

#[test]
fn job_seeds_parse() {
    let all = seeds("parse_job");
    assert!(all.len() >= 7);
    for (name, data) in all {
        let (&which, rest) = data.split_first().unwrap();
        let t = text(rest);
        let ok = match which % 7 {
            0 => jobs::parse_spin_job(t).is_ok(),
            1 => jobs::parse_identity_job(t).is_ok(),
            2 => jobs::parse_diagram_job(t).is_ok(),
            3 => jobs::parse_commutant_job(t).is_ok(),
            4 => jobs::parse_separation_job(t).is_ok(),
            5 => jobs::parse_sample_job(t).is_ok(),
            _ => jobs::parse_eval_job(t).is_ok(),
        };
        assert!(ok, "{name}");
    }
}

#[test]
fn fragment_seeds_parse_or_reject() {
    let rejected = ["isolated", "bad_sign", "not_member"];
    for (target, parse) in [
        ("parse_graph", (|t: &str| jobs::parse_graph(t).is_ok()) as fn(&str) -> bool),
        ("parse_loop", |t| jobs::parse_loop(t).is_ok()),
        ("parse_diagram", |t| jobs::parse_diagram(t).is_ok()),
        ("parse_element", |t| jobs::parse_element(t).is_ok()),
    ] {
        for (name, data) in seeds(target) {
            assert_eq!(parse(text(&data)), !rejected.contains(&name.as_str()), "{target}/{name}");
        }
    }
}
