#![no_main]
//! Diagram JSON; parsed pairings are also flip-normalized and checked.

use libfuzzer_sys::fuzz_target;
use wilsonnet::diagrams::{normalize_pairing, pairing_from_permutation};
use wilsonnet::jobs::{parse_diagram, Diagram};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(diagram) = parse_diagram(text) else { return };
    let json = serde_json::to_string(&diagram).expect("diagrams serialize");
    assert_eq!(parse_diagram(&json).expect("round trip"), diagram);
    if let Diagram::Pairing(tau) = diagram {
        if tau.half_size() <= 64 {
            let norm = normalize_pairing(&tau);
            assert_eq!(tau.conjugate_by_flips(&norm.flips).unwrap(), pairing_from_permutation(&norm.sigma));
        }
    }
});
