use super::weights::WeightSequence;

pub const PRESET_SH: &str = "paper-sh";
pub const PRESET_HYP: &str = "paper-hyp";

#[derive(Debug, Clone, PartialEq)]
pub struct LibraryEntry {
    pub name: &'static str,
    pub weights: WeightSequence,
}

/// `(2 | 1/2)` and `(2 | 3)`, both switching tails at index 1.
pub fn preset(name: &str) -> Option<WeightSequence> {
    match name {
        PRESET_SH => WeightSequence::two_tailed(2.0, 0.5, 1).ok(),
        PRESET_HYP => WeightSequence::two_tailed(2.0, 3.0, 1).ok(),
        _ => None,
    }
}

/// Built-in shifts covering every reachable verdict.
pub fn library() -> Vec<LibraryEntry> {
    let w = |start: i64, core: &[f64], left: f64, right: f64| {
        WeightSequence::new(start, core.to_vec(), left, right).expect("library weights are valid")
    };
    let entries = [
        (PRESET_SH, w(1, &[], 2.0, 0.5)),
        (PRESET_HYP, w(1, &[], 2.0, 3.0)),
        ("contraction-half", w(0, &[], 0.5, 0.5)),
        ("contraction-bumped", w(-1, &[1.2, 0.1], 0.3, 0.8)),
        ("expansion-three", w(0, &[], 3.0, 3.0)),
        ("expansion-hyponormal-core", w(0, &[2.0, 2.5, 3.0], 2.0, 3.0)),
        ("shifted-dip", w(0, &[1.5, 0.7, 2.0], 3.0, 1.0 / 3.0)),
        ("shifted-steep", w(-2, &[0.5, 3.0], 4.0, 0.25)),
        ("repelling-split", w(1, &[], 0.5, 2.0)),
        ("repelling-core", w(0, &[1.0, 0.2], 0.5, 3.0)),
        ("boundary-left", w(0, &[], 1.0, 0.5)),
        ("boundary-unitary", w(0, &[], 1.0, 1.0)),
    ];
    entries
        .into_iter()
        .map(|(name, weights)| LibraryEntry { name, weights })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shift::{classify, ShiftVerdict};
    use std::collections::BTreeSet;

    #[test]
    fn library_reaches_every_verdict() {
        let seen: BTreeSet<String> = library()
            .iter()
            .map(|e| format!("{:?}", classify(&e.weights).verdict))
            .collect();
        assert_eq!(seen.len(), 5);
        assert!(!seen.contains(&format!("{:?}", ShiftVerdict::HyperbolicOnly)));
    }

    #[test]
    fn presets() {
        assert_eq!(preset("paper-sh").unwrap().weight(0), 2.0);
        assert_eq!(preset("paper-hyp").unwrap().weight(1), 3.0);
        assert!(preset("nope").is_none());
    }
}
