//! Problem files for the appendix test systems, shipped with the crate.
//!
//! Files are verbatim transcriptions. The `-corrected` variants repair
//! transcription errors that make the verbatim system disagree with its
//! reported solution; see the file headers.

pub const FIXTURES: &[(&str, &str)] = &[
    ("1a", include_str!("../../../fixtures/1a.prob")),
    ("1b", include_str!("../../../fixtures/1b.prob")),
    ("1c", include_str!("../../../fixtures/1c.prob")),
    ("1d", include_str!("../../../fixtures/1d.prob")),
    ("1e", include_str!("../../../fixtures/1e.prob")),
    ("1f", include_str!("../../../fixtures/1f.prob")),
    ("1g", include_str!("../../../fixtures/1g.prob")),
    ("1h", include_str!("../../../fixtures/1h.prob")),
    ("1i", include_str!("../../../fixtures/1i.prob")),
    ("1j", include_str!("../../../fixtures/1j.prob")),
    ("2a", include_str!("../../../fixtures/2a.prob")),
    ("2b", include_str!("../../../fixtures/2b.prob")),
    ("2c", include_str!("../../../fixtures/2c.prob")),
    ("2d", include_str!("../../../fixtures/2d.prob")),
    ("2e", include_str!("../../../fixtures/2e.prob")),
    ("2f", include_str!("../../../fixtures/2f.prob")),
    ("2g", include_str!("../../../fixtures/2g.prob")),
    ("2a-corrected", include_str!("../../../fixtures/2a-corrected.prob")),
    ("2b-corrected", include_str!("../../../fixtures/2b-corrected.prob")),
    ("2g-corrected", include_str!("../../../fixtures/2g-corrected.prob")),
];

/// Problem-file text by name, e.g. `"1a"` or `"2g-corrected"`.
pub fn get(name: &str) -> Option<&'static str> {
    FIXTURES.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

pub fn names() -> impl Iterator<Item = &'static str> {
    FIXTURES.iter().map(|(n, _)| *n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear::ProblemFile;

    #[test]
    fn every_fixture_parses() {
        for (name, text) in FIXTURES {
            let file = ProblemFile::parse(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(file.resolution, 4);
            assert!(file.rhs.is_some());
        }
        assert!(get("9z").is_none());
    }
}
