use serde::Serialize;

/// Where the reference value of a check comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Forced by the mathematics (exact zero, exact identity).
    Trivial,
    /// Pinned from an independent oracle or a pilot run.
    Derived,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Comparison {
    /// `measured < tolerance`
    Below,
    /// `measured <= tolerance`
    AtMost,
    /// `measured > tolerance`
    Above,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// The library invariant this check instantiates.
    pub invariant: &'static str,
    pub provenance: Provenance,
    pub measured: f64,
    pub comparison: Comparison,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(
        name: impl Into<String>,
        invariant: &'static str,
        provenance: Provenance,
        measured: f64,
        comparison: Comparison,
        tolerance: f64,
    ) -> Self {
        let passed = match comparison {
            Comparison::Below => measured < tolerance,
            Comparison::AtMost => measured <= tolerance,
            Comparison::Above => measured > tolerance,
        };
        Check {
            name: name.into(),
            invariant,
            provenance,
            measured,
            comparison,
            tolerance,
            passed,
        }
    }

    /// A yes/no property, recorded as `0` when it holds and `1` otherwise.
    pub fn flag(name: impl Into<String>, invariant: &'static str, provenance: Provenance, holds: bool) -> Self {
        Check::new(name, invariant, provenance, if holds { 0.0 } else { 1.0 }, Comparison::AtMost, 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyOutcome {
    pub study: String,
    pub kind: &'static str,
    pub passed: bool,
    pub checks: Vec<Check>,
    /// Study-specific facts that are reported but not judged.
    pub details: serde_json::Map<String, serde_json::Value>,
}

impl StudyOutcome {
    pub fn new(study: &str, kind: &'static str) -> Self {
        StudyOutcome {
            study: study.to_owned(),
            kind,
            passed: true,
            checks: Vec::new(),
            details: serde_json::Map::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.passed &= check.passed;
        self.checks.push(check);
    }

    pub fn detail(&mut self, key: &str, value: impl Into<serde_json::Value>) {
        self.details.insert(key.to_owned(), value.into());
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comparisons_are_strict_where_named() {
        let at = |c, m| Check::new("x", "", Provenance::Derived, m, c, 1.0).passed;
        assert!(!at(Comparison::Below, 1.0));
        assert!(at(Comparison::AtMost, 1.0));
        assert!(!at(Comparison::Above, 1.0));
        assert!(at(Comparison::Above, 1.5));
        // NaN never passes
        for c in [Comparison::Below, Comparison::AtMost, Comparison::Above] {
            assert!(!at(c, f64::NAN));
        }
    }

    #[test]
    fn flags_and_outcome() {
        let mut o = StudyOutcome::new("s", "k");
        assert!(o.passed);
        o.push(Check::flag("yes", "", Provenance::Trivial, true));
        assert!(o.passed);
        o.push(Check::flag("no", "", Provenance::Trivial, false));
        assert!(!o.passed);
        assert_eq!(o.failures().map(|c| c.name.as_str()).collect::<Vec<_>>(), ["no"]);
    }
}
