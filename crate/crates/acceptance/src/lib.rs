//! Report bookkeeping for the acceptance target.

use std::time::Duration;

/// Outcome of one criterion.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl Outcome {
    /// The single report line, `PASS name (0.12 s): detail`.
    pub fn line(&self) -> String {
        format!(
            "{} {} ({:.2} s): {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

/// Criteria whose failure is expected, with the reason printed next to
/// them. Anything else failing fails the target.
pub fn unexpected_failures<'a>(outcomes: &'a [Outcome], known: &[(&str, &str)]) -> Vec<&'a Outcome> {
    outcomes
        .iter()
        .filter(|o| !o.pass && !known.iter().any(|(n, _)| *n == o.name))
        .collect()
}
