//! Law reports: one line per checked law.

use std::fmt;

#[derive(Clone, Debug, PartialEq)]
pub struct LawResult {
    pub name: String,
    pub passed: bool,
    pub ncases: usize,
    /// Cases whose preconditions could not be met and were resampled.
    pub skipped: usize,
    /// Human-readable description of the first failing case.
    pub counterexample: Option<String>,
    /// File the counterexample was written to, if any.
    pub counterexample_file: Option<String>,
    /// Exploration results are reported but never make a suite fail.
    pub exploratory: bool,
}

impl LawResult {
    pub fn pass(name: impl Into<String>, ncases: usize) -> Self {
        LawResult {
            name: name.into(),
            passed: true,
            ncases,
            skipped: 0,
            counterexample: None,
            counterexample_file: None,
            exploratory: false,
        }
    }

    pub fn fail(name: impl Into<String>, ncases: usize, counterexample: impl Into<String>) -> Self {
        LawResult { passed: false, counterexample: Some(counterexample.into()), ..Self::pass(name, ncases) }
    }

    pub fn from_check(name: impl Into<String>, ncases: usize, failure: Option<String>) -> Self {
        match failure {
            None => Self::pass(name, ncases),
            Some(c) => Self::fail(name, ncases, c),
        }
    }

    pub fn exploratory(mut self) -> Self {
        self.exploratory = true;
        self
    }
}

impl fmt::Display for LawResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match (self.passed, self.exploratory) {
            (true, _) => "PASS",
            (false, false) => "FAIL",
            (false, true) => "FAIL(exploratory)",
        };
        write!(f, "LAW {} {} ncases={}", self.name, status, self.ncases)?;
        if let Some(file) = &self.counterexample_file {
            write!(f, " counterexample={file}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LawReport {
    pub instance: String,
    pub suite: String,
    pub results: Vec<LawResult>,
    /// Free-form lines printed after the law lines (witnesses, notes).
    pub notes: Vec<String>,
}

impl LawReport {
    pub fn new(instance: impl Into<String>, suite: impl Into<String>) -> Self {
        LawReport { instance: instance.into(), suite: suite.into(), results: Vec::new(), notes: Vec::new() }
    }

    pub fn push(&mut self, r: LawResult) {
        self.results.push(r);
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.notes.push(line.into());
    }

    pub fn extend(&mut self, other: LawReport) {
        self.results.extend(other.results);
        self.notes.extend(other.notes);
    }

    pub fn get(&self, name: &str) -> Option<&LawResult> {
        self.results.iter().find(|r| r.name == name)
    }

    /// True if every non-exploratory law passed.
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed || r.exploratory)
    }

    pub fn failures(&self) -> impl Iterator<Item = &LawResult> {
        self.results.iter().filter(|r| !r.passed && !r.exploratory)
    }

    /// Writes each failing counterexample to `<dir>/<instance>-<law>.txt`
    /// and records the path on the result.
    pub fn write_counterexamples(&mut self, dir: &std::path::Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        for r in &mut self.results {
            if let Some(c) = &r.counterexample {
                let path = dir.join(format!("{}-{}.txt", self.instance, r.name));
                std::fs::write(&path, format!("{c}\n"))?;
                r.counterexample_file = Some(path.display().to_string());
            }
        }
        Ok(())
    }
}

impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.results {
            writeln!(f, "{r}")?;
        }
        for n in &self.notes {
            writeln!(f, "# {n}")?;
        }
        Ok(())
    }
}
