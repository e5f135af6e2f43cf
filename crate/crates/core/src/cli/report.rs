use std::fmt::Write as _;
use std::time::Duration;

use clap::ValueEnum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Indented, for people.
    Text,
    /// One `key: value` line per field; multi-line values repeat the key.
    Structured,
}

/// Result of one command: the echoed command, a verdict, ordered fields
/// and the elapsed time.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    /// One of ok, rejected, equivalent, not-equivalent, unknown.
    pub verdict: &'static str,
    pub fields: Vec<(&'static str, String)>,
    pub elapsed: Duration,
}

impl Report {
    pub fn new(command: String) -> Self {
        Report { command, verdict: "ok", fields: Vec::new(), elapsed: Duration::ZERO }
    }

    pub fn field(&mut self, key: &'static str, value: impl Into<String>) {
        self.fields.push((key, value.into()));
    }

    /// Values of `key`, one per line, in order.
    pub fn get(&self, key: &str) -> Vec<&str> {
        self.fields.iter().filter(|(k, _)| *k == key).flat_map(|(_, v)| v.lines()).collect()
    }

    pub fn render(&self, f: Format) -> String {
        let mut s = String::new();
        let ms = self.elapsed.as_millis();
        match f {
            Format::Structured => {
                let _ = writeln!(s, "command: {}", self.command);
                let _ = writeln!(s, "verdict: {}", self.verdict);
                for (k, v) in &self.fields {
                    for line in v.lines() {
                        let _ = writeln!(s, "{k}: {line}");
                    }
                }
                let _ = writeln!(s, "time-ms: {ms}");
            }
            Format::Text => {
                let _ = writeln!(s, "{}: {}", self.verdict, self.command);
                for (k, v) in &self.fields {
                    let mut lines = v.lines();
                    let _ = writeln!(s, "  {k}: {}", lines.next().unwrap_or(""));
                    for line in lines {
                        let _ = writeln!(s, "    {line}");
                    }
                }
                let _ = writeln!(s, "  time: {ms} ms");
            }
        }
        s
    }
}

/// Parses a structured report back into (key, value) lines.
pub fn parse_structured(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|l| l.split_once(": ").map(|(k, v)| (k.to_string(), v.to_string())))
        .collect()
}
