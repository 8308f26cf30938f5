use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Everything a run prints or writes, so that a cached run can replay it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub exit: i32,
    pub machine: String,
    pub human: String,
    pub certificate: Option<String>,
    /// Extra files (coloring, witness host) keyed by kind.
    pub artifacts: Vec<(String, String)>,
}

impl Outcome {
    pub fn artifact(&self, kind: &str) -> Option<&str> {
        self.artifacts.iter().find(|(k, _)| k == kind).map(|(_, v)| v.as_str())
    }
}

#[derive(Serialize)]
struct Machine<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    outcome: &'a str,
    exit: i32,
    inputs: &'a [Input],
    parameters: &'a Value,
    result: &'a Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct Input {
    pub role: String,
    pub digest: String,
}

/// Builder for one run's report.
pub struct Report {
    pub command: String,
    pub inputs: Vec<Input>,
    pub parameters: Value,
    lines: Vec<String>,
    certificate: Option<String>,
    artifacts: Vec<(String, String)>,
}

impl Report {
    pub fn new(command: &str, parameters: Value) -> Self {
        Report {
            command: command.to_string(),
            inputs: Vec::new(),
            parameters,
            lines: Vec::new(),
            certificate: None,
            artifacts: Vec::new(),
        }
    }

    pub fn input(&mut self, role: &str, digest: String) {
        self.inputs.push(Input {
            role: role.to_string(),
            digest,
        });
    }

    pub fn line(&mut self, text: impl Into<String>) {
        self.lines.push(text.into());
    }

    pub fn block(&mut self, text: &str) {
        for l in text.lines() {
            self.lines.push(format!("  {l}"));
        }
    }

    pub fn certificate(&mut self, cert: &fraisse_core::certificate::Certificate) {
        self.certificate = Some(cert.to_json());
    }

    pub fn artifact(&mut self, kind: &str, text: String) {
        self.artifacts.push((kind.to_string(), text));
    }

    pub fn finish(self, outcome: &str, exit: i32, result: Value) -> Outcome {
        let machine = Machine {
            tool: "fraisse",
            version: env!("CARGO_PKG_VERSION"),
            command: &self.command,
            outcome,
            exit,
            inputs: &self.inputs,
            parameters: &self.parameters,
            result: &result,
        };
        let mut text = serde_json::to_string_pretty(&machine).expect("reports serialize");
        text.push('\n');
        let mut human = format!("{}: {outcome}\n", self.command);
        for l in &self.lines {
            human.push_str(l);
            human.push('\n');
        }
        Outcome {
            exit,
            machine: text,
            human,
            certificate: self.certificate,
            artifacts: self.artifacts,
        }
    }
}
