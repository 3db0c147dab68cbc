use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Refuted,
    Inconclusive,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Refuted => 1,
            Outcome::Inconclusive => 3,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Outcome::Pass => "PASS",
            Outcome::Refuted => "REFUTED",
            Outcome::Inconclusive => "INCONCLUSIVE",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub description: String,
    /// A complex (with map block, for immersions) in the text format.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complex: Option<String>,
}

impl Witness {
    pub fn text(description: impl Into<String>) -> Self {
        Witness { description: description.into(), complex: None }
    }

    pub fn with_complex(description: impl Into<String>, complex: String) -> Self {
        Witness { description: description.into(), complex: Some(complex) }
    }
}

/// One document per run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub input: String,
    pub outcome: Outcome,
    pub summary: Vec<String>,
    pub witnesses: Vec<Witness>,
    pub data: serde_json::Value,
}

impl Report {
    pub fn new(command: &str, input: &str, outcome: Outcome) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            input: input.to_string(),
            outcome,
            summary: Vec::new(),
            witnesses: Vec::new(),
            data: serde_json::Value::Null,
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.outcome.exit_code()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_human(&self) -> String {
        let mut s = format!("{} {}: {}\n", self.command, self.input, self.outcome.label());
        for line in &self.summary {
            s += &format!("  {line}\n");
        }
        for w in &self.witnesses {
            s += &format!("witness: {}\n", w.description);
            if let Some(c) = &w.complex {
                for line in c.lines() {
                    s += &format!("    {line}\n");
                }
            }
        }
        s
    }
}
