use serde::Serialize;
use serde_json::Value;

/// Version tag of the JSON envelope.
pub const SCHEMA: &str = "bcstab.report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Text,
    Md,
}

/// The output of one subcommand. Only the serialized fields reach JSON
/// output; `text` and `markdown` are the human renderings.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: &'static str,
    pub version: &'static str,
    pub core_version: &'static str,
    pub seed: Option<u64>,
    pub params: Value,
    pub pass: bool,
    pub result: Value,
    #[serde(skip)]
    pub text: Vec<String>,
    #[serde(skip)]
    pub markdown: Option<String>,
}

impl Report {
    pub fn new(command: &'static str, seed: Option<u64>, params: Value) -> Report {
        Report {
            schema: SCHEMA,
            command,
            version: env!("CARGO_PKG_VERSION"),
            core_version: bcstab_core::VERSION,
            seed,
            params,
            pass: true,
            result: Value::Null,
            text: Vec::new(),
            markdown: None,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("reports serialize") + "\n",
            Format::Text => {
                let mut out = self.text.join("\n");
                out.push_str(if self.pass { "\nstatus: PASS\n" } else { "\nstatus: FAIL\n" });
                out
            }
            Format::Md => {
                let body = match &self.markdown {
                    Some(md) => md.clone(),
                    None => format!("```\n{}\n```\n", self.text.join("\n")),
                };
                format!(
                    "## bcstab {}\n\n{}\n**status:** {}\n",
                    self.command,
                    body,
                    if self.pass { "PASS" } else { "FAIL" }
                )
            }
        }
    }
}

/// A Markdown table from a header and rows of cells.
pub fn markdown_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = format!("| {} |\n|{}\n", header.join(" | "), "---|".repeat(header.len()));
    for row in rows {
        out.push_str(&format!("| {} |\n", row.join(" | ")));
    }
    out
}
