//! Append-only JSON-lines log of LLM calls: one record per completion
//! attempt, including attempts whose final outcome was an error. Enables
//! after-the-fact inspection of how proposals evolved across iterations.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptRecord {
    pub run: String,
    pub iter: u64,
    pub prompt: String,
    /// Raw completion text, or an `[error] ...` marker when the call failed.
    pub response: String,
    pub latency_ms: u64,
    /// ISO-8601 timestamp of when the record was written.
    pub ts: String,
}

pub struct Transcript {
    run_id: String,
    records: Vec<TranscriptRecord>,
    sink: Option<BufWriter<File>>,
}

impl Transcript {
    pub fn in_memory(run_id: impl Into<String>) -> Self {
        Transcript {
            run_id: run_id.into(),
            records: Vec::new(),
            sink: None,
        }
    }

    /// Also stream records to `path` as JSON lines, flushing per record.
    pub fn to_file(run_id: impl Into<String>, path: impl AsRef<Path>) -> std::io::Result<Self> {
        let file = File::create(path)?;
        Ok(Transcript {
            run_id: run_id.into(),
            records: Vec::new(),
            sink: Some(BufWriter::new(file)),
        })
    }

    pub fn run_id(&self) -> &str {
        &self.run_id
    }

    pub fn log(&mut self, iter: u64, prompt: &str, response: &str, latency: Duration) {
        let record = TranscriptRecord {
            run: self.run_id.clone(),
            iter,
            prompt: prompt.to_string(),
            response: response.to_string(),
            latency_ms: latency.as_millis() as u64,
            ts: chrono::Utc::now().to_rfc3339(),
        };
        if let Some(sink) = &mut self.sink {
            // transcripts are diagnostics; never fail the run over them
            let _ = serde_json::to_string(&record)
                .map(|line| writeln!(sink, "{line}").and_then(|_| sink.flush()));
        }
        self.records.push(record);
    }

    pub fn records(&self) -> &[TranscriptRecord] {
        &self.records
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn records_accumulate_in_memory() {
        let mut t = Transcript::in_memory("run-1");
        t.log(1, "ask", "answer", Duration::from_millis(42));
        t.log(1, "ask", "[error] boom", Duration::ZERO);
        assert_eq!(t.records().len(), 2);
        assert_eq!(t.records()[0].latency_ms, 42);
        assert_eq!(t.records()[0].run, "run-1");
        assert!(t.records()[1].response.starts_with("[error]"));
    }

    #[test]
    fn jsonl_schema_field_names() {
        let mut t = Transcript::in_memory("r");
        t.log(3, "p", "resp", Duration::from_millis(7));
        let line = serde_json::to_string(&t.records()[0]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&line).unwrap();
        for key in ["run", "iter", "prompt", "response", "latency_ms", "ts"] {
            assert!(v.get(key).is_some(), "missing {key} in {line}");
        }
        assert_eq!(v["iter"], 3);
        // timestamp parses back as RFC 3339
        chrono::DateTime::parse_from_rfc3339(v["ts"].as_str().unwrap()).unwrap();
    }
}
