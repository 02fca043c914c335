//! The append-only run log and its hash chain.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::agents::{AgentDecision, Exchange, Persona};
use crate::game::{FinalOutcome, GameConfig, InfluenceKind, Outcome, Role, TradeRecord};
use crate::metrics::RunMetrics;

pub const FORMAT_VERSION: u32 = 1;

/// Which model (if any) produced the decisions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BackendInfo {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature: Option<f64>,
}

impl BackendInfo {
    pub fn scripted() -> BackendInfo {
        BackendInfo {
            name: "scripted".to_string(),
            model: None,
            temperature: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecordHeader {
    pub format: u32,
    pub experiment: String,
    pub seed: u64,
    pub config: GameConfig,
    /// Players in seat order.
    pub roster: Vec<(Role, Persona)>,
    pub communication: bool,
    pub backend: BackendInfo,
}

/// What kind of step an entry logs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryKind {
    RoundStart,
    EventChoice,
    EventResolution,
    Discussion,
    Summary,
    MeetingSkipped,
    HealthPlan,
    GoalPlan,
    HealthInvestment,
    InvestmentClose,
    Purchase,
    TradeProposal,
    TradeResponse,
    DirtyCheck,
    Completion,
    Discard,
    RoundEnd,
}

impl EntryKind {
    /// Position within the round: 0 opens, 1-6 are the round's steps, 7 closes.
    pub fn step(self) -> u8 {
        use EntryKind::*;
        match self {
            RoundStart => 0,
            EventChoice | EventResolution => 1,
            Discussion | Summary | MeetingSkipped => 2,
            HealthPlan | GoalPlan => 3,
            HealthInvestment | InvestmentClose | Purchase => 4,
            TradeProposal | TradeResponse => 5,
            DirtyCheck | Completion | Discard => 6,
            RoundEnd => 7,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletedCard {
    pub id: String,
    pub points: u32,
    pub health_penalty: u32,
    /// The claim added a dirty opportunity not counted at the round's check.
    #[serde(default)]
    pub counted_now: bool,
}

/// The effect an entry had on the game.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum Applied {
    RoundStarted {
        health_after_decay: i64,
        events: Vec<String>,
        communication_blocked: bool,
    },
    Vote,
    EventResolved {
        event: String,
        option: usize,
        votes: Vec<usize>,
    },
    Discussion {
        transcript: String,
    },
    Summaries {
        summaries: [String; 5],
    },
    MeetingSkipped {
        reason: String,
    },
    HealthPlanned {
        coins: u32,
    },
    GoalSet {
        goal: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rejected: Option<String>,
    },
    Invested {
        coins: u32,
        health: i64,
    },
    InvestmentClosed {
        health: i64,
        outcome: Outcome,
    },
    Purchased {
        items: Vec<(InfluenceKind, u32)>,
        skipped: Vec<String>,
    },
    TradeRouted {
        responder: Role,
    },
    TradeSkipped {
        reason: String,
    },
    TradeSettled {
        trade: TradeRecord,
    },
    DirtyOpportunities {
        counts: [u32; 5],
    },
    Completed {
        cards: Vec<CompletedCard>,
        skipped: Vec<String>,
        health: i64,
        outcome: Outcome,
    },
    Discarded {
        card: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rejected: Option<String>,
    },
    RoundEnded {
        health: i64,
        outcome: Outcome,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseEntry {
    pub seq: u64,
    pub round: u32,
    pub kind: EntryKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role: Option<Role>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exchanges: Vec<Exchange>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decision: Option<AgentDecision>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub rationale: String,
    #[serde(default)]
    pub fallback: bool,
    pub applied: Applied,
    /// Hex SHA-256 of the game state after the entry was applied.
    pub state_digest: String,
    /// Hex link of the hash chain through this entry.
    pub chain: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeEntry {
    pub seq: u64,
    pub complete: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome: Option<FinalOutcome>,
    pub final_health: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<RunMetrics>,
    pub chain: String,
}

/// One line of a JSONL run log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "line", rename_all = "snake_case")]
pub enum RecordLine {
    Header(RecordHeader),
    Phase(PhaseEntry),
    Outcome(OutcomeEntry),
}

#[derive(Debug, Error)]
pub enum RecordError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}:{line}: {message}")]
    Format { path: String, line: usize, message: String },
    #[error("chain broken at entry {seq}: expected {expected}, found {found}")]
    ChainMismatch { seq: u64, expected: String, found: String },
}

fn sha_hex(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p);
    }
    hex::encode(h.finalize())
}

pub fn genesis(header: &RecordHeader) -> String {
    sha_hex(&[&serde_json::to_vec(header).expect("header serializes")])
}

/// Chain link for `entry` given the previous link; the entry's own `chain`
/// field is ignored.
pub fn link_phase(prev: &str, entry: &PhaseEntry) -> String {
    let mut e = entry.clone();
    e.chain.clear();
    let body = serde_json::to_vec(&e).expect("entry serializes");
    sha_hex(&[prev.as_bytes(), &body, entry.state_digest.as_bytes()])
}

pub fn link_outcome(prev: &str, entry: &OutcomeEntry) -> String {
    let mut e = entry.clone();
    e.chain.clear();
    let body = serde_json::to_vec(&e).expect("entry serializes");
    sha_hex(&[prev.as_bytes(), &body])
}

/// A whole game log.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub header: RecordHeader,
    pub entries: Vec<PhaseEntry>,
    pub outcome: Option<OutcomeEntry>,
}

impl RunRecord {
    pub fn new(header: RecordHeader) -> RunRecord {
        RunRecord {
            header,
            entries: Vec::new(),
            outcome: None,
        }
    }

    pub fn is_complete(&self) -> bool {
        self.outcome.as_ref().is_some_and(|o| o.complete)
    }

    /// Last link of the chain (the genesis link for an empty log).
    pub fn head(&self) -> String {
        match (&self.outcome, self.entries.last()) {
            (Some(o), _) => o.chain.clone(),
            (None, Some(e)) => e.chain.clone(),
            (None, None) => genesis(&self.header),
        }
    }

    pub fn lines(&self) -> Vec<RecordLine> {
        let mut out = vec![RecordLine::Header(self.header.clone())];
        out.extend(self.entries.iter().cloned().map(RecordLine::Phase));
        out.extend(self.outcome.clone().map(RecordLine::Outcome));
        out
    }

    pub fn to_jsonl(&self) -> String {
        let mut s = String::new();
        for line in self.lines() {
            s.push_str(&serde_json::to_string(&line).expect("record serializes"));
            s.push('\n');
        }
        s
    }

    pub fn from_jsonl(text: &str, path: &str) -> Result<RunRecord, RecordError> {
        let mut record: Option<RunRecord> = None;
        for (i, raw) in text.lines().enumerate() {
            if raw.trim().is_empty() {
                continue;
            }
            let fail = |message: String| RecordError::Format {
                path: path.to_string(),
                line: i + 1,
                message,
            };
            let line: RecordLine = serde_json::from_str(raw).map_err(|e| fail(e.to_string()))?;
            match (line, record.as_mut()) {
                (RecordLine::Header(h), None) => record = Some(RunRecord::new(h)),
                (RecordLine::Header(_), Some(_)) => return Err(fail("second header".into())),
                (_, None) => return Err(fail("log must start with a header".into())),
                (RecordLine::Phase(e), Some(r)) if r.outcome.is_none() => r.entries.push(e),
                (RecordLine::Outcome(o), Some(r)) if r.outcome.is_none() => r.outcome = Some(o),
                (_, Some(_)) => return Err(fail("entry after the outcome".into())),
            }
        }
        record.ok_or_else(|| RecordError::Format {
            path: path.to_string(),
            line: 0,
            message: "empty log".into(),
        })
    }

    pub fn load(path: &Path) -> Result<RunRecord, RecordError> {
        let io = |source| RecordError::Io {
            path: path.display().to_string(),
            source,
        };
        let file = File::open(path).map_err(io)?;
        let mut text = String::new();
        for line in BufReader::new(file).lines() {
            text.push_str(&line.map_err(io)?);
            text.push('\n');
        }
        RunRecord::from_jsonl(&text, &path.display().to_string())
    }

    /// Recompute every link and compare with the stored ones.
    pub fn verify_chain(&self) -> Result<(), RecordError> {
        let mut prev = genesis(&self.header);
        for e in &self.entries {
            let expected = link_phase(&prev, e);
            if expected != e.chain {
                return Err(RecordError::ChainMismatch {
                    seq: e.seq,
                    expected,
                    found: e.chain.clone(),
                });
            }
            prev = expected;
        }
        if let Some(o) = &self.outcome {
            let expected = link_outcome(&prev, o);
            if expected != o.chain {
                return Err(RecordError::ChainMismatch {
                    seq: o.seq,
                    expected,
                    found: o.chain.clone(),
                });
            }
        }
        Ok(())
    }

    /// Number of model calls made for the planning meeting.
    pub fn meeting_calls(&self) -> usize {
        self.entries
            .iter()
            .filter(|e| matches!(e.kind, EntryKind::Discussion | EntryKind::Summary))
            .map(|e| e.exchanges.len())
            .sum()
    }

    pub fn total_calls(&self) -> usize {
        self.entries.iter().map(|e| e.exchanges.len()).sum()
    }

    pub fn fallbacks(&self) -> usize {
        self.entries.iter().filter(|e| e.fallback).count()
    }
}

/// Streams record lines to a file as they are produced.
pub struct RecordWriter {
    out: BufWriter<File>,
    path: String,
}

impl RecordWriter {
    pub fn create(path: &Path) -> Result<RecordWriter, RecordError> {
        let io = |source| RecordError::Io {
            path: path.display().to_string(),
            source,
        };
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(io)?;
        }
        Ok(RecordWriter {
            out: BufWriter::new(File::create(path).map_err(io)?),
            path: path.display().to_string(),
        })
    }

    pub fn append(&mut self, line: &RecordLine) -> Result<(), RecordError> {
        let io = |source| RecordError::Io {
            path: self.path.clone(),
            source,
        };
        serde_json::to_writer(&mut self.out, line).map_err(|e| io(e.into()))?;
        self.out.write_all(b"\n").map_err(io)?;
        self.out.flush().map_err(io)
    }
}
