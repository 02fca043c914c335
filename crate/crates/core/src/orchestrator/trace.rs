//! Structural checks on a run log.

use thiserror::Error;

use super::record::{EntryKind, RunRecord};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TraceError {
    #[error("entry {seq}: sequence number out of order")]
    Sequence { seq: u64 },
    #[error("entry {seq}: round {round} follows round {previous}")]
    Round { seq: u64, round: u32, previous: u32 },
    #[error("entry {seq}: {kind:?} appears after a later step of the round")]
    Step { seq: u64, kind: EntryKind },
    #[error("entry {seq}: round {round} does not open with its start")]
    MissingStart { seq: u64, round: u32 },
    #[error("entry {seq}: round {round} began before the previous round ended")]
    Unclosed { seq: u64, round: u32 },
    #[error("entry {seq}: a meeting entry in a round without a meeting")]
    Meeting { seq: u64 },
}

/// Check that entries follow the round's step order and that rounds open
/// and close properly. A round may stop early only when the game ends.
pub fn validate_trace(record: &RunRecord) -> Result<(), TraceError> {
    let mut round = 0u32;
    let mut step = 0u8;
    let mut closed = true;
    let mut skipped_meeting = false;
    for (i, e) in record.entries.iter().enumerate() {
        if e.seq != i as u64 {
            return Err(TraceError::Sequence { seq: e.seq });
        }
        if e.round != round {
            if e.round < round || (round != 0 && e.round != round + 1) {
                return Err(TraceError::Round {
                    seq: e.seq,
                    round: e.round,
                    previous: round,
                });
            }
            if !closed {
                return Err(TraceError::Unclosed { seq: e.seq, round: e.round });
            }
            if e.kind != EntryKind::RoundStart {
                return Err(TraceError::MissingStart { seq: e.seq, round: e.round });
            }
            round = e.round;
            step = 0;
            closed = false;
            skipped_meeting = false;
            continue;
        }
        if e.kind == EntryKind::RoundStart || closed {
            return Err(TraceError::Unclosed { seq: e.seq, round: e.round });
        }
        let s = e.kind.step();
        if s < step {
            return Err(TraceError::Step { seq: e.seq, kind: e.kind });
        }
        match e.kind {
            EntryKind::MeetingSkipped => skipped_meeting = true,
            EntryKind::Discussion | EntryKind::Summary if skipped_meeting => {
                return Err(TraceError::Meeting { seq: e.seq })
            }
            EntryKind::RoundEnd => closed = true,
            _ => {}
        }
        step = s;
    }
    Ok(())
}
