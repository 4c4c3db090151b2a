use std::io::{self, Write};

use super::log::EventLog;
use super::snapshot::Snapshot;

pub const EVENT_LOG_HEADER: &str = "id,parent,depth,tau,recovery_duration";
pub const SNAPSHOT_HEADER: &str = "t,occupied,red,boundary,H,M";

/// Writes the log as CSV; reals use Rust's shortest round-trip formatting.
pub fn write_event_log_csv<W: Write>(log: &EventLog, out: &mut W) -> io::Result<()> {
    writeln!(out, "{EVENT_LOG_HEADER}")?;
    for v in log.vertices() {
        let parent = v.record.parent.map_or(-1, i64::from);
        writeln!(
            out,
            "{},{},{},{},{}",
            v.record.id, parent, v.record.depth, v.tau, v.recovery_duration
        )?;
    }
    Ok(())
}

pub fn write_snapshots_csv<W: Write>(snapshots: &[Snapshot], out: &mut W) -> io::Result<()> {
    writeln!(out, "{SNAPSHOT_HEADER}")?;
    for s in snapshots {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            s.t,
            s.occupied,
            s.red_count(),
            s.boundary_size,
            s.h,
            s.m_cluster
        )?;
    }
    Ok(())
}
