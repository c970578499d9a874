//! Trajectory and event-log export for replay and plotting.

use std::io::{self, Write};

use crate::sim::{Event, Trace};

/// Per-step CSV: `time,agent,team,x,y,z,alive`, one row per trace sample.
pub fn write_trajectory_csv<W: Write>(mut out: W, trace: &Trace) -> io::Result<()> {
    writeln!(out, "time,agent,team,x,y,z,alive")?;
    for row in &trace.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            row.t, row.agent, row.team, row.x, row.y, row.z, row.alive
        )?;
    }
    Ok(())
}

/// One JSON object per event, in log order.
pub fn write_events_jsonl<W: Write>(mut out: W, events: &[Event]) -> io::Result<()> {
    for event in events {
        serde_json::to_writer(&mut out, event)?;
        writeln!(out)?;
    }
    Ok(())
}
