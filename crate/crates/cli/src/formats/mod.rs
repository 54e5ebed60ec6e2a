//! Plain-text input/output formats. Everything is CSV, GeoJSON, or an ASCII
//! grid so fixtures diff cleanly.

pub mod basin;
pub mod classification;
pub mod dem;
pub mod geojsonio;
pub mod grids;
pub mod storm;
pub mod tables;

/// Canonical float formatting for deterministic outputs: shortest
/// round-trippable representation.
pub fn fmt_f64(v: f64) -> String {
    let mut buf = ryu_like(v);
    if !buf.contains('.') && !buf.contains('e') && !buf.contains("inf") && !buf.contains("NaN") {
        buf.push_str(".0");
    }
    buf
}

fn ryu_like(v: f64) -> String {
    // `{}` on f64 is already the shortest representation that round-trips.
    format!("{v}")
}
