//! Output: TSV by default, JSON with a schema version on request.

use std::io::{self, Write};

use serde_json::{json, Map, Value};

use crate::compute::{Stats, Values};

pub const SCHEMA: u32 = 1;

#[derive(Copy, Clone, Debug, Default)]
pub struct Style {
    pub json: bool,
    pub stats: bool,
}

fn stats_object(stats: &Stats) -> Value {
    let mut m = Map::new();
    for (k, v) in stats {
        m.insert((*k).to_string(), v.clone());
    }
    Value::Object(m)
}

/// Stats go after the data as `# key<TAB>value` lines so that scripts can
/// drop them with a comment filter.
fn write_stats_tsv(out: &mut impl Write, stats: &Stats) -> io::Result<()> {
    for (k, v) in stats {
        let shown = match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        writeln!(out, "# {k}\t{shown}")?;
    }
    Ok(())
}

pub fn write_json(out: &mut impl Write, mut body: Map<String, Value>, stats: Option<&Stats>) -> io::Result<()> {
    body.insert("schema".into(), json!(SCHEMA));
    if let Some(s) = stats {
        body.insert("stats".into(), stats_object(s));
    }
    serde_json::to_writer(&mut *out, &Value::Object(body))?;
    writeln!(out)
}

pub fn node_values(
    out: &mut impl Write,
    style: Style,
    command: &str,
    labels: &[String],
    values: &Values,
    stats: &Stats,
) -> io::Result<()> {
    if style.json {
        let rows: Vec<Value> = labels
            .iter()
            .zip(values.to_json())
            .map(|(l, v)| json!({ "node": l, "value": v }))
            .collect();
        let mut body = Map::new();
        body.insert("command".into(), json!(command));
        body.insert("values".into(), Value::Array(rows));
        return write_json(out, body, style.stats.then_some(stats));
    }
    for (l, v) in labels.iter().zip(values.render()) {
        writeln!(out, "{l}\t{v}")?;
    }
    if style.stats {
        write_stats_tsv(out, stats)?;
    }
    Ok(())
}

/// A single scalar answer, such as a minimum cycle weight or a decision.
pub fn scalar(out: &mut impl Write, style: Style, command: &str, key: &str, value: Value, stats: &Stats) -> io::Result<()> {
    if style.json {
        let mut body = Map::new();
        body.insert("command".into(), json!(command));
        body.insert(key.into(), value);
        return write_json(out, body, style.stats.then_some(stats));
    }
    match value {
        Value::String(s) => writeln!(out, "{s}")?,
        Value::Bool(b) => writeln!(out, "{}", if b { "yes" } else { "no" })?,
        other => writeln!(out, "{other}")?,
    }
    if style.stats {
        write_stats_tsv(out, stats)?;
    }
    Ok(())
}

pub fn stats_only(out: &mut impl Write, stats: &Stats) -> io::Result<()> {
    write_stats_tsv(out, stats)
}
