use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Serialize)]
pub struct Envelope<'a, I, R> {
    pub schema_version: &'static str,
    pub command: &'a str,
    pub inputs: I,
    pub results: R,
}

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => {
            Box::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?)
        }
        None => Box::new(io::stdout().lock()),
    })
}

pub fn emit_json<I: Serialize, R: Serialize>(
    command: &str,
    inputs: I,
    results: R,
    out: Option<&Path>,
) -> Result<()> {
    let env = Envelope {
        schema_version: SCHEMA_VERSION,
        command,
        inputs,
        results,
    };
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, &env)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// 17 significant digits, enough to re-parse every `f64` exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn cell(v: &Value) -> Result<String> {
    Ok(match v {
        Value::Number(n) if n.is_f64() => fmt_f64(n.as_f64().unwrap_or(f64::NAN)),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        // serde_json maps non-finite floats to null
        Value::Null => "NaN".into(),
        other => bail!("cannot write nested value {other} as a CSV cell"),
    })
}

/// Writes flat serializable rows as CSV, header taken from the field names.
pub fn write_csv<T: Serialize>(rows: &[T], w: impl Write) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    for (i, row) in rows.iter().enumerate() {
        let Value::Object(map) = serde_json::to_value(row)? else {
            bail!("CSV rows must be structs");
        };
        if i == 0 {
            csv.write_record(map.keys())?;
        }
        let cells = map.values().map(cell).collect::<Result<Vec<_>>>()?;
        csv.write_record(&cells)?;
    }
    csv.flush()?;
    Ok(())
}

pub fn emit_csv<T: Serialize>(rows: &[T], out: Option<&Path>) -> Result<()> {
    write_csv(rows, sink(out)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        name: &'static str,
        n: u64,
        x: f64,
    }

    #[test]
    fn floats_reparse_exactly() {
        for x in [0.1, 1.0 / 3.0, 2.63e-7, f64::MIN_POSITIVE, 1e300] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn csv_header_follows_field_order() {
        let mut buf = Vec::new();
        write_csv(
            &[Row {
                name: "a",
                n: 3,
                x: 0.5,
            }],
            &mut buf,
        )
        .unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "name,n,x\na,3,5.0000000000000000e-1\n"
        );
    }
}
