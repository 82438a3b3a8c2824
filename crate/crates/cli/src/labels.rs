//! Labeled value pairs: `value_a,value_b,label` with label `variant` or
//! `conflict`.

use std::io::{Read, Write};

use anyhow::{bail, Context, Result};
use consol_core::consolidate::{LabeledPair, PairLabel};

pub fn read_labels<R: Read>(input: R, delimiter: u8) -> Result<Vec<LabeledPair>> {
    let mut reader = csv::ReaderBuilder::new().delimiter(delimiter).from_reader(input);
    let header: Vec<String> = reader.headers()?.iter().map(|h| h.trim().to_string()).collect();
    if header != ["value_a", "value_b", "label"] {
        bail!("labels header must be value_a,value_b,label, found {}", header.join(","));
    }
    let mut out = Vec::new();
    for (n, record) in reader.records().enumerate() {
        let line = n + 2;
        let record = record.with_context(|| format!("labels line {line}"))?;
        let label = match record[2].trim() {
            "variant" => PairLabel::Variant,
            "conflict" => PairLabel::Conflict,
            other => bail!("labels line {line}: unknown label {other:?}"),
        };
        if record[0] == record[1] {
            bail!("labels line {line}: both values are {:?}", &record[0]);
        }
        out.push(LabeledPair {
            value_a: record[0].to_string(),
            value_b: record[1].to_string(),
            label,
        });
    }
    Ok(out)
}

pub fn write_labels<W: Write>(pairs: &[LabeledPair], delimiter: u8, out: W) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().delimiter(delimiter).from_writer(out);
    writer.write_record(["value_a", "value_b", "label"])?;
    for p in pairs {
        let label = match p.label {
            PairLabel::Variant => "variant",
            PairLabel::Conflict => "conflict",
        };
        writer.write_record([p.value_a.as_str(), p.value_b.as_str(), label])?;
    }
    writer.flush()?;
    Ok(())
}
