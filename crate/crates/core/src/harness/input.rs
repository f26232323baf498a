use std::io::{Read, Write};
use std::path::Path;

use super::{ChannelSet, HarnessError};
use crate::series::TimeSeries;

/// Largest tolerated gap between a timestamp and its place on the uniform
/// grid, s.
const TIME_TOLERANCE_S: f64 = 1e-6;

/// Reads a `time_s,<label>,...` file; see [`parse_csv`].
pub fn load_csv(path: impl AsRef<Path>) -> Result<ChannelSet, HarnessError> {
    let file = std::fs::File::open(path)?;
    parse_csv(file)
}

/// Parses the channel format: a `time_s,<label>,...` header, one row per
/// sample, `#` comment lines allowed.
///
/// The sampling interval is the median timestamp step; any row more than
/// 1e-6 s off the resulting grid is rejected.
pub fn parse_csv(reader: impl Read) -> Result<ChannelSet, HarnessError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .has_headers(false)
        .from_reader(reader);
    let mut records = rdr.records();
    let header = match records.next() {
        Some(r) => r?,
        None => return Err(HarnessError::EmptyFile),
    };
    let header_line = header.position().map_or(1, |p| p.line());
    if header.get(0) != Some("time_s") {
        return Err(HarnessError::ParseError {
            line: header_line,
            message: "first column must be `time_s`".into(),
        });
    }
    let labels: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    if labels.is_empty() {
        return Err(HarnessError::ParseError {
            line: header_line,
            message: "no data columns".into(),
        });
    }

    let mut times = Vec::new();
    let mut lines = Vec::new();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); labels.len()];
    for record in records {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != labels.len() + 1 {
            return Err(HarnessError::ParseError {
                line,
                message: format!("expected {} fields, found {}", labels.len() + 1, record.len()),
            });
        }
        let mut values = record.iter().map(|field| {
            field.parse::<f64>().map_err(|_| HarnessError::ParseError {
                line,
                message: format!("`{field}` is not a number"),
            })
        });
        times.push(values.next().expect("length checked")?);
        for (col, v) in columns.iter_mut().zip(values) {
            col.push(v?);
        }
        lines.push(line);
    }
    if times.is_empty() {
        return Err(HarnessError::EmptyFile);
    }
    if times.len() < 2 {
        return Err(HarnessError::Analysis(crate::Error::TooShort { len: 1 }));
    }

    let mut steps: Vec<f64> = times.windows(2).map(|w| w[1] - w[0]).collect();
    steps.sort_by(f64::total_cmp);
    let m = steps.len();
    let dt = if m % 2 == 1 {
        steps[m / 2]
    } else {
        0.5 * (steps[m / 2 - 1] + steps[m / 2])
    };
    let t0 = times[0];
    for (k, (&t, &line)) in times.iter().zip(&lines).enumerate() {
        if !((t - (t0 + k as f64 * dt)).abs() <= TIME_TOLERANCE_S) {
            return Err(HarnessError::NonUniformSampling { row: line });
        }
    }

    let series = labels
        .into_iter()
        .zip(columns)
        .map(|(label, samples)| TimeSeries::new(samples, dt, t0, label))
        .collect::<Result<Vec<_>, _>>()?;
    ChannelSet::new(series)
}

/// Writes channels in the format [`parse_csv`] reads.
pub fn write_channels_csv(channels: &[&TimeSeries], out: impl Write) -> Result<(), HarnessError> {
    let first = channels.first().ok_or(HarnessError::EmptyFile)?;
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["time_s".to_string()];
    header.extend(channels.iter().map(|s| s.label().to_string()));
    w.write_record(&header)?;
    for k in 0..first.len() {
        let mut row = vec![(first.t0() + first.local_time(k)).to_string()];
        row.extend(channels.iter().map(|s| s.samples()[k].to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_channel_text(n: usize) -> String {
        let mut s = String::from("# recorded at two units\ntime_s,unitA,unitB\n");
        for k in 0..n {
            let t = k as f64 * 0.1;
            s.push_str(&format!("{t},{},{}\n", 60.0 + (0.4 * t).sin() * 1e-3, 60.0 - 1e-3 * t));
        }
        s
    }

    #[test]
    fn two_channels_loaded() {
        let set = parse_csv(two_channel_text(600).as_bytes()).unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(set.labels().collect::<Vec<_>>(), ["unitA", "unitB"]);
        assert!((set.dt() - 0.1).abs() < 1e-12);
        assert_eq!(set.get("unitB").unwrap().len(), 600);
    }

    #[test]
    fn jumbled_timestamp_names_the_row() {
        let text = two_channel_text(50).replace("\n1.2000000000000002,", "\n1.7,");
        // header comment is line 1, header line 2, sample k on line k + 3
        assert_eq!(
            parse_csv(text.as_bytes()),
            Err(HarnessError::NonUniformSampling { row: 15 })
        );
    }

    #[test]
    fn header_only_is_empty() {
        assert_eq!(parse_csv("time_s,a\n".as_bytes()), Err(HarnessError::EmptyFile));
        assert_eq!(parse_csv("".as_bytes()), Err(HarnessError::EmptyFile));
        assert_eq!(parse_csv("# nothing\n".as_bytes()), Err(HarnessError::EmptyFile));
    }

    #[test]
    fn bad_fields_report_their_line() {
        let text = "time_s,a\n0,1\n0.1,x\n";
        assert!(matches!(
            parse_csv(text.as_bytes()),
            Err(HarnessError::ParseError { line: 3, .. })
        ));
        let text = "time_s,a\n0,1\n0.1,2,3\n";
        assert!(matches!(
            parse_csv(text.as_bytes()),
            Err(HarnessError::ParseError { line: 3, .. })
        ));
        assert!(matches!(
            parse_csv("t,a\n0,1\n".as_bytes()),
            Err(HarnessError::ParseError { line: 1, .. })
        ));
    }

    #[test]
    fn small_jitter_tolerated() {
        let text = "time_s,a\n0,1\n0.1000004,2\n0.2,3\n0.3,4\n0.4,5\n";
        let set = parse_csv(text.as_bytes()).unwrap();
        assert_eq!(set.get("a").unwrap().samples(), [1.0, 2.0, 3.0, 4.0, 5.0]);
    }

    #[test]
    fn write_then_read() {
        let set = parse_csv(two_channel_text(40).as_bytes()).unwrap();
        let chans: Vec<_> = set.iter().collect();
        let mut buf = Vec::new();
        write_channels_csv(&chans, &mut buf).unwrap();
        let back = parse_csv(buf.as_slice()).unwrap();
        for (a, b) in set.iter().zip(back.iter()) {
            assert_eq!(a.samples(), b.samples());
        }
    }
}
