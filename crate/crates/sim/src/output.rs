//! CSV rendering. Reals use `{:.16e}`, which round-trips every `f64`.

use std::io::{self, Write};

use crate::campaign::{SummaryRow, TrialRecord};

pub const TRIAL_HEADER: &str = "snr_db,trial,mode,mse_cfo,mse_channel_iq,ber,outage_flag,crlb_cfo,seed,wall_ms";
pub const SUMMARY_HEADER: &str = "snr_db,mode,trials,failed,mse_cfo,mse_channel_iq,ber,outage_probability,crlb_cfo";
pub const SNR_NOTE: &str = "# snr_db = 10 log10(mean noise-free received power per complex sample / noise variance per complex sample); inf = noise-free; empty metric = failed trial";

pub fn real(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(real).unwrap_or_default()
}

pub fn write_trials<W: Write>(mut w: W, records: &[TrialRecord]) -> io::Result<()> {
    writeln!(w, "{SNR_NOTE}")?;
    writeln!(w, "{TRIAL_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            real(r.snr_db),
            r.trial,
            r.mode.tag(),
            opt(r.mse_cfo),
            opt(r.mse_channel_iq),
            opt(r.ber),
            u8::from(r.outage),
            opt(r.crlb_cfo),
            r.seed,
            real(r.wall_ms)
        )?;
    }
    Ok(())
}

pub fn write_summary<W: Write>(mut w: W, rows: &[SummaryRow]) -> io::Result<()> {
    writeln!(w, "{SNR_NOTE}")?;
    writeln!(w, "{SUMMARY_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            real(r.snr_db),
            r.mode.tag(),
            r.trials,
            r.failed,
            opt(r.mse_cfo),
            opt(r.mse_channel_iq),
            opt(r.ber),
            real(r.outage),
            opt(r.crlb_cfo)
        )?;
    }
    Ok(())
}

pub fn trials_csv(records: &[TrialRecord]) -> String {
    let mut buf = Vec::new();
    write_trials(&mut buf, records).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut buf = Vec::new();
    write_summary(&mut buf, rows).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Mode;

    #[test]
    fn row_format() {
        let r = TrialRecord {
            snr_db: 10.0,
            trial: 3,
            mode: Mode::Genie,
            mse_cfo: Some(0.0),
            mse_channel_iq: Some(0.1),
            ber: None,
            outage: true,
            crlb_cfo: None,
            seed: 42,
            wall_ms: 0.0,
            error: Some("x".into()),
        };
        let csv = trials_csv(&[r]);
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with('#'));
        assert_eq!(lines[1], TRIAL_HEADER);
        assert_eq!(
            lines[2],
            "1.0000000000000000e1,3,genie,0.0000000000000000e0,1.0000000000000001e-1,,1,,42,0.0000000000000000e0"
        );
        let v: f64 = lines[2].split(',').nth(4).unwrap().parse().unwrap();
        assert_eq!(v, 0.1);
    }
}
