use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gfdm_core::estimator::{coarse_grid, cost_curve, CfoCostModel, SubspaceDecomposition};
use gfdm_sim::config::CostKind;
use gfdm_sim::output::{real, write_summary, write_trials, SNR_NOTE};
use gfdm_sim::selftest::run_selftest;
use gfdm_sim::{Campaign, CampaignConfig, Result, SimError};
use gfdm_core::estimator::CfoCost;
use rayon::prelude::*;

#[derive(Parser)]
#[command(name = "gfdm-sim", version, about = "Monte-Carlo campaigns for the GFDM joint CFO/channel/IQ estimator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Flat TOML campaign file; defaults apply to missing keys.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Override one key, e.g. `--set trials=10 --set 'snr_db=[0, 10]'`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl ConfigArgs {
    fn load(&self) -> Result<CampaignConfig> {
        match &self.config {
            Some(path) => CampaignConfig::load(path, &self.set),
            None => CampaignConfig::from_toml_str("", &self.set),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a campaign and write per-trial and summary CSVs.
    Run {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, default_value = "trials.csv")]
        out: PathBuf,
        #[arg(long, default_value = "summary.csv")]
        summary: PathBuf,
    },
    /// Dump the CFO cost of every user over a grid for one trial's frame.
    CostCurve {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, default_value_t = 0)]
        snr_index: usize,
        #[arg(long, default_value_t = 0)]
        trial: usize,
        /// Grid spacing over [-0.5, 0.5].
        #[arg(long, default_value_t = 0.002)]
        step: f64,
        /// Output file; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// CRLB of the CFO only, per trial, for every SNR.
    Crlb {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in invariant checks.
    Selftest,
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Run { cfg, out, summary } => {
            let campaign = Campaign::new(cfg.load()?)?;
            let res = campaign.run();
            let mut w = BufWriter::new(File::create(&out)?);
            write_trials(&mut w, &res.records)?;
            w.flush()?;
            let mut w = BufWriter::new(File::create(&summary)?);
            write_summary(&mut w, &res.summary)?;
            w.flush()?;
            for row in &res.summary {
                eprintln!(
                    "snr {:>6} dB {:<7} mse_cfo {:>10} ber {:>10} outage {:.3} failed {}/{}",
                    row.snr_db,
                    row.mode.tag(),
                    row.mse_cfo.map_or("-".into(), |v| format!("{v:.3e}")),
                    row.ber.map_or("-".into(), |v| format!("{v:.3e}")),
                    row.outage,
                    row.failed,
                    row.trials
                );
            }
            res.check_failures()
        }
        Command::CostCurve { cfg, snr_index, trial, step, out } => {
            let config = cfg.load()?;
            if snr_index >= config.snr_db.len() {
                return Err(SimError::Config(format!("snr index {snr_index} out of range")));
            }
            if trial >= config.trials {
                return Err(SimError::Config(format!("trial {trial} out of range")));
            }
            let kind = match config.cost {
                CostKind::MinEig => CfoCost::SmallestEigenvalue,
                CostKind::LogDet => CfoCost::LogDeterminant,
            };
            let campaign = Campaign::new(config)?;
            let link = &campaign.prepared.link;
            let frame = campaign.frame(snr_index, trial)?;
            let sub = SubspaceDecomposition::new(&link.config, &link.plan, &frame.y, true)?;
            let grid = coarse_grid(step)?;
            let curves = (0..link.users())
                .map(|u| cost_curve(&CfoCostModel::new(link, u, &sub)?, &grid, kind))
                .collect::<gfdm_core::Result<Vec<_>>>()?;
            let mut w = sink(&out)?;
            let truth: Vec<String> = frame.truth.users.iter().map(|u| real(u.phi)).collect();
            writeln!(w, "# true cfo per user: {}", truth.join(" "))?;
            let users: Vec<String> = (0..link.users()).map(|u| format!("cost_user{u}")).collect();
            writeln!(w, "phi,{}", users.join(","))?;
            for (i, &phi) in grid.iter().enumerate() {
                let costs: Vec<String> = curves.iter().map(|c| real(c[i].1)).collect();
                writeln!(w, "{},{}", real(phi), costs.join(","))?;
            }
            w.flush()?;
            Ok(())
        }
        Command::Crlb { cfg, out } => {
            let campaign = Campaign::new(cfg.load()?)?;
            let c = &campaign.config;
            let jobs: Vec<(usize, usize)> = (0..c.snr_db.len()).flat_map(|s| (0..c.trials).map(move |t| (s, t))).collect();
            let rows: Vec<(usize, usize, Option<f64>)> = jobs
                .par_iter()
                .map(|&(s, t)| (s, t, campaign.frame(s, t).ok().and_then(|f| campaign.crlb(&f).ok().flatten())))
                .collect();
            let mut w = sink(&out)?;
            writeln!(w, "{SNR_NOTE}")?;
            writeln!(w, "snr_db,trial,seed,crlb_cfo")?;
            for &(s, t, v) in &rows {
                writeln!(w, "{},{},{},{}", real(c.snr_db[s]), t, campaign.seed(s, t), v.map(real).unwrap_or_default())?;
            }
            w.flush()?;
            for (s, snr) in c.snr_db.iter().enumerate() {
                let v: Vec<f64> = rows.iter().filter(|r| r.0 == s).filter_map(|r| r.2).collect();
                let mean = v.iter().sum::<f64>() / v.len().max(1) as f64;
                eprintln!("snr {snr:>6} dB  mean crlb_cfo {mean:.3e} over {} trials", v.len());
            }
            Ok(())
        }
        Command::Selftest => {
            let checks = run_selftest();
            let mut failed = 0;
            for c in &checks {
                println!("{} {:<32} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                failed += usize::from(!c.passed);
            }
            if failed > 0 {
                return Err(SimError::TooManyFailures { failed, total: checks.len() });
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gfdm-sim: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
