use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use nlwe_core::certify::classify_hidden_nonlocality;
use nlwe_core::io::{read_state_set, write_state_set};
use nlwe_core::measurement::joint_outcomes;
use nlwe_core::report::{self, classification_text, envelope, report_text, run_check, verdict_name, UNKNOWN_BANNER};
use nlwe_core::{Error, Family, JointMeasurement, ProtocolTree, Result};

/// Construct and certify product-state sets with hidden nonlocality.
#[derive(Parser)]
#[command(name = "nlwe", version)]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a family (`yu:d`, `type1:d`, `strong11`, `type2-78`, `multi:d1,d2,…`) and write it to a file.
    Construct {
        family: String,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Run one check: orthogonality, irredundancy, irreducibility, indistinguishability, oplm-dim.
    Certify {
        check: String,
        file: PathBuf,
        #[arg(long)]
        party: Option<String>,
        /// Comma-separated witness labels.
        #[arg(long, value_delimiter = ',')]
        witness: Option<Vec<String>>,
    },
    /// Apply a measurement literal (`B:0-4;5-10`) and keep one outcome (1-based id, `1.2` for joint).
    Measure {
        file: PathBuf,
        measurement: String,
        outcome: String,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Full hidden-nonlocality pipeline on a file.
    Classify {
        file: PathBuf,
        /// Activating measurement; defaults to the file's family metadata.
        #[arg(long)]
        measure: Option<String>,
        /// Protocol JSON file; defaults to the builtin tree of the file's family.
        #[arg(long)]
        protocol: Option<PathBuf>,
        /// Comma-separated witness labels for one outcome; repeat once per outcome in order.
        #[arg(long)]
        witness: Vec<String>,
    },
    /// Re-run one of the shipped pipelines: example1..example4, multiparty.
    Reproduce { example: String },
    /// Draw the coordinate grid of a bipartite set.
    Render {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Svg,
    Text,
}

/// `Some(true)` → 0, `Some(false)` / `None` → 1.
fn verdict_code(passed: Option<bool>) -> ExitCode {
    if passed == Some(true) { ExitCode::SUCCESS } else { ExitCode::from(1) }
}

fn print_json(v: &serde_json::Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn family_of(file_family: Option<String>) -> Result<Option<Family>> {
    file_family.map(|f| f.parse()).transpose()
}

fn construct(json: bool, family: &str, output: &Path) -> Result<ExitCode> {
    let f: Family = family.parse()?;
    let set = f.construct()?;
    write_state_set(output, &set, Some(f.to_string()))?;
    if json {
        print_json(&envelope("construct", Some(true), json!({"family": f.to_string(), "states": set.len(), "path": output})))?;
    } else {
        println!("wrote {} states of {} to {}", set.len(), f, output.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn certify(json: bool, check: &str, file: &Path, party: Option<&str>, witness: Option<&[String]>) -> Result<ExitCode> {
    let (set, _) = read_state_set(file)?;
    let r = run_check(check, &set, party, witness)?;
    if json {
        print_json(&envelope(check, r.passed, r.details.clone()))?;
    } else {
        print!("{check}: {}\n{}", match r.passed {
            Some(true) => "pass",
            Some(false) => "fail",
            None => "unknown",
        }, r.text);
        if r.passed.is_none() {
            println!("{UNKNOWN_BANNER}");
        }
    }
    Ok(verdict_code(r.passed))
}

fn measure(json: bool, file: &Path, literal: &str, outcome: &str, output: &Path) -> Result<ExitCode> {
    let (set, _) = read_state_set(file)?;
    let m: JointMeasurement = literal.parse()?;
    let outcomes = joint_outcomes(&set, &m)?;
    let o = outcomes
        .iter()
        .find(|o| o.outcome_id == outcome)
        .ok_or_else(|| Error::MalformedMeasurement(format!("no outcome `{outcome}` (have {})", m.outcome_ids().join(", "))))?;
    write_state_set(output, &o.states, None)?;
    if json {
        print_json(&envelope(
            "measure",
            Some(true),
            json!({"outcome": outcome, "states": o.cardinality(), "dropped": o.dropped, "path": output}),
        ))?;
    } else {
        println!("outcome {outcome}: {} states ({} dropped) written to {}", o.cardinality(), o.dropped.len(), output.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn classify(
    json: bool,
    file: &Path,
    measure: Option<&str>,
    protocol: Option<&Path>,
    witness: &[String],
) -> Result<ExitCode> {
    let (set, file_family) = read_state_set(file)?;
    let family = family_of(file_family)?;
    let m = match (measure, &family) {
        (Some(lit), _) => lit.parse()?,
        (None, Some(f)) => f.activating_measurement().ok_or_else(|| Error::UnsupportedFamily(f.to_string()))?,
        (None, None) => return Err(Error::Precondition("no --measure given and the file names no family".into())),
    };
    let (tree, protocol_id) = match (protocol, &family) {
        (Some(p), _) => (ProtocolTree::from_json_str(&std::fs::read_to_string(p)?)?, p.display().to_string()),
        (None, Some(f)) => (f.builtin_protocol()?, format!("builtin:{f}")),
        (None, None) => return Err(Error::Precondition("no --protocol given and the file names no family".into())),
    };
    let witnesses: Vec<Option<Vec<String>>> = if witness.is_empty() {
        family.as_ref().and_then(|f| f.outcome_witnesses()).unwrap_or_default()
    } else {
        witness
            .iter()
            .map(|grp| {
                let labels: Vec<String> = grp.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
                (!labels.is_empty()).then_some(labels)
            })
            .collect()
    };
    let c = classify_hidden_nonlocality(&set, &m, &tree, &protocol_id, &witnesses);
    let established = c.verdict.is_established();
    if json {
        print_json(&envelope("classify", Some(established), serde_json::to_value(&c)?))?;
    } else {
        print!("{}", classification_text(&c));
        if !established {
            println!("{UNKNOWN_BANNER}");
        }
    }
    Ok(verdict_code(Some(established)))
}

fn reproduce(json: bool, example: &str) -> Result<ExitCode> {
    let r = report::reproduce(example)?;
    if json {
        print_json(&envelope("reproduce", Some(r.matches_claim), serde_json::to_value(&r)?))?;
    } else {
        print!("{}", report_text(&r));
        if !r.classification.verdict.is_established() {
            println!("{UNKNOWN_BANNER}");
        }
        println!("result: {} (claimed {})", verdict_name(&r.classification.verdict), r.claimed);
    }
    Ok(verdict_code(Some(r.matches_claim)))
}

fn render(file: &Path, output: Option<&Path>, format: Format) -> Result<ExitCode> {
    let (set, _) = read_state_set(file)?;
    let out = match format {
        Format::Svg => report::render_svg(&set)?,
        Format::Text => report::render_text(&set)?,
    };
    match output {
        Some(p) => std::fs::write(p, out)?,
        None => print!("{out}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    let json = cli.json;
    match cli.cmd {
        Cmd::Construct { family, output } => construct(json, &family, &output),
        Cmd::Certify { check, file, party, witness } => certify(json, &check, &file, party.as_deref(), witness.as_deref()),
        Cmd::Measure { file, measurement, outcome, output } => measure(json, &file, &measurement, &outcome, &output),
        Cmd::Classify { file, measure, protocol, witness } => {
            classify(json, &file, measure.as_deref(), protocol.as_deref(), &witness)
        }
        Cmd::Reproduce { example } => reproduce(json, &example),
        Cmd::Render { file, output, format } => render(&file, output.as_deref(), format),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
