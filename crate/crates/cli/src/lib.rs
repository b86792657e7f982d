//! Command-line front end for the `isoskel` library.

pub mod commands;
pub mod config;
pub mod input;

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use isoskel::minset::SCHEMA_VERSION;
use isoskel::{Error, Result};

use config::{RunConfig, Settings};
use input::InstanceFile;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_PRECISION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "isoskel", version, about = "Isocrystals, norms and Min-sets over unramified p-adic fields")]
struct Cli {
    /// TOML file with the same keys as the flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    prime: Option<u64>,
    /// Degree m of the unramified field Q_{p^m}.
    #[arg(long, global = true)]
    degree: Option<usize>,
    /// Absolute precision N.
    #[arg(long, global = true)]
    precision: Option<u32>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    denominator_cap: Option<i64>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true)]
    radius: Option<u32>,
    #[arg(long, global = true)]
    suite: Option<String>,
    /// Instance file; `-` reads standard input.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Newton slopes of b.
    Slopes,
    /// Slope decomposition of the isocrystal.
    Decompose,
    /// Whether (b sigma)^s = p^{s nu} holds.
    Decent {
        #[arg(long)]
        s: Option<usize>,
    },
    /// Whether the input norm lies in Min.
    MinCheck,
    /// A Min point with the given per-block offsets.
    MinPoint {
        /// Comma-separated rationals, one per simple block.
        #[arg(long)]
        offsets: Option<String>,
    },
    /// Sampled displacement bound report.
    Scan,
    /// Crystals near the standard lattice and J-witnesses between minimal ones.
    Crystals,
    /// Run a verification suite.
    Verify,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Slopes => "slopes",
            Command::Decompose => "decompose",
            Command::Decent { .. } => "decent",
            Command::MinCheck => "min-check",
            Command::MinPoint { .. } => "min-point",
            Command::Scan => "scan",
            Command::Crystals => "crystals",
            Command::Verify => "verify",
        }
    }
}

impl Cli {
    fn flag_settings(&self) -> Settings {
        Settings {
            prime: self.prime,
            degree: self.degree,
            precision: self.precision,
            seed: self.seed,
            denominator_cap: self.denominator_cap,
            samples: self.samples,
            radius: self.radius,
            suite: self.suite.clone(),
            input: self.input.clone(),
            output: self.output.clone(),
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::PrecisionExhausted(_) => EXIT_PRECISION,
        _ => EXIT_INPUT,
    }
}

fn error_json(kind: &str, message: &str) -> String {
    json!({ "schema_version": SCHEMA_VERSION, "error": { "kind": kind, "message": message } }).to_string()
}

fn read_input(path: &std::path::Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Error::Parse(format!("standard input: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

fn execute(cli: &Cli) -> Result<(Value, bool, Option<PathBuf>)> {
    let file_layer = match &cli.config {
        Some(path) => Settings::from_toml_file(path)?,
        None => Settings::default(),
    };
    let flags = cli.flag_settings();
    let input_path = flags
        .input
        .clone()
        .or_else(|| file_layer.input.clone())
        .ok_or_else(|| Error::InvalidParams("--input is required".into()))?;
    let instance_file = InstanceFile::parse(&read_input(&input_path)?)?;
    let settings = file_layer.overlay(instance_file.settings()).overlay(flags);
    let cfg = RunConfig::from_settings(&settings)?;
    let inst = input::resolve(&instance_file, cfg.prime, cfg.degree, cfg.precision)?;
    let outcome = match &cli.command {
        Command::Slopes => commands::slopes(&inst)?,
        Command::Decompose => commands::decompose(&inst)?,
        Command::Decent { s } => commands::decent(&inst, *s)?,
        Command::MinCheck => commands::min_check(&inst, &cfg)?,
        Command::MinPoint { offsets } => commands::min_point(&inst, &cfg, offsets.as_deref())?,
        Command::Scan => commands::scan(&inst, &cfg)?,
        Command::Crystals => commands::crystals(&inst, &cfg)?,
        Command::Verify => commands::verify(&inst, &cfg)?,
    };
    let mut payload = serde_json::Map::new();
    payload.insert("schema_version".into(), json!(SCHEMA_VERSION));
    payload.insert("command".into(), json!(cli.command.name()));
    payload.insert("config".into(), serde_json::to_value(&cfg).unwrap_or(Value::Null));
    payload.insert("field".into(), inst.isocrystal.context().header());
    for (k, v) in outcome.fields {
        payload.entry(k).or_insert(v);
    }
    let output = cfg.output.as_ref().map(PathBuf::from);
    Ok((Value::Object(payload), outcome.pass, output))
}

/// Runs the command line `argv` (program name first) and returns the exit
/// code. Reports go to `out` or the output file, errors to `err` as JSON.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
        Err(e) => {
            let _ = writeln!(err, "{}", error_json("Usage", e.to_string().trim()));
            return EXIT_INPUT;
        }
    };
    match execute(&cli) {
        Ok((payload, pass, output)) => {
            let text = serde_json::to_string_pretty(&payload).unwrap_or_default() + "\n";
            let written = match output {
                Some(path) => std::fs::write(&path, text.as_bytes()),
                None => out.write_all(text.as_bytes()),
            };
            if let Err(e) = written {
                let _ = writeln!(err, "{}", error_json("Io", &e.to_string()));
                return EXIT_INPUT;
            }
            if pass {
                EXIT_OK
            } else {
                EXIT_FAIL
            }
        }
        Err(e) => {
            let _ = writeln!(err, "{}", error_json(e.kind(), &e.to_string()));
            exit_code(&e)
        }
    }
}

pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
