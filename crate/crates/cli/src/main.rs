mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Arg, ArgAction, ArgMatches};
use ncharm::report::Report;

use commands::{Command, Status, COMMANDS};
use config::{flag_name, Ctx, COMMON};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(ncharm::Error),
}

impl From<ncharm::Error> for CliError {
    fn from(e: ncharm::Error) -> Self {
        CliError::Core(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

const EXIT_CONFIG: u8 = 1;
const EXIT_TOLERANCE: u8 = 2;
const EXIT_REFUSED: u8 = 3;

fn cli() -> clap::Command {
    let mut root = clap::Command::new("ncharm")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Numerical checks of noncommutative harmonic analysis")
        .subcommand_required(true);
    let mut groups: Vec<&str> = COMMANDS.iter().map(|c| c.group).collect();
    groups.dedup();
    for g in groups {
        let mut group = clap::Command::new(g).about(group_about(g)).subcommand_required(true);
        for c in COMMANDS.iter().filter(|c| c.group == g) {
            group = group.subcommand(subcommand(c));
        }
        root = root.subcommand(group);
    }
    root
}

fn group_about(group: &str) -> &'static str {
    match group {
        "heisenberg" => "Fourier analysis on the Heisenberg group",
        "axb" => "the ax+b group and its two infinite-dimensional representations",
        "free" => "heat multipliers and weak norms on free groups",
        "finite" => "Fourier analysis and multipliers on finite groups",
        "spherical" => "spherical functions on SL(2,R)",
        "nclp" => "noncommutative Lp and weak Lp norms",
        _ => "",
    }
}

fn subcommand(c: &Command) -> clap::Command {
    let mut sub = clap::Command::new(c.name)
        .about(c.about)
        .arg(Arg::new("config").long("config").value_name("FILE").help("key = value file; flags override it"))
        .arg(Arg::new("selftest").long("selftest").action(ArgAction::SetTrue).help("run the built-in examples"))
        .arg(Arg::new("no-timing").long("no-timing").action(ArgAction::SetTrue).help("same as timing=off"));
    for k in c.keys.iter().chain(COMMON) {
        let help = if k.default.is_empty() { k.help.to_string() } else { format!("{} [default: {}]", k.help, k.default) };
        sub = sub.arg(
            Arg::new(k.name)
                .long(flag_name(k.name))
                .value_name("VALUE")
                .allow_hyphen_values(true)
                .help(help),
        );
    }
    sub
}

fn flag_values(c: &Command, m: &ArgMatches) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = c
        .keys
        .iter()
        .chain(COMMON)
        .filter_map(|k| m.get_one::<String>(k.name).map(|v| (k.name.to_string(), v.clone())))
        .collect();
    if m.get_flag("no-timing") {
        out.push(("timing".into(), "off".into()));
    }
    out
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("NCHARM_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("NCHARM_THREADS must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot size the thread pool: {e}")))
}

fn emit(ctx: &Ctx, report: &Report) -> Result<(), CliError> {
    let text = report.to_json()?;
    match ctx.out() {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Config(format!("cannot write {path}: {e}"))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(c: &Command, m: &ArgMatches) -> Result<u8, CliError> {
    configure_threads()?;
    let file = m.get_one::<String>("config").map(PathBuf::from);
    let ctx = Ctx::resolve(c.keys, file.as_deref(), &flag_values(c, m))?;
    let start = Instant::now();
    let mut command = vec![c.group.to_string(), c.name.to_string()];
    if m.get_flag("selftest") {
        command.push("--selftest".into());
        let mut report = Report::new(command, ctx.values().clone());
        let checks = (c.selftest)()?;
        let failed: Vec<String> = checks.iter().filter(|k| !k.passed).map(|k| format!("selftest failed: {}", k.name)).collect();
        report.add("checks", &checks, "built-in examples")?;
        let code = if failed.is_empty() { 0 } else { EXIT_TOLERANCE };
        report.status = if failed.is_empty() { "ok".into() } else { "tolerance_failure".into() };
        report.diagnostics = failed;
        if ctx.timing() {
            report.runtime_ms = Some(start.elapsed().as_millis() as u64);
        }
        emit(&ctx, &report)?;
        return Ok(code);
    }
    let mut report = Report::new(command, ctx.values().clone());
    let code = match (c.run)(&ctx, &mut report) {
        Ok(Status::Ok) => 0,
        Ok(Status::ToleranceFailure(msg)) => {
            report.status = "tolerance_failure".into();
            report.diagnostics.push(msg);
            EXIT_TOLERANCE
        }
        Err(CliError::Core(e)) if e.is_refusal() => {
            report.status = "refused".into();
            report.diagnostics.push(e.to_string());
            EXIT_REFUSED
        }
        Err(e) => return Err(e),
    };
    if ctx.timing() {
        report.runtime_ms = Some(start.elapsed().as_millis() as u64);
    }
    emit(&ctx, &report)?;
    Ok(code)
}

fn main() -> ExitCode {
    let matches = match cli().try_get_matches_from(std::env::args_os()) {
        Ok(m) => m,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_CONFIG,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (group, gm) = matches.subcommand().expect("subcommand is required");
    let (name, m) = gm.subcommand().expect("subcommand is required");
    let c = COMMANDS.iter().find(|c| c.group == group && c.name == name).expect("registered command");
    match execute(c, m) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("ncharm: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
