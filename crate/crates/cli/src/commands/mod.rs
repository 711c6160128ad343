mod axb;
mod finite;
mod free;
mod heisenberg;
mod nclp;
mod spherical;

use ncharm::report::Report;
use serde_json::{json, Value};

use crate::config::{Ctx, Key};
use crate::CliError;

pub enum Status {
    Ok,
    ToleranceFailure(String),
}

/// Collects gate failures; the run fails if any gate failed.
#[derive(Default)]
pub struct Gates(Vec<String>);

impl Gates {
    pub fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.0.push(msg());
        }
    }

    pub fn status(self) -> Status {
        if self.0.is_empty() {
            Status::Ok
        } else {
            Status::ToleranceFailure(self.0.join("; "))
        }
    }
}

pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: Value,
}

impl serde::Serialize for Check {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        json!({ "name": self.name, "passed": self.passed, "detail": self.detail }).serialize(s)
    }
}

pub fn check(name: &str, passed: bool, detail: impl serde::Serialize) -> Check {
    Check { name: name.to_string(), passed, detail: serde_json::to_value(detail).unwrap_or(Value::Null) }
}

pub type Run = fn(&Ctx, &mut Report) -> Result<Status, CliError>;
pub type SelfTest = fn() -> Result<Vec<Check>, CliError>;

pub struct Command {
    pub group: &'static str,
    pub name: &'static str,
    pub about: &'static str,
    pub keys: &'static [Key],
    pub run: Run,
    pub selftest: SelfTest,
}

/// Relative difference, 0 when both sides vanish.
pub fn rel(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    if d == 0.0 {
        0.0
    } else {
        d / a.abs().max(b.abs())
    }
}

pub static COMMANDS: &[Command] = &[
    heisenberg::PLANCHEREL,
    heisenberg::INVERT,
    heisenberg::WEYL,
    heisenberg::ORBIT,
    axb::PLANCHEREL,
    axb::FOURIER,
    free::WEAKNORM,
    free::DISTRIBUTION,
    free::MULTIPLIER,
    free::HMLIFT,
    finite::PLANCHEREL,
    finite::HY,
    finite::ZHANG,
    finite::MULTNORM,
    spherical::PHI,
    spherical::TRANSFORM,
    spherical::ASYMPTOTICS,
    spherical::SYMBOLCHECK,
    nclp::NORMS,
    nclp::SINGULAR,
];
