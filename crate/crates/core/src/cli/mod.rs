//! The `radconv` command line.
//!
//! Exit codes: `0` success, `1` a check failed (or a computation went
//! non-finite), `2` usage error. CSV goes to `--out` when given, else to
//! stdout; summaries go to stderr. Files are written atomically.

mod args;
pub mod bench;
mod commands;
mod config;
mod output;

use std::ffi::OsString;
use std::process::ExitCode;

use clap::Parser;

pub use args::{
    BenchArgs, Command, FootprintArgs, GradcheckArgs, OracleArgs, Position, RegionMode, RunConfig, Shape, TaxonomyArgs,
    TrainArgs,
};
pub use config::{config_flags, expand_config};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

impl From<bool> for Outcome {
    fn from(ok: bool) -> Self {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    match &cfg.command {
        Command::Gradcheck(a) => commands::gradcheck(a),
        Command::Oracle(a) => commands::oracle(a),
        Command::Footprint(a) => commands::footprint_cmd(a),
        Command::Taxonomy(a) => commands::taxonomy(a),
        Command::Bench(a) => commands::bench(a),
        Command::TrainToy(a) => commands::train(a),
    }
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NonFinite(_) => 1,
        _ => 2,
    }
}

/// Parses `args` (program name first), runs the command and maps the
/// result onto the exit-code contract.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args = match expand_config(args.into_iter().map(Into::into).collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(&cfg) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(v: &[&str]) -> std::result::Result<RunConfig, clap::Error> {
        RunConfig::try_parse_from(v)
    }

    #[test]
    fn later_flags_override_earlier_ones() {
        let cfg = parse(&["radconv", "gradcheck", "--shape", "1x4x4", "--seed", "1", "--seed", "9"]).unwrap();
        match cfg.command {
            Command::Gradcheck(a) => assert_eq!((a.seed, a.shape), (9, Shape(1, 4, 4))),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn shape_and_position_parsing() {
        assert_eq!("2x8x9".parse::<Shape>().unwrap(), Shape(2, 8, 9));
        for bad in ["2x8", "0x8x8", "axbxc", "1x2x3x4"] {
            assert!(bad.parse::<Shape>().is_err(), "{bad}");
        }
        assert_eq!("3, 4".parse::<Position>().unwrap(), Position(3, 4));
        assert!("3".parse::<Position>().is_err());
    }

    #[test]
    fn missing_shape_is_a_usage_error() {
        let e = parse(&["radconv", "gradcheck"]).unwrap_err();
        assert!(e.use_stderr());
        assert_eq!(e.kind(), clap::error::ErrorKind::MissingRequiredArgument);
    }

    #[test]
    fn error_classes_map_to_exit_codes() {
        assert_eq!(exit_code(&Error::NonFinite("x")), 1);
        assert_eq!(exit_code(&Error::Argument("x".into())), 2);
        assert_eq!(exit_code(&Error::Format("x".into())), 2);
    }
}
