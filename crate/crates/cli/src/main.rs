mod args;
mod commands;
mod report;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use args::{Cli, Command, Common};
use report::{Failure, RunManifest, RunResult, Sink, TOOL_VERSION};

fn common(cmd: &Command) -> &Common {
    match cmd {
        Command::Capacity(a) => &a.common,
        Command::RegressionVolume(a) => &a.common,
        Command::LatticeVolume(a) => &a.common,
        Command::PerceptronVolume(a) => &a.common,
        Command::DoubleDescent(a) => &a.common,
        Command::MdlCurve(a) => &a.common,
    }
}

fn name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Capacity(_) => "capacity",
        Command::RegressionVolume(_) => "regression-volume",
        Command::LatticeVolume(_) => "lattice-volume",
        Command::PerceptronVolume(_) => "perceptron-volume",
        Command::DoubleDescent(_) => "double-descent",
        Command::MdlCurve(_) => "mdl-curve",
    }
}

fn run(cmd: Command) -> RunResult<()> {
    let start = Instant::now();
    let name = name(&cmd);
    let (sink, threads) = {
        let c = common(&cmd);
        (Sink::create(&c.out, c.quiet)?, c.threads)
    };
    if let Some(t) = threads {
        if t == 0 {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::Usage(format!("thread pool: {e}")))?;
    }
    let echo = match cmd {
        Command::Capacity(a) => commands::capacity(a, &sink),
        Command::RegressionVolume(a) => commands::regression_volume(a, &sink),
        Command::LatticeVolume(a) => commands::lattice_volume(a, &sink),
        Command::PerceptronVolume(a) => commands::perceptron_volume(a, &sink),
        Command::DoubleDescent(a) => commands::double_descent(a, &sink),
        Command::MdlCurve(a) => commands::mdl_curve(a, &sink),
    }?;
    sink.manifest(
        &name.replace('-', "_"),
        &RunManifest {
            command: name.into(),
            config_echo: echo.config,
            seed: echo.seed,
            tool_version: TOOL_VERSION.into(),
            wall_time_ms: start.elapsed().as_millis(),
        },
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
