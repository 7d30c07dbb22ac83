use std::process::ExitCode;

use clap::Parser;
use reqarg_gateway::cli::Args;
use reqarg_gateway::config::GatewayError;
use reqarg_gateway::export::write_artifacts;
use reqarg_gateway::run::run_pipeline;
use reqarg_gateway::server::{serve, AppState};

fn fail(e: &GatewayError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let config = match args.pipeline_config() {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    let run = match run_pipeline(&config) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    for w in &run.warnings {
        eprintln!("warning: {w}");
    }
    match write_artifacts(&args.out_dir, &run) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
        }
        Err(e) => return fail(&e),
    }

    if args.serve {
        let runtime = match tokio::runtime::Runtime::new() {
            Ok(r) => r,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::FAILURE;
            }
        };
        if let Err(e) = runtime.block_on(serve(AppState::from_run(&run), args.port)) {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }

    if run.blocked() {
        eprintln!("verification blocked: error-level structural violations");
    }
    ExitCode::from(run.exit_status())
}
