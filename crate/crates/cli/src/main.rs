use std::process::ExitCode;

fn main() -> ExitCode {
    modecluster_cli::run(std::env::args_os())
}
