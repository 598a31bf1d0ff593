use std::process::ExitCode;

fn main() -> ExitCode {
    ebfdr::cli::main_with_args(std::env::args_os())
}
