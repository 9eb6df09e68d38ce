use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(qlab::experiment::main_with_args(std::env::args_os()))
}
