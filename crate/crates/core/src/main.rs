use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(bianchi_calo::cli::main_with_args(std::env::args_os()))
}
