use std::process::ExitCode;

fn main() -> ExitCode {
    bart::cli::main()
}
