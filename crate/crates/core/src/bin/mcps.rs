use std::process::ExitCode;

fn main() -> ExitCode {
    mcps::cli::main()
}
