use std::process::ExitCode;

fn main() -> ExitCode {
    qrs_game::cli::main()
}
