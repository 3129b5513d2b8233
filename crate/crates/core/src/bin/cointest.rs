use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(cointest::cli::main_entry() as u8)
}
