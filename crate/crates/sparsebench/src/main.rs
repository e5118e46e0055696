use std::process::ExitCode;

fn main() -> ExitCode {
    sparsebench::cli::run()
}
