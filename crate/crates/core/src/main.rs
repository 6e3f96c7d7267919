use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let run = young_cosets::cli::run(std::env::args_os());
    let written = if run.stderr {
        std::io::stderr()
            .write_all(run.text.as_bytes())
            .map_err(|e| e.to_string())
    } else if let Some(p) = &run.path {
        std::fs::write(p, &run.text).map_err(|e| e.to_string())
    } else {
        std::io::stdout()
            .write_all(run.text.as_bytes())
            .map_err(|e| e.to_string())
    };
    if let Err(e) = written {
        eprintln!("{e}");
        return ExitCode::from(1);
    }
    ExitCode::from(run.code as u8)
}
