use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    if let Some(n) = std::env::var("SPA_TOOLKIT_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let result = spa_toolkit::cli::run(std::env::args_os());
    if let Some(payload) = &result.payload {
        let mut out = std::io::stdout().lock();
        let _ = writeln!(out, "{payload}");
    }
    if !result.diagnostics.is_empty() {
        eprint!("{}", result.diagnostics);
    }
    ExitCode::from(result.exit_code as u8)
}
