use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let env = std::env::var("PROKIT_HORIZON").ok();
    let out = prokit_cli::run(std::env::args_os(), env.as_deref());
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    let _ = std::io::stdout().flush();
    ExitCode::from(u8::try_from(out.code).unwrap_or(1))
}
