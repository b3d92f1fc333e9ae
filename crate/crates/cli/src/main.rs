use std::process::ExitCode;

fn main() -> ExitCode {
    match anomedge::cli::main_with_args(std::env::args_os()) {
        Ok(lines) => {
            for line in lines {
                println!("{line}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.line());
            ExitCode::from(e.kind.exit_code() as u8)
        }
    }
}
