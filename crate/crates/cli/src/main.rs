use std::process::ExitCode;

fn main() -> ExitCode {
    weibcv::app::run(std::env::args_os())
}
