fn main() -> std::process::ExitCode {
    radconv::cli::run(std::env::args_os())
}
