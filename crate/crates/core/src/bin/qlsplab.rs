fn main() -> std::process::ExitCode {
    qlsplab::cli::main_with_args(std::env::args_os())
}
