fn main() -> std::process::ExitCode {
    cxrlabel::main_with_args(std::env::args_os())
}
