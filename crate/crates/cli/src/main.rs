fn main() {
    std::process::exit(dnormal_cli::main_with_args(std::env::args_os()));
}
