fn main() {
    std::process::exit(gamow::cli::main_with_args(std::env::args_os()));
}
