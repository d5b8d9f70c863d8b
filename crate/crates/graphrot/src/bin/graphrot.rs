fn main() {
    std::process::exit(graphrot::cli::main_with_args(std::env::args_os()));
}
