fn main() {
    std::process::exit(polmulti::cli::main_with_args(std::env::args_os()));
}
