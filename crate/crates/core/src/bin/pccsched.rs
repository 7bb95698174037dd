fn main() {
    std::process::exit(pccsched::harness::cli::main_with_args(std::env::args_os()));
}
