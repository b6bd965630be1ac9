fn main() {
    std::process::exit(modgate_harness::cli::main_with(std::env::args_os()));
}
