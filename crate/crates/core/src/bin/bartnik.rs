fn main() {
    std::process::exit(bartnik_core::cli::main_with_args(std::env::args_os()));
}
