fn main() {
    std::process::exit(kohn_core::cli::main_with_args(std::env::args()));
}
