fn main() {
    std::process::exit(herald_core::cli::main_with_stdio());
}
