fn main() {
    std::process::exit(monostate::cli::main());
}
