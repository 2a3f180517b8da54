fn main() {
    std::process::exit(h5geo::cli::main());
}
