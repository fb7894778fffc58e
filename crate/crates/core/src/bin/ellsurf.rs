fn main() {
    std::process::exit(ellsurf::cli::main());
}
