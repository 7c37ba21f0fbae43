fn main() {
    std::process::exit(graff::cli::run());
}
