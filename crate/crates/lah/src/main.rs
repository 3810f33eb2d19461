fn main() {
    std::process::exit(lah::cli::run());
}
