fn main() {
    std::process::exit(daisies::cli::run());
}
