fn main() {
    std::process::exit(wcycles::cli::run());
}
