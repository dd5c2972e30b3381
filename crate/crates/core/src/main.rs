fn main() {
    std::process::exit(qrs_core::cli::run());
}
