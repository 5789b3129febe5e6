fn main() {
    std::process::exit(skirm_harness::cli::run(std::env::args()));
}
