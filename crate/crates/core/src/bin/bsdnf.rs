fn main() {
    std::process::exit(bsdnf_core::cli::run());
}
