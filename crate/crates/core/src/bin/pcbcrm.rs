fn main() {
    std::process::exit(pcbcrm::cli::run(std::env::args_os()));
}
