fn main() {
    std::process::exit(collective_decay::cli::run(std::env::args_os()));
}
