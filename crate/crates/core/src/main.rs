fn main() {
    std::process::exit(scottlab::cli::run(std::env::args_os()));
}
