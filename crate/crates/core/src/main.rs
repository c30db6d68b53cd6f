fn main() {
    std::process::exit(marklat::cli::run(std::env::args_os()));
}
