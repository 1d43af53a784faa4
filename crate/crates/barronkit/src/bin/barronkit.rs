fn main() {
    std::process::exit(barronkit::cli::run(std::env::args_os()));
}
