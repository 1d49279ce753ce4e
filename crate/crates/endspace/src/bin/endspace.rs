fn main() {
    std::process::exit(endspace::cli::run(std::env::args_os()));
}
