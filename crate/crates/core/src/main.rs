fn main() {
    std::process::exit(avgfw::cli::run(std::env::args_os()));
}
