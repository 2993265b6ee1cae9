fn main() {
    std::process::exit(isectq::cli::run(std::env::args_os()));
}
