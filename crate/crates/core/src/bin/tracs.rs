fn main() {
    std::process::exit(tracs::cli::run(std::env::args_os()));
}
