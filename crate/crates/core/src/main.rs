fn main() {
    std::process::exit(nikishin::cli::run(std::env::args_os()));
}
