fn main() {
    std::process::exit(nicholson::cli::run(std::env::args_os()));
}
