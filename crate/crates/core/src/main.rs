fn main() {
    std::process::exit(bhlab::cli::run(std::env::args_os()));
}
