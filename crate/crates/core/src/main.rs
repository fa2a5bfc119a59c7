fn main() {
    std::process::exit(mcoa::cli::parse_and_dispatch(std::env::args_os()));
}
