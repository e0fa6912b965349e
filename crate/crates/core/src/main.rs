fn main() {
    std::process::exit(pgo::cli::run(std::env::args_os()));
}
