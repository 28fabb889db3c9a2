fn main() {
    std::process::exit(snapcs::cli::run(std::env::args_os()));
}
