fn main() {
    std::process::exit(cyclescope::cli::run(std::env::args_os()));
}
