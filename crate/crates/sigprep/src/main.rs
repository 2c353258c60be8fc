fn main() {
    std::process::exit(sigprep::cli::run(std::env::args_os()));
}
