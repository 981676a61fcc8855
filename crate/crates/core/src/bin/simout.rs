fn main() {
    std::process::exit(simout::cli::run(std::env::args_os()));
}
