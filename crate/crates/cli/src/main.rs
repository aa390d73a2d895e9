fn main() {
    std::process::exit(cyclefit_cli::run(std::env::args_os()));
}
