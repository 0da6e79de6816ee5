fn main() {
    std::process::exit(sbo_cli::run_cli(std::env::args_os()));
}
