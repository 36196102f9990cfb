fn main() {
    std::process::exit(reftrace::cli::run_cli(std::env::args_os()));
}
