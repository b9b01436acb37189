fn main() {
    std::process::exit(toad_cli::run_cli(std::env::args_os()));
}
