fn main() {
    std::process::exit(isoskel_cli::run_cli(std::env::args_os()));
}
