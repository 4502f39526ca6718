fn main() {
    std::process::exit(zeckgame::cli::run_cli(std::env::args_os()));
}
