fn main() {
    std::process::exit(mscd_cli::run(std::env::args_os()));
}
