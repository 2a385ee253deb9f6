fn main() {
    std::process::exit(fracheat::run_cli(std::env::args_os()));
}
