fn main() {
    std::process::exit(risekit_cli::run(std::env::args_os()));
}
