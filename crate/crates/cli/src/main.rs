fn main() {
    std::process::exit(bvis_cli::run(std::env::args_os()));
}
