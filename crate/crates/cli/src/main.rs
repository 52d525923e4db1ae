fn main() {
    std::process::exit(linlayout_cli::run(std::env::args_os()));
}
