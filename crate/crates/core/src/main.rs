fn main() {
    std::process::exit(coopan::cli::run(std::env::args_os()));
}
