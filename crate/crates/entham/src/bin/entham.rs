fn main() {
    std::process::exit(entham::cli::run(std::env::args_os()));
}
