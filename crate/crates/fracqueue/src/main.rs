fn main() {
    std::process::exit(fracqueue::cli::run(std::env::args_os()));
}
