fn main() {
    std::process::exit(taugda::cli::run(std::env::args_os()));
}
