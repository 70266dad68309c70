fn main() {
    std::process::exit(tubenav::cli::run(std::env::args_os()));
}
