fn main() {
    std::process::exit(feshbach::cli::run(std::env::args_os()));
}
