fn main() {
    std::process::exit(llcomp::cli::run(std::env::args_os()));
}
