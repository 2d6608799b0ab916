fn main() {
    std::process::exit(vanka_mg::cli::run(std::env::args_os()));
}
