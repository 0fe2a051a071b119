fn main() {
    std::process::exit(stpcs::cli::run(std::env::args_os()));
}
