fn main() {
    std::process::exit(chebdesign::cli::run(std::env::args_os()));
}
