fn main() {
    std::process::exit(mbverify::cli::run(std::env::args_os()));
}
