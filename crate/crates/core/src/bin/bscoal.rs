fn main() {
    std::process::exit(bscoal::cli::run(std::env::args_os()));
}
