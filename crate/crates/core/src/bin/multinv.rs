fn main() {
    std::process::exit(multinv::cli::run(std::env::args_os()));
}
