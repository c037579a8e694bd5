fn main() {
    std::process::exit(secgame::cli::run(std::env::args_os()));
}
