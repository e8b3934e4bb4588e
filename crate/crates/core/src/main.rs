fn main() {
    std::process::exit(julia_lyapunov::cli::run(std::env::args_os()));
}
