fn main() {
    std::process::exit(lyapbound::cli::run());
}
