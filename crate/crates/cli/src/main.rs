fn main() {
    std::process::exit(qnet_cli::run());
}
