fn main() {
    std::process::exit(subdiv::cli::run());
}
