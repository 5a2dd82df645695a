fn main() {
    std::process::exit(coupled_alpha::cli::run());
}
