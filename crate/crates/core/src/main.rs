fn main() {
    std::process::exit(holonomy_forge::cli::run());
}
