fn main() {
    std::process::exit(topoband::cli::run(std::env::args_os()));
}
