fn main() {
    quatcomp::cli::configure_threads();
    std::process::exit(quatcomp::cli::run(std::env::args_os()));
}
