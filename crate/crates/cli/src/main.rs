fn main() {
    std::process::exit(relnpi_cli::run(std::env::args_os()));
}
