fn main() {
    std::process::exit(rough_elastic_cli::run_command(std::env::args_os()));
}
