fn main() {
    std::process::exit(gaussinv_cli::commands::run(std::env::args_os()));
}
