fn main() {
    std::process::exit(sigprop_cli::run_cli(std::env::args_os()));
}
