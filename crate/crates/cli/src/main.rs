fn main() {
    std::process::exit(vlab_cli::run(std::env::args_os()));
}
