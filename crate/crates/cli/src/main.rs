fn main() {
    std::process::exit(nf_cli::run(std::env::args_os()));
}
