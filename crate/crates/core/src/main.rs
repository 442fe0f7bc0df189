fn main() {
    std::process::exit(gkcs::cli::main_with_args(std::env::args_os()));
}
