fn main() {
    std::process::exit(corner_contact::harness::cli::main_with_args(std::env::args_os()));
}
