fn main() {
    std::process::exit(qwick::cli::main_with_args(std::env::args_os()));
}
