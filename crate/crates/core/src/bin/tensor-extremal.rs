fn main() {
    std::process::exit(tensor_extremal::cli::main_with_args(std::env::args_os()));
}
