fn main() {
    std::process::exit(groupca::cli::main_with_args(std::env::args_os()));
}
