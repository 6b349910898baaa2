fn main() {
    std::process::exit(floorloc::cli::main_with_args(std::env::args_os()));
}
