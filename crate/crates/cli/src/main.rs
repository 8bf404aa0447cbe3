fn main() {
    std::process::exit(bbounds::main_with_args(std::env::args_os()));
}
