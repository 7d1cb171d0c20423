fn main() {
    std::process::exit(crnlift::cli::main_with_args(std::env::args_os()));
}
