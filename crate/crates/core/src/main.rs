fn main() {
    std::process::exit(coarsekit::cli::main_entry(std::env::args_os()));
}
