fn main() {
    std::process::exit(repeller::cli::main_entry());
}
