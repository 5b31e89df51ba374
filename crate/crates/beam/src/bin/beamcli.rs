fn main() {
    std::process::exit(beam::cli::main_entry());
}
