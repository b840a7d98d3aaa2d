fn main() {
    std::process::exit(treedense::cli::main());
}
