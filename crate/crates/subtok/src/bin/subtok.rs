fn main() {
    std::process::exit(subtok::cli::main())
}
