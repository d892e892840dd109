fn main() {
    std::process::exit(oedg::cli::main(std::env::args()));
}
