fn main() {
    std::process::exit(heatflow::cli::main());
}
