fn main() {
    std::process::exit(discrete_uniformization::cli::main());
}
