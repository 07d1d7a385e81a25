fn main() {
    std::process::exit(tlm2fmu::cli::main());
}
