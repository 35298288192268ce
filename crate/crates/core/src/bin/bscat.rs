fn main() {
    std::process::exit(backscatter_sim::cli::main(std::env::args_os()));
}
