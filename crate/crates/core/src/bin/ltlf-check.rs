fn main() {
    std::process::exit(ltlf_check::cli::main());
}
