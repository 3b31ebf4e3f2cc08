fn main() {
    std::process::exit(monopole_lab::execute(std::env::args()));
}
