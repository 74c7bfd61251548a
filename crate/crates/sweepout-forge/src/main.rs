fn main() {
    std::process::exit(sweepout_forge::run_cli());
}
