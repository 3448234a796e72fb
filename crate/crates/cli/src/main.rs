fn main() {
    std::process::exit(fracvol_cli::run(std::env::args_os()));
}
