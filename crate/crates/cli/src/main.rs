fn main() {
    let mut out = std::io::stdout().lock();
    std::process::exit(bubres_cli::run_command(std::env::args_os(), &mut out));
}
