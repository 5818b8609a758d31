fn main() {
    std::process::exit(qdrepeater_cli::run(std::env::args_os()));
}
