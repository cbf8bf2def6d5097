use topoperc::cli;

fn main() {
    if let Err(e) = cli::run() {
        eprintln!("error[{}]: {e}", e.category());
        std::process::exit(e.exit_code());
    }
}
