use clap::Parser;

fn main() {
    let cli = crgjms_cli::Cli::parse();
    let code = match crgjms_cli::execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}
