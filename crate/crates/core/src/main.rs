use circens::cli;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match cli::run(&args) {
        Ok(report) => print!("{report}"),
        Err(err) => {
            eprintln!("{err}");
            if matches!(err, cli::CliError::Usage(_)) {
                eprintln!("\n{}", cli::USAGE);
            }
            std::process::exit(err.exit_code());
        }
    }
}
