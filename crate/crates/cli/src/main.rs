use clap::Parser;
use landau_phase::config::{Flags, RunConfig};
use landau_phase::run::run;

fn main() {
    let flags = Flags::parse();
    let code = match landau_phase::init_threads().and_then(|()| RunConfig::resolve(&flags)) {
        Ok(cfg) => run(&cfg),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}
