use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

fn main() {
    let stop = Arc::new(AtomicBool::new(false));
    let flag = stop.clone();
    if let Err(e) = ctrlc::set_handler(move || flag.store(true, Ordering::SeqCst)) {
        eprintln!("warning: no interrupt handler: {e}");
    }
    let code = queens_core::cli::main_with(std::env::args_os(), stop, &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
