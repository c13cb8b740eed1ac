use std::io::Write;

fn main() {
    let out = twisted_endoscopy::cli::run(std::env::args_os(), &mut std::io::stdin(), std::env::var_os("TWENDO_OUT").map(Into::into));
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    let _ = std::io::stdout().flush();
    std::process::exit(out.code);
}
