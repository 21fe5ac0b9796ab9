// SPDX-License-Identifier: Apache-2.0

fn main() {
    let code = lpa_bench::cli::main_with(
        std::env::args_os(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    std::process::exit(code);
}
