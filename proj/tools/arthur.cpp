#include "options.hpp"

#include <arthur/repl.hpp>

#include <iostream>
#include <unistd.h>

int main(int argc, char** argv) {
    CLI::App app{"Talk to Arthur from the terminal"};
    CommonOptions opts;
    opts.add_to(app);
    std::string script;
    app.add_option("--script", script, "run a transcript script non-interactively");
    CLI11_PARSE(app, argc, argv);

    arthur::Config config;
    try {
        config = opts.resolve();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return arthur::kExitIoError;
    }

    if (!script.empty()) return arthur::run_script(script, config, std::cout, std::cerr);

    const bool tty = isatty(STDIN_FILENO);
    if (tty) std::cout << arthur::kReplUsage << '\n';
    return arthur::run_repl(config, std::cin, std::cout, std::cerr, tty);
}
