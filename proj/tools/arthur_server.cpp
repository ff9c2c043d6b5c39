#include "options.hpp"

#include <arthur/repl.hpp>
#include <arthur/service.hpp>

#include <csignal>
#include <iostream>

namespace {
httplib::Server* g_server = nullptr;

void stop(int) {
    if (g_server) g_server->stop();
}
}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Arthur REST service"};
    CommonOptions opts;
    opts.add_to(app);
    std::string host = "127.0.0.1";
    int port = 8717;
    app.add_option("--host", host, "bind address");
    app.add_option("--port", port, "bind port")->check(CLI::Range(1, 65535));
    CLI11_PARSE(app, argc, argv);

    arthur::Config config;
    arthur::LongTermMemory ltm;
    try {
        config = opts.resolve();
        ltm = arthur::load_or_fresh(config.ltm_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return arthur::kExitIoError;
    }

    arthur::Agent agent(config, std::move(ltm), nullptr, std::filesystem::current_path());
    const auto path = config.ltm_path;
    arthur::AgentService service(agent, [path](const arthur::LongTermMemory& m) { arthur::save_ltm(m, path); });

    httplib::Server server;
    service.bind(server);
    g_server = &server;
    std::signal(SIGINT, stop);
    std::signal(SIGTERM, stop);

    std::cout << "listening on http://" << host << ':' << port << std::endl;
    if (!server.listen(host, port)) {
        std::cerr << "error: cannot listen on " << host << ':' << port << '\n';
        return arthur::kExitIoError;
    }
    try {
        service.persist();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return arthur::kExitIoError;
    }
    return arthur::kExitOk;
}
