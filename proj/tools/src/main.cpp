#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include <ddenorm/errors.hpp>
#include <ddenorm/spectrum.hpp>

#include "commands.hpp"
#include "jsonutil.hpp"

namespace {

using ddenorm::cli::json;

// Apply a `--set a.b.c=value` override; the value is parsed as JSON when
// possible and treated as a string otherwise.
void apply_override(json& config, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ddenorm::InvalidInput(
            "--set expects key.path=value, got: " + assignment);
    const std::string path = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);

    json value;
    try {
        value = json::parse(raw);
    } catch (const json::parse_error&) {
        value = raw;
    }

    json* node = &config;
    size_t begin = 0;
    while (true) {
        const size_t dot = path.find('.', begin);
        const std::string key = path.substr(
            begin, dot == std::string::npos ? std::string::npos : dot - begin);
        if (key.empty())
            throw ddenorm::InvalidInput("--set: empty key in path: " + path);
        if (dot == std::string::npos) {
            (*node)[key] = value;
            return;
        }
        node = &(*node)[key];
        if (!node->is_object() && !node->is_null())
            throw ddenorm::InvalidInput(
                "--set: path segment '" + key + "' is not an object");
        begin = dot + 1;
    }
}

void write_error_json(const std::filesystem::path& out_dir,
                      const std::string& command, const std::string& kind,
                      const std::string& message, int exit_code) {
    if (out_dir.empty()) return;
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    const json doc{{"error",
                    {{"kind", kind},
                     {"message", message},
                     {"command", command},
                     {"exit_code", exit_code}}}};
    try {
        ddenorm::cli::write_validated_json(out_dir / "error.json", doc,
                                           "error");
    } catch (...) {
        // Schema lookup may itself fail (e.g. misconfigured install); the
        // stderr message above is then the only report.
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ddenorm: normal forms, predictors, continuation and "
                 "simulation for discrete-delay DDEs"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::vector<std::string> overrides;
    std::uint64_t seed = 0;
    bool seed_given = false;
    bool verbose = false;

    const auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* c = sub->add_option("--config", config_path,
                                  "JSON run configuration");
        if (config_required) c->required();
        sub->add_option("--out", out_path, "output directory")->required();
        sub->add_option("--set", overrides,
                        "override a scalar config field (dot-path=value)");
        sub->add_option("--seed", seed, "RNG seed for the fixed borders")
            ->each([&](const std::string&) { seed_given = true; });
        sub->add_flag("-v,--verbose", verbose, "log progress to stderr");
    };

    CLI::App* analyze = app.add_subcommand(
        "analyze", "correct, classify and compute the normal form");
    CLI::App* predict = app.add_subcommand(
        "predict", "emit predictors for the emanating codim-1 branches");
    CLI::App* cont = app.add_subcommand(
        "continue", "continue a codim-1 branch and detect codim-2 points");
    CLI::App* simulate =
        app.add_subcommand("simulate", "integrate the DDE and cut sections");
    CLI::App* models =
        app.add_subcommand("models", "list the built-in models");
    for (CLI::App* sub : {analyze, predict, cont, simulate})
        add_common(sub, true);
    add_common(models, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    ddenorm::cli::RunContext ctx;
    ctx.command = app.get_subcommands().front()->get_name();
    ctx.out_dir = out_path;
    ctx.verbose = verbose;

    try {
        if (!config_path.empty())
            ctx.config = ddenorm::cli::load_json_file(config_path);
        else
            ctx.config = json::object();
        for (const std::string& assignment : overrides)
            apply_override(ctx.config, assignment);

        if (seed_given) ctx.config["seed"] = seed;
        if (const auto it = ctx.config.find("seed");
            it != ctx.config.end()) {
            if (!it->is_number_unsigned())
                throw ddenorm::InvalidInput(
                    "config: 'seed' must be a non-negative integer");
            ddenorm::set_border_seed(it->get<std::uint64_t>());
        }
        ctx.seed = ddenorm::border_seed();

        std::filesystem::create_directories(ctx.out_dir);

        if (ctx.command == "models")
            ddenorm::cli::cmd_models(ctx);
        else if (ctx.command == "analyze")
            ddenorm::cli::cmd_analyze(ctx);
        else if (ctx.command == "predict")
            ddenorm::cli::cmd_predict(ctx);
        else if (ctx.command == "continue")
            ddenorm::cli::cmd_continue(ctx);
        else if (ctx.command == "simulate")
            ddenorm::cli::cmd_simulate(ctx);
        return 0;
    } catch (const ddenorm::Error& e) {
        const bool config_error = e.kind() == "InvalidInput" ||
                                  e.kind() == "UnknownModel";
        const int code = config_error ? 2 : 3;
        fmt::print(stderr, "ddenorm {}: [{}] {}\n", ctx.command, e.kind(),
                   e.what());
        write_error_json(ctx.out_dir, ctx.command, e.kind(), e.what(), code);
        return code;
    } catch (const std::exception& e) {
        fmt::print(stderr, "ddenorm {}: [InternalError] {}\n", ctx.command,
                   e.what());
        write_error_json(ctx.out_dir, ctx.command, "InternalError", e.what(),
                         3);
        return 3;
    }
}
