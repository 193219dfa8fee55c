#ifndef DDENORM_TOOLS_COMMANDS_HPP
#define DDENORM_TOOLS_COMMANDS_HPP

#include <filesystem>
#include <string>

#include "jsonutil.hpp"

namespace ddenorm::cli {

inline constexpr const char* kToolVersion = "1.0.0";

struct RunContext {
    std::string command;
    json config;
    std::filesystem::path out_dir;
    std::uint64_t seed = 0;
    bool verbose = false;
};

void cmd_models(const RunContext& ctx);
void cmd_analyze(const RunContext& ctx);
void cmd_predict(const RunContext& ctx);
void cmd_continue(const RunContext& ctx);
void cmd_simulate(const RunContext& ctx);

} // namespace ddenorm::cli

#endif
